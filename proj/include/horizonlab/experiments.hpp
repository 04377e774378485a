#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace horizonlab {

inline constexpr const char* kToolVersion = "0.1.0";

// One experiment invocation: name, parameter map (validated against the
// experiment's key set), output directory, seed, worker count.
struct ExperimentConfig {
    std::string experiment;
    nlohmann::json params = nlohmann::json::object();
    std::filesystem::path output_dir = "out";
    std::uint64_t seed = 1;
    int threads = 1;
    bool plot = false;

    bool operator==(const ExperimentConfig& o) const;
};

const std::vector<std::string>& experiment_names();

nlohmann::json config_to_json(const ExperimentConfig& c);
ExperimentConfig config_from_json(const nlohmann::json& j);

// plain config file or a manifest (the config snapshot is extracted)
ExperimentConfig load_config_file(const std::filesystem::path& path);

// --set key=value; value parsed as JSON when possible, string otherwise
void apply_override(ExperimentConfig& c, const std::string& key_eq_value);

// throws ValidationError listing the offending key
void validate_config(const ExperimentConfig& c);

struct RunManifest {
    nlohmann::json doc;
    std::filesystem::path path;
};

RunManifest run_experiment(const ExperimentConfig& c);

enum class PlotKind { overlap, deviation, scaling, divergence, convergence };

// Standalone gnuplot script; scaling scripts refit both laws from the CSV so
// the figure is self-contained. CSVs are validated first (FormatError names
// the missing column).
std::filesystem::path emit_plot_script(std::span<const std::filesystem::path> csvs,
                                       PlotKind kind, const std::filesystem::path& out_path);

// shared worker pool for scan points; deterministic because work items derive
// their own seeds from the index
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

} // namespace horizonlab
