#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "horizonlab/errors.hpp"
#include "horizonlab/experiments.hpp"

// exit codes: 0 success, 2 validation error, 3 numerical/convergence failure,
// 4 I/O error
int main(int argc, char** argv) {
    using namespace horizonlab;

    CLI::App app{"horizonlab: overlap-decay horizons, Ritz convergence and "
                 "bit-operation cost scaling for integrable vs nonintegrable dynamics"};
    app.set_version_flag("--version", std::string("horizonlab ") + kToolVersion);

    std::string experiment;
    std::string config_file;
    std::vector<std::string> sets;
    std::string out_dir;
    std::uint64_t seed = 1;
    int threads = 1;
    bool plot = false;

    app.add_option("experiment", experiment, "one of: evolve, horizon, amplitude, ritz, cost_scan, classical, fig1")
        ->required();
    app.add_option("--config", config_file, "JSON config file (or a previous manifest)");
    auto* set_opt = app.add_option("--set", sets, "override: key=value (repeatable)");
    set_opt->take_all();
    auto* out_opt = app.add_option("--out", out_dir, "output directory");
    auto* seed_opt = app.add_option("--seed", seed, "RNG seed");
    auto* thr_opt = app.add_option("--threads", threads, "worker threads for scans");
    auto* plot_opt = app.add_flag("--plot", plot, "emit gnuplot scripts");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        ExperimentConfig cfg;
        if (!config_file.empty()) cfg = load_config_file(config_file);
        cfg.experiment = experiment;
        // flags win over the config file
        if (*out_opt) cfg.output_dir = out_dir;
        if (*seed_opt) cfg.seed = seed;
        if (*thr_opt) cfg.threads = threads;
        if (*plot_opt) cfg.plot = plot;
        for (const auto& s : sets) apply_override(cfg, s);

        const RunManifest m = run_experiment(cfg);
        std::cout << "wrote " << m.path.string() << "\n";
        for (const auto& [name, hash] : m.doc["files"].items())
            std::cout << "  " << name << "  " << hash.get<std::string>().substr(0, 12) << "\n";
        return 0;
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const FormatError& e) {
        std::cerr << "format error: " << e.what() << "\n";
        return 2;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return 4;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
