#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "horizonlab/evolution.hpp"

namespace horizonlab {

// pi*hbar/dE; dE == 0 reports an infinite horizon as the distinguished value
double predict_horizon_theory(double dE, double hbar);

// 1/sqrt(2 dim)
double amplitude_theory(std::size_t dim);

// (1/dim) sum_mu cos(dE_mu T / hbar)
double cosine_model(std::span<const double> deltaE, double hbar, double T);

struct HorizonDetectOptions {
    double threshold = 0.1;
    double sustain_level = 0.0;  // typically 3 * amplitude_theory(dim)
    std::size_t window = 16;
};

// First sustained crossing of overlap_re below threshold: the crossing time is
// interpolated between the bracketing samples, and the next `window` samples
// must stay below sustain_level. A monotone nonincreasing prefix bypasses the
// window, keeping the single-cosine closed form exact. nullopt = not reached.
std::optional<double> detect_horizon(const OverlapSeries& series,
                                     const HorizonDetectOptions& opts);

// convenience: sustain level from the dimension
std::optional<double> detect_horizon(const OverlapSeries& series, double threshold,
                                     std::size_t dim, std::size_t window = 16);

// RMS of overlap_re over samples with time >= t_min (at least 100 required)
double measure_amplitude(const OverlapSeries& series, double t_min);

struct HorizonReport {
    std::size_t dim = 0;
    double dE = 0.0;
    double threshold = 0.1;
    double tp_theory = 0.0;
    double tp_empirical = 0.0;  // +inf when not reached
    double amp_theory = 0.0;
    double amp_empirical = 0.0;
};

// `dim,dE,threshold,tp_theory,tp_empirical,amp_theory,amp_empirical`
void write_horizon_csv(const std::filesystem::path& path,
                       std::span<const HorizonReport> reports);

} // namespace horizonlab
