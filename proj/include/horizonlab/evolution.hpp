#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "horizonlab/perturbation.hpp"
#include "horizonlab/spectral.hpp"

namespace horizonlab {

// diagonal: overlap from the first sum only (R = 0, exact basis functions);
// full: residual mixing through (delta_{mu nu} + R_{mu nu})
enum class PropagationMode { diagonal, full };

// Time samples of <psi(T)|psi~(T)> and the deviation norm; the object behind
// the decay/plateau curves.
struct OverlapSeries {
    std::vector<double> times;
    std::vector<double> overlap_re;
    std::vector<double> overlap_im;
    std::vector<double> deviation;

    std::size_t size() const { return times.size(); }
};

std::vector<double> linear_times(double t0, double t1, std::size_t n);
std::vector<double> log_times(double t0, double t1, std::size_t n);

// amplitudes_mu = c_mu exp(-i E_mu T / hbar); phases computed from scratch
// per call, never by incremental multiplication.
WaveState evolve_exact(const SpectralModel& model, double T);

WaveState evolve_approx(const PerturbedSpectrum& pert, const SpectralModel& model, double T,
                        PropagationMode mode = PropagationMode::diagonal);

OverlapSeries overlap_series(const SpectralModel& model, const PerturbedSpectrum& pert,
                             std::span<const double> times,
                             PropagationMode mode = PropagationMode::diagonal);

// max_k |<A(t_k)|B(t_k)> - <A(0)|B(0)>| under exact evolution of both states
double unitarity_check(const SpectralModel& model, const WaveState& a, const WaveState& b,
                       std::span<const double> times);

// `time,overlap_re,overlap_im,deviation`
void write_series_csv(const std::filesystem::path& path, const OverlapSeries& s);
OverlapSeries read_series_csv(const std::filesystem::path& path);

} // namespace horizonlab
