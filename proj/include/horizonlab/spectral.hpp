#pragma once

#include <complex>
#include <filesystem>
#include <span>
#include <vector>

namespace horizonlab {

using cplx = std::complex<double>;

// Normalization tolerances: tight at construction, looser at operation
// preconditions so long propagation loops have round-off headroom.
inline constexpr double kNormTolConstruct = 1e-12;
inline constexpr double kNormTolOperation = 1e-9;

// Exact eigenenergies E_mu, expansion coefficients c_mu of the initial state,
// and hbar. Basis functions never materialize; the index mu is the basis.
struct SpectralModel {
    std::vector<double> energies;
    std::vector<cplx> coefficients;
    double hbar = 1.0;

    std::size_t dim() const { return energies.size(); }
    void validate() const;
};

SpectralModel make_model(std::vector<double> energies, std::vector<cplx> coefficients,
                         double hbar = 1.0);

// c_mu = 1/sqrt(dim) over a linear energy ladder. In diagonal propagation the
// overlap depends only on the energy errors, so the ladder spacing is
// immaterial; it still gives distinct phases for unitarity tests.
SpectralModel equal_coefficient_model(std::size_t dim, double hbar = 1.0,
                                      double spacing = 1.0);

// A state as its coefficient vector in the exact eigenbasis at a given time.
struct WaveState {
    std::vector<cplx> amplitudes;
    double time = 0.0;

    std::size_t dim() const { return amplitudes.size(); }
    double norm() const;
};

// validates unit norm to kNormTolConstruct
WaveState make_state(std::vector<cplx> amplitudes, double time = 0.0);

// sum_mu conj(a_mu) b_mu
cplx inner_product(const WaveState& a, const WaveState& b);

// sqrt(2 (1 - Re<a|b>)); requires normalized inputs (kNormTolOperation)
double deviation_norm(const WaveState& a, const WaveState& b);

WaveState normalize(const WaveState& a);

// Spectrum file: `mu,energy,re_c,im_c`, one row per mu, 17 significant digits.
void write_spectrum_csv(const std::filesystem::path& path, const SpectralModel& m);
SpectralModel read_spectrum_csv(const std::filesystem::path& path, double hbar = 1.0);

} // namespace horizonlab
