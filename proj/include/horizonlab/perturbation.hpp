#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "horizonlab/matrix.hpp"
#include "horizonlab/spectral.hpp"

namespace horizonlab {

enum class ErrorKind { uniform, gaussian, fixed };

// Energy-error distribution: uniform in [-scale, scale] is the default,
// gaussian (sigma = scale) for sensitivity checks, fixed for degenerate
// closed-form cases.
struct ErrorDistribution {
    ErrorKind kind = ErrorKind::uniform;
    double scale = 0.0;
    std::uint64_t seed = 1;

    void validate() const;
};

// Approximate spectrum: energies E~_mu, coefficients c~_mu, optional residual
// matrix R with R[mu*dim+nu] = <phi_mu|delta phi_nu>, |R| < epsilon.
struct PerturbedSpectrum {
    std::vector<double> energies_approx;
    std::vector<cplx> coefficients_approx;
    std::optional<std::vector<cplx>> residuals;
    double epsilon = 0.0;

    std::size_t dim() const { return energies_approx.size(); }
};

struct SampleOptions {
    bool with_residuals = false;
};

// E~ = E + dE per dist; c~ = renormalized c + dc with |dc_mu| < dE_coeff and
// |c~_mu - c_mu| < dE_coeff guaranteed; deterministic in dist.seed.
PerturbedSpectrum sample_perturbed(const SpectralModel& model, const ErrorDistribution& dist,
                                   double dE_coeff, SampleOptions opts = {});

// verifies the pairing invariants (|c~-c| < eps, |R| < eps); throws on violation
void validate_pairing(const SpectralModel& model, const PerturbedSpectrum& pert);

// |c_mu|^2-weighted population standard deviation of the energy errors
double energy_dispersion(const SpectralModel& model, const PerturbedSpectrum& pert);

struct RayleighError {
    double value = 0.0;       // 2 E Re<phi|dphi> + <dphi|H|dphi>
    double bound = 0.0;       // 2|E| eps + eps^2 ||H||,  eps = ||dphi||
    double eigenvalue = 0.0;  // E of phi
};

// phi must be an eigenvector of H (residual checked); exact identity with
// <phi+dphi|H|phi+dphi> - E since H phi = E phi.
RayleighError rayleigh_energy_error(const SymMatrix& H, const WaveState& phi,
                                    std::span<const cplx> delta_phi);

// power iteration estimate of ||H||_2 for a symmetric matrix
double spectral_norm_estimate(const SymMatrix& H, std::size_t max_iters = 300);

// `mu,energy_exact,energy_approx,re_c,im_c,re_c_approx,im_c_approx`
void write_perturbed_csv(const std::filesystem::path& path, const SpectralModel& model,
                         const PerturbedSpectrum& pert);

} // namespace horizonlab
