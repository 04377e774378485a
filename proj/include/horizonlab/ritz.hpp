#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "horizonlab/cost_ledger.hpp"
#include "horizonlab/matrix.hpp"

namespace horizonlab {

enum class ModelKind { harmonic_1d, coupled_quartic_2d };

std::string model_name(ModelKind k);
ModelKind model_from_name(const std::string& s);

// harmonic_1d: H = p^2/2 + omega^2 q^2 / 2 (unit mass), E_N = hbar omega (N + 1/2).
// coupled_quartic_2d: H = (p1^2 + p2^2)/2 + omega^2 (q1^2 + q2^2)/2
//                       + coupling * q1^2 q2^2,
// in the tensor-product oscillator basis truncated at D states per mode.
struct ModelHamiltonian {
    ModelKind kind = ModelKind::harmonic_1d;
    double omega = 1.0;
    double coupling = 0.0;
    double hbar = 1.0;

    void validate() const;
};

// <basis_i|H|basis_j> from closed-form ladder matrix elements of q^2;
// assembled symmetrically. D is the per-mode truncation for the 2d model
// (matrix dimension D^2). Ledger, when given, is charged with the executed
// arithmetic.
SymMatrix build_matrix(const ModelHamiltonian& h, std::size_t D, CostLedger* ledger = nullptr);

struct JacobiOptions {
    // off-diagonal Frobenius target relative to ||A||_F; the contract bound
    // is 1e-12, the default runs to near round-off
    double tol = 1e-15;
    std::size_t max_sweeps = 64;
    bool want_vectors = false;
    CostLedger* ledger = nullptr;
};

struct EigenSolution {
    std::vector<double> eigenvalues;  // ascending
    std::vector<double> vectors;      // column k = eigenvector k (row-major n*n), if requested
    std::size_t n = 0;
    std::size_t sweeps = 0;
    std::size_t rotations = 0;
};

// cyclic Jacobi, row-major rotation order (deterministic)
EigenSolution jacobi_eigensolve(const SymMatrix& m, const JacobiOptions& opts = {});

struct SpectrumOptions {
    JacobiOptions jacobi;
    // block-diagonalize the 2d model by per-mode parity (results identical,
    // ~16x less work)
    bool parity_blocks = true;
};

// full eigenvalue set of the model at per-mode truncation D, ascending
std::vector<double> solve_spectrum(const ModelHamiltonian& h, std::size_t D,
                                   const SpectrumOptions& opts = {});

// same pipeline evaluated in software multi-precision (mantissa_bits > 53)
std::vector<double> solve_spectrum_mp(const ModelHamiltonian& h, std::size_t D,
                                      int mantissa_bits, const SpectrumOptions& opts = {});

struct RitzResult {
    std::size_t basis_dim = 0;   // per-mode D
    std::vector<double> eigenvalues;
    std::size_t matrix_dim = 0;  // D or D^2
    CostLedger op_count;
};

RitzResult solve_ritz(const ModelHamiltonian& h, std::size_t D, int mantissa_bits,
                      const SpectrumOptions& opts = {});

struct ConvergenceStudy {
    std::vector<std::size_t> dims;
    std::vector<std::vector<double>> errors;  // errors[di][level]
    std::size_t levels = 0;
    std::size_t reference_D = 0;
    double fitted_alpha = 0.0;  // +inf when the basis is exact at every dim
    double fit_r2 = 0.0;
    double fit_constant = 0.0;  // mean_error ~ fit_constant * D^-alpha
};

// errors vs the self-reference spectrum at reference_D; the power-law fit runs
// on mean-over-levels errors with the two smallest dims excluded (when at
// least five dims are given)
ConvergenceStudy convergence_study(const ModelHamiltonian& h, std::span<const std::size_t> dims,
                                   std::size_t levels, std::size_t reference_D,
                                   const SpectrumOptions& opts = {});

// true iff every tracked level is non-increasing from D_small to D_large
bool variational_upper_bound_check(const ModelHamiltonian& h, std::size_t D_small,
                                   std::size_t D_large, std::size_t levels,
                                   const SpectrumOptions& opts = {});

// `D,level,error`
void write_convergence_csv(const std::filesystem::path& path, const ConvergenceStudy& s);
// `model,lambda,alpha_hat,r2`
void write_study_summary_csv(const std::filesystem::path& path, const ModelHamiltonian& h,
                             const ConvergenceStudy& s);

} // namespace horizonlab
