#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "horizonlab/cost_ledger.hpp"
#include "horizonlab/metered.hpp"
#include "horizonlab/ritz.hpp"

namespace horizonlab {

enum class ScalingModel { power_law, poly_log };
enum class Compressibility { compressible, incompressible, ambiguous };

std::string scaling_model_name(ScalingModel m);
std::string compressibility_name(Compressibility c);

struct ModelFitResult {
    ScalingModel kind;
    double exponent = 0.0;
    double r2 = 0.0;
};

// Both candidate laws fitted to (x, cost): cost ~ x^p on log-log axes and
// cost ~ (log2 x)^q on log-log of log2 x. Higher r2 wins; the verdict is
// ambiguous when the r2 gap is < 0.02 or the winning exponent is < 0.1.
struct ScalingFit {
    std::vector<double> xs, ys;
    ModelFitResult power;
    ModelFitResult polylog;
    ScalingModel winner = ScalingModel::power_law;
    double exponent = 0.0;
    double r2 = 0.0;
    Compressibility classification = Compressibility::ambiguous;
};

ScalingFit classify_scaling(std::span<const double> xs, std::span<const double> ys);

// upfront guard shared by the cost scans: >= 4 points, all > 1, >= 3 decades
void require_three_decades(std::span<const double> Ts, const char* who);

// mantissa length for a target energy accuracy, floored at 8 bits
int mantissa_for_accuracy(double dE, int guard_bits = 4);

// closed-form oscillator ladder E_N = hbar omega (N + 1/2) evaluated on
// metered arithmetic at n bits
CostLedger integrable_spectrum_cost(std::size_t n_levels, int mantissa_bits,
                                    double hbar = 1.0, double omega = 1.0,
                                    std::vector<double>* energies_out = nullptr);

// assembly + Jacobi eigensolve of the model under instrumentation
CostLedger ritz_spectrum_cost(const ModelHamiltonian& h, std::size_t D, int mantissa_bits,
                              std::vector<double>* energies_out = nullptr);

enum class SystemKind { integrable, nonintegrable };

struct CostScanRow {
    double T = 0.0;
    double dE = 0.0;
    int n_bits = 0;
    std::size_t D = 0;  // per-mode basis dimension (0 for the integrable pipeline)
    CostLedger ledger;
};

struct PredictionCostOptions {
    double hbar = 1.0;
    int guard_bits = 4;
    // integrable pipeline
    std::size_t n_levels = 100;
    // nonintegrable pipeline: inverted convergence law D = (C/dE)^(1/alpha)
    ModelHamiltonian model{ModelKind::coupled_quartic_2d, 1.0, 5.0, 1.0};
    double calib_alpha = 0.0;     // 0 = calibrate via convergence_study
    double calib_constant = 0.0;
    std::size_t d_min = 6;
    std::size_t d_cap = 56;
    // consulted before solving; filled after (keyed by model/lambda/D)
    class SpectrumCache* cache = nullptr;
};

struct PredictionCostScan {
    SystemKind kind;
    std::vector<CostScanRow> rows;
    ScalingFit fit;
    double calib_alpha = 0.0;
    double calib_constant = 0.0;
};

// Maps each T to the accuracy dE = pi hbar / T it demands, runs the matching
// spectrum pipeline under instrumentation, and classifies cost growth. The
// fitted exponents are those of this pipeline, an upper bound on the minimal
// cost; see the scan metadata note emitted with the results.
PredictionCostScan prediction_cost_curve(SystemKind kind, std::span<const double> Ts,
                                         const PredictionCostOptions& opts = {});

// `T,dE,n_bits,D,adds,muls,divs,model_cost`
void write_cost_scan_csv(const std::filesystem::path& path,
                         std::span<const CostScanRow> rows);
// `system,model_kind,exponent,r2,classification` (one row per fitted model)
void write_fit_summary_csv(const std::filesystem::path& path, const std::string& system,
                           const ScalingFit& fit, bool append = false);

} // namespace horizonlab
