#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "horizonlab/costmeter.hpp"

namespace horizonlab {

enum class MapKind { rotation, standard };

// rotation: theta' = theta + 2 pi rho (mod 2 pi), p' = p  (parameter = rho)
// standard: p' = p + K sin(theta), theta' = theta + p' (mod 2 pi)  (parameter = K)
struct PhaseMap {
    MapKind kind = MapKind::standard;
    double parameter = 7.0;
    double theta = 0.0;
    double momentum = 0.0;
};

PhaseMap step(const PhaseMap& m);

// one-step Jacobian d(p',theta')/d(p,theta) at the current point
struct Jacobian2 {
    double dpdp, dpdth, dthdp, dthdth;
    double det() const { return dpdp * dthdth - dpdth * dthdp; }
};
Jacobian2 step_jacobian(const PhaseMap& m);

enum class FitKind { exponential, polynomial };

struct DivergenceSeries {
    std::vector<std::uint64_t> steps;
    std::vector<double> separation;
    FitKind fit_kind = FitKind::polynomial;
    double rate = 0.0;  // Lyapunov rate or polynomial degree
    double r2 = 0.0;
    // matched tangent-map estimate: least squares on the cumulative tangent
    // log-growth over the same window
    double tangent_rate = 0.0;
    std::size_t window_begin = 0;  // first step index used by the fit
    std::size_t window_end = 0;    // last step index used by the fit
};

struct DivergenceOptions {
    std::size_t drop_transient = 10;  // fit window starts after these steps
    double saturation = 0.1;          // and stops at this separation
};

// Two trajectories delta0 apart evolved at mantissa_bits precision on the
// torus metric, with exponential and polynomial fits over the pre-saturation
// window; the higher-r2 model is kept.
DivergenceSeries divergence_growth(const PhaseMap& map, double delta0, std::size_t steps,
                                   int mantissa_bits, const DivergenceOptions& opts = {});

// log2(fT) - log2(delta), floored at 8
double required_mantissa(double fT, double delta);

struct ClassicalCostOptions {
    double delta = 0.25;       // target prediction accuracy
    double alpha_model = 2.0;  // paper cost-model exponent: cost = n^alpha
    // instrumented runs happen on this separate grid (the abstract model's
    // grid reaches horizons no map run can)
    std::vector<double> measured_grid = {2, 4, 8, 16, 32, 64, 128, 256, 512, 1024, 2048};
    // growth-law calibration run
    double calib_delta0 = 1e-60;
    std::size_t calib_steps = 140;
    int calib_bits = 280;
};

struct ClassicalCostRow {
    double T = 0.0;
    double fT = 0.0;       // modeled growth factor at T
    double n_bits = 0.0;   // required mantissa (real-valued in the abstract model)
    double paper_cost = 0.0;
    bool measured = false;
    CostLedger ledger;     // measured notion: instrumented map iteration to T
};

struct ClassicalCostCurve {
    MapKind kind;
    FitKind growth_kind;
    double growth_rate = 0.0;
    std::vector<ClassicalCostRow> rows;
    ScalingFit paper_fit;     // paper cost model n^alpha vs T
    ScalingFit measured_fit;  // instrumented ledger cost vs T (capped range)
    bool measured_fit_valid = false;
};

// Calibrates f(T) from the map's fitted growth law, then evaluates both cost
// notions: the mantissa-only abstract model over the full T grid, and the
// instrumented per-step cost over the measured grid.
ClassicalCostCurve classical_cost_curve(const PhaseMap& prototype, std::span<const double> Ts,
                                        const ClassicalCostOptions& opts = {});

// `step,separation`
void write_divergence_csv(const std::filesystem::path& path, const DivergenceSeries& s);
// cost csv plus the cost_notion column
void write_classical_cost_csv(const std::filesystem::path& path,
                              std::span<const ClassicalCostRow> rows, double delta);

} // namespace horizonlab
