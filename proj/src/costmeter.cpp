#include "horizonlab/costmeter.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "horizonlab/cache.hpp"
#include "horizonlab/csv.hpp"
#include "horizonlab/errors.hpp"
#include "horizonlab/linfit.hpp"

namespace horizonlab {

std::string scaling_model_name(ScalingModel m) {
    return m == ScalingModel::power_law ? "power_law" : "poly_log";
}

std::string compressibility_name(Compressibility c) {
    switch (c) {
        case Compressibility::compressible: return "compressible";
        case Compressibility::incompressible: return "incompressible";
        case Compressibility::ambiguous: return "ambiguous";
    }
    return "ambiguous";
}

namespace {
// r2 gap below this is a tie; winners with exponents this small are flat
constexpr double kAmbiguousR2Gap = 0.02;
constexpr double kFlatExponent = 0.1;
} // namespace

ScalingFit classify_scaling(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw DimensionError("classify_scaling: length mismatch");
    if (xs.size() < 4) throw InsufficientData("classify_scaling: need at least 4 points");
    double lo = xs.front(), hi = xs.front();
    for (double x : xs) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
        if (!(x > 1.0))
            throw ArithmeticDomainError("classify_scaling: x must exceed 1 (log2 x > 0)");
    }
    if (hi / lo < 999.0)
        throw InsufficientData("classify_scaling: x must span at least 3 decades");

    ScalingFit f;
    f.xs.assign(xs.begin(), xs.end());
    f.ys.assign(ys.begin(), ys.end());

    const LineFit pw = fit_loglog(xs, ys);
    std::vector<double> lx(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) lx[i] = std::log2(xs[i]);
    const LineFit pl = fit_loglog(lx, ys);

    f.power = {ScalingModel::power_law, pw.slope, pw.r2};
    f.polylog = {ScalingModel::poly_log, pl.slope, pl.r2};

    const bool power_wins = pw.r2 > pl.r2;
    f.winner = power_wins ? ScalingModel::power_law : ScalingModel::poly_log;
    f.exponent = power_wins ? pw.slope : pl.slope;
    f.r2 = power_wins ? pw.r2 : pl.r2;

    if (std::abs(pw.r2 - pl.r2) < kAmbiguousR2Gap || std::abs(f.exponent) < kFlatExponent)
        f.classification = Compressibility::ambiguous;
    else
        f.classification = power_wins ? Compressibility::incompressible
                                      : Compressibility::compressible;
    return f;
}

int mantissa_for_accuracy(double dE, int guard_bits) {
    if (!(dE > 0.0)) throw ArithmeticDomainError("mantissa_for_accuracy: dE must be positive");
    const double n = std::ceil(-std::log2(dE)) + guard_bits;
    return std::max(8, static_cast<int>(n));
}

CostLedger integrable_spectrum_cost(std::size_t n_levels, int mantissa_bits, double hbar,
                                    double omega, std::vector<double>* energies_out) {
    if (n_levels == 0) throw DimensionError("integrable_spectrum_cost: need >= 1 levels");
    if (mantissa_bits < 8)
        throw ContractViolation("integrable_spectrum_cost: mantissa_bits must be >= 8");
    CostLedger ledger;
    ledger.mantissa_bits = mantissa_bits;
    EvalContext ctx{mantissa_bits, &ledger, kDefaultTransMulEquiv};

    const MeteredReal hw = MeteredReal(hbar, &ctx) * MeteredReal(omega, &ctx);
    const MeteredReal half(0.5, &ctx);
    if (energies_out) energies_out->clear();
    for (std::size_t N = 0; N < n_levels; ++N) {
        const MeteredReal e = hw * (MeteredReal(double(N), &ctx) + half);
        if (energies_out) energies_out->push_back(e.value());
    }
    return ledger;
}

CostLedger ritz_spectrum_cost(const ModelHamiltonian& h, std::size_t D, int mantissa_bits,
                              std::vector<double>* energies_out) {
    RitzResult r = solve_ritz(h, D, mantissa_bits);
    if (energies_out) *energies_out = std::move(r.eigenvalues);
    return r.op_count;
}

void require_three_decades(std::span<const double> Ts, const char* who) {
    if (Ts.size() < 4) throw InsufficientData(std::string(who) + ": need >= 4 T values");
    double lo = Ts.front(), hi = Ts.front();
    for (double t : Ts) {
        if (!(t > 1.0))
            throw ArithmeticDomainError(std::string(who) + ": T must exceed 1");
        lo = std::min(lo, t);
        hi = std::max(hi, t);
    }
    if (hi / lo < 999.0)
        throw InsufficientData(std::string(who) + ": T must span at least 3 decades");
}

PredictionCostScan prediction_cost_curve(SystemKind kind, std::span<const double> Ts,
                                         const PredictionCostOptions& opts) {
    require_three_decades(Ts, "prediction_cost_curve");
    PredictionCostScan scan;
    scan.kind = kind;

    double alpha = opts.calib_alpha, cconst = opts.calib_constant;
    if (kind == SystemKind::nonintegrable && (alpha <= 0.0 || cconst <= 0.0)) {
        // calibrate the inversion from this model's own convergence law
        const std::size_t dims[] = {6, 8, 10, 12, 14};
        const ConvergenceStudy st = convergence_study(opts.model, dims, 10, 24);
        alpha = st.fitted_alpha;
        cconst = st.fit_constant;
        if (!(alpha > 0.0) || !std::isfinite(alpha))
            throw ReferenceQualityError("prediction_cost_curve: calibration yielded no power law");
    }
    scan.calib_alpha = alpha;
    scan.calib_constant = cconst;

    for (double T : Ts) {
        CostScanRow row;
        row.T = T;
        row.dE = 3.14159265358979323846 * opts.hbar / T;  // the T -> dE bridge
        row.n_bits = mantissa_for_accuracy(row.dE, opts.guard_bits);
        if (kind == SystemKind::integrable) {
            row.D = 0;
            row.ledger = integrable_spectrum_cost(opts.n_levels, row.n_bits);
        } else {
            const double draw = std::ceil(std::pow(cconst / row.dE, 1.0 / alpha));
            row.D = static_cast<std::size_t>(
                std::clamp(draw, double(opts.d_min), double(opts.d_cap)));
            bool served = false;
            if (opts.cache) {
                if (auto hit = opts.cache->lookup(opts.model, row.D, row.n_bits)) {
                    row.ledger = hit->ledger;
                    served = true;
                }
            }
            if (!served) {
                std::vector<double> energies;
                row.ledger = ritz_spectrum_cost(opts.model, row.D, row.n_bits, &energies);
                if (opts.cache)
                    opts.cache->store(opts.model, row.D, row.n_bits, energies, row.ledger);
            }
        }
        scan.rows.push_back(std::move(row));
    }

    std::vector<double> xs, ys;
    for (const auto& r : scan.rows) {
        xs.push_back(r.T);
        ys.push_back(double(r.ledger.model_cost()));
    }
    scan.fit = classify_scaling(xs, ys);
    return scan;
}

void write_cost_scan_csv(const std::filesystem::path& path,
                         std::span<const CostScanRow> rows) {
    csv::Writer w(path, {"T", "dE", "n_bits", "D", "adds", "muls", "divs", "model_cost"});
    for (const auto& r : rows)
        w.row({csv::format_double(r.T), csv::format_double(r.dE),
               csv::format_u64(std::uint64_t(r.n_bits)), csv::format_u64(r.D),
               csv::format_u64(r.ledger.adds), csv::format_u64(r.ledger.muls),
               csv::format_u64(r.ledger.divs), csv::format_u64(r.ledger.model_cost())});
    w.close();
}

void write_fit_summary_csv(const std::filesystem::path& path, const std::string& system,
                           const ScalingFit& fit, bool append) {
    const std::vector<std::string> header = {"system", "model_kind", "exponent", "r2",
                                             "classification"};
    const bool fresh = !append || !std::filesystem::exists(path);
    std::ofstream out(path, fresh ? (std::ios::binary | std::ios::trunc)
                                  : (std::ios::binary | std::ios::app));
    if (!out) throw IoError("cannot open for writing: " + path.string());
    if (fresh) out << "system,model_kind,exponent,r2,classification\n";
    const std::string cls = compressibility_name(fit.classification);
    for (const ModelFitResult* m : {&fit.power, &fit.polylog})
        out << system << ',' << scaling_model_name(m->kind) << ','
            << csv::format_double(m->exponent) << ',' << csv::format_double(m->r2) << ','
            << cls << '\n';
    if (!out) throw IoError("write failure: " + path.string());
}

} // namespace horizonlab
