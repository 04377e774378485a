#include "horizonlab/classical.hpp"

#include <cmath>

#include "horizonlab/csv.hpp"
#include "horizonlab/errors.hpp"
#include "horizonlab/linfit.hpp"

namespace horizonlab {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

PhaseMap step(const PhaseMap& m) {
    PhaseMap out = m;
    if (m.kind == MapKind::rotation) {
        out.theta = std::fmod(m.theta + kTwoPi * m.parameter, kTwoPi);
        if (out.theta < 0.0) out.theta += kTwoPi;
        return out;
    }
    out.momentum = m.momentum + m.parameter * std::sin(m.theta);
    out.theta = std::fmod(m.theta + out.momentum, kTwoPi);
    if (out.theta < 0.0) out.theta += kTwoPi;
    return out;
}

Jacobian2 step_jacobian(const PhaseMap& m) {
    if (m.kind == MapKind::rotation) return {1.0, 0.0, 0.0, 1.0};
    const double c = m.parameter * std::cos(m.theta);
    // p' = p + K sin(theta); theta' = theta + p'
    return {1.0, c, 1.0, 1.0 + c};
}

double required_mantissa(double fT, double delta) {
    if (!(fT >= 1.0)) throw ContractViolation("required_mantissa: fT must be >= 1");
    if (!(delta > 0.0)) throw ContractViolation("required_mantissa: delta must be positive");
    return std::max(8.0, std::log2(fT) - std::log2(delta));
}

namespace {

// torus metric: shortest winding image in theta, plain difference in p
MpReal torus_separation(const MpReal& th1, const MpReal& p1, const MpReal& th2,
                        const MpReal& p2, const MpReal& two_pi) {
    MpReal dth = abs(th1 - th2);
    dth = fmod(dth, two_pi);
    const MpReal alt = two_pi - dth;
    if (alt < dth) dth = alt;
    return hypot(dth, p1 - p2);
}

struct MpState {
    MpReal theta, momentum;
};

void mp_step(MpState& s, MapKind kind, const MpReal& param, const MpReal& two_pi) {
    if (kind == MapKind::rotation) {
        s.theta = fmod(s.theta + two_pi * param, two_pi);
        if (s.theta < MpReal(0.0, s.theta.precision())) s.theta += two_pi;
        return;
    }
    s.momentum += param * sin(s.theta);
    s.theta = fmod(s.theta + s.momentum, two_pi);
    if (s.theta < MpReal(0.0, s.theta.precision())) s.theta += two_pi;
}

} // namespace

DivergenceSeries divergence_growth(const PhaseMap& map, double delta0, std::size_t steps,
                                   int mantissa_bits, const DivergenceOptions& opts) {
    if (!(delta0 > 0.0))
        throw StepSizeError("divergence_growth: delta0 must be positive");
    if (steps < opts.drop_transient + 4)
        throw InsufficientData("divergence_growth: too few steps for the fit window");
    if (mantissa_bits < 8)
        throw ContractViolation("divergence_growth: mantissa_bits must be >= 8");

    const int bits = mantissa_bits;
    const MpReal two_pi = MpReal(2.0, bits) * MpReal::pi(bits);
    const MpReal param(map.parameter, bits);

    MpState a{MpReal(map.theta, bits), MpReal(map.momentum, bits)};
    // initial offset split evenly between theta and p
    const MpReal off = MpReal(delta0, bits) / sqrt(MpReal(2.0, bits));
    MpState b{a.theta + off, a.momentum + off};

    // tangent vector advected along trajectory a in double (growth rates are
    // O(1) per step; only the trajectory itself needs the wide mantissa)
    double vt = 1.0 / std::sqrt(2.0), vp = 1.0 / std::sqrt(2.0);
    double tangent_cum = 0.0;

    DivergenceSeries out;
    out.steps.reserve(steps);
    out.separation.reserve(steps);
    std::vector<double> tangent_lognorm;
    tangent_lognorm.reserve(steps);

    for (std::size_t t = 1; t <= steps; ++t) {
        PhaseMap here = map;
        here.theta = a.theta.to_double();
        here.momentum = a.momentum.to_double();
        const Jacobian2 J = step_jacobian(here);
        const double nvp = J.dpdp * vp + J.dpdth * vt;
        const double nvt = J.dthdp * vp + J.dthdth * vt;
        const double nn = std::hypot(nvp, nvt);
        tangent_cum += std::log(nn);
        vp = nvp / nn;
        vt = nvt / nn;
        tangent_lognorm.push_back(tangent_cum);

        mp_step(a, map.kind, param, two_pi);
        mp_step(b, map.kind, param, two_pi);
        out.steps.push_back(t);
        out.separation.push_back(
            torus_separation(a.theta, a.momentum, b.theta, b.momentum, two_pi).to_double());
    }

    // fit window: drop the transient, stop at saturation
    std::vector<double> tw, sw, tanw;
    for (std::size_t i = 0; i < out.steps.size(); ++i) {
        if (out.steps[i] <= opts.drop_transient) continue;
        if (out.separation[i] >= opts.saturation) break;
        if (!(out.separation[i] > 0.0)) continue;
        tw.push_back(double(out.steps[i]));
        sw.push_back(out.separation[i]);
        tanw.push_back(tangent_lognorm[i]);
    }
    if (tw.size() < 4) {
        if (!out.separation.empty() && out.separation.front() >= opts.saturation)
            throw StepSizeError(
                "divergence_growth: immediate saturation; reduce delta0 or raise mantissa_bits");
        throw InsufficientData("divergence_growth: fewer than 4 pre-saturation points");
    }
    // auto-validation: separation must stay below saturation for >= 2/3 of the run
    if (3 * tw.size() < 2 * (steps - opts.drop_transient))
        throw StepSizeError(
            "divergence_growth: saturation too early; reduce delta0 or raise mantissa_bits");

    const LineFit expf = fit_loglinear(tw, sw);
    const LineFit polf = fit_loglog(tw, sw);
    // ties go to polynomial: an isometry fits both perfectly at rate 0
    if (expf.r2 > polf.r2) {
        out.fit_kind = FitKind::exponential;
        out.rate = expf.slope;
        out.r2 = expf.r2;
        out.tangent_rate = fit_line(tw, tanw).slope;
    } else {
        out.fit_kind = FitKind::polynomial;
        out.rate = polf.slope;
        out.r2 = polf.r2;
        std::vector<double> lt(tw.size());
        for (std::size_t i = 0; i < tw.size(); ++i) lt[i] = std::log(tw[i]);
        out.tangent_rate = fit_line(lt, tanw).slope;
    }
    out.window_begin = std::size_t(tw.front());
    out.window_end = std::size_t(tw.back());
    return out;
}

namespace {

// instrumented map iteration to horizon T (unit time per step)
CostLedger measured_map_cost(const PhaseMap& prototype, std::size_t nsteps, int bits) {
    CostLedger ledger;
    ledger.mantissa_bits = bits;
    EvalContext ctx{bits, &ledger, kDefaultTransMulEquiv};
    MeteredReal theta(prototype.theta, &ctx);
    MeteredReal p(prototype.momentum, &ctx);
    const MeteredReal param(prototype.parameter, &ctx);
    const MeteredReal two_pi(kTwoPi, &ctx);
    const MeteredReal zero(0.0, &ctx);
    for (std::size_t t = 0; t < nsteps; ++t) {
        if (prototype.kind == MapKind::rotation) {
            theta = wrap_mod(theta + two_pi * param, two_pi);
        } else {
            p = p + param * sin(theta);
            theta = wrap_mod(theta + p, two_pi);
        }
        if (theta < zero) theta = theta + two_pi;
    }
    return ledger;
}

} // namespace

ClassicalCostCurve classical_cost_curve(const PhaseMap& prototype, std::span<const double> Ts,
                                        const ClassicalCostOptions& opts) {
    require_three_decades(Ts, "classical_cost_curve");
    ClassicalCostCurve out;
    out.kind = prototype.kind;

    // growth-law calibration; the rotation map is an isometry in theta, so its
    // f(t) ~ 1 needs no run
    if (prototype.kind == MapKind::standard) {
        const DivergenceSeries div = divergence_growth(prototype, opts.calib_delta0,
                                                       opts.calib_steps, opts.calib_bits);
        out.growth_kind = div.fit_kind;
        out.growth_rate = div.rate;
    } else {
        out.growth_kind = FitKind::polynomial;
        out.growth_rate = 0.0;
    }

    auto model_row = [&](double T) {
        ClassicalCostRow row;
        row.T = T;
        // mantissa from the growth law in log space; f(T) itself overflows
        // doubles at chaotic horizons long before n does
        double log2_fT = 0.0;
        if (out.growth_kind == FitKind::exponential)
            log2_fT = out.growth_rate * T / std::log(2.0);
        else
            log2_fT = std::max(0.0, out.growth_rate * std::log2(T));
        row.fT = std::exp2(std::min(log2_fT, 1020.0));
        row.n_bits = std::max(8.0, log2_fT - std::log2(opts.delta));
        row.paper_cost = std::pow(row.n_bits, opts.alpha_model);
        return row;
    };

    for (double T : Ts) out.rows.push_back(model_row(T));
    for (double T : opts.measured_grid) {
        if (!(T > 1.0))
            throw ArithmeticDomainError("classical_cost_curve: measured T must exceed 1");
        ClassicalCostRow row = model_row(T);
        row.measured = true;
        const int bits = std::max(8, int(std::ceil(row.n_bits)));
        row.ledger = measured_map_cost(prototype, std::size_t(std::llround(T)), bits);
        out.rows.push_back(std::move(row));
    }

    std::vector<double> xs, ys;
    for (const auto& r : out.rows) {
        if (r.measured) continue;
        xs.push_back(r.T);
        ys.push_back(r.paper_cost);
    }
    out.paper_fit = classify_scaling(xs, ys);

    xs.clear();
    ys.clear();
    for (const auto& r : out.rows) {
        if (!r.measured) continue;
        xs.push_back(r.T);
        ys.push_back(double(r.ledger.model_cost()));
    }
    if (xs.size() >= 4 && xs.back() / xs.front() >= 999.0) {
        out.measured_fit = classify_scaling(xs, ys);
        out.measured_fit_valid = true;
    }
    return out;
}

void write_divergence_csv(const std::filesystem::path& path, const DivergenceSeries& s) {
    csv::Writer w(path, {"step", "separation"});
    for (std::size_t i = 0; i < s.steps.size(); ++i)
        w.row({csv::format_u64(s.steps[i]), csv::format_double(s.separation[i])});
    w.close();
}

void write_classical_cost_csv(const std::filesystem::path& path,
                              std::span<const ClassicalCostRow> rows, double delta) {
    // costmeter scan format plus the cost_notion column; dE holds the target
    // accuracy delta, D is not meaningful for maps
    csv::Writer w(path, {"T", "dE", "n_bits", "D", "adds", "muls", "divs", "model_cost",
                         "cost_notion"});
    for (const auto& r : rows) {
        w.row({csv::format_double(r.T), csv::format_double(delta),
               csv::format_double(r.n_bits), csv::format_u64(0), csv::format_u64(0),
               csv::format_u64(0), csv::format_u64(0), csv::format_double(r.paper_cost),
               "paper_model"});
        if (r.measured)
            w.row({csv::format_double(r.T), csv::format_double(delta),
                   csv::format_double(double(r.ledger.mantissa_bits)), csv::format_u64(0),
                   csv::format_u64(r.ledger.adds), csv::format_u64(r.ledger.muls),
                   csv::format_u64(r.ledger.divs), csv::format_u64(r.ledger.model_cost()),
                   "measured"});
    }
    w.close();
}

} // namespace horizonlab
