#include "horizonlab/evolution.hpp"

#include <cmath>

#include "horizonlab/csv.hpp"
#include "horizonlab/errors.hpp"

namespace horizonlab {

std::vector<double> linear_times(double t0, double t1, std::size_t n) {
    if (n < 2) throw DimensionError("linear_times: need at least 2 points");
    if (!(t1 > t0)) throw ContractViolation("linear_times: t1 must exceed t0");
    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i)
        t[i] = t0 + (t1 - t0) * double(i) / double(n - 1);
    return t;
}

std::vector<double> log_times(double t0, double t1, std::size_t n) {
    if (n < 2) throw DimensionError("log_times: need at least 2 points");
    if (!(t0 > 0.0) || !(t1 > t0))
        throw ContractViolation("log_times: need 0 < t0 < t1");
    std::vector<double> t(n);
    const double l0 = std::log(t0), l1 = std::log(t1);
    for (std::size_t i = 0; i < n; ++i)
        t[i] = std::exp(l0 + (l1 - l0) * double(i) / double(n - 1));
    return t;
}

WaveState evolve_exact(const SpectralModel& model, double T) {
    model.validate();
    WaveState s;
    s.time = T;
    s.amplitudes.resize(model.dim());
    const double inv_h = 1.0 / model.hbar;
    for (std::size_t mu = 0; mu < model.dim(); ++mu)
        s.amplitudes[mu] =
            model.coefficients[mu] * std::polar(1.0, -model.energies[mu] * T * inv_h);
    return s;
}

WaveState evolve_approx(const PerturbedSpectrum& pert, const SpectralModel& model, double T,
                        PropagationMode mode) {
    const std::size_t dim = model.dim();
    if (pert.dim() != dim) throw DimensionError("evolve_approx: unpaired spectra");
    const double inv_h = 1.0 / model.hbar;

    std::vector<cplx> phased(dim);
    for (std::size_t mu = 0; mu < dim; ++mu)
        phased[mu] =
            pert.coefficients_approx[mu] * std::polar(1.0, -pert.energies_approx[mu] * T * inv_h);

    WaveState s;
    s.time = T;
    if (mode == PropagationMode::diagonal) {
        s.amplitudes = std::move(phased);
        return s;
    }
    if (!pert.residuals)
        throw ValidationError("evolve_approx: full mode requires sampled residuals");
    // amplitudes in the exact basis: (I + R) applied to the phased vector
    const auto& R = *pert.residuals;
    s.amplitudes.assign(dim, cplx(0.0, 0.0));
    for (std::size_t mu = 0; mu < dim; ++mu) {
        cplx acc = phased[mu];
        const cplx* row = R.data() + mu * dim;
        for (std::size_t nu = 0; nu < dim; ++nu) acc += row[nu] * phased[nu];
        s.amplitudes[mu] = acc;
    }
    return s;
}

OverlapSeries overlap_series(const SpectralModel& model, const PerturbedSpectrum& pert,
                             std::span<const double> times, PropagationMode mode) {
    const std::size_t dim = model.dim();
    if (pert.dim() != dim) throw DimensionError("overlap_series: unpaired spectra");
    if (times.empty()) throw DimensionError("overlap_series: empty time grid");
    for (std::size_t k = 1; k < times.size(); ++k)
        if (!(times[k] > times[k - 1]))
            throw ContractViolation("overlap_series: times must be strictly increasing");
    if (mode == PropagationMode::full && !pert.residuals)
        throw ValidationError("overlap_series: full mode requires sampled residuals");

    const double inv_h = 1.0 / model.hbar;
    OverlapSeries out;
    out.times.assign(times.begin(), times.end());
    out.overlap_re.resize(times.size());
    out.overlap_im.resize(times.size());
    out.deviation.resize(times.size());

    // diagonal term constants: conj(c_mu) c~_mu and phase rates dE_mu
    std::vector<cplx> cc(dim);
    std::vector<double> de(dim);
    for (std::size_t mu = 0; mu < dim; ++mu) {
        cc[mu] = std::conj(model.coefficients[mu]) * pert.coefficients_approx[mu];
        de[mu] = pert.energies_approx[mu] - model.energies[mu];
    }

    for (std::size_t k = 0; k < times.size(); ++k) {
        const double T = times[k];
        cplx overlap(0.0, 0.0);
        if (mode == PropagationMode::diagonal) {
            for (std::size_t mu = 0; mu < dim; ++mu)
                overlap += cc[mu] * std::polar(1.0, -de[mu] * T * inv_h);
        } else {
            const auto& R = *pert.residuals;
            // diagonal sum with (1 + R_mumu), then the off-diagonal sum with
            // phases (E_nu - E_mu + dE_nu)
            std::vector<cplx> phased(dim);
            for (std::size_t nu = 0; nu < dim; ++nu)
                phased[nu] = pert.coefficients_approx[nu] *
                             std::polar(1.0, -pert.energies_approx[nu] * T * inv_h);
            for (std::size_t mu = 0; mu < dim; ++mu) {
                const cplx a = std::conj(model.coefficients[mu] *
                                         std::polar(1.0, -model.energies[mu] * T * inv_h));
                cplx mix = phased[mu];
                const cplx* row = R.data() + mu * dim;
                for (std::size_t nu = 0; nu < dim; ++nu) mix += row[nu] * phased[nu];
                overlap += a * mix;
            }
        }
        out.overlap_re[k] = overlap.real();
        out.overlap_im[k] = overlap.imag();
        out.deviation[k] = std::sqrt(std::max(0.0, 2.0 * (1.0 - overlap.real())));
    }

    // series starting at T=0 with matched initial states must open near 1
    if (out.times.front() == 0.0) {
        const double slack = 2.0 * pert.epsilon * double(dim) + 1e-9;
        if (std::abs(out.overlap_re.front() - 1.0) > slack)
            throw ContractViolation("overlap_series: overlap(0) deviates from 1 beyond bound");
    }
    return out;
}

double unitarity_check(const SpectralModel& model, const WaveState& a, const WaveState& b,
                       std::span<const double> times) {
    if (a.dim() != model.dim() || b.dim() != model.dim())
        throw DimensionError("unitarity_check: state dimension mismatch");
    if (std::abs(a.norm() - 1.0) > kNormTolOperation ||
        std::abs(b.norm() - 1.0) > kNormTolOperation)
        throw ContractViolation("unitarity_check: states must be normalized");

    const cplx base = inner_product(a, b);
    const double inv_h = 1.0 / model.hbar;
    double drift = 0.0;
    std::vector<cplx> at(model.dim()), bt(model.dim());
    for (double T : times) {
        cplx s(0.0, 0.0);
        for (std::size_t mu = 0; mu < model.dim(); ++mu) {
            const cplx ph = std::polar(1.0, -model.energies[mu] * T * inv_h);
            s += std::conj(a.amplitudes[mu] * ph) * (b.amplitudes[mu] * ph);
        }
        drift = std::max(drift, std::abs(s - base));
    }
    return drift;
}

void write_series_csv(const std::filesystem::path& path, const OverlapSeries& s) {
    csv::Writer w(path, {"time", "overlap_re", "overlap_im", "deviation"});
    for (std::size_t k = 0; k < s.size(); ++k)
        w.row({csv::format_double(s.times[k]), csv::format_double(s.overlap_re[k]),
               csv::format_double(s.overlap_im[k]), csv::format_double(s.deviation[k])});
    w.close();
}

OverlapSeries read_series_csv(const std::filesystem::path& path) {
    const csv::Table t = csv::read(path);
    const std::size_t ct = t.col("time"), cr = t.col("overlap_re"), ci = t.col("overlap_im"),
                      cd = t.col("deviation");
    OverlapSeries s;
    for (std::size_t r = 0; r < t.size(); ++r) {
        s.times.push_back(t.num(r, ct));
        s.overlap_re.push_back(t.num(r, cr));
        s.overlap_im.push_back(t.num(r, ci));
        s.deviation.push_back(t.num(r, cd));
    }
    return s;
}

} // namespace horizonlab
