#include "horizonlab/horizon.hpp"

#include <cmath>
#include <limits>

#include "horizonlab/csv.hpp"
#include "horizonlab/errors.hpp"

namespace horizonlab {

double predict_horizon_theory(double dE, double hbar) {
    if (dE < 0.0) throw ContractViolation("predict_horizon_theory: dE must be nonnegative");
    if (!(hbar > 0.0)) throw ContractViolation("predict_horizon_theory: hbar must be positive");
    if (dE == 0.0) return std::numeric_limits<double>::infinity();
    return 3.14159265358979323846 * hbar / dE;
}

double amplitude_theory(std::size_t dim) {
    if (dim == 0) throw DimensionError("amplitude_theory: dim must be >= 1");
    return 1.0 / std::sqrt(2.0 * double(dim));
}

double cosine_model(std::span<const double> deltaE, double hbar, double T) {
    if (deltaE.empty()) throw DimensionError("cosine_model: empty error vector");
    double s = 0.0;
    const double inv_h = 1.0 / hbar;
    for (double d : deltaE) s += std::cos(d * T * inv_h);
    return s / double(deltaE.size());
}

std::optional<double> detect_horizon(const OverlapSeries& series,
                                     const HorizonDetectOptions& opts) {
    const std::size_t n = series.size();
    if (n < opts.window + 2)
        throw InsufficientData("detect_horizon: series shorter than confirmation window");
    if (!(opts.threshold > 0.0 && opts.threshold < 1.0))
        throw ContractViolation("detect_horizon: threshold must be in (0,1)");
    if (series.overlap_re.front() < opts.threshold)
        throw ContractViolation("detect_horizon: series must start above threshold");

    bool monotone_prefix = true;
    for (std::size_t k = 1; k < n; ++k) {
        if (series.overlap_re[k] > series.overlap_re[k - 1]) monotone_prefix = false;
        if (series.overlap_re[k] >= opts.threshold) continue;

        bool confirmed = monotone_prefix;
        if (!confirmed) {
            if (k + opts.window >= n) continue;  // window would run off the grid
            confirmed = true;
            for (std::size_t j = k + 1; j <= k + opts.window; ++j)
                if (series.overlap_re[j] >= opts.sustain_level) {
                    confirmed = false;
                    break;
                }
        }
        if (!confirmed) continue;

        // interpolate the threshold crossing between samples k-1 and k
        const double p0 = series.overlap_re[k - 1], p1 = series.overlap_re[k];
        const double t0 = series.times[k - 1], t1 = series.times[k];
        if (p0 > p1)
            return t0 + (p0 - opts.threshold) * (t1 - t0) / (p0 - p1);
        return t1;
    }
    return std::nullopt;
}

std::optional<double> detect_horizon(const OverlapSeries& series, double threshold,
                                     std::size_t dim, std::size_t window) {
    HorizonDetectOptions o;
    o.threshold = threshold;
    o.sustain_level = 3.0 * amplitude_theory(dim);
    o.window = window;
    return detect_horizon(series, o);
}

double measure_amplitude(const OverlapSeries& series, double t_min) {
    double s = 0.0;
    std::size_t count = 0;
    for (std::size_t k = 0; k < series.size(); ++k) {
        if (series.times[k] < t_min) continue;
        s += series.overlap_re[k] * series.overlap_re[k];
        ++count;
    }
    if (count < 100)
        throw InsufficientData("measure_amplitude: fewer than 100 samples past t_min");
    return std::sqrt(s / double(count));
}

void write_horizon_csv(const std::filesystem::path& path,
                       std::span<const HorizonReport> reports) {
    csv::Writer w(path, {"dim", "dE", "threshold", "tp_theory", "tp_empirical",
                         "amp_theory", "amp_empirical"});
    for (const auto& r : reports)
        w.row({csv::format_u64(r.dim), csv::format_double(r.dE),
               csv::format_double(r.threshold), csv::format_double(r.tp_theory),
               csv::format_double(r.tp_empirical), csv::format_double(r.amp_theory),
               csv::format_double(r.amp_empirical)});
    w.close();
}

} // namespace horizonlab
