#include "horizonlab/spectral.hpp"

#include <cmath>

#include "horizonlab/csv.hpp"
#include "horizonlab/errors.hpp"

namespace horizonlab {

namespace {

double norm_of(std::span<const cplx> v) {
    double s = 0.0;
    for (const cplx& z : v) s += std::norm(z);
    return std::sqrt(s);
}

} // namespace

void SpectralModel::validate() const {
    if (energies.empty()) throw DimensionError("SpectralModel: dim must be >= 1");
    if (energies.size() != coefficients.size())
        throw DimensionError("SpectralModel: energies/coefficients length mismatch");
    if (!(hbar > 0.0)) throw ContractViolation("SpectralModel: hbar must be positive");
    for (double e : energies)
        if (!std::isfinite(e)) throw ContractViolation("SpectralModel: non-finite energy");
    const double n = norm_of(coefficients);
    if (std::abs(n - 1.0) > kNormTolConstruct)
        throw ContractViolation("SpectralModel: coefficients not normalized");
}

SpectralModel make_model(std::vector<double> energies, std::vector<cplx> coefficients,
                         double hbar) {
    SpectralModel m{std::move(energies), std::move(coefficients), hbar};
    m.validate();
    return m;
}

SpectralModel equal_coefficient_model(std::size_t dim, double hbar, double spacing) {
    if (dim == 0) throw DimensionError("equal_coefficient_model: dim must be >= 1");
    std::vector<double> e(dim);
    std::vector<cplx> c(dim, cplx(1.0 / std::sqrt(double(dim)), 0.0));
    for (std::size_t i = 0; i < dim; ++i) e[i] = spacing * double(i);
    return make_model(std::move(e), std::move(c), hbar);
}

double WaveState::norm() const { return norm_of(amplitudes); }

WaveState make_state(std::vector<cplx> amplitudes, double time) {
    WaveState s{std::move(amplitudes), time};
    if (s.amplitudes.empty()) throw DimensionError("WaveState: dim must be >= 1");
    if (std::abs(s.norm() - 1.0) > kNormTolConstruct)
        throw ContractViolation("WaveState: amplitudes not normalized");
    return s;
}

cplx inner_product(const WaveState& a, const WaveState& b) {
    if (a.dim() != b.dim())
        throw DimensionError("inner_product: dimension mismatch");
    cplx s(0.0, 0.0);
    for (std::size_t i = 0; i < a.dim(); ++i)
        s += std::conj(a.amplitudes[i]) * b.amplitudes[i];
    return s;
}

double deviation_norm(const WaveState& a, const WaveState& b) {
    if (std::abs(a.norm() - 1.0) > kNormTolOperation ||
        std::abs(b.norm() - 1.0) > kNormTolOperation)
        throw ContractViolation("deviation_norm: inputs must be normalized");
    const double re = inner_product(a, b).real();
    // clamp: round-off can push 1 - re slightly negative for identical states
    const double v = std::max(0.0, 2.0 * (1.0 - re));
    return std::sqrt(v);
}

WaveState normalize(const WaveState& a) {
    const double n = a.norm();
    if (n == 0.0) throw DegenerateInput("normalize: zero vector");
    WaveState out = a;
    for (cplx& z : out.amplitudes) z /= n;
    return out;
}

void write_spectrum_csv(const std::filesystem::path& path, const SpectralModel& m) {
    csv::Writer w(path, {"mu", "energy", "re_c", "im_c"});
    for (std::size_t i = 0; i < m.dim(); ++i)
        w.row({csv::format_u64(i), csv::format_double(m.energies[i]),
               csv::format_double(m.coefficients[i].real()),
               csv::format_double(m.coefficients[i].imag())});
    w.close();
}

SpectralModel read_spectrum_csv(const std::filesystem::path& path, double hbar) {
    const csv::Table t = csv::read(path);
    const std::size_t ce = t.col("energy"), cr = t.col("re_c"), ci = t.col("im_c");
    std::vector<double> e;
    std::vector<cplx> c;
    e.reserve(t.size());
    c.reserve(t.size());
    for (std::size_t r = 0; r < t.size(); ++r) {
        e.push_back(t.num(r, ce));
        c.emplace_back(t.num(r, cr), t.num(r, ci));
    }
    return make_model(std::move(e), std::move(c), hbar);
}

} // namespace horizonlab
