#include "horizonlab/ritz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "horizonlab/csv.hpp"
#include "horizonlab/errors.hpp"
#include "horizonlab/linfit.hpp"
#include "horizonlab/mpreal.hpp"

namespace horizonlab {

std::string model_name(ModelKind k) {
    switch (k) {
        case ModelKind::harmonic_1d: return "harmonic_1d";
        case ModelKind::coupled_quartic_2d: return "coupled_quartic_2d";
    }
    throw ValidationError("model_name: unknown kind");
}

ModelKind model_from_name(const std::string& s) {
    if (s == "harmonic_1d") return ModelKind::harmonic_1d;
    if (s == "coupled_quartic_2d") return ModelKind::coupled_quartic_2d;
    throw ValidationError("unknown model '" + s + "'");
}

void ModelHamiltonian::validate() const {
    if (!(omega > 0.0)) throw ContractViolation("ModelHamiltonian: omega must be positive");
    if (!(hbar > 0.0)) throw ContractViolation("ModelHamiltonian: hbar must be positive");
    if (coupling < 0.0) throw ContractViolation("ModelHamiltonian: coupling must be nonnegative");
}

// capacity guard: dense storage beyond this is past the memory budget
static constexpr std::size_t kMaxMatrixDim = 4096;

namespace {

inline double to_dbl(double v) { return v; }
inline double to_dbl(const MpReal& v) { return v.to_double(); }

// numeric constants: exact doubles, widened by the first multi-precision op
template <typename T>
T make_const(double v);
template <>
double make_const<double>(double v) { return v; }
template <>
MpReal make_const<MpReal>(double v) { return MpReal(v, 53); }

template <typename T>
struct Dense {
    std::size_t n = 0;
    std::vector<T> a;
    T& at(std::size_t i, std::size_t j) { return a[i * n + j]; }
    const T& at(std::size_t i, std::size_t j) const { return a[i * n + j]; }
};

template <typename T>
Dense<T> make_dense(std::size_t n, const T& zero) {
    return Dense<T>{n, std::vector<T>(n * n, zero)};
}

// 1d q^2 in the oscillator number basis: diag (2N+1) hbar/(2 omega),
// second off-diagonal sqrt((N+1)(N+2)) hbar/(2 omega)
template <typename T>
Dense<T> q2_matrix(std::size_t n, const T& scale, const T& zero, CostLedger* ledger) {
    using std::sqrt;
    Dense<T> q = make_dense(n, zero);
    for (std::size_t N = 0; N < n; ++N) {
        q.at(N, N) = scale * make_const<T>(double(2 * N + 1));
        if (N + 2 < n) {
            const T v = scale * sqrt(make_const<T>(double((N + 1) * (N + 2))));
            q.at(N, N + 2) = v;
            q.at(N + 2, N) = v;
        }
    }
    if (ledger) {
        ledger->charge(0, 2 * n - 2, 0);             // scale multiplies
        if (n > 2) {
            ledger->evals += n - 2;                  // sqrt per off entry
            ledger->muls += (n - 2) * std::uint64_t(kDefaultTransMulEquiv);
        }
    }
    return q;
}

// rows of the 2d model restricted to an index subset (parity block or full)
template <typename T>
Dense<T> assemble_quartic(const ModelHamiltonian& h, std::size_t D,
                          const std::vector<std::size_t>& modes1,
                          const std::vector<std::size_t>& modes2, const T& zero,
                          CostLedger* ledger) {
    const std::size_t b1 = modes1.size(), b2 = modes2.size();
    const std::size_t n = b1 * b2;
    if (n > kMaxMatrixDim)
        throw CapacityError("build_matrix: matrix dimension exceeds capacity budget");

    const T scale = make_const<T>(h.hbar / (2.0 * h.omega));
    Dense<T> q2 = q2_matrix<T>(D, scale, zero, ledger);
    const T lam = make_const<T>(h.coupling);
    const T hw = make_const<T>(h.hbar * h.omega);
    if (ledger) ledger->charge(0, 1, 0);  // hbar*omega

    // lambda * q2, reused for every row
    Dense<T> lq2 = make_dense(D, zero);
    std::uint64_t lq_muls = 0;
    for (std::size_t i = 0; i < D; ++i)
        for (std::size_t j : {i, i + 2}) {
            if (j >= D) continue;
            lq2.at(i, j) = lam * q2.at(i, j);
            lq2.at(j, i) = lq2.at(i, j);
            ++lq_muls;
        }
    if (ledger) ledger->charge(0, lq_muls, 0);

    Dense<T> m = make_dense(n, zero);
    std::uint64_t adds = 0, muls = 0;
    for (std::size_t r = 0; r < n; ++r) {
        const std::size_t n1 = modes1[r / b2], n2 = modes2[r % b2];
        // diagonal oscillator part hbar omega (n1 + n2 + 1)
        m.at(r, r) = hw * make_const<T>(double(n1) + double(n2) + 1.0);
        adds += 2;
        muls += 1;
        // quartic coupling: q1^2 couples |dn1| in {0,2}, q2^2 likewise
        for (std::size_t c = 0; c < n; ++c) {
            const std::size_t m1 = modes1[c / b2], m2 = modes2[c % b2];
            const std::size_t d1 = n1 > m1 ? n1 - m1 : m1 - n1;
            const std::size_t d2 = n2 > m2 ? n2 - m2 : m2 - n2;
            if ((d1 != 0 && d1 != 2) || (d2 != 0 && d2 != 2)) continue;
            m.at(r, c) += lq2.at(n1, m1) * q2.at(n2, m2);
            adds += 1;
            muls += 1;
        }
    }
    if (ledger) ledger->charge(adds, muls, 0);
    return m;
}

template <typename T>
Dense<T> assemble(const ModelHamiltonian& h, std::size_t D, const T& zero,
                  CostLedger* ledger) {
    h.validate();
    if (D == 0) throw DimensionError("build_matrix: D must be >= 1");
    if (h.kind == ModelKind::harmonic_1d) {
        if (D > kMaxMatrixDim)
            throw CapacityError("build_matrix: matrix dimension exceeds capacity budget");
        Dense<T> m = make_dense(D, zero);
        const T hw = make_const<T>(h.hbar * h.omega);
        if (ledger) ledger->charge(0, 1, 0);
        for (std::size_t N = 0; N < D; ++N) {
            m.at(N, N) = hw * make_const<T>(double(N) + 0.5);
            if (ledger) ledger->charge(1, 1, 0);
        }
        return m;
    }
    std::vector<std::size_t> all(D);
    std::iota(all.begin(), all.end(), std::size_t(0));
    return assemble_quartic<T>(h, D, all, all, zero, ledger);
}

// ---- cyclic Jacobi -------------------------------------------------------

template <typename T>
double off_frobenius(const Dense<T>& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.n; ++i)
        for (std::size_t j = i + 1; j < a.n; ++j) {
            const double v = to_dbl(a.at(i, j));
            s += 2.0 * v * v;
        }
    return std::sqrt(s);
}

template <typename T>
double frobenius_of(const Dense<T>& a) {
    double s = 0.0;
    for (const T& v : a.a) {
        const double d = to_dbl(v);
        s += d * d;
    }
    return std::sqrt(s);
}

template <typename T>
struct JacobiState {
    Dense<T> a;
    Dense<T> v;  // eigenvector accumulator (columns), empty if not wanted
    std::size_t sweeps = 0;
    std::uint64_t rotations = 0;
};

template <typename T>
void rotate(JacobiState<T>& st, std::size_t p, std::size_t q, const T& zero,
            bool want_vectors, CostLedger* ledger) {
    using std::abs;
    using std::sqrt;
    Dense<T>& a = st.a;
    const std::size_t n = a.n;
    const T apq = a.at(p, q);
    const T one = make_const<T>(1.0);

    // tan of the annihilating rotation via the stable half-angle form
    const T theta = (a.at(q, q) - a.at(p, p)) / (make_const<T>(2.0) * apq);
    const T athe = abs(theta);
    T t = one / (athe + sqrt(theta * theta + one));
    if (theta < zero) t = -t;
    const T c = one / sqrt(t * t + one);
    const T s = t * c;

    // diagonal update: app -= t apq, aqq += t apq (exact rotation algebra)
    const T tapq = t * apq;
    a.at(p, p) -= tapq;
    a.at(q, q) += tapq;
    a.at(p, q) = zero;
    a.at(q, p) = zero;

    for (std::size_t k = 0; k < n; ++k) {
        if (k == p || k == q) continue;
        const T akp = a.at(k, p);
        const T akq = a.at(k, q);
        a.at(k, p) = c * akp - s * akq;
        a.at(p, k) = a.at(k, p);
        a.at(k, q) = s * akp + c * akq;
        a.at(q, k) = a.at(k, q);
    }
    if (want_vectors) {
        for (std::size_t k = 0; k < n; ++k) {
            const T vkp = st.v.at(k, p);
            const T vkq = st.v.at(k, q);
            st.v.at(k, p) = c * vkp - s * vkq;
            st.v.at(k, q) = s * vkp + c * vkq;
        }
    }
    ++st.rotations;
    if (ledger) {
        // parameter: 4 adds, 4 muls, 3 divs, 2 sqrt evals; updates: 2 adds +
        // (4 muls, 2 adds) per off element, same per vector row
        const std::uint64_t noff = n - 2;
        std::uint64_t adds = 4 + 2 + 2 * noff;
        std::uint64_t muls = 6 + 4 * noff;
        if (want_vectors) {
            adds += 2 * n;
            muls += 4 * n;
        }
        ledger->charge(adds, muls, 3);
        ledger->evals += 2;
        ledger->muls += 2 * std::uint64_t(kDefaultTransMulEquiv);
    }
}

template <typename T>
JacobiState<T> jacobi_core(Dense<T> input, const T& zero, const JacobiOptions& opts) {
    const std::size_t n = input.n;
    JacobiState<T> st;
    st.a = std::move(input);
    if (opts.want_vectors) {
        st.v = make_dense(n, zero);
        for (std::size_t i = 0; i < n; ++i) st.v.at(i, i) = make_const<T>(1.0);
    }
    const double norm = frobenius_of(st.a);
    const double target = std::max(opts.tol * norm, 1e-300);

    while (off_frobenius(st.a) > target) {
        if (st.sweeps >= opts.max_sweeps)
            throw ConvergenceFailure("jacobi_eigensolve: no convergence after max sweeps");
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q)
                if (std::abs(to_dbl(st.a.at(p, q))) != 0.0)
                    rotate(st, p, q, zero, opts.want_vectors, opts.ledger);
        ++st.sweeps;
        if (opts.ledger) {
            // convergence monitor: off-norm recomputation
            const std::uint64_t m = n * (n - 1) / 2;
            opts.ledger->charge(m, m, 0);
        }
    }
    return st;
}

template <typename T>
std::vector<double> eigenvalues_of(const JacobiState<T>& st) {
    std::vector<double> ev(st.a.n);
    for (std::size_t i = 0; i < st.a.n; ++i) ev[i] = to_dbl(st.a.at(i, i));
    return ev;
}

} // namespace

SymMatrix build_matrix(const ModelHamiltonian& h, std::size_t D, CostLedger* ledger) {
    Dense<double> d = assemble<double>(h, D, 0.0, ledger);
    return SymMatrix{d.n, std::move(d.a)};
}

EigenSolution jacobi_eigensolve(const SymMatrix& m, const JacobiOptions& opts) {
    if (m.n == 0) throw DimensionError("jacobi_eigensolve: empty matrix");
    const double scale = std::max(1.0, m.frobenius());
    if (m.max_asymmetry() > 1e-12 * scale)
        throw ContractViolation("jacobi_eigensolve: input not symmetric");

    Dense<double> a{m.n, m.a};
    JacobiState<double> st = jacobi_core(std::move(a), 0.0, opts);

    std::vector<double> ev = eigenvalues_of(st);
    std::vector<std::size_t> order(ev.size());
    std::iota(order.begin(), order.end(), std::size_t(0));
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return ev[i] < ev[j]; });

    EigenSolution out;
    out.n = m.n;
    out.sweeps = st.sweeps;
    out.rotations = st.rotations;
    out.eigenvalues.resize(m.n);
    for (std::size_t k = 0; k < m.n; ++k) out.eigenvalues[k] = ev[order[k]];
    if (opts.want_vectors) {
        out.vectors.resize(m.n * m.n);
        const bool rotated = !st.v.a.empty();
        for (std::size_t k = 0; k < m.n; ++k)
            for (std::size_t r = 0; r < m.n; ++r)
                out.vectors[r * m.n + k] =
                    rotated ? st.v.at(r, order[k]) : (r == order[k] ? 1.0 : 0.0);
    }
    return out;
}

namespace {

std::vector<std::size_t> parity_modes(std::size_t D, std::size_t parity) {
    std::vector<std::size_t> m;
    for (std::size_t i = parity; i < D; i += 2) m.push_back(i);
    return m;
}

template <typename T>
std::vector<double> solve_spectrum_t(const ModelHamiltonian& h, std::size_t D, const T& zero,
                                     const SpectrumOptions& opts) {
    h.validate();
    if (h.kind == ModelKind::harmonic_1d || !opts.parity_blocks) {
        Dense<T> m = assemble<T>(h, D, zero, opts.jacobi.ledger);
        JacobiOptions jo = opts.jacobi;
        JacobiState<T> st = jacobi_core(std::move(m), zero, jo);
        std::vector<double> ev = eigenvalues_of(st);
        std::sort(ev.begin(), ev.end());
        return ev;
    }
    // q^2 preserves per-mode parity: solve the four parity blocks separately
    std::vector<double> ev;
    ev.reserve(D * D);
    for (std::size_t p1 = 0; p1 < 2; ++p1)
        for (std::size_t p2 = 0; p2 < 2; ++p2) {
            const auto m1 = parity_modes(D, p1), m2 = parity_modes(D, p2);
            if (m1.empty() || m2.empty()) continue;
            Dense<T> blk =
                assemble_quartic<T>(h, D, m1, m2, zero, opts.jacobi.ledger);
            JacobiState<T> st = jacobi_core(std::move(blk), zero, opts.jacobi);
            for (double e : eigenvalues_of(st)) ev.push_back(e);
        }
    std::sort(ev.begin(), ev.end());
    return ev;
}

} // namespace

std::vector<double> solve_spectrum(const ModelHamiltonian& h, std::size_t D,
                                   const SpectrumOptions& opts) {
    return solve_spectrum_t<double>(h, D, 0.0, opts);
}

std::vector<double> solve_spectrum_mp(const ModelHamiltonian& h, std::size_t D,
                                      int mantissa_bits, const SpectrumOptions& opts) {
    if (mantissa_bits <= 53) return solve_spectrum(h, D, opts);
    return solve_spectrum_t<MpReal>(h, D, MpReal(0.0, mantissa_bits), opts);
}

RitzResult solve_ritz(const ModelHamiltonian& h, std::size_t D, int mantissa_bits,
                      const SpectrumOptions& opts) {
    if (mantissa_bits < 8)
        throw ContractViolation("solve_ritz: mantissa_bits must be >= 8");
    RitzResult out;
    out.basis_dim = D;
    out.matrix_dim = (h.kind == ModelKind::harmonic_1d) ? D : D * D;
    out.op_count.mantissa_bits = mantissa_bits;
    SpectrumOptions o = opts;
    o.jacobi.ledger = &out.op_count;
    out.eigenvalues = (mantissa_bits <= 53) ? solve_spectrum(h, D, o)
                                            : solve_spectrum_mp(h, D, mantissa_bits, o);
    return out;
}

ConvergenceStudy convergence_study(const ModelHamiltonian& h, std::span<const std::size_t> dims,
                                   std::size_t levels, std::size_t reference_D,
                                   const SpectrumOptions& opts) {
    if (dims.empty()) throw DimensionError("convergence_study: empty dim list");
    for (std::size_t i = 1; i < dims.size(); ++i)
        if (dims[i] <= dims[i - 1])
            throw ContractViolation("convergence_study: dims must be strictly increasing");
    if (reference_D <= dims.back())
        throw ContractViolation("convergence_study: reference_D must exceed max(dims)");
    if (levels == 0) throw DimensionError("convergence_study: levels must be >= 1");
    const std::size_t min_matrix =
        (h.kind == ModelKind::harmonic_1d) ? dims.front() : dims.front() * dims.front();
    if (levels > min_matrix)
        throw DimensionError("convergence_study: more levels than smallest matrix");

    ConvergenceStudy st;
    st.dims.assign(dims.begin(), dims.end());
    st.levels = levels;
    st.reference_D = reference_D;

    const std::vector<double> ref = solve_spectrum(h, reference_D, opts);
    double ref_scale = 1.0;
    for (std::size_t k = 0; k < levels; ++k) ref_scale = std::max(ref_scale, std::abs(ref[k]));

    st.errors.reserve(dims.size());
    for (std::size_t D : dims) {
        const std::vector<double> ev = solve_spectrum(h, D, opts);
        std::vector<double> err(levels);
        for (std::size_t k = 0; k < levels; ++k) err[k] = std::abs(ev[k] - ref[k]);
        st.errors.push_back(std::move(err));
    }

    // reference quality: at the two largest dims every level must still be
    // improving (floor-noise slack, not a fit tolerance)
    const double slack = 1e-11 * ref_scale;
    if (dims.size() >= 2) {
        const auto& second = st.errors[dims.size() - 2];
        const auto& last = st.errors[dims.size() - 1];
        for (std::size_t k = 0; k < levels; ++k)
            if (last[k] > second[k] + slack)
                throw ReferenceQualityError(
                    "convergence_study: non-monotone error growth at the largest dims "
                    "(reference not converged)");
    }

    // power-law fit on mean error per dim; pre-asymptotic transients excluded
    // by dropping the two smallest dims when five or more are given
    const std::size_t first = (dims.size() >= 5) ? 2 : 0;
    std::vector<double> xs, ys;
    bool all_floor = true;
    for (std::size_t i = first; i < dims.size(); ++i) {
        double mean = 0.0;
        for (double e : st.errors[i]) mean += e;
        mean /= double(levels);
        xs.push_back(double(dims[i]));
        ys.push_back(mean);
        if (mean > 1e-14 * ref_scale) all_floor = false;
    }
    if (all_floor) {
        // exact basis: converges faster than any power
        st.fitted_alpha = std::numeric_limits<double>::infinity();
        st.fit_r2 = 1.0;
        st.fit_constant = 0.0;
        return st;
    }
    const LineFit f = fit_loglog(xs, ys);
    st.fitted_alpha = -f.slope;
    st.fit_r2 = f.r2;
    st.fit_constant = std::exp(f.intercept);
    return st;
}

bool variational_upper_bound_check(const ModelHamiltonian& h, std::size_t D_small,
                                   std::size_t D_large, std::size_t levels,
                                   const SpectrumOptions& opts) {
    if (D_small >= D_large)
        throw ContractViolation(
            "variational_upper_bound_check: trial spaces must be nested (D_small < D_large)");
    const auto small = solve_spectrum(h, D_small, opts);
    const auto large = solve_spectrum(h, D_large, opts);
    if (levels > small.size())
        throw DimensionError("variational_upper_bound_check: more levels than spectrum");
    for (std::size_t k = 0; k < levels; ++k) {
        const double slack = 1e-11 * std::max(1.0, std::abs(large[k]));
        if (small[k] < large[k] - slack) return false;
    }
    return true;
}

void write_convergence_csv(const std::filesystem::path& path, const ConvergenceStudy& s) {
    csv::Writer w(path, {"D", "level", "error"});
    for (std::size_t i = 0; i < s.dims.size(); ++i)
        for (std::size_t k = 0; k < s.levels; ++k)
            w.row({csv::format_u64(s.dims[i]), csv::format_u64(k),
                   csv::format_double(s.errors[i][k])});
    w.close();
}

void write_study_summary_csv(const std::filesystem::path& path, const ModelHamiltonian& h,
                             const ConvergenceStudy& s) {
    csv::Writer w(path, {"model", "lambda", "alpha_hat", "r2"});
    w.row({model_name(h.kind), csv::format_double(h.coupling),
           csv::format_double(s.fitted_alpha), csv::format_double(s.fit_r2)});
    w.close();
}

} // namespace horizonlab
