#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "horizonlab/errors.hpp"
#include "horizonlab/evolution.hpp"
#include "horizonlab/horizon.hpp"
#include "horizonlab/rng.hpp"

using namespace horizonlab;

namespace {

WaveState random_state(Rng& rng, std::size_t dim) {
    std::vector<cplx> a(dim);
    double n = 0;
    for (auto& z : a) {
        z = cplx(rng.gauss(), rng.gauss());
        n += std::norm(z);
    }
    n = std::sqrt(n);
    for (auto& z : a) z /= n;
    return make_state(std::move(a));
}

// test-side oracle: the diagonal overlap sum evaluated independently of the
// state-propagation route
cplx diagonal_overlap_direct(const SpectralModel& m, const PerturbedSpectrum& p, double T) {
    cplx acc(0, 0);
    for (std::size_t mu = 0; mu < m.dim(); ++mu) {
        const double de = p.energies_approx[mu] - m.energies[mu];
        acc += std::conj(m.coefficients[mu]) * p.coefficients_approx[mu] *
               std::polar(1.0, -de * T / m.hbar);
    }
    return acc;
}

} // namespace

TEST_CASE("exact evolution basics") {
    const double s = 1.0 / std::sqrt(2.0);
    SUBCASE("T=0 is the identity") {
        const SpectralModel m = equal_coefficient_model(16);
        const WaveState w = evolve_exact(m, 0.0);
        for (std::size_t i = 0; i < 16; ++i) CHECK(w.amplitudes[i] == m.coefficients[i]);
    }
    SUBCASE("single term is a global phase") {
        const SpectralModel m = make_model({3.7}, {cplx(1, 0)});
        const WaveState w0 = evolve_exact(m, 0.0);
        for (double T : {0.1, 10.0, 12345.6})
            CHECK(std::abs(std::abs(inner_product(w0, evolve_exact(m, T))) - 1.0) < 1e-14);
    }
    SUBCASE("two-level half period") {
        const SpectralModel m = make_model({0.0, 1.0}, {cplx(s, 0), cplx(s, 0)});
        const WaveState w0 = evolve_exact(m, 0.0);
        const WaveState wpi = evolve_exact(m, 3.14159265358979323846);
        CHECK(std::abs(inner_product(w0, wpi)) < 1e-14);
    }
}

TEST_CASE("norm conservation over a log grid to 1e6") {
    Rng rng(31);
    std::vector<double> e(64);
    std::vector<cplx> c(64);
    double n = 0;
    for (std::size_t i = 0; i < 64; ++i) {
        e[i] = rng.uniform(0, 100);
        c[i] = cplx(rng.gauss(), rng.gauss());
        n += std::norm(c[i]);
    }
    for (auto& z : c) z /= std::sqrt(n);
    const SpectralModel m = make_model(e, c);
    for (double T : log_times(1e-2, 1e6, 41))
        CHECK(std::abs(evolve_exact(m, T).norm() - 1.0) < 1e-12);
}

TEST_CASE("group property of exact evolution") {
    Rng rng(7);
    const SpectralModel m = equal_coefficient_model(32);
    for (int trial = 0; trial < 20; ++trial) {
        const double t1 = rng.uniform(0, 100), t2 = rng.uniform(0, 100);
        const WaveState a = evolve_exact(m, t1 + t2);
        WaveState b = evolve_exact(m, t1);
        for (std::size_t mu = 0; mu < m.dim(); ++mu)
            b.amplitudes[mu] *= std::polar(1.0, -m.energies[mu] * t2 / m.hbar);
        for (std::size_t mu = 0; mu < m.dim(); ++mu)
            CHECK(std::abs(a.amplitudes[mu] - b.amplitudes[mu]) < 1e-12);
    }
}

TEST_CASE("approximate evolution reduces to exact at zero perturbation") {
    const SpectralModel m = equal_coefficient_model(24);
    const auto p = sample_perturbed(m, {ErrorKind::fixed, 1e-30, 1}, 0.0);
    PerturbedSpectrum zero = p;
    zero.energies_approx = m.energies;
    for (double T : {0.0, 3.0, 777.0}) {
        const WaveState ex = evolve_exact(m, T);
        const WaveState ap = evolve_approx(zero, m, T);
        for (std::size_t mu = 0; mu < m.dim(); ++mu)
            CHECK(std::abs(ex.amplitudes[mu] - ap.amplitudes[mu]) < 1e-14);
    }
}

TEST_CASE("two-level overlap closed form") {
    // equal real coefficients, energy errors {0, d}: overlap = (1 + e^{-idT})/2
    const double s = 1.0 / std::sqrt(2.0);
    const SpectralModel m = make_model({0.0, 5.0}, {cplx(s, 0), cplx(s, 0)});
    PerturbedSpectrum p;
    const double d = 0.37;
    p.energies_approx = {0.0, 5.0 + d};
    p.coefficients_approx = m.coefficients;
    p.epsilon = 0.0;
    for (double T : {0.0, 1.0, 2.5, 40.0}) {
        const cplx expected = (cplx(1, 0) + std::polar(1.0, -d * T)) / 2.0;
        const cplx got = inner_product(evolve_exact(m, T), evolve_approx(p, m, T));
        CHECK(std::abs(got - expected) < 1e-13);
    }
}

TEST_CASE("overlap series closed forms and oracle") {
    SUBCASE("zero perturbation keeps overlap at one") {
        const SpectralModel m = equal_coefficient_model(16);
        PerturbedSpectrum p;
        p.energies_approx = m.energies;
        p.coefficients_approx = m.coefficients;
        p.epsilon = 0.0;
        const auto s = overlap_series(m, p, linear_times(0, 10, 64));
        for (std::size_t k = 0; k < s.size(); ++k) {
            CHECK(std::abs(s.overlap_re[k] - 1.0) < 1e-13);
            CHECK(std::abs(s.deviation[k]) < 1e-6);
        }
    }
    SUBCASE("fixed errors give a pure cosine") {
        const std::size_t dim = 8;
        const SpectralModel m = equal_coefficient_model(dim, 0.8);
        const auto p = sample_perturbed(m, {ErrorKind::fixed, 0.05, 3}, 0.0);
        const auto s = overlap_series(m, p, linear_times(0, 200, 257));
        for (std::size_t k = 0; k < s.size(); ++k)
            CHECK(s.overlap_re[k] ==
                  doctest::Approx(std::cos(0.05 * s.times[k] / 0.8)).epsilon(1e-12));
    }
    SUBCASE("dim 200 uniform errors: decay, plateau and the direct sum") {
        const std::size_t dim = 200;
        const SpectralModel m = equal_coefficient_model(dim);
        const double dE = 1e-3;
        const auto p = sample_perturbed(m, {ErrorKind::uniform, dE, 2718}, 0.0);
        const double tp = 3.14159265358979323846 / dE;
        const auto times = linear_times(0.0, 20.0 * tp, 2001);
        const auto s = overlap_series(m, p, times);

        CHECK(std::abs(s.overlap_re[0] - 1.0) < 1e-12);
        // after ~10 Tp the overlap has collapsed to fluctuations of order
        // 3/sqrt(2 dim) ~ 0.15
        double max_tail = 0.0;
        for (std::size_t k = 0; k < s.size(); ++k)
            if (s.times[k] >= 10.0 * tp)
                max_tail = std::max(max_tail,
                                    std::hypot(s.overlap_re[k], s.overlap_im[k]));
        CHECK(max_tail < 3.0 * amplitude_theory(dim) + 0.05);

        for (std::size_t k = 0; k < s.size(); k += 97) {
            const cplx o = diagonal_overlap_direct(m, p, s.times[k]);
            CHECK(std::abs(o - cplx(s.overlap_re[k], s.overlap_im[k])) < 1e-12);
        }
    }
}

TEST_CASE("series agrees with the state route in both modes") {
    const std::size_t dim = 48;
    const SpectralModel m = equal_coefficient_model(dim);
    const auto p = sample_perturbed(m, {ErrorKind::uniform, 1e-2, 5}, 1e-3,
                                    {.with_residuals = true});
    const auto times = linear_times(0.5, 800.0, 37);
    for (auto mode : {PropagationMode::diagonal, PropagationMode::full}) {
        const auto s = overlap_series(m, p, times, mode);
        for (std::size_t k = 0; k < s.size(); ++k) {
            const cplx via_states =
                inner_product(evolve_exact(m, s.times[k]), evolve_approx(p, m, s.times[k], mode));
            CHECK(std::abs(via_states - cplx(s.overlap_re[k], s.overlap_im[k])) < 1e-12);
        }
    }
}

TEST_CASE("deviation identity holds at every sample") {
    const SpectralModel m = equal_coefficient_model(64);
    const auto p = sample_perturbed(m, {ErrorKind::uniform, 1e-2, 11}, 1e-3);
    const auto s = overlap_series(m, p, linear_times(0, 2000, 513));
    for (std::size_t k = 0; k < s.size(); ++k) {
        const double expect = std::sqrt(std::max(0.0, 2.0 * (1.0 - s.overlap_re[k])));
        CHECK(std::abs(s.deviation[k] - expect) < 1e-10);
    }
}

TEST_CASE("diagonal-vs-full difference is within the residual bound") {
    Rng seeds(99);
    for (std::size_t dim : {8u, 32u, 64u}) {
        const SpectralModel m = equal_coefficient_model(dim);
        const double eps = 1e-3;
        const auto p = sample_perturbed(m, {ErrorKind::uniform, 1e-2, seeds.next_u64()}, eps,
                                        {.with_residuals = true});
        double maxc = 0.0;
        for (const auto& c : m.coefficients) maxc = std::max(maxc, std::abs(c));
        const double bound = 2.0 * eps * double(dim) * maxc;
        const auto times = linear_times(0.1, 500.0, 33);
        const auto sd = overlap_series(m, p, times, PropagationMode::diagonal);
        const auto sf = overlap_series(m, p, times, PropagationMode::full);
        for (std::size_t k = 0; k < times.size(); ++k) {
            const double diff = std::hypot(sf.overlap_re[k] - sd.overlap_re[k],
                                           sf.overlap_im[k] - sd.overlap_im[k]);
            CHECK(diff <= bound);
        }
    }
}

TEST_CASE("unitarity of exact evolution") {
    Rng rng(1234);
    std::vector<double> e(64);
    for (auto& x : e) x = rng.uniform(0, 100);
    std::vector<cplx> c(64, cplx(1.0 / 8.0, 0));
    const SpectralModel m = make_model(e, c);

    SUBCASE("identical states keep unit overlap") {
        const WaveState a = random_state(rng, 64);
        CHECK(unitarity_check(m, a, a, log_times(1e-2, 1e6, 200)) < 1e-12);
    }
    SUBCASE("orthogonal states stay orthogonal") {
        std::vector<cplx> a(64, cplx(0, 0)), b(64, cplx(0, 0));
        a[0] = cplx(1, 0);
        b[1] = cplx(1, 0);
        CHECK(unitarity_check(m, make_state(a), make_state(b), log_times(1, 1e6, 200)) <
              1e-14);
    }
    SUBCASE("random pairs drift below 1e-10") {
        double worst = 0.0;
        for (int trial = 0; trial < 10; ++trial) {
            const WaveState a = random_state(rng, 64);
            const WaveState b = random_state(rng, 64);
            worst = std::max(worst, unitarity_check(m, a, b, log_times(1e-2, 1e6, 1000)));
        }
        CHECK(worst <= 1e-10);
    }
}

TEST_CASE("grid construction and validation errors") {
    CHECK_THROWS_AS((void)linear_times(0, 1, 1), DimensionError);
    CHECK_THROWS_AS((void)linear_times(5, 1, 8), ContractViolation);
    CHECK_THROWS_AS((void)log_times(0, 1, 8), ContractViolation);
    const auto lg = log_times(1e-3, 1e3, 13);
    CHECK(lg.front() == doctest::Approx(1e-3));
    CHECK(lg.back() == doctest::Approx(1e3));

    const SpectralModel m = equal_coefficient_model(4);
    const auto p = sample_perturbed(m, {ErrorKind::uniform, 1e-2, 1}, 0.0);
    CHECK_THROWS_AS((void)overlap_series(m, p, std::vector<double>{}), DimensionError);
    const std::vector<double> bad = {0.0, 1.0, 1.0};
    CHECK_THROWS_AS((void)overlap_series(m, p, bad), ContractViolation);
    CHECK_THROWS_AS((void)overlap_series(m, p, linear_times(0, 1, 4), PropagationMode::full),
                    ValidationError);
    CHECK_THROWS_AS((void)evolve_approx(p, equal_coefficient_model(5), 1.0), DimensionError);
}

TEST_CASE("series csv round trip") {
    const SpectralModel m = equal_coefficient_model(12);
    const auto p = sample_perturbed(m, {ErrorKind::uniform, 1e-2, 21}, 0.0);
    const auto s = overlap_series(m, p, linear_times(0, 100, 50));
    const auto path = std::filesystem::temp_directory_path() / "hl_series_rt.csv";
    write_series_csv(path, s);
    const auto back = read_series_csv(path);
    REQUIRE(back.size() == s.size());
    for (std::size_t k = 0; k < s.size(); ++k) {
        CHECK(back.times[k] == s.times[k]);
        CHECK(back.overlap_re[k] == s.overlap_re[k]);
        CHECK(back.overlap_im[k] == s.overlap_im[k]);
        CHECK(back.deviation[k] == s.deviation[k]);
    }
    std::filesystem::remove(path);
}
