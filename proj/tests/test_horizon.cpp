#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "horizonlab/errors.hpp"
#include "horizonlab/evolution.hpp"
#include "horizonlab/horizon.hpp"
#include "horizonlab/linfit.hpp"
#include "horizonlab/perturbation.hpp"
#include "horizonlab/rng.hpp"

using namespace horizonlab;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("horizon theory value") {
    CHECK(predict_horizon_theory(kPi, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(predict_horizon_theory(1.0, 1.0) == doctest::Approx(kPi).epsilon(1e-15));
    CHECK(predict_horizon_theory(1e-3, 1.0) == doctest::Approx(3141.5926535897932).epsilon(1e-12));
    CHECK(std::isinf(predict_horizon_theory(0.0, 1.0)));
    CHECK_THROWS_AS((void)predict_horizon_theory(-1.0, 1.0), ContractViolation);
    CHECK_THROWS_AS((void)predict_horizon_theory(1.0, 0.0), ContractViolation);
}

TEST_CASE("amplitude theory value") {
    CHECK(amplitude_theory(2) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(amplitude_theory(50) == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(amplitude_theory(1) == doctest::Approx(0.70710678118654752).epsilon(1e-14));
    CHECK_THROWS_AS((void)amplitude_theory(0), DimensionError);
}

TEST_CASE("cosine model") {
    const std::vector<double> zeros = {0.0, 0.0, 0.0};
    CHECK(cosine_model(zeros, 1.0, 123.0) == doctest::Approx(1.0).epsilon(1e-15));

    const std::vector<double> fixed = {0.4, 0.4};
    for (double T : {0.0, 1.0, 9.0})
        CHECK(cosine_model(fixed, 2.0, T) == doctest::Approx(std::cos(0.4 * T / 2.0)).epsilon(1e-14));

    const std::vector<double> pair = {0.0, kPi};
    CHECK(cosine_model(pair, 1.0, 1.0) ==
          doctest::Approx(0.5 * (1.0 + std::cos(kPi))).epsilon(1e-14));

    SUBCASE("even and bounded") {
        Rng rng(6);
        std::vector<double> de(40);
        for (auto& d : de) d = rng.uniform(-1, 1);
        for (int i = 0; i < 50; ++i) {
            const double T = rng.uniform(0, 1e4);
            const double v = cosine_model(de, 1.0, T);
            CHECK(v == doctest::Approx(cosine_model(de, 1.0, -T)).epsilon(1e-12));
            CHECK(v <= 1.0 + 1e-15);
            CHECK(v >= -1.0 - 1e-15);
        }
    }
}

TEST_CASE("equal-coefficient diagonal series matches the cosine model") {
    const std::size_t dim = 64;
    const SpectralModel m = equal_coefficient_model(dim);
    const auto p = sample_perturbed(m, {ErrorKind::uniform, 1e-2, 4}, 0.0);
    std::vector<double> de(dim);
    for (std::size_t mu = 0; mu < dim; ++mu) de[mu] = p.energies_approx[mu] - m.energies[mu];
    const auto s = overlap_series(m, p, linear_times(0, 2000, 301));
    for (std::size_t k = 0; k < s.size(); ++k)
        CHECK(std::abs(s.overlap_re[k] - cosine_model(de, 1.0, s.times[k])) < 1e-12);
}

TEST_CASE("detector closed forms") {
    SUBCASE("unperturbed series never crosses") {
        const SpectralModel m = equal_coefficient_model(32);
        PerturbedSpectrum p;
        p.energies_approx = m.energies;
        p.coefficients_approx = m.coefficients;
        const auto s = overlap_series(m, p, linear_times(0, 100, 64));
        CHECK_FALSE(detect_horizon(s, 0.1, 32).has_value());
    }
    SUBCASE("single cosine crossing is the arccos") {
        const double d = 0.01, hbar = 1.0;
        const SpectralModel m = equal_coefficient_model(16, hbar);
        const auto p = sample_perturbed(m, {ErrorKind::fixed, d, 1}, 0.0);
        const double expected = hbar * std::acos(0.1) / d;
        const auto s = overlap_series(m, p, linear_times(0.0, 2.0 * expected, 4001));
        const auto t = detect_horizon(s, 0.1, 16);
        REQUIRE(t.has_value());
        CHECK(*t == doctest::Approx(expected).epsilon(1e-4));
    }
    SUBCASE("errors") {
        const SpectralModel m = equal_coefficient_model(8);
        const auto p = sample_perturbed(m, {ErrorKind::fixed, 0.3, 1}, 0.0);
        const auto s = overlap_series(m, p, linear_times(0, 10, 10));
        CHECK_THROWS_AS((void)detect_horizon(s, 0.1, 8, 16), InsufficientData);
        const auto s2 = overlap_series(m, p, linear_times(8, 20, 64));
        CHECK_THROWS_AS((void)detect_horizon(s2, 0.1, 8), ContractViolation);
    }
}

TEST_CASE("empirical horizon lands within the factor-2 band") {
    // dispersion-based theory value: the band edge sits near ratio 0.52, so
    // this is a fixed-seed check by construction
    const std::size_t dim = 200;
    const double dE = 1e-3;
    const SpectralModel m = equal_coefficient_model(dim);
    const auto p = sample_perturbed(m, {ErrorKind::uniform, dE, 12}, 0.0);
    const double disp = energy_dispersion(m, p);
    const double tp_disp = predict_horizon_theory(disp, 1.0);
    const auto s =
        overlap_series(m, p, linear_times(0.0, 3.0 * tp_disp, 1025));
    const auto t = detect_horizon(s, 0.1, dim);
    REQUIRE(t.has_value());
    CHECK(*t >= 0.5 * tp_disp);
    CHECK(*t <= 2.0 * tp_disp);

    // half-width theory value sits mid-band
    const double tp_scale = predict_horizon_theory(dE, 1.0);
    CHECK(*t >= 0.5 * tp_scale);
    CHECK(*t <= 2.0 * tp_scale);
}

TEST_CASE("measure amplitude") {
    SUBCASE("zero tail") {
        OverlapSeries s;
        for (int k = 0; k < 200; ++k) {
            s.times.push_back(k);
            s.overlap_re.push_back(0.0);
            s.overlap_im.push_back(0.0);
            s.deviation.push_back(std::sqrt(2.0));
        }
        CHECK(measure_amplitude(s, 0.0) == doctest::Approx(0.0).epsilon(1e-15));
    }
    SUBCASE("cosine tail has rms 1/sqrt(2)") {
        const SpectralModel m = equal_coefficient_model(4);
        const auto p = sample_perturbed(m, {ErrorKind::fixed, 0.05, 1}, 0.0);
        // whole periods: 8 periods of 2 pi / 0.05
        const double T = 8.0 * 2.0 * kPi / 0.05;
        const auto s = overlap_series(m, p, linear_times(0.0, T, 1601));
        CHECK(measure_amplitude(s, 0.0) ==
              doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(0.02));
    }
    SUBCASE("dim 200 plateau near the predicted amplitude") {
        const std::size_t dim = 200;
        const SpectralModel m = equal_coefficient_model(dim);
        const auto p = sample_perturbed(m, {ErrorKind::uniform, 1e-3, 31}, 0.0);
        const double tp = predict_horizon_theory(1e-3, 1.0);
        const auto s = overlap_series(m, p, linear_times(10.0 * tp, 110.0 * tp, 1201));
        const double amp = measure_amplitude(s, s.times.front());
        CHECK(std::abs(amp / amplitude_theory(dim) - 1.0) < 0.2);
    }
    SUBCASE("needs 100 samples") {
        OverlapSeries s;
        for (int k = 0; k < 50; ++k) {
            s.times.push_back(k);
            s.overlap_re.push_back(0.0);
            s.overlap_im.push_back(0.0);
            s.deviation.push_back(0.0);
        }
        CHECK_THROWS_AS((void)measure_amplitude(s, 0.0), InsufficientData);
    }
}

TEST_CASE("horizon scaling across dispersions") {
    // tp_empirical * dE constant within a factor 2, log-log slope 1 +- 0.1
    const std::size_t dim = 200;
    const SpectralModel m = equal_coefficient_model(dim);
    std::vector<double> inv_de, tps, products;
    Rng seeds(2);
    for (double dE : {1e-2, 1e-3, 1e-4}) {
        for (int rep = 0; rep < 3; ++rep) {
            const auto p =
                sample_perturbed(m, {ErrorKind::uniform, dE, seeds.next_u64()}, 0.0);
            const double tp = predict_horizon_theory(dE, 1.0);
            const auto s = overlap_series(m, p, linear_times(0.0, 4.0 * tp, 257));
            const auto t = detect_horizon(s, 0.1, dim);
            REQUIRE(t.has_value());
            inv_de.push_back(1.0 / dE);
            tps.push_back(*t);
            products.push_back(*t * dE);
        }
    }
    const double pmin = *std::min_element(products.begin(), products.end());
    const double pmax = *std::max_element(products.begin(), products.end());
    CHECK(pmax / pmin < 2.0);
    const LineFit f = fit_loglog(inv_de, tps);
    CHECK(f.slope == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("amplitude scaling holds out to dim 3200") {
    Rng seeds(88);
    std::vector<double> dims_x, amps_y;
    for (std::size_t dim : {50u, 200u, 800u, 3200u}) {
        const SpectralModel m = equal_coefficient_model(dim);
        double mean_sq = 0.0;
        const int nseeds = 2;
        for (int s = 0; s < nseeds; ++s) {
            const auto p =
                sample_perturbed(m, {ErrorKind::uniform, 1e-3, seeds.next_u64()}, 0.0);
            const double tp = predict_horizon_theory(1e-3, 1.0);
            const auto tail = overlap_series(m, p, linear_times(10 * tp, 110 * tp, 801));
            const double a = measure_amplitude(tail, tail.times.front());
            mean_sq += a * a;
        }
        dims_x.push_back(double(dim));
        amps_y.push_back(std::sqrt(mean_sq / nseeds));
    }
    const LineFit f = fit_loglog(dims_x, amps_y);
    CHECK(f.slope == doctest::Approx(-0.5).epsilon(0.1));
}
