#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "horizonlab/errors.hpp"
#include "horizonlab/linfit.hpp"
#include "horizonlab/ritz.hpp"
#include "horizonlab/rng.hpp"

using namespace horizonlab;

namespace {

// reference spectra from an independent dense symmetric eigensolver (LAPACK
// dsyevd), frozen to 15 digits
const double kQuartic01_D8[10] = {
    1.023397862685194, 2.067541163004955, 2.067541163004958, 3.068872572049505,
    3.147662796958654, 3.195645961585994, 4.124646368623193, 4.124646368623194,
    4.336298838553232, 4.336298838553239};
const double kQuartic01_D24[10] = {
    1.023397859416295, 2.067541117103364, 2.067541117103398, 3.068870406678340,
    3.147662476034960, 3.195645570879187, 4.124637520158671, 4.124637520158682,
    4.336284147819514, 4.336284147819528};
const double kQuartic5_D24[10] = {
    1.509606396294693, 3.213075758718823, 3.213075758719397, 4.387513561399751,
    4.988554467411287, 6.027412902782075, 6.027412902783484, 6.028956116344171,
    7.354599254251722, 7.495954562223057};

SymMatrix random_symmetric(Rng& rng, std::size_t n) {
    SymMatrix m = SymMatrix::zero(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) m.at(i, j) = m.at(j, i) = rng.uniform(-1, 1);
    return m;
}

} // namespace

TEST_CASE("harmonic matrix is its own eigenbasis") {
    const ModelHamiltonian h{ModelKind::harmonic_1d, 1.0, 0.0, 1.0};
    const SymMatrix m = build_matrix(h, 12);
    for (std::size_t i = 0; i < 12; ++i)
        for (std::size_t j = 0; j < 12; ++j)
            CHECK(m.at(i, j) == (i == j ? double(i) + 0.5 : 0.0));

    // non-unit hbar omega
    const ModelHamiltonian h2{ModelKind::harmonic_1d, 1.37, 0.0, 0.7};
    const auto ev = solve_spectrum(h2, 32);
    for (std::size_t n = 0; n < 32; ++n)
        CHECK(ev[n] == doctest::Approx(0.7 * 1.37 * (double(n) + 0.5)).epsilon(1e-12));
}

TEST_CASE("decoupled quartic is a direct sum of ladders") {
    const ModelHamiltonian h{ModelKind::coupled_quartic_2d, 1.0, 0.0, 1.0};
    const std::size_t D = 6;
    const auto ev = solve_spectrum(h, D);
    std::vector<double> expected;
    for (std::size_t a = 0; a < D; ++a)
        for (std::size_t b = 0; b < D; ++b) expected.push_back(double(a + b) + 1.0);
    std::sort(expected.begin(), expected.end());
    REQUIRE(ev.size() == expected.size());
    for (std::size_t i = 0; i < ev.size(); ++i)
        CHECK(ev[i] == doctest::Approx(expected[i]).epsilon(1e-12));
}

TEST_CASE("ground-state diagonal element carries the coupling") {
    const ModelHamiltonian h{ModelKind::coupled_quartic_2d, 1.0, 0.1, 1.0};
    const SymMatrix m = build_matrix(h, 4);
    // <00|H|00> = 1 + lambda <0|q^2|0>^2 = 1 + 0.1 * 0.25
    CHECK(m.at(0, 0) == doctest::Approx(1.025).epsilon(1e-14));
    CHECK(m.max_asymmetry() == 0.0);
}

TEST_CASE("jacobi on closed-form cases") {
    SUBCASE("diagonal input returns immediately") {
        SymMatrix m = SymMatrix::zero(5);
        for (std::size_t i = 0; i < 5; ++i) m.at(i, i) = double(i) + 0.5;
        JacobiOptions jo;
        jo.want_vectors = true;
        const auto sol = jacobi_eigensolve(m, jo);
        CHECK(sol.rotations == 0);
        for (std::size_t i = 0; i < 5; ++i) {
            CHECK(sol.eigenvalues[i] == double(i) + 0.5);
            for (std::size_t j = 0; j < 5; ++j)
                CHECK(sol.vectors[i * 5 + j] == (i == j ? 1.0 : 0.0));
        }
    }
    SUBCASE("2x2 exchange matrix") {
        SymMatrix m = SymMatrix::zero(2);
        m.at(0, 1) = m.at(1, 0) = 1.0;
        const auto sol = jacobi_eigensolve(m);
        CHECK(sol.eigenvalues[0] == doctest::Approx(-1.0).epsilon(1e-14));
        CHECK(sol.eigenvalues[1] == doctest::Approx(1.0).epsilon(1e-14));
    }
    SUBCASE("non-symmetric input rejected") {
        SymMatrix m = SymMatrix::zero(3);
        m.at(0, 1) = 1.0;
        CHECK_THROWS_AS((void)jacobi_eigensolve(m), ContractViolation);
    }
}

TEST_CASE("jacobi reconstruction, orthonormality and trace") {
    Rng rng(8);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n = 8;
        const SymMatrix m = random_symmetric(rng, n);
        JacobiOptions jo;
        jo.want_vectors = true;
        const auto sol = jacobi_eigensolve(m, jo);

        // reconstruction ||V diag V^T - M|| <= 1e-10 ||M||
        double err = 0.0, nrm = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                double r = 0.0;
                for (std::size_t k = 0; k < n; ++k)
                    r += sol.vectors[i * n + k] * sol.eigenvalues[k] * sol.vectors[j * n + k];
                err += (r - m.at(i, j)) * (r - m.at(i, j));
                nrm += m.at(i, j) * m.at(i, j);
            }
        CHECK(std::sqrt(err) <= 1e-10 * std::sqrt(nrm));

        // orthonormal columns
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = a; b < n; ++b) {
                double dot = 0.0;
                for (std::size_t k = 0; k < n; ++k)
                    dot += sol.vectors[k * n + a] * sol.vectors[k * n + b];
                CHECK(std::abs(dot - (a == b ? 1.0 : 0.0)) < 1e-10);
            }

        double tr = 0.0;
        for (double e : sol.eigenvalues) tr += e;
        CHECK(tr == doctest::Approx(m.trace()).epsilon(1e-10));

        // ascending order
        CHECK(std::is_sorted(sol.eigenvalues.begin(), sol.eigenvalues.end()));
    }
}

TEST_CASE("coupled quartic matches the frozen reference spectra") {
    const ModelHamiltonian weak{ModelKind::coupled_quartic_2d, 1.0, 0.1, 1.0};
    const auto e8 = solve_spectrum(weak, 8);
    const auto e24 = solve_spectrum(weak, 24);
    for (int k = 0; k < 10; ++k) {
        CHECK(e8[k] == doctest::Approx(kQuartic01_D8[k]).epsilon(1e-10));
        CHECK(e24[k] == doctest::Approx(kQuartic01_D24[k]).epsilon(1e-10));
    }
    const ModelHamiltonian strong{ModelKind::coupled_quartic_2d, 1.0, 5.0, 1.0};
    const auto s24 = solve_spectrum(strong, 24);
    for (int k = 0; k < 10; ++k)
        CHECK(s24[k] == doctest::Approx(kQuartic5_D24[k]).epsilon(1e-9));
}

TEST_CASE("parity blocks equal the full solve") {
    const ModelHamiltonian h{ModelKind::coupled_quartic_2d, 1.0, 0.5, 1.0};
    SpectrumOptions blocked;
    SpectrumOptions full;
    full.parity_blocks = false;
    const auto a = solve_spectrum(h, 7, blocked);
    const auto b = solve_spectrum(h, 7, full);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-10));
}

TEST_CASE("multi-precision pipeline agrees with hardware doubles") {
    const ModelHamiltonian h{ModelKind::coupled_quartic_2d, 1.0, 0.5, 1.0};
    const auto d = solve_spectrum(h, 4);
    const auto mp = solve_spectrum_mp(h, 4, 128);
    REQUIRE(d.size() == mp.size());
    for (std::size_t i = 0; i < d.size(); ++i)
        CHECK(d[i] == doctest::Approx(mp[i]).epsilon(1e-12));
}

TEST_CASE("convergence study at weak coupling") {
    const ModelHamiltonian h{ModelKind::coupled_quartic_2d, 1.0, 0.1, 1.0};
    const std::size_t dims[] = {6, 8, 10, 12, 14};
    const ConvergenceStudy st = convergence_study(h, dims, 10, 24);

    REQUIRE(st.errors.size() == 5);
    for (std::size_t lvl = 0; lvl < 10; ++lvl)
        for (std::size_t i = 1; i < st.dims.size(); ++i)
            CHECK(st.errors[i][lvl] < st.errors[i - 1][lvl]);

    CHECK(st.fitted_alpha > 0.0);
    CHECK(st.fit_r2 >= 0.9);

    // per-level log-log slopes must not flatten above the noise floor
    // (power-law sanity of the fit window)
    for (std::size_t lvl = 0; lvl < 10; ++lvl) {
        for (std::size_t i = 2; i < st.dims.size(); ++i) {
            if (st.errors[i][lvl] < 1e-10) continue;
            const double s1 = std::log(st.errors[i - 1][lvl] / st.errors[i - 2][lvl]) /
                              std::log(double(st.dims[i - 1]) / double(st.dims[i - 2]));
            const double s2 = std::log(st.errors[i][lvl] / st.errors[i - 1][lvl]) /
                              std::log(double(st.dims[i]) / double(st.dims[i - 1]));
            CHECK(s2 <= s1 * 0.8);  // steepening or equal within 20%
        }
    }
}

TEST_CASE("convergence study on exact bases") {
    const ModelHamiltonian harm{ModelKind::harmonic_1d, 1.0, 0.0, 1.0};
    const std::size_t dims[] = {6, 8, 10};
    const ConvergenceStudy st = convergence_study(harm, dims, 4, 16);
    for (const auto& err : st.errors)
        for (double e : err) CHECK(e < 1e-13);
    CHECK(std::isinf(st.fitted_alpha));

    const ModelHamiltonian sep{ModelKind::coupled_quartic_2d, 1.0, 0.0, 1.0};
    const ConvergenceStudy st2 = convergence_study(sep, dims, 8, 14);
    for (const auto& err : st2.errors)
        for (double e : err) CHECK(e < 1e-12);
}

TEST_CASE("convergence study validation") {
    const ModelHamiltonian h{ModelKind::coupled_quartic_2d, 1.0, 0.1, 1.0};
    const std::size_t dims[] = {6, 8};
    CHECK_THROWS_AS((void)convergence_study(h, dims, 10, 8), ContractViolation);
    const std::size_t unsorted[] = {8, 6};
    CHECK_THROWS_AS((void)convergence_study(h, unsorted, 10, 24), ContractViolation);
    CHECK_THROWS_AS((void)convergence_study(h, dims, 0, 24), DimensionError);
    CHECK_THROWS_AS((void)convergence_study(h, dims, 200, 24), DimensionError);
}

TEST_CASE("variational upper bound monotonicity") {
    const ModelHamiltonian harm{ModelKind::harmonic_1d, 1.0, 0.0, 1.0};
    CHECK(variational_upper_bound_check(harm, 8, 16, 8));

    const ModelHamiltonian h{ModelKind::coupled_quartic_2d, 1.0, 0.1, 1.0};
    CHECK(variational_upper_bound_check(h, 6, 12, 10));
    CHECK_THROWS_AS((void)variational_upper_bound_check(h, 12, 6, 10), ContractViolation);
    CHECK_THROWS_AS((void)variational_upper_bound_check(h, 6, 6, 10), ContractViolation);
}

TEST_CASE("trace is preserved for model matrices") {
    const ModelHamiltonian h{ModelKind::coupled_quartic_2d, 1.0, 0.7, 1.0};
    const SymMatrix m = build_matrix(h, 5);
    const auto sol = jacobi_eigensolve(m);
    double tr = 0.0;
    for (double e : sol.eigenvalues) tr += e;
    CHECK(tr == doctest::Approx(m.trace()).epsilon(1e-10));
}

TEST_CASE("capacity guard") {
    const ModelHamiltonian h{ModelKind::coupled_quartic_2d, 1.0, 0.1, 1.0};
    CHECK_THROWS_AS((void)build_matrix(h, 100), CapacityError);
}
