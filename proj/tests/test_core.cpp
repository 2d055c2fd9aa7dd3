#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "support/oracles.hpp"
#include "twabc/banded.hpp"
#include "twabc/complex_math.hpp"
#include "twabc/fem.hpp"
#include "twabc/mesh.hpp"
#include "twabc/potential.hpp"

using namespace twabc;

TEST_CASE("principal_sqrt_neg reference values")
{
    const cplx i(0.0, 1.0);
    const double r2 = std::sqrt(2.0) / 2.0;
    CHECK(std::abs(principal_sqrt_neg(i) - cplx(r2, -r2)) < 1e-15);
    CHECK(std::abs(principal_sqrt_neg(cplx(-1.0, 0.0)) - cplx(1.0, 0.0)) < 1e-15);
    CHECK(std::abs(principal_sqrt_neg(2.0 * i) - cplx(1.0, -1.0)) < 1e-15);
}

TEST_CASE("principal branch identities on random samples")
{
    for (int trial = 0; trial < 1000; ++trial) {
        const double mag = std::pow(10.0, oracles::uniform(-3.0, 6.0));
        const double arg = oracles::uniform(-pi + 1e-6, pi - 1e-6);
        const cplx lambda = mag * std::exp(cplx(0.0, arg));
        const cplx k = principal_sqrt_neg(lambda);
        CHECK(std::abs(k * k + lambda) <= 1e-14 * std::abs(lambda));
        if (lambda.imag() > 0.0) CHECK(k.real() > 0.0);
    }
}

TEST_CASE("potential reference values")
{
    CHECK(eval_potential(Potential::coulomb_like(), 0.0) == doctest::Approx(1.0));
    CHECK(eval_potential(Potential::gaussian_barrier(30.0, 36.0, 8.0), 8.0) == doctest::Approx(30.0));
    const Potential flat = Potential::bargmann(1.0, 1.0);
    for (double x : {-3.0, 0.0, 0.7, 10.0}) CHECK(eval_potential(flat, x) == 0.0);
    CHECK(eval_potential(Potential::harmonic(), -2.0) == doctest::Approx(4.0));
}

TEST_CASE("bargmann potential matches the direct formula where it is stable")
{
    const Potential p = Potential::bargmann(1.5, 0.25);
    const double c = (1.5 - 0.25) / (1.5 + 0.25);
    for (double x : {-2.0, -0.5, 0.0, 1.0, 4.0}) {
        const double e = std::exp(-2.0 * 1.5 * x);
        const double direct = -8.0 * 1.5 * 1.5 * c * e / ((1.0 + c * e) * (1.0 + c * e));
        CHECK(eval_potential(p, x) == doctest::Approx(direct).epsilon(1e-12));
    }
    // far tails decay to zero instead of overflowing
    CHECK(eval_potential(p, 400.0) == 0.0);
    CHECK(std::abs(eval_potential(p, -400.0)) < 1e-200);
}

TEST_CASE("tabulated potential interpolates and clamps")
{
    const Potential t = Potential::tabulated({0.0, 1.0, 2.0}, {0.0, 2.0, 0.0});
    CHECK(t(0.5) == doctest::Approx(1.0));
    CHECK(t(1.5) == doctest::Approx(1.0));
    CHECK(t(-5.0) == doctest::Approx(0.0));
    CHECK(t(9.0) == doctest::Approx(0.0));
    CHECK_THROWS(Potential::tabulated({0.0, 0.0}, {1.0, 2.0}));
    CHECK_THROWS(Potential::tabulated({0.0, 1.0}, {1.0}));
}

TEST_CASE("tabulated sampling of the coulomb-like potential converges at O(h^2)")
{
    const Potential exact = Potential::coulomb_like();
    double prev = 0.0;
    std::vector<double> errs;
    for (int n : {101, 201, 401}) {
        const Potential tab = tabulate_potential(exact, -10.0, 10.0, n);
        double worst = 0.0;
        for (int i = 0; i < 1000; ++i) {
            const double x = -10.0 + 20.0 * i / 999.0;
            worst = std::max(worst, std::abs(tab(x) - exact(x)));
        }
        errs.push_back(worst);
        prev = worst;
    }
    (void)prev;
    // halving h should shrink the error by ~4; allow a generous band
    CHECK(errs[0] / errs[1] > 3.0);
    CHECK(errs[1] / errs[2] > 3.0);
}

TEST_CASE("complex_gamma reference values and poles")
{
    CHECK(std::abs(complex_gamma(cplx(1.0, 0.0)) - cplx(1.0, 0.0)) < 1e-13);
    CHECK(std::abs(complex_gamma(cplx(0.5, 0.0)) - cplx(std::sqrt(pi), 0.0)) < 1e-12);
    CHECK(std::abs(complex_gamma(cplx(4.0, 0.0)) - cplx(6.0, 0.0)) < 1e-12);
    CHECK_THROWS_AS((void)complex_gamma(cplx(0.0, 0.0)), std::domain_error);
    CHECK_THROWS_AS((void)complex_gamma(cplx(-3.0, 0.0)), std::domain_error);
}

TEST_CASE("complex_gamma recurrence on the strip")
{
    for (int trial = 0; trial < 200; ++trial) {
        const cplx z(oracles::uniform(0.5, 10.0), oracles::uniform(-50.0, 50.0));
        const cplx lhs = complex_gamma(z + 1.0);
        const cplx rhs = z * complex_gamma(z);
        CHECK(std::abs(lhs - rhs) <= 1e-10 * std::abs(lhs));
    }
}

TEST_CASE("mesh nodes: count, ordering, endpoints")
{
    for (int p : {1, 2, 4, 8}) {
        const Mesh m = Mesh::uniform(-5.0, 5.0, 16, p);
        CHECK(m.n_nodes() == static_cast<std::size_t>(16 * p + 1));
        CHECK(m.nodes.front() == doctest::Approx(-5.0));
        CHECK(m.nodes.back() == doctest::Approx(5.0));
        for (std::size_t i = 1; i < m.n_nodes(); ++i) CHECK(m.nodes[i] > m.nodes[i - 1]);
    }
    CHECK_THROWS(Mesh::uniform(5.0, -5.0, 16, 4));
    CHECK_THROWS(Mesh::uniform(-5.0, 5.0, 0, 4));
}

TEST_CASE("gauss-legendre rule integrates polynomials exactly")
{
    const GaussRule g = gauss_legendre(5);
    double acc = 0.0;
    for (std::size_t q = 0; q < g.x.size(); ++q) acc += g.w[q] * std::pow(g.x[q], 8);
    CHECK(acc == doctest::Approx(2.0 / 9.0).epsilon(1e-13));
}

TEST_CASE("banded LU matches a dense oracle on random diagonally dominant systems")
{
    std::mt19937& gen = oracles::rng();
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 40;
        const int kl = 3, ku = 2;
        Banded<cplx> a(n, kl, ku);
        std::vector<std::vector<cplx>> dense(n, std::vector<cplx>(n, 0.0));
        for (int j = 0; j < n; ++j) {
            for (int i = std::max(0, j - ku); i <= std::min(n - 1, j + kl); ++i) {
                cplx v = oracles::random_unit_disk();
                if (i == j) v += 10.0;
                a.at(i, j) = v;
                dense[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = v;
            }
        }
        std::vector<cplx> b(static_cast<std::size_t>(n));
        for (auto& v : b) v = oracles::random_unit_disk();
        const std::vector<cplx> x = BandedLU<cplx>(a).solve(b);
        const std::vector<cplx> xd = oracles::dense_solve(dense, b);
        for (int i = 0; i < n; ++i) {
            CHECK(std::abs(x[static_cast<std::size_t>(i)] - xd[static_cast<std::size_t>(i)]) < 1e-12);
        }
    }
    (void)gen;
}

TEST_CASE("banded LU reports the singular column")
{
    Banded<cplx> a(4, 1, 1);
    a.at(0, 0) = 1.0;
    a.at(1, 1) = 1.0;  // column 2 left entirely zero
    a.at(3, 3) = 1.0;
    try {
        BandedLU<cplx> lu(a);
        FAIL("expected SingularMatrixError");
    } catch (const SingularMatrixError& e) {
        CHECK(e.column == 2);
    }
}

TEST_CASE("banded LU handles identity and zero right-hand side")
{
    Banded<cplx> eye(5, 1, 1);
    for (int i = 0; i < 5; ++i) eye.at(i, i) = 1.0;
    const std::vector<cplx> b = {1.0, {0, 2.0}, 3.0, {4.0, -1.0}, 5.0};
    const auto x = BandedLU<cplx>(eye).solve(b);
    for (int i = 0; i < 5; ++i) CHECK(std::abs(x[static_cast<std::size_t>(i)] - b[static_cast<std::size_t>(i)]) == 0.0);
    const auto z = BandedLU<cplx>(eye).solve(std::vector<cplx>(5, 0.0));
    for (const auto& v : z) CHECK(std::abs(v) == 0.0);
}

TEST_CASE("field evaluation reproduces nodal interpolants")
{
    const Mesh m = Mesh::uniform(-2.0, 3.0, 10, 4);
    const auto vals = interpolate_nodal(m, [](double x) { return cplx(x * x * x, -x); });
    // degree-3 data is inside the order-4 space, so evaluation is exact
    for (double x : {-1.97, -0.3, 0.0, 1.234, 2.999}) {
        const cplx got = eval_field(m, vals, x);
        CHECK(std::abs(got - cplx(x * x * x, -x)) < 1e-12);
    }
}

TEST_CASE("mass matrix integrates against known L2 norms")
{
    const Mesh m = Mesh::uniform(0.0, 1.0, 8, 3);
    const auto one = interpolate_nodal(m, [](double) { return cplx(1.0, 0.0); });
    CHECK(l2_norm(m, one) == doctest::Approx(1.0).epsilon(1e-13));
    const auto lin = interpolate_nodal(m, [](double x) { return cplx(x, 0.0); });
    CHECK(l2_norm(m, lin) == doctest::Approx(std::sqrt(1.0 / 3.0)).epsilon(1e-13));
}
