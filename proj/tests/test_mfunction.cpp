#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "support/oracles.hpp"
#include "twabc/mfunction.hpp"

using namespace twabc;

namespace {
const cplx I(0.0, 1.0);
const cplx e_m_pi4 = std::exp(cplx(0.0, -pi / 4.0));
}  // namespace

TEST_CASE("m_constant reference values")
{
    CHECK(std::abs(m_constant(0.0, I) - (-e_m_pi4)) < 1e-15);
    CHECK(std::abs(m_constant(1.0, cplx(1.0, 1.0)) - (-e_m_pi4)) < 1e-15);  // V0 - lambda = -i
    const cplx expect = -std::sqrt(cplx(5.0, -1.0));
    CHECK(std::abs(m_constant(5.0, I) - expect) < 1e-15);
}

TEST_CASE("m_harmonic: gamma-ratio values")
{
    CHECK(std::abs(m_harmonic(cplx(-1.0, 0.0)) - cplx(-2.0 / std::sqrt(pi), 0.0)) < 1e-12);
    CHECK(std::abs(m_harmonic(cplx(-3.0, 0.0)) - cplx(-std::sqrt(pi), 0.0)) < 1e-12);
    const cplx m = m_harmonic(I);
    const cplx direct = -2.0 * complex_gamma(0.75 - 0.25 * I) / complex_gamma(0.25 - 0.25 * I);
    CHECK(std::abs(m - direct) <= 1e-10 * std::abs(direct));
    CHECK(m.imag() > 0.0);  // Herglotz at an upper-half-plane point
}

TEST_CASE("m_bargmann reference values")
{
    for (double beta : {0.5, 1.0, 2.0}) {
        CHECK(std::abs(m_bargmann(beta, beta, I) - m_constant(0.0, I)) < 1e-14);
    }
    CHECK(std::abs(m_bargmann(1.0, 0.0, I) - cplx(0.0, std::sqrt(2.0))) < 1e-14);
    // hand evaluation: k(2i) = 1 - i, m = -(1-i) - 3/(3-i) = -1.9 + 0.7i
    CHECK(std::abs(m_bargmann(1.0, 2.0, 2.0 * I) - cplx(-1.9, 0.7)) < 1e-14);
}

TEST_CASE("riccati fixed point: constant potential reproduces the closed form")
{
    RiccatiConfig rc;
    for (double f : {-256.0, -64.0, -1.0, 0.0, 1.0, 64.0, 256.0}) {
        const cplx lambda(-f, 1.0);
        const cplx got = riccati_m(Potential::free_particle(), 5.0, Side::Right, lambda, rc);
        CHECK(std::abs(got - m_constant(0.0, lambda)) < 1e-10);
        const cplx gotl = riccati_m(Potential::free_particle(), -5.0, Side::Left, lambda, rc);
        CHECK(std::abs(gotl - m_constant(0.0, lambda, Side::Left)) < 1e-10);
    }
}

TEST_CASE("riccati vs bargmann closed form")
{
    const cplx got = riccati_m(Potential::bargmann(1.0, 2.0), 0.0, Side::Right, I);
    CHECK(std::abs(got - m_bargmann(1.0, 2.0, I)) < 1e-6);
}

TEST_CASE("riccati coulomb-like golden value (step-halving oracle)")
{
    // frozen by halving the RK4 step until successive answers differed < 1e-10
    const cplx golden(-1.16949049590502, 0.429292808133243);
    const cplx got = riccati_m(Potential::coulomb_like(), 5.0, Side::Right, cplx(-1.0, 1.0));
    CHECK(std::abs(got - golden) < 1e-10);
}

TEST_CASE("riccati fourth-order self-convergence on the coulomb-like potential")
{
    const cplx lambda(-3.0, 1.0);
    const Potential pot = Potential::coulomb_like();
    RiccatiConfig rc;
    rc.step = 8e-2;
    const cplx m1 = riccati_m(pot, 5.0, Side::Right, lambda, rc);
    rc.step = 4e-2;
    const cplx m2 = riccati_m(pot, 5.0, Side::Right, lambda, rc);
    rc.step = 2e-2;
    const cplx m3 = riccati_m(pot, 5.0, Side::Right, lambda, rc);
    const double e1 = std::abs(m1 - m2);
    const double e2 = std::abs(m2 - m3);
    CHECK(e1 / e2 > 8.0);   // 4th order would give ~16
    CHECK(e1 / e2 < 40.0);
}

TEST_CASE("initialization robustness: frozen-coefficient vs free-field")
{
    for (const Potential& pot : {Potential::coulomb_like(), Potential::bargmann(1.0, 0.5)}) {
        for (const cplx lambda : {I, cplx(-4.0, 1.0), cplx(16.0, 1.0)}) {
            RiccatiConfig frozen;
            frozen.init = RiccatiConfig::Init::FrozenCoefficient;
            RiccatiConfig freef;
            freef.init = RiccatiConfig::Init::FreeField;
            const cplx a = riccati_m(pot, 5.0, Side::Right, lambda, frozen);
            const cplx b = riccati_m(pot, 5.0, Side::Right, lambda, freef);
            CHECK(std::abs(a - b) < 1e-8);
        }
    }
}

TEST_CASE("riccati rejects bad geometry")
{
    RiccatiConfig rc;
    rc.x_far = 3.0;
    CHECK_THROWS_AS((void)riccati_m(Potential::free_particle(), 5.0, Side::Right, I, rc),
                    std::invalid_argument);
}

TEST_CASE("riccati blow-up reports the location")
{
    // integrating the left side of bargmann(1, 2) toward 0 crosses the
    // potential singularity at x = -ln(3)/2
    try {
        (void)riccati_m(Potential::bargmann(1.0, 2.0), 0.0, Side::Left, I);
        FAIL("expected RiccatiBlowUpError");
    } catch (const RiccatiBlowUpError& e) {
        CHECK(e.x == doctest::Approx(-0.5 * std::log(3.0)).epsilon(0.05));
    }
}

TEST_CASE("m_contour basics")
{
    const auto empty = m_contour(Potential::free_particle(), 5.0, Side::Right, 1.0, {});
    CHECK(empty.empty());

    const auto one = m_contour(Potential::free_particle(), 5.0, Side::Right, 1.0, {0.0});
    REQUIRE(one.size() == 1);
    CHECK(std::abs(one[0].lambda - I) < 1e-15);
    CHECK(std::abs(one[0].m_value - (-e_m_pi4)) < 1e-12);
    CHECK(std::abs(one[0].k - principal_sqrt_neg(one[0].lambda)) < 1e-14);

    std::vector<double> f_grid;
    for (int j = 0; j < 11; ++j) f_grid.push_back(-64.0 + 128.0 * j / 10.0);
    const auto samples = m_contour(Potential::bargmann(1.0, 2.0), 0.0, Side::Right, 1.0, f_grid);
    for (const auto& s : samples) {
        CHECK(std::abs(s.m_value - m_bargmann(1.0, 2.0, s.lambda)) < 1e-6);
    }
    CHECK_THROWS(m_contour(Potential::free_particle(), 5.0, Side::Right, -1.0, {0.0}));
}

TEST_CASE("herglotz property of riccati values on the contour")
{
    std::vector<double> f_grid;
    for (int j = 0; j < 21; ++j) f_grid.push_back(-128.0 + 256.0 * j / 20.0);
    for (const Potential& pot : {Potential::coulomb_like(), Potential::bargmann(1.0, 0.0)}) {
        const auto samples = m_contour(pot, 5.0, Side::Right, 1.0, f_grid);
        const auto diag = m_diagnostics(samples);
        CHECK(diag.herglotz_violations == 0);
    }
}

TEST_CASE("m_diagnostics flags a conjugated sample set and reports symmetry")
{
    std::vector<double> f_grid;
    for (int j = 0; j < 9; ++j) f_grid.push_back(-32.0 + 64.0 * j / 8.0);
    auto samples = m_contour(Potential::free_particle(), 5.0, Side::Right, 1.0, f_grid);
    CHECK(m_diagnostics(samples).herglotz_violations == 0);

    auto conjugated = samples;
    for (auto& s : conjugated) s.m_value = std::conj(s.m_value);
    CHECK(m_diagnostics(conjugated).herglotz_violations == static_cast<int>(conjugated.size()));

    // symmetry residual via closed-form re-evaluation at conj(lambda)
    const auto diag = m_diagnostics(samples, [](const cplx& lambda) { return m_constant(0.0, lambda); });
    REQUIRE(diag.symmetry_residual.has_value());
    CHECK(*diag.symmetry_residual < 1e-14);
    CHECK_FALSE(m_diagnostics(samples).symmetry_residual.has_value());
    CHECK_THROWS(m_diagnostics({}));
}

TEST_CASE("soft cross-check: riccati against the harmonic gamma-ratio form")
{
    // growing potential: the far-field initializer is asymptotic, not exact
    RiccatiConfig rc;
    rc.x_far = 200.0;
    const cplx got = riccati_m(Potential::harmonic(), 0.0, Side::Right, I, rc);
    CHECK(std::abs(got - m_harmonic(I)) < 1e-4);
}
