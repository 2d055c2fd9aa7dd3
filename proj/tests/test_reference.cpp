#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "support/oracles.hpp"
#include "twabc/reference.hpp"

using namespace twabc;

TEST_CASE("exact_free reduces to the beam at t = 0")
{
    for (double x : {-4.0, -1.0, 0.0, 0.5, 3.0}) {
        CHECK(std::abs(exact_free(x, 0.0) - gaussian_beam(x)) < 1e-14);
    }
    CHECK(std::abs(exact_free(0.0, 0.0)) == doctest::Approx(1.0));
    // frozen by direct evaluation, cross-checked against the wide-domain
    // surrogate in the acceptance suite
    CHECK(std::abs(exact_free(1.0, 0.5) - cplx(0.063978624630906908, -0.09014585818790638)) < 1e-15);
}

TEST_CASE("relative_l2_error basics")
{
    const Mesh mesh = Mesh::uniform(-5.0, 5.0, 32, 3);
    WaveField u{0.3, interpolate_nodal(mesh, [](double x) { return gaussian_beam(x); })};
    CHECK(relative_l2_error(u, u, mesh) == 0.0);
    WaveField twice = u;
    for (auto& v : twice.values) v *= 2.0;
    CHECK(relative_l2_error(twice, u, mesh) == doctest::Approx(1.0).epsilon(1e-13));
    WaveField zero{0.3, std::vector<cplx>(mesh.n_nodes(), 0.0)};
    CHECK_THROWS(relative_l2_error(u, zero, mesh));
}

TEST_CASE("relative_l2_error is phase invariant")
{
    const Mesh mesh = Mesh::uniform(-5.0, 5.0, 32, 3);
    WaveField u{0.0, interpolate_nodal(mesh, [](double x) { return gaussian_beam(x); })};
    WaveField v{0.0, interpolate_nodal(mesh, [](double x) { return exact_free(x, 0.05); })};
    const double base = relative_l2_error(u, v, mesh);
    const cplx phase = std::exp(cplx(0.0, 0.8137));
    WaveField up = u, vp = v;
    for (auto& z : up.values) z *= phase;
    for (auto& z : vp.values) z *= phase;
    CHECK(std::abs(relative_l2_error(up, vp, mesh) - base) < 1e-14 * (1.0 + base));
}

TEST_CASE("reference solver matches the closed form on the free equation")
{
    // dt chosen so the Crank-Nicolson phase error stays near the 1e-6 target
    ReferenceConfig rc;
    rc.L = 50.0;
    rc.elements = 2560;
    rc.dt = 4e-5;
    const Mesh interior = Mesh::uniform(-5.0, 5.0, 256, 4);
    const auto run = reference_solution(Potential::free_particle(), rc, interior, 1e-3, 0.2, {0.2});
    REQUIRE(run.snapshots.size() == 1);
    CHECK(run.containment_ok);
    const auto on_interior = interpolate_onto(run.mesh, run.snapshots[0].values, interior);
    WaveField got{0.2, on_interior};
    WaveField ex{0.2, interpolate_nodal(interior, [](double x) { return exact_free(x, 0.2); })};
    CHECK(relative_l2_error(got, ex, interior) <= 1e-6);
}

TEST_CASE("halving dt improves the reference by the expected second order")
{
    ReferenceConfig rc;
    rc.L = 30.0;
    rc.elements = 768;
    const Mesh interior = Mesh::uniform(-5.0, 5.0, 128, 4);
    std::vector<double> errs;
    for (double dt : {2e-3, 1e-3}) {
        rc.dt = dt;
        const auto run = reference_solution(Potential::free_particle(), rc, interior, dt, 0.4, {0.4});
        const auto on_interior = interpolate_onto(run.mesh, run.snapshots[0].values, interior);
        WaveField got{0.4, on_interior};
        WaveField ex{0.4, interpolate_nodal(interior, [](double x) { return exact_free(x, 0.4); })};
        errs.push_back(relative_l2_error(got, ex, interior));
    }
    CHECK(errs[0] / errs[1] > 3.0);
    CHECK(errs[0] / errs[1] < 5.5);
}

TEST_CASE("containment flag trips when the domain is too small")
{
    ReferenceConfig rc;
    rc.L = 8.0;  // beam reaches 0.9 L well before T = 1
    rc.elements = 256;
    rc.dt = 1e-3;
    const Mesh interior = Mesh::uniform(-5.0, 5.0, 64, 4);
    const auto run = reference_solution(Potential::free_particle(), rc, interior, 1e-3, 1.0, {1.0});
    CHECK_FALSE(run.containment_ok);
    CHECK(!run.snapshots.empty());  // still returned, flagged untrusted
}
