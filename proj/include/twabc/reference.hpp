#pragma once

#include <cmath>
#include <cstddef>
#include <memory>
#include <stdexcept>
#include <vector>

#include "twabc/banded.hpp"
#include "twabc/complex_math.hpp"
#include "twabc/fem.hpp"
#include "twabc/mesh.hpp"
#include "twabc/potential.hpp"

namespace twabc {

/// The Gaussian-beam initial data used throughout the experiments.
inline cplx gaussian_beam(double x)
{
    return std::exp(cplx(-x * x, 4.0 * x));
}

/// Closed-form solution of the free equation for the Gaussian beam:
/// u(x,t) = sqrt(i/(-4t+i)) exp((-i x^2 - 4x + 16t)/(-4t+i)); reduces to the
/// beam at t = 0.
inline cplx exact_free(double x, double t)
{
    const cplx den(-4.0 * t, 1.0);
    const cplx i(0.0, 1.0);
    return std::sqrt(i / den) * std::exp((-i * x * x - 4.0 * x + 16.0 * t) / den);
}

struct ErrorSeries {
    std::vector<double> times;
    std::vector<double> rel_l2;
};

/// ||u - u_ref|| / ||u_ref|| in L2 over the mesh, by element quadrature.
inline double relative_l2_error(const WaveField& u, const WaveField& u_ref, const Mesh& mesh)
{
    if (u.values.size() != mesh.n_nodes() || u_ref.values.size() != mesh.n_nodes()) {
        throw std::invalid_argument("relative_l2_error: fields do not match the mesh");
    }
    std::vector<cplx> diff(u.values.size());
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = u.values[i] - u_ref.values[i];
    const double denom = l2_norm(mesh, u_ref.values);
    if (denom == 0.0) throw std::invalid_argument("relative_l2_error: reference field has zero norm");
    return l2_norm(mesh, diff) / denom;
}

/// Crank-Nicolson evolution with homogeneous Dirichlet ends, reduced to the
/// interior unknowns so the step map stays unitary in the mass inner product.
class CrankNicolsonDirichlet {
public:
    CrankNicolsonDirichlet(const Mesh& mesh, const Potential& pot, double dt)
        : mesh_(mesh), dt_(dt), fem_(assemble_fem(mesh, pot))
    {
        if (!(dt > 0.0)) throw std::invalid_argument("CrankNicolsonDirichlet: dt must be > 0");
        const int n = static_cast<int>(mesh.n_nodes());
        const int ni = n - 2;
        const int p = mesh.order;
        // interior blocks of B = iM/dt - A/2 and C = iM/dt + A/2
        Banded<cplx> b(ni, p, p);
        c_ = Banded<cplx>(ni, p, p);
        const cplx imdt = cplx(0.0, 1.0) / dt;
        for (int j = 0; j < ni; ++j) {
            const int ilo = std::max(0, j - p);
            const int ihi = std::min(ni - 1, j + p);
            for (int i = ilo; i <= ihi; ++i) {
                const double m = fem_.mass.at(i + 1, j + 1);
                const double a = fem_.stiff_pot.at(i + 1, j + 1);
                b.at(i, j) = imdt * m - 0.5 * a;
                c_.at(i, j) = imdt * m + 0.5 * a;
            }
        }
        b_matrix_ = std::move(b);
        lu_ = std::make_unique<BandedLU<cplx>>(b_matrix_);
        field_.time = 0.0;
        field_.values.assign(static_cast<std::size_t>(n), 0.0);
    }

    void set_initial(const std::vector<cplx>& u0_nodal)
    {
        if (u0_nodal.size() != mesh_.n_nodes()) {
            throw std::invalid_argument("set_initial: size mismatch");
        }
        field_.values = u0_nodal;
        field_.values.front() = 0.0;
        field_.values.back() = 0.0;
        field_.time = 0.0;
        step_count_ = 0;
    }

    void step()
    {
        const std::size_t ni = mesh_.n_nodes() - 2;
        std::vector<cplx> ui(ni);
        for (std::size_t i = 0; i < ni; ++i) ui[i] = field_.values[i + 1];
        const std::vector<cplx> rhs = c_.matvec(ui);
        const std::vector<cplx> next = lu_->solve_refined(b_matrix_, rhs);
        for (std::size_t i = 0; i < ni; ++i) field_.values[i + 1] = next[i];
        ++step_count_;
        field_.time = dt_ * static_cast<double>(step_count_);
    }

    const WaveField& field() const { return field_; }
    const Mesh& mesh() const { return mesh_; }
    double dt() const { return dt_; }

private:
    Mesh mesh_;
    double dt_;
    FemMatrices fem_;
    Banded<cplx> b_matrix_;
    Banded<cplx> c_;
    std::unique_ptr<BandedLU<cplx>> lu_;
    WaveField field_;
    long step_count_ = 0;
};

/// Whole-line surrogate configuration. Negative entries mean "derive from the
/// interior discretization": element count scales the interior density by
/// 10 L / x_plus and dt is inherited.
struct ReferenceConfig {
    double L = 50.0;
    int elements = -1;
    int order = -1;
    double dt = -1.0;
};

struct ReferenceRun {
    Mesh mesh;
    std::vector<WaveField> snapshots;
    bool containment_ok = true;
    double max_edge_value = 0.0;
};

/// Crank-Nicolson + FEM on [-L, L] with homogeneous Dirichlet ends. Flags the
/// run untrusted if the wave reaches 0.9 L before the final time.
inline ReferenceRun reference_solution(const Potential& pot, const ReferenceConfig& rc,
                                       const Mesh& interior, double dt_interior, double T,
                                       const std::vector<double>& snapshot_times)
{
    const int order = rc.order > 0 ? rc.order : interior.order;
    const int elements = rc.elements > 0
                             ? rc.elements
                             : static_cast<int>(std::lround(10.0 * (rc.L / interior.x_plus) *
                                                            interior.n_elements));
    const double dt = rc.dt > 0.0 ? rc.dt : dt_interior;
    ReferenceRun run;
    run.mesh = Mesh::uniform(-rc.L, rc.L, elements, order);
    CrankNicolsonDirichlet stepper(run.mesh, pot, dt);
    stepper.set_initial(interpolate_nodal(run.mesh, [](double x) { return gaussian_beam(x); }));

    const long n_steps = std::lround(T / dt);
    std::size_t next_snap = 0;
    const double watch_lo = -0.9 * rc.L;
    const double watch_hi = 0.9 * rc.L;
    const auto record = [&](double t_now) {
        while (next_snap < snapshot_times.size() &&
               snapshot_times[next_snap] <= t_now + 0.5 * dt) {
            WaveField snap = stepper.field();
            snap.time = snapshot_times[next_snap];
            run.snapshots.push_back(std::move(snap));
            ++next_snap;
        }
    };
    for (long s = 0; s < n_steps; ++s) {
        stepper.step();
        const double t = stepper.field().time;
        const double edge = std::max(std::abs(eval_field(run.mesh, stepper.field().values, watch_lo)),
                                     std::abs(eval_field(run.mesh, stepper.field().values, watch_hi)));
        run.max_edge_value = std::max(run.max_edge_value, edge);
        record(t);
    }
    if (run.max_edge_value >= 1e-8) run.containment_ok = false;
    return run;
}

}  // namespace twabc
