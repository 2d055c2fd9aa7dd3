#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

#include "twabc/banded.hpp"
#include "twabc/complex_math.hpp"
#include "twabc/mesh.hpp"
#include "twabc/potential.hpp"

namespace twabc {

/// Lagrange basis values and derivatives tabulated at a quadrature rule on the
/// reference element.
struct ElementBasis {
    GaussRule rule;
    // phi[q*(p+1)+i], dphi likewise (derivative w.r.t. reference coordinate)
    std::vector<double> phi;
    std::vector<double> dphi;
    int order = 0;

    static ElementBasis make(const Mesh& mesh, int n_quad)
    {
        ElementBasis b;
        b.order = mesh.order;
        b.rule = gauss_legendre(n_quad);
        const int np = mesh.order + 1;
        b.phi.resize(static_cast<std::size_t>(n_quad) * np);
        b.dphi.resize(static_cast<std::size_t>(n_quad) * np);
        std::vector<double> phi_q;
        for (int q = 0; q < n_quad; ++q) {
            const double xi = b.rule.x[static_cast<std::size_t>(q)];
            lagrange_basis(mesh, xi, phi_q);
            for (int i = 0; i < np; ++i) {
                b.phi[static_cast<std::size_t>(q) * np + i] = phi_q[static_cast<std::size_t>(i)];
            }
            // derivative of the Lagrange basis via differentiated barycentric form
            for (int i = 0; i < np; ++i) {
                double d = 0.0;
                for (int j = 0; j < np; ++j) {
                    if (j == i) continue;
                    double prod = 1.0;
                    for (int l = 0; l < np; ++l) {
                        if (l == i || l == j) continue;
                        prod *= (xi - mesh.ref_nodes[static_cast<std::size_t>(l)]) /
                                (mesh.ref_nodes[static_cast<std::size_t>(i)] - mesh.ref_nodes[static_cast<std::size_t>(l)]);
                    }
                    d += prod / (mesh.ref_nodes[static_cast<std::size_t>(i)] - mesh.ref_nodes[static_cast<std::size_t>(j)]);
                }
                b.dphi[static_cast<std::size_t>(q) * np + i] = d;
            }
        }
        return b;
    }
};

/// Assembled Galerkin operators: M (mass) and A = K + V (stiffness plus
/// potential), both real symmetric banded with kl = ku = order.
struct FemMatrices {
    Banded<double> mass;
    Banded<double> stiff_pot;
    ElementBasis basis;
};

/// Assemble mass and stiffness-plus-potential matrices. Element integrals use
/// Gauss-Legendre with order+1 points, which is exact for the mass and
/// stiffness terms and standard quadrature for the potential term.
inline FemMatrices assemble_fem(const Mesh& mesh, const Potential& pot)
{
    const int p = mesh.order;
    const int np = p + 1;
    const int n = static_cast<int>(mesh.n_nodes());
    FemMatrices fm{Banded<double>(n, p, p), Banded<double>(n, p, p), ElementBasis::make(mesh, np)};
    const double h = mesh.element_width();
    const double jac = 0.5 * h;

    std::vector<double> me(static_cast<std::size_t>(np) * np);
    std::vector<double> ae(static_cast<std::size_t>(np) * np);
    for (int e = 0; e < mesh.n_elements; ++e) {
        std::fill(me.begin(), me.end(), 0.0);
        std::fill(ae.begin(), ae.end(), 0.0);
        const double xl = mesh.x_minus + e * h;
        for (int q = 0; q < np; ++q) {
            const double wq = fm.basis.rule.w[static_cast<std::size_t>(q)];
            const double x = xl + jac * (fm.basis.rule.x[static_cast<std::size_t>(q)] + 1.0);
            const double v = pot(x);
            const double* phi = &fm.basis.phi[static_cast<std::size_t>(q) * np];
            const double* dphi = &fm.basis.dphi[static_cast<std::size_t>(q) * np];
            for (int i = 0; i < np; ++i) {
                for (int j = 0; j <= i; ++j) {
                    me[static_cast<std::size_t>(i) * np + j] += wq * phi[i] * phi[j] * jac;
                    ae[static_cast<std::size_t>(i) * np + j] +=
                        wq * (dphi[i] * dphi[j] / jac + v * phi[i] * phi[j] * jac);
                }
            }
        }
        for (int i = 0; i < np; ++i) {
            for (int j = 0; j <= i; ++j) {
                const int gi = static_cast<int>(mesh.global_index(e, i));
                const int gj = static_cast<int>(mesh.global_index(e, j));
                fm.mass.add(gi, gj, me[static_cast<std::size_t>(i) * np + j]);
                fm.stiff_pot.add(gi, gj, ae[static_cast<std::size_t>(i) * np + j]);
                if (gi != gj) {
                    fm.mass.add(gj, gi, me[static_cast<std::size_t>(i) * np + j]);
                    fm.stiff_pot.add(gj, gi, ae[static_cast<std::size_t>(i) * np + j]);
                }
            }
        }
    }
    return fm;
}

/// Interpolate a scalar complex function at the mesh nodes.
inline std::vector<cplx> interpolate_nodal(const Mesh& mesh, const std::function<cplx(double)>& f)
{
    std::vector<cplx> v(mesh.n_nodes());
    for (std::size_t i = 0; i < mesh.n_nodes(); ++i) v[i] = f(mesh.nodes[i]);
    return v;
}

/// Build a complex banded combination c_a * A + c_m * M (same band layout).
inline Banded<cplx> combine_banded(const Banded<double>& A, cplx c_a, const Banded<double>& M, cplx c_m)
{
    Banded<cplx> out(A.n, A.kl, A.ku);
    for (int j = 0; j < A.n; ++j) {
        const int ilo = std::max(0, j - A.ku);
        const int ihi = std::min(A.n - 1, j + A.kl);
        for (int i = ilo; i <= ihi; ++i) {
            out.at(i, j) = c_a * A.at(i, j) + c_m * M.at(i, j);
        }
    }
    return out;
}

/// Apply a real banded matrix to a complex vector.
inline std::vector<cplx> banded_matvec(const Banded<double>& A, const std::vector<cplx>& x)
{
    std::vector<cplx> y(static_cast<std::size_t>(A.n), cplx{});
    for (int j = 0; j < A.n; ++j) {
        const int ilo = std::max(0, j - A.ku);
        const int ihi = std::min(A.n - 1, j + A.kl);
        const cplx xj = x[static_cast<std::size_t>(j)];
        for (int i = ilo; i <= ihi; ++i) {
            y[static_cast<std::size_t>(i)] += A.at(i, j) * xj;
        }
    }
    return y;
}

/// y = (c_a*A + c_m*M) x without forming the combined matrix.
inline std::vector<cplx> apply_combined(const Banded<double>& A, cplx c_a, const Banded<double>& M,
                                        cplx c_m, const std::vector<cplx>& x)
{
    std::vector<cplx> y(static_cast<std::size_t>(A.n), cplx{});
    for (int j = 0; j < A.n; ++j) {
        const int ilo = std::max(0, j - A.ku);
        const int ihi = std::min(A.n - 1, j + A.kl);
        const cplx xj = x[static_cast<std::size_t>(j)];
        for (int i = ilo; i <= ihi; ++i) {
            y[static_cast<std::size_t>(i)] += (c_a * A.at(i, j) + c_m * M.at(i, j)) * xj;
        }
    }
    return y;
}

/// L2 norm over the mesh by element-wise Gauss quadrature of the interpolant.
inline double l2_norm(const Mesh& mesh, const std::vector<cplx>& u)
{
    const int p = mesh.order;
    const int np = p + 1;
    const ElementBasis basis = ElementBasis::make(mesh, np + 1);
    const double jac = 0.5 * mesh.element_width();
    double acc = 0.0;
    const int nq = static_cast<int>(basis.rule.x.size());
    for (int e = 0; e < mesh.n_elements; ++e) {
        for (int q = 0; q < nq; ++q) {
            cplx val = 0.0;
            for (int i = 0; i < np; ++i) {
                val += basis.phi[static_cast<std::size_t>(q) * np + i] * u[mesh.global_index(e, i)];
            }
            acc += basis.rule.w[static_cast<std::size_t>(q)] * std::norm(val) * jac;
        }
    }
    return std::sqrt(acc);
}

inline double l2_norm(const Mesh& mesh, const WaveField& u) { return l2_norm(mesh, u.values); }

}  // namespace twabc
