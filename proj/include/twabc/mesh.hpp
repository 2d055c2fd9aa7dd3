#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "twabc/complex_math.hpp"

namespace twabc {

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
    std::vector<double> x;
    std::vector<double> w;
};

/// Nodes/weights by Newton iteration on P_n; accurate to machine precision for
/// the small n used here (element quadrature and panel quadrature).
inline GaussRule gauss_legendre(int n)
{
    if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
    GaussRule rule;
    rule.x.resize(static_cast<std::size_t>(n));
    rule.w.resize(static_cast<std::size_t>(n));
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            // Legendre recurrence for P_n(x) and P_n'(x)
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.x[static_cast<std::size_t>(i)] = -x;
        rule.x[static_cast<std::size_t>(n - 1 - i)] = x;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.w[static_cast<std::size_t>(i)] = w;
        rule.w[static_cast<std::size_t>(n - 1 - i)] = w;
    }
    if (n % 2 == 1) rule.x[static_cast<std::size_t>(n / 2)] = 0.0;
    return rule;
}

/// Gauss-Lobatto-Legendre points on [-1, 1] (p+1 points for element order p).
inline std::vector<double> gauss_lobatto_points(int p)
{
    if (p < 1) throw std::invalid_argument("gauss_lobatto_points: order must be >= 1");
    const int n = p + 1;
    std::vector<double> pts(static_cast<std::size_t>(n));
    pts.front() = -1.0;
    pts.back() = 1.0;
    // Interior points are the roots of P_p'(x); Newton from Chebyshev guesses,
    // using d/dx[(1-x^2) P_p'] = -p(p+1) P_p.
    for (int i = 1; i < n - 1; ++i) {
        double x = -std::cos(pi * i / p);
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= p; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            const double dp = p * (x * p1 - p0) / (x * x - 1.0);
            const double f = (1.0 - x * x) * dp;
            const double df = -static_cast<double>(p) * (p + 1.0) * p1;
            const double dx = f / df;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        pts[static_cast<std::size_t>(i)] = x;
    }
    return pts;
}

/// Barycentric weights for a Lagrange basis on the given points.
inline std::vector<double> barycentric_weights(const std::vector<double>& pts)
{
    const std::size_t n = pts.size();
    std::vector<double> w(n, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) w[i] /= (pts[i] - pts[j]);
        }
    }
    return w;
}

/// Uniform-element mesh on [x_minus, x_plus] with Lagrange elements of order
/// `order`; nodes are Gauss-Lobatto within each element. Node count is
/// n_elements*order + 1 (shared element endpoints).
struct Mesh {
    double x_minus = -5.0;
    double x_plus = 5.0;
    int n_elements = 256;
    int order = 4;
    std::vector<double> nodes;      // global, strictly increasing
    std::vector<double> ref_nodes;  // GLL points on [-1, 1]
    std::vector<double> bary;       // barycentric weights of ref_nodes

    static Mesh uniform(double x_minus, double x_plus, int n_elements, int order)
    {
        if (!(x_minus < x_plus)) throw std::invalid_argument("Mesh: x_minus must be < x_plus");
        if (n_elements < 1) throw std::invalid_argument("Mesh: n_elements must be >= 1");
        if (order < 1) throw std::invalid_argument("Mesh: order must be >= 1");
        Mesh m;
        m.x_minus = x_minus;
        m.x_plus = x_plus;
        m.n_elements = n_elements;
        m.order = order;
        m.ref_nodes = gauss_lobatto_points(order);
        m.bary = barycentric_weights(m.ref_nodes);
        const std::size_t n_nodes = static_cast<std::size_t>(n_elements) * order + 1;
        m.nodes.resize(n_nodes);
        const double h = (x_plus - x_minus) / n_elements;
        for (int e = 0; e < n_elements; ++e) {
            const double xl = x_minus + e * h;
            for (int i = 0; i <= order; ++i) {
                m.nodes[static_cast<std::size_t>(e) * order + i] = xl + 0.5 * h * (m.ref_nodes[static_cast<std::size_t>(i)] + 1.0);
            }
        }
        m.nodes.front() = x_minus;
        m.nodes.back() = x_plus;
        return m;
    }

    std::size_t n_nodes() const { return nodes.size(); }
    double element_width() const { return (x_plus - x_minus) / n_elements; }
    std::size_t global_index(int element, int local) const
    {
        return static_cast<std::size_t>(element) * order + static_cast<std::size_t>(local);
    }
};

/// Complex nodal values of the wave function at one instant.
struct WaveField {
    double time = 0.0;
    std::vector<cplx> values;
};

/// Evaluate the Lagrange basis (all order+1 functions) at reference coordinate
/// xi using the barycentric form.
inline void lagrange_basis(const Mesh& mesh, double xi, std::vector<double>& phi)
{
    const std::size_t n = mesh.ref_nodes.size();
    phi.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (xi == mesh.ref_nodes[i]) {
            phi[i] = 1.0;
            return;
        }
    }
    double denom = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        phi[i] = mesh.bary[i] / (xi - mesh.ref_nodes[i]);
        denom += phi[i];
    }
    for (std::size_t i = 0; i < n; ++i) phi[i] /= denom;
}

/// Evaluate a nodal field at an arbitrary point inside the mesh domain.
inline cplx eval_field(const Mesh& mesh, const std::vector<cplx>& values, double x)
{
    if (values.size() != mesh.n_nodes()) {
        throw std::invalid_argument("eval_field: nodal vector does not match mesh");
    }
    const double h = mesh.element_width();
    int e = static_cast<int>(std::floor((x - mesh.x_minus) / h));
    e = std::max(0, std::min(mesh.n_elements - 1, e));
    const double xl = mesh.x_minus + e * h;
    const double xi = 2.0 * (x - xl) / h - 1.0;
    std::vector<double> phi;
    lagrange_basis(mesh, xi, phi);
    cplx out = 0.0;
    for (int i = 0; i <= mesh.order; ++i) {
        out += phi[static_cast<std::size_t>(i)] * values[mesh.global_index(e, i)];
    }
    return out;
}

/// Interpolate a nodal field from one mesh onto the nodes of another. The
/// destination domain must be contained in the source domain.
inline std::vector<cplx> interpolate_onto(const Mesh& src, const std::vector<cplx>& values,
                                          const Mesh& dst)
{
    std::vector<cplx> out(dst.n_nodes());
    for (std::size_t i = 0; i < dst.n_nodes(); ++i) {
        out[i] = eval_field(src, values, dst.nodes[i]);
    }
    return out;
}

}  // namespace twabc
