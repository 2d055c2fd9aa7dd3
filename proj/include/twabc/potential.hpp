#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace twabc {

/// Real external potential V(x). Tagged value type; evaluation is branch-free
/// enough to sit inside Riccati/RK4 inner loops.
struct Potential {
    enum class Kind {
        Constant,         // V = v0
        Harmonic,         // V = x^2
        Bargmann,         // reflectionless family, parameters beta > 0, gamma >= 0
        CoulombLike,      // V = 1/sqrt(1+x^2)
        GaussianBarrier,  // V = height * exp(-width_coeff*(x-center)^2)
        Tabulated,        // piecewise linear, constant extension beyond the table
    };

    Kind kind = Kind::Constant;
    double v0 = 0.0;
    double beta = 1.0;
    double gamma = 0.0;
    double height = 0.0;
    double width_coeff = 1.0;
    double center = 0.0;
    std::vector<double> x_nodes;
    std::vector<double> values;

    static Potential free_particle() { return Potential{}; }

    static Potential constant(double value)
    {
        Potential p;
        p.kind = Kind::Constant;
        p.v0 = value;
        return p;
    }

    static Potential harmonic()
    {
        Potential p;
        p.kind = Kind::Harmonic;
        return p;
    }

    static Potential bargmann(double beta, double gamma)
    {
        if (!(beta > 0.0)) throw std::invalid_argument("Potential::bargmann: beta must be > 0");
        if (!(gamma >= 0.0)) throw std::invalid_argument("Potential::bargmann: gamma must be >= 0");
        Potential p;
        p.kind = Kind::Bargmann;
        p.beta = beta;
        p.gamma = gamma;
        return p;
    }

    static Potential coulomb_like()
    {
        Potential p;
        p.kind = Kind::CoulombLike;
        return p;
    }

    static Potential gaussian_barrier(double height, double width_coeff, double center)
    {
        Potential p;
        p.kind = Kind::GaussianBarrier;
        p.height = height;
        p.width_coeff = width_coeff;
        p.center = center;
        return p;
    }

    static Potential tabulated(std::vector<double> xs, std::vector<double> vs)
    {
        if (xs.size() != vs.size()) {
            throw std::invalid_argument("Potential::tabulated: x_nodes and values differ in length");
        }
        if (xs.size() < 2) {
            throw std::invalid_argument("Potential::tabulated: need at least two nodes");
        }
        for (std::size_t i = 1; i < xs.size(); ++i) {
            if (!(xs[i] > xs[i - 1])) {
                throw std::invalid_argument("Potential::tabulated: x_nodes must be strictly increasing");
            }
        }
        Potential p;
        p.kind = Kind::Tabulated;
        p.x_nodes = std::move(xs);
        p.values = std::move(vs);
        return p;
    }

    double operator()(double x) const
    {
        switch (kind) {
            case Kind::Constant:
                return v0;
            case Kind::Harmonic:
                return x * x;
            case Kind::Bargmann: {
                // V = -8 b^2 c e^{-2bx} / (1 + c e^{-2bx})^2 with c = (b-g)/(b+g),
                // computed as -8 b^2 / (w + 2 + 1/w), w = c e^{-2bx}; stable for
                // both tails and exact 0 when beta == gamma.
                const double c = (beta - gamma) / (beta + gamma);
                if (c == 0.0) return 0.0;
                const double w = c * std::exp(-2.0 * beta * x);
                if (w == 0.0) return 0.0;
                return -8.0 * beta * beta / (w + 2.0 + 1.0 / w);
            }
            case Kind::CoulombLike:
                return 1.0 / std::sqrt(1.0 + x * x);
            case Kind::GaussianBarrier: {
                const double d = x - center;
                return height * std::exp(-width_coeff * d * d);
            }
            case Kind::Tabulated: {
                if (x <= x_nodes.front()) return values.front();
                if (x >= x_nodes.back()) return values.back();
                const auto it = std::upper_bound(x_nodes.begin(), x_nodes.end(), x);
                const std::size_t hi = static_cast<std::size_t>(it - x_nodes.begin());
                const std::size_t lo = hi - 1;
                const double t = (x - x_nodes[lo]) / (x_nodes[hi] - x_nodes[lo]);
                return values[lo] + t * (values[hi] - values[lo]);
            }
        }
        return 0.0;  // unreachable
    }

    /// True when the closed-form m-function for this potential is available at
    /// the given reference point (right half line).
    bool has_closed_form_m() const
    {
        return kind == Kind::Constant || kind == Kind::Bargmann || kind == Kind::Harmonic;
    }
};

inline double eval_potential(const Potential& p, double x)
{
    return p(x);
}

/// Sample a potential into a Tabulated variant on a uniform grid.
inline Potential tabulate_potential(const Potential& p, double x_min, double x_max, int n_nodes)
{
    if (n_nodes < 2) throw std::invalid_argument("tabulate_potential: need n_nodes >= 2");
    std::vector<double> xs(static_cast<std::size_t>(n_nodes));
    std::vector<double> vs(static_cast<std::size_t>(n_nodes));
    for (int i = 0; i < n_nodes; ++i) {
        const double x = x_min + (x_max - x_min) * static_cast<double>(i) / (n_nodes - 1);
        xs[static_cast<std::size_t>(i)] = x;
        vs[static_cast<std::size_t>(i)] = p(x);
    }
    return Potential::tabulated(std::move(xs), std::move(vs));
}

}  // namespace twabc
