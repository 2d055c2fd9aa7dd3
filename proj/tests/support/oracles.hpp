#pragma once

// Test-only oracles, independent of the implementation paths they check.

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "twabc/complex_math.hpp"
#include "twabc/mesh.hpp"
#include "twabc/reference.hpp"

namespace oracles {

using twabc::cplx;

/// Dense Gaussian elimination with partial pivoting (row-major square matrix).
inline std::vector<cplx> dense_solve(std::vector<std::vector<cplx>> a, std::vector<cplx> b)
{
    const std::size_t n = a.size();
    for (std::size_t j = 0; j < n; ++j) {
        std::size_t p = j;
        for (std::size_t i = j + 1; i < n; ++i) {
            if (std::abs(a[i][j]) > std::abs(a[p][j])) p = i;
        }
        std::swap(a[j], a[p]);
        std::swap(b[j], b[p]);
        for (std::size_t i = j + 1; i < n; ++i) {
            const cplx l = a[i][j] / a[j][j];
            for (std::size_t k = j; k < n; ++k) a[i][k] -= l * a[j][k];
            b[i] -= l * b[j];
        }
    }
    std::vector<cplx> x(n);
    for (std::size_t j = n; j-- > 0;) {
        cplx acc = b[j];
        for (std::size_t k = j + 1; k < n; ++k) acc -= a[j][k] * x[k];
        x[j] = acc / a[j][j];
    }
    return x;
}

/// Numerical Laplace transform of the closed-form free solution at one point:
/// u_hat(x, s) = int_0^inf u_exa(x,t) e^{-st} dt, by panelled Gauss-Legendre.
inline cplx laplace_of_exact_free(double x, const cplx& s, double t_max = 60.0)
{
    const twabc::GaussRule g = twabc::gauss_legendre(16);
    const double panel = 1.0 / std::max(1.0, std::abs(s.imag()) / 3.0);
    cplx acc = 0.0;
    double a = 0.0;
    while (a < t_max) {
        const double b = std::min(t_max, a + panel);
        for (std::size_t q = 0; q < g.x.size(); ++q) {
            const double t = 0.5 * (b - a) * (g.x[q] + 1.0) + a;
            acc += 0.5 * (b - a) * g.w[q] * twabc::exact_free(x, t) * std::exp(-s * t);
        }
        a = b;
    }
    return acc;
}

/// Exact beta_k = C(2k, k) / 4^k from 128-bit integer factorial ratios
/// (valid for the small k the tests use).
inline double beta_exact_smallk(int k)
{
    __int128 num = 1;
    for (int i = 1; i <= 2 * k; ++i) num *= i;
    __int128 den = 1;
    for (int i = 1; i <= k; ++i) den *= i;
    den *= den;
    for (int i = 0; i < 2 * k; ++i) den *= 2;
    return static_cast<double>(static_cast<long double>(num) / static_cast<long double>(den));
}

/// Analytic half-order derivative of v(t) = t^2.
inline double half_derivative_of_t_squared(double t)
{
    return 8.0 / (3.0 * std::sqrt(twabc::pi)) * std::pow(t, 1.5);
}

inline std::mt19937& rng()
{
    static std::mt19937 gen(0x5eed1234u);
    return gen;
}

inline double uniform(double lo, double hi)
{
    return std::uniform_real_distribution<double>(lo, hi)(rng());
}

inline cplx random_unit_disk()
{
    for (;;) {
        const double re = uniform(-1.0, 1.0);
        const double im = uniform(-1.0, 1.0);
        if (re * re + im * im <= 1.0) return {re, im};
    }
}

}  // namespace oracles
