#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace twabc {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;

/// exp(-i*pi/4), the time-domain symbol factor of the half-order derivative.
inline const cplx exp_m_i_pi_4 = cplx(std::sqrt(0.5), -std::sqrt(0.5));

inline bool is_finite(const cplx& z)
{
    return std::isfinite(z.real()) && std::isfinite(z.imag());
}

/// Principal square root of -lambda, written sqrt+(-lambda) in the m-function
/// formulas. Branch cut on the negative real axis, Re >= 0; for lambda in the
/// upper half-plane the result lies in the open fourth quadrant, which makes
/// -sqrt+(-lambda) a Herglotz function.
inline cplx principal_sqrt_neg(const cplx& lambda)
{
    return std::sqrt(-lambda);
}

/// Complex gamma function, Lanczos approximation (g = 7, 9 coefficients) with
/// reflection for Re z < 1/2. Accurate to ~13 significant digits on the strip
/// |Im z| <= 50 away from poles.
inline cplx complex_gamma(const cplx& z)
{
    static const double lanczos_g = 7.0;
    static const double coeff[9] = {
        0.99999999999980993,
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    };

    if (z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real())) {
        throw std::domain_error("complex_gamma: pole at non-positive integer argument");
    }

    if (z.real() < 0.5) {
        // Reflection: Gamma(z) = pi / (sin(pi z) * Gamma(1 - z))
        return pi / (std::sin(pi * z) * complex_gamma(1.0 - z));
    }

    cplx zz = z - 1.0;
    cplx x = coeff[0];
    for (int i = 1; i < 9; ++i) {
        x += coeff[i] / (zz + static_cast<double>(i));
    }
    cplx t = zz + lanczos_g + 0.5;
    return std::sqrt(2.0 * pi) * std::pow(t, zz + 0.5) * std::exp(-t) * x;
}

}  // namespace twabc
