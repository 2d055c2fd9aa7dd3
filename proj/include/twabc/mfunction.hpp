#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "twabc/complex_math.hpp"
#include "twabc/potential.hpp"

namespace twabc {

enum class Side { Left, Right };

inline const char* side_name(Side s) { return s == Side::Left ? "left" : "right"; }

/// One spectral sample on the inversion contour lambda = i(sigma + i f).
struct ContourSample {
    cplx lambda;
    cplx k;  // principal_sqrt_neg(lambda)
    cplx m_value;
    Side side = Side::Right;
    double f = 0.0;
};

/// Controls for the Riccati integration of the m-function.
struct RiccatiConfig {
    enum class Init { FrozenCoefficient, FreeField };
    double x_far = 200.0;  // magnitude; sign is chosen per side
    double step = 1e-3;
    Init init = Init::FrozenCoefficient;
};

struct RiccatiBlowUpError : std::runtime_error {
    double x;
    explicit RiccatiBlowUpError(double where)
        : std::runtime_error("riccati_m: non-finite value at x = " + std::to_string(where)), x(where)
    {
    }
};

/// m-function of a constant potential: m_+ = -sqrt+(V0 - lambda). The left
/// m-function is the mirror image +sqrt+(V0 - lambda).
inline cplx m_constant(double v0, const cplx& lambda, Side side = Side::Right)
{
    const cplx root = std::sqrt(cplx(v0) - lambda);
    return side == Side::Right ? -root : root;
}

/// m-function of the harmonic oscillator V = x^2 at reference point 0,
/// right half line: -2 Gamma(3/4 - lambda/4) / Gamma(1/4 - lambda/4).
inline cplx m_harmonic(const cplx& lambda)
{
    return -2.0 * complex_gamma(0.75 - 0.25 * lambda) / complex_gamma(0.25 - 0.25 * lambda);
}

/// m-function of the Bargmann potential at reference point 0, right half line.
inline cplx m_bargmann(double beta, double gamma, const cplx& lambda)
{
    const cplx k = principal_sqrt_neg(lambda);
    return -k - (gamma * gamma - beta * beta) / (k + gamma);
}

/// Integrate the Riccati equation m' = -m^2 + V - lambda with classical RK4
/// from the far field toward the boundary x_b. The far-field value is the
/// frozen-coefficient root -/+sqrt+(V(x_far) - lambda) (or the free-field root
/// when requested); integration toward the boundary is the contracting
/// direction on either side.
inline cplx riccati_m(const Potential& pot, double x_b, Side side, const cplx& lambda,
                      const RiccatiConfig& cfg = {})
{
    const double x_far = side == Side::Right ? std::abs(cfg.x_far) : -std::abs(cfg.x_far);
    if (std::abs(x_far) <= std::abs(x_b)) {
        throw std::invalid_argument("riccati_m: |x_far| must exceed |x_b|");
    }
    const double v_far = cfg.init == RiccatiConfig::Init::FrozenCoefficient ? pot(x_far) : 0.0;
    const cplx root = std::sqrt(cplx(v_far) - lambda);
    cplx m = side == Side::Right ? -root : root;

    const double span = x_b - x_far;
    const long n_steps = std::max(1L, std::lround(std::ceil(std::abs(span) / cfg.step)));
    const double h = span / static_cast<double>(n_steps);
    const auto rhs = [&](double x, const cplx& mm) { return -mm * mm + (pot(x) - lambda); };

    double x = x_far;
    for (long s = 0; s < n_steps; ++s) {
        const cplx k1 = rhs(x, m);
        const cplx k2 = rhs(x + 0.5 * h, m + 0.5 * h * k1);
        const cplx k3 = rhs(x + 0.5 * h, m + 0.5 * h * k2);
        const cplx k4 = rhs(x + h, m + h * k3);
        m += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        x = x_far + static_cast<double>(s + 1) * h;
        if (!is_finite(m)) throw RiccatiBlowUpError(x);
    }
    return m;
}

/// Closed-form m-function for the potential at the given boundary, when one is
/// known; std::nullopt otherwise.
inline std::optional<cplx> closed_form_m(const Potential& pot, double x_b, Side side,
                                         const cplx& lambda)
{
    switch (pot.kind) {
        case Potential::Kind::Constant:
            return m_constant(pot.v0, lambda, side);
        case Potential::Kind::Bargmann:
            if (side == Side::Right && x_b == 0.0) return m_bargmann(pot.beta, pot.gamma, lambda);
            return std::nullopt;
        case Potential::Kind::Harmonic:
            if (x_b == 0.0) {
                // V(-x) = V(x), so the left m-function at 0 is -m_+(0, lambda)
                const cplx m = m_harmonic(lambda);
                return side == Side::Right ? m : -m;
            }
            return std::nullopt;
        default:
            return std::nullopt;
    }
}

/// Evaluate the m-function at one contour point, preferring the closed form.
inline cplx m_point(const Potential& pot, double x_b, Side side, const cplx& lambda,
                    const RiccatiConfig& cfg = {})
{
    if (const auto m = closed_form_m(pot, x_b, side, lambda)) return *m;
    return riccati_m(pot, x_b, side, lambda, cfg);
}

/// Batch evaluation on the contour lambda_j = i(sigma + i f_j) = -f_j + i sigma.
inline std::vector<ContourSample> m_contour(const Potential& pot, double x_b, Side side,
                                            double sigma, const std::vector<double>& f_grid,
                                            const RiccatiConfig& cfg = {})
{
    if (!(sigma > 0.0)) throw std::invalid_argument("m_contour: sigma must be > 0");
    std::vector<ContourSample> out;
    out.reserve(f_grid.size());
    for (const double f : f_grid) {
        const cplx lambda(-f, sigma);
        ContourSample s;
        s.lambda = lambda;
        s.k = principal_sqrt_neg(lambda);
        s.side = side;
        s.f = f;
        try {
            s.m_value = m_point(pot, x_b, side, lambda, cfg);
        } catch (const std::exception& e) {
            throw std::runtime_error("m_contour: failure at f = " + std::to_string(f) + ": " + e.what());
        }
        out.push_back(s);
    }
    return out;
}

struct MDiagnostics {
    int herglotz_violations = 0;
    std::optional<double> symmetry_residual;
};

/// Herglotz and symmetry checks on a contour sample set. For right-side
/// samples the absorbing condition is Im m_+ > 0; for left-side samples the
/// mirror condition Im m_- < 0 applies. The symmetry residual
/// |conj(m(lambda)) - m(conj lambda)| needs a re-evaluation of m at the
/// reflected point; it is reported only when an evaluator is supplied.
inline MDiagnostics m_diagnostics(const std::vector<ContourSample>& samples,
                                  const std::function<cplx(const cplx&)>& m_eval = nullptr)
{
    if (samples.empty()) throw std::invalid_argument("m_diagnostics: empty sample set");
    MDiagnostics d;
    for (const auto& s : samples) {
        const double im = s.side == Side::Right ? s.m_value.imag() : -s.m_value.imag();
        if (!(im > 0.0)) ++d.herglotz_violations;
    }
    if (m_eval) {
        double worst = 0.0;
        for (const auto& s : samples) {
            const cplx m_reflected = m_eval(std::conj(s.lambda));
            worst = std::max(worst, std::abs(std::conj(s.m_value) - m_reflected));
        }
        d.symmetry_residual = worst;
    }
    return d;
}

}  // namespace twabc
