#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "twabc/complex_math.hpp"
#include "twabc/mfunction.hpp"

namespace twabc {

/// Pole-residue approximation of the DtN remainder for one boundary:
/// m~(lambda) = -/+ sqrt+(-lambda) + sum_n residues[n] / (sqrt+(-lambda) + poles[n]).
struct RationalDtN {
    Side side = Side::Right;
    int degree = 0;
    std::vector<cplx> residues;
    std::vector<cplx> poles;
    double fit_error = 0.0;     // discretized value of the least-squares integral
    double tolerance = 0.0;     // eps0 the fit was asked to meet
    double contour_sigma = 1.0;
    double f_cutoff = 256.0;
    bool converged = false;          // fit_error <= tolerance when produced by auto_degree
    bool unstable_pole_warning = false;  // some pole has Re < 0
    int unpaired_flags = 0;          // non-real poles without a conjugate partner
    double herglotz_min_im = std::numeric_limits<double>::quiet_NaN();
};

struct FitPoint {
    cplx k;
    cplx g;
};

enum class WeightMode { DK, DLambda };

/// Remainder data g = m -/+ k for the least-squares fit; the sign is chosen so
/// g -> 0 along the contour on both sides.
inline std::vector<FitPoint> g_values(const std::vector<ContourSample>& samples)
{
    std::vector<FitPoint> pts;
    pts.reserve(samples.size());
    for (const auto& s : samples) {
        FitPoint p;
        p.k = s.k;
        p.g = s.side == Side::Right ? s.m_value + s.k : s.m_value - s.k;
        pts.push_back(p);
    }
    return pts;
}

/// Trapezoid weights of the contour measure: |dk| (default, the measure in the
/// least-squares integral) or |dlambda|.
inline std::vector<double> contour_weights(const std::vector<FitPoint>& pts,
                                           WeightMode mode = WeightMode::DK)
{
    const std::size_t n = pts.size();
    std::vector<double> w(n, 0.0);
    if (n < 2) {
        w.assign(n, 1.0);
        return w;
    }
    const auto coord = [&](std::size_t j) -> cplx {
        return mode == WeightMode::DK ? pts[j].k : -pts[j].k * pts[j].k;  // lambda = -k^2
    };
    for (std::size_t j = 0; j + 1 < n; ++j) {
        const double seg = std::abs(coord(j + 1) - coord(j));
        w[j] += 0.5 * seg;
        w[j + 1] += 0.5 * seg;
    }
    return w;
}

struct FitFailureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline cplx polyval(const std::vector<cplx>& coeffs_ascending, const cplx& z)
{
    cplx acc = 0.0;
    for (std::size_t i = coeffs_ascending.size(); i-- > 0;) {
        acc = acc * z + coeffs_ascending[i];
    }
    return acc;
}

/// Roots of a monic polynomial (ascending coefficients, leading 1 implied) via
/// a balanced companion matrix and a dense complex eigensolve.
inline std::vector<cplx> monic_roots(const std::vector<cplx>& low_coeffs)
{
    const int d = static_cast<int>(low_coeffs.size());
    if (d == 0) return {};
    Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(d, d);
    for (int i = 1; i < d; ++i) C(i, i - 1) = 1.0;
    for (int i = 0; i < d; ++i) C(i, d - 1) = -low_coeffs[static_cast<std::size_t>(i)];
    // Osborne balancing with powers of two
    for (int sweep = 0; sweep < 8; ++sweep) {
        bool changed = false;
        for (int i = 0; i < d; ++i) {
            double r = 0.0, c = 0.0;
            for (int j = 0; j < d; ++j) {
                if (j != i) {
                    r += std::abs(C(i, j));
                    c += std::abs(C(j, i));
                }
            }
            if (r == 0.0 || c == 0.0) continue;
            double f = 1.0;
            while (c < r / 2.0) {
                c *= 2.0;
                r /= 2.0;
                f *= 2.0;
            }
            while (c > r * 2.0) {
                c /= 2.0;
                r *= 2.0;
                f /= 2.0;
            }
            if (f != 1.0) {
                changed = true;
                C.col(i) *= f;
                C.row(i) /= f;
            }
        }
        if (!changed) break;
    }
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(C, false);
    if (es.info() != Eigen::Success) throw FitFailureError("pole_residue: eigensolver failed");
    std::vector<cplx> roots(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) roots[static_cast<std::size_t>(i)] = es.eigenvalues()(i);
    return roots;
}

struct PoleResidueSet {
    std::vector<cplx> residues;  // alpha_n
    std::vector<cplx> poles;     // beta_n, denominators k + beta_n
};

struct SkOutcome {
    PoleResidueSet pr;
    double eps = std::numeric_limits<double>::infinity();
    bool rank_warning = false;
};

inline double weighted_misfit(const std::vector<FitPoint>& pts, const std::vector<double>& w,
                              const PoleResidueSet& pr)
{
    double acc = 0.0;
    for (std::size_t j = 0; j < pts.size(); ++j) {
        cplx r = -pts[j].g;
        for (std::size_t n = 0; n < pr.poles.size(); ++n) {
            r += pr.residues[n] / (pts[j].k + pr.poles[n]);
        }
        acc += w[j] * std::norm(r);
    }
    return acc;
}

/// Levenberg-Marquardt refinement of the pole-residue parameters against the
/// true (non-linearized) weighted misfit. Accepts only improving steps, so the
/// misfit is non-increasing.
inline void lm_polish(const std::vector<FitPoint>& pts, const std::vector<double>& w,
                      PoleResidueSet& pr, double& eps, int max_iters = 80)
{
    const std::size_t n_pts = pts.size();
    const std::size_t d = pr.poles.size();
    if (d == 0) return;
    double lambda = 1e-6;
    Eigen::VectorXcd resid(static_cast<Eigen::Index>(n_pts));
    Eigen::MatrixXcd jac(static_cast<Eigen::Index>(n_pts), static_cast<Eigen::Index>(2 * d));
    for (int iter = 0; iter < max_iters; ++iter) {
        for (std::size_t j = 0; j < n_pts; ++j) {
            const double sw = std::sqrt(w[j]);
            cplx r = -pts[j].g;
            for (std::size_t n = 0; n < d; ++n) {
                const cplx den = pts[j].k + pr.poles[n];
                r += pr.residues[n] / den;
                jac(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(n)) = sw / den;
                jac(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(d + n)) =
                    -sw * pr.residues[n] / (den * den);
            }
            resid(static_cast<Eigen::Index>(j)) = sw * r;
        }
        const Eigen::MatrixXcd jtj = jac.adjoint() * jac;
        const Eigen::VectorXcd jtr = jac.adjoint() * resid;
        bool improved = false;
        for (int tries = 0; tries < 12 && !improved; ++tries) {
            Eigen::MatrixXcd A = jtj;
            for (Eigen::Index i = 0; i < A.rows(); ++i) {
                A(i, i) += lambda * (std::abs(jtj(i, i)) + 1e-300);
            }
            const Eigen::VectorXcd delta = A.ldlt().solve(-jtr);
            PoleResidueSet trial = pr;
            for (std::size_t n = 0; n < d; ++n) {
                trial.residues[n] += delta(static_cast<Eigen::Index>(n));
                trial.poles[n] += delta(static_cast<Eigen::Index>(d + n));
            }
            const double trial_eps = weighted_misfit(pts, w, trial);
            if (std::isfinite(trial_eps) && trial_eps < eps) {
                pr = trial;
                const double rel_gain = (eps - trial_eps) / std::max(eps, 1e-300);
                eps = trial_eps;
                improved = true;
                lambda = std::max(lambda * 0.3, 1e-12);
                if (rel_gain < 1e-13) return;
            } else {
                lambda *= 10.0;
                if (lambda > 1e14) return;
            }
        }
        if (!improved) return;
    }
}

/// One Sanathanan-Koerner pass: iteratively reweighted linear least squares
/// for P/Q with deg P + 1 = deg Q = d, Q monic, on the scaled variable
/// z = k/k_scale with QR-orthogonalized Vandermonde columns.
inline SkOutcome sk_fit(const std::vector<FitPoint>& pts, const std::vector<double>& w, int d,
                        int max_iters = 20)
{
    const std::size_t n_pts = pts.size();
    double k_scale = 0.0;
    for (const auto& p : pts) k_scale = std::max(k_scale, std::abs(p.k));
    if (k_scale == 0.0) k_scale = 1.0;

    std::vector<cplx> z(n_pts);
    for (std::size_t j = 0; j < n_pts; ++j) z[j] = pts[j].k / k_scale;

    std::vector<double> q_prev(n_pts, 1.0);
    SkOutcome out;
    std::vector<cplx> best_p, best_q;
    double best_lin = std::numeric_limits<double>::infinity();

    Eigen::MatrixXcd A(static_cast<Eigen::Index>(n_pts), 2 * d);
    Eigen::VectorXcd rhs(static_cast<Eigen::Index>(n_pts));
    for (int iter = 0; iter < max_iters; ++iter) {
        for (std::size_t j = 0; j < n_pts; ++j) {
            const double s = std::sqrt(w[j]) / q_prev[j];
            cplx zp = 1.0;
            for (int i = 0; i < d; ++i) {
                A(static_cast<Eigen::Index>(j), i) = s * zp;
                A(static_cast<Eigen::Index>(j), d + i) = -s * pts[j].g * zp;
                zp *= z[j];
            }
            rhs(static_cast<Eigen::Index>(j)) = s * pts[j].g * zp;  // zp == z^d, monic term
        }
        Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(A);
        if (qr.rank() < 2 * d) out.rank_warning = true;
        const Eigen::VectorXcd sol = qr.solve(rhs);

        std::vector<cplx> p_coeffs(static_cast<std::size_t>(d));
        std::vector<cplx> q_low(static_cast<std::size_t>(d));
        for (int i = 0; i < d; ++i) {
            p_coeffs[static_cast<std::size_t>(i)] = sol(i);
            q_low[static_cast<std::size_t>(i)] = sol(d + i);
        }
        // linearized residual with the new coefficients, old weights
        double lin = 0.0;
        for (std::size_t j = 0; j < n_pts; ++j) {
            std::vector<cplx> q_full = q_low;
            q_full.push_back(1.0);
            const cplx pv = polyval(p_coeffs, z[j]);
            const cplx qv = polyval(q_full, z[j]);
            lin += w[j] * std::norm((pv - pts[j].g * qv) / q_prev[j]);
        }
        if (lin < best_lin) {
            best_lin = lin;
            best_p = p_coeffs;
            best_q = q_low;
        }
        bool stalled = true;
        for (std::size_t j = 0; j < n_pts; ++j) {
            std::vector<cplx> q_full = q_low;
            q_full.push_back(1.0);
            const double qv = std::abs(polyval(q_full, z[j]));
            const double next = std::max(qv, 1e-12);
            if (std::abs(next - q_prev[j]) > 1e-12 * q_prev[j]) stalled = false;
            q_prev[j] = next;
        }
        if (stalled) break;
    }

    // pole-residue extraction in the scaled variable, mapped back to k
    const std::vector<cplx> roots = monic_roots(best_q);
    std::vector<cplx> q_full = best_q;
    q_full.push_back(1.0);
    std::vector<cplx> dq(static_cast<std::size_t>(d));
    for (int i = 1; i <= d; ++i) {
        dq[static_cast<std::size_t>(i - 1)] = static_cast<double>(i) * q_full[static_cast<std::size_t>(i)];
    }
    out.pr.poles.resize(static_cast<std::size_t>(d));
    out.pr.residues.resize(static_cast<std::size_t>(d));
    for (int n = 0; n < d; ++n) {
        const cplx r = roots[static_cast<std::size_t>(n)];
        const cplx denom = polyval(dq, r);
        if (std::abs(denom) < 1e-300) throw FitFailureError("sk_fit: derivative of Q vanished at a root");
        out.pr.poles[static_cast<std::size_t>(n)] = -k_scale * r;
        out.pr.residues[static_cast<std::size_t>(n)] = k_scale * polyval(best_p, r) / denom;
    }
    out.eps = weighted_misfit(pts, w, out.pr);
    return out;
}

}  // namespace detail

/// Companion-matrix pole-residue split of P/Q (ascending coefficients in k,
/// deg P < deg Q): P/Q = sum alpha_n / (k + beta_n).
inline void pole_residue(const std::vector<cplx>& p_coeffs, const std::vector<cplx>& q_coeffs,
                         std::vector<cplx>& residues, std::vector<cplx>& poles)
{
    if (q_coeffs.empty()) throw std::invalid_argument("pole_residue: empty denominator");
    const int d = static_cast<int>(q_coeffs.size()) - 1;
    residues.clear();
    poles.clear();
    if (d == 0) return;
    if (static_cast<int>(p_coeffs.size()) > d) {
        throw std::invalid_argument("pole_residue: numerator degree must be below denominator degree");
    }
    const cplx lead = q_coeffs.back();
    if (std::abs(lead) == 0.0) throw std::invalid_argument("pole_residue: zero leading coefficient");
    std::vector<cplx> q_low(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) q_low[static_cast<std::size_t>(i)] = q_coeffs[static_cast<std::size_t>(i)] / lead;
    const std::vector<cplx> roots = detail::monic_roots(q_low);

    double scale = 0.0;
    for (const auto& r : roots) scale = std::max(scale, std::abs(r));
    for (int i = 0; i < d; ++i) {
        for (int j = i + 1; j < d; ++j) {
            if (std::abs(roots[static_cast<std::size_t>(i)] - roots[static_cast<std::size_t>(j)]) <
                1e-10 * std::max(scale, 1.0)) {
                throw FitFailureError(
                    "pole_residue: near-multiple roots of Q; reduce the requested degree");
            }
        }
    }
    std::vector<cplx> dq(static_cast<std::size_t>(d));
    for (int i = 1; i <= d; ++i) {
        dq[static_cast<std::size_t>(i - 1)] = static_cast<double>(i) * q_coeffs[static_cast<std::size_t>(i)];
    }
    residues.resize(static_cast<std::size_t>(d));
    poles.resize(static_cast<std::size_t>(d));
    for (int n = 0; n < d; ++n) {
        const cplx r = roots[static_cast<std::size_t>(n)];
        poles[static_cast<std::size_t>(n)] = -r;
        residues[static_cast<std::size_t>(n)] = detail::polyval(p_coeffs, r) / detail::polyval(dq, r);
    }
}

/// Fit g by a d-pole rational function of k: Sanathanan-Koerner linearization
/// followed by Levenberg-Marquardt polish of the pole-residue form. fit_error
/// is the discretized least-squares integral sum_j w_j |R(k_j) - g_j|^2.
inline RationalDtN fit_rational(const std::vector<FitPoint>& points, int d,
                                const std::vector<double>& weights,
                                const RationalDtN* warm_start = nullptr)
{
    if (d < 0) throw std::invalid_argument("fit_rational: degree must be >= 0");
    if (points.size() < static_cast<std::size_t>(2 * d + 2)) {
        throw std::invalid_argument("fit_rational: need at least 2d + 2 points");
    }
    if (weights.size() != points.size()) {
        throw std::invalid_argument("fit_rational: weights size mismatch");
    }
    RationalDtN out;
    out.degree = d;
    if (d == 0) {
        detail::PoleResidueSet empty;
        out.fit_error = detail::weighted_misfit(points, weights, empty);
        return out;
    }

    detail::SkOutcome best;
    try {
        best = detail::sk_fit(points, weights, d);
        detail::lm_polish(points, weights, best.pr, best.eps);
    } catch (const FitFailureError&) {
        if (!warm_start) throw;
        best.eps = std::numeric_limits<double>::infinity();
    }

    if (warm_start && static_cast<int>(warm_start->poles.size()) <= d) {
        // extend the lower-degree solution with far-away zero-residue poles and
        // re-polish; guarantees the misfit cannot exceed the warm start's
        detail::SkOutcome warm;
        warm.pr.residues = warm_start->residues;
        warm.pr.poles = warm_start->poles;
        double k_scale = 0.0;
        for (const auto& p : points) k_scale = std::max(k_scale, std::abs(p.k));
        while (static_cast<int>(warm.pr.poles.size()) < d) {
            warm.pr.poles.push_back(cplx(3.0 * k_scale + static_cast<double>(warm.pr.poles.size()), 0.0));
            warm.pr.residues.push_back(0.0);
        }
        warm.eps = detail::weighted_misfit(points, weights, warm.pr);
        detail::lm_polish(points, weights, warm.pr, warm.eps);
        if (warm.eps < best.eps) best = warm;
    }
    if (!std::isfinite(best.eps)) throw FitFailureError("fit_rational: no usable candidate");

    out.residues = best.pr.residues;
    out.poles = best.pr.poles;
    out.fit_error = best.eps;
    for (const auto& b : out.poles) {
        if (b.real() < 0.0) out.unstable_pole_warning = true;
    }
    return out;
}

/// Degree selection: smallest d in [0, d_max] with fit_error <= eps0; each
/// degree is warm-started from the previous one so the misfit sequence is
/// non-increasing. If no degree converges, the best candidate is returned
/// flagged not-converged.
inline RationalDtN auto_degree(const std::vector<FitPoint>& points, double eps0, int d_max,
                               const std::vector<double>& weights)
{
    if (!(eps0 > 0.0)) throw std::invalid_argument("auto_degree: eps0 must be > 0");
    RationalDtN best;
    bool have_best = false;
    RationalDtN prev;
    bool have_prev = false;
    for (int d = 0; d <= d_max; ++d) {
        if (points.size() < static_cast<std::size_t>(2 * d + 2)) break;
        RationalDtN cand;
        try {
            cand = fit_rational(points, d, weights, have_prev ? &prev : nullptr);
        } catch (const FitFailureError&) {
            continue;
        }
        cand.tolerance = eps0;
        if (!have_best || cand.fit_error < best.fit_error) {
            best = cand;
            have_best = true;
        }
        if (cand.fit_error <= eps0) {
            cand.converged = true;
            return cand;
        }
        prev = cand;
        have_prev = true;
    }
    if (!have_best) throw FitFailureError("auto_degree: every degree failed");
    best.converged = false;
    return best;
}

/// Evaluate the rational DtN approximant at a spectral point.
inline cplx eval_approx_m(const RationalDtN& r, const cplx& lambda)
{
    const cplx k = principal_sqrt_neg(lambda);
    cplx m = r.side == Side::Right ? -k : k;
    for (std::size_t n = 0; n < r.poles.size(); ++n) {
        const cplx den = k + r.poles[n];
        if (std::abs(den) < 1e-12 * (1.0 + std::abs(r.poles[n]))) {
            throw std::domain_error("eval_approx_m: evaluation at a pole of the approximant");
        }
        m += r.residues[n] / den;
    }
    return m;
}

/// End-to-end fit controls for one boundary.
struct DtnFitConfig {
    double eps0 = 1e-8;
    int d_max = 40;
    double sigma = 1.0;
    double f_cutoff = 256.0;
    int n_points = 513;
    WeightMode weight_mode = WeightMode::DK;
    RiccatiConfig riccati{};
    // Augment the data with Schwarz-reflected samples (g(conj k) = conj g(k)
    // for real potentials); makes conjugate pole pairing automatic.
    bool symmetrize_contour = true;
};

inline RationalDtN enforce_conjugate_pairs(const RationalDtN& r, double tol);

/// Sample the m-function on the contour, fit the remainder, symmetrize the
/// pole set, and attach the Herglotz diagnostic (min over the contour of the
/// imaginary part of the approximant, sign-adjusted per side).
inline RationalDtN build_rational_dtn(const Potential& pot, Side side, double x_b,
                                      const DtnFitConfig& cfg = {})
{
    std::vector<double> f_grid(static_cast<std::size_t>(cfg.n_points));
    for (int j = 0; j < cfg.n_points; ++j) {
        f_grid[static_cast<std::size_t>(j)] =
            -cfg.f_cutoff + 2.0 * cfg.f_cutoff * static_cast<double>(j) / (cfg.n_points - 1);
    }
    const auto samples = m_contour(pot, x_b, side, cfg.sigma, f_grid, cfg.riccati);
    std::vector<FitPoint> points = g_values(samples);
    std::vector<double> weights = contour_weights(points, cfg.weight_mode);
    if (cfg.symmetrize_contour) {
        const std::size_t n = points.size();
        points.reserve(2 * n);
        weights.reserve(2 * n);
        for (std::size_t j = 0; j < n; ++j) {
            weights[j] *= 0.5;
            points.push_back({std::conj(points[j].k), std::conj(points[j].g)});
            weights.push_back(weights[j]);
        }
    }
    RationalDtN r = auto_degree(points, cfg.eps0, cfg.d_max, weights);
    r.side = side;
    r.contour_sigma = cfg.sigma;
    r.f_cutoff = cfg.f_cutoff;
    r = enforce_conjugate_pairs(r, 1e-6);
    double min_im = std::numeric_limits<double>::infinity();
    for (const auto& s : samples) {
        const cplx m = eval_approx_m(r, s.lambda);
        min_im = std::min(min_im, side == Side::Right ? m.imag() : -m.imag());
    }
    r.herglotz_min_im = min_im;
    return r;
}

/// Symmetrize non-real poles into exact conjugate pairs (greedy matching with
/// averaging); unpaired non-real poles beyond the tolerance are counted in
/// unpaired_flags and left alone.
inline RationalDtN enforce_conjugate_pairs(const RationalDtN& r, double tol = 1e-6)
{
    RationalDtN out = r;
    const std::size_t d = out.poles.size();
    std::vector<bool> done(d, false);
    out.unpaired_flags = 0;
    double scale = 1.0;
    for (const auto& b : out.poles) scale = std::max(scale, std::abs(b));
    const double real_tol = 1e-12 * scale;
    for (std::size_t i = 0; i < d; ++i) {
        if (done[i]) continue;
        if (std::abs(out.poles[i].imag()) <= real_tol) {
            done[i] = true;
            continue;
        }
        std::size_t match = d;
        double best = tol * scale;
        for (std::size_t j = 0; j < d; ++j) {
            if (j == i || done[j]) continue;
            const double dist = std::abs(out.poles[i] - std::conj(out.poles[j]));
            if (dist <= best) {
                best = dist;
                match = j;
            }
        }
        if (match == d) {
            done[i] = true;
            ++out.unpaired_flags;
            continue;
        }
        const cplx b = 0.5 * (out.poles[i] + std::conj(out.poles[match]));
        const cplx a = 0.5 * (out.residues[i] + std::conj(out.residues[match]));
        out.poles[i] = b;
        out.poles[match] = std::conj(b);
        out.residues[i] = a;
        out.residues[match] = std::conj(a);
        done[i] = done[match] = true;
    }
    return out;
}

}  // namespace twabc
