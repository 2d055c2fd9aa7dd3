#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "twabc/complex_math.hpp"
#include "twabc/mesh.hpp"

namespace twabc {

/// beta_k = (2k)! / (2^{2k} (k!)^2) for k = 0..K, by the stable recurrence
/// beta_0 = 1, beta_k = beta_{k-1} (2k-1)/(2k).
inline std::vector<double> beta_coeffs(long K)
{
    if (K < 0) throw std::invalid_argument("beta_coeffs: K must be >= 0");
    std::vector<double> b(static_cast<std::size_t>(K) + 1);
    b[0] = 1.0;
    for (long k = 1; k <= K; ++k) {
        b[static_cast<std::size_t>(k)] =
            b[static_cast<std::size_t>(k - 1)] * (2.0 * k - 1.0) / (2.0 * k);
    }
    return b;
}

/// Convolution weights alpha_m of the semi-discrete half-order derivative:
/// alpha_{2k} = beta_k, alpha_{2k+1} = -beta_k.
struct HalfDerivCoeffs {
    std::vector<double> alpha;
    std::vector<double> beta;

    static HalfDerivCoeffs make(long n_max)
    {
        HalfDerivCoeffs c;
        c.beta = beta_coeffs(n_max / 2 + 1);
        c.alpha.resize(static_cast<std::size_t>(n_max) + 1);
        for (long m = 0; m <= n_max; ++m) {
            const double b = c.beta[static_cast<std::size_t>(m / 2)];
            c.alpha[static_cast<std::size_t>(m)] = (m % 2 == 0) ? b : -b;
        }
        return c;
    }
};

/// Direct evaluation of the semi-discrete half-order derivative at t_n from
/// the full history v_0..v_n: sqrt(2/dt) * sum_m alpha_m v_{n-m}.
inline cplx half_derivative_direct(const std::vector<cplx>& history, double dt)
{
    if (history.empty()) throw std::invalid_argument("half_derivative_direct: empty history");
    if (!(dt > 0.0)) throw std::invalid_argument("half_derivative_direct: dt must be > 0");
    const long n = static_cast<long>(history.size()) - 1;
    const auto beta = beta_coeffs(n / 2 + 1);
    cplx acc = 0.0;
    for (long m = 0; m <= n; ++m) {
        const double b = beta[static_cast<std::size_t>(m / 2)];
        const double a = (m % 2 == 0) ? b : -b;
        acc += a * history[static_cast<std::size_t>(n - m)];
    }
    return std::sqrt(2.0 / dt) * acc;
}

/// Sum-of-exponentials approximation beta_k ~ sum_j w_j exp(-s_j k), certified
/// by a direct scan over k = 0..max_k.
struct SumOfExponentials {
    std::vector<double> weights;
    std::vector<double> rates;
    long max_k = 0;
    double certified_error = 0.0;

    std::size_t size() const { return weights.size(); }

    double eval(double k) const
    {
        double acc = 0.0;
        for (std::size_t j = 0; j < weights.size(); ++j) {
            acc += weights[j] * std::exp(-rates[j] * k);
        }
        return acc;
    }
};

/// Scan error max_k |beta_k - soe(k)| over k = 0..K.
inline double soe_scan_error(const SumOfExponentials& soe, long K)
{
    const auto beta = beta_coeffs(K);
    const std::size_t L = soe.size();
    std::vector<double> acc(L), ratio(L);
    for (std::size_t j = 0; j < L; ++j) {
        acc[j] = soe.weights[j];
        ratio[j] = std::exp(-soe.rates[j]);
    }
    double worst = 0.0;
    for (long k = 0; k <= K; ++k) {
        double s = 0.0;
        for (std::size_t j = 0; j < L; ++j) s += acc[j];
        worst = std::max(worst, std::abs(beta[static_cast<std::size_t>(k)] - s));
        for (std::size_t j = 0; j < L; ++j) acc[j] *= ratio[j];
    }
    return worst;
}

namespace detail {

/// Quadrature discretization of beta_k = (1/pi) \int_0^inf e^{-ks} f(s) ds with
/// f(s) = e^{-s/2}/sqrt(1-e^{-s}). Four regions, shaped by where the integrand
/// varies: a head panel [0, s_head] under the substitution s = r^2 (removes
/// the 1/sqrt(s) singularity), geometric panels while the local scale is ~s,
/// fixed-width panels once the e^{-s/2} decay dominates, and one wide tail
/// panel that only k = 0 still feels.
struct SoeQuadParams {
    int q_head = 9;
    int q_geom = 8;
    int q_unif = 8;
    int q_tail = 10;
    double ratio = 3.5;
    double width_cap = 9.0;
    double tail_width = 18.0;
};

inline SumOfExponentials soe_candidate(long K, double target_eps, const SoeQuadParams& p)
{
    const auto f = [](double s) {
        return std::exp(-0.5 * s) / (std::sqrt(-std::expm1(-s)) * pi);
    };
    SumOfExponentials soe;
    const double s_head = 2.0 / static_cast<double>(K);
    const double s_max = 2.0 * std::log(4.0 / (pi * target_eps)) + 2.0;
    {
        const GaussRule g = gauss_legendre(p.q_head);
        const double r_max = std::sqrt(s_head);
        for (int q = 0; q < p.q_head; ++q) {
            const double r = 0.5 * r_max * (g.x[static_cast<std::size_t>(q)] + 1.0);
            const double s = r * r;
            soe.rates.push_back(std::max(s, 1e-300));
            soe.weights.push_back(0.5 * r_max * g.w[static_cast<std::size_t>(q)] * f(s) * 2.0 * r);
        }
    }
    const GaussRule gg = gauss_legendre(p.q_geom);
    const GaussRule gu = gauss_legendre(p.q_unif);
    const GaussRule gt = gauss_legendre(p.q_tail);
    const double s_tail = std::max(s_head, s_max - p.tail_width);
    double a = s_head;
    while (a < s_tail) {
        const bool geometric = a * (p.ratio - 1.0) < p.width_cap;
        const double b = std::min(geometric ? a * p.ratio : a + p.width_cap, s_tail);
        const GaussRule& g = geometric ? gg : gu;
        for (std::size_t q = 0; q < g.x.size(); ++q) {
            const double s = 0.5 * (b - a) * (g.x[q] + 1.0) + a;
            soe.rates.push_back(s);
            soe.weights.push_back(0.5 * (b - a) * g.w[q] * f(s));
        }
        a = b;
    }
    for (int q = 0; q < p.q_tail; ++q) {
        const double s = 0.5 * (s_max - s_tail) * (gt.x[static_cast<std::size_t>(q)] + 1.0) + s_tail;
        soe.rates.push_back(s);
        soe.weights.push_back(0.5 * (s_max - s_tail) * gt.w[static_cast<std::size_t>(q)] * f(s));
    }
    soe.max_k = K;
    return soe;
}

}  // namespace detail

/// Build a sum of decaying exponentials matching beta_k on k = 0..K within
/// target_eps. The certification scan over all k <= K is the contract; the
/// quadrature is refined until the scan passes or the refinement budget is
/// exhausted, in which case the best candidate is returned with its achieved
/// error.
inline SumOfExponentials soe_fit(long K, double target_eps)
{
    if (K < 1) throw std::invalid_argument("soe_fit: K must be >= 1");
    if (!(target_eps > 0.0)) throw std::invalid_argument("soe_fit: target_eps must be > 0");
    if (K == 1) {
        // two equations, two unknowns: w e^{-s*0} = beta_0 = 1, w e^{-s} = beta_1 = 1/2
        SumOfExponentials soe;
        soe.weights = {1.0};
        soe.rates = {std::log(2.0)};
        soe.max_k = 1;
        soe.certified_error = soe_scan_error(soe, 1);
        return soe;
    }
    SumOfExponentials best;
    double best_err = std::numeric_limits<double>::infinity();
    detail::SoeQuadParams p;
    for (int attempt = 0; attempt < 5; ++attempt) {
        SumOfExponentials cand = detail::soe_candidate(K, target_eps, p);
        cand.certified_error = soe_scan_error(cand, K);
        if (cand.certified_error < best_err) {
            best_err = cand.certified_error;
            best = std::move(cand);
        }
        if (best_err <= target_eps) break;
        p.q_geom += 1;
        p.q_unif += 2;
        p.q_head += 2;
        p.q_tail += 2;
    }
    return best;
}

/// Per-boundary recursive state of the fast half-derivative: parity-split
/// accumulators for each exponential plus the last two raw samples.
struct ConvolutionState {
    std::vector<cplx> f_odd;
    std::vector<cplx> f_even;
    cplx v_last = 0.0;
    cplx v_prev = 0.0;
    long count = 0;  // number of committed samples

    explicit ConvolutionState(std::size_t n_terms = 0) : f_odd(n_terms, 0.0), f_even(n_terms, 0.0) {}
};

/// Advance the accumulators for the upcoming sample (index = count) and return
/// sum_{m=2}^{n} alpha~_m v_{n-m}. Must be followed by exactly one commit.
inline cplx convolution_advance(ConvolutionState& st, const SumOfExponentials& soe)
{
    const long n = st.count;
    if (n < 2) return 0.0;
    const std::size_t L = soe.size();
    cplx sum = 0.0;
    if (n % 2 == 0) {
        // n = 2k: F_even(k) = e^{-s}[w v_{2k-2} + F_even(k-1)]; history sum is
        // sum_j F_even(k) - sum_j F_odd(k-1)
        for (std::size_t j = 0; j < L; ++j) {
            const double e = std::exp(-soe.rates[j]);
            st.f_even[j] = e * (soe.weights[j] * st.v_prev + st.f_even[j]);
            sum += st.f_even[j] - st.f_odd[j];
        }
    } else {
        // n = 2k+1: F_odd(k) = e^{-s}[w v_{2k-1} + F_odd(k-1)]
        for (std::size_t j = 0; j < L; ++j) {
            const double e = std::exp(-soe.rates[j]);
            st.f_odd[j] = e * (soe.weights[j] * st.v_prev + st.f_odd[j]);
            sum += st.f_odd[j] - st.f_even[j];
        }
    }
    return sum;
}

inline void convolution_commit(ConvolutionState& st, const cplx& v_new)
{
    st.v_prev = st.v_last;
    st.v_last = v_new;
    ++st.count;
}

/// One step of the fast half-derivative: push v_n and return
/// sqrt(2/dt) [ (v_n - v_{n-1}) + sum_{m=2}^n alpha~_m v_{n-m} ], O(L) work.
inline std::pair<cplx, ConvolutionState> fast_half_derivative(const ConvolutionState& state,
                                                              const cplx& v_new, double dt,
                                                              const SumOfExponentials& soe)
{
    ConvolutionState st = state;
    const cplx hist = convolution_advance(st, soe);
    const cplx value = std::sqrt(2.0 / dt) * (v_new - st.v_last + hist);
    convolution_commit(st, v_new);
    return {value, st};
}

}  // namespace twabc
