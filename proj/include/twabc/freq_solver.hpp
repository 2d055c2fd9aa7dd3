#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "twabc/banded.hpp"
#include "twabc/complex_math.hpp"
#include "twabc/fem.hpp"
#include "twabc/mesh.hpp"
#include "twabc/mfunction.hpp"
#include "twabc/potential.hpp"
#include "twabc/rational.hpp"

namespace twabc {

/// Frequency-domain method controls. The quadrature grid is uniform over
/// [-f_cutoff, f_cutoff] with an odd point count (composite Simpson).
struct FreqConfig {
    double sigma = 1.0;
    double f_cutoff = 256.0;
    int n_quad = 8097;
    double filter_scale = 1.2;
    int filter_power = 20;
    std::vector<double> output_times;
    int threads = 1;
};

/// Low-pass filter of the truncated inverse transform:
/// chi(f) = exp(-(scale*f/f_c)^power).
inline double filter_chi(double f, double f_c, double scale = 1.2, int power = 20)
{
    if (!(f_c > 0.0)) throw std::invalid_argument("filter_chi: f_c must be > 0");
    return std::exp(-std::pow(scale * f / f_c, power));
}

/// Laplace-transformed fields on the full frequency grid (node-major per
/// frequency column). Practical only at desk scale; the end-to-end driver
/// accumulates snapshots streaming instead.
struct FreqSolution {
    std::vector<double> f_grid;
    std::size_t n_nodes = 0;
    std::vector<cplx> u_hat;  // column j at [j*n_nodes, (j+1)*n_nodes)

    const cplx* column(std::size_t j) const { return u_hat.data() + j * n_nodes; }
};

struct BvpSystem {
    Banded<cplx> matrix;
    std::vector<cplx> rhs;
};

/// Galerkin system of the Laplace-transformed equation
///   -u'' + V u - i s u = -i u0   on [x_-, x_+],
/// with Robin rows from u_x(x_-) = m_left u(x_-), u_x(x_+) = m_right u(x_+).
inline BvpSystem assemble_bvp_from(const FemMatrices& fem, const cplx& s,
                                   const std::vector<cplx>& u0_nodal, cplx m_left, cplx m_right)
{
    const int n = fem.mass.n;
    BvpSystem sys{combine_banded(fem.stiff_pot, 1.0, fem.mass, -cplx(0.0, 1.0) * s), {}};
    // boundary terms of the weak form: -[u_x phi] with u_x = m u
    sys.matrix.at(n - 1, n - 1) -= m_right;
    sys.matrix.at(0, 0) += m_left;
    std::vector<cplx> mu = banded_matvec(fem.mass, u0_nodal);
    sys.rhs.resize(mu.size());
    for (std::size_t i = 0; i < mu.size(); ++i) sys.rhs[i] = -cplx(0.0, 1.0) * mu[i];
    return sys;
}

/// Convenience overload that assembles the FEM operators in place.
inline BvpSystem assemble_bvp(const Mesh& mesh, const Potential& pot, const cplx& s,
                              const WaveField& u0, cplx m_left, cplx m_right)
{
    if (u0.values.size() != mesh.n_nodes()) {
        throw std::invalid_argument("assemble_bvp: u0 not sampled on mesh nodes");
    }
    const FemMatrices fem = assemble_fem(mesh, pot);
    return assemble_bvp_from(fem, s, u0.values, m_left, m_right);
}

namespace detail {

struct BvpSolveOutcome {
    std::vector<cplx> x;
    double rel_residual = 0.0;
};

inline BvpSolveOutcome solve_bvp_best_effort(const BvpSystem& sys)
{
    BandedLU<cplx> lu(sys.matrix);
    BvpSolveOutcome out;
    out.x = lu.solve_refined(sys.matrix, sys.rhs);
    double rnorm = 0.0, bnorm = 0.0;
    const std::vector<cplx> ax = sys.matrix.matvec(out.x);
    for (std::size_t i = 0; i < out.x.size(); ++i) {
        rnorm += std::norm(ax[i] - sys.rhs[i]);
        bnorm += std::norm(sys.rhs[i]);
    }
    out.rel_residual = bnorm > 0.0 ? std::sqrt(rnorm / bnorm) : std::sqrt(rnorm);
    return out;
}

}  // namespace detail

/// Banded LU solve of an assembled system, with a residual check.
inline std::vector<cplx> solve_bvp(const BvpSystem& sys)
{
    detail::BvpSolveOutcome out = detail::solve_bvp_best_effort(sys);
    if (!(out.rel_residual <= 1e-10)) {
        throw std::runtime_error("solve_bvp: residual above tolerance");
    }
    return std::move(out.x);
}

/// Simpson coefficient pattern 1,4,2,...,4,1 scaled by df/3.
inline std::vector<double> simpson_weights(int n_quad, double df)
{
    if (n_quad < 3 || n_quad % 2 == 0) {
        throw std::invalid_argument("simpson_weights: need an odd count >= 3");
    }
    std::vector<double> w(static_cast<std::size_t>(n_quad));
    for (int j = 0; j < n_quad; ++j) {
        double c = (j == 0 || j == n_quad - 1) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
        w[static_cast<std::size_t>(j)] = c * df / 3.0;
    }
    return w;
}

/// Filtered, truncated inverse Laplace transform of a stored frequency
/// solution at one time:
///   u(x,t) ~ (e^{sigma t}/2 pi) sum_j w_j chi(f_j) e^{i f_j t} u_hat(x, sigma + i f_j).
inline WaveField inverse_laplace(const FreqSolution& sol, double t, const FreqConfig& cfg)
{
    const std::size_t nf = sol.f_grid.size();
    if (nf < 3 || nf % 2 == 0) throw std::invalid_argument("inverse_laplace: need odd grid size >= 3");
    const double df = sol.f_grid[1] - sol.f_grid[0];
    for (std::size_t j = 1; j < nf; ++j) {
        if (std::abs((sol.f_grid[j] - sol.f_grid[j - 1]) - df) > 1e-9 * std::max(1.0, std::abs(df))) {
            throw std::invalid_argument("inverse_laplace: frequency grid is not uniform");
        }
    }
    const std::vector<double> sw = simpson_weights(static_cast<int>(nf), df);
    WaveField out;
    out.time = t;
    out.values.assign(sol.n_nodes, 0.0);
    for (std::size_t j = 0; j < nf; ++j) {
        const double f = sol.f_grid[j];
        const cplx coef = sw[j] * filter_chi(f, cfg.f_cutoff, cfg.filter_scale, cfg.filter_power) *
                          std::exp(cplx(0.0, f * t));
        const cplx* col = sol.column(j);
        for (std::size_t i = 0; i < sol.n_nodes; ++i) out.values[i] += coef * col[i];
    }
    const double amp = std::exp(cfg.sigma * t) / (2.0 * pi);
    for (auto& v : out.values) v *= amp;
    return out;
}

/// Supplies (m_left, m_right) at a transform point s.
using MProvider = std::function<std::pair<cplx, cplx>(const cplx& s)>;

struct FreqRunResult {
    std::vector<WaveField> snapshots;
    std::vector<std::pair<double, std::string>> failures;  // (f, message)
};

/// Steps 1-2 end to end: one Robin BVP per quadrature frequency, then the
/// filtered inverse transform at every output time. Snapshots accumulate in
/// ascending frequency order regardless of thread count, so results are
/// bit-reproducible for a fixed configuration.
inline FreqRunResult run_frequency_method(const FreqConfig& cfg, const Mesh& mesh,
                                          const Potential& pot, const WaveField& u0,
                                          const MProvider& m_provider)
{
    if (cfg.n_quad < 3 || cfg.n_quad % 2 == 0) {
        throw std::invalid_argument("run_frequency_method: n_quad must be odd and >= 3");
    }
    if (u0.values.size() != mesh.n_nodes()) {
        throw std::invalid_argument("run_frequency_method: u0 not sampled on mesh nodes");
    }
    const FemMatrices fem = assemble_fem(mesh, pot);
    const std::size_t n_nodes = mesh.n_nodes();
    const int nf = cfg.n_quad;
    const double df = 2.0 * cfg.f_cutoff / (nf - 1);
    const std::vector<double> sw = simpson_weights(nf, df);

    FreqRunResult result;
    result.snapshots.resize(cfg.output_times.size());
    for (std::size_t m = 0; m < cfg.output_times.size(); ++m) {
        result.snapshots[m].time = cfg.output_times[m];
        result.snapshots[m].values.assign(n_nodes, 0.0);
    }

    const int block = 64;
    const int n_threads = std::max(1, cfg.threads);
    std::vector<std::vector<cplx>> columns(static_cast<std::size_t>(block));
    std::vector<std::string> errors(static_cast<std::size_t>(block));

    // Failures are recorded per frequency; a column with a degraded residual
    // is still used (best effort) since dropping it would punch a hole in the
    // quadrature far worse than the solve defect.
    const auto solve_one = [&](int j, std::vector<cplx>& out, std::string& err) {
        const double f = -cfg.f_cutoff + df * j;
        const cplx s(cfg.sigma, f);
        try {
            const auto [ml, mr] = m_provider(s);
            const BvpSystem sys = assemble_bvp_from(fem, s, u0.values, ml, mr);
            detail::BvpSolveOutcome sol = detail::solve_bvp_best_effort(sys);
            out = std::move(sol.x);
            if (!(sol.rel_residual <= 1e-10)) {
                err = "residual " + std::to_string(sol.rel_residual) + " above tolerance";
            } else {
                err.clear();
            }
        } catch (const std::exception& e) {
            out.assign(n_nodes, 0.0);
            err = e.what();
        }
    };

    for (int j0 = 0; j0 < nf; j0 += block) {
        const int j1 = std::min(nf, j0 + block);
        if (n_threads == 1) {
            for (int j = j0; j < j1; ++j) {
                solve_one(j, columns[static_cast<std::size_t>(j - j0)], errors[static_cast<std::size_t>(j - j0)]);
            }
        } else {
            std::vector<std::thread> pool;
            for (int tid = 0; tid < n_threads; ++tid) {
                pool.emplace_back([&, tid]() {
                    for (int j = j0 + tid; j < j1; j += n_threads) {
                        solve_one(j, columns[static_cast<std::size_t>(j - j0)], errors[static_cast<std::size_t>(j - j0)]);
                    }
                });
            }
            for (auto& th : pool) th.join();
        }
        // deterministic reduction, ascending f
        for (int j = j0; j < j1; ++j) {
            const std::size_t jj = static_cast<std::size_t>(j - j0);
            const double f = -cfg.f_cutoff + df * j;
            if (!errors[jj].empty()) {
                result.failures.emplace_back(f, errors[jj]);
                continue;
            }
            const double chi = filter_chi(f, cfg.f_cutoff, cfg.filter_scale, cfg.filter_power);
            for (std::size_t m = 0; m < cfg.output_times.size(); ++m) {
                const double t = cfg.output_times[m];
                const cplx coef = sw[static_cast<std::size_t>(j)] * chi * std::exp(cplx(0.0, f * t));
                auto& acc = result.snapshots[m].values;
                const auto& col = columns[jj];
                for (std::size_t i = 0; i < n_nodes; ++i) acc[i] += coef * col[i];
            }
        }
        if (result.failures.size() > static_cast<std::size_t>(0.001 * nf) + 0) {
            throw std::runtime_error("run_frequency_method: more than 0.1% of frequency solves failed");
        }
    }
    for (std::size_t m = 0; m < cfg.output_times.size(); ++m) {
        const double amp = std::exp(cfg.sigma * cfg.output_times[m]) / (2.0 * pi);
        for (auto& v : result.snapshots[m].values) v *= amp;
    }
    return result;
}

/// Dense frequency sweep into a stored FreqSolution (desk scale only).
inline FreqSolution solve_frequency_sweep(const FreqConfig& cfg, const Mesh& mesh,
                                          const Potential& pot, const WaveField& u0,
                                          const MProvider& m_provider)
{
    const FemMatrices fem = assemble_fem(mesh, pot);
    FreqSolution sol;
    sol.n_nodes = mesh.n_nodes();
    const int nf = cfg.n_quad;
    const double df = 2.0 * cfg.f_cutoff / (nf - 1);
    sol.f_grid.resize(static_cast<std::size_t>(nf));
    sol.u_hat.assign(static_cast<std::size_t>(nf) * sol.n_nodes, 0.0);
    for (int j = 0; j < nf; ++j) {
        const double f = -cfg.f_cutoff + df * j;
        sol.f_grid[static_cast<std::size_t>(j)] = f;
        const cplx s(cfg.sigma, f);
        const auto [ml, mr] = m_provider(s);
        const BvpSystem sys = assemble_bvp_from(fem, s, u0.values, ml, mr);
        const std::vector<cplx> x = solve_bvp(sys);
        std::copy(x.begin(), x.end(), sol.u_hat.begin() + static_cast<std::ptrdiff_t>(j) * static_cast<std::ptrdiff_t>(sol.n_nodes));
    }
    return sol;
}

/// m-provider from the potential itself (closed form when available, Riccati
/// otherwise), at the domain boundaries.
inline MProvider exact_m_provider(const Potential& pot, const Mesh& mesh,
                                  const RiccatiConfig& riccati = {})
{
    return [pot, x_minus = mesh.x_minus, x_plus = mesh.x_plus, riccati](const cplx& s) {
        const cplx lambda = cplx(0.0, 1.0) * s;
        return std::make_pair(m_point(pot, x_minus, Side::Left, lambda, riccati),
                              m_point(pot, x_plus, Side::Right, lambda, riccati));
    };
}

/// m-provider from fitted rational approximants.
inline MProvider rational_m_provider(const RationalDtN& left, const RationalDtN& right)
{
    return [left, right](const cplx& s) {
        const cplx lambda = cplx(0.0, 1.0) * s;
        return std::make_pair(eval_approx_m(left, lambda), eval_approx_m(right, lambda));
    };
}

}  // namespace twabc
