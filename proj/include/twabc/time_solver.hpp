#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "twabc/banded.hpp"
#include "twabc/complex_math.hpp"
#include "twabc/fem.hpp"
#include "twabc/halfderiv.hpp"
#include "twabc/mesh.hpp"
#include "twabc/potential.hpp"
#include "twabc/rational.hpp"
#include "twabc/reference.hpp"

namespace twabc {

struct TimeConfig {
    double dt = 1e-4;
    double T = 1.0;
    std::vector<double> snapshot_times;
    // Trapezoidal-averaged ABC rows (default; second order in dt) or rows
    // fully at the new time level (first order at the boundary).
    bool averaged_bc = true;
    enum class Convolution { Fast, Direct };
    Convolution convolution = Convolution::Fast;
    double soe_target = 1e-10;
    int error_stride = 10;
    double norm_growth_flag = 1.01;
    double boundary_warn = 1e-4;
};

namespace detail {

/// One half-derivative input stream (boundary value of u, or one auxiliary w),
/// in fast (sum-of-exponentials) or direct (full history) form. advance()
/// returns H with D^{1/2}v(t_next) = c0 v_next + H, then exactly one commit()
/// pushes the realized sample.
struct HdStream {
    bool fast = true;
    ConvolutionState conv;
    std::vector<cplx> history;

    explicit HdStream(bool fast_mode, std::size_t n_terms)
        : fast(fast_mode), conv(fast_mode ? n_terms : 0)
    {
    }

    cplx advance(double c0, const SumOfExponentials& soe, const std::vector<double>& beta)
    {
        if (fast) {
            const cplx sum = convolution_advance(conv, soe);
            return c0 * (sum - conv.v_last);
        }
        const long n_new = static_cast<long>(history.size());
        cplx sum = 0.0;
        for (long m = 2; m <= n_new; ++m) {
            const double b = beta[static_cast<std::size_t>(m / 2)];
            const double a = (m % 2 == 0) ? b : -b;
            sum += a * history[static_cast<std::size_t>(n_new - m)];
        }
        const cplx v_last = history.empty() ? cplx(0.0) : history.back();
        return c0 * (sum - v_last);
    }

    void commit(const cplx& v)
    {
        if (fast) {
            convolution_commit(conv, v);
        } else {
            history.push_back(v);
        }
    }
};

}  // namespace detail

/// Per-boundary ABC state: the fitted rational DtN data, the half-derivative
/// stream of the boundary value, one stream per pole for the auxiliary
/// variables w_n, and their current values.
struct AbcState {
    Side side = Side::Right;
    RationalDtN rational;
    std::vector<cplx> w_values;
    cplx last_ux = 0.0;
    std::vector<detail::HdStream> streams;  // [0] = u, [1..d] = w_n
    std::vector<cplx> pending_hw;           // per-pole history terms of the step in flight
};

struct TimeRunResult {
    std::vector<WaveField> snapshots;
    std::vector<double> error_times;
    std::vector<double> rel_l2;  // vs the reference provider, when given
    std::vector<double> trace_times;
    std::vector<cplx> trace_left;
    std::vector<cplx> trace_right;
    double max_norm_ratio = 1.0;
    bool norm_flagged = false;
    std::vector<std::string> warnings;
};

/// Crank-Nicolson stepper on the interior domain with pole-residue absorbing
/// rows. The auxiliary equations are eliminated at the new time level, which
/// makes the boundary contribution a constant complex Robin coefficient
/// R = -/+ E + sum alpha/(E + beta), E = e^{-i pi/4} sqrt(2/dt), plus a
/// history forcing recomputed every step; the step matrix is factored once.
class TimeStepper {
public:
    TimeStepper(const Mesh& mesh, const Potential& pot, const RationalDtN& left,
                const RationalDtN& right, const TimeConfig& cfg)
        : mesh_(mesh), cfg_(cfg), fem_(assemble_fem(mesh, pot))
    {
        if (!(cfg.dt > 0.0)) throw std::invalid_argument("TimeStepper: dt must be > 0");
        c0_ = std::sqrt(2.0 / cfg.dt);
        e_factor_ = exp_m_i_pi_4 * c0_;
        n_steps_total_ = std::lround(cfg.T / cfg.dt);
        if (cfg.convolution == TimeConfig::Convolution::Fast) {
            soe_ = soe_fit(std::max(2L, n_steps_total_ / 2 + 2), cfg.soe_target);
        }
        beta_table_ = beta_coeffs(n_steps_total_ / 2 + 2);

        abc_left_ = make_state(Side::Left, left);
        abc_right_ = make_state(Side::Right, right);

        const int n = static_cast<int>(mesh.n_nodes());
        Banded<cplx> b = combine_banded(fem_.stiff_pot, -0.5, fem_.mass, cplx(0.0, 1.0) / cfg.dt);
        const double bc_scale = cfg.averaged_bc ? 0.5 : 1.0;
        b.at(n - 1, n - 1) += bc_scale * robin_coefficient(abc_right_);
        b.at(0, 0) -= bc_scale * robin_coefficient(abc_left_);
        b_matrix_ = std::move(b);
        lu_ = std::make_unique<BandedLU<cplx>>(b_matrix_);
        field_.values.assign(static_cast<std::size_t>(n), 0.0);
    }

    void set_initial(const std::vector<cplx>& u0_nodal)
    {
        if (u0_nodal.size() != mesh_.n_nodes()) throw std::invalid_argument("set_initial: size mismatch");
        field_.values = u0_nodal;
        field_.time = 0.0;
        step_count_ = 0;
        norm0_ = l2_norm(mesh_, field_.values);
        init_state(abc_left_, u0_nodal.front());
        init_state(abc_right_, u0_nodal.back());
    }

    cplx robin_coefficient(const AbcState& st) const
    {
        cplx r = st.side == Side::Right ? -e_factor_ : e_factor_;
        for (std::size_t n = 0; n < st.rational.poles.size(); ++n) {
            r += st.rational.residues[n] / (e_factor_ + st.rational.poles[n]);
        }
        return r;
    }

    void step()
    {
        const int n = static_cast<int>(mesh_.n_nodes());
        std::vector<cplx> rhs =
            apply_combined(fem_.stiff_pot, 0.5, fem_.mass, cplx(0.0, 1.0) / cfg_.dt, field_.values);

        const cplx h_left = boundary_history(abc_left_);
        const cplx h_right = boundary_history(abc_right_);
        if (cfg_.averaged_bc) {
            rhs[static_cast<std::size_t>(n - 1)] -= 0.5 * (h_right + abc_right_.last_ux);
            rhs[0] += 0.5 * (h_left + abc_left_.last_ux);
        } else {
            rhs[static_cast<std::size_t>(n - 1)] -= h_right;
            rhs[0] += h_left;
        }

        field_.values = lu_->solve_refined(b_matrix_, rhs);
        ++step_count_;
        field_.time = cfg_.dt * static_cast<double>(step_count_);

        advance_state(abc_left_, field_.values.front(), h_left);
        advance_state(abc_right_, field_.values.back(), h_right);
    }

    const WaveField& field() const { return field_; }
    const Mesh& mesh() const { return mesh_; }
    const AbcState& left() const { return abc_left_; }
    const AbcState& right() const { return abc_right_; }
    double initial_norm() const { return norm0_; }
    long total_steps() const { return n_steps_total_; }
    const SumOfExponentials& soe() const { return soe_; }

private:
    Mesh mesh_;
    TimeConfig cfg_;
    FemMatrices fem_;
    double c0_ = 0.0;
    cplx e_factor_;
    long n_steps_total_ = 0;
    SumOfExponentials soe_;
    std::vector<double> beta_table_;
    AbcState abc_left_;
    AbcState abc_right_;
    Banded<cplx> b_matrix_;
    std::unique_ptr<BandedLU<cplx>> lu_;
    WaveField field_;
    long step_count_ = 0;
    double norm0_ = 1.0;

    AbcState make_state(Side side, const RationalDtN& r) const
    {
        AbcState st;
        st.side = side;
        st.rational = r;
        st.w_values.assign(r.poles.size(), 0.0);
        const bool fast = cfg_.convolution == TimeConfig::Convolution::Fast;
        st.streams.assign(r.poles.size() + 1, detail::HdStream(fast, soe_.size()));
        return st;
    }

    void init_state(AbcState& st, const cplx& u_boundary)
    {
        st.w_values.assign(st.rational.poles.size(), 0.0);
        const bool fast = cfg_.convolution == TimeConfig::Convolution::Fast;
        st.streams.assign(st.rational.poles.size() + 1, detail::HdStream(fast, soe_.size()));
        st.streams[0].commit(u_boundary);
        for (std::size_t j = 1; j < st.streams.size(); ++j) st.streams[j].commit(0.0);
        st.last_ux = robin_coefficient(st) * u_boundary;
    }

    /// Known part h of u_x at the new level: u_x^{n+1} = R u_b^{n+1} + h.
    /// Advances all stream accumulators for the upcoming sample.
    cplx boundary_history(AbcState& st)
    {
        const double sign_half = st.side == Side::Right ? -1.0 : 1.0;
        const cplx h_u = st.streams[0].advance(c0_, soe_, beta_table_);
        cplx h = sign_half * exp_m_i_pi_4 * h_u;
        st.pending_hw.assign(st.rational.poles.size(), 0.0);
        for (std::size_t nix = 0; nix < st.rational.poles.size(); ++nix) {
            const cplx h_w = st.streams[nix + 1].advance(c0_, soe_, beta_table_);
            st.pending_hw[nix] = h_w;
            h -= st.rational.residues[nix] * exp_m_i_pi_4 * h_w /
                 (e_factor_ + st.rational.poles[nix]);
        }
        return h;
    }

    void advance_state(AbcState& st, const cplx& u_boundary, const cplx& h)
    {
        for (std::size_t nix = 0; nix < st.rational.poles.size(); ++nix) {
            st.w_values[nix] = (u_boundary - exp_m_i_pi_4 * st.pending_hw[nix]) /
                               (e_factor_ + st.rational.poles[nix]);
            st.streams[nix + 1].commit(st.w_values[nix]);
        }
        st.streams[0].commit(u_boundary);
        st.last_ux = robin_coefficient(st) * u_boundary + h;
    }
};

/// Run the time-domain method to T with the given per-side rational ABCs.
/// When a reference provider is supplied (same-mesh nodal values at time t),
/// a relative-L2 error series is recorded every error_stride steps.
inline TimeRunResult run_time_method(
    const Mesh& mesh, const Potential& pot, const std::vector<cplx>& u0_nodal,
    const RationalDtN& left, const RationalDtN& right, const TimeConfig& cfg,
    const std::function<std::vector<cplx>(double)>& reference_provider = nullptr)
{
    TimeRunResult out;
    TimeStepper stepper(mesh, pot, left, right, cfg);
    stepper.set_initial(u0_nodal);

    const double edge = std::max(std::abs(u0_nodal.front()), std::abs(u0_nodal.back()));
    if (edge > cfg.boundary_warn) {
        out.warnings.push_back("initial data is " + std::to_string(edge) +
                               " at a boundary; half-derivative accuracy assumes v(0)=v'(0)=0");
    }
    if (left.unstable_pole_warning || right.unstable_pole_warning) {
        out.warnings.push_back("rational ABC carries poles with negative real part");
    }

    const long n_steps = stepper.total_steps();
    std::size_t next_snap = 0;
    const auto record_snap = [&](double t_now) {
        while (next_snap < cfg.snapshot_times.size() &&
               cfg.snapshot_times[next_snap] <= t_now + 0.5 * cfg.dt) {
            WaveField snap = stepper.field();
            snap.time = cfg.snapshot_times[next_snap];
            out.snapshots.push_back(std::move(snap));
            ++next_snap;
        }
    };
    const auto record_err = [&](double t_now) {
        if (!reference_provider) return;
        const std::vector<cplx> ref = reference_provider(t_now);
        WaveField rf{t_now, ref};
        out.error_times.push_back(t_now);
        out.rel_l2.push_back(relative_l2_error(stepper.field(), rf, mesh));
    };

    record_snap(0.0);
    for (long s = 0; s < n_steps; ++s) {
        stepper.step();
        const double t = stepper.field().time;
        out.trace_times.push_back(t);
        out.trace_left.push_back(stepper.field().values.front());
        out.trace_right.push_back(stepper.field().values.back());
        const double ratio = l2_norm(mesh, stepper.field().values) / stepper.initial_norm();
        out.max_norm_ratio = std::max(out.max_norm_ratio, ratio);
        if ((s + 1) % cfg.error_stride == 0 || s + 1 == n_steps) record_err(t);
        record_snap(t);
    }
    if (out.max_norm_ratio > cfg.norm_growth_flag) {
        out.norm_flagged = true;
        out.warnings.push_back("norm grew to " + std::to_string(out.max_norm_ratio) +
                               " of the initial value");
    }
    return out;
}

}  // namespace twabc
