#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "twabc/config.hpp"
#include "twabc/io.hpp"

namespace twabc {

namespace detail {

inline double elapsed_since(const std::chrono::steady_clock::time_point& t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline std::string freq_params_comment(const RunConfig& c)
{
    return "sigma=" + fmt17(c.freq.sigma) + ", f_c=" + fmt17(c.freq.f_cutoff) +
           ", n_quad=" + std::to_string(c.freq.n_quad);
}

inline std::pair<RationalDtN, RationalDtN> fit_both_sides(const RunConfig& c)
{
    DtnFitConfig fc = c.abc;
    RationalDtN left = build_rational_dtn(c.potential, Side::Left, c.x_minus, fc);
    RationalDtN right = build_rational_dtn(c.potential, Side::Right, c.x_plus, fc);
    return {left, right};
}

}  // namespace detail

/// `mfunc`: m-function samples on the contour at both boundaries -> mfunc.csv.
inline int run_mfunc(const RunConfig& c, std::ostream& log)
{
    const auto t0 = std::chrono::steady_clock::now();
    std::filesystem::create_directories(c.out_dir);
    std::vector<double> f_grid(static_cast<std::size_t>(c.abc.n_points));
    for (int j = 0; j < c.abc.n_points; ++j) {
        f_grid[static_cast<std::size_t>(j)] =
            -c.abc.f_cutoff + 2.0 * c.abc.f_cutoff * static_cast<double>(j) / (c.abc.n_points - 1);
    }
    auto samples = m_contour(c.potential, c.x_plus, Side::Right, c.abc.sigma, f_grid, c.abc.riccati);
    const auto left = m_contour(c.potential, c.x_minus, Side::Left, c.abc.sigma, f_grid, c.abc.riccati);
    samples.insert(samples.end(), left.begin(), left.end());
    write_mfunc_csv(c.out_dir + "/mfunc.csv", samples);
    const auto diag = m_diagnostics(samples);
    log << "mfunc: " << samples.size() << " samples, herglotz_violations=" << diag.herglotz_violations
        << ", wall=" << detail::elapsed_since(t0) << "s\n";
    return 0;
}

/// `fit`: rational DtN for both boundaries -> poles.json (+ poles.csv).
inline int run_fit(const RunConfig& c, std::ostream& log)
{
    const auto t0 = std::chrono::steady_clock::now();
    std::filesystem::create_directories(c.out_dir);
    const auto [left, right] = detail::fit_both_sides(c);
    json out = {{"left", rational_to_json(left)}, {"right", rational_to_json(right)}};
    write_text_file(c.out_dir + "/poles.json", out.dump(2) + "\n");
    write_poles_csv(c.out_dir + "/poles_left.csv", left);
    write_poles_csv(c.out_dir + "/poles_right.csv", right);
    log << "fit: left d=" << left.degree << " eps=" << left.fit_error << ", right d=" << right.degree
        << " eps=" << right.fit_error << ", wall=" << detail::elapsed_since(t0) << "s\n";
    return 0;
}

/// `solve-freq`: frequency-domain method -> one snapshot CSV per output time.
inline int run_solve_freq(const RunConfig& c, std::ostream& log)
{
    const auto t0 = std::chrono::steady_clock::now();
    std::filesystem::create_directories(c.out_dir);
    const Mesh mesh = c.make_mesh();
    WaveField u0{0.0, interpolate_nodal(mesh, [](double x) { return gaussian_beam(x); })};
    const auto res = run_frequency_method(c.freq, mesh, c.potential, u0,
                                          exact_m_provider(c.potential, mesh, c.abc.riccati));
    for (const auto& snap : res.snapshots) {
        write_snapshot_csv(c.out_dir + "/" + snapshot_filename(snap.time), mesh, snap,
                           detail::freq_params_comment(c));
    }
    double max_err = 0.0;
    if (c.potential.kind == Potential::Kind::Constant && c.potential.v0 == 0.0) {
        ErrorSeries es;
        for (const auto& snap : res.snapshots) {
            WaveField ex{snap.time,
                         interpolate_nodal(mesh, [&](double x) { return exact_free(x, snap.time); })};
            es.times.push_back(snap.time);
            es.rel_l2.push_back(relative_l2_error(snap, ex, mesh));
            max_err = std::max(max_err, es.rel_l2.back());
        }
        write_error_series_csv(c.out_dir + "/errors.csv", es);
    }
    log << "solve-freq: " << res.snapshots.size() << " snapshots, failures=" << res.failures.size()
        << ", max_err=" << max_err << ", wall=" << detail::elapsed_since(t0) << "s\n";
    return 0;
}

/// `solve-time`: time-domain method with fitted ABCs -> snapshots, boundary
/// trace, and (for the free potential) an exact-solution error series.
inline int run_solve_time(const RunConfig& c, std::ostream& log)
{
    const auto t0 = std::chrono::steady_clock::now();
    std::filesystem::create_directories(c.out_dir);
    const Mesh mesh = c.make_mesh();
    const auto u0 = interpolate_nodal(mesh, [](double x) { return gaussian_beam(x); });
    const auto [left, right] = detail::fit_both_sides(c);
    json fits = {{"left", rational_to_json(left)}, {"right", rational_to_json(right)}};
    write_text_file(c.out_dir + "/poles.json", fits.dump(2) + "\n");

    std::function<std::vector<cplx>(double)> reference;
    const bool is_free = c.potential.kind == Potential::Kind::Constant && c.potential.v0 == 0.0;
    if (is_free) {
        reference = [&mesh](double t) {
            return interpolate_nodal(mesh, [&](double x) { return exact_free(x, t); });
        };
    }
    TimeConfig tc = c.time;
    const auto res = run_time_method(mesh, c.potential, u0, left, right, tc, reference);
    for (const auto& snap : res.snapshots) {
        write_snapshot_csv(c.out_dir + "/" + snapshot_filename(snap.time), mesh, snap,
                           "dt=" + fmt17(c.time.dt));
    }
    write_boundary_trace_csv(c.out_dir + "/boundary_trace.csv", res.trace_times, res.trace_left,
                             res.trace_right);
    double max_err = 0.0;
    if (is_free) {
        ErrorSeries es{res.error_times, res.rel_l2};
        for (double e : es.rel_l2) max_err = std::max(max_err, e);
        write_error_series_csv(c.out_dir + "/errors.csv", es);
    }
    for (const auto& w : res.warnings) log << "solve-time: warning: " << w << "\n";
    log << "solve-time: poles " << left.degree << "+" << right.degree << ", max_err=" << max_err
        << ", norm_ratio=" << res.max_norm_ratio << ", wall=" << detail::elapsed_since(t0) << "s\n";
    return 0;
}

/// `reference`: large-domain surrogate run -> snapshot CSVs on the wide mesh.
inline int run_reference(const RunConfig& c, std::ostream& log)
{
    const auto t0 = std::chrono::steady_clock::now();
    std::filesystem::create_directories(c.out_dir);
    const Mesh interior = c.make_mesh();
    const auto run = reference_solution(c.potential, c.reference, interior, c.time.dt, c.time.T,
                                        c.time.snapshot_times);
    for (const auto& snap : run.snapshots) {
        write_snapshot_csv(c.out_dir + "/" + snapshot_filename(snap.time), run.mesh, snap,
                           "reference L=" + fmt17(c.reference.L) +
                               (run.containment_ok ? "" : ", UNTRUSTED: wave reached the edge"));
    }
    if (!run.containment_ok) {
        log << "reference: warning: containment check failed (max edge value "
            << run.max_edge_value << ")\n";
    }
    log << "reference: " << run.snapshots.size() << " snapshots on [-" << c.reference.L << ", "
        << c.reference.L << "], wall=" << detail::elapsed_since(t0) << "s\n";
    return 0;
}

/// `compare`: error series between two snapshot sets (same x grid, or the
/// second set on a wider mesh that contains the first).
inline int run_compare(const std::string& dir_a, const std::string& dir_b,
                       const std::string& out_dir, std::ostream& log)
{
    namespace fs = std::filesystem;
    std::map<double, fs::path> a_files, b_files;
    const auto harvest = [](const std::string& dir, std::map<double, fs::path>& into) {
        for (const auto& entry : fs::directory_iterator(dir)) {
            const std::string name = entry.path().filename().string();
            if (name.rfind("u_t", 0) == 0 && entry.path().extension() == ".csv") {
                into[read_snapshot_csv(entry.path().string()).time] = entry.path();
            }
        }
    };
    harvest(dir_a, a_files);
    harvest(dir_b, b_files);
    ErrorSeries es;
    std::ostringstream table;
    table << "time    rel_l2_error\n";
    for (const auto& [t, path_a] : a_files) {
        auto itb = b_files.find(t);
        if (itb == b_files.end()) continue;
        const SnapshotFile a = read_snapshot_csv(path_a.string());
        const SnapshotFile b = read_snapshot_csv(itb->second.string());
        // trapezoid on a's grid; sample b there (grids match, or b spans a)
        double num = 0.0, den = 0.0;
        std::size_t jb = 0;
        for (std::size_t i = 0; i < a.x.size(); ++i) {
            while (jb + 1 < b.x.size() && b.x[jb + 1] <= a.x[i]) ++jb;
            cplx bv;
            if (jb + 1 < b.x.size() && b.x[jb + 1] > b.x[jb]) {
                const double w = (a.x[i] - b.x[jb]) / (b.x[jb + 1] - b.x[jb]);
                bv = (1.0 - w) * b.u[jb] + w * b.u[jb + 1];
            } else {
                bv = b.u[jb];
            }
            const double quad_w =
                (i == 0 ? a.x[1] - a.x[0] : (i + 1 == a.x.size() ? a.x[i] - a.x[i - 1] : a.x[i + 1] - a.x[i - 1])) / 2.0;
            num += quad_w * std::norm(a.u[i] - bv);
            den += quad_w * std::norm(bv);
        }
        if (den == 0.0) throw std::runtime_error("compare: zero reference norm at t=" + fmt17(t));
        es.times.push_back(t);
        es.rel_l2.push_back(std::sqrt(num / den));
        table << fmt17(t) << "  " << fmt17(es.rel_l2.back()) << "\n";
    }
    fs::create_directories(out_dir);
    write_error_series_csv(out_dir + "/errors.csv", es);
    write_text_file(out_dir + "/errors.txt", table.str());
    double max_err = 0.0;
    for (double e : es.rel_l2) max_err = std::max(max_err, e);
    log << "compare: " << es.times.size() << " matched times, max_err=" << max_err << "\n";
    return 0;
}

/// Dispatch a named subcommand; returns the process exit status.
inline int run_subcommand(const RunConfig& c, const std::string& name, std::ostream& log)
{
    if (name == "mfunc") return run_mfunc(c, log);
    if (name == "fit") return run_fit(c, log);
    if (name == "solve-freq") return run_solve_freq(c, log);
    if (name == "solve-time") return run_solve_time(c, log);
    if (name == "reference") return run_reference(c, log);
    throw std::invalid_argument("unknown subcommand '" + name + "'");
}

}  // namespace twabc
