#pragma once

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "twabc/mesh.hpp"
#include "twabc/mfunction.hpp"
#include "twabc/rational.hpp"
#include "twabc/reference.hpp"

namespace twabc {

/// 17 significant digits, '.' decimal; byte-identical across runs.
inline std::string fmt17(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline void write_text_file(const std::string& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << content;
}

inline std::string snapshot_filename(double t)
{
    std::ostringstream name;
    name << "u_t" << fmt17(t) << ".csv";
    return name.str();
}

/// Snapshot CSV: comment header with run parameters, then x, re_u, im_u rows.
inline void write_snapshot_csv(const std::string& path, const Mesh& mesh, const WaveField& u,
                               const std::string& params_comment = "")
{
    std::ostringstream out;
    out << "# t=" << fmt17(u.time);
    if (!params_comment.empty()) out << ", " << params_comment;
    out << "\n";
    out << "x,re_u,im_u\n";
    for (std::size_t i = 0; i < mesh.n_nodes(); ++i) {
        out << fmt17(mesh.nodes[i]) << ',' << fmt17(u.values[i].real()) << ','
            << fmt17(u.values[i].imag()) << '\n';
    }
    write_text_file(path, out.str());
}

struct SnapshotFile {
    double time = 0.0;
    std::vector<double> x;
    std::vector<cplx> u;
};

inline SnapshotFile read_snapshot_csv(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open snapshot: " + path);
    SnapshotFile snap;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto pos = line.find("t=");
            if (pos != std::string::npos) snap.time = std::stod(line.substr(pos + 2));
            continue;
        }
        if (line.rfind("x,", 0) == 0) continue;
        std::istringstream row(line);
        std::string cell;
        double vals[3] = {0, 0, 0};
        for (int c = 0; c < 3 && std::getline(row, cell, ','); ++c) vals[c] = std::stod(cell);
        snap.x.push_back(vals[0]);
        snap.u.emplace_back(vals[1], vals[2]);
    }
    return snap;
}

inline void write_error_series_csv(const std::string& path, const ErrorSeries& es)
{
    std::ostringstream out;
    out << "t,rel_l2_error\n";
    for (std::size_t i = 0; i < es.times.size(); ++i) {
        out << fmt17(es.times[i]) << ',' << fmt17(es.rel_l2[i]) << '\n';
    }
    write_text_file(path, out.str());
}

inline void write_boundary_trace_csv(const std::string& path, const std::vector<double>& t,
                                     const std::vector<cplx>& left, const std::vector<cplx>& right)
{
    std::ostringstream out;
    out << "t,re_u_left,im_u_left,re_u_right,im_u_right\n";
    for (std::size_t i = 0; i < t.size(); ++i) {
        out << fmt17(t[i]) << ',' << fmt17(left[i].real()) << ',' << fmt17(left[i].imag()) << ','
            << fmt17(right[i].real()) << ',' << fmt17(right[i].imag()) << '\n';
    }
    write_text_file(path, out.str());
}

inline void write_mfunc_csv(const std::string& path, const std::vector<ContourSample>& samples)
{
    std::ostringstream out;
    out << "f,re_lambda,im_lambda,re_m,im_m,side\n";
    for (const auto& s : samples) {
        out << fmt17(s.f) << ',' << fmt17(s.lambda.real()) << ',' << fmt17(s.lambda.imag()) << ','
            << fmt17(s.m_value.real()) << ',' << fmt17(s.m_value.imag()) << ',' << side_name(s.side)
            << '\n';
    }
    write_text_file(path, out.str());
}

inline nlohmann::json rational_to_json(const RationalDtN& r)
{
    nlohmann::json poles = nlohmann::json::array();
    nlohmann::json residues = nlohmann::json::array();
    for (const auto& p : r.poles) poles.push_back({{"re", p.real()}, {"im", p.imag()}});
    for (const auto& a : r.residues) residues.push_back({{"re", a.real()}, {"im", a.imag()}});
    return nlohmann::json{
        {"side", side_name(r.side)},
        {"degree", r.degree},
        {"eps", r.fit_error},
        {"eps0", r.tolerance},
        {"sigma", r.contour_sigma},
        {"f_cutoff", r.f_cutoff},
        {"poles", poles},
        {"residues", residues},
        {"herglotz_min_im", r.herglotz_min_im},
        {"converged", r.converged},
        {"unstable_pole_warning", r.unstable_pole_warning},
        {"unpaired_flags", r.unpaired_flags},
    };
}

inline RationalDtN rational_from_json(const nlohmann::json& j)
{
    RationalDtN r;
    r.side = j.at("side").get<std::string>() == "left" ? Side::Left : Side::Right;
    r.degree = j.at("degree").get<int>();
    r.fit_error = j.at("eps").get<double>();
    r.tolerance = j.at("eps0").get<double>();
    r.contour_sigma = j.at("sigma").get<double>();
    r.f_cutoff = j.at("f_cutoff").get<double>();
    for (const auto& p : j.at("poles")) r.poles.emplace_back(p.at("re").get<double>(), p.at("im").get<double>());
    for (const auto& a : j.at("residues")) r.residues.emplace_back(a.at("re").get<double>(), a.at("im").get<double>());
    if (j.contains("herglotz_min_im")) r.herglotz_min_im = j.at("herglotz_min_im").get<double>();
    if (j.contains("converged")) r.converged = j.at("converged").get<bool>();
    if (j.contains("unstable_pole_warning")) r.unstable_pole_warning = j.at("unstable_pole_warning").get<bool>();
    if (j.contains("unpaired_flags")) r.unpaired_flags = j.at("unpaired_flags").get<int>();
    return r;
}

/// Poles CSV alternative: one pole per row.
inline void write_poles_csv(const std::string& path, const RationalDtN& r)
{
    std::ostringstream out;
    out << "side,index,re_pole,im_pole,re_residue,im_residue\n";
    for (std::size_t i = 0; i < r.poles.size(); ++i) {
        out << side_name(r.side) << ',' << i << ',' << fmt17(r.poles[i].real()) << ','
            << fmt17(r.poles[i].imag()) << ',' << fmt17(r.residues[i].real()) << ','
            << fmt17(r.residues[i].imag()) << '\n';
    }
    write_text_file(path, out.str());
}

}  // namespace twabc
