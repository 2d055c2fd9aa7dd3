#pragma once

#include <json.hpp>

#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "twabc/freq_solver.hpp"
#include "twabc/mesh.hpp"
#include "twabc/potential.hpp"
#include "twabc/rational.hpp"
#include "twabc/reference.hpp"
#include "twabc/time_solver.hpp"

namespace twabc {

using json = nlohmann::json;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Full experiment description. Defaults follow the reference experiments:
/// Gaussian-beam initial data on [-5, 5], dt = 1e-4, sigma = 1, f_c = 256;
/// desk-scale presets override toward faster runs.
struct RunConfig {
    Potential potential = Potential::free_particle();
    double x_minus = -5.0;
    double x_plus = 5.0;
    int mesh_order = 4;
    int mesh_elements = 256;
    TimeConfig time;
    FreqConfig freq;
    DtnFitConfig abc;
    ReferenceConfig reference;
    std::string out_dir = "out";
    int threads = 1;

    RunConfig()
    {
        time.dt = 1e-4;
        time.T = 1.0;
        time.snapshot_times = {0.25, 0.5, 0.75, 1.0};
        time.averaged_bc = true;
        freq.sigma = 1.0;
        freq.f_cutoff = 256.0;
        freq.n_quad = 8097;
        freq.output_times = {0.5, 0.6, 0.7, 0.8, 0.9};
        abc.eps0 = 1e-8;
        abc.d_max = 40;
    }

    Mesh make_mesh() const { return Mesh::uniform(x_minus, x_plus, mesh_elements, mesh_order); }
};

namespace detail {

inline void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where)
{
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    for (const auto& item : j.items()) {
        if (!allowed.count(item.key())) {
            throw ConfigError(where + ": unknown key '" + item.key() + "'");
        }
    }
}

template <class T>
T get_or(const json& j, const std::string& key, T fallback, const std::string& where)
{
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(where + ": bad value for '" + key + "'");
    }
}

inline Potential parse_potential(const json& j)
{
    check_keys(j, {"type", "v0", "beta", "gamma", "height", "width_coeff", "center", "x_nodes", "values"},
               "potential");
    const std::string type = get_or<std::string>(j, "type", "free", "potential");
    if (type == "free") return Potential::free_particle();
    if (type == "constant") return Potential::constant(get_or<double>(j, "v0", 0.0, "potential"));
    if (type == "harmonic") return Potential::harmonic();
    if (type == "bargmann") {
        return Potential::bargmann(get_or<double>(j, "beta", 1.0, "potential"),
                                   get_or<double>(j, "gamma", 0.0, "potential"));
    }
    if (type == "coulomb_like") return Potential::coulomb_like();
    if (type == "gaussian_barrier") {
        return Potential::gaussian_barrier(get_or<double>(j, "height", 30.0, "potential"),
                                           get_or<double>(j, "width_coeff", 36.0, "potential"),
                                           get_or<double>(j, "center", 8.0, "potential"));
    }
    if (type == "tabulated") {
        if (!j.contains("x_nodes") || !j.contains("values")) {
            throw ConfigError("potential: tabulated needs x_nodes and values");
        }
        return Potential::tabulated(j.at("x_nodes").get<std::vector<double>>(),
                                    j.at("values").get<std::vector<double>>());
    }
    throw ConfigError("potential: unknown type '" + type + "'");
}

}  // namespace detail

inline RunConfig config_from_json(const json& j)
{
    using detail::check_keys;
    using detail::get_or;
    check_keys(j, {"potential", "domain", "mesh", "time", "freq", "abc", "reference", "outputs", "threads"},
               "config");
    RunConfig c;
    if (j.contains("potential")) c.potential = detail::parse_potential(j.at("potential"));
    if (j.contains("domain")) {
        const json& d = j.at("domain");
        check_keys(d, {"x_minus", "x_plus"}, "domain");
        c.x_minus = get_or<double>(d, "x_minus", c.x_minus, "domain");
        c.x_plus = get_or<double>(d, "x_plus", c.x_plus, "domain");
        if (!(c.x_minus < c.x_plus)) throw ConfigError("domain: x_minus must be < x_plus");
    }
    if (j.contains("mesh")) {
        const json& m = j.at("mesh");
        check_keys(m, {"order", "elements"}, "mesh");
        c.mesh_order = get_or<int>(m, "order", c.mesh_order, "mesh");
        c.mesh_elements = get_or<int>(m, "elements", c.mesh_elements, "mesh");
        if (c.mesh_order < 1) throw ConfigError("mesh: order must be >= 1");
        if (c.mesh_elements < 1) throw ConfigError("mesh: elements must be >= 1");
    }
    if (j.contains("time")) {
        const json& t = j.at("time");
        check_keys(t, {"dt", "T", "snapshot_times", "averaged_bc", "convolution", "soe_target",
                       "error_stride"},
                   "time");
        c.time.dt = get_or<double>(t, "dt", c.time.dt, "time");
        c.time.T = get_or<double>(t, "T", c.time.T, "time");
        c.time.snapshot_times = get_or<std::vector<double>>(t, "snapshot_times", c.time.snapshot_times, "time");
        c.time.averaged_bc = get_or<bool>(t, "averaged_bc", c.time.averaged_bc, "time");
        const std::string conv = get_or<std::string>(t, "convolution", "fast", "time");
        if (conv == "fast") c.time.convolution = TimeConfig::Convolution::Fast;
        else if (conv == "direct") c.time.convolution = TimeConfig::Convolution::Direct;
        else throw ConfigError("time: convolution must be 'fast' or 'direct'");
        c.time.soe_target = get_or<double>(t, "soe_target", c.time.soe_target, "time");
        c.time.error_stride = get_or<int>(t, "error_stride", c.time.error_stride, "time");
        if (!(c.time.dt > 0.0)) throw ConfigError("time: dt must be > 0");
        if (!(c.time.T > 0.0)) throw ConfigError("time: T must be > 0");
    }
    if (j.contains("freq")) {
        const json& f = j.at("freq");
        check_keys(f, {"sigma", "f_cutoff", "n_quad", "filter_scale", "filter_power", "output_times"},
                   "freq");
        c.freq.sigma = get_or<double>(f, "sigma", c.freq.sigma, "freq");
        c.freq.f_cutoff = get_or<double>(f, "f_cutoff", c.freq.f_cutoff, "freq");
        c.freq.n_quad = get_or<int>(f, "n_quad", c.freq.n_quad, "freq");
        c.freq.filter_scale = get_or<double>(f, "filter_scale", c.freq.filter_scale, "freq");
        c.freq.filter_power = get_or<int>(f, "filter_power", c.freq.filter_power, "freq");
        c.freq.output_times = get_or<std::vector<double>>(f, "output_times", c.freq.output_times, "freq");
        if (!(c.freq.sigma > 0.0)) throw ConfigError("freq: sigma must be > 0");
        if (!(c.freq.f_cutoff > 0.0)) throw ConfigError("freq: f_cutoff must be > 0");
        if (c.freq.n_quad < 3 || c.freq.n_quad % 2 == 0) throw ConfigError("freq: n_quad must be odd and >= 3");
        if (c.freq.filter_power % 2 != 0) throw ConfigError("freq: filter_power must be even");
    }
    if (j.contains("abc")) {
        const json& a = j.at("abc");
        check_keys(a, {"eps0", "d_max", "contour_points", "sigma", "f_cutoff", "x_far", "riccati_step",
                       "weight_mode", "init", "symmetrize_contour"},
                   "abc");
        c.abc.eps0 = get_or<double>(a, "eps0", c.abc.eps0, "abc");
        c.abc.d_max = get_or<int>(a, "d_max", c.abc.d_max, "abc");
        c.abc.n_points = get_or<int>(a, "contour_points", c.abc.n_points, "abc");
        c.abc.sigma = get_or<double>(a, "sigma", c.abc.sigma, "abc");
        c.abc.f_cutoff = get_or<double>(a, "f_cutoff", c.abc.f_cutoff, "abc");
        c.abc.riccati.x_far = get_or<double>(a, "x_far", c.abc.riccati.x_far, "abc");
        c.abc.riccati.step = get_or<double>(a, "riccati_step", c.abc.riccati.step, "abc");
        const std::string wm = get_or<std::string>(a, "weight_mode", "dk", "abc");
        if (wm == "dk") c.abc.weight_mode = WeightMode::DK;
        else if (wm == "dlambda") c.abc.weight_mode = WeightMode::DLambda;
        else throw ConfigError("abc: weight_mode must be 'dk' or 'dlambda'");
        const std::string init = get_or<std::string>(a, "init", "frozen", "abc");
        if (init == "frozen") c.abc.riccati.init = RiccatiConfig::Init::FrozenCoefficient;
        else if (init == "free_field") c.abc.riccati.init = RiccatiConfig::Init::FreeField;
        else throw ConfigError("abc: init must be 'frozen' or 'free_field'");
        c.abc.symmetrize_contour = get_or<bool>(a, "symmetrize_contour", c.abc.symmetrize_contour, "abc");
        if (!(c.abc.eps0 > 0.0)) throw ConfigError("abc: eps0 must be > 0");
    }
    if (j.contains("reference")) {
        const json& r = j.at("reference");
        check_keys(r, {"L", "elements", "order", "dt"}, "reference");
        c.reference.L = get_or<double>(r, "L", c.reference.L, "reference");
        c.reference.elements = get_or<int>(r, "elements", c.reference.elements, "reference");
        c.reference.order = get_or<int>(r, "order", c.reference.order, "reference");
        c.reference.dt = get_or<double>(r, "dt", c.reference.dt, "reference");
        if (!(c.reference.L > 0.0)) throw ConfigError("reference: L must be > 0");
    }
    if (j.contains("outputs")) {
        const json& o = j.at("outputs");
        check_keys(o, {"directory"}, "outputs");
        c.out_dir = get_or<std::string>(o, "directory", c.out_dir, "outputs");
    }
    c.threads = get_or<int>(j, "threads", c.threads, "config");
    if (c.threads < 1) throw ConfigError("config: threads must be >= 1");
    c.freq.threads = c.threads;
    return c;
}

inline RunConfig parse_config(const std::string& text)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    return config_from_json(j);
}

inline json config_to_json(const RunConfig& c)
{
    json pot;
    switch (c.potential.kind) {
        case Potential::Kind::Constant:
            pot = {{"type", "constant"}, {"v0", c.potential.v0}};
            if (c.potential.v0 == 0.0) pot = {{"type", "free"}};
            break;
        case Potential::Kind::Harmonic: pot = {{"type", "harmonic"}}; break;
        case Potential::Kind::Bargmann:
            pot = {{"type", "bargmann"}, {"beta", c.potential.beta}, {"gamma", c.potential.gamma}};
            break;
        case Potential::Kind::CoulombLike: pot = {{"type", "coulomb_like"}}; break;
        case Potential::Kind::GaussianBarrier:
            pot = {{"type", "gaussian_barrier"}, {"height", c.potential.height},
                   {"width_coeff", c.potential.width_coeff}, {"center", c.potential.center}};
            break;
        case Potential::Kind::Tabulated:
            pot = {{"type", "tabulated"}, {"x_nodes", c.potential.x_nodes}, {"values", c.potential.values}};
            break;
    }
    return json{
        {"potential", pot},
        {"domain", {{"x_minus", c.x_minus}, {"x_plus", c.x_plus}}},
        {"mesh", {{"order", c.mesh_order}, {"elements", c.mesh_elements}}},
        {"time",
         {{"dt", c.time.dt},
          {"T", c.time.T},
          {"snapshot_times", c.time.snapshot_times},
          {"averaged_bc", c.time.averaged_bc},
          {"convolution", c.time.convolution == TimeConfig::Convolution::Fast ? "fast" : "direct"},
          {"soe_target", c.time.soe_target},
          {"error_stride", c.time.error_stride}}},
        {"freq",
         {{"sigma", c.freq.sigma},
          {"f_cutoff", c.freq.f_cutoff},
          {"n_quad", c.freq.n_quad},
          {"filter_scale", c.freq.filter_scale},
          {"filter_power", c.freq.filter_power},
          {"output_times", c.freq.output_times}}},
        {"abc",
         {{"eps0", c.abc.eps0},
          {"d_max", c.abc.d_max},
          {"contour_points", c.abc.n_points},
          {"sigma", c.abc.sigma},
          {"f_cutoff", c.abc.f_cutoff},
          {"x_far", c.abc.riccati.x_far},
          {"riccati_step", c.abc.riccati.step},
          {"weight_mode", c.abc.weight_mode == WeightMode::DK ? "dk" : "dlambda"},
          {"init",
           c.abc.riccati.init == RiccatiConfig::Init::FrozenCoefficient ? "frozen" : "free_field"},
          {"symmetrize_contour", c.abc.symmetrize_contour}}},
        {"reference",
         {{"L", c.reference.L},
          {"elements", c.reference.elements},
          {"order", c.reference.order},
          {"dt", c.reference.dt}}},
        {"outputs", {{"directory", c.out_dir}}},
        {"threads", c.threads},
    };
}

/// Named experiment presets. The *_paper variants reproduce the reference
/// experiments; plain names (and *_desk aliases) are sized for quick runs.
inline RunConfig preset_config(const std::string& name)
{
    std::string base = name;
    bool desk = true;
    if (base.size() > 5 && base.substr(base.size() - 5) == "_desk") base = base.substr(0, base.size() - 5);
    if (base.size() > 6 && base.substr(base.size() - 6) == "_paper") {
        base = base.substr(0, base.size() - 6);
        desk = false;
    }
    RunConfig c;
    if (base == "free_particle") {
        c.potential = Potential::free_particle();
    } else if (base == "coulomb_like") {
        c.potential = Potential::coulomb_like();
        c.abc.eps0 = 1e-8;
    } else if (base == "gaussian_barrier") {
        c.potential = Potential::gaussian_barrier(30.0, 36.0, 8.0);
        c.abc.eps0 = 1e-4;
        c.abc.symmetrize_contour = false;  // resonance-rich right side fits far leaner one-sided
    } else {
        throw ConfigError("unknown preset '" + name + "'");
    }
    if (desk) {
        c.mesh_order = 4;
        c.mesh_elements = 256;
        c.time.dt = 1e-3;
        c.freq.f_cutoff = 128.0;
        c.freq.n_quad = 2049;
        c.freq.filter_power = 12;  // wider rolloff suits the smaller cutoff
        c.freq.output_times = {0.5, 0.7, 0.9};
    } else {
        c.mesh_order = 8;
        c.mesh_elements = 1024;
        c.time.dt = 1e-4;
        c.freq.f_cutoff = 256.0;
        c.freq.n_quad = 8097;
        c.freq.filter_power = 20;
        c.freq.output_times = {0.5, 0.6, 0.7, 0.8, 0.9};
    }
    return c;
}

}  // namespace twabc
