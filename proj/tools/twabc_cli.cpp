// Command-line front end: mfunc | fit | solve-freq | solve-time | reference | compare.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "twabc/twabc.hpp"

namespace {

twabc::RunConfig load_config(const std::string& config_path, const std::string& preset,
                             const std::string& out_dir, int threads)
{
    twabc::RunConfig cfg;
    if (!preset.empty()) {
        cfg = twabc::preset_config(preset);
    }
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw twabc::ConfigError("cannot open config file: " + config_path);
        std::stringstream buf;
        buf << in.rdbuf();
        if (!preset.empty()) {
            // preset as base, file entries override
            twabc::json j = twabc::config_to_json(cfg);
            j.merge_patch(twabc::json::parse(buf.str()));
            cfg = twabc::config_from_json(j);
        } else {
            cfg = twabc::parse_config(buf.str());
        }
    }
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (threads > 0) {
        cfg.threads = threads;
        cfg.freq.threads = threads;
    }
    return cfg;
}

int fail_json(const std::exception& e)
{
    twabc::json err = {{"error", e.what()}};
    std::cerr << err.dump() << std::endl;
    return 1;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Schrodinger solver with Titchmarsh-Weyl absorbing boundary conditions"};
    app.require_subcommand(1);

    std::string config_path, preset, out_dir;
    int threads = 0;
    app.add_option("--config", config_path, "JSON configuration file");
    app.add_option("--preset", preset,
                   "named preset (free_particle, coulomb_like, gaussian_barrier; "
                   "suffix _paper or _desk)");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--threads", threads, "worker threads for per-frequency solves (default 1)");

    const char* names[] = {"mfunc", "fit", "solve-freq", "solve-time", "reference"};
    for (const char* n : names) app.add_subcommand(n)->fallthrough();
    auto* cmp = app.add_subcommand("compare", "error series between two snapshot directories");
    cmp->fallthrough();
    std::string dir_a, dir_b;
    cmp->add_option("dir_a", dir_a, "first snapshot directory")->required();
    cmp->add_option("dir_b", dir_b, "reference snapshot directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        const std::string sub = app.get_subcommands().front()->get_name();
        if (sub == "compare") {
            return twabc::run_compare(dir_a, dir_b, out_dir.empty() ? "." : out_dir, std::cout);
        }
        const twabc::RunConfig cfg = load_config(config_path, preset, out_dir, threads);
        return twabc::run_subcommand(cfg, sub, std::cout);
    } catch (const std::exception& e) {
        return fail_json(e);
    }
}
