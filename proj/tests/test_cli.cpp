#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "twabc/twabc.hpp"

using namespace twabc;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag)
        : path(fs::temp_directory_path() / ("twabc_test_" + tag + "_" + std::to_string(::getpid())))
    {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("minimal config gets defaults")
{
    const RunConfig c = parse_config(R"({"potential":{"type":"free"}})");
    CHECK(c.x_minus == -5.0);
    CHECK(c.x_plus == 5.0);
    CHECK(c.freq.sigma == 1.0);
    CHECK(c.freq.f_cutoff == 256.0);
    CHECK(c.time.dt == 1e-4);
    CHECK(c.potential.kind == Potential::Kind::Constant);
}

TEST_CASE("config validation errors name the key")
{
    CHECK_THROWS_WITH_AS((void)parse_config(R"({"mesh":{"elements":0}})"),
                         doctest::Contains("elements"), ConfigError);
    CHECK_THROWS_WITH_AS((void)parse_config(R"({"mesh":{"junk":1}})"), doctest::Contains("junk"),
                         ConfigError);
    CHECK_THROWS_WITH_AS((void)parse_config(R"({"nonsense":{}})"), doctest::Contains("nonsense"),
                         ConfigError);
    CHECK_THROWS_AS((void)parse_config("not json"), ConfigError);
    CHECK_THROWS_AS((void)parse_config(R"({"freq":{"n_quad":10}})"), ConfigError);
}

TEST_CASE("preset coulomb_like_paper matches the reference experiment")
{
    const RunConfig c = preset_config("coulomb_like_paper");
    CHECK(c.potential.kind == Potential::Kind::CoulombLike);
    CHECK(c.abc.eps0 == 1e-8);
    CHECK(c.abc.sigma == 1.0);
    CHECK(c.mesh_order == 8);
    CHECK(c.mesh_elements == 1024);
    CHECK(c.time.dt == 1e-4);

    const RunConfig d = preset_config("gaussian_barrier");
    CHECK(d.potential.kind == Potential::Kind::GaussianBarrier);
    CHECK(d.abc.eps0 == 1e-4);
    CHECK(d.mesh_elements == 256);
    CHECK_THROWS_AS((void)preset_config("no_such_preset"), ConfigError);
}

TEST_CASE("config round-trip is the identity")
{
    const RunConfig a = preset_config("gaussian_barrier_paper");
    const json ja = config_to_json(a);
    const RunConfig b = config_from_json(ja);
    CHECK(config_to_json(b) == ja);

    const RunConfig c = parse_config(
        R"({"potential":{"type":"bargmann","beta":1.5,"gamma":0.5},
            "time":{"dt":0.002,"snapshot_times":[0.1,0.2]},
            "abc":{"eps0":1e-6,"weight_mode":"dlambda"}})");
    CHECK(config_to_json(config_from_json(config_to_json(c))) == config_to_json(c));
}

TEST_CASE("fit subcommand writes pole data; two runs are byte-identical")
{
    TempDir dir_a("fit_a");
    TempDir dir_b("fit_b");
    RunConfig c = preset_config("free_particle");
    c.potential = Potential::bargmann(1.0, 2.0);
    c.x_plus = 0.0;  // the closed-form reference point; the remainder is one exact pole there
    c.abc.n_points = 65;
    c.abc.f_cutoff = 64.0;
    std::ostringstream log;
    c.out_dir = dir_a.path.string();
    CHECK(run_subcommand(c, "fit", log) == 0);
    c.out_dir = dir_b.path.string();
    CHECK(run_subcommand(c, "fit", log) == 0);
    CHECK(slurp(dir_a.path / "poles.json") == slurp(dir_b.path / "poles.json"));

    const json poles = json::parse(slurp(dir_a.path / "poles.json"));
    CHECK(poles.at("right").at("degree").get<int>() == 1);
    const RationalDtN r = rational_from_json(poles.at("right"));
    CHECK(std::abs(r.poles[0] - cplx(2.0, 0.0)) < 1e-7);
    CHECK(std::abs(r.residues[0] - cplx(-3.0, 0.0)) < 1e-7);
}

TEST_CASE("mfunc subcommand emits the contour CSV")
{
    TempDir dir("mfunc");
    RunConfig c = preset_config("free_particle");
    c.abc.n_points = 33;
    c.out_dir = dir.path.string();
    std::ostringstream log;
    CHECK(run_subcommand(c, "mfunc", log) == 0);
    const std::string csv = slurp(dir.path / "mfunc.csv");
    CHECK(csv.rfind("f,re_lambda,im_lambda,re_m,im_m,side", 0) == 0);
    // 33 samples per side, plus header
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 67);
}

TEST_CASE("solve-time and compare round trip; identical sets give zero error")
{
    TempDir dir_run("run");
    TempDir dir_cmp("cmp");
    RunConfig c = preset_config("free_particle");
    c.mesh_elements = 64;
    c.mesh_order = 3;
    c.time.dt = 2e-3;
    c.time.T = 0.2;
    c.time.snapshot_times = {0.1, 0.2};
    c.out_dir = dir_run.path.string();
    std::ostringstream log;
    CHECK(run_subcommand(c, "solve-time", log) == 0);
    CHECK(fs::exists(dir_run.path / "boundary_trace.csv"));
    CHECK(fs::exists(dir_run.path / "errors.csv"));
    CHECK(run_compare(dir_run.path.string(), dir_run.path.string(), dir_cmp.path.string(), log) == 0);
    const std::string errors = slurp(dir_cmp.path / "errors.csv");
    std::istringstream lines(errors);
    std::string line;
    std::getline(lines, line);  // header
    int rows = 0;
    while (std::getline(lines, line)) {
        const auto comma = line.find(',');
        CHECK(std::stod(line.substr(comma + 1)) == 0.0);
        ++rows;
    }
    CHECK(rows == 2);
}

TEST_CASE("snapshot io preserves values")
{
    TempDir dir("io");
    const Mesh mesh = Mesh::uniform(-1.0, 1.0, 4, 2);
    WaveField u{0.25, interpolate_nodal(mesh, [](double x) { return cplx(x, -2.0 * x); })};
    const std::string path = (dir.path / "u_t0.25.csv").string();
    write_snapshot_csv(path, mesh, u, "check=1");
    const SnapshotFile back = read_snapshot_csv(path);
    CHECK(back.time == 0.25);
    REQUIRE(back.x.size() == mesh.n_nodes());
    for (std::size_t i = 0; i < back.x.size(); ++i) {
        CHECK(back.x[i] == mesh.nodes[i]);
        CHECK(back.u[i] == u.values[i]);
    }
}

TEST_CASE("unknown subcommands are rejected")
{
    std::ostringstream log;
    CHECK_THROWS_AS((void)run_subcommand(preset_config("free_particle"), "no-such-op", log),
                    std::invalid_argument);
}

TEST_CASE("fmt17 round-trips doubles exactly")
{
    for (double v : {1.0 / 3.0, 2.26e-7, -5.5, 1e308, 0.1 + 0.2}) {
        CHECK(std::stod(fmt17(v)) == v);
    }
}
