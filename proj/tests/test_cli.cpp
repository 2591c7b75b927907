#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fvbs/config.hpp"
#include "fvbs/errors.hpp"
#include "fvbs/expr.hpp"
#include "fvbs/runner.hpp"

using namespace fvbs;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

nlohmann::json read_json(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    return nlohmann::json::parse(in);
}

std::string read_text(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("field expressions evaluate") {
    auto f = parse_field_expression("2 + 3*x^2 - y/2");
    CHECK(f(2.0, 4.0) == doctest::Approx(12.0));
    CHECK(parse_field_expression("sin(pi/2)")(0, 0) == doctest::Approx(1.0));
    CHECK(parse_field_expression("min(x, y) + max(x, y)")(3.0, 5.0) == doctest::Approx(8.0));
    CHECK(parse_field_expression("-x^2")(2.0, 0.0) == doctest::Approx(-4.0));
    CHECK(parse_field_expression("exp(0) + abs(-2)")(0, 0) == doctest::Approx(3.0));
    CHECK(parse_field_expression("2^3^2")(0, 0) == doctest::Approx(512.0));  // right assoc
    CHECK(parse_field_expression("cos(0)*(1+1)")(0, 0) == doctest::Approx(2.0));
}

TEST_CASE("field expressions reject malformed input") {
    CHECK_THROWS_AS(parse_field_expression("2+*3"), ConfigError);
    CHECK_THROWS_AS(parse_field_expression("foo(x)"), ConfigError);
    CHECK_THROWS_AS(parse_field_expression("(x"), ConfigError);
    CHECK_THROWS_AS(parse_field_expression(""), ConfigError);
    CHECK_THROWS_AS(parse_field_expression("x y"), ConfigError);
}

TEST_CASE("preset expands into defaults") {
    RunConfig c = parse_config_text("[problem]\npreset = single-cell\n");
    CHECK(c.mesh.nx == 1);
    CHECK(c.mesh.ny == 1);
    CHECK(c.scheme.b == BKind::Upwind);
    CHECK(c.problem.vd == "1");
    CHECK(c.mesh.boundary == "all-dirichlet");
}

TEST_CASE("explicit keys win over preset defaults") {
    RunConfig c = parse_config_text(
        "[mesh]\nnx = 7\n[scheme]\nb = sg\n[problem]\npreset = laplace-linear\n");
    CHECK(c.mesh.nx == 7);
    CHECK(c.mesh.ny == 16);  // global default, preset does not pin ny
    CHECK(c.scheme.b == BKind::ScharfetterGummel);
    CHECK(c.problem.vd == "x");
}

TEST_CASE("config round trip through serialization") {
    RunConfig c = parse_config_text(
        "[mesh]\nnx = 12\nny = 3\nboundary = left-right\n"
        "[scheme]\nb = sg\nquadrature_order = 5\n"
        "[problem]\nux = 1\nuy = 0\nb = 0.5\nf = sin(2*pi*x)\nvd = 0\n"
        "[degiorgi]\nseed = 99\nrefinements = 4x4 8x8\n");
    RunConfig c2 = parse_config_text(serialize_config(c));
    CHECK(serialize_config(c2) == serialize_config(c));
    CHECK(c2.mesh.nx == 12);
    CHECK(c2.degiorgi.seed == 99);
    REQUIRE(c2.degiorgi.refinements.size() == 2);
    CHECK(c2.degiorgi.refinements[1].first == 8);
}

TEST_CASE("config parser rejects bad input") {
    CHECK_THROWS_AS(parse_config_text("[mesh]\nspacing = 2\n"), ConfigError);  // unknown key
    CHECK_THROWS_AS(parse_config_text("[mesh]\nnx = 2\nnx = 3\n"), ConfigError);  // duplicate
    CHECK_THROWS_AS(parse_config_text("[scheme]\nb = magic\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[problem]\npreset = no-such-preset\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[mesh]\nnx no-equals\n"), ConfigError);
    CHECK_THROWS_AS(
        parse_config_text("[mesh]\nx0 = 1\nx1 = 0\n[problem]\npreset = single-cell\n"),
        ConfigError);
    CHECK_THROWS_AS(parse_config_text("[problem]\nux = 0\n"), ConfigError);  // incomplete fields
    CHECK_THROWS_AS(
        parse_config_text("[problem]\npreset = single-cell\n[degiorgi]\neta = 0\n"),
        ConfigError);
}

TEST_CASE("solve writes the single-cell solution") {
    TempDir dir("fvbs_cli_single");
    RunConfig c = parse_config_text("[problem]\npreset = single-cell\n");
    c.output.dir = dir.path.string();
    c.quiet = true;
    std::ostringstream log;
    CHECK(dispatch("solve", c, log) == kExitOk);

    std::string csv = read_text(dir.path / "solution.csv");
    CHECK(csv.find("cell_id,x,y,measure,v") == 0);
    CHECK(csv.find("0,0.5,0.5,1,1") != std::string::npos);  // v = 1 exactly

    auto man = read_json(dir.path / "manifest.json");
    CHECK(man["v_max"].get<double>() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(man["tool"] == "fvbs");
    auto mm = read_json(dir.path / "mmatrix.json");
    CHECK(mm["diag_positive"].get<bool>());
}

TEST_CASE("solve reproduces the linear profile") {
    TempDir dir("fvbs_cli_laplace");
    RunConfig c = parse_config_text("[mesh]\nnx = 12\nny = 5\n[problem]\npreset = laplace-linear\n");
    c.output.dir = dir.path.string();
    c.quiet = true;
    std::ostringstream log;
    CHECK(dispatch("solve", c, log) == kExitOk);
    auto man = read_json(dir.path / "manifest.json");
    CHECK(man["laplace_linear_error"].get<double>() <= 1e-10);
}

TEST_CASE("solve can dump the assembled system") {
    TempDir dir("fvbs_cli_dump");
    RunConfig c = parse_config_text(
        "[problem]\npreset = single-cell\n[output]\ndump_system = true\n");
    c.output.dir = dir.path.string();
    c.quiet = true;
    std::ostringstream log;
    CHECK(dispatch("solve", c, log) == kExitOk);
    CHECK(fs::exists(dir.path / "system.mtx"));
    CHECK(fs::exists(dir.path / "rhs.txt"));
}

TEST_CASE("verify passes on a small audit") {
    TempDir dir("fvbs_cli_verify");
    RunConfig c = parse_config_text(
        "[mesh]\nnx = 4\nny = 4\n[problem]\npreset = laplace-linear\n"
        "[degiorgi]\ntrials = 3\nm_max = 4\nrefinements = 4x4 8x8\n");
    c.output.dir = dir.path.string();
    c.quiet = true;
    std::ostringstream log;
    CHECK(dispatch("verify", c, log) == kExitOk);
    auto rep = read_json(dir.path / "report.json");
    CHECK(rep["audit_ok"].get<bool>());
    CHECK(rep["trials"].size() == 3);
    std::string levels = read_text(dir.path / "levels.csv");
    CHECK(levels.find("trial,m,C_m") == 0);
}

TEST_CASE("calibrate requires refinements") {
    TempDir dir("fvbs_cli_calempty");
    RunConfig c = parse_config_text("[problem]\npreset = laplace-linear\n");
    c.degiorgi.refinements.clear();
    c.output.dir = dir.path.string();
    c.quiet = true;
    std::ostringstream log;
    CHECK(dispatch("calibrate", c, log) == kExitConfig);
}

TEST_CASE("calibrate writes a report") {
    TempDir dir("fvbs_cli_cal");
    RunConfig c = parse_config_text(
        "[problem]\npreset = sg-exponential\n[degiorgi]\nrefinements = 16x1 32x1\nm_max = 6\n");
    c.output.dir = dir.path.string();
    c.quiet = true;
    std::ostringstream log;
    CHECK(dispatch("calibrate", c, log) == kExitOk);
    auto rep = read_json(dir.path / "calibration.json");
    REQUIRE(rep["levels"].size() == 2);
    CHECK(rep.contains("poincare_c"));
    CHECK(rep.contains("poincare_c_refinement_ratio"));
}

TEST_CASE("mesh-check reports admissibility") {
    RunConfig c = parse_config_text("[mesh]\nnx = 4\nny = 4\n[problem]\npreset = single-cell\n");
    std::ostringstream log;
    CHECK(dispatch("mesh-check", c, log) == kExitOk);
    auto j = nlohmann::json::parse(log.str());
    CHECK(j["cells"] == 16);
    CHECK(j["inegvol_ok"].get<bool>());
    CHECK(j["xi_measured"].get<double>() == doctest::Approx(0.5));
}

TEST_CASE("dispatch maps errors to exit codes") {
    std::ostringstream log;
    RunConfig c = parse_config_text("[problem]\npreset = single-cell\n");
    CHECK(dispatch("frobnicate", c, log) == kExitConfig);

    RunConfig bad_mesh = c;
    bad_mesh.mesh.file = "/nonexistent/mesh.txt";
    CHECK(dispatch("mesh-check", bad_mesh, log) == kExitMesh);
}
