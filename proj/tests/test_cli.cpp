#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "imc/config.hpp"
#include "imc/errors.hpp"

using namespace imc;
namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
    const std::string cmd = std::string(CONTOUR_IMC_BIN) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path temp_dir(const std::string& tag) {
    const fs::path dir = fs::temp_directory_path() / ("imc_cli_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

} // namespace

TEST_CASE("config text parses dotted keys, lists and comments") {
    const ConfigMap cfg = parse_config_text(
        "# comment\n"
        "scenario = sinusoid\n"
        "ts = 2e-4   # inline\n"
        "slave.plant.G = [1.0, 9.98e-5, -2.10, 1.0]\n");
    REQUIRE(cfg.entries.size() == 3);
    CHECK(cfg.entries[0].first == "scenario");
    CHECK(cfg.entries[2].second == "[1.0, 9.98e-5, -2.10, 1.0]");
    CHECK_THROWS_AS(parse_config_text("novalue\n"), ParseError);
}

TEST_CASE("scenario_from_config applies typed overrides") {
    ConfigMap cfg;
    cfg.set("scenario", "sinusoid");
    cfg.set("ts", "2e-4");
    cfg.set("horizon", "1.5");
    cfg.set("slave_controller", "ccc");
    cfg.set("gains.kx", "12");
    cfg.set("stabilizer.grid_n", "7");
    cfg.set("slave.plant.G", "[1.0, 9.98e-5, -2.10, 1.0]");
    const Scenario sc = scenario_from_config(cfg);
    CHECK(sc.Ts == 2e-4);
    CHECK(sc.horizon == 1.5);
    CHECK(sc.slave_controller == ControllerType::ccc);
    CHECK(sc.gains.ccc.Kx == 12);
    CHECK(sc.stab.grid_N == 7);
    CHECK(sc.slave_plant.G2(1, 0) == -2.10);
}

TEST_CASE("unknown keys are rejected by name") {
    ConfigMap cfg;
    cfg.set("scenario", "sinusoid");
    cfg.set("gains.kq", "1");
    try {
        scenario_from_config(cfg);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("gains.kq") != std::string::npos);
    }
}

TEST_CASE("custom scenarios assemble from the catalog") {
    ConfigMap cfg;
    cfg.set("scenario", "custom");
    cfg.set("kind", "monotonic");
    cfg.set("master.type", "ramp_sine");
    cfg.set("master.c1", "1");
    cfg.set("slave.fn.type", "sine");
    cfg.set("slave.fn.a", "0.5");
    cfg.set("horizon", "0.5");
    const Scenario sc = scenario_from_config(cfg);
    CHECK(sc.slave_fns[0].eval(1.0) == doctest::Approx(0.5 * std::sin(1.0)));

    ConfigMap empty;
    empty.set("scenario", "custom");
    CHECK_THROWS_AS(scenario_from_config(empty), ConfigError);  // no slave axes
}

TEST_CASE("--set expressions parse") {
    auto [k, v] = parse_set_expr("gains.kp=3.5");
    CHECK(k == "gains.kp");
    CHECK(v == "3.5");
    CHECK_THROWS_AS(parse_set_expr("oops"), ConfigError);
    CHECK_THROWS_AS(parse_set_expr("=x"), ConfigError);
}

TEST_CASE("cli run writes outputs and reports exit codes") {
    const fs::path dir = temp_dir("run");
    CHECK(run_cli("run --scenario sinusoid --horizon 0.2 --out " + dir.string()) == 0);
    CHECK(fs::exists(dir / "sinusoid_trace.csv"));
    CHECK(fs::exists(dir / "sinusoid_metrics.txt"));
    CHECK(fs::exists(dir / "sinusoid_synthesis.txt"));

    CHECK(run_cli("run --scenario sinusoid --horizon 0.2 --set slave_controller=ccc --out " +
                  dir.string()) == 0);

    // unknown key -> config error
    CHECK(run_cli("run --scenario sinusoid --set nonsense.key=1 --out " + dir.string()) == 1);
    // assumption failure -> 3
    CHECK(run_cli("run --scenario sinusoid --horizon 0.2 --set kind=monotonic "
                  "--set master.type=cosine --out " +
                  dir.string()) == 3);
}

TEST_CASE("cli compare needs controllers and produces the table") {
    const fs::path dir = temp_dir("cmp");
    CHECK(run_cli("compare --scenario sinusoid --out " + dir.string()) == 1);
    CHECK(run_cli("compare --scenario sinusoid --controller tvimcc --controller pid "
                  "--horizon 0.3 --out " +
                  dir.string()) == 0);
    const std::string csv = slurp(dir / "compare.csv");
    CHECK(csv.find("scenario,controller,rms_um,max_um") == 0);
    CHECK(csv.find("sinusoid,tvimcc,") != std::string::npos);
    CHECK(csv.find("sinusoid,pid,") != std::string::npos);
}

TEST_CASE("cli report downsamples traces and rejects missing files") {
    const fs::path dir = temp_dir("rep");
    REQUIRE(run_cli("run --scenario sinusoid --horizon 0.2 --out " + dir.string()) == 0);
    CHECK(run_cli("report " + (dir / "sinusoid_trace.csv").string() + " --out " +
                  dir.string()) == 0);
    CHECK(fs::exists(dir / "sinusoid_trace_path.csv"));
    CHECK(fs::exists(dir / "sinusoid_trace_error.csv"));

    // downsample factor 1 is an identity pass-through on row count
    std::ifstream trace(dir / "sinusoid_trace.csv"), path(dir / "sinusoid_trace_path.csv");
    long rows_trace = -1, rows_path = -1;  // don't count headers
    for (std::string line; std::getline(trace, line);) ++rows_trace;
    for (std::string line; std::getline(path, line);) ++rows_path;
    CHECK(rows_trace == rows_path);

    CHECK(run_cli("report /nonexistent_trace.csv --out " + dir.string()) == 1);
}

TEST_CASE("repeated cli runs produce byte-identical csv") {
    const fs::path d1 = temp_dir("det1"), d2 = temp_dir("det2");
    REQUIRE(run_cli("run --scenario circle --horizon 0.4 --out " + d1.string()) == 0);
    REQUIRE(run_cli("run --scenario circle --horizon 0.4 --out " + d2.string()) == 0);
    CHECK(slurp(d1 / "circle_trace.csv") == slurp(d2 / "circle_trace.csv"));
}
