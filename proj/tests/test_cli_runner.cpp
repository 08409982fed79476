#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "chemoblow/config.hpp"
#include "chemoblow/runner.hpp"
#include "chemoblow/scenario.hpp"

using namespace chemoblow;
namespace fs = std::filesystem;

namespace {

const std::string kConfigs = CHEMOBLOW_CONFIG_DIR;
const std::string kCli = CHEMOBLOW_CLI;

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path scratch(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / ("chemoblow_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

int shell(const std::string& cmd)
{
    const int status = std::system((cmd + " >/dev/null 2>&1").c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const char* const kSmallScenario = R"(
[scenario]
name = small
[model]
lambda = 0.5
chi = 2
delta = 1.5
[profile]
kind = gaussian_bump
L = 0.3
cap = 3
[grid]
cells = 32
[time]
t_end = 0.002
sample_interval = 5e-4
)";

Scenario small_scenario() { return parse_scenario(ConfigDocument::parse(kSmallScenario, "small.ini")); }

std::string expect_config_error(const std::string& text)
{
    try {
        (void)parse_scenario(ConfigDocument::parse(text, "t.ini"));
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "no error";
}

}  // namespace

TEST_CASE("config document basics")
{
    const auto doc = ConfigDocument::parse("# head\n[a]\nx = 1.5   ; trailing\ny = true\nz = 1, 2 ,3\n\n[b]\nname = abc\n",
                                           "d.ini");
    CHECK(doc.has_section("a"));
    CHECK(*doc.get_double("a", "x") == 1.5);
    CHECK(*doc.get_bool("a", "y"));
    CHECK(doc.get_list("a", "z") == std::vector<double>{1.0, 2.0, 3.0});
    CHECK(*doc.get_string("b", "name") == "abc");
    CHECK_FALSE(doc.get_double("a", "missing").has_value());
    CHECK(doc.find("a", "x")->line == 3);
    CHECK_NOTHROW(doc.finish({"a", "b"}));
}

TEST_CASE("config document errors carry file, line and field")
{
    try {
        (void)ConfigDocument::parse("[a]\nx = 1\nx = 2\n", "dup.ini");
        FAIL("duplicate key accepted");
    } catch (const ConfigError& e) {
        CHECK(e.line() == 3);
        CHECK(std::string(e.what()).find("dup.ini:3") != std::string::npos);
    }
    CHECK_THROWS_AS((void)ConfigDocument::parse("[a\nx = 1\n"), ConfigError);
    CHECK_THROWS_AS((void)ConfigDocument::parse("x = 1\n"), ConfigError);
    CHECK_THROWS_AS((void)ConfigDocument::parse("[a]\nnovalue\n"), ConfigError);

    const auto doc = ConfigDocument::parse("[a]\nx = abc\n[c]\n", "n.ini");
    try {
        (void)doc.get_double("a", "x");
        FAIL("bad number accepted");
    } catch (const ConfigError& e) {
        CHECK(e.field() == "a.x");
        CHECK(e.line() == 2);
    }
    CHECK_THROWS_AS(doc.finish({"a"}), ConfigError);
    CHECK_THROWS_AS(ConfigDocument::load("/nonexistent/file.ini"), ConfigError);
}

TEST_CASE("scenario files in the repository parse")
{
    for (const char* name : {"reference_blowup", "reference_subcritical", "smooth_growth", "dominance_sweep",
                             "sweep_3x3"}) {
        CAPTURE(name);
        const Scenario sc = load_scenario(kConfigs + "/" + name + ".ini");
        CHECK(sc.name == name);
        CHECK_NOTHROW(validate(sc));
    }
    const Scenario ref = load_scenario(kConfigs + "/reference_blowup.ini");
    CHECK(ref.params.chi == 10.0);
    CHECK(ref.params.delta == 2.0);
    CHECK(ref.cross_check);
    CHECK(ref.grid.cells == 512);
    CHECK(ref.moment.p == doctest::Approx(2.0 / 3.0));
    CHECK(ref.moment.s0 == doctest::Approx(0.125));
    const Scenario sweep = load_scenario(kConfigs + "/sweep_3x3.ini");
    REQUIRE(sweep.axes.size() == 2);
    CHECK(sweep.axes[0].key == "model.chi");
    CHECK(sweep.axes[1].values.size() == 3);
}

TEST_CASE("scenario validation errors name the field and constraint")
{
    const std::string k = expect_config_error("[model]\nmu = 1\nk = 0.9\n");
    CHECK(k.find("t.ini:3") != std::string::npos);
    CHECK(k.find("model.k") != std::string::npos);
    CHECK(k.find("k > 1") != std::string::npos);

    CHECK(expect_config_error("[grid]\ncells = 4\n").find("grid.cells") != std::string::npos);
    CHECK(expect_config_error("[model]\nbogus = 1\n").find("model.bogus") != std::string::npos);
    CHECK(expect_config_error("[extras]\na = 1\n").find("extras") != std::string::npos);
    CHECK(expect_config_error("[energy]\nsigma = 1.2\n").find("energy.sigma") != std::string::npos);
    CHECK(expect_config_error("[moment]\np = 0.1\n").find("moment.p") != std::string::npos);
    CHECK(expect_config_error("[profile]\nkind = spike\n").find("profile.kind") != std::string::npos);
    CHECK(expect_config_error("[sweep]\nmodel.zeta = 1, 2\n").find("sweep.model.zeta") != std::string::npos);
    CHECK(expect_config_error("[time]\ndt_min = 1\n").find("time.") != std::string::npos);
}

TEST_CASE("sweep axes")
{
    Scenario sc = small_scenario();
    CHECK(is_sweep_key("dominance"));
    CHECK(is_sweep_key("model.lambda"));
    CHECK(is_sweep_key("profile.cap"));
    CHECK_FALSE(is_sweep_key("grid.cells"));
    sc.params.xi = 0.5;
    sc.params.gamma = 2.0;
    sc.params.alpha = 4.0;
    const Scenario d = apply_axis(sc, "dominance", 3.0);
    CHECK(d.params.dominance() == doctest::Approx(3.0));
    CHECK(apply_axis(sc, "profile.L", 0.7).profile.L == 0.7);
    CHECK_THROWS_AS((void)apply_axis(sc, "grid.cells", 1.0), ParameterError);
}

TEST_CASE("dry run computes bounds without stepping")
{
    const Scenario sc = load_scenario(kConfigs + "/reference_blowup.ini");
    RunOptions opts;
    opts.dry_run = true;
    const RunResult r = run_scenario(sc, opts);
    CHECK(r.summary.outcome == "not_run");
    CHECK(r.summary.steps == 0);
    CHECK_FALSE(r.summary.T_num.has_value());
    REQUIRE(r.summary.T_LB_integral.has_value());
    CHECK(*r.summary.T_LB_explicit <= *r.summary.T_LB_integral);
    CHECK(r.summary.initial_mass == doctest::Approx(13.350512140695185).epsilon(1e-10));
    CHECK(r.trajectory.samples.empty());
    CHECK(exit_code(r.summary) == 0);
}

TEST_CASE("summary and trajectory serialisation")
{
    const RunResult r = run_scenario(small_scenario());
    CHECK(r.summary.outcome == "completed");
    const auto j = nlohmann::json::parse(summary_json(r.summary));
    CHECK(j["schema_version"] == kSummarySchema);
    CHECK(j["scenario"] == "small");
    CHECK(j["T_num"].is_null());
    CHECK(j.contains("T_LB_integral"));
    CHECK(j.contains("constants"));
    CHECK(j["constants"]["gamma2"] == 3.0);

    const std::string csv = diagnostics_csv(r.diagnostics);
    CHECK(csv.rfind(std::string(kCsvHeader) + "\n", 0) == 0);
    const auto lines = std::count(csv.begin(), csv.end(), '\n');
    CHECK(lines == static_cast<long>(r.diagnostics.size()) + 1);
    // 17 significant digits survive a round trip
    std::istringstream in(csv);
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    std::getline(in, row);
    const double mass = std::stod(row.substr(row.find(',', row.find(',') + 1) + 1));
    CHECK(mass == r.diagnostics[1].mass);

    const std::string prof = profiles_csv(r.trajectory, build_grid(3, 1.0, 32));
    CHECK(prof.rfind("t,r,u,v,w\n", 0) == 0);
}

TEST_CASE("exit codes")
{
    RunSummary s;
    for (const char* ok : {"completed", "blow_up", "not_run"}) {
        s.outcome = ok;
        CHECK(exit_code(s) == 0);
    }
    for (const char* bad : {"dt_underflow", "fault"}) {
        s.outcome = bad;
        CHECK(exit_code(s) == 2);
    }
}

TEST_CASE("repeated runs write identical files")
{
    const Scenario sc = small_scenario();
    const fs::path a = scratch("det_a"), b = scratch("det_b");
    write_outputs(sc, run_scenario(sc), a);
    write_outputs(sc, run_scenario(sc), b);
    for (const char* suffix : {".csv", ".summary.json", ".profiles.csv"}) {
        CAPTURE(suffix);
        const std::string fa = slurp(a / ("small" + std::string(suffix)));
        CHECK_FALSE(fa.empty());
        CHECK(fa == slurp(b / ("small" + std::string(suffix))));
    }
    CHECK(fs::exists(a / "small.log"));
}

TEST_CASE("sweep rows follow the axes whatever the thread count")
{
    Scenario sc = small_scenario();
    const fs::path d1 = scratch("sweep1"), d3 = scratch("sweep3");
    const SweepResult base = run_sweep(sc, {}, 2, d1 / "base");
    REQUIRE(base.rows.size() == 1);
    CHECK(base.rows[0].axis_values.empty());
    CHECK(base.rows[0].summary.outcome == "completed");

    sc.axes = {{"model.chi", {1.0, 2.0, 3.0}}, {"profile.cap", {1.0, 2.0, 4.0}}};
    const SweepResult one = run_sweep(sc, {}, 1, d1);
    const SweepResult three = run_sweep(sc, {}, 3, d3);
    REQUIRE(one.rows.size() == 9);
    for (std::size_t i = 0; i < 9; ++i) {
        CHECK(one.rows[i].axis_values[0] == 1.0 + static_cast<double>(i / 3));
        CHECK(one.rows[i].axis_values[1] == std::vector<double>{1.0, 2.0, 4.0}[i % 3]);
        CHECK(one.rows[i].subdir == three.rows[i].subdir);
    }
    CHECK(sweep_csv(one) == sweep_csv(three));
    CHECK(slurp(d1 / "small/run_0004/small.csv") == slurp(d3 / "small/run_0004/small.csv"));
}

TEST_CASE("failed sweep runs are recorded in their row")
{
    Scenario sc = small_scenario();
    sc.axes = {{"model.mu", {1.0, -1.0}}};
    const SweepResult r = run_sweep(sc, {}, 1, scratch("sweep_err"));
    REQUIRE(r.rows.size() == 2);
    CHECK(r.rows[0].error.empty());
    CHECK_FALSE(r.rows[1].error.empty());
    CHECK(r.rows[1].summary.outcome == "error");
    CHECK(sweep_csv(r).find("error") != std::string::npos);
}

TEST_CASE("command line exit codes and outputs")
{
    const fs::path dir = scratch("cli");
    std::ofstream(dir / "bad.ini") << "[model]\nk = 0.9\n";
    std::ofstream(dir / "unknown.ini") << "[model]\nkappa = 2\n";
    std::ofstream(dir / "small.ini") << kSmallScenario;

    CHECK(shell(kCli + " run " + (dir / "bad.ini").string()) == 1);
    CHECK(shell(kCli + " run " + (dir / "unknown.ini").string()) == 1);
    CHECK(shell(kCli + " run " + (dir / "missing.ini").string()) == 1);
    CHECK(shell(kCli + " bogus") == 1);

    CHECK(shell(kCli + " run " + (dir / "small.ini").string() + " --out " + (dir / "out").string()) == 0);
    CHECK(fs::exists(dir / "out/small.csv"));
    CHECK(fs::exists(dir / "out/small.summary.json"));
    CHECK(fs::exists(dir / "out/small.log"));

    CHECK(shell(kCli + " run " + (dir / "small.ini").string() + " --dry-run --out " + (dir / "dry").string()) == 0);
    CHECK(fs::exists(dir / "dry/small.summary.json"));
    CHECK_FALSE(fs::exists(dir / "dry/small.csv"));
    const auto j = nlohmann::json::parse(slurp(dir / "dry/small.summary.json"));
    CHECK(j["outcome"] == "not_run");

    CHECK(shell(kCli + " run " + (dir / "small.ini").string() + " --cells 64 --out " + (dir / "c64").string()) == 0);
    // the overridden grid reaches the profile snapshots: 5 samples of 64 cells
    const std::string prof = slurp(dir / "c64/small.profiles.csv");
    CHECK(std::count(prof.begin(), prof.end(), '\n') == 1 + 5 * 64);
    CHECK(shell(kCli + " bound " + (dir / "small.ini").string()) == 0);
}
