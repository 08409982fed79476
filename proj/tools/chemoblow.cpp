#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "chemoblow/runner.hpp"
#include "chemoblow/scenario.hpp"
#include "chemoblow/verify.hpp"

namespace {

using namespace chemoblow;

constexpr int kConfigError = 1;
constexpr int kVerifyFailure = 3;

struct Flags {
    std::string config;
    std::string suite = "fast";
    bool dry_run = false;
    std::optional<int> cells;
    std::optional<std::string> out;
};

RunOptions options_from(const Flags& f)
{
    RunOptions o;
    o.dry_run = f.dry_run;
    o.cells = f.cells;
    o.out_dir = f.out;
    return o;
}

std::optional<Scenario> load(const std::string& path)
{
    try {
        return load_scenario(path);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return std::nullopt;
    }
}

int cmd_run(const Flags& f)
{
    const auto sc = load(f.config);
    if (!sc) return kConfigError;
    const RunOptions opts = options_from(f);
    RunResult result;
    try {
        result = run_scenario(*sc, opts);
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kConfigError;
    }
    const auto dir = output_dir(*sc, opts);
    write_outputs(*sc, result, dir);
    const RunSummary& s = result.summary;
    std::printf("%s: %s", s.scenario.c_str(), s.outcome.c_str());
    if (s.T_num) std::printf(" T_num=%.6g", *s.T_num);
    std::printf(" T_LB_integral=%.6g T_LB_explicit=%.6g -> %s\n", s.T_LB_integral.value_or(0.0),
                s.T_LB_explicit.value_or(0.0), dir.string().c_str());
    return exit_code(s);
}

int cmd_bound(const Flags& f)
{
    const auto sc = load(f.config);
    if (!sc) return kConfigError;
    RunOptions opts = options_from(f);
    opts.dry_run = true;
    try {
        std::fputs(summary_json(run_scenario(*sc, opts).summary).c_str(), stdout);
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kConfigError;
    }
    return 0;
}

int cmd_sweep(const Flags& f)
{
    const auto sc = load(f.config);
    if (!sc) return kConfigError;
    const RunOptions opts = options_from(f);
    const auto dir = output_dir(*sc, opts);
    const SweepResult sweep = run_sweep(*sc, opts, sweep_threads(), dir);
    std::filesystem::create_directories(dir);
    std::ofstream(dir / (sc->name + ".sweep.csv"), std::ios::binary) << sweep_csv(sweep);
    int failed = 0;
    for (const SweepRow& row : sweep.rows) {
        std::printf("%s: %s%s%s\n", row.subdir.c_str(), row.summary.outcome.c_str(), row.error.empty() ? "" : " ",
                    row.error.c_str());
        if (!row.error.empty()) ++failed;
    }
    std::printf("%zu runs, %d failed -> %s\n", sweep.rows.size(), failed, (dir / (sc->name + ".sweep.csv")).string().c_str());
    return 0;
}

int cmd_verify(const Flags& f)
{
    const VerifyReport report = run_verify(f.suite);
    for (const VerifyCheck& c : report.checks)
        std::printf("%s %-40s value=%-14.6g limit=%-12.6g %s\n", c.passed ? "PASS" : "FAIL", c.name.c_str(), c.value,
                    c.limit, c.detail.c_str());
    std::printf("verify %s: %s (%.1f s)\n", report.suite.c_str(), report.passed() ? "passed" : "FAILED",
                report.wall_seconds);
    if (f.out) {
        std::filesystem::create_directories(*f.out);
        std::ofstream(std::filesystem::path(*f.out) / ("verify_" + report.suite + ".json"), std::ios::binary)
            << verify_json(report);
    }
    return report.passed() ? 0 : kVerifyFailure;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Radial attraction-repulsion chemotaxis simulator"};
    app.require_subcommand(1);
    Flags flags;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--cells", flags.cells, "Override the grid cell count")->check(CLI::Range(16, 1 << 20));
        sub->add_option("--out", flags.out, "Output directory");
    };

    auto* run = app.add_subcommand("run", "Run one scenario");
    run->add_option("config", flags.config, "Scenario file")->required();
    run->add_flag("--dry-run", flags.dry_run, "Constants and bounds only");
    add_common(run);

    auto* sweep = app.add_subcommand("sweep", "Run the Cartesian product of the [sweep] axes");
    sweep->add_option("config", flags.config, "Scenario file")->required();
    sweep->add_flag("--dry-run", flags.dry_run, "Constants and bounds only");
    add_common(sweep);

    auto* bound = app.add_subcommand("bound", "Print the constant ledger and lower bounds");
    bound->add_option("config", flags.config, "Scenario file")->required();
    add_common(bound);

    auto* verify = app.add_subcommand("verify", "Run a verification suite");
    verify->add_option("suite", flags.suite, "fast or full")->check(CLI::IsMember({"fast", "full"}));
    verify->add_option("--out", flags.out, "Directory for the JSON report");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kConfigError;
    }

    try {
        if (*run) return cmd_run(flags);
        if (*sweep) return cmd_sweep(flags);
        if (*bound) return cmd_bound(flags);
        return cmd_verify(flags);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
