#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "chemoblow/bounds.hpp"
#include "chemoblow/functionals.hpp"
#include "chemoblow/parabolic.hpp"
#include "chemoblow/scenario.hpp"

namespace chemoblow {

inline constexpr const char* kSummarySchema = "chemoblow-summary-v1";

/// Fixed CSV column order of the per-run trajectory file.
inline constexpr const char* kCsvHeader =
    "t,dt,mass,linf,psi,phi,I1,I2,I3,I4,I5,psi_rate_numeric,residual_mass_bound,residual_psi_ineq,phi_ratio";

struct RunOptions {
    /// Constants and bounds only, no time stepping.
    bool dry_run = false;
    std::optional<int> cells;
    std::optional<std::string> out_dir;
};

/// Primal vs mass-formulation comparison on [0, window_end].
struct CrossCheck {
    double window_end = 0.0;
    /// max over samples of ‖T(rhs_primal) - rhs_mass‖_∞ / ‖T(rhs_primal)‖_∞
    double rhs_max_rel = 0.0;
    /// max over common samples of ‖U_primal - U_mass‖_∞ / U_primal(R^n)
    double U_max_rel = 0.0;
    int samples_compared = 0;
    std::string mass_outcome;
};

struct RunSummary {
    std::string scenario;
    /// Status name, or "not_run" for a dry run.
    std::string outcome = "not_run";
    std::optional<double> T_num;
    double t_final = 0.0;
    long steps = 0;
    long rejected = 0;
    double dt_collapse = 1.0;
    double initial_mass = 0.0;
    double psi0 = 0.0;
    std::optional<double> T_LB_integral;
    std::optional<double> T_LB_explicit;
    std::optional<BoundConstants> constants;
    double m_star = 0.0;
    double max_mass_margin = 0.0;
    double max_ode_margin_rel = 0.0;
    std::optional<double> phi_ratio_inf;
    bool phi_hypothesis_violated = false;
    double gn_ratio_max = 0.0;
    /// max over interior samples of |ΣI - Ψ'| / max(|ΣI|, |Ψ'|)
    double decomposition_max_rel = 0.0;
    double I1_max = 0.0, I3_max = 0.0, I5_max = 0.0;
    std::optional<CrossCheck> cross_check;
    std::string message;
};

struct RunResult {
    RunSummary summary;
    /// Grid the run used, after any cell-count override.
    std::optional<RadialGrid> grid;
    Trajectory trajectory;
    std::vector<DiagnosticsRecord> diagnostics;
    double wall_seconds = 0.0;
};

/// Runs one scenario (no file output).
[[nodiscard]] RunResult run_scenario(const Scenario& scenario, const RunOptions& options = {});

/// Exit code of the CLI for a run outcome: 0 completed, blow_up or dry run;
/// 2 dt_underflow or fault.
[[nodiscard]] int exit_code(const RunSummary& summary);

[[nodiscard]] std::string summary_json(const RunSummary& summary);
[[nodiscard]] std::string diagnostics_csv(const std::vector<DiagnosticsRecord>& rows);
/// Long-format snapshots (t, r, u, v, w) at up to `snapshots` sample times.
[[nodiscard]] std::string profiles_csv(const Trajectory& traj, const RadialGrid& grid, int snapshots = 9);

/// Writes <name>.csv, <name>.profiles.csv, <name>.summary.json and the wall
/// time log <name>.log into dir (a dry run writes the summary and log only).
void write_outputs(const Scenario& scenario, const RunResult& result, const std::filesystem::path& dir);

[[nodiscard]] std::filesystem::path output_dir(const Scenario& scenario, const RunOptions& options);

struct SweepRow {
    std::vector<double> axis_values;
    RunSummary summary;
    std::string error;
    std::string subdir;
};

struct SweepResult {
    std::vector<std::string> axis_keys;
    std::vector<SweepRow> rows;
};

/// Parallelism from CHEMOBLOW_THREADS, else the hardware concurrency.
[[nodiscard]] int sweep_threads();

/// Cartesian product of the axes, rows in lexicographic index order (first
/// axis slowest) whatever the completion order. Each run writes into its own
/// subdirectory <dir>/<name>/run_<index>; failures are recorded in the row.
[[nodiscard]] SweepResult run_sweep(const Scenario& scenario, const RunOptions& options, int threads,
                                    const std::filesystem::path& dir);
[[nodiscard]] std::string sweep_csv(const SweepResult& sweep);

}  // namespace chemoblow
