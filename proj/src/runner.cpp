#include "chemoblow/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <thread>

#include <json.hpp>

#include "chemoblow/mass_formulation.hpp"

namespace chemoblow {

namespace {

using json = nlohmann::ordered_json;

std::string fmt17(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json constants_json(const BoundConstants& c)
{
    return json{{"sigma", c.sigma},       {"C_GN", c.C_GN},         {"theta0", c.theta0},
                {"beta0", c.beta0},       {"eps1", c.eps1},         {"c1", c.c1},
                {"c2", c.c2},             {"c3", c.c3},             {"c1_tilde", c.c1_tilde},
                {"c2_tilde", c.c2_tilde}, {"c3_tilde", c.c3_tilde}, {"B1", c.B1},
                {"B2", c.B2},             {"B3", c.B3},             {"B4", c.B4},
                {"gamma1", c.gamma1},     {"gamma2", c.gamma2},     {"A", optional_number(c.A)}};
}

void write_file(const std::filesystem::path& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

CrossCheck cross_check(const PrimalSolver& primal, const Trajectory& traj, const Scenario& sc, double window_end)
{
    const RadialGrid& grid = primal.grid();
    const MassSolver mass(grid, sc.params);
    StepControl ctrl = sc.control;
    ctrl.t_end = window_end;

    CrossCheck cc;
    cc.window_end = window_end;
    const MassTrajectory mt = mass.run(transform_u_to_U(traj.samples.front().u, grid), ctrl);
    cc.mass_outcome = std::string(to_string(mt.outcome.status));

    std::size_t j = 0;
    for (const SimState& st : traj.samples) {
        if (st.t > window_end) break;
        if (st.status == Status::fault || st.status == Status::dt_underflow) continue;
        const Eigen::VectorXd Up = transform_u_to_U(st.u, grid);
        const Eigen::VectorXd rp = transform_u_to_U(primal.rhs(st), grid);
        const Eigen::VectorXd rm = mass_rhs(mass.make_state(Up, st.t), sc.params);
        const double scale = rp.lpNorm<Eigen::Infinity>();
        if (scale > 0.0) cc.rhs_max_rel = std::max(cc.rhs_max_rel, (rp - rm).lpNorm<Eigen::Infinity>() / scale);

        while (j < mt.samples.size() && mt.samples[j].t < st.t) ++j;
        if (j < mt.samples.size() && mt.samples[j].t == st.t && mt.samples[j].status != Status::fault &&
            mt.samples[j].status != Status::dt_underflow) {
            const double total = Up(Up.size() - 1);
            cc.U_max_rel = std::max(cc.U_max_rel, (Up - mt.samples[j].U).lpNorm<Eigen::Infinity>() / total);
            ++cc.samples_compared;
        }
    }
    return cc;
}

void summarize_diagnostics(RunSummary& s, const std::vector<DiagnosticsRecord>& rows)
{
    s.I1_max = s.I3_max = s.I5_max = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const DiagnosticsRecord& r = rows[i];
        s.I1_max = std::max(s.I1_max, r.I1);
        s.I3_max = std::max(s.I3_max, r.I3);
        s.I5_max = std::max(s.I5_max, r.I5);
        if (i == 0 || i + 1 == rows.size()) continue;
        const double sum = r.I1 + r.I2 + r.I3 + r.I4 + r.I5;
        const double denom = std::max(std::abs(sum), std::abs(r.psi_rate_numeric));
        if (denom > 0.0)
            s.decomposition_max_rel = std::max(s.decomposition_max_rel, std::abs(sum - r.psi_rate_numeric) / denom);
    }
}

}  // namespace

std::filesystem::path output_dir(const Scenario& sc, const RunOptions& options)
{
    if (options.out_dir) return *options.out_dir;
    return sc.output_dir.empty() ? std::filesystem::path(".") : std::filesystem::path(sc.output_dir);
}

RunResult run_scenario(const Scenario& scenario, const RunOptions& options)
{
    const auto start = std::chrono::steady_clock::now();
    Scenario sc = scenario;
    if (options.cells) sc.grid.cells = *options.cells;
    validate(sc);

    RunResult result;
    RunSummary& s = result.summary;
    s.scenario = sc.name;

    const RadialGrid& grid = result.grid.emplace(build_grid(sc.params.n, sc.params.R, sc.grid.cells, sc.grid.stretching));
    const InitialProfile profile = make_profile(sc.profile.kind, sc.profile.L, sc.profile.cap, sc.profile.scale, sc.params);
    const Field u0 = discretize(profile, grid);
    s.initial_mass = mass(u0, grid);
    s.psi0 = psi(u0, grid, sc.sigma);
    s.m_star = m_star(sc.params, s.initial_mass);
    const BoundConstants constants = compute_constants(sc.params, sc.gn, s.psi0);
    s.constants = constants;
    s.T_LB_integral = lower_bound_integral(s.psi0, constants);
    s.T_LB_explicit = lower_bound_explicit(s.psi0, constants);

    if (!options.dry_run) {
        const PrimalSolver primal(grid, sc.params);
        result.trajectory = primal.run(u0, sc.control);
        const RunOutcome& out = result.trajectory.outcome;
        s.outcome = std::string(to_string(out.status));
        s.T_num = out.t_blowup;
        s.t_final = out.t_final;
        s.steps = out.steps;
        s.rejected = out.rejected;
        s.dt_collapse = out.dt_collapse();
        s.message = out.message;

        Trajectory usable;
        for (const SimState& st : result.trajectory.samples)
            if (st.status != Status::fault && st.status != Status::dt_underflow) usable.samples.push_back(st);

        DiagnosticsConfig dc;
        dc.sigma = sc.sigma;
        dc.moment = sc.moment;
        dc.gn = sc.gn;
        result.diagnostics = diagnose(usable, grid, sc.params, dc);
        summarize_diagnostics(s, result.diagnostics);

        const MassBoundReport mb = check_mass_bound(usable, grid, sc.params);
        s.max_mass_margin = mb.max_margin;
        s.max_ode_margin_rel = mb.max_ode_margin_rel;

        for (const SimState& st : usable.samples) s.gn_ratio_max = std::max(s.gn_ratio_max, gn_ratio(grid, st.u, sc.sigma));

        std::vector<double> t, phis;
        for (const DiagnosticsRecord& r : result.diagnostics) {
            t.push_back(r.t);
            phis.push_back(r.phi);
        }
        const double window = std::min(0.5, s.T_num.value_or(out.t_final));
        const PhiGrowthReport pg = phi_growth_report(t, phis, sc.moment, window);
        if (!std::isnan(pg.infimum)) s.phi_ratio_inf = pg.infimum;
        s.phi_hypothesis_violated = pg.hypothesis_violated;

        if (sc.cross_check && !usable.samples.empty()) {
            const double window_end = s.T_num ? 0.8 * *s.T_num : usable.samples.back().t;
            s.cross_check = cross_check(primal, usable, sc, window_end);
        }
    }
    result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

int exit_code(const RunSummary& summary)
{
    if (summary.outcome == "dt_underflow" || summary.outcome == "fault") return 2;
    return 0;
}

std::string summary_json(const RunSummary& s)
{
    json j;
    j["schema_version"] = kSummarySchema;
    j["scenario"] = s.scenario;
    j["outcome"] = s.outcome;
    j["T_num"] = optional_number(s.T_num);
    j["T_num_below_half"] = s.T_num ? json(*s.T_num < 0.5) : json(nullptr);
    j["t_final"] = s.t_final;
    j["steps"] = s.steps;
    j["rejected_steps"] = s.rejected;
    j["dt_collapse"] = s.dt_collapse;
    j["initial_mass"] = s.initial_mass;
    j["psi0"] = s.psi0;
    j["T_LB_integral"] = optional_number(s.T_LB_integral);
    j["T_LB_explicit"] = optional_number(s.T_LB_explicit);
    j["m_star"] = s.m_star;
    j["max_mass_margin"] = s.max_mass_margin;
    j["max_ode_margin_rel"] = s.max_ode_margin_rel;
    j["phi_ratio_inf"] = optional_number(s.phi_ratio_inf);
    j["phi_hypothesis_violated"] = s.phi_hypothesis_violated;
    j["gn_ratio_max"] = s.gn_ratio_max;
    j["decomposition_max_rel"] = s.decomposition_max_rel;
    j["I1_max"] = s.I1_max;
    j["I3_max"] = s.I3_max;
    j["I5_max"] = s.I5_max;
    j["constants"] = s.constants ? constants_json(*s.constants) : json(nullptr);
    if (s.cross_check) {
        const CrossCheck& c = *s.cross_check;
        j["cross_check"] = {{"window_end", c.window_end},
                            {"rhs_max_rel", c.rhs_max_rel},
                            {"U_max_rel", c.U_max_rel},
                            {"samples_compared", c.samples_compared},
                            {"mass_outcome", c.mass_outcome}};
    } else {
        j["cross_check"] = nullptr;
    }
    j["message"] = s.message;
    return j.dump(2) + "\n";
}

std::string diagnostics_csv(const std::vector<DiagnosticsRecord>& rows)
{
    std::string out = std::string(kCsvHeader) + "\n";
    for (const DiagnosticsRecord& r : rows) {
        const double values[] = {r.t,  r.dt, r.mass, r.linf, r.psi, r.phi,
                                 r.I1, r.I2, r.I3,   r.I4,   r.I5,  r.psi_rate_numeric,
                                 r.residual_mass_bound, r.residual_psi_ineq, r.phi_ratio};
        for (std::size_t i = 0; i < std::size(values); ++i) {
            if (i) out += ',';
            out += fmt17(values[i]);
        }
        out += '\n';
    }
    return out;
}

std::string profiles_csv(const Trajectory& traj, const RadialGrid& grid, int snapshots)
{
    std::string out = "t,r,u,v,w\n";
    const std::size_t m = traj.samples.size();
    if (m == 0) return out;
    std::vector<std::size_t> picks;
    const std::size_t want = std::min<std::size_t>(m, static_cast<std::size_t>(std::max(snapshots, 1)));
    for (std::size_t i = 0; i < want; ++i) {
        const std::size_t idx = want == 1 ? m - 1 : i * (m - 1) / (want - 1);
        if (picks.empty() || picks.back() != idx) picks.push_back(idx);
    }
    const auto& r = grid.centers();
    for (std::size_t idx : picks) {
        const SimState& st = traj.samples[idx];
        if (st.u.size() != r.size()) continue;
        for (Eigen::Index i = 0; i < r.size(); ++i)
            out += fmt17(st.t) + ',' + fmt17(r(i)) + ',' + fmt17(st.u(i)) + ',' + fmt17(st.v(i)) + ',' +
                   fmt17(st.w(i)) + '\n';
    }
    return out;
}

void write_outputs(const Scenario& sc, const RunResult& result, const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    write_file(dir / (sc.name + ".summary.json"), summary_json(result.summary));
    if (result.summary.outcome != "not_run") {
        write_file(dir / (sc.name + ".csv"), diagnostics_csv(result.diagnostics));
        const RadialGrid grid =
            result.grid ? *result.grid : build_grid(sc.params.n, sc.params.R, sc.grid.cells, sc.grid.stretching);
        write_file(dir / (sc.name + ".profiles.csv"), profiles_csv(result.trajectory, grid));
    }
    char buf[96];
    std::snprintf(buf, sizeof buf, "wall_seconds=%.3f\n", result.wall_seconds);
    write_file(dir / (sc.name + ".log"), "scenario=" + sc.name + "\noutcome=" + result.summary.outcome + "\n" + buf);
}

int sweep_threads()
{
    int threads = static_cast<int>(std::thread::hardware_concurrency());
    if (const char* env = std::getenv("CHEMOBLOW_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) threads = static_cast<int>(v);
    }
    return std::max(threads, 1);
}

SweepResult run_sweep(const Scenario& base, const RunOptions& options, int threads, const std::filesystem::path& dir)
{
    SweepResult sweep;
    std::size_t total = 1;
    for (const SweepAxis& axis : base.axes) {
        sweep.axis_keys.push_back(axis.key);
        total *= axis.values.size();
    }
    sweep.rows.resize(total);
    for (std::size_t idx = 0; idx < total; ++idx) {
        std::size_t rest = idx;
        std::vector<double>& values = sweep.rows[idx].axis_values;
        values.resize(base.axes.size());
        for (std::size_t a = base.axes.size(); a-- > 0;) {
            values[a] = base.axes[a].values[rest % base.axes[a].values.size()];
            rest /= base.axes[a].values.size();
        }
        char name[32];
        std::snprintf(name, sizeof name, "run_%04zu", idx);
        sweep.rows[idx].subdir = base.name + "/" + name;
    }

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t idx = next++; idx < total; idx = next++) {
            SweepRow& row = sweep.rows[idx];
            try {
                Scenario sc = base;
                sc.axes.clear();
                for (std::size_t a = 0; a < base.axes.size(); ++a) sc = apply_axis(sc, base.axes[a].key, row.axis_values[a]);
                const RunResult result = run_scenario(sc, options);
                row.summary = result.summary;
                write_outputs(sc, result, dir / row.subdir);
            } catch (const std::exception& e) {
                row.summary.scenario = base.name;
                row.summary.outcome = "error";
                row.error = e.what();
            }
        }
    };
    const int n_threads = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), total));
    std::vector<std::thread> pool;
    for (int i = 1; i < n_threads; ++i) pool.emplace_back(worker);
    worker();
    for (std::thread& t : pool) t.join();
    return sweep;
}

std::string sweep_csv(const SweepResult& sweep)
{
    std::string out = "index";
    for (const std::string& key : sweep.axis_keys) out += ',' + key;
    out += ",subdir,outcome,T_num,T_LB_integral,T_LB_explicit,m_star,max_mass_margin,phi_ratio_inf,error\n";
    auto opt = [](const std::optional<double>& v) { return v ? fmt17(*v) : std::string(); };
    for (std::size_t i = 0; i < sweep.rows.size(); ++i) {
        const SweepRow& row = sweep.rows[i];
        out += std::to_string(i);
        for (double v : row.axis_values) out += ',' + fmt17(v);
        std::string error = row.error;
        std::replace(error.begin(), error.end(), ',', ';');
        std::replace(error.begin(), error.end(), '\n', ' ');
        const RunSummary& s = row.summary;
        out += ',' + row.subdir + ',' + s.outcome + ',' + opt(s.T_num) + ',' + opt(s.T_LB_integral) + ',' +
               opt(s.T_LB_explicit) + ',' + fmt17(s.m_star) + ',' + fmt17(s.max_mass_margin) + ',' +
               opt(s.phi_ratio_inf) + ',' + error + '\n';
    }
    return out;
}

}  // namespace chemoblow
