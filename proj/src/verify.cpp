#include "chemoblow/verify.hpp"

#include <chrono>
#include <cmath>
#include <numbers>

#include <json.hpp>

#include "chemoblow/bounds.hpp"
#include "chemoblow/elliptic.hpp"
#include "chemoblow/functionals.hpp"
#include "chemoblow/mass_formulation.hpp"
#include "chemoblow/runner.hpp"

namespace chemoblow {

namespace {

Scenario base_scenario(const std::string& name)
{
    Scenario sc;
    sc.name = name;
    sc.moment = default_moment_config(sc.params.n, sc.params.R);
    return sc;
}

/// Check that value <= limit.
VerifyCheck at_most(std::string name, double value, double limit, std::string detail = {})
{
    return {std::move(name), value <= limit, value, limit, limit - value, std::move(detail)};
}

/// Check that value >= limit.
VerifyCheck at_least(std::string name, double value, double limit, std::string detail = {})
{
    return {std::move(name), value >= limit, value, limit, value - limit, std::move(detail)};
}

double elliptic_mms_error(int cells)
{
    using std::numbers::pi;
    const RadialGrid grid = build_grid(3, 1.0, cells);
    const double b = 2.0;
    const auto exact = [](double r) { return std::cos(pi * r); };
    const auto source = [&](double r) {
        const double lap = r > 0.0 ? -pi * pi * std::cos(pi * r) - 2.0 * pi * std::sin(pi * r) / r
                                   : -3.0 * pi * pi;
        return -lap + b * exact(r);
    };
    const Field phi = solve_elliptic(grid, grid.cell_average(source), 1.0, b);
    return (phi - grid.cell_average(exact)).lpNorm<Eigen::Infinity>();
}

void elliptic_checks(std::vector<VerifyCheck>& out, bool full)
{
    const std::vector<int> levels = full ? std::vector<int>{64, 128, 256, 512} : std::vector<int>{64, 128, 256};
    std::vector<double> err;
    for (int cells : levels) err.push_back(elliptic_mms_error(cells));
    double lo = 1e300, hi = -1e300;
    for (std::size_t i = 1; i < err.size(); ++i) {
        const double order = std::log2(err[i - 1] / err[i]);
        lo = std::min(lo, order);
        hi = std::max(hi, order);
    }
    out.push_back(at_least("elliptic_mms_order_min", lo, 1.8));
    out.push_back(at_most("elliptic_mms_order_max", hi, 2.2));

    const RadialGrid grid = build_grid(3, 1.0, 512);
    const double c = 3.7;
    const Field v = solve_elliptic(grid, Field::Constant(grid.cells(), c), 1.5, 0.6);
    const double expect = 1.5 * c / 0.6;
    out.push_back(at_most("elliptic_constant_source", (v.array() - expect).abs().maxCoeff() / expect, 1e-12));
}

/// |Σ|cell| du| / Σ|cell||du| for the transport terms alone.
double conservation_defect(const RadialGrid& grid, const ModelParams& p, const Field& u, bool flip)
{
    SimState st = make_state(grid, p, u);
    RhsTerms terms;
    terms.reaction = false;
    terms.advective_sign_flip = flip;
    const Field du = rhs(st, p, grid, terms);
    const Field weighted = grid.volumes().cwiseProduct(du);
    return std::abs(weighted.sum()) / weighted.cwiseAbs().sum();
}

void transform_checks(std::vector<VerifyCheck>& out)
{
    const Scenario ref = reference_blowup_scenario();
    const RadialGrid grid = build_grid(3, 1.0, 512);
    const ModelParams& p = ref.params;
    const Field bump = grid.cell_average([](double r) { return 2.0 + std::exp(-9.0 * r * r); });

    out.push_back(at_most("transport_conservation", conservation_defect(grid, p, bump, false), 1e-12));
    out.push_back(at_least("mutation_sign_flip_detected", conservation_defect(grid, p, bump, true), 1e-6,
                           "conservation defect with the advective sign flip enabled"));

    const Field back = transform_U_to_u(transform_u_to_U(bump, grid), grid);
    out.push_back(at_most("transform_round_trip", ((back - bump).array() / bump.array()).abs().maxCoeff(), 1e-12));
    const Eigen::VectorXd U = transform_u_to_U(bump, grid);
    const double m = mass(bump, grid);
    out.push_back(at_most("transform_total_mass", std::abs(U(U.size() - 1) * grid.sphere_area() - m) / m, 1e-10));

    const SimState st = make_state(grid, p, bump);
    const Eigen::VectorXd s = mass_nodes(grid);
    Eigen::VectorXd V, W;
    solve_VW(U, p, s, V, W);
    const Eigen::VectorXd Vp = transform_u_to_U(st.v, grid);
    const Eigen::VectorXd Wp = transform_u_to_U(st.w, grid);
    const double dv = std::max((V - Vp).lpNorm<Eigen::Infinity>() / Vp.lpNorm<Eigen::Infinity>(),
                               (W - Wp).lpNorm<Eigen::Infinity>() / Wp.lpNorm<Eigen::Infinity>());
    out.push_back(at_most("signal_cross_solver", dv, 1e-3));

    const InitialProfile prof = make_profile(ref.profile.kind, ref.profile.L, ref.profile.cap, ref.profile.scale, p);
    const PrimalSolver primal(grid, p);
    const MassSolver msolver(grid, p);
    for (const auto& [name, u] : {std::pair<std::string, Field>{"smooth", bump}, {"reference", discretize(prof, grid)}}) {
        const SimState state = primal.make_state(u);
        const Eigen::VectorXd rp = transform_u_to_U(primal.rhs(state), grid);
        const Eigen::VectorXd rm = mass_rhs(msolver.make_state(transform_u_to_U(u, grid)), p);
        out.push_back(at_most("cross_formulation_rhs_" + name,
                              (rp - rm).lpNorm<Eigen::Infinity>() / rp.lpNorm<Eigen::Infinity>(), 1e-3));
    }
}

void bound_checks(std::vector<VerifyCheck>& out)
{
    double worst_order = -1e300;
    double worst_mono = -1e300;
    for (double lambda : {-1.0, 0.0, 1.0})
        for (double chi : {1.0, 5.0})
            for (double sigma : {1.75, 2.0, 3.0}) {
                ModelParams p;
                p.lambda = lambda;
                p.chi = chi;
                const BoundConstants c = compute_constants(p, GNConfig{10.0, sigma});
                double prev = std::numeric_limits<double>::infinity();
                for (double psi0 : {0.1, 1.0, 10.0, 100.0}) {
                    const double ti = lower_bound_integral(psi0, c);
                    const double te = lower_bound_explicit(psi0, c);
                    worst_order = std::max(worst_order, (te - ti) / ti);
                    worst_mono = std::max(worst_mono, ti - prev);
                    prev = ti;
                }
            }
    out.push_back(at_most("bound_explicit_le_integral", worst_order, 0.0));
    out.push_back(at_most("bound_decreasing_in_psi0", worst_mono, 0.0));

    ModelParams p;
    BoundConstants c = compute_constants(p, GNConfig{});
    c.B1 = 0.0;
    c.B2 = 0.0;
    const double psi0 = 3.0;
    const double closed = std::pow(psi0, 1.0 - c.gamma2) / (c.B3 * (c.gamma2 - 1.0));
    out.push_back(at_most("bound_closed_form", std::abs(lower_bound_integral(psi0, c) - closed) / closed, 1e-10));
    out.push_back(at_most("bound_explicit_closed_form", std::abs(lower_bound_explicit(psi0, c) - closed) / closed, 1e-10));
}

void run_checks(std::vector<VerifyCheck>& out, const Scenario& sc, const std::string& tag)
{
    RunOptions opts;
    const RunResult r = run_scenario(sc, opts);
    const RunSummary& s = r.summary;
    out.push_back(at_most("mass_bound_" + tag, s.max_mass_margin / s.m_star, 1e-6));
    out.push_back(at_most("mass_ode_" + tag, s.max_ode_margin_rel, 1e-6));
    out.push_back(at_most("I1_sign_" + tag, s.I1_max, 0.0));
    out.push_back(at_most("I3_sign_" + tag, s.I3_max, 0.0));
    out.push_back(at_most("I5_sign_" + tag, s.I5_max, 0.0));
}

}  // namespace

Scenario reference_blowup_scenario()
{
    Scenario sc = base_scenario("reference_blowup");
    sc.params.lambda = 1.0;
    sc.params.mu = 1.0;
    sc.params.k = 1.1;
    sc.params.chi = 10.0;
    sc.params.delta = 2.0;
    sc.profile = {ProfileKind::singular_capped, 0.0128, 200.0, 1.0};
    sc.control.t_end = 0.05;
    sc.control.sample_interval = 5e-6;
    sc.cross_check = true;
    return sc;
}

Scenario reference_subcritical_scenario()
{
    Scenario sc = reference_blowup_scenario();
    sc.name = "reference_subcritical";
    sc.params.chi = 0.5;
    sc.control.sample_interval = 5e-4;
    sc.cross_check = false;
    return sc;
}

std::vector<Scenario> smooth_scenarios()
{
    struct Row {
        const char* name;
        double lambda, chi, delta, L, cap;
    };
    const Row rows[] = {{"smooth_growth", 0.5, 1.0, 1.0, 0.3, 5.0},
                        {"smooth_decay", -0.5, 2.0, 2.0, 0.25, 4.0},
                        {"smooth_neutral", 0.0, 0.5, 1.5, 0.4, 3.0}};
    std::vector<Scenario> out;
    for (const Row& r : rows) {
        Scenario sc = base_scenario(r.name);
        sc.params.lambda = r.lambda;
        sc.params.chi = r.chi;
        sc.params.delta = r.delta;
        sc.profile = {ProfileKind::gaussian_bump, r.L, r.cap, 1.0};
        sc.control.t_end = 0.05;
        sc.control.sample_interval = 1e-3;
        out.push_back(sc);
    }
    return out;
}

std::vector<Scenario> mass_bound_scenarios()
{
    struct Row {
        const char* name;
        double lambda, chi;
        ProfileKind kind;
        double L, cap;
    };
    const Row rows[] = {{"mass_decay_attractive", -1.0, 3.0, ProfileKind::gaussian_bump, 0.3, 4.0},
                        {"mass_decay_repulsive", -1.0, 0.5, ProfileKind::gaussian_bump, 0.3, 4.0},
                        {"mass_neutral_attractive", 0.0, 3.0, ProfileKind::singular_capped, 0.0128, 60.0},
                        {"mass_neutral_repulsive", 0.0, 0.5, ProfileKind::gaussian_bump, 0.3, 4.0},
                        {"mass_growth_attractive", 1.0, 3.0, ProfileKind::gaussian_bump, 0.2, 0.5},
                        {"mass_growth_repulsive", 1.0, 0.5, ProfileKind::gaussian_bump, 0.2, 0.5}};
    std::vector<Scenario> out;
    for (const Row& r : rows) {
        Scenario sc = base_scenario(r.name);
        sc.params.lambda = r.lambda;
        sc.params.chi = r.chi;
        sc.profile = {r.kind, r.L, r.cap, 1.0};
        sc.control.t_end = 0.05;
        sc.control.sample_interval = 1e-3;
        out.push_back(sc);
    }
    return out;
}

bool VerifyReport::passed() const
{
    for (const VerifyCheck& c : checks)
        if (!c.passed) return false;
    return !checks.empty();
}

VerifyReport run_verify(const std::string& suite)
{
    if (suite != "fast" && suite != "full") throw ParameterError("unknown verify suite '" + suite + "'");
    const bool full = suite == "full";
    const auto start = std::chrono::steady_clock::now();
    VerifyReport report;
    report.suite = suite;
    auto& out = report.checks;

    elliptic_checks(out, full);
    transform_checks(out);
    bound_checks(out);

    // Reference blow-up run and its subcritical companion.
    const Scenario ref = reference_blowup_scenario();
    const RunSummary s = run_scenario(ref).summary;
    out.push_back({"reference_blow_up", s.outcome == "blow_up", s.T_num.value_or(-1.0), 0.0,
                   s.T_num.value_or(-1.0), "outcome " + s.outcome});
    out.push_back(at_most("reference_dt_collapse", s.dt_collapse, 0.1));
    if (s.T_num) {
        out.push_back(at_most("bound_integral_le_T_num", *s.T_LB_integral, *s.T_num));
        out.push_back(at_most("bound_explicit_le_integral_reference", *s.T_LB_explicit, *s.T_LB_integral));
    }
    out.push_back(at_least("phi_ratio_infimum_positive", s.phi_ratio_inf.value_or(-1.0), 0.0));
    if (s.cross_check) {
        out.push_back(at_most("cross_formulation_rhs_window", s.cross_check->rhs_max_rel, 1e-3));
        out.push_back(at_most("cross_formulation_U_window", s.cross_check->U_max_rel, 1e-2));
    }
    out.push_back(at_most("mass_bound_reference", s.max_mass_margin / s.m_star, 1e-6));

    Scenario sub = reference_subcritical_scenario();
    if (!full) sub.control.t_end = 0.01;
    const RunSummary ss = run_scenario(sub).summary;
    out.push_back({"subcritical_completes", ss.outcome == "completed", ss.t_final, sub.control.t_end,
                   ss.t_final - sub.control.t_end, "outcome " + ss.outcome});

    // Ψ' decomposition on a smooth window.
    std::vector<Scenario> smooth = smooth_scenarios();
    if (!full) {
        smooth.resize(1);
        smooth[0].grid.cells = 256;
        smooth[0].control.t_end = 0.02;
    }
    for (const Scenario& sc : smooth) {
        const RunSummary r = run_scenario(sc).summary;
        out.push_back(at_most("decomposition_" + sc.name, r.decomposition_max_rel, 0.02));
        out.push_back(at_most("I3_sign_" + sc.name, r.I3_max, 0.0));
    }

    std::vector<Scenario> mass_suite = mass_bound_scenarios();
    for (Scenario& sc : mass_suite) {
        if (!full) {
            sc.grid.cells = 128;
            sc.control.t_end = 0.02;
        }
        run_checks(out, sc, sc.name);
    }

    if (full) {
        // Grid refinement of the blow-up time.
        std::vector<double> T;
        for (int cells : {512, 1024, 2048}) {
            Scenario sc = ref;
            sc.grid.cells = cells;
            sc.cross_check = false;
            T.push_back(run_scenario(sc).summary.T_num.value_or(std::nan("")));
        }
        out.push_back(at_most("refinement_T_num_1024_2048", std::abs(T[1] - T[2]) / T[2], 0.05,
                              "T_num at 512/1024/2048 cells: " + std::to_string(T[0]) + " " + std::to_string(T[1]) +
                                  " " + std::to_string(T[2])));
    }

    report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

std::string verify_json(const VerifyReport& report)
{
    nlohmann::ordered_json checks = nlohmann::ordered_json::array();
    for (const VerifyCheck& c : report.checks)
        checks.push_back({{"name", c.name},
                          {"passed", c.passed},
                          {"value", c.value},
                          {"limit", c.limit},
                          {"margin", c.margin},
                          {"detail", c.detail}});
    nlohmann::ordered_json j{{"suite", report.suite}, {"passed", report.passed()}, {"checks", checks}};
    return j.dump(2) + "\n";
}

}  // namespace chemoblow
