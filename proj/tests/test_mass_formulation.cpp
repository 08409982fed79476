#include <doctest.h>

#include <cmath>

#include "chemoblow/elliptic.hpp"
#include "chemoblow/mass_formulation.hpp"
#include "chemoblow/verify.hpp"

using namespace chemoblow;

namespace {

double rel_sup(const Eigen::VectorXd& a, const Eigen::VectorXd& b)
{
    return (a - b).cwiseAbs().maxCoeff() / b.cwiseAbs().maxCoeff();
}

ModelParams reference_params() { return reference_blowup_scenario().params; }

Field reference_u(const RadialGrid& grid)
{
    const Scenario sc = reference_blowup_scenario();
    return discretize(make_profile(sc.profile.kind, sc.profile.L, sc.profile.cap, sc.profile.scale, sc.params), grid);
}

Field smooth_u(const RadialGrid& grid, const ModelParams& p)
{
    return discretize(make_profile(ProfileKind::gaussian_bump, 0.3, 4.0, 1.0, p), grid);
}

}  // namespace

TEST_CASE("nodes are the images of the faces")
{
    const auto grid = build_grid(3, 1.0, 16);
    const Eigen::VectorXd s = mass_nodes(grid);
    REQUIRE(s.size() == 17);
    CHECK(s(0) == 0.0);
    CHECK(s(16) == 1.0);
    CHECK(s(8) == doctest::Approx(0.125).epsilon(1e-15));
}

TEST_CASE("constant density gives a linear cumulative mass")
{
    const auto grid = build_grid(3, 1.0, 64, Stretching::geometric(0.98));
    const Eigen::VectorXd s = mass_nodes(grid);
    const Eigen::VectorXd U = transform_u_to_U(Field::Constant(64, 2.5), grid);
    CHECK((U - 2.5 * s / 3.0).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("transform round trip and total mass")
{
    ModelParams p;
    const auto grid = build_grid(3, 1.0, 512);
    for (const Field& u : {smooth_u(grid, p), reference_u(grid)}) {
        const Eigen::VectorXd U = transform_u_to_U(u, grid);
        CHECK(U(0) == 0.0);
        CHECK(rel_sup(transform_U_to_u(U, grid), u) <= 1e-12);
        const double mass = grid.integrate(u);
        CHECK(std::abs(U(512) * grid.sphere_area() - mass) / mass <= 1e-10);
        for (Eigen::Index j = 1; j <= 512; ++j) CHECK(U(j) >= U(j - 1));
    }
    CHECK_THROWS_AS((void)transform_U_to_u(Eigen::VectorXd::Zero(10), grid), ParameterError);
}

TEST_CASE("signals of a constant density")
{
    ModelParams p;
    p.alpha = 1.5;
    p.beta = 0.6;
    p.gamma = 0.8;
    p.delta = 2.0;
    const auto grid = build_grid(3, 1.0, 256);
    const Eigen::VectorXd s = mass_nodes(grid);
    const double c = 3.0;
    const Eigen::VectorXd U = c * s / 3.0;
    Eigen::VectorXd V, W;
    solve_VW(U, p, s, V, W);
    CHECK(rel_sup(V, p.alpha * c / p.beta * s / 3.0) <= 1e-8);
    CHECK(rel_sup(W, p.gamma * c / p.delta * s / 3.0) <= 1e-8);
}

TEST_CASE("signal problems are linear in U")
{
    ModelParams p;
    p.beta = 0.4;
    const auto grid = build_grid(3, 1.0, 128);
    const Eigen::VectorXd s = mass_nodes(grid);
    const Eigen::VectorXd U1 = transform_u_to_U(reference_u(grid), grid);
    const Eigen::VectorXd U2 = transform_u_to_U(smooth_u(grid, p), grid);
    Eigen::VectorXd V1, W1, V2, W2, V, W;
    solve_VW(U1, p, s, V1, W1);
    solve_VW(U2, p, s, V2, W2);
    solve_VW(2.0 * U1 - 3.0 * U2, p, s, V, W);
    CHECK((V - (2.0 * V1 - 3.0 * V2)).cwiseAbs().maxCoeff() <= 1e-12 * V1.cwiseAbs().maxCoeff());
    CHECK((W - (2.0 * W1 - 3.0 * W2)).cwiseAbs().maxCoeff() <= 1e-12 * W1.cwiseAbs().maxCoeff());
}

TEST_CASE("signals agree with the transformed primal elliptic solves")
{
    const ModelParams p = reference_params();
    const auto grid = build_grid(3, 1.0, 512);
    const Eigen::VectorXd s = mass_nodes(grid);
    for (const Field& u : {smooth_u(grid, p), reference_u(grid)}) {
        const Eigen::VectorXd U = transform_u_to_U(u, grid);
        Eigen::VectorXd V, W;
        solve_VW(U, p, s, V, W);
        const Field v = solve_elliptic(grid, u, p.alpha, p.beta);
        const Field w = solve_elliptic(grid, u, p.gamma, p.delta);
        CHECK(rel_sup(V, transform_u_to_U(v, grid)) <= 1e-3);
        CHECK(rel_sup(W, transform_u_to_U(w, grid)) <= 1e-3);
    }
}

TEST_CASE("all terms cancel for a constant density with balanced rates")
{
    ModelParams p;
    p.lambda = 0.0;
    p.mu = 0.0;
    p.chi = 2.0;
    p.alpha = 1.5;
    p.xi = 3.0;
    p.gamma = 1.0;
    p.beta = p.delta = 0.7;
    const auto grid = build_grid(3, 1.0, 128);
    const MassSolver solver(grid, p);
    const MassState st = solver.make_state(4.0 * solver.nodes() / 3.0);
    const Eigen::VectorXd du = mass_rhs(st, p);
    CHECK(du.cwiseAbs().maxCoeff() <= 1e-9 * st.U.maxCoeff());
}

TEST_CASE("term isolation without taxis or degradation")
{
    ModelParams p;
    p.lambda = 0.8;
    p.mu = 0.0;
    p.chi = 0.0;
    p.xi = 0.0;
    const auto grid = build_grid(3, 1.0, 128);
    const MassSolver solver(grid, p);
    const MassState st = solver.make_state(transform_u_to_U(smooth_u(grid, p), grid));
    const MassRhsTerms t = mass_rhs_terms(st, p);
    CHECK(t.attraction.cwiseAbs().maxCoeff() == 0.0);
    CHECK(t.repulsion.cwiseAbs().maxCoeff() == 0.0);
    CHECK(t.degradation.cwiseAbs().maxCoeff() == 0.0);
    CHECK((t.growth - p.lambda * st.U).cwiseAbs().maxCoeff() == 0.0);
    CHECK((mass_rhs(st, p) - (t.diffusion + p.lambda * st.U)).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(t.diffusion(0) == 0.0);
    CHECK(t.diffusion(128) == 0.0);
}

TEST_CASE("degradation term is nonpositive and cumulative")
{
    const ModelParams p = reference_params();
    const auto grid = build_grid(3, 1.0, 256);
    const MassSolver solver(grid, p);
    const MassState st = solver.make_state(transform_u_to_U(reference_u(grid), grid));
    const MassRhsTerms t = mass_rhs_terms(st, p);
    CHECK(t.degradation(0) == 0.0);
    for (Eigen::Index j = 1; j <= 256; ++j) {
        CHECK(t.degradation(j) <= 0.0);
        CHECK(t.degradation(j) <= t.degradation(j - 1));
    }
    // at s = R^n the cumulative integral is -(μ/|S^{n-1}|) ∫_Ω u^k
    const Field u = transform_U_to_u(st.U, grid);
    const double total = -p.mu * grid.integrate(u.array().pow(p.k).matrix()) / grid.sphere_area();
    CHECK(t.degradation(256) == doctest::Approx(total).epsilon(1e-12));
}

TEST_CASE("mass rhs matches the transformed primal rhs")
{
    const ModelParams p = reference_params();
    const auto grid = build_grid(3, 1.0, 512);
    const MassSolver solver(grid, p);
    for (const Field& u : {smooth_u(grid, p), reference_u(grid)}) {
        const SimState prim = make_state(grid, p, u);
        const Eigen::VectorXd target = transform_u_to_U(rhs(prim, p, grid), grid);
        const MassState st = solver.make_state(transform_u_to_U(u, grid));
        const Eigen::VectorXd got = mass_rhs(st, p);
        CHECK((got - target).cwiseAbs().maxCoeff() <= 1e-3 * target.cwiseAbs().maxCoeff());
        CHECK(std::isfinite(boundary_closure_residual(st, p)));
    }
}

TEST_CASE("constant equilibrium stays put in the mass variables")
{
    ModelParams p;
    p.lambda = 1.0;
    p.chi = 4.0;
    const auto grid = build_grid(3, 1.0, 64);
    const double c = *constant_equilibrium(p);
    StepControl ctrl;
    ctrl.t_end = 0.01;
    ctrl.sample_interval = 0.005;
    const MassSolver solver(grid, p);
    const auto traj = solver.run(c * solver.nodes() / 3.0, ctrl);
    REQUIRE(traj.outcome.status == Status::completed);
    CHECK(rel_sup(traj.samples.back().U, c * solver.nodes() / 3.0) <= 1e-8);
}

TEST_CASE("mass runs keep U monotone and handle the zero horizon")
{
    const ModelParams p = reference_params();
    const auto grid = build_grid(3, 1.0, 256);
    const Eigen::VectorXd U0 = transform_u_to_U(reference_u(grid), grid);
    StepControl ctrl;
    ctrl.t_end = 2e-4;
    ctrl.sample_interval = 5e-5;
    const auto traj = run_mass(U0, grid, p, ctrl);
    REQUIRE(traj.outcome.status == Status::completed);
    CHECK(traj.samples.size() == 5);
    for (const auto& st : traj.samples) {
        CHECK(st.U(0) == 0.0);
        for (Eigen::Index j = 1; j < st.U.size(); ++j) CHECK(st.U(j) >= st.U(j - 1));
    }

    ctrl.t_end = 0.0;
    const auto none = run_mass(U0, grid, p, ctrl);
    CHECK(none.outcome.status == Status::completed);
    CHECK(none.samples.size() == 1);

    Eigen::VectorXd bad = U0;
    bad(10) = bad(11) + 1.0;
    ctrl.t_end = 1e-4;
    CHECK(run_mass(bad, grid, p, ctrl).outcome.status == Status::fault);
}
