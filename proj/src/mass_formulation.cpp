#include "chemoblow/mass_formulation.hpp"

#include <algorithm>
#include <cmath>

namespace chemoblow {

namespace {

bool monotone(const Eigen::VectorXd& U)
{
    if (!U.allFinite()) return false;
    for (Eigen::Index j = 1; j < U.size(); ++j)
        if (U(j) < U(j - 1)) return false;
    return true;
}

double max_density(const Eigen::VectorXd& U, const Eigen::VectorXd& s, int n)
{
    double m = 0.0;
    for (Eigen::Index j = 0; j + 1 < U.size(); ++j) m = std::max(m, (U(j + 1) - U(j)) / (s(j + 1) - s(j)));
    return n * m;
}

double minmod(double a, double b)
{
    if (a * b <= 0.0) return 0.0;
    return std::abs(a) < std::abs(b) ? a : b;
}

double diffusion_coefficient(double s, int n) { return double(n) * n * std::pow(s, 2.0 - 2.0 / n); }

}  // namespace

Eigen::VectorXd mass_nodes(const RadialGrid& grid)
{
    const int n = grid.dimension();
    return grid.faces().unaryExpr([n](double r) { return std::pow(r, n); });
}

Eigen::VectorXd transform_u_to_U(const Field& u, const RadialGrid& grid)
{
    if (u.size() != grid.cells()) throw ParameterError("transform_u_to_U: field size does not match grid");
    const Eigen::VectorXd s = mass_nodes(grid);
    const double inv_n = 1.0 / grid.dimension();
    Eigen::VectorXd U(s.size());
    U(0) = 0.0;
    for (Eigen::Index i = 0; i < u.size(); ++i) U(i + 1) = U(i) + u(i) * (s(i + 1) - s(i)) * inv_n;
    return U;
}

Field transform_U_to_u(const Eigen::VectorXd& U, const RadialGrid& grid)
{
    if (U.size() != grid.cells() + 1) throw ParameterError("transform_U_to_u: node count does not match grid");
    const Eigen::VectorXd s = mass_nodes(grid);
    const int n = grid.dimension();
    Field u(grid.cells());
    for (Eigen::Index i = 0; i < u.size(); ++i) u(i) = n * (U(i + 1) - U(i)) / (s(i + 1) - s(i));
    return u;
}

Tridiagonal<double> mass_bvp_matrix(const Eigen::VectorXd& s, int n, double b)
{
    const Eigen::Index M = s.size();
    Tridiagonal<double> m(M);
    m.diag(0) = 1.0;
    m.diag(M - 1) = 1.0;
    for (Eigen::Index j = 1; j + 1 < M; ++j) {
        const double a_lo = s(j) - s(j - 1);
        const double a_hi = s(j + 1) - s(j);
        const double c = diffusion_coefficient(s(j), n);
        m.lower(j) = -2.0 * c / (a_lo * (a_lo + a_hi));
        m.upper(j) = -2.0 * c / (a_hi * (a_lo + a_hi));
        m.diag(j) = -m.lower(j) - m.upper(j) + b;
    }
    return m;
}

namespace {

Eigen::VectorXd bvp_excess(Eigen::Index size, double b)
{
    Eigen::VectorXd e = Eigen::VectorXd::Constant(size, b);
    e(0) = 1.0;
    e(size - 1) = 1.0;
    return e;
}

Eigen::VectorXd bvp_rhs(const Eigen::VectorXd& U, double a, double b)
{
    Eigen::VectorXd f = a * U;
    f(0) = 0.0;
    f(f.size() - 1) = a / b * U(U.size() - 1);
    return f;
}

}  // namespace

void solve_VW(const Eigen::VectorXd& U, const ModelParams& params, const Eigen::VectorXd& s, Eigen::VectorXd& V,
              Eigen::VectorXd& W)
{
    const FactoredTridiagonal<double> fv(mass_bvp_matrix(s, params.n, params.beta), bvp_excess(s.size(), params.beta));
    const FactoredTridiagonal<double> fw(mass_bvp_matrix(s, params.n, params.delta), bvp_excess(s.size(), params.delta));
    V = fv.solve(bvp_rhs(U, params.alpha, params.beta));
    W = fw.solve(bvp_rhs(U, params.gamma, params.delta));
}

MassRhsTerms mass_rhs_terms(const MassState& state, const ModelParams& params)
{
    const Eigen::VectorXd& s = *state.s;
    const Eigen::VectorXd& U = state.U;
    const Eigen::Index M = s.size();
    const int n = params.n;
    MassRhsTerms t;
    t.diffusion = Eigen::VectorXd::Zero(M);
    t.attraction = Eigen::VectorXd::Zero(M);
    t.repulsion = Eigen::VectorXd::Zero(M);
    t.growth = params.lambda * U;
    t.degradation = Eigen::VectorXd::Zero(M);
    t.growth(0) = 0.0;

    const double deg_scale = -std::pow(double(n), params.k - 1.0) * params.mu;
    double cumulative = 0.0;
    for (Eigen::Index j = 0; j + 1 < M; ++j) {
        const double ds = s(j + 1) - s(j);
        const double slope = std::max(0.0, (U(j + 1) - U(j)) / ds);
        cumulative += std::pow(slope, params.k) * ds;
        t.degradation(j + 1) = deg_scale * cumulative;
    }

    // Interval slopes d_i = U_s on [s_i, s_{i+1}] and their minmod-limited
    // variation in s; the end intervals reconstruct flat.
    Eigen::VectorXd d(M - 1), mid(M - 1), g = Eigen::VectorXd::Zero(M - 1);
    for (Eigen::Index i = 0; i + 1 < M; ++i) {
        d(i) = (U(i + 1) - U(i)) / (s(i + 1) - s(i));
        mid(i) = 0.5 * (s(i) + s(i + 1));
    }
    for (Eigen::Index i = 1; i + 2 < M; ++i)
        g(i) = minmod((d(i) - d(i - 1)) / (mid(i) - mid(i - 1)), (d(i + 1) - d(i)) / (mid(i + 1) - mid(i)));

    for (Eigen::Index j = 1; j + 1 < M; ++j) {
        const double a = s(j) - s(j - 1);
        const double b = s(j + 1) - s(j);
        const double Uss = 2.0 * (d(j) - d(j - 1)) / (a + b);
        t.diffusion(j) = diffusion_coefficient(s(j), n) * Uss;

        const double att = n * params.chi * (params.alpha * U(j) - params.beta * state.V(j));
        const double rep = n * params.xi * (params.delta * state.W(j) - params.gamma * U(j));
        // U_t = c U_s transports U with speed -c in s: take U_s from the
        // interval on the upwind side.
        const Eigen::Index up = att + rep > 0.0 ? j : j - 1;
        const double Us = d(up) + g(up) * (s(j) - mid(up));
        t.attraction(j) = att * Us;
        t.repulsion(j) = rep * Us;
    }
    // Drift terms vanish at both ends: V(0) = W(0) = U(0) = 0, and at s = R^n
    // the Dirichlet data make α U - β V and δ W - γ U zero.
    for (Eigen::VectorXd* term : {&t.diffusion, &t.attraction, &t.repulsion})
        if (!term->allFinite()) throw NumericalFault("mass_rhs: non-finite term");
    if (!t.degradation.allFinite()) throw NumericalFault("mass_rhs: non-finite degradation");
    return t;
}

Eigen::VectorXd mass_rhs(const MassState& state, const ModelParams& params)
{
    return mass_rhs_terms(state, params).total();
}

double boundary_closure_residual(const MassState& state, const ModelParams& params)
{
    const Eigen::VectorXd& s = *state.s;
    const Eigen::Index N = s.size() - 1;
    const double a = s(N - 1) - s(N - 2);
    const double b = s(N) - s(N - 1);
    const double d_minus = (state.U(N - 1) - state.U(N - 2)) / a;
    const double d_plus = (state.U(N) - state.U(N - 1)) / b;
    return diffusion_coefficient(s(N), params.n) * 2.0 * (d_plus - d_minus) / (a + b);
}

MassSolver::MassSolver(const RadialGrid& grid, const ModelParams& params)
    : s_(std::make_shared<const Eigen::VectorXd>(mass_nodes(grid))),
      params_(params),
      n_(grid.dimension()),
      attractant_(mass_bvp_matrix(*s_, grid.dimension(), params.beta), bvp_excess(s_->size(), params.beta)),
      repellent_(mass_bvp_matrix(*s_, grid.dimension(), params.delta), bvp_excess(s_->size(), params.delta))
{
    if (params.n != grid.dimension()) throw ParameterError("MassSolver: grid dimension differs from params.n");
}

void MassSolver::solve_signals(MassState& state) const
{
    attractant_.solve_with(bvp_rhs(state.U, params_.alpha, params_.beta), repellent_,
                           bvp_rhs(state.U, params_.gamma, params_.delta), state.V, state.W);
}

MassState MassSolver::make_state(Eigen::VectorXd U, double t) const
{
    if (U.size() != s_->size()) throw ParameterError("MassSolver: node count mismatch");
    MassState state;
    state.t = t;
    state.s = s_;
    state.U = std::move(U);
    solve_signals(state);
    return state;
}

StepLimits MassSolver::step_limits(const MassState& state) const
{
    const Eigen::VectorXd& s = *s_;
    const Eigen::Index M = s.size();
    const ModelParams& p = params_;
    double max_diag = 0.0, max_speed_per_gap = 0.0;
    for (Eigen::Index j = 1; j + 1 < M; ++j) {
        const double a = s(j) - s(j - 1);
        const double b = s(j + 1) - s(j);
        max_diag = std::max(max_diag, 2.0 * diffusion_coefficient(s(j), n_) / (a * b));
        const double c = n_ * ((p.chi * p.alpha - p.xi * p.gamma) * state.U(j) - p.chi * p.beta * state.V(j) +
                               p.xi * p.delta * state.W(j));
        max_speed_per_gap = std::max(max_speed_per_gap, std::abs(c) / std::min(a, b));
    }
    StepLimits lim;
    if (max_diag > 0.0) lim.diffusion = 0.5 / max_diag;
    if (max_speed_per_gap > 0.0) lim.advection = 1.0 / max_speed_per_gap;
    const double decay = p.mu * std::pow(max_density(state.U, s, n_), p.k - 1.0) + std::max(0.0, p.lambda);
    if (decay > 0.0) lim.positivity = 1.0 / decay;
    return lim;
}

MassState MassSolver::step(const MassState& state, const StepControl& ctrl, double t_limit, double dt_cap) const
{
    MassState out = state;
    const double dt_stable = ctrl.cfl_safety * step_limits(state).min();
    double dt = std::min({dt_stable, ctrl.dt_max, dt_cap});
    if (!(dt > 0.0)) {
        out.status = Status::fault;
        out.message = "non-positive stable time step";
        return out;
    }
    const double remaining = t_limit - state.t;
    bool lands_on_limit = false;
    if (dt >= remaining) {
        dt = remaining;
        lands_on_limit = true;
    }

    try {
        const Eigen::VectorXd k1 = mass_rhs(state, params_);
        while (true) {
            MassState stage;
            stage.s = s_;
            stage.U = state.U + dt * k1;
            if (monotone(stage.U)) {
                solve_signals(stage);
                const Eigen::VectorXd k2 = mass_rhs(stage, params_);
                Eigen::VectorXd next = 0.5 * (state.U + stage.U + dt * k2);
                if (monotone(next)) {
                    out.U = std::move(next);
                    solve_signals(out);
                    out.t = lands_on_limit ? t_limit : state.t + dt;
                    out.dt = dt;
                    out.dt_stable = dt_stable;
                    out.step_index = state.step_index + 1;
                    return out;
                }
            }
            dt *= 0.5;
            lands_on_limit = false;
            if (dt < ctrl.dt_min) {
                out.status = Status::dt_underflow;
                out.message = "step rejected down to dt below dt_min";
                return out;
            }
        }
    } catch (const NumericalFault& fault) {
        out.status = Status::fault;
        out.message = fault.what();
        return out;
    }
}

MassTrajectory MassSolver::run(Eigen::VectorXd U0, const StepControl& ctrl, const MassObserver& observer) const
{
    validate(ctrl);
    MassTrajectory traj;
    RunOutcome& outcome = traj.outcome;

    MassState state = make_state(std::move(U0));
    auto record = [&](const MassState& st) {
        traj.samples.push_back(st);
        return observer ? observer(st) : true;
    };
    auto finish = [&](Status status, const MassState& st) {
        outcome.status = status;
        outcome.t_final = st.t;
        outcome.linf_final = max_density(st.U, *s_, n_);
        traj.samples.back().status = status;
    };

    if (!monotone(state.U) || state.U(0) != 0.0) {
        state.status = Status::fault;
        record(state);
        outcome.message = "initial U not monotone or U(0) != 0";
        finish(Status::fault, state);
        return traj;
    }
    if (!record(state) || ctrl.t_end <= 0.0) {
        finish(Status::completed, state);
        return traj;
    }

    const bool sampled = ctrl.sample_interval > 0.0;
    long sample_index = 1;
    auto sample_time = [&](long k) {
        return sampled ? std::min(ctrl.t_end, static_cast<double>(k) * ctrl.sample_interval) : ctrl.t_end;
    };
    double target = sample_time(sample_index);
    bool first = true;

    while (true) {
        const double cap = first ? ctrl.dt_init : std::numeric_limits<double>::infinity();
        MassState next = step(state, ctrl, target, cap);
        if (next.status != Status::running) {
            ++outcome.rejected;
            outcome.message = next.message;
            record(next);
            finish(next.status, next);
            return traj;
        }
        first = false;
        state = std::move(next);
        ++outcome.steps;
        outcome.dt_peak = std::max(outcome.dt_peak, state.dt_stable);
        outcome.dt_last = state.dt_stable;

        if (max_density(state.U, *s_, n_) >= ctrl.linf_blowup_threshold) {
            outcome.t_blowup = state.t;
            record(state);
            finish(Status::blow_up, state);
            return traj;
        }
        if (ctrl.max_steps > 0 && outcome.steps >= ctrl.max_steps) {
            outcome.message = "step budget exhausted";
            record(state);
            finish(Status::fault, state);
            return traj;
        }
        if (state.t == target) {
            const bool keep_going = record(state);
            if (target >= ctrl.t_end || !keep_going) {
                finish(Status::completed, state);
                return traj;
            }
            target = sample_time(++sample_index);
        }
    }
}

MassTrajectory run_mass(const Eigen::VectorXd& U0, const RadialGrid& grid, const ModelParams& params,
                        const StepControl& ctrl, const MassObserver& observer)
{
    return MassSolver(grid, params).run(U0, ctrl, observer);
}

}  // namespace chemoblow
