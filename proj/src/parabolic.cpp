#include "chemoblow/parabolic.hpp"

#include <algorithm>
#include <cmath>

#include "chemoblow/elliptic.hpp"
#include "chemoblow/error.hpp"
#include "chemoblow/quadrature.hpp"

namespace chemoblow {

namespace {

double minmod(double a, double b)
{
    if (a * b <= 0.0) return 0.0;
    return std::abs(a) < std::abs(b) ? a : b;
}

bool admissible(const Field& u)
{
    for (Eigen::Index i = 0; i < u.size(); ++i)
        if (!(u(i) >= 0.0) || !std::isfinite(u(i))) return false;
    return true;
}

}  // namespace

std::string_view to_string(Status status)
{
    switch (status) {
    case Status::running: return "running";
    case Status::completed: return "completed";
    case Status::blow_up: return "blow_up";
    case Status::dt_underflow: return "dt_underflow";
    case Status::fault: return "fault";
    }
    return "unknown";
}

void validate(const StepControl& ctrl)
{
    std::vector<FieldViolation> bad;
    if (!(ctrl.dt_min > 0.0)) bad.push_back({"dt_min", "dt_min > 0"});
    if (!(ctrl.dt_init >= ctrl.dt_min)) bad.push_back({"dt_init", "dt_init >= dt_min"});
    if (!(ctrl.dt_max >= ctrl.dt_init)) bad.push_back({"dt_max", "dt_max >= dt_init"});
    if (!(ctrl.cfl_safety > 0.0 && ctrl.cfl_safety < 1.0)) bad.push_back({"cfl_safety", "0 < cfl_safety < 1"});
    if (!(ctrl.linf_blowup_threshold > 0.0))
        bad.push_back({"linf_blowup_threshold", "linf_blowup_threshold > 0"});
    if (!(ctrl.t_end >= 0.0) || !std::isfinite(ctrl.t_end)) bad.push_back({"t_end", "t_end >= 0"});
    if (!std::isfinite(ctrl.sample_interval)) bad.push_back({"sample_interval", "sample_interval finite"});
    if (ctrl.max_steps < 0) bad.push_back({"max_steps", "max_steps >= 0"});
    if (!bad.empty()) throw ValidationError(std::move(bad));
}

Eigen::VectorXd drift_velocity(const RadialGrid& grid, const ModelParams& params, const Field& v, const Field& w)
{
    return params.chi * radial_gradient(grid, v) - params.xi * radial_gradient(grid, w);
}

Eigen::VectorXd upwind_face_values(const RadialGrid& grid, const Field& u, const Eigen::VectorXd& velocity)
{
    const Eigen::Index N = grid.cells();
    const auto& inv_gap = grid.inverse_gaps();
    const auto& faces = grid.faces();
    const auto& centers = grid.centers();

    // Mirror symmetry at r = 0 and zero flux at r = R both make the outer
    // one-sided difference vanish, so the end cells reconstruct flat.
    Eigen::VectorXd slope = Eigen::VectorXd::Zero(N);
    for (Eigen::Index i = 1; i + 1 < N; ++i)
        slope(i) = minmod((u(i) - u(i - 1)) * inv_gap(i), (u(i + 1) - u(i)) * inv_gap(i + 1));

    Eigen::VectorXd face_u = Eigen::VectorXd::Zero(N + 1);
    for (Eigen::Index j = 1; j < N; ++j) {
        if (velocity(j) > 0.0)
            face_u(j) = u(j - 1) + slope(j - 1) * (faces(j) - centers(j - 1));
        else
            face_u(j) = u(j) - slope(j) * (centers(j) - faces(j));
    }
    return face_u;
}

Eigen::VectorXd face_flux(const RadialGrid& grid, const ModelParams& params, const Field& u, const Field& v,
                          const Field& w, const RhsTerms& terms)
{
    const Eigen::Index N = grid.cells();
    Eigen::VectorXd flux = Eigen::VectorXd::Zero(N + 1);
    if (terms.diffusion) flux -= radial_gradient(grid, u);
    if (terms.drift) {
        const Eigen::VectorXd vel = drift_velocity(grid, params, v, w);
        flux += upwind_face_values(grid, u, vel).cwiseProduct(vel);
    }
    return flux;
}

Field rhs(const RadialGrid& grid, const ModelParams& params, const Field& u, const Field& v, const Field& w,
          const RhsTerms& terms)
{
    const Eigen::Index N = grid.cells();
    const auto& area = grid.face_areas();
    const auto& cond = grid.conductances();
    const auto& inv_gap = grid.inverse_gaps();
    const auto& faces = grid.faces();
    const auto& centers = grid.centers();

    Field du = Field::Zero(N);
    if (terms.diffusion) {
        for (Eigen::Index j = 1; j < N; ++j) {
            const double through = cond(j) * (u(j) - u(j - 1));
            du(j - 1) += through;
            du(j) -= through;
        }
    }
    if (terms.drift) {
        // Same reconstruction as upwind_face_values, fused into one sweep.
        double slope_lo = 0.0;
        double slope_hi = N > 2 ? minmod((u(1) - u(0)) * inv_gap(1), (u(2) - u(1)) * inv_gap(2)) : 0.0;
        for (Eigen::Index j = 1; j < N; ++j) {
            const double vel = (params.chi * (v(j) - v(j - 1)) - params.xi * (w(j) - w(j - 1))) * inv_gap(j);
            const double face_u = vel > 0.0 ? u(j - 1) + slope_lo * (faces(j) - centers(j - 1))
                                            : u(j) - slope_hi * (centers(j) - faces(j));
            const double through = area(j) * face_u * vel;
            du(j - 1) -= terms.advective_sign_flip ? -through : through;
            du(j) += through;
            slope_lo = slope_hi;
            slope_hi = (j + 2 < N)
                           ? minmod((u(j + 1) - u(j)) * inv_gap(j + 1), (u(j + 2) - u(j + 1)) * inv_gap(j + 2))
                           : 0.0;
        }
    }
    du.array() *= grid.inverse_volumes().array();

    if (terms.reaction) {
        du.array() += params.lambda * u.array() - params.mu * (params.k * u.array().log()).exp();
    }
    if (!du.allFinite()) throw NumericalFault("rhs: non-finite value");
    return du;
}

PrimalSolver::PrimalSolver(RadialGrid grid, const ModelParams& params)
    : grid_(std::move(grid)), params_(params), attractant_(grid_, params.beta), repellent_(grid_, params.delta)
{
}

void PrimalSolver::solve_signals(SimState& state) const
{
    attractant_.solve_pair(state.u, params_.alpha, repellent_, params_.gamma, state.v, state.w);
}

SimState PrimalSolver::make_state(Field u0, double t) const
{
    if (u0.size() != grid_.cells()) throw ParameterError("make_state: initial field size does not match grid");
    SimState state;
    state.t = t;
    state.u = std::move(u0);
    solve_signals(state);
    return state;
}

Field PrimalSolver::rhs(const SimState& state, const RhsTerms& terms) const
{
    return chemoblow::rhs(grid_, params_, state.u, state.v, state.w, terms);
}

StepLimits PrimalSolver::step_limits(const SimState& state) const
{
    const Eigen::Index N = grid_.cells();
    const auto& area = grid_.face_areas();
    const auto& cond = grid_.conductances();
    const auto& inv_gap = grid_.inverse_gaps();
    const auto& inv_vol = grid_.inverse_volumes();
    const Field& v = state.v;
    const Field& w = state.w;

    StepLimits lim;
    double max_rowsum = 0.0, max_outflow = 0.0, max_speed_per_gap = 0.0;
    double vel_lo = 0.0;
    for (Eigen::Index i = 0; i < N; ++i) {
        const double vel_hi =
            i + 1 < N ? (params_.chi * (v(i + 1) - v(i)) - params_.xi * (w(i + 1) - w(i))) * inv_gap(i + 1) : 0.0;
        const double rowsum = (cond(i) + cond(i + 1)) * inv_vol(i);
        double outflow = 0.0;
        if (vel_lo < 0.0) outflow -= area(i) * vel_lo;
        if (vel_hi > 0.0) outflow += area(i + 1) * vel_hi;
        max_rowsum = std::max(max_rowsum, rowsum);
        // A limited face value is at most twice the cell value.
        max_outflow = std::max(max_outflow, rowsum + 2.0 * outflow * inv_vol(i));
        max_speed_per_gap = std::max(max_speed_per_gap, std::abs(vel_hi) * inv_gap(i + 1));
        vel_lo = vel_hi;
    }
    // u^{k-1} is increasing, so the largest degradation rate sits at max u.
    max_outflow += params_.mu * std::pow(state.u.maxCoeff(), params_.k - 1.0);

    if (max_rowsum > 0.0) lim.diffusion = 0.5 / max_rowsum;
    if (max_speed_per_gap > 0.0) lim.advection = 1.0 / max_speed_per_gap;
    if (max_outflow > 0.0) lim.positivity = 1.0 / max_outflow;
    return lim;
}

SimState PrimalSolver::step(const SimState& state, const StepControl& ctrl, double t_limit, double dt_cap) const
{
    SimState out = state;
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
        const Field k1 = rhs(state);
        while (true) {
            SimState stage;
            stage.u = state.u + dt * k1;
            if (admissible(stage.u)) {
                solve_signals(stage);
                const Field k2 = rhs(stage);
                Field next = 0.5 * (state.u + stage.u + dt * k2);
                if (admissible(next)) {
                    out.u = std::move(next);
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

Trajectory PrimalSolver::run(const Field& u0, const StepControl& ctrl, const SampleObserver& observer) const
{
    validate(ctrl);
    Trajectory traj;
    RunOutcome& outcome = traj.outcome;

    SimState state = make_state(u0);
    auto record = [&](const SimState& s) {
        traj.samples.push_back(s);
        return observer ? observer(s) : true;
    };
    auto finish = [&](Status status, const SimState& s) {
        outcome.status = status;
        outcome.t_final = s.t;
        outcome.linf_final = s.u.maxCoeff();
        traj.samples.back().status = status;
    };

    if (!admissible(state.u)) {
        state.status = Status::fault;
        record(state);
        outcome.message = "initial data negative or non-finite";
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
        SimState next = step(state, ctrl, target, cap);
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

        if (state.u.maxCoeff() >= ctrl.linf_blowup_threshold) {
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

void solve_signals(const RadialGrid& grid, const ModelParams& params, SimState& state)
{
    state.v = solve_elliptic(grid, state.u, params.alpha, params.beta);
    state.w = solve_elliptic(grid, state.u, params.gamma, params.delta);
}

SimState make_state(const RadialGrid& grid, const ModelParams& params, Field u0, double t)
{
    return PrimalSolver(grid, params).make_state(std::move(u0), t);
}

StepLimits step_limits(const RadialGrid& grid, const ModelParams& params, const SimState& state)
{
    return PrimalSolver(grid, params).step_limits(state);
}

SimState step(const SimState& state, const ModelParams& params, const RadialGrid& grid, const StepControl& ctrl,
              double t_limit, double dt_cap)
{
    return PrimalSolver(grid, params).step(state, ctrl, t_limit, dt_cap);
}

Field discretize(const InitialProfile& initial, const RadialGrid& grid)
{
    const Eigen::Index N = grid.cells();
    const int n = grid.dimension();
    const auto& faces = grid.faces();
    const double kink = initial.kind() == ProfileKind::singular_capped ? initial.cap_radius() : -1.0;
    Field u(N);
    for (Eigen::Index i = 0; i < N; ++i) {
        const double a = faces(i), b = faces(i + 1);
        std::vector<double> breaks{a};
        if (kink > a && kink < b) breaks.push_back(kink);
        breaks.push_back(b);
        const auto moment = quadrature::integrate_piecewise<double>(
            [&](double r) { return std::pow(r, n - 1) * initial(r); }, breaks, 1e-12);
        u(i) = moment.value * n / (std::pow(b, n) - std::pow(a, n));
    }
    return u;
}

Trajectory run(const Field& u0, const ModelParams& params, const RadialGrid& grid, const StepControl& ctrl,
               const SampleObserver& observer)
{
    return PrimalSolver(grid, params).run(u0, ctrl, observer);
}

Trajectory run(const InitialProfile& initial, const ModelParams& params, const RadialGrid& grid,
               const StepControl& ctrl, const SampleObserver& observer)
{
    return run(discretize(initial, grid), params, grid, ctrl, observer);
}

}  // namespace chemoblow
