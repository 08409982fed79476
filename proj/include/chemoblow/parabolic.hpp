#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chemoblow/elliptic.hpp"
#include "chemoblow/grid.hpp"
#include "chemoblow/model.hpp"

namespace chemoblow {

enum class Status { running, completed, blow_up, dt_underflow, fault };

[[nodiscard]] std::string_view to_string(Status status);

/// Snapshot of the primal solver. v and w are always the elliptic solves of u.
struct SimState {
    double t = 0.0;
    Field u, v, w;
    /// Accepted step size of the step that produced this state.
    double dt = 0.0;
    /// cfl_safety * min(step_limits) at that step, before any clipping.
    double dt_stable = 0.0;
    long step_index = 0;
    Status status = Status::running;
    std::string message;
};

struct StepControl {
    double dt_init = 1e-4;
    double dt_min = 1e-14;
    double dt_max = 1e-2;
    double cfl_safety = 0.9;
    double linf_blowup_threshold = 1e8;
    double t_end = 1.0;
    /// Diagnostics cadence; non-positive means only the first and last state.
    double sample_interval = 1e-3;
    /// Zero means unlimited.
    long max_steps = 0;
};

/// Throws ValidationError unless 0 < dt_min <= dt_init <= dt_max,
/// 0 < cfl_safety < 1, threshold > 0 and t_end >= 0.
void validate(const StepControl& ctrl);

/// Selects which parts of the u-equation rhs() assembles. The sign-flip hook
/// breaks the telescoping of the advective flux on purpose; verification uses
/// it as a mutation test.
struct RhsTerms {
    bool diffusion = true;
    bool drift = true;
    bool reaction = true;
    bool advective_sign_flip = false;
};

/// Outward drift velocity χ v_r - ξ w_r at every face (zero on the boundary).
[[nodiscard]] Eigen::VectorXd drift_velocity(const RadialGrid& grid, const ModelParams& params, const Field& v,
                                             const Field& w);

/// Minmod-limited face value of u on the upwind side of every face for the
/// given face velocities (boundary entries unused).
[[nodiscard]] Eigen::VectorXd upwind_face_values(const RadialGrid& grid, const Field& u,
                                                 const Eigen::VectorXd& velocity);

/// Outward mass flux J = -u_r + u (χ v_r - ξ w_r) at every face, restricted to
/// the selected terms; boundary faces carry zero.
[[nodiscard]] Eigen::VectorXd face_flux(const RadialGrid& grid, const ModelParams& params, const Field& u,
                                        const Field& v, const Field& w, const RhsTerms& terms = {});

/// du/dt in conservative form: -(A J)|_{faces} / |cell| + λu - μu^k.
[[nodiscard]] Field rhs(const RadialGrid& grid, const ModelParams& params, const Field& u, const Field& v,
                        const Field& w, const RhsTerms& terms = {});

/// Convenience overload on a state whose v, w are consistent with u.
[[nodiscard]] inline Field rhs(const SimState& state, const ModelParams& params, const RadialGrid& grid,
                               const RhsTerms& terms = {})
{
    return rhs(grid, params, state.u, state.v, state.w, terms);
}

/// Re-solves v and w from u.
void solve_signals(const RadialGrid& grid, const ModelParams& params, SimState& state);

[[nodiscard]] SimState make_state(const RadialGrid& grid, const ModelParams& params, Field u0, double t = 0.0);

struct StepLimits {
    double diffusion = std::numeric_limits<double>::infinity();
    double advection = std::numeric_limits<double>::infinity();
    double positivity = std::numeric_limits<double>::infinity();

    [[nodiscard]] double min() const { return std::min(diffusion, std::min(advection, positivity)); }
};

/// Explicit stability and positivity bounds for the current state (before
/// the CFL safety factor).
[[nodiscard]] StepLimits step_limits(const RadialGrid& grid, const ModelParams& params, const SimState& state);

/// One Heun step with v, w re-solved at each stage. The trial dt is
/// cfl_safety * min(step_limits), capped by dt_max and t_limit - t. A trial
/// producing negative or non-finite u is rejected and dt halved; once dt
/// drops below dt_min the returned state has status dt_underflow. The
/// returned state carries the accepted dt.
[[nodiscard]] SimState step(const SimState& state, const ModelParams& params, const RadialGrid& grid,
                            const StepControl& ctrl,
                            double t_limit = std::numeric_limits<double>::infinity(),
                            double dt_cap = std::numeric_limits<double>::infinity());

struct RunOutcome {
    Status status = Status::running;
    double t_final = 0.0;
    std::optional<double> t_blowup;
    long steps = 0;
    long rejected = 0;
    double dt_peak = 0.0;
    double dt_last = 0.0;
    double linf_final = 0.0;
    std::string message;

    /// dt at the end of the run relative to the largest accepted dt.
    [[nodiscard]] double dt_collapse() const { return dt_peak > 0.0 ? dt_last / dt_peak : 1.0; }
};

struct Trajectory {
    /// One state per sample time (t = 0, the sample grid, and the final time).
    std::vector<SimState> samples;
    RunOutcome outcome;
};

/// Called with every sampled state; returning false stops the run early
/// (status completed at the current time).
using SampleObserver = std::function<bool(const SimState&)>;

/// Primal solver bound to one grid and parameter set. Holds the factored
/// elliptic operators for v and w; immutable, so one instance can serve
/// concurrent runs.
class PrimalSolver {
public:
    PrimalSolver(RadialGrid grid, const ModelParams& params);

    [[nodiscard]] const RadialGrid& grid() const { return grid_; }
    [[nodiscard]] const ModelParams& params() const { return params_; }

    void solve_signals(SimState& state) const;
    [[nodiscard]] SimState make_state(Field u0, double t = 0.0) const;
    [[nodiscard]] Field rhs(const SimState& state, const RhsTerms& terms = {}) const;
    [[nodiscard]] StepLimits step_limits(const SimState& state) const;
    [[nodiscard]] SimState step(const SimState& state, const StepControl& ctrl,
                                double t_limit = std::numeric_limits<double>::infinity(),
                                double dt_cap = std::numeric_limits<double>::infinity()) const;
    [[nodiscard]] Trajectory run(const Field& u0, const StepControl& ctrl,
                                 const SampleObserver& observer = {}) const;

private:
    RadialGrid grid_;
    ModelParams params_;
    EllipticOperator attractant_;
    EllipticOperator repellent_;
};

/// Integrates from u0 until t_end, blow-up (‖u‖_∞ >= threshold), dt
/// underflow or a fault. Samples land exactly on multiples of
/// sample_interval. Deterministic: identical inputs give identical output.
[[nodiscard]] Trajectory run(const Field& u0, const ModelParams& params, const RadialGrid& grid,
                             const StepControl& ctrl, const SampleObserver& observer = {});

[[nodiscard]] Trajectory run(const InitialProfile& initial, const ModelParams& params, const RadialGrid& grid,
                             const StepControl& ctrl, const SampleObserver& observer = {});

/// Cell averages of the initial profile on the grid.
[[nodiscard]] Field discretize(const InitialProfile& initial, const RadialGrid& grid);

}  // namespace chemoblow
