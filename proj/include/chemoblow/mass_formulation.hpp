#pragma once

#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "chemoblow/grid.hpp"
#include "chemoblow/model.hpp"
#include "chemoblow/parabolic.hpp"
#include "chemoblow/tridiagonal.hpp"

namespace chemoblow {

/// Cumulative-mass variables on s = r^n ∈ [0, R^n]:
///   U(s) = ∫_0^{s^{1/n}} ρ^{n-1} u(ρ) dρ,  and V, W likewise from v, w.
/// Nodes are the images r_f^n of the faces of a radial grid, so U at node j
/// is the mass of the first j cells divided by the unit-sphere area.
struct MassState {
    double t = 0.0;
    std::shared_ptr<const Eigen::VectorXd> s;
    Eigen::VectorXd U, V, W;
    double dt = 0.0;
    double dt_stable = 0.0;
    long step_index = 0;
    Status status = Status::running;
    std::string message;
};

/// s-nodes r_f^n for every face of the grid.
[[nodiscard]] Eigen::VectorXd mass_nodes(const RadialGrid& grid);

/// Cumulative quadrature of ρ^{n-1} u over [0, s^{1/n}] at every node.
[[nodiscard]] Eigen::VectorXd transform_u_to_U(const Field& u, const RadialGrid& grid);

/// Inverse of transform_u_to_U: u = n U_s with U_s the slope on each interval.
[[nodiscard]] Field transform_U_to_u(const Eigen::VectorXd& U, const RadialGrid& grid);

/// Tridiagonal operator of the boundary-value problems
///   n² s^{2-2/n} Φ_ss = b Φ - a U  on (0, R^n),  Φ(0) = 0,  Φ(R^n) = (a/b) U(R^n).
/// The right-end value encodes the Neumann condition: r^{n-1} φ_r = -a U + b Φ
/// vanishes at r = R.
[[nodiscard]] Tridiagonal<double> mass_bvp_matrix(const Eigen::VectorXd& s, int n, double b);

/// Solves the V and W boundary-value problems for a given U.
void solve_VW(const Eigen::VectorXd& U, const ModelParams& params, const Eigen::VectorXd& s, Eigen::VectorXd& V,
              Eigen::VectorXd& W);

struct MassRhsTerms {
    Eigen::VectorXd diffusion;    ///< n² s^{2-2/n} U_ss
    Eigen::VectorXd attraction;   ///< n χ α U U_s - n χ β V U_s
    Eigen::VectorXd repulsion;    ///< -n ξ γ U U_s + n ξ δ W U_s
    Eigen::VectorXd growth;       ///< λ U
    Eigen::VectorXd degradation;  ///< -n^{k-1} μ ∫_0^s U_s^k dσ

    [[nodiscard]] Eigen::VectorXd total() const { return diffusion + attraction + repulsion + growth + degradation; }
};

/// Term-by-term right-hand side of the U equation. U_ss is the three-point
/// second difference on the non-uniform nodes; U_s in the drift products is
/// an upwind, minmod-limited reconstruction of the interval slopes in s. U_s is piecewise constant between nodes, so the
/// nonlocal degradation integral is summed exactly. At s = R^n the zero-flux
/// closure sets U_ss = 0; the drift terms vanish there identically.
[[nodiscard]] MassRhsTerms mass_rhs_terms(const MassState& state, const ModelParams& params);
[[nodiscard]] Eigen::VectorXd mass_rhs(const MassState& state, const ModelParams& params);

/// n² s^{2-2/n} U_ss at s = R^n from the one-sided three-point stencil:
/// what the zero-flux closure discards at the last node.
[[nodiscard]] double boundary_closure_residual(const MassState& state, const ModelParams& params);

struct MassTrajectory {
    std::vector<MassState> samples;
    RunOutcome outcome;
};

using MassObserver = std::function<bool(const MassState&)>;

/// Explicit Heun integrator for the U equation with V, W re-solved at each
/// stage. Same stepping contract as PrimalSolver; steps that make U
/// decreasing in s are rejected and dt halved.
class MassSolver {
public:
    MassSolver(const RadialGrid& grid, const ModelParams& params);

    [[nodiscard]] const Eigen::VectorXd& nodes() const { return *s_; }
    [[nodiscard]] const ModelParams& params() const { return params_; }

    [[nodiscard]] MassState make_state(Eigen::VectorXd U, double t = 0.0) const;
    void solve_signals(MassState& state) const;
    [[nodiscard]] StepLimits step_limits(const MassState& state) const;
    [[nodiscard]] MassState step(const MassState& state, const StepControl& ctrl,
                                 double t_limit = std::numeric_limits<double>::infinity(),
                                 double dt_cap = std::numeric_limits<double>::infinity()) const;
    [[nodiscard]] MassTrajectory run(Eigen::VectorXd U0, const StepControl& ctrl,
                                     const MassObserver& observer = {}) const;

private:
    std::shared_ptr<const Eigen::VectorXd> s_;
    ModelParams params_;
    int n_;
    FactoredTridiagonal<double> attractant_;
    FactoredTridiagonal<double> repellent_;
};

[[nodiscard]] MassTrajectory run_mass(const Eigen::VectorXd& U0, const RadialGrid& grid, const ModelParams& params,
                                      const StepControl& ctrl, const MassObserver& observer = {});

}  // namespace chemoblow
