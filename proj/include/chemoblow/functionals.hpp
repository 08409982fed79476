#pragma once

#include <Eigen/Core>

#include <cmath>
#include <optional>
#include <vector>

#include "chemoblow/bounds.hpp"
#include "chemoblow/error.hpp"
#include "chemoblow/grid.hpp"
#include "chemoblow/mass_formulation.hpp"
#include "chemoblow/model.hpp"
#include "chemoblow/parabolic.hpp"

namespace chemoblow {

/// Weight exponent p and cut-off s0 of Φ(t) = ∫_0^{s0} s^{-p}(s0 - s) U(s,t) ds.
struct MomentConfig {
    double p = 2.0 / 3.0;
    double s0 = 0.125;
};

/// p = 1 - 1/n, s0 = (R/2)^n.
[[nodiscard]] MomentConfig default_moment_config(int n, double R);

/// Throws ValidationError unless p ∈ (1 - 2/n, 1) and s0 ∈ (0, R^n).
void validate(const MomentConfig& cfg, int n, double R);

[[nodiscard]] inline double mass(const Field& u, const RadialGrid& grid) { return grid.integrate(u); }

[[nodiscard]] inline double linf(const Field& u) { return u.cwiseAbs().maxCoeff(); }

/// (1/σ) ∫ u^σ by the cell quadrature of the grid.
[[nodiscard]] double psi(const Field& u, const RadialGrid& grid, double sigma);

/// Φ for U given at the nodes s. U is linear between nodes (u is constant per
/// cell), so each interval is integrated in closed form against
/// s^{-p}(s0 - s); this also covers the integrable singularity at s = 0.
template <typename Scalar>
Scalar phi(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& s, const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& U,
           Scalar p, Scalar s0)
{
    if (s.size() != U.size() || s.size() < 2) throw ParameterError("phi: node and value counts differ");
    if (!(s0 > s(0)) || s0 > s(s.size() - 1)) throw ParameterError("phi: s0 outside the node range");
    using std::pow;
    const Scalar e1 = Scalar(1) - p, e2 = Scalar(2) - p, e3 = Scalar(3) - p;
    // ∫_a^b s^{-p}(s0 - s)(A + d s) ds with A + d s the interpolant
    Scalar total(0);
    for (Eigen::Index i = 0; i + 1 < s.size() && s(i) < s0; ++i) {
        const Scalar a = s(i);
        const Scalar b = std::min(s(i + 1), s0);
        const Scalar d = (U(i + 1) - U(i)) / (s(i + 1) - s(i));
        const Scalar A = U(i) - d * a;
        const Scalar m1 = (pow(b, e1) - pow(a, e1)) / e1;
        const Scalar m2 = (pow(b, e2) - pow(a, e2)) / e2;
        const Scalar m3 = (pow(b, e3) - pow(a, e3)) / e3;
        total += A * s0 * m1 + (d * s0 - A) * m2 - d * m3;
    }
    return total;
}

[[nodiscard]] inline double phi(const Eigen::VectorXd& s, const Eigen::VectorXd& U, const MomentConfig& cfg)
{
    return phi<double>(s, U, cfg.p, cfg.s0);
}

struct EnergyTerms {
    double I1 = 0.0, I2 = 0.0, I3 = 0.0, I4 = 0.0, I5 = 0.0;
    [[nodiscard]] double sum() const { return I1 + I2 + I3 + I4 + I5; }
};

/// Raised when v or w is not the elliptic solve of u.
class InconsistentSignals : public std::runtime_error {
public:
    InconsistentSignals(double residual_v, double residual_w);
    double residual_v, residual_w;
};

/// The five contributions to Ψ'(t). I1 uses face differences of u^{σ/2};
/// I2 and I3 use the forms obtained after substituting the elliptic
/// equations. Refuses when either elliptic residual exceeds the tolerance.
[[nodiscard]] EnergyTerms energy_decomposition(const RadialGrid& grid, const ModelParams& params, const Field& u,
                                               const Field& v, const Field& w, double sigma,
                                               double residual_tol = 1e-8);

/// Smallest C_GN for which the Gagliardo-Nirenberg estimate of ∫u^{σ+1}
/// holds on this state:
///   ∫u^{σ+1} / [(∫|∇u^{σ/2}|²)^{γ₁θ₀} (∫u^σ)^{γ₁(1-θ₀)} + (∫u^σ)^{γ₁}].
[[nodiscard]] double gn_ratio(const RadialGrid& grid, const Field& u, double sigma);

/// Derivative estimates at each sample time: the three-point formula on a
/// non-uniform spacing inside, one-sided at the ends, NaN for a single sample.
[[nodiscard]] std::vector<double> sample_derivative(const std::vector<double>& t, const std::vector<double>& f);

struct DiagnosticsRecord {
    double t = 0.0;
    double dt = 0.0;
    double mass = 0.0;
    double linf = 0.0;
    double psi = 0.0;
    double phi = 0.0;
    double I1 = 0.0, I2 = 0.0, I3 = 0.0, I4 = 0.0, I5 = 0.0;
    double psi_rate_numeric = 0.0;
    double residual_mass_bound = 0.0;
    double residual_psi_ineq = 0.0;
    double phi_ratio = 0.0;
};

struct DiagnosticsConfig {
    double sigma = 2.0;
    MomentConfig moment;
    GNConfig gn;
};

/// One record per sample. Rates come from differencing the sampled Ψ and Φ,
/// never from the solver's rhs. residual_psi_ineq needs χα > 0; otherwise it
/// is NaN.
[[nodiscard]] std::vector<DiagnosticsRecord> diagnose(const Trajectory& traj, const RadialGrid& grid,
                                                      const ModelParams& params, const DiagnosticsConfig& cfg);

struct MassBoundReport {
    double m_star = 0.0;
    /// max over samples of mass - m_star
    double max_margin = 0.0;
    /// max over samples of mass - y(t), y the comparison ODE solution
    double max_ode_margin = 0.0;
    /// max over samples of (mass - y)/y
    double max_ode_margin_rel = 0.0;
    std::vector<double> ode_solution;
};

/// y' = λ₊ y - μ |Ω|^{1-k} y^k from y(t0) = y0, evaluated at the given times
/// (ascending, starting at t0) with classical RK4 on a fine substep.
[[nodiscard]] std::vector<double> comparison_ode(const ModelParams& params, double y0, const std::vector<double>& t);

[[nodiscard]] MassBoundReport check_mass_bound(const std::vector<double>& t, const std::vector<double>& mass,
                                               const ModelParams& params);
[[nodiscard]] MassBoundReport check_mass_bound(const Trajectory& traj, const RadialGrid& grid,
                                               const ModelParams& params);

struct PhiGrowthReport {
    std::vector<double> t;
    std::vector<double> ratio;
    /// Infimum over the window; NaN when no sample qualifies.
    double infimum = std::nan("");
    /// Samples dropped because Φ vanished.
    int skipped = 0;
    /// Some ratio was non-positive: the dominance or concentration
    /// hypothesis is not met on this trajectory.
    bool hypothesis_violated = false;
};

/// Φ'/(s0^{p-3} Φ²) at every sample strictly inside (0, t_window), with Φ'
/// from sample_derivative over the whole series.
[[nodiscard]] PhiGrowthReport phi_growth_report(const std::vector<double>& t, const std::vector<double>& phi,
                                                const MomentConfig& cfg, double t_window);
[[nodiscard]] PhiGrowthReport phi_growth_report(const MassTrajectory& traj, const MomentConfig& cfg,
                                                double t_window);

}  // namespace chemoblow
