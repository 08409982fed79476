#include "chemoblow/functionals.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <string>

namespace chemoblow {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Σ_faces |A| (Δf)² / Δr: the cell-centred form of ∫|∇f|².
double dirichlet_energy(const RadialGrid& grid, const Field& f)
{
    const auto& cond = grid.conductances();
    double acc = 0.0;
    for (Eigen::Index j = 1; j < f.size(); ++j) {
        const double d = f(j) - f(j - 1);
        acc += cond(j) * d * d;
    }
    return acc;
}

std::string residual_message(double rv, double rw)
{
    char buf[160];
    std::snprintf(buf, sizeof buf, "energy_decomposition: v, w are not the elliptic solves of u (residuals %.3e, %.3e)",
                  rv, rw);
    return buf;
}

}  // namespace

MomentConfig default_moment_config(int n, double R) { return {1.0 - 1.0 / n, std::pow(0.5 * R, n)}; }

void validate(const MomentConfig& cfg, int n, double R)
{
    std::vector<FieldViolation> bad;
    if (!(cfg.p > 1.0 - 2.0 / n && cfg.p < 1.0)) bad.push_back({"p", "1 - 2/n < p < 1"});
    if (!(cfg.s0 > 0.0 && cfg.s0 < std::pow(R, n))) bad.push_back({"s0", "0 < s0 < R^n"});
    if (!bad.empty()) throw ValidationError(std::move(bad));
}

double psi(const Field& u, const RadialGrid& grid, double sigma)
{
    if (!(sigma > 1.0)) throw ParameterError("psi: sigma must exceed 1");
    return grid.integrate(u.array().pow(sigma).matrix()) / sigma;
}

InconsistentSignals::InconsistentSignals(double rv, double rw)
    : std::runtime_error(residual_message(rv, rw)), residual_v(rv), residual_w(rw)
{
}

EnergyTerms energy_decomposition(const RadialGrid& grid, const ModelParams& params, const Field& u, const Field& v,
                                 const Field& w, double sigma, double residual_tol)
{
    if (!(sigma > 1.0)) throw ParameterError("energy_decomposition: sigma must exceed 1");
    const double rv = elliptic_residual(grid, v, u, params.alpha, params.beta);
    const double rw = elliptic_residual(grid, w, u, params.gamma, params.delta);
    if (!(rv <= residual_tol) || !(rw <= residual_tol)) throw InconsistentSignals(rv, rw);

    const Eigen::ArrayXd ua = u.array();
    const Eigen::ArrayXd us = ua.pow(sigma);
    const auto& vol = grid.volumes().array();
    const double int_us = (vol * us).sum();
    const double int_us1 = (vol * us * ua).sum();
    const double int_us_v = (vol * us * v.array()).sum();
    const double int_us_w = (vol * us * w.array()).sum();
    const double int_deg = (vol * ua.pow(sigma + params.k - 1.0)).sum();
    const double f = (sigma - 1.0) / sigma;

    EnergyTerms e;
    e.I1 = -4.0 * (sigma - 1.0) / (sigma * sigma) * dirichlet_energy(grid, ua.pow(0.5 * sigma).matrix());
    e.I2 = f * params.chi * (params.alpha * int_us1 - params.beta * int_us_v);
    e.I3 = f * params.xi * (params.delta * int_us_w - params.gamma * int_us1);
    e.I4 = params.lambda * int_us;
    e.I5 = -params.mu * int_deg;
    return e;
}

double gn_ratio(const RadialGrid& grid, const Field& u, double sigma)
{
    const int n = grid.dimension();
    const double theta0 = n / (2.0 * (sigma + 1.0));
    const double gamma1 = (sigma + 1.0) / sigma;
    const Eigen::ArrayXd ua = u.array();
    const auto& vol = grid.volumes().array();
    const double int_us = (vol * ua.pow(sigma)).sum();
    const double int_us1 = (vol * ua.pow(sigma + 1.0)).sum();
    const double grad = dirichlet_energy(grid, ua.pow(0.5 * sigma).matrix());
    const double denom =
        std::pow(grad, gamma1 * theta0) * std::pow(int_us, gamma1 * (1.0 - theta0)) + std::pow(int_us, gamma1);
    return denom > 0.0 ? int_us1 / denom : 0.0;
}

std::vector<double> sample_derivative(const std::vector<double>& t, const std::vector<double>& f)
{
    const std::size_t m = t.size();
    std::vector<double> d(m, kNaN);
    if (m < 2 || f.size() != m) return d;
    d[0] = (f[1] - f[0]) / (t[1] - t[0]);
    d[m - 1] = (f[m - 1] - f[m - 2]) / (t[m - 1] - t[m - 2]);
    for (std::size_t i = 1; i + 1 < m; ++i) {
        const double h0 = t[i] - t[i - 1];
        const double h1 = t[i + 1] - t[i];
        d[i] = (h0 * h0 * (f[i + 1] - f[i]) + h1 * h1 * (f[i] - f[i - 1])) / (h0 * h1 * (h0 + h1));
    }
    return d;
}

std::vector<DiagnosticsRecord> diagnose(const Trajectory& traj, const RadialGrid& grid, const ModelParams& params,
                                        const DiagnosticsConfig& cfg)
{
    std::vector<DiagnosticsRecord> rows;
    if (traj.samples.empty()) return rows;
    const Eigen::VectorXd s = mass_nodes(grid);
    const double mstar = m_star(params, mass(traj.samples.front().u, grid));
    std::optional<BoundConstants> constants;
    if (params.chi * params.alpha > 0.0) constants = compute_constants(params, cfg.gn);

    std::vector<double> t, psis, phis;
    for (const SimState& st : traj.samples) {
        DiagnosticsRecord r;
        r.t = st.t;
        r.dt = st.dt;
        r.mass = mass(st.u, grid);
        r.linf = linf(st.u);
        r.psi = psi(st.u, grid, cfg.sigma);
        r.phi = phi(s, transform_u_to_U(st.u, grid), cfg.moment);
        const EnergyTerms e = energy_decomposition(grid, params, st.u, st.v, st.w, cfg.sigma);
        r.I1 = e.I1;
        r.I2 = e.I2;
        r.I3 = e.I3;
        r.I4 = e.I4;
        r.I5 = e.I5;
        r.residual_mass_bound = r.mass - mstar;
        rows.push_back(r);
        t.push_back(r.t);
        psis.push_back(r.psi);
        phis.push_back(r.phi);
    }

    const std::vector<double> dpsi = sample_derivative(t, psis);
    const std::vector<double> dphi = sample_derivative(t, phis);
    const double weight = std::pow(cfg.moment.s0, cfg.moment.p - 3.0);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        DiagnosticsRecord& r = rows[i];
        r.psi_rate_numeric = dpsi[i];
        r.residual_psi_ineq = constants ? dpsi[i] - psi_growth_majorant(*constants, r.psi) : kNaN;
        r.phi_ratio = r.phi != 0.0 ? dphi[i] / (weight * r.phi * r.phi) : kNaN;
    }
    return rows;
}

std::vector<double> comparison_ode(const ModelParams& params, double y0, const std::vector<double>& t)
{
    const double lp = params.lambda_plus();
    const double mu_bar = params.mu * std::pow(params.omega_volume(), 1.0 - params.k);
    const auto f = [&](double y) { return lp * y - mu_bar * std::pow(std::max(y, 0.0), params.k); };

    std::vector<double> out;
    out.reserve(t.size());
    double y = y0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (i > 0) {
            const double span = t[i] - t[i - 1];
            const double rate = lp + mu_bar * params.k * std::pow(std::max(y, 1e-300), params.k - 1.0);
            const double h_max = std::min(1e-3, 0.01 / std::max(rate, 1e-12));
            const long steps = std::max(4L, static_cast<long>(std::ceil(span / h_max)));
            const double h = span / static_cast<double>(steps);
            for (long j = 0; j < steps; ++j) {
                const double k1 = f(y);
                const double k2 = f(y + 0.5 * h * k1);
                const double k3 = f(y + 0.5 * h * k2);
                const double k4 = f(y + h * k3);
                y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            }
        }
        out.push_back(y);
    }
    return out;
}

MassBoundReport check_mass_bound(const std::vector<double>& t, const std::vector<double>& mass_series,
                                 const ModelParams& params)
{
    if (t.empty() || t.size() != mass_series.size()) throw ParameterError("check_mass_bound: empty or ragged series");
    MassBoundReport r;
    r.m_star = m_star(params, mass_series.front());
    r.ode_solution = comparison_ode(params, mass_series.front(), t);
    r.max_margin = -std::numeric_limits<double>::infinity();
    r.max_ode_margin = -std::numeric_limits<double>::infinity();
    r.max_ode_margin_rel = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double y = r.ode_solution[i];
        r.max_margin = std::max(r.max_margin, mass_series[i] - r.m_star);
        r.max_ode_margin = std::max(r.max_ode_margin, mass_series[i] - y);
        r.max_ode_margin_rel = std::max(r.max_ode_margin_rel, y > 0.0 ? (mass_series[i] - y) / y : 0.0);
    }
    return r;
}

MassBoundReport check_mass_bound(const Trajectory& traj, const RadialGrid& grid, const ModelParams& params)
{
    std::vector<double> t, m;
    for (const SimState& st : traj.samples) {
        if (st.status == Status::dt_underflow || st.status == Status::fault) continue;
        t.push_back(st.t);
        m.push_back(mass(st.u, grid));
    }
    return check_mass_bound(t, m, params);
}

PhiGrowthReport phi_growth_report(const std::vector<double>& t, const std::vector<double>& phi_series,
                                  const MomentConfig& cfg, double t_window)
{
    PhiGrowthReport rep;
    const std::vector<double> d = sample_derivative(t, phi_series);
    const double weight = std::pow(cfg.s0, cfg.p - 3.0);
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!(t[i] > 0.0 && t[i] < t_window)) continue;
        if (phi_series[i] == 0.0) {
            ++rep.skipped;
            continue;
        }
        const double ratio = d[i] / (weight * phi_series[i] * phi_series[i]);
        rep.t.push_back(t[i]);
        rep.ratio.push_back(ratio);
        if (std::isnan(rep.infimum) || ratio < rep.infimum) rep.infimum = ratio;
        if (!(ratio > 0.0)) rep.hypothesis_violated = true;
    }
    return rep;
}

PhiGrowthReport phi_growth_report(const MassTrajectory& traj, const MomentConfig& cfg, double t_window)
{
    std::vector<double> t, f;
    for (const MassState& st : traj.samples) {
        if (st.status == Status::dt_underflow || st.status == Status::fault) continue;
        t.push_back(st.t);
        f.push_back(phi(*st.s, st.U, cfg));
    }
    return phi_growth_report(t, f, cfg, t_window);
}

}  // namespace chemoblow
