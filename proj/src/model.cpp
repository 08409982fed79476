#include "chemoblow/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "chemoblow/error.hpp"
#include "chemoblow/quadrature.hpp"

namespace chemoblow {

ValidationError::ValidationError(std::vector<FieldViolation> violations)
    : std::invalid_argument([&] {
          std::string msg = "invalid parameters:";
          for (const auto& v : violations) msg += " " + v.field + " (" + v.constraint + ");";
          return msg;
      }()),
      violations_(std::move(violations))
{
}

double ModelParams::omega_volume() const
{
    const double half_n = 0.5 * n;
    return std::pow(std::numbers::pi, half_n) * std::pow(R, n) / std::tgamma(half_n + 1.0);
}

double ModelParams::sphere_area() const
{
    const double half_n = 0.5 * n;
    return n * std::pow(std::numbers::pi, half_n) / std::tgamma(half_n + 1.0);
}

double blowup_k_limit(int n)
{
    if (n <= 4) return 7.0 / 6.0;
    return 1.0 + 1.0 / (2.0 * (n - 1));
}

ValidatedParams validate_params(const ModelParams& raw)
{
    std::vector<FieldViolation> bad;
    auto require_positive = [&](const char* name, double value) {
        if (!(value > 0.0) || !std::isfinite(value)) bad.push_back({name, std::string(name) + " > 0"});
    };
    if (!std::isfinite(raw.lambda)) bad.push_back({"lambda", "lambda finite"});
    require_positive("mu", raw.mu);
    if (!(raw.k > 1.0) || !std::isfinite(raw.k)) bad.push_back({"k", "k > 1"});
    require_positive("chi", raw.chi);
    require_positive("xi", raw.xi);
    require_positive("alpha", raw.alpha);
    require_positive("beta", raw.beta);
    require_positive("gamma", raw.gamma);
    require_positive("delta", raw.delta);
    if (raw.n < 3) bad.push_back({"n", "n >= 3"});
    require_positive("R", raw.R);
    if (!bad.empty()) throw ValidationError(std::move(bad));
    return {raw, raw.k < blowup_k_limit(raw.n)};
}

double m_star(const ModelParams& params, double initial_mass)
{
    if (initial_mass < 0.0) throw ParameterError("m_star: initial mass must be nonnegative");
    const double lp = params.lambda_plus();
    if (lp == 0.0) return initial_mass;
    const double logistic = std::pow(lp / params.mu, 1.0 / (params.k - 1.0)) * params.omega_volume();
    return std::max(initial_mass, logistic);
}

std::optional<double> constant_equilibrium(const ModelParams& params)
{
    if (!(params.lambda > 0.0)) return std::nullopt;
    return std::pow(params.lambda / params.mu, 1.0 / (params.k - 1.0));
}

std::string_view to_string(ProfileKind kind)
{
    switch (kind) {
    case ProfileKind::singular_capped: return "singular_capped";
    case ProfileKind::gaussian_bump: return "gaussian_bump";
    case ProfileKind::constant: return "constant";
    }
    return "unknown";
}

ProfileKind parse_profile_kind(std::string_view name)
{
    if (name == "singular_capped") return ProfileKind::singular_capped;
    if (name == "gaussian_bump") return ProfileKind::gaussian_bump;
    if (name == "constant") return ProfileKind::constant;
    throw ParameterError("unknown profile kind '" + std::string(name) +
                         "' (expected singular_capped, gaussian_bump or constant)");
}

InitialProfile::InitialProfile(ProfileKind kind, double L, double cap, double scale, int n, double R)
    : kind_(kind), L_(L), cap_(cap), scale_(scale), n_(n), R_(R)
{
}

double InitialProfile::cap_radius() const
{
    return std::pow(L_ / cap_, 1.0 / (n_ * (n_ - 1.0)));
}

double InitialProfile::evaluate(double r) const
{
    switch (kind_) {
    case ProfileKind::singular_capped:
        if (r <= 0.0) return scale_ * cap_;
        return scale_ * std::min(L_ * std::pow(r, -n_ * (n_ - 1.0)), cap_);
    case ProfileKind::gaussian_bump: return scale_ * cap_ * std::exp(-(r / L_) * (r / L_));
    case ProfileKind::constant: return scale_ * cap_;
    }
    return 0.0;
}

double InitialProfile::mass_within(double rho) const
{
    rho = std::clamp(rho, 0.0, R_);
    if (rho == 0.0) return 0.0;
    const double half_n = 0.5 * n_;
    const double area = n_ * std::pow(std::numbers::pi, half_n) / std::tgamma(half_n + 1.0);
    auto integrand = [this](double r) { return std::pow(r, n_ - 1) * evaluate(r); };
    std::vector<double> breaks{0.0};
    if (kind_ == ProfileKind::singular_capped && cap_radius() < rho) breaks.push_back(cap_radius());
    breaks.push_back(rho);
    const auto result = quadrature::integrate_piecewise<double>(integrand, breaks, 1e-13);
    if (!result.converged) throw NumericalFault("profile mass quadrature did not converge");
    return area * result.value;
}

InitialProfile make_profile(ProfileKind kind, double L, double cap, double scale, const ModelParams& params)
{
    std::vector<FieldViolation> bad;
    if (!(L > 0.0)) bad.push_back({"L", "L > 0"});
    if (!(cap > 0.0)) bad.push_back({"cap", "cap > 0"});
    if (!(scale > 0.0)) bad.push_back({"scale", "scale > 0"});
    if (!bad.empty()) throw ValidationError(std::move(bad));
    return InitialProfile(kind, L, cap, scale, params.n, params.R);
}

}  // namespace chemoblow
