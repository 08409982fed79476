#include "chemoblow/bounds.hpp"

#include <cmath>
#include <vector>

#include "chemoblow/error.hpp"
#include "chemoblow/quadrature.hpp"

namespace chemoblow {

void validate(const GNConfig& gn, int n)
{
    std::vector<FieldViolation> bad;
    if (!(gn.C_GN > 0.0) || !std::isfinite(gn.C_GN)) bad.push_back({"C_GN", "C_GN > 0"});
    if (!(gn.sigma > 0.5 * n) || !std::isfinite(gn.sigma)) bad.push_back({"sigma", "sigma > n/2"});
    if (!bad.empty()) throw ValidationError(std::move(bad));
}

BoundConstants compute_constants(const ModelParams& params, const GNConfig& gn, std::optional<double> psi0)
{
    validate(gn, params.n);
    const double chi_alpha = params.chi * params.alpha;
    if (!(chi_alpha > 0.0)) throw ParameterError("compute_constants: chi * alpha must be positive");

    BoundConstants c;
    const double s = gn.sigma;
    const double n = params.n;
    c.n = params.n;
    c.sigma = s;
    c.C_GN = gn.C_GN;
    c.theta0 = n / (2.0 * (s + 1.0));
    c.beta0 = n / (2.0 * s);
    c.gamma1 = (s + 1.0) / s;
    c.gamma2 = (2.0 * (s + 1.0) - n) / (2.0 * s - n);
    c.eps1 = 4.0 / (s * chi_alpha * gn.C_GN * c.beta0);
    c.c1 = gn.C_GN * c.eps1 * c.beta0;
    c.c2 = gn.C_GN * std::pow(c.eps1, -c.beta0 / (1.0 - c.beta0)) * (1.0 - c.beta0);
    c.c3 = gn.C_GN;
    const double scale = chi_alpha * (s - 1.0) / s;
    c.c1_tilde = scale * c.c1;
    c.c2_tilde = scale * c.c2;
    c.c3_tilde = scale * c.c3;
    c.B1 = params.lambda_plus() * s;
    c.B2 = c.c3_tilde * std::pow(s, c.gamma1);
    c.B3 = c.c2_tilde * std::pow(s, c.gamma2);
    c.B4 = params.mu * std::pow(params.omega_volume(), (1.0 - params.k) / s) * std::pow(s, (s + params.k - 1.0) / s);
    if (psi0) c.A = explicit_aggregate(c, *psi0);
    return c;
}

double explicit_aggregate(const BoundConstants& c, double psi0)
{
    if (!(psi0 > 0.0)) throw ParameterError("explicit_aggregate: Psi0 must be positive");
    const double d = 2.0 * c.sigma - c.n;
    return c.B1 * std::pow(psi0, -2.0 / d) + c.B2 * std::pow(psi0, -c.n / (c.sigma * d)) + c.B3;
}

double psi_growth_majorant(const BoundConstants& c, double psi)
{
    return c.B1 * psi + c.B2 * std::pow(psi, c.gamma1) + c.B3 * std::pow(psi, c.gamma2);
}

double lower_bound_integral(double psi0, const BoundConstants& c, double rel_tol)
{
    if (!(psi0 > 0.0) || !std::isfinite(psi0)) throw ParameterError("lower_bound_integral: Psi0 must be positive");
    const double g = c.gamma2 - 1.0;
    // T = Ψ0^{1-γ₂}/(γ₂-1) ∫_0^1 dx / (B3 + B2 Ψ0^{γ₁-γ₂} x^{(γ₂-γ₁)/(γ₂-1)} + B1 Ψ0^{1-γ₂} x)
    const double b2 = c.B2 * std::pow(psi0, c.gamma1 - c.gamma2);
    const double b1 = c.B1 * std::pow(psi0, -g);
    const double q = (c.gamma2 - c.gamma1) / g;
    const auto f = [&](double x) { return 1.0 / (c.B3 + b2 * std::pow(x, q) + b1 * x); };
    const auto r = quadrature::integrate<double>(f, 0.0, 1.0, rel_tol, 0.0, 20000);
    if (!r.converged || !std::isfinite(r.value)) throw NumericalFault("lower_bound_integral: quadrature did not converge");
    return std::pow(psi0, -g) / g * r.value;
}

double lower_bound_explicit(double psi0, const BoundConstants& c)
{
    const double A = explicit_aggregate(c, psi0);
    return 1.0 / (A * (c.gamma2 - 1.0) * std::pow(psi0, c.gamma2 - 1.0));
}

}  // namespace chemoblow
