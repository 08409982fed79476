#pragma once

#include <optional>

#include "chemoblow/model.hpp"

namespace chemoblow {

/// Gagliardo-Nirenberg constant and the exponent of Ψ = (1/σ)∫u^σ.
/// A larger C_GN lowers both bounds, so an over-estimate keeps them valid.
struct GNConfig {
    double C_GN = 10.0;
    double sigma = 2.0;
};

/// Throws ValidationError unless C_GN > 0 and σ > n/2.
void validate(const GNConfig& gn, int n);

struct BoundConstants {
    int n = 3;
    double sigma = 2.0;
    double C_GN = 10.0;
    double theta0 = 0.0;
    double beta0 = 0.0;
    double eps1 = 0.0;
    double c1 = 0.0, c2 = 0.0, c3 = 0.0;
    double c1_tilde = 0.0, c2_tilde = 0.0, c3_tilde = 0.0;
    double B1 = 0.0, B2 = 0.0, B3 = 0.0, B4 = 0.0;
    double gamma1 = 0.0, gamma2 = 0.0;
    /// Aggregate of the explicit bound; set when Ψ0 was supplied.
    std::optional<double> A;
};

/// Fills the ledger with the largest admissible ε₁ = 4/(σ χα C_GN β₀), for
/// which c̃₁ equals 4(σ-1)/σ² and B3 is smallest.
[[nodiscard]] BoundConstants compute_constants(const ModelParams& params, const GNConfig& gn,
                                               std::optional<double> psi0 = std::nullopt);

/// B1 Ψ0^{-2/(2σ-n)} + B2 Ψ0^{-n/(σ(2σ-n))} + B3.
[[nodiscard]] double explicit_aggregate(const BoundConstants& c, double psi0);

/// Right-hand side B1 Ψ + B2 Ψ^γ₁ + B3 Ψ^γ₂ of the differential inequality for Ψ.
[[nodiscard]] double psi_growth_majorant(const BoundConstants& c, double psi);

/// ∫_{Ψ0}^∞ dη / (B1 η + B2 η^γ₁ + B3 η^γ₂). With η = Ψ0 τ^{-1} and
/// τ = x^{1/(γ₂-1)} the integrand on x ∈ (0, 1] is bounded for every σ > n/2;
/// adaptive Gauss-Kronrod to the requested relative tolerance.
[[nodiscard]] double lower_bound_integral(double psi0, const BoundConstants& c, double rel_tol = 1e-8);

/// 1 / (A (γ₂-1) Ψ0^{γ₂-1}).
[[nodiscard]] double lower_bound_explicit(double psi0, const BoundConstants& c);

}  // namespace chemoblow
