#pragma once

#include <optional>
#include <string_view>

namespace chemoblow {

/// Constants of the parabolic-elliptic-elliptic attraction-repulsion system
///
///   u_t = Δu - χ∇·(u∇v) + ξ∇·(u∇w) + λu - μu^k,
///   0   = Δv + αu - βv,
///   0   = Δw + γu - δw,
///
/// posed in the ball B_R(0) ⊂ R^n with homogeneous Neumann conditions.
/// A plain aggregate: kernels accept any record (unit tests switch terms off
/// by zeroing rates); scenario assembly goes through validate_params.
struct ModelParams {
    double lambda = 0.0;
    double mu = 1.0;
    double k = 1.1;
    double chi = 1.0;
    double xi = 1.0;
    double alpha = 1.0;
    double beta = 1.0;
    double gamma = 1.0;
    double delta = 1.0;
    int n = 3;
    double R = 1.0;

    /// χα - ξγ; blow-up scenarios need this positive.
    [[nodiscard]] double dominance() const { return chi * alpha - xi * gamma; }
    [[nodiscard]] double lambda_plus() const { return lambda > 0.0 ? lambda : 0.0; }
    /// |B_R(0)| = π^{n/2} R^n / Γ(n/2 + 1).
    [[nodiscard]] double omega_volume() const;
    /// Surface area of the unit sphere S^{n-1}, n π^{n/2} / Γ(n/2 + 1).
    [[nodiscard]] double sphere_area() const;

    friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// Upper end of the degradation-exponent window under which blow-up is
/// guaranteed: 7/6 for n in {3, 4}, 1 + 1/(2(n-1)) for n >= 5.
[[nodiscard]] double blowup_k_limit(int n);

struct ValidatedParams {
    ModelParams params;
    bool k_in_blowup_range = false;
};

/// Checks every positivity and range constraint; throws ValidationError
/// listing all violated fields.
[[nodiscard]] ValidatedParams validate_params(const ModelParams& raw);

/// max{ m0, (λ+/μ)^{1/(k-1)} |Ω| }: the a-priori ceiling on total mass.
[[nodiscard]] double m_star(const ModelParams& params, double initial_mass);

/// Spatially constant equilibrium (λ/μ)^{1/(k-1)} of λu - μu^k, if λ > 0.
[[nodiscard]] std::optional<double> constant_equilibrium(const ModelParams& params);

enum class ProfileKind { singular_capped, gaussian_bump, constant };

[[nodiscard]] std::string_view to_string(ProfileKind kind);
[[nodiscard]] ProfileKind parse_profile_kind(std::string_view name);

/// Radial initial density u0(r) on [0, R].
///
///   singular_capped: scale * min{ L r^{-n(n-1)}, cap }
///   gaussian_bump:   scale * cap * exp(-(r/L)^2)
///   constant:        scale * cap
class InitialProfile {
public:
    InitialProfile(ProfileKind kind, double L, double cap, double scale, int n, double R);

    [[nodiscard]] double operator()(double r) const { return evaluate(r); }
    [[nodiscard]] double evaluate(double r) const;

    [[nodiscard]] ProfileKind kind() const { return kind_; }
    [[nodiscard]] double L() const { return L_; }
    [[nodiscard]] double cap() const { return cap_; }
    [[nodiscard]] double scale() const { return scale_; }
    [[nodiscard]] int dimension() const { return n_; }
    [[nodiscard]] double radius() const { return R_; }

    /// Radius where L r^{-n(n-1)} meets the cap (singular_capped only).
    [[nodiscard]] double cap_radius() const;

    /// ∫_{B_ρ(0)} u0 dx by adaptive quadrature; ρ is clipped to [0, R].
    [[nodiscard]] double mass_within(double rho) const;
    [[nodiscard]] double total_mass() const { return mass_within(R_); }

private:
    ProfileKind kind_;
    double L_, cap_, scale_;
    int n_;
    double R_;
};

/// Builds a profile after checking L, cap, scale > 0.
[[nodiscard]] InitialProfile make_profile(ProfileKind kind, double L, double cap, double scale,
                                          const ModelParams& params);

}  // namespace chemoblow
