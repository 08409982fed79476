#pragma once

#include "chemoblow/grid.hpp"
#include "chemoblow/tridiagonal.hpp"

namespace chemoblow {

/// Finite-volume form of  -(1/r^{n-1})(r^{n-1} φ_r)_r + b φ  with zero flux at
/// r = 0 and r = R, rows scaled by 1/|cell|. Diagonally dominant M-matrix.
[[nodiscard]] Tridiagonal<double> elliptic_matrix(const RadialGrid& grid, double b);

/// Factored elliptic operator for one decay rate b on one grid. Immutable
/// after construction, so concurrent solves are safe.
class EllipticOperator {
public:
    EllipticOperator(const RadialGrid& grid, double b);

    /// φ with -Δφ + bφ = a · source.
    [[nodiscard]] Field solve(const Field& source, double a) const;
    [[nodiscard]] double decay() const { return b_; }

    /// Solves this operator with coupling a and `other` with coupling
    /// other_a for the same source in one interleaved sweep.
    void solve_pair(const Field& source, double a, const EllipticOperator& other, double other_a, Field& phi,
                    Field& other_phi) const;

private:
    double b_;
    FactoredTridiagonal<double> factors_;
};

/// Solves  (1/r^{n-1})(r^{n-1} φ_r)_r - b φ = -a · source  with zero flux at
/// r = 0 and r = R, as one finite-volume tridiagonal system. The matrix is a
/// diagonally dominant M-matrix, so source >= 0 gives φ >= 0.
/// Throws ParameterError unless a > 0 and b > 0.
[[nodiscard]] Field solve_elliptic(const RadialGrid& grid, const Field& source, double a, double b);

/// max_i |(Lφ)_i - a·source_i| / max(1, max_i |a·source_i|) for the discrete
/// equation that solve_elliptic inverts.
[[nodiscard]] double elliptic_residual(const RadialGrid& grid, const Field& phi, const Field& source, double a,
                                       double b);

/// Two-point derivative at every face; exactly zero on the boundary faces.
[[nodiscard]] Eigen::VectorXd radial_gradient(const RadialGrid& grid, const Field& field);

}  // namespace chemoblow
