#include "chemoblow/elliptic.hpp"

#include <cmath>

#include "chemoblow/error.hpp"

namespace chemoblow {

Tridiagonal<double> elliptic_matrix(const RadialGrid& grid, double b)
{
    const Eigen::Index N = grid.cells();
    const auto& cond = grid.conductances();
    const auto& vol = grid.volumes();
    Tridiagonal<double> m(N);
    for (Eigen::Index i = 0; i < N; ++i) {
        const double lo = cond(i) / vol(i);
        const double hi = cond(i + 1) / vol(i);
        m.lower(i) = -lo;
        m.upper(i) = -hi;
        m.diag(i) = b + lo + hi;
    }
    return m;
}

EllipticOperator::EllipticOperator(const RadialGrid& grid, double b)
    : b_(b), factors_([&] {
          if (!(b > 0.0)) throw ParameterError("elliptic operator: decay b must be positive");
          return FactoredTridiagonal<double>(elliptic_matrix(grid, b), Eigen::VectorXd::Constant(grid.cells(), b));
      }())
{
}

Field EllipticOperator::solve(const Field& source, double a) const
{
    if (!(a > 0.0)) throw ParameterError("elliptic operator: coupling a must be positive");
    if (source.size() != factors_.size()) throw ParameterError("elliptic operator: source size does not match grid");
    return factors_.solve(a * source);
}

void EllipticOperator::solve_pair(const Field& source, double a, const EllipticOperator& other, double other_a,
                                  Field& phi, Field& other_phi) const
{
    if (!(a > 0.0) || !(other_a > 0.0)) throw ParameterError("elliptic operator: coupling a must be positive");
    if (source.size() != factors_.size() || other.factors_.size() != factors_.size())
        throw ParameterError("elliptic operator: source size does not match grid");
    factors_.solve_with(a * source, other.factors_, other_a * source, phi, other_phi);
}

Field solve_elliptic(const RadialGrid& grid, const Field& source, double a, double b)
{
    return EllipticOperator(grid, b).solve(source, a);
}

double elliptic_residual(const RadialGrid& grid, const Field& phi, const Field& source, double a, double b)
{
    const Field lhs = elliptic_matrix(grid, b).apply(phi);
    const Field rhs = a * source;
    const double scale = std::max(1.0, rhs.cwiseAbs().maxCoeff());
    return (lhs - rhs).cwiseAbs().maxCoeff() / scale;
}

Eigen::VectorXd radial_gradient(const RadialGrid& grid, const Field& field)
{
    const Eigen::Index N = grid.cells();
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(N + 1);
    const auto& gap = grid.center_gaps();
    for (Eigen::Index j = 1; j < N; ++j) grad(j) = (field(j) - field(j - 1)) / gap(j);
    return grad;
}

}  // namespace chemoblow
