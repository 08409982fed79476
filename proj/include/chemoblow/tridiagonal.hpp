#pragma once

#include <Eigen/Core>

#include <cmath>
#include <string>

#include "chemoblow/error.hpp"

namespace chemoblow {

/// Tridiagonal matrix in band storage: row i reads
/// lower(i) x(i-1) + diag(i) x(i) + upper(i) x(i+1). lower(0) and
/// upper(size-1) are ignored.
template <typename Scalar>
struct Tridiagonal {
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    Vector lower;
    Vector diag;
    Vector upper;

    explicit Tridiagonal(Eigen::Index size)
        : lower(Vector::Zero(size)), diag(Vector::Zero(size)), upper(Vector::Zero(size)) {}

    [[nodiscard]] Eigen::Index size() const { return diag.size(); }

    [[nodiscard]] Vector apply(const Vector& x) const
    {
        const Eigen::Index n = size();
        Vector y(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            Scalar acc = diag(i) * x(i);
            if (i > 0) acc += lower(i) * x(i - 1);
            if (i + 1 < n) acc += upper(i) * x(i + 1);
            y(i) = acc;
        }
        return y;
    }
};

/// Thomas algorithm without pivoting. Intended for diagonally dominant
/// systems; a vanishing pivot raises NumericalFault.
template <typename Scalar>
typename Tridiagonal<Scalar>::Vector solve(const Tridiagonal<Scalar>& m,
                                           const typename Tridiagonal<Scalar>::Vector& rhs)
{
    using Vector = typename Tridiagonal<Scalar>::Vector;
    const Eigen::Index n = m.size();
    Vector c_prime(n);
    Vector x(n);

    Scalar pivot = m.diag(0);
    if (pivot == Scalar(0) || !std::isfinite(pivot)) throw NumericalFault("tridiagonal solve: zero pivot in row 0");
    c_prime(0) = m.upper(0) / pivot;
    x(0) = rhs(0) / pivot;
    for (Eigen::Index i = 1; i < n; ++i) {
        pivot = m.diag(i) - m.lower(i) * c_prime(i - 1);
        if (pivot == Scalar(0) || !std::isfinite(pivot))
            throw NumericalFault("tridiagonal solve: zero pivot in row " + std::to_string(i));
        c_prime(i) = (i + 1 < n) ? m.upper(i) / pivot : Scalar(0);
        x(i) = (rhs(i) - m.lower(i) * x(i - 1)) / pivot;
    }
    for (Eigen::Index i = n - 2; i >= 0; --i) x(i) -= c_prime(i) * x(i + 1);
    return x;
}

/// Thomas factorisation kept for repeated solves with a fixed matrix.
template <typename Scalar>
class FactoredTridiagonal {
public:
    using Vector = typename Tridiagonal<Scalar>::Vector;

    explicit FactoredTridiagonal(const Tridiagonal<Scalar>& m)
        : lower_(m.lower), c_prime_(m.size()), inv_pivot_(m.size())
    {
        const Eigen::Index n = m.size();
        for (Eigen::Index i = 0; i < n; ++i) {
            const Scalar pivot = i == 0 ? m.diag(0) : m.diag(i) - m.lower(i) * c_prime_(i - 1);
            if (pivot == Scalar(0) || !std::isfinite(pivot))
                throw NumericalFault("tridiagonal factorisation: zero pivot in row " + std::to_string(i));
            inv_pivot_(i) = Scalar(1) / pivot;
            c_prime_(i) = (i + 1 < n) ? m.upper(i) * inv_pivot_(i) : Scalar(0);
        }
    }

    /// Factorisation of an M-matrix given its off-diagonals (<= 0) and the
    /// row excess diag - |lower| - |upper| >= 0. The pivots are accumulated
    /// from non-negative terms only, so a small excess next to large
    /// off-diagonals keeps its relative accuracy.
    FactoredTridiagonal(const Tridiagonal<Scalar>& m, const Vector& row_excess)
        : lower_(m.lower), c_prime_(m.size()), inv_pivot_(m.size())
    {
        const Eigen::Index n = m.size();
        Scalar excess(0), pivot(1);
        for (Eigen::Index i = 0; i < n; ++i) {
            const Scalar hi = i + 1 < n ? -m.upper(i) : Scalar(0);
            excess = row_excess(i) + (i > 0 ? -m.lower(i) * excess / pivot : Scalar(0));
            pivot = hi + excess;
            if (!(pivot > Scalar(0)) || !std::isfinite(pivot))
                throw NumericalFault("tridiagonal factorisation: non-positive pivot in row " + std::to_string(i));
            inv_pivot_(i) = Scalar(1) / pivot;
            c_prime_(i) = -hi * inv_pivot_(i);
        }
    }

    [[nodiscard]] Eigen::Index size() const { return inv_pivot_.size(); }

    [[nodiscard]] Vector solve(const Vector& rhs) const
    {
        const Eigen::Index n = size();
        Vector x(n);
        x(0) = rhs(0) * inv_pivot_(0);
        for (Eigen::Index i = 1; i < n; ++i) x(i) = (rhs(i) - lower_(i) * x(i - 1)) * inv_pivot_(i);
        for (Eigen::Index i = n - 2; i >= 0; --i) x(i) -= c_prime_(i) * x(i + 1);
        return x;
    }

    /// Solves this system and `other` together; the two recurrences are
    /// independent, so interleaving them hides the latency of each.
    void solve_with(const Vector& rhs, const FactoredTridiagonal& other, const Vector& other_rhs, Vector& x,
                    Vector& other_x) const
    {
        const Eigen::Index n = size();
        x.resize(n);
        other_x.resize(n);
        x(0) = rhs(0) * inv_pivot_(0);
        other_x(0) = other_rhs(0) * other.inv_pivot_(0);
        for (Eigen::Index i = 1; i < n; ++i) {
            x(i) = (rhs(i) - lower_(i) * x(i - 1)) * inv_pivot_(i);
            other_x(i) = (other_rhs(i) - other.lower_(i) * other_x(i - 1)) * other.inv_pivot_(i);
        }
        for (Eigen::Index i = n - 2; i >= 0; --i) {
            x(i) -= c_prime_(i) * x(i + 1);
            other_x(i) -= other.c_prime_(i) * other_x(i + 1);
        }
    }

private:
    Vector lower_, c_prime_, inv_pivot_;
};

}  // namespace chemoblow
