#pragma once

#include <Eigen/Core>

namespace chemoblow {

using Field = Eigen::VectorXd;

struct Stretching {
    enum class Kind { uniform, geometric };
    Kind kind = Kind::uniform;
    /// Geometric only: width(i) / width(i+1). Values below 1 refine towards r = 0.
    double ratio = 1.0;

    static Stretching uniform() { return {}; }
    static Stretching geometric(double ratio) { return {Kind::geometric, ratio}; }
};

inline constexpr int kMinCells = 16;

/// Cell-centred finite-volume partition of [0, R] for radial functions on
/// B_R(0) ⊂ R^n. Volumes and face areas carry the full sphere factor, so
/// integrate() approximates ∫_Ω f dx.
class RadialGrid {
public:
    RadialGrid(int n, double R, Eigen::VectorXd faces);

    [[nodiscard]] int dimension() const { return n_; }
    [[nodiscard]] double radius() const { return R_; }
    [[nodiscard]] Eigen::Index cells() const { return centers_.size(); }

    /// r_{i+1/2}, i = -1..N-1, with r_{1/2 - 1} = 0 and r_{N-1/2} = R.
    [[nodiscard]] const Eigen::VectorXd& faces() const { return faces_; }
    [[nodiscard]] const Eigen::VectorXd& centers() const { return centers_; }
    [[nodiscard]] const Eigen::VectorXd& volumes() const { return volumes_; }
    /// σ_{n-1} r_f^{n-1} at every face (zero at r = 0).
    [[nodiscard]] const Eigen::VectorXd& face_areas() const { return face_areas_; }
    /// Distance between the two centres adjacent to each face; zero on the
    /// boundary faces, which carry no flux.
    [[nodiscard]] const Eigen::VectorXd& center_gaps() const { return center_gaps_; }
    /// 1 / centre gap on interior faces, zero on the boundary faces.
    [[nodiscard]] const Eigen::VectorXd& inverse_gaps() const { return inverse_gaps_; }
    [[nodiscard]] const Eigen::VectorXd& inverse_volumes() const { return inverse_volumes_; }
    /// face area / centre gap on interior faces, zero on the boundary faces.
    [[nodiscard]] const Eigen::VectorXd& conductances() const { return conductances_; }

    [[nodiscard]] double sphere_area() const { return sphere_area_; }
    [[nodiscard]] double total_volume() const { return volumes_.sum(); }
    /// Exact ball volume π^{n/2} R^n / Γ(n/2+1).
    [[nodiscard]] double ball_volume() const;

    /// Σ_i |cell_i| f_i.
    [[nodiscard]] double integrate(const Field& f) const { return volumes_.dot(f); }

    /// Cell average of a radial function by Gauss-Legendre quadrature in
    /// r with weight r^{n-1}.
    template <typename Fn>
    [[nodiscard]] Field cell_average(const Fn& f) const;

    /// Point samples at the cell centres.
    template <typename Fn>
    [[nodiscard]] Field sample(const Fn& f) const
    {
        Field out(cells());
        for (Eigen::Index i = 0; i < cells(); ++i) out(i) = f(centers_(i));
        return out;
    }

    /// Smallest cell width.
    [[nodiscard]] double min_width() const;

private:
    int n_;
    double R_;
    double sphere_area_;
    Eigen::VectorXd faces_, centers_, volumes_, face_areas_, center_gaps_, conductances_,
        inverse_gaps_, inverse_volumes_;
};

[[nodiscard]] RadialGrid build_grid(int n, double R, int cell_count, Stretching stretching = Stretching::uniform());

template <typename Fn>
Field RadialGrid::cell_average(const Fn& f) const
{
    static constexpr double x[5] = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                                    0.9061798459386640};
    static constexpr double w[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                    0.4786286704993665, 0.2369268850561891};
    Field out(cells());
    for (Eigen::Index i = 0; i < cells(); ++i) {
        const double a = faces_(i), b = faces_(i + 1);
        const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        double num = 0.0, den = 0.0;
        for (int q = 0; q < 5; ++q) {
            const double r = mid + half * x[q];
            double weight = w[q];
            for (int p = 1; p < n_; ++p) weight *= r;
            num += weight * f(r);
            den += weight;
        }
        out(i) = num / den;
    }
    return out;
}

}  // namespace chemoblow
