#include "chemoblow/grid.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "chemoblow/error.hpp"

namespace chemoblow {

namespace {

double unit_sphere_area(int n)
{
    const double half_n = 0.5 * n;
    return n * std::pow(std::numbers::pi, half_n) / std::tgamma(half_n + 1.0);
}

}  // namespace

RadialGrid::RadialGrid(int n, double R, Eigen::VectorXd faces)
    : n_(n), R_(R), sphere_area_(unit_sphere_area(n)), faces_(std::move(faces))
{
    const Eigen::Index cells = faces_.size() - 1;
    if (cells < 1) throw ParameterError("RadialGrid: need at least one cell");
    for (Eigen::Index j = 0; j < cells; ++j)
        if (!(faces_(j + 1) > faces_(j))) throw ParameterError("RadialGrid: faces must be strictly increasing");

    centers_.resize(cells);
    volumes_.resize(cells);
    face_areas_.resize(cells + 1);
    center_gaps_ = Eigen::VectorXd::Zero(cells + 1);
    for (Eigen::Index j = 0; j <= cells; ++j) face_areas_(j) = sphere_area_ * std::pow(faces_(j), n_ - 1);
    for (Eigen::Index i = 0; i < cells; ++i) {
        centers_(i) = 0.5 * (faces_(i) + faces_(i + 1));
        volumes_(i) = sphere_area_ * (std::pow(faces_(i + 1), n_) - std::pow(faces_(i), n_)) / n_;
    }
    conductances_ = Eigen::VectorXd::Zero(cells + 1);
    inverse_gaps_ = Eigen::VectorXd::Zero(cells + 1);
    for (Eigen::Index j = 1; j < cells; ++j) {
        center_gaps_(j) = centers_(j) - centers_(j - 1);
        inverse_gaps_(j) = 1.0 / center_gaps_(j);
        conductances_(j) = face_areas_(j) / center_gaps_(j);
    }
    inverse_volumes_ = volumes_.cwiseInverse();
}

double RadialGrid::ball_volume() const
{
    return sphere_area_ * std::pow(R_, n_) / n_;
}

double RadialGrid::min_width() const
{
    double h = R_;
    for (Eigen::Index i = 0; i < cells(); ++i) h = std::min(h, faces_(i + 1) - faces_(i));
    return h;
}

RadialGrid build_grid(int n, double R, int cell_count, Stretching stretching)
{
    if (n < 1) throw ParameterError("build_grid: dimension must be positive");
    if (!(R > 0.0)) throw ParameterError("build_grid: R must be positive");
    if (cell_count < kMinCells)
        throw ParameterError("build_grid: cell_count " + std::to_string(cell_count) + " below minimum " +
                             std::to_string(kMinCells));

    Eigen::VectorXd faces(cell_count + 1);
    faces(0) = 0.0;
    if (stretching.kind == Stretching::Kind::uniform || stretching.ratio == 1.0) {
        for (int j = 1; j <= cell_count; ++j) faces(j) = R * static_cast<double>(j) / cell_count;
    } else {
        const double q = stretching.ratio;
        if (!(q > 0.0 && q <= 1.0)) throw ParameterError("build_grid: geometric ratio must lie in (0, 1]");
        // widths h_i = h_0 q^{-i}; accumulate, then rescale so the last face is R.
        double width = 1.0, acc = 0.0;
        for (int j = 1; j <= cell_count; ++j) {
            acc += width;
            faces(j) = acc;
            width /= q;
        }
        faces *= R / acc;
    }
    faces(cell_count) = R;
    return RadialGrid(n, R, std::move(faces));
}

}  // namespace chemoblow
