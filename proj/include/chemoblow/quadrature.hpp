#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <queue>
#include <vector>

namespace chemoblow::quadrature {

template <typename Scalar>
struct Result {
    Scalar value{};
    Scalar error{};
    std::size_t intervals = 0;
    bool converged = false;
};

namespace detail {

// Kronrod abscissae (descending), Kronrod weights, and Gauss weights for the
// 7-point rule that is embedded at the odd Kronrod nodes.
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <typename Scalar>
struct Panel {
    Scalar a, b, value, error;
    friend bool operator<(const Panel& lhs, const Panel& rhs) { return lhs.error < rhs.error; }
};

template <typename Scalar, typename Fn>
Panel<Scalar> gauss_kronrod_15(const Fn& f, Scalar a, Scalar b)
{
    const Scalar center = (a + b) / Scalar(2);
    const Scalar half = (b - a) / Scalar(2);
    const Scalar fc = f(center);
    Scalar kronrod = Scalar(kWgk[7]) * fc;
    Scalar gauss = Scalar(kWg[3]) * fc;
    for (std::size_t j = 0; j < 7; ++j) {
        const Scalar dx = half * Scalar(kXgk[j]);
        const Scalar pair = f(center - dx) + f(center + dx);
        kronrod += Scalar(kWgk[j]) * pair;
        if (j % 2 == 1) gauss += Scalar(kWg[j / 2]) * pair;
    }
    kronrod *= half;
    gauss *= half;
    return {a, b, kronrod, std::abs(kronrod - gauss)};
}

}  // namespace detail

/// Globally adaptive 7/15-point Gauss-Kronrod quadrature on a finite interval.
/// The panel with the largest error estimate is bisected until the summed
/// estimate falls below max(abs_tol, rel_tol * |I|). Endpoint values are never
/// sampled, so integrable endpoint singularities are admissible.
template <typename Scalar, typename Fn>
Result<Scalar> integrate(const Fn& f, Scalar a, Scalar b, Scalar rel_tol = Scalar(1e-10),
                         Scalar abs_tol = Scalar(0), std::size_t max_intervals = 4000)
{
    using detail::Panel;
    std::priority_queue<Panel<Scalar>> panels;
    panels.push(detail::gauss_kronrod_15(f, a, b));
    Scalar total = panels.top().value;
    Scalar error = panels.top().error;

    Result<Scalar> out;
    while (true) {
        if (error <= std::max(abs_tol, rel_tol * std::abs(total))) {
            out.converged = true;
            break;
        }
        if (panels.size() >= max_intervals) break;
        const Panel<Scalar> worst = panels.top();
        panels.pop();
        const Scalar mid = (worst.a + worst.b) / Scalar(2);
        const auto left = detail::gauss_kronrod_15(f, worst.a, mid);
        const auto right = detail::gauss_kronrod_15(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        panels.push(left);
        panels.push(right);
    }

    // Re-sum to shed the drift of the incremental updates.
    out.intervals = panels.size();
    Scalar value(0), err(0);
    while (!panels.empty()) {
        value += panels.top().value;
        err += panels.top().error;
        panels.pop();
    }
    out.value = value;
    out.error = err;
    if (!out.converged) out.converged = err <= std::max(abs_tol, rel_tol * std::abs(value));
    return out;
}

/// Integrates over consecutive sub-intervals given by `breaks`, which lets
/// callers put known kinks on panel boundaries.
template <typename Scalar, typename Fn>
Result<Scalar> integrate_piecewise(const Fn& f, const std::vector<Scalar>& breaks,
                                   Scalar rel_tol = Scalar(1e-10))
{
    Result<Scalar> out;
    out.converged = true;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        if (!(breaks[i + 1] > breaks[i])) continue;
        const auto part = integrate<Scalar>(f, breaks[i], breaks[i + 1], rel_tol);
        out.value += part.value;
        out.error += part.error;
        out.intervals += part.intervals;
        out.converged = out.converged && part.converged;
    }
    return out;
}

}  // namespace chemoblow::quadrature
