#include "abc/cde.hpp"

#include <algorithm>
#include <cmath>

#include "abc/errors.hpp"

namespace abc {

namespace {

void check_bandwidth(double h, const char* name) {
    if (!(h > 0.0) || !std::isfinite(h)) {
        throw InvalidArgument(std::string(name) + " must be a positive finite bandwidth");
    }
}

double scaled_r2(std::span<const double> a, std::span<const double> b, double h) {
    double r2 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double u = (a[i] - b[i]) / h;
        r2 += u * u;
    }
    return r2;
}

void check_kernels(const ReferenceTable& table, std::span<const double> s0,
                   std::span<const double> theta0, const KernelSpec& theta_kernel,
                   const KernelSpec& summary_kernel) {
    require_dim(s0.size(), table.summary_dim(), "observed summary s0");
    require_dim(theta0.size(), table.param_dim(), "evaluation point theta0");
    require_dim(theta_kernel.dim(), table.param_dim(), "theta kernel");
    require_dim(summary_kernel.dim(), table.summary_dim(), "summary kernel");
}

// sum_i w_i K_i / (h^p sum_i w_i), or nullopt when every weight vanishes.
template <class Weight>
std::optional<double> weighted_ratio(const ReferenceTable& table, std::span<const double> theta0,
                                     double h, const KernelSpec& theta_kernel, Weight&& weight) {
    double numerator = 0.0;
    double denominator = 0.0;
    for (std::size_t i = 0; i < table.size(); ++i) {
        const double w = weight(i);
        if (w == 0.0) continue;
        numerator += w * theta_kernel.radial(scaled_r2(theta0, table.theta(i), h));
        denominator += w;
    }
    if (denominator == 0.0) return std::nullopt;
    return numerator / (std::pow(h, static_cast<double>(table.param_dim())) * denominator);
}

}  // namespace

double g_hat(const AcceptedSet& accepted, double h, const KernelSpec& kernel,
             std::span<const double> theta0) {
    if (accepted.empty()) throw EmptyAcceptedSet("g_hat: the accepted set is empty");
    check_bandwidth(h, "g_hat h");
    require_dim(theta0.size(), accepted.p, "evaluation point theta0");
    require_dim(kernel.dim(), accepted.p, "theta kernel");
    double sum = 0.0;
    for (std::size_t j = 0; j < accepted.size(); ++j) {
        sum += kernel.radial(scaled_r2(theta0, accepted.theta(j), h));
    }
    const double k = static_cast<double>(accepted.size());
    return sum / (k * std::pow(h, static_cast<double>(accepted.p)));
}

std::optional<double> g_rosenblatt(const ReferenceTable& table, std::span<const double> s0,
                                   std::span<const double> theta0, double h, double delta,
                                   const KernelSpec& theta_kernel, const KernelSpec& summary_kernel) {
    check_bandwidth(h, "g_rosenblatt h");
    check_bandwidth(delta, "g_rosenblatt delta");
    check_kernels(table, s0, theta0, theta_kernel, summary_kernel);
    return weighted_ratio(table, theta0, h, theta_kernel, [&](std::size_t i) {
        return summary_kernel.radial(scaled_r2(s0, table.summary(i), delta));
    });
}

std::optional<double> g_smoothed_nn(const ReferenceTable& table, std::span<const double> s0,
                                    std::span<const double> theta0, double h, std::size_t k,
                                    const KernelSpec& theta_kernel, const KernelSpec& summary_kernel) {
    check_bandwidth(h, "g_smoothed_nn h");
    check_kernels(table, s0, theta0, theta_kernel, summary_kernel);
    const std::size_t n = table.size();
    if (k < 1 || k + 1 > n) {
        throw InvalidArgument("g_smoothed_nn: k must satisfy 1 <= k <= N-1");
    }
    const std::vector<double> d2 = squared_distances(table, s0);
    std::vector<double> sorted = d2;
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(k - 1), sorted.end());
    const double scale2 = sorted[k - 1];
    if (!(scale2 > 0.0)) {
        throw DegenerateScale("g_smoothed_nn: d_(k) = 0, the summary kernel scale is degenerate");
    }
    // ‖(s0 - S_i)/d_(k)‖² as d2_i / d2_(k), so the k-th row sits exactly on the unit sphere.
    return weighted_ratio(table, theta0, h, theta_kernel,
                          [&](std::size_t i) { return summary_kernel.radial(d2[i] / scale2); });
}

double posterior_functional(const AcceptedSet& accepted, const ThetaFunctional& phi) {
    if (accepted.empty()) throw EmptyAcceptedSet("posterior_functional: the accepted set is empty");
    double sum = 0.0;
    for (std::size_t j = 0; j < accepted.size(); ++j) sum += phi(accepted.theta(j));
    return sum / static_cast<double>(accepted.size());
}

std::size_t GridSpec::size() const noexcept {
    std::size_t total = points.empty() ? 0 : 1;
    for (std::size_t n : points) total *= n;
    return total;
}

double GridSpec::step(std::size_t axis) const noexcept {
    return (upper[axis] - lower[axis]) / static_cast<double>(points[axis] - 1);
}

double GridSpec::coordinate(std::size_t axis, std::size_t i) const noexcept {
    return lower[axis] + static_cast<double>(i) * step(axis);
}

void GridSpec::point(std::size_t flat, std::span<double> out) const {
    for (std::size_t a = dim(); a-- > 0;) {
        out[a] = coordinate(a, flat % points[a]);
        flat /= points[a];
    }
}

GridSpec padded_grid(const AcceptedSet& accepted, double pad, std::size_t points_per_axis) {
    if (accepted.empty()) throw EmptyAcceptedSet("padded_grid: the accepted set is empty");
    if (points_per_axis < 2) throw InvalidArgument("grid needs at least 2 points per axis");
    if (!(pad > 0.0)) throw InvalidArgument("grid padding must be > 0");
    GridSpec grid;
    grid.lower.assign(accepted.p, std::numeric_limits<double>::infinity());
    grid.upper.assign(accepted.p, -std::numeric_limits<double>::infinity());
    grid.points.assign(accepted.p, points_per_axis);
    for (std::size_t j = 0; j < accepted.size(); ++j) {
        const auto theta = accepted.theta(j);
        for (std::size_t a = 0; a < accepted.p; ++a) {
            grid.lower[a] = std::min(grid.lower[a], theta[a]);
            grid.upper[a] = std::max(grid.upper[a], theta[a]);
        }
    }
    for (std::size_t a = 0; a < accepted.p; ++a) {
        grid.lower[a] -= pad;
        grid.upper[a] += pad;
    }
    return grid;
}

GridSpec default_grid(const AcceptedSet& accepted, double h) {
    check_bandwidth(h, "default_grid h");
    std::size_t per_axis = kDefaultGridPoints1D;
    if (accepted.p > 1) {
        per_axis = static_cast<std::size_t>(
            std::floor(std::pow(static_cast<double>(kMaxDefaultGridPoints), 1.0 / static_cast<double>(accepted.p)) + 1e-9));
        per_axis = std::max<std::size_t>(per_axis, 2);
    }
    return padded_grid(accepted, 4.0 * h, per_axis);
}

DensityEstimate estimate_density(const AcceptedSet& accepted, double h, const KernelSpec& kernel,
                                 const GridSpec& grid, std::uint64_t seed) {
    if (accepted.empty()) throw EmptyAcceptedSet("estimate_density: the accepted set is empty");
    check_bandwidth(h, "estimate_density h");
    require_dim(kernel.dim(), accepted.p, "theta kernel");
    require_dim(grid.dim(), accepted.p, "grid");
    const std::size_t p = accepted.p;
    const std::size_t total = grid.size();

    DensityEstimate est;
    est.grid = grid;
    est.meta = {accepted.table_size, accepted.size(), h,       accepted.radius_next,
                kernel.kind(),       accepted.s0,     seed};
    std::vector<double> sums(total, 0.0);

    // exp(-r2/2) underflows to exactly 0 beyond r2 ~ 1490, so a 40h window
    // reproduces the dense sum bit for bit.
    const double reach =
        h * std::min(kernel.support_radius(), 40.0 / kernel.scale()) * (1.0 + 1e-12);
    std::vector<std::size_t> lo(p), hi(p), idx(p);
    std::vector<double> point(p);
    for (std::size_t j = 0; j < accepted.size(); ++j) {
        const auto centre = accepted.theta(j);
        bool empty = false;
        for (std::size_t a = 0; a < p; ++a) {
            const double step = grid.step(a);
            const double first = std::ceil((centre[a] - reach - grid.lower[a]) / step) - 1.0;
            const double last = std::floor((centre[a] + reach - grid.lower[a]) / step) + 1.0;
            const double max_i = static_cast<double>(grid.points[a] - 1);
            if (last < 0.0 || first > max_i) {
                empty = true;
                break;
            }
            lo[a] = static_cast<std::size_t>(std::max(first, 0.0));
            hi[a] = static_cast<std::size_t>(std::min(last, max_i));
        }
        if (empty) continue;
        idx = lo;
        for (;;) {
            std::size_t flat = 0;
            for (std::size_t a = 0; a < p; ++a) {
                flat = flat * grid.points[a] + idx[a];
                point[a] = grid.coordinate(a, idx[a]);
            }
            const double value = kernel.radial(scaled_r2(point, centre, h));
            if (value != 0.0) sums[flat] += value;
            std::size_t a = p;
            while (a-- > 0) {
                if (idx[a] < hi[a]) {
                    ++idx[a];
                    break;
                }
                idx[a] = lo[a];
            }
            if (a == static_cast<std::size_t>(-1)) break;
        }
    }
    const double norm = static_cast<double>(accepted.size()) * std::pow(h, static_cast<double>(p));
    est.values.resize(total);
    for (std::size_t g = 0; g < total; ++g) est.values[g] = sums[g] / norm;
    return est;
}

double trapezoid_integral(const GridSpec& grid, std::span<const double> values) {
    require_dim(values.size(), grid.size(), "trapezoid values");
    const std::size_t p = grid.dim();
    std::vector<std::size_t> idx(p, 0);
    double total = 0.0;
    for (std::size_t flat = 0; flat < values.size(); ++flat) {
        double w = 1.0;
        std::size_t rest = flat;
        for (std::size_t a = p; a-- > 0;) {
            const std::size_t i = rest % grid.points[a];
            rest /= grid.points[a];
            const bool edge = i == 0 || i + 1 == grid.points[a];
            w *= grid.step(a) * (edge ? 0.5 : 1.0);
        }
        total += w * values[flat];
    }
    return total;
}

}  // namespace abc
