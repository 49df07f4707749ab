#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "abc/abc_core.hpp"
#include "abc/kernel.hpp"

namespace abc {

// The k-NN/kernel posterior estimate
//   g_hat(theta0) = 1/(k h^p) sum_j K((theta0 - Theta_(j)) / h)
// built from the accepted thetas only.
double g_hat(const AcceptedSet& accepted, double h, const KernelSpec& kernel,
             std::span<const double> theta0);

// Double-kernel estimate with fixed bandwidths h (theta) and delta (s):
//   sum_i L((s0-S_i)/delta) K((theta0-Theta_i)/h) / (h^p sum_i L((s0-S_i)/delta)).
// nullopt when no row receives weight.
std::optional<double> g_rosenblatt(const ReferenceTable& table, std::span<const double> s0,
                                   std::span<const double> theta0, double h, double delta,
                                   const KernelSpec& theta_kernel, const KernelSpec& summary_kernel);

// Rosenblatt form with the data-driven scale delta = d_(k). With a naive
// summary kernel this reduces to g_hat over abc_knn(k).
std::optional<double> g_smoothed_nn(const ReferenceTable& table, std::span<const double> s0,
                                    std::span<const double> theta0, double h, std::size_t k,
                                    const KernelSpec& theta_kernel, const KernelSpec& summary_kernel);

using ThetaFunctional = std::function<double(std::span<const double>)>;

// (1/k) sum_j phi(Theta_(j)), the ABC estimate of E[phi(Theta) | S = s0].
double posterior_functional(const AcceptedSet& accepted, const ThetaFunctional& phi);

// Axis-aligned tensor grid; the last axis varies fastest.
struct GridSpec {
    std::vector<double> lower;
    std::vector<double> upper;
    std::vector<std::size_t> points;

    std::size_t dim() const noexcept { return points.size(); }
    std::size_t size() const noexcept;
    double step(std::size_t axis) const noexcept;
    double coordinate(std::size_t axis, std::size_t i) const noexcept;
    void point(std::size_t flat, std::span<double> out) const;
};

inline constexpr std::size_t kDefaultGridPoints1D = 512;
inline constexpr std::size_t kMaxDefaultGridPoints = 100'000;

// [min Theta_(j) - pad, max Theta_(j) + pad] per coordinate.
GridSpec padded_grid(const AcceptedSet& accepted, double pad, std::size_t points_per_axis);
// Pad 4h; 512 points for p = 1, otherwise at most 1e5 points in total.
GridSpec default_grid(const AcceptedSet& accepted, double h);

struct DensityMeta {
    std::size_t n = 0;
    std::size_t k = 0;
    double h = 0.0;
    double radius_next = 0.0;
    KernelKind kernel = KernelKind::gaussian;
    std::vector<double> s0;
    std::uint64_t seed = 0;
};

struct DensityEstimate {
    GridSpec grid;
    std::vector<double> values;
    DensityMeta meta;
};

// g_hat on every grid point. Each value equals g_hat(accepted, h, kernel, point)
// exactly; only kernel terms that are identically zero are skipped.
DensityEstimate estimate_density(const AcceptedSet& accepted, double h, const KernelSpec& kernel,
                                 const GridSpec& grid, std::uint64_t seed = 0);

// Tensor-product trapezoid rule over the grid.
double trapezoid_integral(const GridSpec& grid, std::span<const double> values);

}  // namespace abc
