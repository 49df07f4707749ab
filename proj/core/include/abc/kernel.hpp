#pragma once

#include <cstddef>
#include <span>
#include <string_view>

namespace abc {

enum class KernelKind { naive, gaussian };

std::string_view to_string(KernelKind kind) noexcept;
KernelKind parse_kernel_kind(std::string_view name);

// Volume of the unit Euclidean ball in R^p, pi^{p/2} / Gamma(1 + p/2).
double unit_ball_volume(std::size_t p);

// A normalised radial kernel on R^dim. With scale c the kernel is
// K_c(u) = c^dim K(c u), which still integrates to one.
//   naive:    K(u) = 1/V_dim on the closed unit ball
//   gaussian: K(u) = (2 pi)^{-dim/2} exp(-‖u‖²/2)
class KernelSpec {
public:
    KernelSpec(KernelKind kind, std::size_t dim, double scale = 1.0);

    KernelKind kind() const noexcept { return kind_; }
    std::size_t dim() const noexcept { return dim_; }
    double scale() const noexcept { return scale_; }
    double normalizer() const noexcept { return normalizer_; }

    // Value at any u with ‖u‖² = r2.
    double radial(double r2) const noexcept;
    double operator()(std::span<const double> u) const;

    // ∫ u_i² K(u) du for any coordinate i (mixed moments vanish).
    double second_moment() const noexcept;
    // ∫ K(u)² du.
    double squared_integral() const noexcept;
    // Radius outside which K vanishes; +inf for the Gaussian.
    double support_radius() const noexcept;

private:
    KernelKind kind_;
    std::size_t dim_;
    double scale_;
    double normalizer_;
};

double kernel_eval(const KernelSpec& kernel, std::span<const double> u);

}  // namespace abc
