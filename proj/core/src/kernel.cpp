#include "abc/kernel.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "abc/errors.hpp"

namespace abc {

std::string_view to_string(KernelKind kind) noexcept {
    return kind == KernelKind::naive ? "naive" : "gaussian";
}

KernelKind parse_kernel_kind(std::string_view name) {
    if (name == "naive") return KernelKind::naive;
    if (name == "gaussian") return KernelKind::gaussian;
    throw InvalidArgument("unknown kernel '" + std::string(name) + "' (expected naive|gaussian)");
}

// V_p = V_{p-2} 2 pi / p with V_0 = 1, V_1 = 2: the integer and half-integer
// Gamma closed forms unrolled.
double unit_ball_volume(std::size_t p) {
    if (p == 0) throw InvalidArgument("unit_ball_volume requires p >= 1");
    double v = (p % 2 == 0) ? 1.0 : 2.0;
    for (std::size_t d = (p % 2 == 0) ? 2 : 3; d <= p; d += 2) {
        v *= 2.0 * std::numbers::pi / static_cast<double>(d);
    }
    return v;
}

KernelSpec::KernelSpec(KernelKind kind, std::size_t dim, double scale)
    : kind_(kind), dim_(dim), scale_(scale) {
    if (dim_ == 0) throw InvalidArgument("kernel dimension must be >= 1");
    if (!(scale_ > 0.0) || !std::isfinite(scale_)) throw InvalidArgument("kernel scale must be > 0");
    const double base = kind_ == KernelKind::naive
                            ? 1.0 / unit_ball_volume(dim_)
                            : std::pow(2.0 * std::numbers::pi, -0.5 * static_cast<double>(dim_));
    normalizer_ = base * std::pow(scale_, static_cast<double>(dim_));
}

double KernelSpec::radial(double r2) const noexcept {
    const double scaled = scale_ == 1.0 ? r2 : scale_ * scale_ * r2;
    if (kind_ == KernelKind::naive) return scaled <= 1.0 ? normalizer_ : 0.0;
    return normalizer_ * std::exp(-0.5 * scaled);
}

double KernelSpec::operator()(std::span<const double> u) const {
    require_dim(u.size(), dim_, "kernel argument");
    double r2 = 0.0;
    for (double x : u) r2 += x * x;
    return radial(r2);
}

double KernelSpec::second_moment() const noexcept {
    const double base = kind_ == KernelKind::naive ? 1.0 / static_cast<double>(dim_ + 2) : 1.0;
    return base / (scale_ * scale_);
}

double KernelSpec::squared_integral() const noexcept {
    const double d = static_cast<double>(dim_);
    const double base = kind_ == KernelKind::naive ? 1.0 / unit_ball_volume(dim_)
                                                   : std::pow(4.0 * std::numbers::pi, -0.5 * d);
    return base * std::pow(scale_, d);
}

double KernelSpec::support_radius() const noexcept {
    return kind_ == KernelKind::naive ? 1.0 / scale_ : std::numeric_limits<double>::infinity();
}

double kernel_eval(const KernelSpec& kernel, std::span<const double> u) { return kernel(u); }

}  // namespace abc
