#include "abc/quadrature.hpp"

#include <cmath>
#include <vector>

#include "abc/errors.hpp"

namespace abc {

double pairwise_sum(std::span<const double> values) noexcept {
    if (values.size() <= 8) {
        double s = 0.0;
        for (double v : values) s += v;
        return s;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

QuadratureResult integrate_trapezoid(const std::function<double(double)>& f, double a, double b,
                                     const TrapezoidOptions& options) {
    if (!(b > a) || !std::isfinite(a) || !std::isfinite(b)) {
        throw InvalidArgument("integrate_trapezoid requires a finite interval with a < b");
    }
    QuadratureResult r;
    double width = b - a;
    double estimate = 0.5 * width * (f(a) + f(b));
    r.evaluations = 2;
    std::size_t panels = 1;
    std::vector<double> mids;
    for (std::size_t level = 1; level <= options.max_levels; ++level) {
        mids.resize(panels);
        for (std::size_t i = 0; i < panels; ++i) {
            mids[i] = f(a + (static_cast<double>(i) + 0.5) * width);
        }
        r.evaluations += panels;
        const double refined = 0.5 * estimate + 0.5 * width * pairwise_sum(mids);
        const double change = std::abs(refined - estimate);
        estimate = refined;
        panels *= 2;
        width *= 0.5;
        if (level >= options.min_levels &&
            change <= options.rel_tol * std::abs(refined) + options.abs_tol) {
            r.converged = true;
            r.error_estimate = change;
            break;
        }
        r.error_estimate = change;
    }
    r.value = estimate;
    return r;
}

}  // namespace abc
