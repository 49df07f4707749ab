#include "abc/stats.hpp"

#include <cmath>

#include "abc/errors.hpp"

namespace abc {

double mean(std::span<const double> xs) {
    if (xs.empty()) throw InvalidArgument("mean of an empty sample");
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

double sample_variance(std::span<const double> xs) {
    if (xs.size() < 2) return 0.0;
    const double mu = mean(xs);
    double ss = 0.0;
    for (double x : xs) ss += (x - mu) * (x - mu);
    return ss / static_cast<double>(xs.size() - 1);
}

double sample_sd(std::span<const double> xs) { return std::sqrt(sample_variance(xs)); }

double standard_error(std::span<const double> xs) {
    if (xs.empty()) throw InvalidArgument("standard error of an empty sample");
    return sample_sd(xs) / std::sqrt(static_cast<double>(xs.size()));
}

LinearFit ols_fit(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw DimensionMismatch("ols_fit: x and y lengths differ");
    if (xs.size() < 3) throw InvalidArgument("ols_fit needs at least 3 points");
    const double n = static_cast<double>(xs.size());
    const double mx = mean(xs);
    const double my = mean(ys);
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (!(sxx > 0.0)) throw InvalidArgument("ols_fit: x values are all equal");
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double rss = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = ys[i] - fit.intercept - fit.slope * xs[i];
        rss += r * r;
    }
    fit.slope_stderr = std::sqrt(rss / (n - 2.0) / sxx);
    return fit;
}

}  // namespace abc
