#pragma once

#include <cstddef>
#include <span>

namespace abc {

double mean(std::span<const double> xs);
// Unbiased (n - 1) sample variance; 0 for fewer than two values.
double sample_variance(std::span<const double> xs);
double sample_sd(std::span<const double> xs);
// sample_sd / sqrt(n).
double standard_error(std::span<const double> xs);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
};

// Ordinary least squares y = intercept + slope x; needs at least 3 points.
LinearFit ols_fit(std::span<const double> xs, std::span<const double> ys);

}  // namespace abc
