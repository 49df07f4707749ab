#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace abc {

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    std::size_t evaluations = 0;
    bool converged = false;
};

struct TrapezoidOptions {
    double rel_tol = 1e-6;
    double abs_tol = 1e-14;
    std::size_t min_levels = 6;
    std::size_t max_levels = 24;
};

// Trapezoid rule refined by interval halving until successive estimates agree.
// New midpoints at each level are combined by pairwise summation.
QuadratureResult integrate_trapezoid(const std::function<double(double)>& f, double a, double b,
                                     const TrapezoidOptions& options = {});

// Pairwise (cascade) summation; deterministic for a given input order.
double pairwise_sum(std::span<const double> values) noexcept;

}  // namespace abc
