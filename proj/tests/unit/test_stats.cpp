#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "abc/errors.hpp"
#include "abc/ks_test.hpp"
#include "abc/quadrature.hpp"
#include "abc/rng.hpp"
#include "abc/stats.hpp"

namespace {

TEST(Stats, MomentsAndErrors) {
    const std::vector<double> xs{1, 2, 3, 4};
    EXPECT_DOUBLE_EQ(abc::mean(xs), 2.5);
    EXPECT_DOUBLE_EQ(abc::sample_variance(xs), 5.0 / 3.0);
    EXPECT_DOUBLE_EQ(abc::standard_error(xs), std::sqrt(5.0 / 3.0 / 4.0));
    const std::vector<double> one{1.0};
    EXPECT_DOUBLE_EQ(abc::sample_variance(one), 0.0);
    EXPECT_THROW(abc::mean(std::vector<double>{}), abc::InvalidArgument);
}

TEST(Stats, OlsRecoversLine) {
    const std::vector<double> x{1, 2, 3, 4, 5};
    std::vector<double> y;
    for (double v : x) y.push_back(-0.4 * v + 2.0);
    const auto fit = abc::ols_fit(x, y);
    EXPECT_NEAR(fit.slope, -0.4, 1e-14);
    EXPECT_NEAR(fit.intercept, 2.0, 1e-13);
    EXPECT_NEAR(fit.slope_stderr, 0.0, 1e-12);
    const std::vector<double> two{1, 2};
    EXPECT_THROW(abc::ols_fit(two, two), abc::InvalidArgument);
}

TEST(Ks, KolmogorovSurvivalKnownValues) {
    EXPECT_NEAR(abc::kolmogorov_survival(1.0), 0.26999967167735456, 1e-12);
    EXPECT_NEAR(abc::kolmogorov_survival(1.36), 0.04946, 1e-4);
    EXPECT_NEAR(abc::kolmogorov_survival(0.5), 0.96394524, 1e-7);
    EXPECT_DOUBLE_EQ(abc::kolmogorov_survival(0.0), 1.0);
    EXPECT_LT(abc::kolmogorov_survival(4.0), 1e-12);
}

TEST(Ks, IdenticalSamples) {
    const std::vector<double> a{0.1, 0.5, 0.9, 1.3};
    const auto r = abc::ks_two_sample(a, a);
    EXPECT_DOUBLE_EQ(r.statistic, 0.0);
    EXPECT_DOUBLE_EQ(r.p_value, 1.0);
}

TEST(Ks, DisjointSamples) {
    const std::vector<double> a{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    const std::vector<double> b{10, 11, 12, 13, 14, 15, 16, 17, 18, 19};
    const auto r = abc::ks_two_sample(a, b);
    EXPECT_DOUBLE_EQ(r.statistic, 1.0);
    EXPECT_LT(r.p_value, 1e-3);
}

TEST(Ks, TiesHandled) {
    const std::vector<double> a{1, 1, 2, 2};
    const std::vector<double> b{1, 2, 2, 2};
    EXPECT_DOUBLE_EQ(abc::ks_two_sample(a, b).statistic, 0.25);
}

TEST(Ks, ShiftDetected) {
    abc::Substream rng(1);
    std::vector<double> a(500), b(500);
    for (double& x : a) x = rng.normal();
    for (double& x : b) x = rng.normal() + 0.5;
    EXPECT_LT(abc::ks_two_sample(a, b).p_value, 1e-6);
}

TEST(Quadrature, Trapezoid) {
    const auto r = abc::integrate_trapezoid([](double x) { return std::exp(-x * x); }, -8, 8);
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.value, std::sqrt(std::numbers::pi), 1e-9);
}

TEST(Quadrature, PairwiseSum) {
    std::vector<double> v(1000001, 0.1);
    EXPECT_NEAR(abc::pairwise_sum(v), 100000.1, 1e-7);
}

}  // namespace
