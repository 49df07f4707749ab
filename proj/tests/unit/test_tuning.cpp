#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <vector>

#include "abc/errors.hpp"
#include "abc/kernel.hpp"
#include "abc/model_zoo.hpp"
#include "abc/tuning.hpp"

namespace {

using boost::math::quadrature::gauss_kronrod;

TEST(Schedule, Regimes) {
    EXPECT_EQ(abc::regime_for(1), abc::Regime::m_le_3);
    EXPECT_EQ(abc::regime_for(3), abc::Regime::m_le_3);
    EXPECT_EQ(abc::regime_for(4), abc::Regime::m_eq_4);
    EXPECT_EQ(abc::regime_for(5), abc::Regime::m_gt_4);
    EXPECT_EQ(abc::to_string(abc::Regime::m_gt_4), "m_gt_4");
}

TEST(Schedule, HighDimensionalSummary) {
    const auto v = abc::schedule(5, 1, 1000000);
    EXPECT_EQ(v.k, 1000u);
    EXPECT_NEAR(v.h, std::pow(10.0, -0.6), 1e-12);
    EXPECT_NEAR(v.h, 0.2512, 1e-4);
    EXPECT_EQ(v.schedule.k_exponent.num, 5);
    EXPECT_EQ(v.schedule.k_exponent.den, 10);
}

TEST(Schedule, LowDimensionalSummary) {
    EXPECT_EQ(abc::schedule(1, 1, 1000000).k, 2154u);
    const auto v = abc::schedule(2, 2, 10);
    EXPECT_NEAR(v.schedule.k_exponent.value(), 0.6, 1e-15);
    EXPECT_NEAR(v.schedule.h_exponent.value(), -0.1, 1e-15);
    EXPECT_EQ(v.k, 4u);
}

TEST(Schedule, KStaysInRange) {
    for (std::size_t n : {2u, 3u, 10u, 1000u}) {
        for (std::size_t m : {1u, 4u, 9u}) {
            const auto v = abc::schedule(m, 1, n, 50.0);
            EXPECT_GE(v.k, 1u);
            EXPECT_LE(v.k, n - 1);
        }
    }
    EXPECT_THROW(abc::schedule(0, 1, 100), abc::InvalidArgument);
    EXPECT_THROW(abc::schedule(1, 1, 1), abc::InvalidArgument);
}

TEST(AcceptanceFraction, Values) {
    EXPECT_NEAR(*abc::acceptance_fraction(5, 1, 1000000), 1e-3, 1e-15);
    EXPECT_NEAR(*abc::acceptance_fraction(6, 2, 1000000), 1e-3, 1e-15);
    EXPECT_FALSE(abc::acceptance_fraction(3, 1, 1000).has_value());
    double prev = 1.0;
    for (std::size_t n = 10; n < 100000000; n *= 10) {
        const double f = *abc::acceptance_fraction(10, 1, n);
        EXPECT_LT(f, prev);
        prev = f;
    }
}

TEST(DistanceBounds, SpecPlugIns) {
    EXPECT_NEAR(*abc::distance_moment_bound(1, 9, 999, 1.0, 1.0, 2), 0.0199, 1e-12);
    EXPECT_NEAR(*abc::distance_moment_bound(2, 9, 999, 1.0, 1.0, 2), 0.01 * (1 + std::log(100.0)), 1e-12);
    EXPECT_NEAR(*abc::distance_moment_bound(2, 9, 999, 1.0, 1.0, 2), 0.05605, 1e-5);
    EXPECT_TRUE(abc::distance_bound_applies(1, 9, 999, 1.0, 1.0));
    EXPECT_FALSE(abc::distance_bound_applies(1, 90, 99, 0.5, 1.0));
    EXPECT_FALSE(abc::distance_moment_bound(1, 90, 99, 0.5, 1.0, 2).has_value());
}

TEST(DistanceBounds, FourthMomentDisplays) {
    const double r = 0.01;
    // m = 1: 1/(xi^4 (1-4)) r^4 - L^3 r/(xi(1/4-1))
    const double m1 = (1.0 / (1.0 * (1.0 - 4.0))) * std::pow(r, 4.0) - r / (1.0 * (0.25 - 1.0));
    EXPECT_NEAR(*abc::distance_moment_bound(1, 9, 999, 1.0, 1.0, 4), m1, 1e-15);
    const double m4 = (1.0 + std::log(1.0 / r)) * r;
    EXPECT_NEAR(*abc::distance_moment_bound(4, 9, 999, 1.0, 1.0, 4), m4, 1e-15);
    const auto t = abc::distance_terms(2, 9, 999, 1.0, 1.0);
    EXPECT_TRUE(std::isnan(t.D_m));
    const auto t4 = abc::distance_terms(4, 9, 999, 1.0, 1.0);
    EXPECT_TRUE(std::isnan(t4.Delta_m));
}

TEST(Xi0, UniformBoxInterior) {
    auto model = abc::make_model("UniformBox1D");
    const std::vector<double> s0{0.5};
    const auto est = abc::estimate_xi0(*model, s0, 1.0, 3);
    EXPECT_NEAR(est.xi0, 1.0, 0.05);
}

TEST(Xi0, UniformBoxBoundary) {
    auto model = abc::make_model("UniformBox1D");
    const std::vector<double> s0{0.0};
    const auto est = abc::estimate_xi0(*model, s0, 1.0, 4);
    EXPECT_NEAR(est.xi0, 1.0, 0.05);
    EXPECT_GT(est.xi0, 0.0);
}

TEST(Xi0, OutsideSupportIsInsufficient) {
    auto model = abc::make_model("UniformBox1D");
    const std::vector<double> s0{50.0};
    abc::Xi0Options opts;
    opts.aux_sample_size = 10000;
    EXPECT_THROW(abc::estimate_xi0(*model, s0, 1.0, 4, opts), abc::InsufficientSample);
}

TEST(Phi, AnalyticMatchesFiniteDifference) {
    auto model = abc::make_model("GaussianConjugate1D");
    const auto* joint = model->analytic_joint();
    ASSERT_NE(joint, nullptr);
    const std::vector<double> s0{1.0};
    const abc::KernelSpec k(abc::KernelKind::gaussian, 1);
    for (double t : {-1.0, 0.5, 1.7, 2.5}) {
        const std::vector<double> th{t};
        const double a = abc::phi_terms(*joint, th, s0, k).phi2;
        const double fd = abc::phi2_finite_difference(*joint, th, s0, 1e-4);
        EXPECT_LE(std::abs(a - fd), 1e-5 * std::abs(a)) << "theta " << t;
    }
}

TEST(Phi, GaussianKernelPhi1IsHalfCurvature) {
    auto model = abc::make_model("GaussianConjugate1D");
    const auto* joint = model->analytic_joint();
    const std::vector<double> s0{1.0}, th{0.3};
    const abc::KernelSpec k(abc::KernelKind::gaussian, 1);
    EXPECT_NEAR(abc::phi_terms(*joint, th, s0, k).phi1, 0.5 * joint->d2_joint_dtheta(th, s0, 0, 0), 1e-15);
}

TEST(MisePrediction, QuantitiesMatchIndependentQuadrature) {
    auto model = abc::make_model("GaussianConjugate1D");
    const auto* joint = model->analytic_joint();
    const std::vector<double> s0{1.0};
    const abc::KernelSpec k(abc::KernelKind::gaussian, 1);
    const auto tq = abc::theorem4_quantities(*model, s0, k, 0.05, 20.0);
    const double fbar = joint->marginal(s0);
    EXPECT_NEAR(fbar, std::exp(-0.25) / std::sqrt(4 * std::numbers::pi), 1e-12);
    auto f = [&](double t) { return joint->joint(std::span<const double>(&t, 1), s0); };
    auto phi1 = [&](double t) { return 0.5 * joint->d2_joint_dtheta(std::span<const double>(&t, 1), s0, 0, 0); };
    auto bracket = [&](double t) {
        // 1/(2m+4) with m = 1
        const double phi2 = joint->d2_joint_ds(std::span<const double>(&t, 1), s0, 0) / 6.0;
        const double phi3 = joint->d2_marginal_ds(s0, 0) / 6.0;
        return phi2 * fbar - phi3 * f(t);
    };
    const double p1 = gauss_kronrod<double, 61>::integrate([&](double t) { return phi1(t) * phi1(t); }, -12, 13, 15, 1e-13) / (fbar * fbar);
    const double p2 = gauss_kronrod<double, 61>::integrate([&](double t) { return bracket(t) * bracket(t); }, -12, 13, 15, 1e-13) / std::pow(fbar, 4);
    const double p3 = 2 * gauss_kronrod<double, 61>::integrate([&](double t) { return phi1(t) * bracket(t); }, -12, 13, 15, 1e-13) / std::pow(fbar, 3);
    EXPECT_NEAR(tq.Phi1, p1, 1e-6 * p1);
    EXPECT_NEAR(tq.Phi2, p2, 1e-6 * p2);
    EXPECT_NEAR(tq.Phi3, p3, 1e-6 * std::abs(p3) + 1e-12);
    EXPECT_GE(tq.Phi1, 0);
    EXPECT_GE(tq.Phi2, 0);
}

TEST(MisePrediction, VarianceOnlyPrediction) {
    abc::TheoreticalQuantities tq;
    tq.p = 1;
    tq.m = 1;
    tq.xi0 = 1;
    tq.L_diam = 1;
    tq.kernel_sq_integral = 1.0 / (2 * std::sqrt(std::numbers::pi));
    EXPECT_NEAR(abc::mise_prediction(tq, 1, 1, 1000, 50, 0.2), tq.kernel_sq_integral / (50 * 0.2), 1e-15);
}

TEST(MisePrediction, SmallBandwidthLimit) {
    auto model = abc::make_model("GaussianConjugate1D");
    const std::vector<double> s0{1.0};
    const abc::KernelSpec k(abc::KernelKind::gaussian, 1);
    const auto tq = abc::theorem4_quantities(*model, s0, k, 0.05, 20.0);
    const std::size_t n = 100000, kk = 500;
    const double h = 1e-4;
    const double pred = abc::mise_prediction(tq, 1, 1, n, kk, h);
    const auto d = tq.distances(kk, n);
    const double limit = tq.Phi2 * d.Delta_m + tq.kernel_sq_integral / (kk * h);
    EXPECT_NEAR(pred, limit, 1e-6 * limit);
}

}  // namespace
