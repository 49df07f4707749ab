#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>
#include <vector>

#include "abc/abc_core.hpp"
#include "abc/cde.hpp"
#include "abc/density_io.hpp"
#include "abc/errors.hpp"
#include "abc/kernel.hpp"
#include "abc/model_zoo.hpp"
#include "abc/rng.hpp"

namespace {

using abc::KernelKind;
using abc::KernelSpec;

abc::AcceptedSet accepted_from(std::vector<double> thetas, std::size_t p = 1) {
    abc::AcceptedSet acc;
    acc.p = p;
    acc.m = 1;
    acc.s0 = {0.0};
    const std::size_t k = thetas.size() / p;
    acc.thetas = std::move(thetas);
    acc.summaries.assign(k, 0.0);
    for (std::size_t j = 0; j < k; ++j) acc.distances.push_back(0.01 * static_cast<double>(j));
    for (std::size_t j = 0; j < k; ++j) acc.source_indices.push_back(j);
    acc.table_size = 10 * k;
    acc.radius_next = 0.01 * static_cast<double>(k);
    return acc;
}

TEST(Kernel, UnitBallVolumes) {
    EXPECT_DOUBLE_EQ(abc::unit_ball_volume(1), 2.0);
    EXPECT_NEAR(abc::unit_ball_volume(2), std::numbers::pi, 1e-15);
    EXPECT_NEAR(abc::unit_ball_volume(3), 4.0 * std::numbers::pi / 3.0, 1e-14);
    EXPECT_NEAR(abc::unit_ball_volume(5), 8.0 * std::numbers::pi * std::numbers::pi / 15.0, 1e-13);
}

TEST(Kernel, PointValues) {
    const KernelSpec naive(KernelKind::naive, 1);
    const std::vector<double> zero{0.0}, edge{1.0}, outside{1.0001};
    EXPECT_DOUBLE_EQ(naive(zero), 0.5);
    EXPECT_DOUBLE_EQ(naive(edge), 0.5);
    EXPECT_DOUBLE_EQ(naive(outside), 0.0);
    const KernelSpec gauss(KernelKind::gaussian, 2);
    const std::vector<double> zero2{0.0, 0.0};
    EXPECT_NEAR(gauss(zero2), 1.0 / (2.0 * std::numbers::pi), 1e-15);
    EXPECT_THROW(gauss(zero), abc::DimensionMismatch);
}

TEST(Kernel, ParseKind) {
    EXPECT_EQ(abc::parse_kernel_kind("naive"), KernelKind::naive);
    EXPECT_EQ(abc::parse_kernel_kind("gaussian"), KernelKind::gaussian);
    EXPECT_THROW(abc::parse_kernel_kind("epanechnikov"), abc::InvalidArgument);
}

TEST(Kernel, MomentsAgainstQuadrature) {
    using boost::math::quadrature::gauss_kronrod;
    for (double c : {1.0, 2.5}) {
        for (KernelKind kind : {KernelKind::naive, KernelKind::gaussian}) {
            const KernelSpec k(kind, 1, c);
            auto f = [&](double u) { return k(std::span<const double>(&u, 1)); };
            const double lim = kind == KernelKind::naive ? 1.0 / c : 12.0 / c;
            const double mass = gauss_kronrod<double, 61>::integrate(f, -lim, lim, 10, 1e-13);
            const double m2 = gauss_kronrod<double, 61>::integrate([&](double u) { return u * u * f(u); }, -lim, lim, 10, 1e-13);
            const double sq = gauss_kronrod<double, 61>::integrate([&](double u) { return f(u) * f(u); }, -lim, lim, 10, 1e-13);
            EXPECT_NEAR(mass, 1.0, 1e-10);
            EXPECT_NEAR(m2, k.second_moment(), 1e-10);
            EXPECT_NEAR(sq, k.squared_integral(), 1e-10);
        }
    }
}

TEST(GHat, SinglePointNaive) {
    const auto acc = accepted_from({0.7});
    const std::vector<double> t{0.7};
    EXPECT_DOUBLE_EQ(abc::g_hat(acc, 0.5, KernelSpec(KernelKind::naive, 1), t), 1.0);
}

TEST(GHat, TwoPointGaussian) {
    const auto acc = accepted_from({0.0, 1.0});
    const std::vector<double> t{0.0};
    const double phi0 = 1.0 / std::sqrt(2 * std::numbers::pi);
    const double phi1 = phi0 * std::exp(-0.5);
    EXPECT_NEAR(abc::g_hat(acc, 1.0, KernelSpec(KernelKind::gaussian, 1), t), (phi0 + phi1) / 2, 1e-15);
    EXPECT_NEAR((phi0 + phi1) / 2, 0.32046, 1e-5);
}

TEST(GHat, Errors) {
    abc::AcceptedSet empty;
    empty.p = 1;
    const std::vector<double> t{0.0};
    EXPECT_THROW(abc::g_hat(empty, 1.0, KernelSpec(KernelKind::gaussian, 1), t), abc::EmptyAcceptedSet);
    const auto acc = accepted_from({0.0});
    EXPECT_THROW(abc::g_hat(acc, 0.0, KernelSpec(KernelKind::gaussian, 1), t), abc::InvalidArgument);
}

TEST(GHat, NaiveNormalisationOnPaddedGrid) {
    abc::Substream rng(3);
    std::vector<double> th(40);
    for (double& x : th) x = rng.normal();
    const auto acc = accepted_from(th);
    const double h = 0.3;
    const KernelSpec k(KernelKind::naive, 1);
    const auto grid = abc::padded_grid(acc, h, 2000);
    const auto est = abc::estimate_density(acc, h, k, grid);
    EXPECT_NEAR(abc::trapezoid_integral(est.grid, est.values), 1.0, 1e-3);
}

TEST(GHat, GridMatchesPointwise) {
    abc::Substream rng(4);
    std::vector<double> th(60);
    for (double& x : th) x = rng.normal();
    const auto acc = accepted_from(th, 2);
    for (KernelKind kind : {KernelKind::naive, KernelKind::gaussian}) {
        const KernelSpec k(kind, 2);
        const auto grid = abc::padded_grid(acc, 1.0, 40);
        const auto est = abc::estimate_density(acc, 0.4, k, grid);
        std::vector<double> pt(2);
        for (std::size_t g = 0; g < grid.size(); g += 37) {
            grid.point(g, pt);
            EXPECT_NEAR(est.values[g], abc::g_hat(acc, 0.4, k, pt), 1e-14);
        }
    }
}

TEST(Rosenblatt, SingleRow) {
    const abc::ReferenceTable t("hand", 0, 1, 1, {0.3}, {0.05});
    const std::vector<double> s0{0.0}, th{0.3};
    const auto v = abc::g_rosenblatt(t, s0, th, 0.2, 0.1, KernelSpec(KernelKind::naive, 1), KernelSpec(KernelKind::naive, 1));
    ASSERT_TRUE(v.has_value());
    EXPECT_DOUBLE_EQ(*v, 2.5);
}

TEST(Rosenblatt, EmptyWindowIsUndefined) {
    const abc::ReferenceTable t("hand", 0, 1, 1, {0.3, 0.4}, {0.5, 0.6});
    const std::vector<double> s0{0.0}, th{0.3};
    const auto v = abc::g_rosenblatt(t, s0, th, 0.2, 0.1, KernelSpec(KernelKind::naive, 1), KernelSpec(KernelKind::naive, 1));
    EXPECT_FALSE(v.has_value());
}

TEST(Rosenblatt, WideWindowIsPlainKde) {
    auto model = abc::make_model("GaussianConjugate1D");
    const auto t = abc::generate_table(*model, 50, 2);
    const std::vector<double> s0{0.0}, th{0.2};
    const KernelSpec k(KernelKind::gaussian, 1);
    const auto v = abc::g_rosenblatt(t, s0, th, 0.5, 1e6, k, KernelSpec(KernelKind::naive, 1));
    double kde = 0;
    for (double x : t.thetas()) kde += std::exp(-0.5 * std::pow((0.2 - x) / 0.5, 2)) / std::sqrt(2 * std::numbers::pi) / 0.5;
    kde /= 50;
    ASSERT_TRUE(v.has_value());
    EXPECT_NEAR(*v, kde, 1e-12);
}

TEST(SmoothedNn, NaiveWeightsReduceToGHat) {
    auto model = abc::make_model("GaussianConjugate1D");
    const auto t = abc::generate_table(*model, 2000, 5);
    const std::vector<double> s0{1.0};
    const KernelSpec k(KernelKind::gaussian, 1);
    const auto acc = abc::abc_knn(t, s0, 40);
    for (double x : {-0.5, 0.4, 1.3}) {
        const std::vector<double> th{x};
        const auto v = abc::g_smoothed_nn(t, s0, th, 0.3, 40, k, KernelSpec(KernelKind::naive, 1));
        ASSERT_TRUE(v.has_value());
        EXPECT_NEAR(*v, abc::g_hat(acc, 0.3, k, th), 1e-12);
    }
}

TEST(SmoothedNn, GaussianWeightPrefersNearRow) {
    const abc::ReferenceTable t("hand", 0, 1, 1, {0.0, 1.0, 2.0}, {0.1, 0.0001, 5.0});
    const std::vector<double> s0{0.0};
    const KernelSpec k(KernelKind::naive, 1);
    const KernelSpec l(KernelKind::gaussian, 1);
    const std::vector<double> near{1.0}, far{0.0};
    const auto a = abc::g_smoothed_nn(t, s0, near, 0.2, 2, k, l);
    const auto b = abc::g_smoothed_nn(t, s0, far, 0.2, 2, k, l);
    ASSERT_TRUE(a && b);
    EXPECT_GT(*a, *b);
}

TEST(Functional, Basics) {
    const auto acc = accepted_from({1.0, 2.0, 3.0});
    EXPECT_DOUBLE_EQ(abc::posterior_functional(acc, [](std::span<const double> t) { return t[0]; }), 2.0);
    EXPECT_DOUBLE_EQ(abc::posterior_functional(acc, [](std::span<const double>) { return 4.25; }), 4.25);
}

TEST(Grid, DefaultGridShape) {
    const auto acc1 = accepted_from({0.0, 1.0});
    const auto g1 = abc::default_grid(acc1, 0.1);
    EXPECT_EQ(g1.points, (std::vector<std::size_t>{abc::kDefaultGridPoints1D}));
    EXPECT_NEAR(g1.lower[0], -0.4, 1e-12);
    EXPECT_NEAR(g1.upper[0], 1.4, 1e-12);
    const auto acc2 = accepted_from({0.0, 1.0, 2.0, 3.0}, 2);
    const auto g2 = abc::default_grid(acc2, 0.1);
    EXPECT_LE(g2.size(), abc::kMaxDefaultGridPoints);
}

TEST(DensityIo, CsvAndSidecar) {
    const auto acc = accepted_from({0.0, 1.0});
    const KernelSpec k(KernelKind::gaussian, 1);
    const auto est = abc::estimate_density(acc, 0.5, k, abc::padded_grid(acc, 1.0, 5), 17);
    std::stringstream ss;
    abc::write_density_csv(ss, est);
    std::string line;
    std::getline(ss, line);
    EXPECT_EQ(line, "theta_0,g_hat\r");
    const auto side = abc::density_sidecar(est);
    EXPECT_EQ(side["N"], 20);
    EXPECT_EQ(side["k"], 2);
    EXPECT_EQ(side["kernel"], "gaussian");
    EXPECT_EQ(side["seed"], 17);
    EXPECT_DOUBLE_EQ(side["h"].get<double>(), 0.5);
}

}  // namespace
