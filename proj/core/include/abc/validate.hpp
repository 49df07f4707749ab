#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "abc/abc_core.hpp"
#include "abc/cde.hpp"
#include "abc/kernel.hpp"
#include "abc/model_zoo.hpp"
#include "abc/tuning.hpp"

namespace abc {

// Replicate r of any experiment draws its table from derive_seed(seed, r, replicate).
std::uint64_t replicate_seed(std::uint64_t seed, std::size_t replicate) noexcept;

// Either a fixed h or the normal-reference rule h = c sd(accepted) N^{h_exponent}.
struct Bandwidth {
    bool automatic = true;
    double value = 1.0;

    static Bandwidth fixed(double h) { return {false, h}; }
    static Bandwidth from_accepted(double multiplier = 1.0) { return {true, multiplier}; }

    double resolve(const AcceptedSet& accepted, std::size_t m) const;
};

// ∫ (estimate - g(.|s0))² over the estimate's grid (trapezoid).
double integrated_squared_error(const DensityEstimate& estimate,
                                const std::function<double(std::span<const double>)>& truth);

struct MiseReport {
    std::size_t n = 0;
    std::size_t k = 0;
    double h = 0.0;  // mean bandwidth across replicates
    std::size_t replicates = 0;
    double mise_mean = 0.0;
    double mise_stderr = 0.0;
    std::size_t grid_points = 0;
    std::vector<double> per_replicate;
    std::vector<double> per_replicate_h;
};

// E ∫ (g_hat - g)² by Monte Carlo over R fresh reference tables, g_hat on its
// default grid.
MiseReport mise_estimate(const Model& model, std::span<const double> s0, std::size_t n,
                         std::size_t k, const Bandwidth& bandwidth, const KernelSpec& kernel,
                         std::size_t replicates, std::uint64_t seed);

struct ScheduleParams {
    double c_k = 1.0;
    // Bandwidth multiplier: c_h itself when fixed, else a factor on sd(accepted).
    Bandwidth bandwidth = Bandwidth::from_accepted(1.0);
};

struct RateReport {
    std::vector<std::size_t> ns;
    std::vector<std::size_t> ks;
    std::vector<double> hs;
    std::vector<double> log_n;
    std::vector<double> log_mise;
    double fitted_slope = 0.0;
    double slope_stderr = 0.0;
    double intercept = 0.0;
    double theoretical_slope = 0.0;
    // m = 4 carries an extra log N factor in the rate.
    bool log_factor = false;
    std::vector<MiseReport> reports;
};

double theoretical_mise_slope(std::size_t m, std::size_t p);

RateReport rate_experiment(const Model& model, std::span<const double> s0,
                           std::span<const std::size_t> ns, const ScheduleParams& params,
                           const KernelSpec& kernel, std::size_t replicates, std::uint64_t seed);

enum class LawReference { restricted, prior_predictive };

struct LawTestResult {
    double statistic = 0.0;
    double p_value = 1.0;
    double radius = 0.0;  // d_(k+1) of the ABC run, reused by the reference sampler
    std::size_t k = 0;
    std::size_t reference_draws = 0;
};

inline constexpr std::size_t kMinLawTestK = 20;

// Two-sample KS between the k accepted thetas and draws from the joint law
// restricted to B(s0, d_(k+1)). `prior_predictive` swaps in unrestricted
// prior draws as a negative control.
LawTestResult conditional_law_test(const Model& model, std::span<const double> s0, std::size_t n,
                                   std::size_t k, std::size_t reference_draws, std::uint64_t seed,
                                   LawReference reference = LawReference::restricted);

struct LawCalibration {
    std::size_t runs = 0;
    double level = 0.05;
    double rejection_fraction = 0.0;
    std::vector<LawTestResult> results;
};

LawCalibration law_test_calibration(const Model& model, std::span<const double> s0, std::size_t n,
                                    std::size_t k, std::size_t reference_draws, std::size_t runs,
                                    std::uint64_t seed, double level = 0.05,
                                    LawReference reference = LawReference::restricted);

struct BoundCheckRow {
    std::size_t n = 0;
    std::size_t k = 0;
    int order = 2;
    bool applies = false;  // hypothesis (k+1)/(N+1) <= xi0 L^m
    std::optional<double> empirical;
    std::optional<double> bound;
    bool holds = false;
};

// Empirical E[d_(k+1)^order] over replicate tables against the plug-in bound,
// for every (N, k) pair and order. Pairs outside the hypothesis are flagged
// and not simulated.
std::vector<BoundCheckRow> bound_check(const Model& model, std::span<const double> s0, std::size_t m,
                                       std::span<const std::pair<std::size_t, std::size_t>> pairs,
                                       double xi0, double l_diam, std::span<const int> orders,
                                       std::size_t replicates, std::uint64_t seed);

struct Functional {
    std::string name;
    ThetaFunctional phi;
    std::optional<double> oracle_value;
};

// identity / square act on theta_0; const is the constant 1.
Functional builtin_functional(const Model& model, std::span<const double> s0, const std::string& name);

struct MomentRow {
    std::string name;
    double estimate_mean = 0.0;
    double stderr_ = 0.0;
    std::optional<double> oracle_value;
    std::optional<double> z_score;
    std::vector<double> per_replicate;
};

std::vector<MomentRow> moment_consistency(const Model& model, std::span<const double> s0,
                                          std::size_t n, std::size_t k,
                                          std::span<const Functional> functionals,
                                          std::size_t replicates, std::uint64_t seed);

}  // namespace abc
