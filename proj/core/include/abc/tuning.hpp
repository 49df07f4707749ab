#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

#include "abc/abc_core.hpp"
#include "abc/kernel.hpp"
#include "abc/model_zoo.hpp"

namespace abc {

// Rate regimes by summary dimension m.
enum class Regime { m_le_3, m_eq_4, m_gt_4 };

std::string_view to_string(Regime regime) noexcept;
Regime regime_for(std::size_t m);

struct Rational {
    long num = 0;
    long den = 1;
    double value() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }
};

// k_N = c_k N^{k_exponent}, h_N = c_h N^{h_exponent}.
//   m <= 4: k ∝ N^{(p+4)/(p+8)},   h ∝ N^{-1/(p+8)}
//   m > 4:  k ∝ N^{(p+4)/(m+p+4)}, h ∝ N^{-1/(m+p+4)}
struct Schedule {
    Regime regime = Regime::m_le_3;
    Rational k_exponent;
    Rational h_exponent;
    double c_k = 1.0;
    double c_h = 1.0;
};

Schedule make_schedule(std::size_t m, std::size_t p, double c_k = 1.0, double c_h = 1.0);

struct ScheduleValue {
    std::size_t k = 0;
    double h = 0.0;
    Schedule schedule;
};

// k = clamp(round(c_k N^{k_exponent}), 1, N-1), h = c_h N^{h_exponent}.
ScheduleValue schedule(std::size_t m, std::size_t p, std::size_t n, double c_k = 1.0,
                       double c_h = 1.0);

// Rule-of-thumb accepted fraction N^{-m/(m+p+4)}; only defined for m > 4.
std::optional<double> acceptance_fraction(std::size_t m, std::size_t p, std::size_t n);

// Mean over coordinates of the sample standard deviation of accepted thetas.
double accepted_theta_scale(const AcceptedSet& accepted);

// Normal-reference heuristic: h = sd(accepted thetas) N^{h_exponent}.
double auto_bandwidth(const AcceptedSet& accepted, std::size_t m, std::size_t n);

struct Xi0Options {
    std::size_t aux_sample_size = 1'000'000;
    std::size_t delta_grid = 64;
    // Smallest ball on the grid holds at least this many draws; 0 selects
    // max(50, aux_sample_size / 100).
    std::size_t min_ball_count = 0;
};

struct Xi0Estimate {
    double xi0 = 0.0;
    double argmin_delta = 0.0;
    double delta_min = 0.0;
    std::size_t ball_count_at_l = 0;
};

// Plug-in for xi0 = inf_{0 < delta <= L} delta^{-m} ∫_{B(s0, delta)} f̄:
// the minimum over a log-spaced delta grid of (draws in the ball)/(n delta^m).
// The grid minimum overestimates the continuum infimum when it falls between
// grid points.
Xi0Estimate estimate_xi0(const Model& model, std::span<const double> s0, double l_diam,
                         std::uint64_t seed, const Xi0Options& options = {});

// Distance-moment quantities. D_m is undefined (NaN) at m = 2 and Delta_m at
// m = 4; their logarithmic counterparts are D_log and Delta_log.
struct DistanceTerms {
    double D_m = 0.0;
    double Delta_m = 0.0;
    double D_log = 0.0;
    double Delta_log = 0.0;
};

DistanceTerms distance_terms(std::size_t m, std::size_t k, std::size_t n, double xi0, double l_diam);

// True when (k+1)/(N+1) <= xi0 L^m.
bool distance_bound_applies(std::size_t m, std::size_t k, std::size_t n, double xi0, double l_diam);

// Upper bound on E[d_(k+1)^order] for order 2 or 4; nullopt when the
// hypothesis (k+1)/(N+1) <= xi0 L^m fails.
std::optional<double> distance_moment_bound(std::size_t m, std::size_t k, std::size_t n, double xi0,
                                            double l_diam, int order);

struct PhiTerms {
    double phi1 = 0.0;
    double phi2 = 0.0;
    double phi3 = 0.0;
};

// Pointwise bias coefficients at (theta0, s0) from analytic derivatives.
PhiTerms phi_terms(const AnalyticJoint& joint, std::span<const double> theta0,
                   std::span<const double> s0, const KernelSpec& kernel);

// phi2 from central second differences of f in each s_j.
double phi2_finite_difference(const AnalyticJoint& joint, std::span<const double> theta0,
                              std::span<const double> s0, double step = 1e-4);

struct TheoreticalQuantities {
    std::size_t p = 0;
    std::size_t m = 0;
    double xi0 = 0.0;
    double L_diam = 0.0;
    double Phi1 = 0.0;
    double Phi2 = 0.0;
    double Phi3 = 0.0;
    double kernel_sq_integral = 0.0;
    double marginal_at_s0 = 0.0;

    DistanceTerms distances(std::size_t k, std::size_t n) const {
        return distance_terms(m, k, n, xi0, L_diam);
    }
};

// Phi_1..Phi_3 by adaptive trapezoid quadrature over theta0 (p = 1 only).
TheoreticalQuantities theorem4_quantities(const Model& model, std::span<const double> s0,
                                          const KernelSpec& kernel, double xi0, double l_diam);

// Leading-order MISE
//   Phi1 h^4 + Phi2 Delta + Phi3 h^2 D + ∫K² / (k h^p)
// with (Delta, D) = (Delta_2, D_log) for m = 2, (Delta_log, D_4) for m = 4 and
// (Delta_m, D_m) otherwise.
double mise_prediction(const TheoreticalQuantities& tq, std::size_t m, std::size_t p, std::size_t n,
                       std::size_t k, double h);

}  // namespace abc
