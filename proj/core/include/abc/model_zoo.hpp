#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "abc/rng.hpp"

namespace abc {

using Vector = std::vector<double>;
using ModelParams = std::map<std::string, double, std::less<>>;

// Closed-form posterior g(theta | s0) for models where it exists.
class PosteriorOracle {
public:
    virtual ~PosteriorOracle() = default;
    virtual double pdf(std::span<const double> theta0, std::span<const double> s0) const = 0;
    virtual Vector mean(std::span<const double> s0) const = 0;
    // Diagonal of the posterior covariance.
    virtual Vector variance(std::span<const double> s0) const = 0;
    // Evidence f̄(s0) under the model as simulated (truncation included).
    virtual double evidence(std::span<const double> s0) const = 0;
};

// Smooth closed forms of the joint density f(theta, s), its marginal f̄(s) and
// the second derivatives the MISE expansion needs. These describe the
// untruncated Gaussian family, not the truncated simulator.
class AnalyticJoint {
public:
    virtual ~AnalyticJoint() = default;
    virtual double joint(std::span<const double> theta, std::span<const double> s) const = 0;
    virtual double marginal(std::span<const double> s) const = 0;
    virtual double d2_joint_dtheta(std::span<const double> theta, std::span<const double> s,
                                   std::size_t i1, std::size_t i2) const = 0;
    virtual double d2_joint_ds(std::span<const double> theta, std::span<const double> s,
                               std::size_t j) const = 0;
    virtual double d2_marginal_ds(std::span<const double> s, std::size_t j) const = 0;
    // Centre and scale of theta mass at s0; quadrature spans centre ± 10·scale.
    virtual std::pair<double, double> theta_extent(std::span<const double> s0) const = 0;
};

// A generative model: prior pi(theta) on R^p and summary law f(s | theta) on
// R^m. Instances are immutable; randomness enters only through Substream.
class Model {
public:
    Model(std::string id, std::size_t p, std::size_t m);
    virtual ~Model() = default;

    const std::string& id() const noexcept { return id_; }
    std::size_t param_dim() const noexcept { return p_; }
    std::size_t summary_dim() const noexcept { return m_; }

    virtual void draw_prior(Substream& rng, std::span<double> theta) const = 0;
    virtual void draw_summary(std::span<const double> theta, Substream& rng,
                              std::span<double> s) const = 0;

    // Diameter L of the support of f̄, when compact.
    virtual std::optional<double> support_diameter() const { return std::nullopt; }
    virtual const PosteriorOracle* oracle() const noexcept { return nullptr; }
    virtual const AnalyticJoint* analytic_joint() const noexcept { return nullptr; }

    virtual std::optional<double> prior_pdf(std::span<const double> theta) const;
    virtual std::optional<double> likelihood_pdf(std::span<const double> s,
                                                 std::span<const double> theta) const;

    // Raw-data models simulate y then reduce it; all others return 0.
    virtual std::size_t raw_dim() const noexcept { return 0; }
    virtual Vector summarize(std::span<const double> y) const;

    // Echo of the parameters the model was built with (defaults filled in).
    const ModelParams& params() const noexcept { return params_; }

protected:
    ModelParams params_;

private:
    std::string id_;
    std::size_t p_;
    std::size_t m_;
};

using ModelPtr = std::shared_ptr<const Model>;

// Standardised Gaussian draws are truncated to ±kTruncation and renormalised
// so every built-in summary law has compact support.
inline constexpr double kTruncation = 5.0;

Vector sample_prior(const Model& model, Substream& rng);
Vector simulate_summary(const Model& model, std::span<const double> theta, Substream& rng);
double oracle_posterior_pdf(const Model& model, std::span<const double> theta0,
                            std::span<const double> s0);

// Built-ins:
//   GaussianConjugate1D  theta ~ N(prior_mean, prior_var), S|theta ~ N(theta, noise_var)
//   UniformBox1D         theta ~ U[0,1], S|theta has density 1 + c(2theta-1)(2s-1) on [0,1]
//   Gauss5D              p=1, S = (theta+e1, e2, ..., e_m), m defaults to 5
//   UniformBall          theta ~ U[0,1]^d, S = theta + U(B_d(0, radius))
//   GaussianMeanDemo     raw data y_1..y_n ~ N(theta, noise_var), summary = mean(y)
// Unknown ids or parameter names raise ConfigurationError.
ModelPtr make_model(std::string_view id, const ModelParams& params = {});
std::vector<std::string> builtin_model_ids();

}  // namespace abc
