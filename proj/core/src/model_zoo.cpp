#include "abc/model_zoo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "abc/errors.hpp"
#include "abc/kernel.hpp"

namespace abc {

Model::Model(std::string id, std::size_t p, std::size_t m) : id_(std::move(id)), p_(p), m_(m) {
    if (p_ == 0 || m_ == 0) throw InvalidArgument("model dimensions must be positive");
}

std::optional<double> Model::prior_pdf(std::span<const double>) const { return std::nullopt; }

std::optional<double> Model::likelihood_pdf(std::span<const double>, std::span<const double>) const {
    return std::nullopt;
}

Vector Model::summarize(std::span<const double>) const {
    throw UnsupportedModel("model '" + id_ + "' does not simulate raw data");
}

Vector sample_prior(const Model& model, Substream& rng) {
    Vector theta(model.param_dim());
    model.draw_prior(rng, theta);
    return theta;
}

Vector simulate_summary(const Model& model, std::span<const double> theta, Substream& rng) {
    require_dim(theta.size(), model.param_dim(), "simulate_summary theta");
    Vector s(model.summary_dim());
    model.draw_summary(theta, rng, s);
    return s;
}

double oracle_posterior_pdf(const Model& model, std::span<const double> theta0,
                            std::span<const double> s0) {
    const PosteriorOracle* oracle = model.oracle();
    if (oracle == nullptr) {
        throw UnsupportedModel("model '" + model.id() + "' has no analytic posterior");
    }
    require_dim(theta0.size(), model.param_dim(), "oracle theta0");
    require_dim(s0.size(), model.summary_dim(), "oracle s0");
    return oracle->pdf(theta0, s0);
}

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014326779399460599343819;

double phi(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

// P(alpha <= Z <= beta) for standard normal Z, without cancellation in the tails.
double normal_mass(double alpha, double beta) {
    if (beta <= alpha) return 0.0;
    const double r = std::numbers::sqrt2;
    if (alpha > 0.0) return 0.5 * (std::erfc(alpha / r) - std::erfc(beta / r));
    if (beta < 0.0) return 0.5 * (std::erfc(-beta / r) - std::erfc(-alpha / r));
    return 1.0 - 0.5 * std::erfc(-alpha / r) - 0.5 * std::erfc(beta / r);
}

// Mass of N(0,1) on [-kTruncation, kTruncation].
const double kTruncMass = std::erf(kTruncation / std::numbers::sqrt2);

double truncated_std_pdf(double x, double sd) {
    const double z = x / sd;
    return std::abs(z) <= kTruncation ? phi(z) / (sd * kTruncMass) : 0.0;
}

class ParamReader {
public:
    ParamReader(std::string_view model, const ModelParams& given) : model_(model), given_(given) {}

    double get(const std::string& name, double fallback) {
        known_.insert(name);
        auto it = given_.find(name);
        const double value = it == given_.end() ? fallback : it->second;
        out_[name] = value;
        return value;
    }
    double positive(const std::string& name, double fallback) {
        const double v = get(name, fallback);
        if (!(v > 0.0) || !std::isfinite(v)) fail(name, "must be positive and finite");
        return v;
    }
    std::size_t count(const std::string& name, double fallback, std::size_t min_value) {
        const double v = get(name, fallback);
        if (!(v >= static_cast<double>(min_value)) || v != std::floor(v) || v > 1e6) {
            fail(name, "must be an integer >= " + std::to_string(min_value));
        }
        return static_cast<std::size_t>(v);
    }
    [[noreturn]] void fail(const std::string& name, const std::string& why) const {
        throw ConfigurationError("model '" + model_ + "' parameter '" + name + "' " + why);
    }
    ModelParams finish() const {
        for (const auto& [name, value] : given_) {
            if (!known_.contains(name)) {
                throw ConfigurationError("model '" + model_ + "' has no parameter '" + name + "'");
            }
        }
        return out_;
    }

private:
    std::string model_;
    const ModelParams& given_;
    std::set<std::string, std::less<>> known_;
    ModelParams out_;
};

// Gaussian prior and Gaussian noise, each standardised and truncated at
// ±kTruncation. The truncated posterior is a Gaussian restricted to an
// interval, so every quantity below is exact.
struct Conjugate {
    double mu0 = 0.0;
    double tau = 1.0;
    double sigma = 1.0;

    struct Post {
        double mean, sd, lo, hi, mass;
    };

    Post posterior(double s) const {
        const double prec = 1.0 / (tau * tau) + 1.0 / (sigma * sigma);
        const double var = 1.0 / prec;
        const double mean = var * (mu0 / (tau * tau) + s / (sigma * sigma));
        const double sd = std::sqrt(var);
        const double lo = std::max(mu0 - kTruncation * tau, s - kTruncation * sigma);
        const double hi = std::min(mu0 + kTruncation * tau, s + kTruncation * sigma);
        return {mean, sd, lo, hi, normal_mass((lo - mean) / sd, (hi - mean) / sd)};
    }

    double draw_theta(Substream& rng) const { return mu0 + tau * rng.truncated_normal(kTruncation); }
    double draw_s(double theta, Substream& rng) const {
        return theta + sigma * rng.truncated_normal(kTruncation);
    }

    double prior_pdf(double theta) const { return truncated_std_pdf(theta - mu0, tau); }
    double likelihood(double s, double theta) const { return truncated_std_pdf(s - theta, sigma); }

    double post_pdf(double theta, double s) const {
        const Post q = posterior(s);
        if (q.mass <= 0.0 || theta < q.lo || theta > q.hi) return 0.0;
        return phi((theta - q.mean) / q.sd) / (q.sd * q.mass);
    }

    std::pair<double, double> post_moments(double s) const {
        const Post q = posterior(s);
        if (!(q.mass > 0.0)) throw InvalidArgument("s0 lies outside the support of the model");
        const double a = (q.lo - q.mean) / q.sd;
        const double b = (q.hi - q.mean) / q.sd;
        const double pa = phi(a);
        const double pb = phi(b);
        const double ratio = (pa - pb) / q.mass;
        const double tail = (a * pa - b * pb) / q.mass;
        const double mean = q.mean + q.sd * ratio;
        const double var = q.sd * q.sd * (1.0 + tail - ratio * ratio);
        return {mean, var};
    }

    double evidence(double s) const {
        const double w = tau * tau + sigma * sigma;
        const Post q = posterior(s);
        return phi((s - mu0) / std::sqrt(w)) / std::sqrt(w) * q.mass / (kTruncMass * kTruncMass);
    }

    // Untruncated closed forms.
    double joint(double theta, double s) const {
        return phi((theta - mu0) / tau) / tau * phi((s - theta) / sigma) / sigma;
    }
    double marginal(double s) const {
        const double w = tau * tau + sigma * sigma;
        return phi((s - mu0) / std::sqrt(w)) / std::sqrt(w);
    }
    double d2_joint_dtheta(double theta, double s) const {
        const double q = -(theta - mu0) / (tau * tau) + (s - theta) / (sigma * sigma);
        const double prec = 1.0 / (tau * tau) + 1.0 / (sigma * sigma);
        return joint(theta, s) * (q * q - prec);
    }
    double d2_joint_ds(double theta, double s) const {
        const double r = (s - theta) / (sigma * sigma);
        return joint(theta, s) * (r * r - 1.0 / (sigma * sigma));
    }
    double d2_marginal_ds(double s) const {
        const double w = tau * tau + sigma * sigma;
        const double r = (s - mu0) / w;
        return marginal(s) * (r * r - 1.0 / w);
    }

    double support_width() const { return 2.0 * kTruncation * (tau + sigma); }
};

Conjugate read_conjugate(ParamReader& reader) {
    Conjugate c;
    c.mu0 = reader.get("prior_mean", 0.0);
    c.tau = std::sqrt(reader.positive("prior_var", 1.0));
    c.sigma = std::sqrt(reader.positive("noise_var", 1.0));
    return c;
}

class GaussianConjugate1D final : public Model, public PosteriorOracle, public AnalyticJoint {
public:
    explicit GaussianConjugate1D(const ModelParams& given) : Model("GaussianConjugate1D", 1, 1) {
        ParamReader reader(id(), given);
        c_ = read_conjugate(reader);
        params_ = reader.finish();
    }

    void draw_prior(Substream& rng, std::span<double> theta) const override {
        theta[0] = c_.draw_theta(rng);
    }
    void draw_summary(std::span<const double> theta, Substream& rng,
                      std::span<double> s) const override {
        s[0] = c_.draw_s(theta[0], rng);
    }
    std::optional<double> support_diameter() const override { return c_.support_width(); }
    const PosteriorOracle* oracle() const noexcept override { return this; }
    const AnalyticJoint* analytic_joint() const noexcept override { return this; }
    std::optional<double> prior_pdf(std::span<const double> theta) const override {
        return c_.prior_pdf(theta[0]);
    }
    std::optional<double> likelihood_pdf(std::span<const double> s,
                                         std::span<const double> theta) const override {
        return c_.likelihood(s[0], theta[0]);
    }

    double pdf(std::span<const double> theta0, std::span<const double> s0) const override {
        return c_.post_pdf(theta0[0], s0[0]);
    }
    Vector mean(std::span<const double> s0) const override { return {c_.post_moments(s0[0]).first}; }
    Vector variance(std::span<const double> s0) const override {
        return {c_.post_moments(s0[0]).second};
    }
    double evidence(std::span<const double> s0) const override { return c_.evidence(s0[0]); }

    double joint(std::span<const double> theta, std::span<const double> s) const override {
        return c_.joint(theta[0], s[0]);
    }
    double marginal(std::span<const double> s) const override { return c_.marginal(s[0]); }
    double d2_joint_dtheta(std::span<const double> theta, std::span<const double> s, std::size_t,
                           std::size_t) const override {
        return c_.d2_joint_dtheta(theta[0], s[0]);
    }
    double d2_joint_ds(std::span<const double> theta, std::span<const double> s,
                       std::size_t) const override {
        return c_.d2_joint_ds(theta[0], s[0]);
    }
    double d2_marginal_ds(std::span<const double> s, std::size_t) const override {
        return c_.d2_marginal_ds(s[0]);
    }
    std::pair<double, double> theta_extent(std::span<const double> s0) const override {
        const auto q = c_.posterior(s0[0]);
        return {q.mean, q.sd};
    }

private:
    Conjugate c_;
};

// First summary coordinate carries theta; the remaining m-1 are pure noise.
class GaussAncillary final : public Model, public PosteriorOracle, public AnalyticJoint {
public:
    static std::size_t read_m(const ModelParams& given) {
        auto it = given.find("m");
        if (it == given.end()) return 5;
        const double v = it->second;
        if (!(v >= 2.0) || v != std::floor(v) || v > 64.0) {
            throw ConfigurationError("model 'Gauss5D' parameter 'm' must be an integer in [2, 64]");
        }
        return static_cast<std::size_t>(v);
    }

    explicit GaussAncillary(const ModelParams& given) : Model("Gauss5D", 1, read_m(given)) {
        ParamReader reader(id(), given);
        c_ = read_conjugate(reader);
        reader.count("m", 5.0, 2);
        params_ = reader.finish();
    }

    void draw_prior(Substream& rng, std::span<double> theta) const override {
        theta[0] = c_.draw_theta(rng);
    }
    void draw_summary(std::span<const double> theta, Substream& rng,
                      std::span<double> s) const override {
        s[0] = c_.draw_s(theta[0], rng);
        for (std::size_t j = 1; j < s.size(); ++j) s[j] = c_.sigma * rng.truncated_normal(kTruncation);
    }
    std::optional<double> support_diameter() const override {
        const double w0 = c_.support_width();
        const double wj = 2.0 * kTruncation * c_.sigma;
        return std::sqrt(w0 * w0 + static_cast<double>(summary_dim() - 1) * wj * wj);
    }
    const PosteriorOracle* oracle() const noexcept override { return this; }
    const AnalyticJoint* analytic_joint() const noexcept override { return this; }
    std::optional<double> prior_pdf(std::span<const double> theta) const override {
        return c_.prior_pdf(theta[0]);
    }
    std::optional<double> likelihood_pdf(std::span<const double> s,
                                         std::span<const double> theta) const override {
        return c_.likelihood(s[0], theta[0]) * ancillary_pdf(s);
    }

    double pdf(std::span<const double> theta0, std::span<const double> s0) const override {
        if (ancillary_pdf(s0) <= 0.0) return 0.0;
        return c_.post_pdf(theta0[0], s0[0]);
    }
    Vector mean(std::span<const double> s0) const override { return {c_.post_moments(s0[0]).first}; }
    Vector variance(std::span<const double> s0) const override {
        return {c_.post_moments(s0[0]).second};
    }
    double evidence(std::span<const double> s0) const override {
        return c_.evidence(s0[0]) * ancillary_pdf(s0);
    }

    double joint(std::span<const double> theta, std::span<const double> s) const override {
        return c_.joint(theta[0], s[0]) * ancillary_untruncated(s);
    }
    double marginal(std::span<const double> s) const override {
        return c_.marginal(s[0]) * ancillary_untruncated(s);
    }
    double d2_joint_dtheta(std::span<const double> theta, std::span<const double> s, std::size_t,
                           std::size_t) const override {
        return c_.d2_joint_dtheta(theta[0], s[0]) * ancillary_untruncated(s);
    }
    double d2_joint_ds(std::span<const double> theta, std::span<const double> s,
                       std::size_t j) const override {
        if (j == 0) return c_.d2_joint_ds(theta[0], s[0]) * ancillary_untruncated(s);
        return joint(theta, s) * ancillary_curvature(s[j]);
    }
    double d2_marginal_ds(std::span<const double> s, std::size_t j) const override {
        if (j == 0) return c_.d2_marginal_ds(s[0]) * ancillary_untruncated(s);
        return marginal(s) * ancillary_curvature(s[j]);
    }
    std::pair<double, double> theta_extent(std::span<const double> s0) const override {
        const auto q = c_.posterior(s0[0]);
        return {q.mean, q.sd};
    }

private:
    double ancillary_pdf(std::span<const double> s) const {
        double out = 1.0;
        for (std::size_t j = 1; j < s.size(); ++j) out *= truncated_std_pdf(s[j], c_.sigma);
        return out;
    }
    double ancillary_untruncated(std::span<const double> s) const {
        double out = 1.0;
        for (std::size_t j = 1; j < s.size(); ++j) out *= phi(s[j] / c_.sigma) / c_.sigma;
        return out;
    }
    double ancillary_curvature(double x) const {
        const double v = c_.sigma * c_.sigma;
        return x * x / (v * v) - 1.0 / v;
    }

    Conjugate c_;
};

class UniformBox1D final : public Model, public PosteriorOracle {
public:
    explicit UniformBox1D(const ModelParams& given) : Model("UniformBox1D", 1, 1) {
        ParamReader reader(id(), given);
        coupling_ = reader.get("coupling", 0.5);
        if (!(std::abs(coupling_) <= 1.0)) reader.fail("coupling", "must lie in [-1, 1]");
        params_ = reader.finish();
    }

    void draw_prior(Substream& rng, std::span<double> theta) const override {
        theta[0] = rng.uniform();
    }
    // Inverse CDF of the linear density 1 + a(2s-1) on [0,1], a = c(2theta-1).
    void draw_summary(std::span<const double> theta, Substream& rng,
                      std::span<double> s) const override {
        const double a = coupling_ * (2.0 * theta[0] - 1.0);
        const double u = rng.uniform();
        const double denom = (1.0 - a) + std::sqrt((1.0 - a) * (1.0 - a) + 4.0 * a * u);
        s[0] = denom > 0.0 ? std::min(1.0, 2.0 * u / denom) : 0.0;
    }
    std::optional<double> support_diameter() const override { return 1.0; }
    const PosteriorOracle* oracle() const noexcept override { return this; }
    std::optional<double> prior_pdf(std::span<const double> theta) const override {
        return inside(theta[0]) ? 1.0 : 0.0;
    }
    std::optional<double> likelihood_pdf(std::span<const double> s,
                                         std::span<const double> theta) const override {
        if (!inside(s[0]) || !inside(theta[0])) return 0.0;
        return density(theta[0], s[0]);
    }

    double pdf(std::span<const double> theta0, std::span<const double> s0) const override {
        if (!inside(theta0[0]) || !inside(s0[0])) return 0.0;
        return density(theta0[0], s0[0]);
    }
    Vector mean(std::span<const double> s0) const override {
        return {0.5 + coupling_ * (2.0 * s0[0] - 1.0) / 6.0};
    }
    Vector variance(std::span<const double> s0) const override {
        const double m1 = mean(s0)[0];
        const double m2 = 1.0 / 3.0 + coupling_ * (2.0 * s0[0] - 1.0) / 6.0;
        return {m2 - m1 * m1};
    }
    double evidence(std::span<const double> s0) const override { return inside(s0[0]) ? 1.0 : 0.0; }

private:
    static bool inside(double x) { return x >= 0.0 && x <= 1.0; }
    double density(double theta, double s) const {
        return 1.0 + coupling_ * (2.0 * theta - 1.0) * (2.0 * s - 1.0);
    }

    double coupling_ = 0.5;
};

class UniformBall final : public Model {
public:
    static std::size_t read_dim(const ModelParams& given) {
        auto it = given.find("dim");
        if (it == given.end()) return 2;
        const double v = it->second;
        if (!(v >= 1.0) || v != std::floor(v) || v > 64.0) {
            throw ConfigurationError("model 'UniformBall' parameter 'dim' must be an integer in [1, 64]");
        }
        return static_cast<std::size_t>(v);
    }

    explicit UniformBall(const ModelParams& given)
        : Model("UniformBall", read_dim(given), read_dim(given)) {
        ParamReader reader(id(), given);
        reader.count("dim", 2.0, 1);
        radius_ = reader.positive("radius", 0.1);
        params_ = reader.finish();
    }

    void draw_prior(Substream& rng, std::span<double> theta) const override {
        for (double& t : theta) t = rng.uniform();
    }
    void draw_summary(std::span<const double> theta, Substream& rng,
                      std::span<double> s) const override {
        double norm2 = 0.0;
        do {
            norm2 = 0.0;
            for (double& x : s) {
                x = rng.normal();
                norm2 += x * x;
            }
        } while (norm2 == 0.0);
        const double d = static_cast<double>(s.size());
        const double r = radius_ * std::pow(rng.uniform(), 1.0 / d) / std::sqrt(norm2);
        for (std::size_t j = 0; j < s.size(); ++j) s[j] = theta[j] + r * s[j];
    }
    std::optional<double> support_diameter() const override {
        return std::sqrt(static_cast<double>(param_dim())) * (1.0 + 2.0 * radius_);
    }
    std::optional<double> prior_pdf(std::span<const double> theta) const override {
        for (double t : theta) {
            if (t < 0.0 || t > 1.0) return 0.0;
        }
        return 1.0;
    }
    std::optional<double> likelihood_pdf(std::span<const double> s,
                                         std::span<const double> theta) const override {
        double d2 = 0.0;
        for (std::size_t j = 0; j < s.size(); ++j) d2 += (s[j] - theta[j]) * (s[j] - theta[j]);
        if (d2 > radius_ * radius_) return 0.0;
        return 1.0 / (unit_ball_volume(s.size()) * std::pow(radius_, static_cast<double>(s.size())));
    }

private:
    double radius_ = 0.1;
};

class GaussianMeanDemo final : public Model {
public:
    explicit GaussianMeanDemo(const ModelParams& given) : Model("GaussianMeanDemo", 1, 1) {
        ParamReader reader(id(), given);
        c_ = read_conjugate(reader);
        n_ = reader.count("n", 10.0, 1);
        params_ = reader.finish();
    }

    void draw_prior(Substream& rng, std::span<double> theta) const override {
        theta[0] = c_.draw_theta(rng);
    }
    void draw_summary(std::span<const double> theta, Substream& rng,
                      std::span<double> s) const override {
        double sum = 0.0;
        for (std::size_t i = 0; i < n_; ++i) sum += c_.draw_s(theta[0], rng);
        s[0] = sum / static_cast<double>(n_);
    }
    std::optional<double> support_diameter() const override { return c_.support_width(); }
    std::optional<double> prior_pdf(std::span<const double> theta) const override {
        return c_.prior_pdf(theta[0]);
    }
    std::size_t raw_dim() const noexcept override { return n_; }
    Vector summarize(std::span<const double> y) const override {
        if (y.empty()) throw InvalidArgument("GaussianMeanDemo: raw data y0 must be non-empty");
        double sum = 0.0;
        for (double v : y) sum += v;
        return {sum / static_cast<double>(y.size())};
    }

private:
    Conjugate c_;
    std::size_t n_ = 10;
};

}  // namespace

ModelPtr make_model(std::string_view id, const ModelParams& params) {
    if (id == "GaussianConjugate1D") return std::make_shared<GaussianConjugate1D>(params);
    if (id == "UniformBox1D") return std::make_shared<UniformBox1D>(params);
    if (id == "Gauss5D") return std::make_shared<GaussAncillary>(params);
    if (id == "UniformBall") return std::make_shared<UniformBall>(params);
    if (id == "GaussianMeanDemo") return std::make_shared<GaussianMeanDemo>(params);
    throw ConfigurationError("unknown model id '" + std::string(id) + "'");
}

std::vector<std::string> builtin_model_ids() {
    return {"GaussianConjugate1D", "UniformBox1D", "Gauss5D", "UniformBall", "GaussianMeanDemo"};
}

}  // namespace abc
