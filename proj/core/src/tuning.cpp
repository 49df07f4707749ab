#include "abc/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "abc/errors.hpp"
#include "abc/parallel.hpp"
#include "abc/quadrature.hpp"
#include "abc/stats.hpp"

namespace abc {

std::string_view to_string(Regime regime) noexcept {
    switch (regime) {
        case Regime::m_le_3: return "m_le_3";
        case Regime::m_eq_4: return "m_eq_4";
        case Regime::m_gt_4: return "m_gt_4";
    }
    return "unknown";
}

Regime regime_for(std::size_t m) {
    if (m == 0) throw InvalidArgument("summary dimension m must be >= 1");
    if (m <= 3) return Regime::m_le_3;
    return m == 4 ? Regime::m_eq_4 : Regime::m_gt_4;
}

Schedule make_schedule(std::size_t m, std::size_t p, double c_k, double c_h) {
    if (p == 0) throw InvalidArgument("parameter dimension p must be >= 1");
    if (!(c_k > 0.0) || !(c_h > 0.0)) throw InvalidArgument("schedule multipliers must be > 0");
    Schedule s;
    s.regime = regime_for(m);
    const long pl = static_cast<long>(p);
    const long ml = static_cast<long>(m);
    const long den = s.regime == Regime::m_gt_4 ? ml + pl + 4 : pl + 8;
    s.k_exponent = {pl + 4, den};
    s.h_exponent = {-1, den};
    s.c_k = c_k;
    s.c_h = c_h;
    return s;
}

ScheduleValue schedule(std::size_t m, std::size_t p, std::size_t n, double c_k, double c_h) {
    if (n < 2) throw InvalidArgument("schedule requires N >= 2");
    ScheduleValue v;
    v.schedule = make_schedule(m, p, c_k, c_h);
    const double nd = static_cast<double>(n);
    const double raw = std::round(c_k * std::pow(nd, v.schedule.k_exponent.value()));
    v.k = static_cast<std::size_t>(std::clamp(raw, 1.0, nd - 1.0));
    v.h = c_h * std::pow(nd, v.schedule.h_exponent.value());
    return v;
}

std::optional<double> acceptance_fraction(std::size_t m, std::size_t p, std::size_t n) {
    if (m <= 4) return std::nullopt;
    const double md = static_cast<double>(m);
    return std::pow(static_cast<double>(n), -md / (md + static_cast<double>(p) + 4.0));
}

double accepted_theta_scale(const AcceptedSet& accepted) {
    if (accepted.size() < 2) {
        throw InvalidArgument("accepted_theta_scale needs at least two accepted rows");
    }
    double total = 0.0;
    std::vector<double> column(accepted.size());
    for (std::size_t a = 0; a < accepted.p; ++a) {
        for (std::size_t j = 0; j < accepted.size(); ++j) column[j] = accepted.theta(j)[a];
        total += sample_sd(column);
    }
    return total / static_cast<double>(accepted.p);
}

double auto_bandwidth(const AcceptedSet& accepted, std::size_t m, std::size_t n) {
    const double scale = accepted_theta_scale(accepted);
    if (!(scale > 0.0)) {
        throw DegenerateScale("auto bandwidth: accepted thetas have zero spread");
    }
    return schedule(m, accepted.p, n, 1.0, scale).h;
}

Xi0Estimate estimate_xi0(const Model& model, std::span<const double> s0, double l_diam,
                         std::uint64_t seed, const Xi0Options& options) {
    require_dim(s0.size(), model.summary_dim(), "xi0 s0");
    if (!(l_diam > 0.0)) throw InvalidArgument("estimate_xi0: L must be > 0");
    if (options.delta_grid < 2) throw InvalidArgument("estimate_xi0: delta grid needs >= 2 points");
    const std::size_t n = options.aux_sample_size;
    const std::size_t min_count =
        options.min_ball_count > 0 ? options.min_ball_count : std::max<std::size_t>(50, n / 100);
    const std::size_t p = model.param_dim();
    const std::size_t m = model.summary_dim();

    std::vector<double> dist(n);
    parallel_for(n, [&](std::size_t i) {
        Substream rng = Substream::derive(seed, i, SeedDomain::auxiliary);
        std::vector<double> theta(p);
        std::vector<double> s(m);
        model.draw_prior(rng, theta);
        model.draw_summary(theta, rng, s);
        double d2 = 0.0;
        for (std::size_t j = 0; j < m; ++j) d2 += (s[j] - s0[j]) * (s[j] - s0[j]);
        dist[i] = std::sqrt(d2);
    });
    std::sort(dist.begin(), dist.end());

    Xi0Estimate est;
    est.ball_count_at_l =
        static_cast<std::size_t>(std::upper_bound(dist.begin(), dist.end(), l_diam) - dist.begin());
    if (est.ball_count_at_l < min_count) {
        throw InsufficientSample("estimate_xi0: only " + std::to_string(est.ball_count_at_l) +
                                 " auxiliary draws within L of s0 (need " +
                                 std::to_string(min_count) + ")");
    }
    est.delta_min = std::max(dist[min_count - 1], std::numeric_limits<double>::min());
    const double md = static_cast<double>(m);
    const double log_lo = std::log(std::min(est.delta_min, l_diam));
    const double log_hi = std::log(l_diam);
    est.xi0 = std::numeric_limits<double>::infinity();
    for (std::size_t g = 0; g < options.delta_grid; ++g) {
        const double t = static_cast<double>(g) / static_cast<double>(options.delta_grid - 1);
        const double delta = g + 1 == options.delta_grid ? l_diam : std::exp(log_lo + t * (log_hi - log_lo));
        const auto count = std::upper_bound(dist.begin(), dist.end(), delta) - dist.begin();
        const double ratio = static_cast<double>(count) / (static_cast<double>(n) * std::pow(delta, md));
        if (ratio < est.xi0) {
            est.xi0 = ratio;
            est.argmin_delta = delta;
        }
    }
    return est;
}

DistanceTerms distance_terms(std::size_t m, std::size_t k, std::size_t n, double xi0, double l_diam) {
    if (m == 0) throw InvalidArgument("summary dimension m must be >= 1");
    if (!(xi0 > 0.0) || !(l_diam > 0.0)) throw InvalidArgument("xi0 and L must be > 0");
    const double md = static_cast<double>(m);
    const double r = (static_cast<double>(k) + 1.0) / (static_cast<double>(n) + 1.0);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    DistanceTerms t;
    t.D_m = m == 2 ? nan
                   : md / (std::pow(xi0, 2.0 / md) * (md - 2.0)) * std::pow(r, 2.0 / md) -
                         std::pow(l_diam, 2.0 - md) / (xi0 * (md / 2.0 - 1.0)) * r;
    t.Delta_m = m == 4 ? nan
                       : md / (std::pow(xi0, 4.0 / md) * (md - 4.0)) * std::pow(r, 4.0 / md) -
                             std::pow(l_diam, 4.0 - md) / (xi0 * (md / 4.0 - 1.0)) * r;
    t.D_log = (1.0 / xi0) * (1.0 + std::log(xi0 * l_diam * l_diam / r)) * r;
    t.Delta_log = (1.0 / xi0) * (1.0 + std::log(xi0 * std::pow(l_diam, 4.0) / r)) * r;
    return t;
}

bool distance_bound_applies(std::size_t m, std::size_t k, std::size_t n, double xi0, double l_diam) {
    const double r = (static_cast<double>(k) + 1.0) / (static_cast<double>(n) + 1.0);
    return r <= xi0 * std::pow(l_diam, static_cast<double>(m));
}

std::optional<double> distance_moment_bound(std::size_t m, std::size_t k, std::size_t n, double xi0,
                                            double l_diam, int order) {
    if (order != 2 && order != 4) throw InvalidArgument("distance moment order must be 2 or 4");
    if (!distance_bound_applies(m, k, n, xi0, l_diam)) return std::nullopt;
    const DistanceTerms t = distance_terms(m, k, n, xi0, l_diam);
    if (order == 2) return m == 2 ? t.D_log : t.D_m;
    return m == 4 ? t.Delta_log : t.Delta_m;
}

PhiTerms phi_terms(const AnalyticJoint& joint, std::span<const double> theta0,
                   std::span<const double> s0, const KernelSpec& kernel) {
    require_dim(kernel.dim(), theta0.size(), "theta kernel");
    const double mu2 = kernel.second_moment();
    const double md = static_cast<double>(s0.size());
    PhiTerms t;
    // Off-diagonal kernel moments vanish for radial kernels.
    for (std::size_t i = 0; i < theta0.size(); ++i) {
        t.phi1 += joint.d2_joint_dtheta(theta0, s0, i, i) * mu2;
    }
    t.phi1 *= 0.5;
    for (std::size_t j = 0; j < s0.size(); ++j) {
        t.phi2 += joint.d2_joint_ds(theta0, s0, j);
        t.phi3 += joint.d2_marginal_ds(s0, j);
    }
    t.phi2 /= 2.0 * md + 4.0;
    t.phi3 /= 2.0 * md + 4.0;
    return t;
}

double phi2_finite_difference(const AnalyticJoint& joint, std::span<const double> theta0,
                              std::span<const double> s0, double step) {
    std::vector<double> s(s0.begin(), s0.end());
    const double centre = joint.joint(theta0, s0);
    double sum = 0.0;
    for (std::size_t j = 0; j < s.size(); ++j) {
        s[j] = s0[j] + step;
        const double up = joint.joint(theta0, s);
        s[j] = s0[j] - step;
        const double down = joint.joint(theta0, s);
        s[j] = s0[j];
        sum += (up - 2.0 * centre + down) / (step * step);
    }
    return sum / (2.0 * static_cast<double>(s.size()) + 4.0);
}

TheoreticalQuantities theorem4_quantities(const Model& model, std::span<const double> s0,
                                          const KernelSpec& kernel, double xi0, double l_diam) {
    const AnalyticJoint* joint = model.analytic_joint();
    if (joint == nullptr) {
        throw UnsupportedModel("model '" + model.id() + "' exposes no analytic joint density");
    }
    if (model.param_dim() != 1) {
        throw UnsupportedModel("theorem4_quantities integrates over theta in one dimension only");
    }
    require_dim(s0.size(), model.summary_dim(), "theorem4_quantities s0");
    require_dim(kernel.dim(), 1, "theta kernel");

    TheoreticalQuantities tq;
    tq.p = model.param_dim();
    tq.m = model.summary_dim();
    tq.xi0 = xi0;
    tq.L_diam = l_diam;
    tq.kernel_sq_integral = kernel.squared_integral();
    const double fbar = joint->marginal(s0);
    tq.marginal_at_s0 = fbar;
    if (!(fbar > 0.0)) throw InvalidArgument("theorem4_quantities requires f̄(s0) > 0");

    const auto [centre, scale] = joint->theta_extent(s0);
    const double a = centre - 10.0 * scale;
    const double b = centre + 10.0 * scale;
    auto integrand = [&](int which) {
        return [&, which](double t) {
            const double theta[1] = {t};
            const PhiTerms ph = phi_terms(*joint, theta, s0, kernel);
            const double mix = ph.phi2 * fbar - ph.phi3 * joint->joint(theta, s0);
            switch (which) {
                case 1: return ph.phi1 * ph.phi1;
                case 2: return mix * mix;
                default: return ph.phi1 * mix;
            }
        };
    };
    TrapezoidOptions opts;
    opts.rel_tol = 1e-6;
    tq.Phi1 = integrate_trapezoid(integrand(1), a, b, opts).value / (fbar * fbar);
    tq.Phi2 = integrate_trapezoid(integrand(2), a, b, opts).value / std::pow(fbar, 4.0);
    tq.Phi3 = 2.0 * integrate_trapezoid(integrand(3), a, b, opts).value / std::pow(fbar, 3.0);
    return tq;
}

double mise_prediction(const TheoreticalQuantities& tq, std::size_t m, std::size_t p, std::size_t n,
                       std::size_t k, double h) {
    if (k == 0 || !(h > 0.0)) throw InvalidArgument("mise_prediction requires k >= 1 and h > 0");
    const DistanceTerms t = distance_terms(m, k, n, tq.xi0, tq.L_diam);
    double delta_term = t.Delta_m;
    double d_term = t.D_m;
    if (m == 2) {
        d_term = t.D_log;
    } else if (m == 4) {
        delta_term = t.Delta_log;
    }
    const double h2 = h * h;
    return tq.Phi1 * h2 * h2 + tq.Phi2 * delta_term + tq.Phi3 * h2 * d_term +
           tq.kernel_sq_integral / (static_cast<double>(k) * std::pow(h, static_cast<double>(p)));
}

}  // namespace abc
