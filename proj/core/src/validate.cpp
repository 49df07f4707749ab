#include "abc/validate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "abc/errors.hpp"
#include "abc/ks_test.hpp"
#include "abc/parallel.hpp"
#include "abc/stats.hpp"

namespace abc {

std::uint64_t replicate_seed(std::uint64_t seed, std::size_t replicate) noexcept {
    return derive_seed(seed, replicate, SeedDomain::replicate);
}

double Bandwidth::resolve(const AcceptedSet& accepted, std::size_t m) const {
    if (!(value > 0.0)) throw InvalidArgument("bandwidth must be > 0");
    if (!automatic) return value;
    return value * auto_bandwidth(accepted, m, accepted.table_size);
}

double integrated_squared_error(const DensityEstimate& estimate,
                                const std::function<double(std::span<const double>)>& truth) {
    std::vector<double> sq(estimate.values.size());
    std::vector<double> point(estimate.grid.dim());
    for (std::size_t g = 0; g < sq.size(); ++g) {
        estimate.grid.point(g, point);
        const double diff = estimate.values[g] - truth(point);
        sq[g] = diff * diff;
    }
    return trapezoid_integral(estimate.grid, sq);
}

namespace {

const PosteriorOracle& require_oracle(const Model& model) {
    const PosteriorOracle* oracle = model.oracle();
    if (oracle == nullptr) {
        throw UnsupportedModel("model '" + model.id() + "' has no analytic posterior");
    }
    return *oracle;
}

// The default grid follows the accepted thetas; widen and refine it (p = 1) so
// it also resolves the oracle, otherwise a huge h hides the posterior mass.
GridSpec ise_grid(const GridSpec& base, const PosteriorOracle& oracle, std::span<const double> s0) {
    if (base.dim() != 1) return base;
    const double mu = oracle.mean(s0)[0];
    const double sd = std::sqrt(oracle.variance(s0)[0]);
    GridSpec g = base;
    g.lower[0] = std::min(base.lower[0], mu - 6.0 * sd);
    g.upper[0] = std::max(base.upper[0], mu + 6.0 * sd);
    const double step = std::min(base.step(0), sd / 8.0);
    const auto needed = static_cast<std::size_t>(std::ceil((g.upper[0] - g.lower[0]) / step)) + 1;
    g.points[0] = std::max(base.points[0], needed);
    return g;
}

}  // namespace

MiseReport mise_estimate(const Model& model, std::span<const double> s0, std::size_t n,
                         std::size_t k, const Bandwidth& bandwidth, const KernelSpec& kernel,
                         std::size_t replicates, std::uint64_t seed) {
    const PosteriorOracle& oracle = require_oracle(model);
    require_dim(s0.size(), model.summary_dim(), "mise s0");
    if (replicates < 2) throw InvalidArgument("mise_estimate needs at least 2 replicates");
    MiseReport report;
    report.n = n;
    report.k = k;
    report.replicates = replicates;
    report.per_replicate.resize(replicates);
    report.per_replicate_h.resize(replicates);
    std::vector<std::size_t> grid_points(replicates);
    const std::vector<double> s0v(s0.begin(), s0.end());
    parallel_for(replicates, [&](std::size_t r) {
        const ReferenceTable table = generate_table(model, n, replicate_seed(seed, r));
        const AcceptedSet accepted = abc_knn(table, s0v, k);
        const double h = bandwidth.resolve(accepted, model.summary_dim());
        const DensityEstimate est = estimate_density(
            accepted, h, kernel, ise_grid(default_grid(accepted, h), oracle, s0v), table.seed());
        report.per_replicate[r] = integrated_squared_error(
            est, [&](std::span<const double> theta) { return oracle.pdf(theta, s0v); });
        report.per_replicate_h[r] = h;
        grid_points[r] = est.grid.size();
    });
    report.mise_mean = mean(report.per_replicate);
    report.mise_stderr = standard_error(report.per_replicate);
    report.h = mean(report.per_replicate_h);
    report.grid_points = grid_points.front();
    return report;
}

double theoretical_mise_slope(std::size_t m, std::size_t p) {
    const double pd = static_cast<double>(p);
    if (regime_for(m) == Regime::m_gt_4) return -4.0 / (static_cast<double>(m) + pd + 4.0);
    return -4.0 / (pd + 8.0);
}

RateReport rate_experiment(const Model& model, std::span<const double> s0,
                           std::span<const std::size_t> ns, const ScheduleParams& params,
                           const KernelSpec& kernel, std::size_t replicates, std::uint64_t seed) {
    if (ns.size() < 3) throw InvalidArgument("rate_experiment needs at least 3 values of N");
    const std::size_t m = model.summary_dim();
    const std::size_t p = model.param_dim();
    RateReport rep;
    rep.theoretical_slope = theoretical_mise_slope(m, p);
    rep.log_factor = m == 4;
    for (std::size_t i = 0; i < ns.size(); ++i) {
        const std::size_t n = ns[i];
        const ScheduleValue sv = schedule(m, p, n, params.c_k, 1.0);
        const Bandwidth bw = params.bandwidth.automatic
                                 ? params.bandwidth
                                 : Bandwidth::fixed(params.bandwidth.value * sv.h);
        MiseReport r = mise_estimate(model, s0, n, sv.k, bw, kernel, replicates,
                                     derive_seed(seed, i, SeedDomain::user));
        rep.ns.push_back(n);
        rep.ks.push_back(sv.k);
        rep.hs.push_back(r.h);
        rep.log_n.push_back(std::log(static_cast<double>(n)));
        rep.log_mise.push_back(std::log(r.mise_mean));
        rep.reports.push_back(std::move(r));
    }
    const LinearFit fit = ols_fit(rep.log_n, rep.log_mise);
    rep.fitted_slope = fit.slope;
    rep.slope_stderr = fit.slope_stderr;
    rep.intercept = fit.intercept;
    return rep;
}

LawTestResult conditional_law_test(const Model& model, std::span<const double> s0, std::size_t n,
                                   std::size_t k, std::size_t reference_draws, std::uint64_t seed,
                                   LawReference reference) {
    if (model.param_dim() != 1) {
        throw UnsupportedModel("conditional_law_test compares one-dimensional thetas only");
    }
    if (k < kMinLawTestK) {
        throw InvalidArgument("conditional_law_test needs k >= " + std::to_string(kMinLawTestK));
    }
    if (reference_draws == 0) throw InvalidArgument("conditional_law_test needs reference draws");
    const ReferenceTable table = generate_table(model, n, replicate_seed(seed, 0));
    const AcceptedSet accepted = abc_knn(table, s0, k);

    LawTestResult out;
    out.k = k;
    out.radius = accepted.radius_next;
    out.reference_draws = reference_draws;
    const std::uint64_t ref_seed = derive_seed(seed, 1, SeedDomain::oracle);
    std::vector<double> ref;
    if (reference == LawReference::restricted) {
        RestrictedOptions opts;
        opts.threads = 1;
        ref = sample_restricted(model, s0, out.radius, reference_draws, ref_seed, opts).thetas;
    } else {
        ref.resize(reference_draws);
        for (std::size_t j = 0; j < reference_draws; ++j) {
            Substream rng = Substream::derive(ref_seed, j, SeedDomain::oracle);
            model.draw_prior(rng, std::span<double>(&ref[j], 1));
        }
    }
    const KsResult ks = ks_two_sample(accepted.thetas, ref);
    out.statistic = ks.statistic;
    out.p_value = ks.p_value;
    return out;
}

LawCalibration law_test_calibration(const Model& model, std::span<const double> s0, std::size_t n,
                                    std::size_t k, std::size_t reference_draws, std::size_t runs,
                                    std::uint64_t seed, double level, LawReference reference) {
    if (runs == 0) throw InvalidArgument("law_test_calibration needs at least one run");
    LawCalibration cal;
    cal.runs = runs;
    cal.level = level;
    cal.results.resize(runs);
    const std::vector<double> s0v(s0.begin(), s0.end());
    parallel_for(runs, [&](std::size_t r) {
        cal.results[r] = conditional_law_test(model, s0v, n, k, reference_draws,
                                              derive_seed(seed, r, SeedDomain::user), reference);
    });
    std::size_t rejected = 0;
    for (const auto& res : cal.results) rejected += res.p_value < level ? 1 : 0;
    cal.rejection_fraction = static_cast<double>(rejected) / static_cast<double>(runs);
    return cal;
}

std::vector<BoundCheckRow> bound_check(const Model& model, std::span<const double> s0, std::size_t m,
                                       std::span<const std::pair<std::size_t, std::size_t>> pairs,
                                       double xi0, double l_diam, std::span<const int> orders,
                                       std::size_t replicates, std::uint64_t seed) {
    if (!model.support_diameter()) {
        throw UnsupportedModel("bound_check requires a model with compactly supported summaries");
    }
    require_dim(m, model.summary_dim(), "bound_check summary dimension");
    if (replicates == 0) throw InvalidArgument("bound_check needs at least one replicate");
    const std::vector<double> s0v(s0.begin(), s0.end());
    std::vector<BoundCheckRow> rows;
    for (std::size_t pi = 0; pi < pairs.size(); ++pi) {
        const auto [n, k] = pairs[pi];
        const bool applies = distance_bound_applies(m, k, n, xi0, l_diam);
        std::vector<double> radii;
        if (applies) {
            radii.resize(replicates);
            const std::uint64_t pair_seed = derive_seed(seed, pi, SeedDomain::user);
            parallel_for(replicates, [&](std::size_t r) {
                const ReferenceTable table = generate_table(model, n, replicate_seed(pair_seed, r));
                radii[r] = abc_knn(table, s0v, k).radius_next;
            });
        }
        for (int order : orders) {
            BoundCheckRow row;
            row.n = n;
            row.k = k;
            row.order = order;
            row.applies = applies;
            row.bound = distance_moment_bound(m, k, n, xi0, l_diam, order);
            if (applies) {
                std::vector<double> powered(radii.size());
                for (std::size_t r = 0; r < radii.size(); ++r) powered[r] = std::pow(radii[r], order);
                row.empirical = mean(powered);
                row.holds = row.bound.has_value() && *row.empirical <= *row.bound;
            }
            rows.push_back(row);
        }
    }
    return rows;
}

Functional builtin_functional(const Model& model, std::span<const double> s0, const std::string& name) {
    const PosteriorOracle* oracle = model.oracle();
    Functional f;
    f.name = name;
    if (name == "identity") {
        f.phi = [](std::span<const double> t) { return t[0]; };
        if (oracle) f.oracle_value = oracle->mean(s0)[0];
    } else if (name == "square") {
        f.phi = [](std::span<const double> t) { return t[0] * t[0]; };
        if (oracle) {
            const double mu = oracle->mean(s0)[0];
            f.oracle_value = oracle->variance(s0)[0] + mu * mu;
        }
    } else if (name == "const") {
        f.phi = [](std::span<const double>) { return 1.0; };
        f.oracle_value = 1.0;
    } else {
        throw InvalidArgument("unknown functional '" + name + "' (expected identity|square|const)");
    }
    return f;
}

std::vector<MomentRow> moment_consistency(const Model& model, std::span<const double> s0,
                                          std::size_t n, std::size_t k,
                                          std::span<const Functional> functionals,
                                          std::size_t replicates, std::uint64_t seed) {
    if (replicates < 2) throw InvalidArgument("moment_consistency needs at least 2 replicates");
    const std::vector<double> s0v(s0.begin(), s0.end());
    std::vector<std::vector<double>> values(functionals.size(), std::vector<double>(replicates));
    parallel_for(replicates, [&](std::size_t r) {
        const ReferenceTable table = generate_table(model, n, replicate_seed(seed, r));
        const AcceptedSet accepted = abc_knn(table, s0v, k);
        for (std::size_t f = 0; f < functionals.size(); ++f) {
            values[f][r] = posterior_functional(accepted, functionals[f].phi);
        }
    });
    std::vector<MomentRow> rows;
    for (std::size_t f = 0; f < functionals.size(); ++f) {
        MomentRow row;
        row.name = functionals[f].name;
        row.estimate_mean = mean(values[f]);
        row.stderr_ = standard_error(values[f]);
        row.oracle_value = functionals[f].oracle_value;
        if (row.oracle_value) {
            const double diff = row.estimate_mean - *row.oracle_value;
            if (row.stderr_ > 0.0) {
                row.z_score = diff / row.stderr_;
            } else {
                row.z_score = diff == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff);
            }
        }
        row.per_replicate = std::move(values[f]);
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace abc
