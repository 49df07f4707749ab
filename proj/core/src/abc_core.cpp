#include "abc/abc_core.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "abc/errors.hpp"
#include "abc/parallel.hpp"

namespace abc {

ReferenceTable::ReferenceTable(std::string model_id, std::uint64_t seed, std::size_t p,
                               std::size_t m, std::vector<double> thetas,
                               std::vector<double> summaries)
    : model_id_(std::move(model_id)),
      seed_(seed),
      p_(p),
      m_(m),
      n_(p == 0 ? 0 : thetas.size() / p),
      thetas_(std::move(thetas)),
      summaries_(std::move(summaries)) {
    if (p_ == 0 || m_ == 0) throw InvalidArgument("reference table dimensions must be positive");
    if (thetas_.size() % p_ != 0 || summaries_.size() % m_ != 0 || summaries_.size() / m_ != n_) {
        throw DimensionMismatch("reference table: theta and summary row counts differ");
    }
    if (n_ == 0) throw InvalidArgument("reference table must hold at least one row");
}

ReferenceTable generate_table(const Model& model, std::size_t n, std::uint64_t seed, int threads) {
    if (n < 2) {
        throw InvalidArgument("reference table size N must satisfy N >= 2 (got " +
                              std::to_string(n) + ")");
    }
    const std::size_t p = model.param_dim();
    const std::size_t m = model.summary_dim();
    std::vector<double> thetas(n * p);
    std::vector<double> summaries(n * m);
    parallel_for(
        n,
        [&](std::size_t i) {
            Substream rng = Substream::derive(seed, i, SeedDomain::table_row);
            std::span<double> theta(thetas.data() + i * p, p);
            model.draw_prior(rng, theta);
            model.draw_summary(theta, rng, std::span<double>(summaries.data() + i * m, m));
        },
        threads);
    return ReferenceTable(model.id(), seed, p, m, std::move(thetas), std::move(summaries));
}

namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double d2 = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double d = a[j] - b[j];
        d2 += d * d;
    }
    return d2;
}

struct Candidate {
    double d2;
    std::size_t index;
};

bool candidate_less(const Candidate& a, const Candidate& b) {
    return a.d2 < b.d2 || (a.d2 == b.d2 && a.index < b.index);
}

AcceptedSet assemble(const ReferenceTable& table, std::span<const double> s0,
                     std::span<const Candidate> winners, double radius_next) {
    AcceptedSet out;
    out.p = table.param_dim();
    out.m = table.summary_dim();
    out.s0.assign(s0.begin(), s0.end());
    out.table_size = table.size();
    out.radius_next = radius_next;
    out.thetas.reserve(winners.size() * out.p);
    out.summaries.reserve(winners.size() * out.m);
    out.distances.reserve(winners.size());
    out.source_indices.reserve(winners.size());
    for (const Candidate& c : winners) {
        const auto theta = table.theta(c.index);
        const auto summary = table.summary(c.index);
        out.thetas.insert(out.thetas.end(), theta.begin(), theta.end());
        out.summaries.insert(out.summaries.end(), summary.begin(), summary.end());
        out.distances.push_back(std::sqrt(c.d2));
        out.source_indices.push_back(c.index);
    }
    return out;
}

}  // namespace

std::vector<double> squared_distances(const ReferenceTable& table, std::span<const double> s0,
                                      int threads) {
    require_dim(s0.size(), table.summary_dim(), "observed summary s0");
    std::vector<double> d2(table.size());
    parallel_for(
        table.size(), [&](std::size_t i) { d2[i] = squared_distance(table.summary(i), s0); },
        threads);
    return d2;
}

AcceptedSet abc_tolerance(const ReferenceTable& table, std::span<const double> s0, double epsilon) {
    if (!(epsilon >= 0.0)) throw InvalidArgument("tolerance epsilon must be >= 0");
    const std::vector<double> d2 = squared_distances(table, s0);
    std::vector<Candidate> accepted;
    double radius_next = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < d2.size(); ++i) {
        const double d = std::sqrt(d2[i]);
        if (d <= epsilon) {
            accepted.push_back({d2[i], i});
        } else {
            radius_next = std::min(radius_next, d);
        }
    }
    std::sort(accepted.begin(), accepted.end(), candidate_less);
    return assemble(table, s0, accepted, radius_next);
}

AcceptedSet abc_knn(const ReferenceTable& table, std::span<const double> s0, std::size_t k) {
    const std::size_t n = table.size();
    if (k < 1 || k + 1 > n) {
        throw InvalidArgument("k must satisfy 1 <= k <= N-1 (k=" + std::to_string(k) +
                              ", N=" + std::to_string(n) + ")");
    }
    const std::vector<double> d2 = squared_distances(table, s0);
    std::vector<Candidate> scratch(n);
    for (std::size_t i = 0; i < n; ++i) scratch[i] = {d2[i], i};
    // After selection scratch[k] is the (k+1)-th row and [0, k) holds the winners.
    const auto kth = scratch.begin() + static_cast<std::ptrdiff_t>(k);
    std::nth_element(scratch.begin(), kth, scratch.end(), candidate_less);
    std::sort(scratch.begin(), kth, candidate_less);
    const double radius_next = std::sqrt(kth->d2);
    return assemble(table, s0, std::span<const Candidate>(scratch.data(), k), radius_next);
}

std::size_t percentile_to_k(std::size_t n, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("percentile alpha must lie in (0, 1)");
    if (n < 2) throw InvalidArgument("percentile_to_k requires N >= 2");
    const double raw = std::round(alpha * static_cast<double>(n));
    const double clamped = std::clamp(raw, 1.0, static_cast<double>(n - 1));
    return static_cast<std::size_t>(clamped);
}

RestrictedSample sample_restricted(const Model& model, std::span<const double> s0, double radius,
                                   std::size_t count, std::uint64_t seed,
                                   const RestrictedOptions& options) {
    require_dim(s0.size(), model.summary_dim(), "restricted sampler s0");
    if (!(radius > 0.0)) throw InvalidArgument("restricted sampler radius must be > 0");
    const std::size_t p = model.param_dim();
    const std::size_t m = model.summary_dim();
    const std::size_t block = std::max<std::size_t>(options.block_size, 1);
    constexpr double kMinAcceptance = 1e-12;
    constexpr double kMaxAttempts = 1e11;

    RestrictedSample out;
    out.p = p;
    out.m = m;
    out.thetas.reserve(count * p);
    out.summaries.reserve(count * m);

    std::vector<double> thetas(block * p);
    std::vector<double> summaries(block * m);
    std::vector<char> keep(block);
    std::size_t accepted = 0;
    std::size_t attempts = 0;
    while (accepted < count) {
        const std::size_t base = attempts;
        parallel_for(
            block,
            [&](std::size_t j) {
                Substream rng = Substream::derive(seed, base + j, SeedDomain::restricted);
                std::span<double> theta(thetas.data() + j * p, p);
                std::span<double> s(summaries.data() + j * m, m);
                model.draw_prior(rng, theta);
                model.draw_summary(theta, rng, s);
                keep[j] = std::sqrt(squared_distance(s, s0)) <= radius ? 1 : 0;
            },
            options.threads);
        for (std::size_t j = 0; j < block && accepted < count; ++j) {
            ++attempts;
            if (!keep[j]) continue;
            out.thetas.insert(out.thetas.end(), thetas.begin() + j * p, thetas.begin() + (j + 1) * p);
            out.summaries.insert(out.summaries.end(), summaries.begin() + j * m,
                                 summaries.begin() + (j + 1) * m);
            ++accepted;
        }
        if (accepted < count && attempts >= options.probe_budget) {
            const double rate = static_cast<double>(accepted) / static_cast<double>(attempts);
            const double projected =
                rate > 0.0 ? static_cast<double>(count - accepted) / rate : kMaxAttempts * 10.0;
            if (rate < kMinAcceptance || projected > kMaxAttempts) {
                throw InfeasibleRadius("restricted sampler: estimated acceptance probability " +
                                       std::to_string(rate) + " after " + std::to_string(attempts) +
                                       " draws; radius " + std::to_string(radius) +
                                       " is infeasible at s0");
            }
        }
    }
    out.attempts = attempts;
    return out;
}

}  // namespace abc
