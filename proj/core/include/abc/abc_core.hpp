#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "abc/model_zoo.hpp"

namespace abc {

// N i.i.d. draws (theta_i, s_i) from pi(theta) f(s | theta), stored row-major.
class ReferenceTable {
public:
    ReferenceTable(std::string model_id, std::uint64_t seed, std::size_t p, std::size_t m,
                   std::vector<double> thetas, std::vector<double> summaries);

    std::size_t size() const noexcept { return n_; }
    std::size_t param_dim() const noexcept { return p_; }
    std::size_t summary_dim() const noexcept { return m_; }
    std::uint64_t seed() const noexcept { return seed_; }
    const std::string& model_id() const noexcept { return model_id_; }

    std::span<const double> theta(std::size_t i) const { return {thetas_.data() + i * p_, p_}; }
    std::span<const double> summary(std::size_t i) const { return {summaries_.data() + i * m_, m_}; }
    const std::vector<double>& thetas() const noexcept { return thetas_; }
    const std::vector<double>& summaries() const noexcept { return summaries_; }

    friend bool operator==(const ReferenceTable&, const ReferenceTable&) = default;

private:
    std::string model_id_;
    std::uint64_t seed_;
    std::size_t p_;
    std::size_t m_;
    std::size_t n_;
    std::vector<double> thetas_;
    std::vector<double> summaries_;
};

// Rows accepted for an observed summary s0, ordered by (distance, index).
struct AcceptedSet {
    std::size_t p = 0;
    std::size_t m = 0;
    std::vector<double> s0;
    std::vector<double> thetas;     // k x p
    std::vector<double> summaries;  // k x m
    std::vector<double> distances;  // nondecreasing
    std::vector<std::size_t> source_indices;
    // d_(k+1): distance of the first rejected row (+inf when none).
    double radius_next = std::numeric_limits<double>::infinity();
    std::size_t table_size = 0;

    std::size_t size() const noexcept { return distances.size(); }
    bool empty() const noexcept { return distances.empty(); }
    std::span<const double> theta(std::size_t j) const { return {thetas.data() + j * p, p}; }
    std::span<const double> summary(std::size_t j) const { return {summaries.data() + j * m, m}; }
    // d_(k), the radius covering the accepted rows (0 when empty).
    double radius() const noexcept { return distances.empty() ? 0.0 : distances.back(); }
};

// Row i is drawn from Substream::derive(seed, i, table_row), so the table is
// bit-identical for any thread count.
ReferenceTable generate_table(const Model& model, std::size_t n, std::uint64_t seed, int threads = 0);

// Squared Euclidean distances ‖s_i - s0‖², summed coordinate by coordinate.
std::vector<double> squared_distances(const ReferenceTable& table, std::span<const double> s0,
                                      int threads = 0);

// Algorithm 1: every row with ‖s_i - s0‖ <= epsilon.
AcceptedSet abc_tolerance(const ReferenceTable& table, std::span<const double> s0, double epsilon);

// Algorithm 2: the k nearest rows, ties broken by ascending row index.
// Requires 1 <= k <= N-1 so that d_(k+1) exists. Expected O(N).
AcceptedSet abc_knn(const ReferenceTable& table, std::span<const double> s0, std::size_t k);

// k = clamp(round(alpha N), 1, N-1) for alpha in (0, 1).
std::size_t percentile_to_k(std::size_t n, double alpha);

struct RestrictedOptions {
    // Draws examined before deciding the radius is infeasible.
    std::size_t probe_budget = 1'000'000;
    // Joint draws evaluated per block; fixed so output is thread-independent.
    std::size_t block_size = 4096;
    int threads = 0;
};

struct RestrictedSample {
    std::size_t p = 0;
    std::size_t m = 0;
    std::vector<double> thetas;
    std::vector<double> summaries;
    std::size_t attempts = 0;

    std::size_t size() const noexcept { return p == 0 ? 0 : thetas.size() / p; }
    std::span<const double> theta(std::size_t j) const { return {thetas.data() + j * p, p}; }
    std::span<const double> summary(std::size_t j) const { return {summaries.data() + j * m, m}; }
};

// i.i.d. draws from the joint density restricted to R^p x B_m(s0, radius),
// by rejection from the joint. Attempt j uses Substream::derive(seed, j, restricted).
RestrictedSample sample_restricted(const Model& model, std::span<const double> s0, double radius,
                                   std::size_t count, std::uint64_t seed,
                                   const RestrictedOptions& options = {});

}  // namespace abc
