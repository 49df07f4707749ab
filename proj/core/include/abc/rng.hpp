#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <random>

namespace abc {

// Seed domains keep streams derived for different purposes from the same
// master seed disjoint.
enum class SeedDomain : std::uint64_t {
    table_row = 1,
    restricted = 2,
    replicate = 3,
    auxiliary = 4,
    oracle = 5,
    user = 6,
};

std::uint64_t splitmix64(std::uint64_t& state) noexcept;

// Counter-based derivation: the result depends only on its arguments.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index,
                          SeedDomain domain = SeedDomain::user) noexcept;

// xoshiro256** (Blackman & Vigna), seeded through splitmix64.
class Xoshiro256 {
public:
    using result_type = std::uint64_t;

    explicit Xoshiro256(std::uint64_t seed) noexcept;

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept;

private:
    std::array<std::uint64_t, 4> s_{};
};

// One independent random stream. All model randomness flows through a
// Substream so a draw is reproducible from (master seed, index, domain).
class Substream {
public:
    using result_type = std::uint64_t;

    explicit Substream(std::uint64_t seed) noexcept : engine_(seed) {}

    static Substream derive(std::uint64_t master, std::uint64_t index,
                            SeedDomain domain = SeedDomain::user) noexcept {
        return Substream(derive_seed(master, index, domain));
    }

    static constexpr result_type min() noexcept { return Xoshiro256::min(); }
    static constexpr result_type max() noexcept { return Xoshiro256::max(); }
    result_type operator()() noexcept { return engine_(); }

    // Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept;
    // Uniform on (0, 1).
    double uniform_open() noexcept;
    double normal();
    // Standard normal conditioned on |z| <= bound (rejection).
    double truncated_normal(double bound);

private:
    Xoshiro256 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace abc
