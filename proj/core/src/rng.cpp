#include "abc/rng.hpp"

#include <cmath>

namespace abc {

std::uint64_t splitmix64(std::uint64_t& state) noexcept {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index, SeedDomain domain) noexcept {
    std::uint64_t state = master;
    std::uint64_t h = splitmix64(state);
    state = h ^ (static_cast<std::uint64_t>(domain) * 0xd1b54a32d192ed03ULL);
    h = splitmix64(state);
    state = h ^ index;
    return splitmix64(state);
}

namespace {
constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
}
}  // namespace

Xoshiro256::Xoshiro256(std::uint64_t seed) noexcept {
    std::uint64_t state = seed;
    for (auto& word : s_) word = splitmix64(state);
}

Xoshiro256::result_type Xoshiro256::operator()() noexcept {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double Substream::uniform() noexcept {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Substream::uniform_open() noexcept {
    return (static_cast<double>(engine_() >> 12) + 0.5) * 0x1.0p-52;
}

double Substream::normal() { return normal_(engine_); }

double Substream::truncated_normal(double bound) {
    for (;;) {
        const double z = normal_(engine_);
        if (std::abs(z) <= bound) return z;
    }
}

}  // namespace abc
