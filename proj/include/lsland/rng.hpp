#pragma once

// Seeding and random-number primitives.
//
// Everything here is bit-reproducible across platforms: the engine is
// std::mt19937_64 (fully specified by the standard) and the distributions are
// implemented locally instead of using the implementation-defined
// std::*_distribution classes.

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace lsland {

// 64-bit mixing function used to derive per-trial and per-node seeds:
//   z = key + 0x9E3779B97F4A7C15 * (index + 1)
//   followed by the SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t key, std::uint64_t index) noexcept {
    std::uint64_t z = key + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Maps 64 random bits to a double strictly inside (0, 1).
constexpr double to_unit_open(std::uint64_t bits) noexcept {
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t bits() { return engine_(); }

    // Uniform on the open interval (0, 1).
    double uniform() { return to_unit_open(engine_()); }

    // Unbiased integer in [0, n). n must be positive.
    std::uint64_t index(std::uint64_t n) {
        const std::uint64_t limit = n * ((~std::uint64_t{0}) / n);
        std::uint64_t x = engine_();
        while (x >= limit) {
            x = engine_();
        }
        return x % n;
    }

    // Standard normal via inverse CDF.
    double normal();

    template <class T>
    void shuffle(std::span<T> items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(index(i));
            std::swap(items[i - 1], items[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace lsland
