#pragma once

// Noisy, cached access to a landscape.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "lsland/landscape.hpp"
#include "lsland/rng.hpp"

namespace lsland {

namespace noise {

struct None {};
struct GaussianFrozen {
    double sigma = 0.0;
};
// Drawn on first query and cached afterwards.
struct GaussianFresh {
    double sigma = 0.0;
};
// Mean of k independently noised copies.
struct SeedAverage {
    double sigma = 0.0;
    unsigned k = 1;
};
struct UniformReplace {};
// val_loss + x * sigma_base(v) * z. sigma_base has one entry (scalar) or n.
struct Scaled {
    std::vector<double> sigma_base;
    double x = 0.0;
};

}  // namespace noise

using NoiseSpec = std::variant<noise::None, noise::GaussianFrozen, noise::GaussianFresh,
                               noise::SeedAverage, noise::UniformReplace, noise::Scaled>;

bool is_frozen(const NoiseSpec& spec) noexcept;

// Throws ArgumentError for negative sigma/x, k = 0, or a sigma_base array
// whose length is neither 1 nor n.
void validate_noise(const NoiseSpec& spec, std::size_t n);

// "none", "gaussian:S", "gaussian-fresh:S", "seed-average:S,K",
// "uniform-replace", "scaled:X,SIGMA".
NoiseSpec parse_noise_spec(const std::string& text);
std::string describe(const NoiseSpec& spec);

class LandscapeView {
public:
    LandscapeView(std::shared_ptr<const Landscape> landscape, NoiseSpec noise, std::uint64_t seed);

    // Observed loss of v. The first observation of a node increments the
    // query counter and appends it to the log; later ones are free.
    double observe(NodeId v);

    bool is_cached(NodeId v) const;
    // Cached observation without charging; NaN if not yet observed.
    double peek(NodeId v) const;

    std::size_t queries() const noexcept { return log_.size(); }
    // Nodes in order of first observation.
    const std::vector<NodeId>& log() const noexcept { return log_; }

    // Observes every node in id order and returns the full cache.
    const std::vector<double>& observe_all();

    const Landscape& landscape() const noexcept { return *landscape_; }
    const Topology& topology() const noexcept { return *landscape_->topology; }
    std::size_t size() const noexcept { return cache_.size(); }
    const NoiseSpec& noise() const noexcept { return noise_; }
    bool frozen() const noexcept { return is_frozen(noise_); }
    std::uint64_t seed() const noexcept { return seed_; }

    // Randomness for search decisions (neighbor shuffles); independent of the
    // noise stream.
    Rng& rng() noexcept { return rng_; }

private:
    double draw(NodeId v);

    std::shared_ptr<const Landscape> landscape_;
    NoiseSpec noise_;
    std::uint64_t seed_;
    std::vector<double> cache_;
    std::vector<NodeId> log_;
    Rng rng_;
    Rng fresh_;
};

}  // namespace lsland
