#pragma once

// Grid-search fits of the global and local loss densities.

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "lsland/analysis.hpp"
#include "lsland/topology.hpp"

namespace lsland {

struct GlobalFit {
    double sigma;
    double center;
    double objective;  // squared L2 distance over the 50 bins
};

// sigma in 0.02..1.00 (step 0.01), center in 0..1 (step 0.05); the 50-bin
// normalised histogram on [0, 1] is compared with the bin-averaged truncated
// normal density. The first grid point attaining the minimum wins. Fewer than
// 100 values throws DataError("insufficient data ...").
GlobalFit fit_global_truncnorm(std::span<const double> losses);

struct RwaFitOptions {
    std::size_t walk_len = 100000;
    double root_center = 0.25;
    double root_sigma = 0.18;
};

struct LocalFit {
    double sigma;
    double objective;
    std::vector<double> objectives;  // aligned with the sorted candidates
    std::vector<double> candidates;
};

// For every candidate sigma a Markov truncnorm landscape is generated on the
// topology and its RWA compared with the observed curve over the lags >= 1
// whose observed rho exceeds 0.05 (all lags >= 1 if none does). Ties go to
// the smallest sigma.
LocalFit fit_local_sigma_via_rwa(const std::vector<RwaPoint>& observed,
                                 std::shared_ptr<const Topology> topology,
                                 std::vector<double> candidates, std::uint64_t seed,
                                 const RwaFitOptions& opts = {});

}  // namespace lsland
