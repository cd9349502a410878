#pragma once

// Exhaustive statistics over frozen views.
//
// Every function here observes the full landscape through the view first,
// so the view's cache ends up complete.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "lsland/view.hpp"

namespace lsland {

// succ[v] = argmin over N(v) of the observed loss if strictly below v's own,
// else v. Ties go to the lowest id. Throws NotFrozenError on fresh-noise views.
std::vector<NodeId> successor_map(LandscapeView& view);

std::vector<NodeId> find_local_minima(LandscapeView& view);
std::vector<NodeId> local_minima_of(const std::vector<NodeId>& succ);

enum class GlobalReference { Observed, Base };

struct BasinSize {
    NodeId minimum;
    std::size_t size;
};

struct LandscapeStats {
    std::size_t n = 0;
    std::size_t num_local_minima = 0;
    double avg_iterations = 0.0;
    NodeId global_min = 0;
    double fraction_reaching_global_min = 0.0;
    std::vector<BasinSize> basin_sizes;  // ascending by minimum id
};

struct BasinResult {
    std::vector<NodeId> assignment;   // LS*(v)
    std::vector<std::uint32_t> steps;  // iterations from v to LS*(v)
    LandscapeStats stats;
};

BasinResult basins(LandscapeView& view, GlobalReference ref = GlobalReference::Observed);

struct CurvePoint {
    double epsilon;
    double fraction;
};

// Fraction of v with observed(LS*(v)) - observed(v*) <= eps, v* the global
// argmin of the observed losses. The grid must be ascending with eps >= 0.
std::vector<CurvePoint> within_epsilon_curve(LandscapeView& view,
                                             const std::vector<double>& epsilons);

// Reverse successor map.
class PreimageIndex {
public:
    explicit PreimageIndex(const std::vector<NodeId>& succ);

    // Direct predecessors of v, excluding v itself, ascending.
    std::span<const NodeId> children(NodeId v) const;

    struct Sizes {
        std::vector<std::size_t> by_depth;  // |LS^-1(v)|, ..., |LS^-max_k(v)|
        std::size_t full = 0;               // |LS^-*(v)|
    };
    Sizes sizes(NodeId v, std::size_t max_k) const;

private:
    std::vector<std::size_t> offsets_;
    std::vector<NodeId> children_;
};

PreimageIndex::Sizes preimage_sizes(LandscapeView& view, NodeId v, std::size_t max_k);

struct RwaPoint {
    std::size_t lag;
    double sqrt_lag;
    double rho;
};

// Simple random walk with walk_len loss observations starting from a uniform
// node. rho is the biased sample autocorrelation.
std::vector<RwaPoint> rwa(LandscapeView& view, std::size_t walk_len, std::size_t max_lag,
                          std::uint64_t seed);
std::vector<RwaPoint> autocorrelation(const std::vector<double>& series, std::size_t max_lag);

struct TreeExport {
    // One entry per exported minimum:
    // {min_id, loss, basin_size, children: [{id, loss, depth, children}]}
    nlohmann::json trees = nlohmann::json::array();
    std::vector<std::string> dot;
    std::vector<NodeId> minima;
    std::optional<std::string> warning;
};

// Preimage trees of the top_k lowest-loss minima.
TreeExport export_search_tree(LandscapeView& view, std::size_t top_k);

nlohmann::json stats_to_json(const LandscapeStats& stats);

}  // namespace lsland
