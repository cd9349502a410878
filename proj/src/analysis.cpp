#include "lsland/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lsland/csv.hpp"
#include "lsland/error.hpp"

namespace lsland {

namespace {

const std::vector<double>& frozen_losses(LandscapeView& view) {
    if (!view.frozen()) {
        throw NotFrozenError("operation needs a frozen view; noise mode '" +
                             describe(view.noise()) + "' redraws observations");
    }
    return view.observe_all();
}

NodeId argmin(const std::vector<double>& xs) {
    NodeId best = 0;
    for (std::size_t v = 1; v < xs.size(); ++v) {
        if (xs[v] < xs[best]) {
            best = static_cast<NodeId>(v);
        }
    }
    return best;
}

}  // namespace

std::vector<NodeId> successor_map(LandscapeView& view) {
    const auto& loss = frozen_losses(view);
    const Topology& topo = view.topology();
    std::vector<NodeId> succ(loss.size());
    std::vector<NodeId> nbrs;
    for (std::size_t v = 0; v < loss.size(); ++v) {
        topo.neighbors(static_cast<NodeId>(v), nbrs);
        NodeId best = static_cast<NodeId>(v);
        double lbest = loss[v];
        for (NodeId u : nbrs) {
            if (loss[u] < lbest) {
                best = u;
                lbest = loss[u];
            }
        }
        succ[v] = best;
    }
    return succ;
}

std::vector<NodeId> local_minima_of(const std::vector<NodeId>& succ) {
    std::vector<NodeId> minima;
    for (std::size_t v = 0; v < succ.size(); ++v) {
        if (succ[v] == v) {
            minima.push_back(static_cast<NodeId>(v));
        }
    }
    return minima;
}

std::vector<NodeId> find_local_minima(LandscapeView& view) {
    return local_minima_of(successor_map(view));
}

BasinResult basins(LandscapeView& view, GlobalReference ref) {
    const auto succ = successor_map(view);
    const auto& loss = view.observe_all();
    const std::size_t n = succ.size();
    constexpr auto unset = std::numeric_limits<std::uint32_t>::max();

    BasinResult out;
    out.assignment.assign(n, 0);
    out.steps.assign(n, unset);
    std::vector<NodeId> chain;
    for (std::size_t s = 0; s < n; ++s) {
        NodeId v = static_cast<NodeId>(s);
        chain.clear();
        while (out.steps[v] == unset && succ[v] != v) {
            chain.push_back(v);
            v = succ[v];
        }
        if (out.steps[v] == unset) {
            out.steps[v] = 0;
            out.assignment[v] = v;
        }
        const NodeId root = out.assignment[v];
        std::uint32_t depth = out.steps[v];
        for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
            out.steps[*it] = ++depth;
            out.assignment[*it] = root;
        }
    }

    LandscapeStats& st = out.stats;
    st.n = n;
    std::vector<std::size_t> counts(n, 0);
    double total_steps = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
        ++counts[out.assignment[v]];
        total_steps += out.steps[v];
    }
    for (std::size_t v = 0; v < n; ++v) {
        if (succ[v] == v) {
            st.basin_sizes.push_back({static_cast<NodeId>(v), counts[v]});
        }
    }
    st.num_local_minima = st.basin_sizes.size();
    st.avg_iterations = total_steps / static_cast<double>(n);
    st.global_min = ref == GlobalReference::Observed ? argmin(loss)
                                                     : argmin(view.landscape().val_loss);
    // With the base reference the base argmin need not be a minimum of the
    // observed landscape; then nothing reaches it.
    st.fraction_reaching_global_min =
        succ[st.global_min] == st.global_min
            ? static_cast<double>(counts[st.global_min]) / static_cast<double>(n)
            : 0.0;
    return out;
}

std::vector<CurvePoint> within_epsilon_curve(LandscapeView& view,
                                             const std::vector<double>& epsilons) {
    for (std::size_t i = 0; i < epsilons.size(); ++i) {
        if (!(epsilons[i] >= 0.0) || (i > 0 && epsilons[i] < epsilons[i - 1])) {
            throw ArgumentError("epsilon grid must be ascending and non-negative");
        }
    }
    const BasinResult b = basins(view);
    const auto& loss = view.observe_all();
    const double best = loss[b.stats.global_min];
    std::vector<double> gaps(loss.size());
    for (std::size_t v = 0; v < loss.size(); ++v) {
        gaps[v] = loss[b.assignment[v]] - best;
    }
    std::sort(gaps.begin(), gaps.end());
    std::vector<CurvePoint> curve;
    curve.reserve(epsilons.size());
    for (double eps : epsilons) {
        const auto count = std::upper_bound(gaps.begin(), gaps.end(), eps) - gaps.begin();
        curve.push_back({eps, static_cast<double>(count) / static_cast<double>(loss.size())});
    }
    return curve;
}

PreimageIndex::PreimageIndex(const std::vector<NodeId>& succ) {
    const std::size_t n = succ.size();
    offsets_.assign(n + 1, 0);
    for (std::size_t v = 0; v < n; ++v) {
        if (succ[v] != v) {
            ++offsets_[succ[v] + 1];
        }
    }
    for (std::size_t v = 0; v < n; ++v) {
        offsets_[v + 1] += offsets_[v];
    }
    children_.resize(offsets_[n]);
    std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (std::size_t v = 0; v < n; ++v) {
        if (succ[v] != v) {
            children_[fill[succ[v]]++] = static_cast<NodeId>(v);
        }
    }
}

std::span<const NodeId> PreimageIndex::children(NodeId v) const {
    if (v + std::size_t{1} >= offsets_.size()) {
        throw RangeError("node id " + std::to_string(v) + " out of range");
    }
    return {children_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
}

PreimageIndex::Sizes PreimageIndex::sizes(NodeId v, std::size_t max_k) const {
    Sizes out;
    out.by_depth.assign(max_k, 0);
    std::vector<NodeId> level{v};
    std::vector<NodeId> next;
    for (std::size_t depth = 1; !level.empty(); ++depth) {
        next.clear();
        for (NodeId u : level) {
            const auto c = children(u);
            next.insert(next.end(), c.begin(), c.end());
        }
        if (depth <= max_k) {
            out.by_depth[depth - 1] = next.size();
        }
        out.full += next.size();
        std::swap(level, next);
    }
    return out;
}

PreimageIndex::Sizes preimage_sizes(LandscapeView& view, NodeId v, std::size_t max_k) {
    if (v >= view.size()) {
        throw RangeError("node id " + std::to_string(v) + " out of range");
    }
    return PreimageIndex(successor_map(view)).sizes(v, max_k);
}

std::vector<RwaPoint> autocorrelation(const std::vector<double>& series, std::size_t max_lag) {
    const std::size_t len = series.size();
    if (len < 2 * max_lag || len < 2) {
        throw ArgumentError("walk length " + std::to_string(len) + " must be >= 2 * max_lag (" +
                            std::to_string(2 * max_lag) + ")");
    }
    double mean = 0.0;
    for (double x : series) {
        mean += x;
    }
    mean /= static_cast<double>(len);
    double c0 = 0.0;
    for (double x : series) {
        c0 += (x - mean) * (x - mean);
    }
    if (!(c0 > 0.0)) {
        throw DataError("loss sequence along the walk has zero variance");
    }
    std::vector<RwaPoint> out;
    out.reserve(max_lag + 1);
    for (std::size_t t = 0; t <= max_lag; ++t) {
        double ct = 0.0;
        for (std::size_t i = 0; i + t < len; ++i) {
            ct += (series[i] - mean) * (series[i + t] - mean);
        }
        out.push_back({t, std::sqrt(static_cast<double>(t)), t == 0 ? 1.0 : ct / c0});
    }
    return out;
}

std::vector<RwaPoint> rwa(LandscapeView& view, std::size_t walk_len, std::size_t max_lag,
                          std::uint64_t seed) {
    if (walk_len < 2 * max_lag || walk_len < 2) {
        throw ArgumentError("walk length " + std::to_string(walk_len) +
                            " must be >= 2 * max_lag (" + std::to_string(2 * max_lag) + ")");
    }
    const Topology& topo = view.topology();
    if (!topo.connected() || topo.size() < 2) {
        throw DataError("random walk needs a connected topology with at least two nodes");
    }
    Rng rng(mix64(seed, 0x7A1CULL));
    std::vector<double> series;
    series.reserve(walk_len);
    std::vector<NodeId> nbrs;
    auto v = static_cast<NodeId>(rng.index(topo.size()));
    for (std::size_t i = 0; i < walk_len; ++i) {
        series.push_back(view.observe(v));
        topo.neighbors(v, nbrs);
        v = nbrs[rng.index(nbrs.size())];
    }
    return autocorrelation(series, max_lag);
}

TreeExport export_search_tree(LandscapeView& view, std::size_t top_k) {
    if (top_k < 1) {
        throw ArgumentError("top_k must be >= 1");
    }
    const auto succ = successor_map(view);
    const auto& loss = view.observe_all();
    const PreimageIndex index(succ);
    auto minima = local_minima_of(succ);
    std::stable_sort(minima.begin(), minima.end(),
                     [&](NodeId a, NodeId b) { return loss[a] < loss[b]; });

    TreeExport out;
    if (top_k > minima.size()) {
        out.warning = "top_k " + std::to_string(top_k) + " exceeds the " +
                      std::to_string(minima.size()) + " local minima; exporting all";
        top_k = minima.size();
    }
    minima.resize(top_k);
    out.minima = minima;

    for (NodeId m : minima) {
        std::vector<std::pair<NodeId, std::uint32_t>> order{{m, 0}};
        for (std::size_t i = 0; i < order.size(); ++i) {
            for (NodeId c : index.children(order[i].first)) {
                order.emplace_back(c, order[i].second + 1);
            }
        }
        auto subtree = [&](auto& self, NodeId id, std::uint32_t depth) -> nlohmann::json {
            nlohmann::json kids = nlohmann::json::array();
            for (NodeId c : index.children(id)) {
                kids.push_back(self(self, c, depth + 1));
            }
            return {{"id", id}, {"loss", loss[id]}, {"depth", depth}, {"children", std::move(kids)}};
        };
        nlohmann::json kids = nlohmann::json::array();
        for (NodeId c : index.children(m)) {
            kids.push_back(subtree(subtree, c, 1));
        }
        out.trees.push_back({{"min_id", m},
                             {"loss", loss[m]},
                             {"basin_size", order.size()},
                             {"children", std::move(kids)}});

        std::ostringstream dot;
        dot << "digraph basin_" << m << " {\n  rankdir=BT;\n";
        for (const auto& [id, depth] : order) {
            dot << "  n" << id << " [label=\"" << id << "\\n" << format_double(loss[id])
                << "\"" << (depth == 0 ? ", shape=doublecircle" : "") << "];\n";
        }
        for (std::size_t i = 1; i < order.size(); ++i) {
            dot << "  n" << order[i].first << " -> n" << succ[order[i].first] << ";\n";
        }
        dot << "}\n";
        out.dot.push_back(dot.str());
    }
    return out;
}

nlohmann::json stats_to_json(const LandscapeStats& stats) {
    nlohmann::json sizes = nlohmann::json::array();
    for (const auto& b : stats.basin_sizes) {
        sizes.push_back({{"minimum", b.minimum}, {"size", b.size}});
    }
    return {{"n", stats.n},
            {"num_local_minima", stats.num_local_minima},
            {"avg_iterations", stats.avg_iterations},
            {"global_min", stats.global_min},
            {"fraction_reaching_global_min", stats.fraction_reaching_global_min},
            {"basin_sizes", sizes}};
}

}  // namespace lsland
