#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lsland/analysis.hpp"
#include "lsland/error.hpp"

using namespace lsland;

namespace {

std::shared_ptr<const Landscape> landscape_of(Topology t, std::vector<double> losses) {
    Landscape l;
    l.topology = std::make_shared<const Topology>(std::move(t));
    l.val_loss = std::move(losses);
    return std::make_shared<const Landscape>(std::move(l));
}

// Brute-force successor: scan every node and test adjacency by digit
// comparison instead of the topology's neighbor generator.
std::vector<NodeId> brute_successor(const std::vector<double>& loss, unsigned m, unsigned d) {
    const std::size_t n = loss.size();
    std::vector<NodeId> succ(n);
    for (std::size_t v = 0; v < n; ++v) {
        std::size_t best = v;
        for (std::size_t u = 0; u < n; ++u) {
            std::size_t a = u, b = v;
            unsigned diff = 0;
            for (unsigned i = 0; i < d; ++i) {
                diff += (a % m) != (b % m);
                a /= m;
                b /= m;
            }
            if (diff == 1 && loss[u] < loss[best]) {
                best = u;
            }
        }
        succ[v] = static_cast<NodeId>(best);
    }
    return succ;
}

}  // namespace

TEST_SUITE("analysis") {

TEST_CASE("4-cycle successor map verified by hand") {
    const std::vector<std::pair<NodeId, NodeId>> e{{0, 1}, {1, 2}, {2, 3}, {3, 0}};
    auto l = landscape_of(Topology::from_edges(4, e), {0.1, 0.5, 0.2, 0.7});
    LandscapeView view(l, noise::None{}, 0);
    // N(3) = {0, 2} and 0.1 < 0.2 < 0.7, so node 3 moves to 0.
    CHECK(successor_map(view) == std::vector<NodeId>{0, 0, 2, 0});
    CHECK(find_local_minima(view) == std::vector<NodeId>{0, 2});
}

TEST_CASE("successor map matches brute force on (K4)^3") {
    auto t = std::make_shared<const Topology>(Topology::clique_power(4, 3));
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        auto l = std::make_shared<const Landscape>(sample_uniform(t, seed));
        LandscapeView view(l, noise::None{}, 0);
        const auto succ = successor_map(view);
        CHECK(succ == brute_successor(l->val_loss, 4, 3));
        for (std::size_t v = 0; v < succ.size(); ++v) {
            if (succ[v] != v) {
                CHECK(l->val_loss[succ[v]] < l->val_loss[v]);
            }
        }
    }
}

TEST_CASE("complete graph statistics") {
    auto t = std::make_shared<const Topology>(Topology::complete(10));
    auto l = std::make_shared<const Landscape>(sample_uniform(t, 1));
    LandscapeView view(l, noise::None{}, 0);
    const auto b = basins(view);
    CHECK(b.stats.num_local_minima == 1);
    CHECK(b.stats.fraction_reaching_global_min == 1.0);
    CHECK(b.stats.avg_iterations == doctest::Approx(0.9));
    const auto succ = successor_map(view);
    for (std::size_t v = 0; v < 10; ++v) {
        CHECK(succ[v] == b.stats.global_min);
    }
    const auto pre = preimage_sizes(view, b.stats.global_min, 3);
    CHECK(pre.by_depth == std::vector<std::size_t>{9, 0, 0});
    CHECK(pre.full == 9);
}

TEST_CASE("constant landscape: every node is its own successor") {
    auto l = landscape_of(Topology::clique_power(3, 2), std::vector<double>(9, 0.25));
    LandscapeView view(l, noise::None{}, 0);
    const auto succ = successor_map(view);
    for (std::size_t v = 0; v < 9; ++v) {
        CHECK(succ[v] == v);
    }
    CHECK(basins(view).stats.num_local_minima == 9);
}

TEST_CASE("basins partition the nodes and the curve has the right endpoints") {
    auto t = std::make_shared<const Topology>(Topology::clique_power(5, 6));
    auto l = std::make_shared<const Landscape>(sample_uniform(t, 21));
    LandscapeView view(l, noise::None{}, 0);
    const auto b = basins(view);
    std::size_t total = 0;
    for (const auto& bs : b.stats.basin_sizes) {
        total += bs.size;
        CHECK(b.assignment[bs.minimum] == bs.minimum);
    }
    CHECK(total == 15625);
    CHECK(b.stats.num_local_minima >= 560);
    CHECK(b.stats.num_local_minima <= 690);

    const auto& loss = view.observe_all();
    const double spread = *std::max_element(loss.begin(), loss.end()) -
                          *std::min_element(loss.begin(), loss.end());
    const auto curve = within_epsilon_curve(view, {0.0, 0.001, 0.01, 0.1, spread, 2.0});
    CHECK(curve[0].fraction == doctest::Approx(b.stats.fraction_reaching_global_min));
    for (std::size_t i = 1; i < curve.size(); ++i) {
        CHECK(curve[i].fraction >= curve[i - 1].fraction);
    }
    CHECK(curve[4].fraction == 1.0);
    CHECK(curve[5].fraction == 1.0);
    CHECK_THROWS_AS(within_epsilon_curve(view, {0.1, 0.05}), ArgumentError);
}

TEST_CASE("preimages agree with iterated successor brute force") {
    auto t = std::make_shared<const Topology>(Topology::clique_power(3, 4));
    auto l = std::make_shared<const Landscape>(sample_markov_truncnorm(t, 0.3, 0.3, 0.2, 6));
    LandscapeView view(l, noise::None{}, 0);
    const auto succ = successor_map(view);
    const PreimageIndex index(succ);
    const auto minima = local_minima_of(succ);
    std::size_t covered = 0;
    for (NodeId v = 0; v < t->size(); ++v) {
        const auto sizes = index.sizes(v, 6);
        std::size_t full = 0;
        for (std::size_t k = 1; k <= 6; ++k) {
            std::size_t count = 0;
            for (NodeId u = 0; u < t->size(); ++u) {
                NodeId w = u;
                NodeId before = u;
                for (std::size_t j = 0; j < k; ++j) {
                    before = w;
                    w = succ[w];
                }
                // u reaches v in exactly k strict steps
                if (w == v && before != v) {
                    ++count;
                }
            }
            CHECK(sizes.by_depth[k - 1] == count);
            full += count;
        }
        CHECK(sizes.full == full);
    }
    for (NodeId m : minima) {
        covered += 1 + index.sizes(m, 1).full;
    }
    CHECK(covered == t->size());
}

TEST_CASE("local maximum has an empty preimage") {
    auto l = landscape_of(Topology::complete(4), {0.2, 0.9, 0.1, 0.3});
    LandscapeView view(l, noise::None{}, 0);
    const auto p = preimage_sizes(view, 1, 3);
    CHECK(p.full == 0);
    CHECK(p.by_depth == std::vector<std::size_t>{0, 0, 0});
}

TEST_CASE("autocorrelation against direct oracle") {
    std::vector<double> xs;
    Rng rng(3);
    double a = 0.0;
    for (int i = 0; i < 500; ++i) {
        a = 0.7 * a + rng.normal();
        xs.push_back(a);
    }
    const auto rho = autocorrelation(xs, 10);
    const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
    double c0 = 0.0;
    for (double x : xs) {
        c0 += (x - mean) * (x - mean);
    }
    for (std::size_t t = 0; t <= 10; ++t) {
        double ct = 0.0;
        for (std::size_t i = t; i < xs.size(); ++i) {
            ct += (xs[i] - mean) * (xs[i - t] - mean);
        }
        CHECK(rho[t].rho == doctest::Approx(ct / c0).epsilon(1e-12));
        CHECK(rho[t].sqrt_lag == doctest::Approx(std::sqrt(double(t))));
        CHECK(std::abs(rho[t].rho) <= 1.0);
    }
    CHECK(rho[0].rho == 1.0);
    CHECK_THROWS_AS(autocorrelation(xs, 300), ArgumentError);
    CHECK_THROWS_AS(autocorrelation(std::vector<double>(50, 1.0), 3), DataError);
}

TEST_CASE("random walk autocorrelation on uniform and correlated landscapes") {
    auto t = std::make_shared<const Topology>(Topology::clique_power(5, 6));
    auto base = std::make_shared<const Landscape>(sample_uniform(t, 1));
    LandscapeView white(base, noise::UniformReplace{}, 4);
    const auto r = rwa(white, 100000, 20, 8);
    CHECK(r[0].rho == 1.0);
    // For i.i.d. losses rho(t) is the walk's t-step return probability:
    // m^-d sum_j C(d,j) (m-1)^j (1 - j m / (d (m-1)))^t.
    for (std::size_t i = 1; i < r.size(); ++i) {
        double ret = 0.0;
        for (int j = 0; j <= 6; ++j) {
            const double binom = std::tgamma(7.0) / (std::tgamma(j + 1.0) * std::tgamma(7.0 - j));
            ret += binom * std::pow(4.0, j) * std::pow(1.0 - j * 5.0 / 24.0, double(i));
        }
        ret /= 15625.0;
        CHECK(std::abs(r[i].rho - ret) < 0.02);
    }
    CHECK(std::abs(r[1].rho) < 0.02);
    auto smooth = std::make_shared<const Landscape>(sample_markov_truncnorm(t, 0.05, 0.5, 0.1, 2));
    LandscapeView view(smooth, noise::None{}, 0);
    const auto c = rwa(view, 100000, 16, 8);
    CHECK(c[1].rho > c[4].rho);
    CHECK(c[4].rho > c[16].rho);
    CHECK_THROWS_AS(rwa(view, 10, 6, 0), ArgumentError);

    const std::vector<std::pair<NodeId, NodeId>> e{{0, 1}, {2, 3}};
    auto split = landscape_of(Topology::from_edges(4, e), {0.1, 0.2, 0.3, 0.4});
    LandscapeView sv(split, noise::None{}, 0);
    CHECK_THROWS_AS(rwa(sv, 100, 5, 0), DataError);
}

TEST_CASE("search tree export") {
    auto l = landscape_of(Topology::complete(5), {0.5, 0.4, 0.1, 0.3, 0.2});
    LandscapeView view(l, noise::None{}, 0);
    const auto ex = export_search_tree(view, 1);
    REQUIRE(ex.trees.size() == 1);
    CHECK(ex.trees[0]["min_id"] == 2);
    CHECK(ex.trees[0]["children"].size() == 4);
    for (const auto& c : ex.trees[0]["children"]) {
        CHECK(c["children"].empty());
        CHECK(c["depth"] == 1);
    }
    CHECK(ex.dot[0].find("n0 -> n2") != std::string::npos);
    CHECK_FALSE(ex.warning.has_value());

    auto t = std::make_shared<const Topology>(Topology::clique_power(3, 3));
    auto u = std::make_shared<const Landscape>(sample_uniform(t, 3));
    LandscapeView uv(u, noise::None{}, 0);
    const auto minima = find_local_minima(uv);
    const auto all = export_search_tree(uv, 1000);
    CHECK(all.warning.has_value());
    CHECK(all.trees.size() == minima.size());
    std::size_t nodes = 0;
    auto count = [&](auto& self, const nlohmann::json& node) -> void {
        ++nodes;
        for (const auto& c : node["children"]) {
            self(self, c);
        }
    };
    for (const auto& tree : all.trees) {
        count(count, tree);
    }
    CHECK(nodes == 27);
    // Lowest-loss minima first.
    for (std::size_t i = 1; i < all.trees.size(); ++i) {
        CHECK(all.trees[i]["loss"].get<double>() >= all.trees[i - 1]["loss"].get<double>());
    }
    CHECK_THROWS_AS(export_search_tree(uv, 0), ArgumentError);
}

TEST_CASE("base-loss global reference") {
    auto l = landscape_of(Topology::complete(3), {0.1, 0.2, 0.3});
    LandscapeView view(l, noise::None{}, 0);
    const auto obs = basins(view, GlobalReference::Observed);
    const auto base = basins(view, GlobalReference::Base);
    CHECK(obs.stats.global_min == 0);
    CHECK(base.stats.global_min == 0);
    CHECK(base.stats.fraction_reaching_global_min == 1.0);
}

}  // TEST_SUITE
