#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "lsland/analysis.hpp"
#include "lsland/csv.hpp"
#include "lsland/error.hpp"
#include "lsland/search.hpp"

using namespace lsland;

namespace {

std::shared_ptr<const Landscape> landscape_of(Topology t, std::vector<double> losses) {
    Landscape l;
    l.topology = std::make_shared<const Topology>(std::move(t));
    l.val_loss = std::move(losses);
    return std::make_shared<const Landscape>(std::move(l));
}

Topology four_cycle() {
    const std::vector<std::pair<NodeId, NodeId>> e{{0, 1}, {1, 2}, {2, 3}, {3, 0}};
    return Topology::from_edges(4, e);
}

SearchConfig basic(std::size_t budget = 1000000) {
    SearchConfig c;
    c.budget = budget;
    return c;
}

void check_certificate(LandscapeView& view, NodeId v) {
    const double lv = view.observe(v);
    for (NodeId u : view.topology().neighbors(v)) {
        CHECK(view.observe(u) >= lv);
    }
}

}  // namespace

TEST_SUITE("search") {

TEST_CASE("hand-traced 4-cycle") {
    auto l = landscape_of(four_cycle(), {0.1, 0.5, 0.2, 0.7});
    LandscapeView view(l, noise::None{}, 0);
    const auto tr = local_search(view, 1, basic());
    CHECK(tr.converged);
    CHECK(tr.final_node == 0);
    CHECK(tr.iterations == 1);
    REQUIRE(tr.path.size() == 2);
    CHECK(tr.path[0].node == 1);
    CHECK(tr.path[1].node == 0);
}

TEST_CASE("single node converges immediately") {
    auto l = landscape_of(Topology::complete(1), {0.4});
    LandscapeView view(l, noise::None{}, 0);
    const auto tr = local_search(view, 0, basic());
    CHECK(tr.converged);
    CHECK(tr.iterations == 0);
    REQUIRE(tr.visited.size() == 1);
    CHECK(tr.visited[0].node == 0);
    CHECK(tr.visited[0].loss == 0.4);
}

TEST_CASE("complete graph reaches the global argmin in one step") {
    auto t = std::make_shared<const Topology>(Topology::complete(9));
    auto l = std::make_shared<const Landscape>(sample_uniform(t, 5));
    const auto best = static_cast<NodeId>(
        std::min_element(l->val_loss.begin(), l->val_loss.end()) - l->val_loss.begin());
    for (NodeId s = 0; s < 9; ++s) {
        LandscapeView view(l, noise::None{}, 0);
        const auto tr = local_search(view, s, basic());
        CHECK(tr.final_node == best);
        CHECK(tr.iterations == (s == best ? 0u : 1u));
    }
}

TEST_CASE("ties do not move and lowest id wins among equal improvements") {
    auto flat = landscape_of(Topology::complete(4), {0.5, 0.5, 0.5, 0.5});
    LandscapeView v1(flat, noise::None{}, 0);
    CHECK(local_search(v1, 2, basic()).final_node == 2);

    auto tie = landscape_of(Topology::complete(4), {0.9, 0.1, 0.5, 0.1});
    LandscapeView v2(tie, noise::None{}, 0);
    CHECK(local_search(v2, 0, basic()).final_node == 1);
    LandscapeView v3(tie, noise::None{}, 0);
    const auto t3 = local_search(v3, 3, basic());
    CHECK(t3.final_node == 3);
    CHECK(t3.iterations == 0);
}

TEST_CASE("basic search: determinism, descent, certificate, agreement with basins") {
    auto t = std::make_shared<const Topology>(Topology::clique_power(4, 4));
    auto l = std::make_shared<const Landscape>(sample_markov_truncnorm(t, 0.2, 0.3, 0.2, 4));
    LandscapeView frozen(l, noise::GaussianFrozen{0.02}, 5);
    const auto b = basins(frozen);
    for (NodeId s = 0; s < t->size(); ++s) {
        const auto run1 = local_search(frozen, s, basic());
        const auto run2 = local_search(frozen, s, basic());
        CHECK(run1.final_node == run2.final_node);
        CHECK(run1.iterations == run2.iterations);
        CHECK(run1.converged);
        CHECK(run1.final_node == b.assignment[s]);
        CHECK(run1.iterations == b.steps[s]);
        for (std::size_t i = 1; i < run1.path.size(); ++i) {
            CHECK(run1.path[i].loss < run1.path[i - 1].loss);
        }
        check_certificate(frozen, run1.final_node);
    }
}

TEST_CASE("query-until-lower descends and satisfies the certificate") {
    auto t = std::make_shared<const Topology>(Topology::clique_power(5, 4));
    auto l = std::make_shared<const Landscape>(sample_uniform(t, 10));
    SearchConfig cfg = basic();
    cfg.query_until_lower = true;
    std::set<NodeId> finals;
    for (NodeId s = 0; s < 200; ++s) {
        LandscapeView view(l, noise::None{}, s);
        const auto tr = local_search(view, s, cfg);
        CHECK(tr.converged);
        for (std::size_t i = 1; i < tr.path.size(); ++i) {
            CHECK(tr.path[i].loss < tr.path[i - 1].loss);
        }
        check_certificate(view, tr.final_node);
        finals.insert(tr.final_node);
    }
    CHECK(finals.size() > 1);
}

TEST_CASE("budget stops mid-neighbourhood without a partial move") {
    auto l = landscape_of(four_cycle(), {0.1, 0.5, 0.2, 0.7});
    LandscapeView view(l, noise::None{}, 0);
    const auto tr = local_search(view, 1, basic(2));
    CHECK(tr.budget_exhausted);
    CHECK(tr.final_node == 1);
    CHECK(view.queries() == 2);
    CHECK_THROWS_AS(local_search(view, 9, basic()), RangeError);
    SearchConfig bad;
    bad.budget = 0;
    CHECK_THROWS_AS(local_search(view, 0, bad), ArgumentError);
}

TEST_CASE("continue-at-min keeps searching until the budget is spent") {
    auto t = std::make_shared<const Topology>(Topology::clique_power(5, 6));
    auto l = std::make_shared<const Landscape>(sample_uniform(t, 3));
    SearchConfig cfg = basic(500);
    cfg.continue_at_min = true;
    LandscapeView view(l, noise::None{}, 1);
    const auto tr = local_search(view, 0, cfg);
    CHECK(tr.budget_exhausted);
    CHECK(view.queries() == 500);
    CHECK(tr.jumps > 0);

    // Exhausting a small graph ends with the global minimum evaluated.
    auto small = std::make_shared<const Landscape>(sample_uniform(
        std::make_shared<const Topology>(Topology::clique_power(3, 2)), 8));
    LandscapeView sv(small, noise::None{}, 0);
    cfg.budget = 1000;
    const auto full = local_search(sv, 4, cfg);
    CHECK(full.converged);
    CHECK(sv.queries() == 9);
}

TEST_CASE("budgeted runs") {
    auto t = std::make_shared<const Topology>(Topology::clique_power(5, 6));
    auto l = std::make_shared<const Landscape>(sample_uniform(t, 3));
    {
        LandscapeView view(l, noise::None{}, 1);
        SearchConfig cfg = basic(1);
        const auto h = run_budgeted(view, cfg, 1);
        REQUIRE(h.records.size() == 1);
        CHECK(h.records[0].best_val == h.records[0].val_loss);
    }
    {
        SearchConfig cfg = basic(100);
        cfg.num_initial = 100;
        LandscapeView a(l, noise::None{}, 1);
        LandscapeView b(l, noise::None{}, 1);
        const auto h = run_budgeted(a, cfg, 9);
        const auto r = random_search(b, 100, 9);
        REQUIRE(h.records.size() == 100);
        REQUIRE(r.records.size() == 100);
        for (std::size_t i = 0; i < 100; ++i) {
            CHECK(h.records[i].node == r.records[i].node);
        }
    }
    {
        LandscapeView view(l, noise::None{}, 2);
        const auto h = run_budgeted(view, basic(300), 2);
        CHECK(h.records.size() == 300);
        CHECK(h.restarts >= 1);
        std::set<NodeId> distinct;
        for (std::size_t i = 0; i < h.records.size(); ++i) {
            distinct.insert(h.records[i].node);
            CHECK(h.records[i].query == i + 1);
            if (i > 0) {
                CHECK(h.records[i].best_val <= h.records[i - 1].best_val);
            }
        }
        CHECK(distinct.size() == 300);
    }
    SearchConfig bad = basic(3);
    bad.num_initial = 5;
    LandscapeView v(l, noise::None{}, 0);
    CHECK_THROWS_AS(run_budgeted(v, bad, 0), ArgumentError);
}

TEST_CASE("restart budget is never exceeded and small graphs are exhausted") {
    auto t = std::make_shared<const Topology>(Topology::clique_power(3, 2));
    auto l = std::make_shared<const Landscape>(sample_uniform(t, 1));
    LandscapeView view(l, noise::None{}, 0);
    const auto h = run_budgeted(view, basic(50), 3);
    CHECK(h.records.size() == 9);
}

TEST_CASE("random search") {
    auto t = std::make_shared<const Topology>(Topology::complete(20));
    auto l = std::make_shared<const Landscape>(sample_uniform(t, 2));
    LandscapeView exhaustive(l, noise::None{}, 0);
    const auto h = random_search(exhaustive, 20, 1);
    CHECK(h.final_best() == *std::min_element(l->val_loss.begin(), l->val_loss.end()));
    LandscapeView capped(l, noise::None{}, 0);
    const auto c = random_search(capped, 50, 1);
    CHECK(c.records.size() == 20);
    CHECK(c.warnings.size() == 1);
    LandscapeView one(l, noise::None{}, 0);
    CHECK(random_search(one, 1, 1).records.size() == 1);
}

TEST_CASE("random search order statistic: E[best of b] = 1/(b+1)") {
    auto t = std::make_shared<const Topology>(Topology::clique_power(5, 6));
    auto l = std::make_shared<const Landscape>(sample_uniform(t, 2));
    TrialPlan plan;
    plan.algo = Algorithm::Random;
    plan.cfg.budget = 9;
    plan.trials = 10000;
    plan.seed = 77;
    const auto runs = run_trials(l, noise::UniformReplace{}, plan);
    std::vector<double> best;
    for (const auto& r : runs) {
        best.push_back(r.final_best());
    }
    const double m = std::accumulate(best.begin(), best.end(), 0.0) / best.size();
    double v = 0.0;
    for (double x : best) {
        v += (x - m) * (x - m);
    }
    const double se = std::sqrt(v / (best.size() - 1) / best.size());
    CHECK(std::abs(m - 0.1) < 3 * se);
}

TEST_CASE("trial fan-out is deterministic and CSV matches the summary") {
    auto t = std::make_shared<const Topology>(Topology::clique_power(4, 4));
    auto l = std::make_shared<const Landscape>(sample_markov_truncnorm(t, 0.3, 0.25, 0.18, 1));
    TrialPlan plan;
    plan.cfg.budget = 40;
    plan.trials = 12;
    plan.seed = 5;
    plan.algo = Algorithm::QueryUntilLower;
    auto serial = run_trials(l, noise::GaussianFrozen{0.05}, plan);
    plan.jobs = 3;
    auto parallel = run_trials(l, noise::GaussianFrozen{0.05}, plan);
    std::ostringstream a, b;
    write_history_csv(serial, a);
    write_history_csv(parallel, b);
    CHECK(a.str() == b.str());
    CHECK(summarize_runs(serial).dump() == summarize_runs(parallel).dump());

    std::istringstream in(a.str());
    const auto table = read_csv(in);
    CHECK(table.header ==
          std::vector<std::string>{"trial", "query", "node", "val_loss", "best_val", "best_test"});
    CHECK(table.rows.size() == 12 * 40);
    const auto summary = summarize_runs(serial);
    for (std::size_t q = 0; q < 40; ++q) {
        double sum = 0.0;
        for (std::size_t tr = 0; tr < 12; ++tr) {
            sum += *parse_double(table.rows[tr * 40 + q][4]);
        }
        CHECK(summary["per_query"][q]["mean_best_val"].get<double>() == doctest::Approx(sum / 12));
        if (q > 0) {
            CHECK(summary["per_query"][q]["mean_best_val"].get<double>() <=
                  summary["per_query"][q - 1]["mean_best_val"].get<double>());
        }
    }
}

TEST_CASE("algorithm names") {
    CHECK(parse_algorithm("local-cam") == Algorithm::ContinueAtMin);
    CHECK(to_string(Algorithm::QueryUntilLower) == "local-qul");
    CHECK_THROWS_AS(parse_algorithm("evolution"), ArgumentError);
}

}  // TEST_SUITE
