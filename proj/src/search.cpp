#include "lsland/search.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <set>
#include <thread>
#include <unordered_set>

#include "lsland/csv.hpp"
#include "lsland/error.hpp"

namespace lsland {

namespace {

constexpr std::uint64_t kStartStream = 0x57A27ULL;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool budget_blocks(const LandscapeView& view, NodeId u, std::size_t budget) {
    return !view.is_cached(u) && view.queries() >= budget;
}

// Uniform node not yet observed through the view, or nullopt when every node
// has been observed.
std::optional<NodeId> draw_unevaluated(const LandscapeView& view, Rng& rng) {
    const std::size_t n = view.size();
    const std::size_t seen = view.queries();
    if (seen >= n) {
        return std::nullopt;
    }
    if (seen < n / 2) {
        while (true) {
            const auto u = static_cast<NodeId>(rng.index(n));
            if (!view.is_cached(u)) {
                return u;
            }
        }
    }
    auto k = rng.index(n - seen);
    for (std::size_t u = 0; u < n; ++u) {
        if (!view.is_cached(static_cast<NodeId>(u))) {
            if (k == 0) {
                return static_cast<NodeId>(u);
            }
            --k;
        }
    }
    return std::nullopt;
}

}  // namespace

void SearchConfig::validate() const {
    if (budget < 1) {
        throw ArgumentError("budget must be >= 1");
    }
    if (num_initial < 1) {
        throw ArgumentError("num_initial must be >= 1");
    }
    if (budget < num_initial) {
        throw ArgumentError("budget (" + std::to_string(budget) + ") must be >= num_initial (" +
                            std::to_string(num_initial) + ")");
    }
}

SearchTrace local_search(LandscapeView& view, NodeId start, const SearchConfig& cfg) {
    cfg.validate();
    if (start >= view.size()) {
        throw RangeError("start node " + std::to_string(start) + " out of range for n = " +
                         std::to_string(view.size()));
    }
    SearchTrace trace;
    trace.final_node = start;
    if (budget_blocks(view, start, cfg.budget)) {
        trace.budget_exhausted = true;
        return trace;
    }

    const Topology& topo = view.topology();
    std::vector<NodeId> nbrs;

    // continue_at_min: evaluated nodes that have not been occupied yet, by
    // (loss, id).
    std::set<std::pair<double, NodeId>> pool;
    std::unordered_set<NodeId> expanded;
    std::size_t cursor = 0;
    auto sync_pool = [&] {
        const auto& log = view.log();
        for (; cursor < log.size(); ++cursor) {
            const NodeId u = log[cursor];
            if (!expanded.contains(u)) {
                pool.emplace(view.peek(u), u);
            }
        }
    };

    NodeId v = start;
    double lv = view.observe(v);
    trace.visited.push_back({v, lv});
    trace.path.push_back({v, lv});

    while (true) {
        if (cfg.continue_at_min) {
            sync_pool();
            pool.erase({lv, v});
            expanded.insert(v);
        }
        topo.neighbors(v, nbrs);
        if (cfg.query_until_lower) {
            view.rng().shuffle(std::span<NodeId>(nbrs));
        }
        bool exhausted = false;
        bool found = false;
        NodeId next = v;
        double lnext = lv;
        for (NodeId u : nbrs) {
            if (budget_blocks(view, u, cfg.budget)) {
                exhausted = true;
                break;
            }
            const double lu = view.observe(u);
            trace.visited.push_back({u, lu});
            if (lu < lnext) {
                next = u;
                lnext = lu;
                found = true;
                if (cfg.query_until_lower) {
                    break;
                }
            }
        }
        if (exhausted) {
            trace.budget_exhausted = true;
            break;
        }
        if (found) {
            v = next;
            lv = lnext;
            ++trace.iterations;
            trace.path.push_back({v, lv});
            continue;
        }
        if (!cfg.continue_at_min) {
            trace.converged = true;
            break;
        }
        sync_pool();
        if (pool.empty()) {
            trace.converged = true;
            break;
        }
        const auto [loss, u] = *pool.begin();
        v = u;
        lv = loss;
        ++trace.jumps;
        trace.path.push_back({v, lv});
    }
    trace.final_node = v;
    return trace;
}

double RunHistory::final_best() const {
    return records.empty() ? kNaN : records.back().best_val;
}

RunHistory history_from_log(const LandscapeView& view, std::size_t from) {
    RunHistory h;
    const auto& log = view.log();
    const auto& test = view.landscape().test_loss;
    double best = std::numeric_limits<double>::infinity();
    double best_test = kNaN;
    h.records.reserve(log.size() > from ? log.size() - from : 0);
    for (std::size_t i = from; i < log.size(); ++i) {
        const NodeId u = log[i];
        const double l = view.peek(u);
        if (l < best) {
            best = l;
            best_test = test ? (*test)[u] : kNaN;
        }
        h.records.push_back({i - from + 1, u, l, best, best_test});
    }
    return h;
}

RunHistory run_budgeted(LandscapeView& view, const SearchConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    Rng rng(mix64(seed, kStartStream));
    const std::size_t from = view.queries();
    std::size_t runs = 0;
    while (view.queries() < cfg.budget) {
        std::optional<NodeId> best;
        double best_loss = 0.0;
        for (unsigned i = 0; i < cfg.num_initial && view.queries() < cfg.budget; ++i) {
            const auto u = draw_unevaluated(view, rng);
            if (!u) {
                break;
            }
            const double l = view.observe(*u);
            if (!best || l < best_loss || (l == best_loss && *u < *best)) {
                best = u;
                best_loss = l;
            }
        }
        if (!best) {
            break;
        }
        const SearchTrace trace = local_search(view, *best, cfg);
        ++runs;
        if (trace.budget_exhausted || !cfg.restart_on_convergence) {
            break;
        }
    }
    RunHistory h = history_from_log(view, from);
    h.restarts = runs > 0 ? runs - 1 : 0;
    return h;
}

RunHistory random_search(LandscapeView& view, std::size_t budget, std::uint64_t seed) {
    if (budget < 1) {
        throw ArgumentError("budget must be >= 1");
    }
    std::vector<std::string> warnings;
    if (budget > view.size()) {
        warnings.push_back("budget " + std::to_string(budget) + " exceeds n = " +
                           std::to_string(view.size()) + "; capped at n");
        budget = view.size();
    }
    Rng rng(mix64(seed, kStartStream));
    const std::size_t from = view.queries();
    while (view.queries() < budget) {
        const auto u = draw_unevaluated(view, rng);
        if (!u) {
            break;
        }
        view.observe(*u);
    }
    RunHistory h = history_from_log(view, from);
    h.warnings = std::move(warnings);
    return h;
}

Algorithm parse_algorithm(const std::string& name) {
    if (name == "local") {
        return Algorithm::Local;
    }
    if (name == "local-qul") {
        return Algorithm::QueryUntilLower;
    }
    if (name == "local-cam") {
        return Algorithm::ContinueAtMin;
    }
    if (name == "random") {
        return Algorithm::Random;
    }
    throw ArgumentError("unknown algorithm '" + name +
                        "' (expected local, local-qul, local-cam or random)");
}

std::string to_string(Algorithm algo) {
    switch (algo) {
        case Algorithm::Local:
            return "local";
        case Algorithm::QueryUntilLower:
            return "local-qul";
        case Algorithm::ContinueAtMin:
            return "local-cam";
        case Algorithm::Random:
            return "random";
    }
    return "?";
}

std::vector<RunHistory> run_trials(std::shared_ptr<const Landscape> landscape,
                                   const NoiseSpec& noise, const TrialPlan& plan) {
    SearchConfig cfg = plan.cfg;
    cfg.query_until_lower = plan.algo == Algorithm::QueryUntilLower;
    cfg.continue_at_min = plan.algo == Algorithm::ContinueAtMin;
    if (plan.algo == Algorithm::Random) {
        if (cfg.budget < 1) {
            throw ArgumentError("budget must be >= 1");
        }
    } else {
        cfg.validate();
    }

    std::vector<RunHistory> results(plan.trials);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= plan.trials) {
                return;
            }
            try {
                const std::uint64_t trial_seed = mix64(plan.seed, i);
                LandscapeView view(landscape, noise, trial_seed);
                results[i] = plan.algo == Algorithm::Random
                                 ? random_search(view, cfg.budget, trial_seed)
                                 : run_budgeted(view, cfg, trial_seed);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
                next.store(plan.trials);
            }
        }
    };

    const unsigned jobs = std::max(1u, std::min<unsigned>(plan.jobs, static_cast<unsigned>(
                                                                         std::max<std::size_t>(
                                                                             plan.trials, 1))));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(jobs);
        for (unsigned j = 0; j < jobs; ++j) {
            threads.emplace_back(worker);
        }
        for (auto& t : threads) {
            t.join();
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
    return results;
}

void write_history_csv(const std::vector<RunHistory>& runs, std::ostream& out) {
    out << "trial,query,node,val_loss,best_val,best_test\n";
    for (std::size_t t = 0; t < runs.size(); ++t) {
        for (const auto& r : runs[t].records) {
            out << t << ',' << r.query << ',' << r.node << ',' << format_double(r.val_loss) << ','
                << format_double(r.best_val) << ',';
            if (!std::isnan(r.best_test)) {
                out << format_double(r.best_test);
            }
            out << '\n';
        }
    }
}

nlohmann::json summarize_runs(const std::vector<RunHistory>& runs) {
    std::size_t longest = 0;
    for (const auto& r : runs) {
        longest = std::max(longest, r.records.size());
    }
    auto stats = [](const std::vector<double>& xs) {
        double mean = 0.0;
        for (double x : xs) {
            mean += x;
        }
        mean /= static_cast<double>(xs.size());
        double ss = 0.0;
        for (double x : xs) {
            ss += (x - mean) * (x - mean);
        }
        const double sd = xs.size() > 1 ? std::sqrt(ss / static_cast<double>(xs.size() - 1)) : 0.0;
        return std::pair{mean, sd};
    };

    nlohmann::json per_query = nlohmann::json::array();
    std::vector<double> column;
    for (std::size_t q = 0; q < longest; ++q) {
        column.clear();
        for (const auto& r : runs) {
            if (q < r.records.size()) {
                column.push_back(r.records[q].best_val);
            }
        }
        const auto [mean, sd] = stats(column);
        per_query.push_back(
            {{"query", q + 1}, {"trials", column.size()}, {"mean_best_val", mean}, {"std_best_val", sd}});
    }

    column.clear();
    nlohmann::json warnings = nlohmann::json::array();
    std::size_t restarts = 0;
    for (std::size_t t = 0; t < runs.size(); ++t) {
        if (!runs[t].records.empty()) {
            column.push_back(runs[t].records.back().best_val);
        }
        restarts += runs[t].restarts;
        for (const auto& w : runs[t].warnings) {
            warnings.push_back("trial " + std::to_string(t) + ": " + w);
        }
    }
    nlohmann::json final_stats = nlohmann::json::object();
    if (!column.empty()) {
        const auto [mean, sd] = stats(column);
        final_stats = {{"mean_best_val", mean}, {"std_best_val", sd}};
    }
    return {{"trials", runs.size()},
            {"max_queries", longest},
            {"total_restarts", restarts},
            {"final", final_stats},
            {"per_query", per_query},
            {"warnings", warnings}};
}

}  // namespace lsland
