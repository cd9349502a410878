#pragma once

// Hill-climbing local search, its variants, budgeted restarts and a random
// search baseline.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lsland/view.hpp"

namespace lsland {

struct SearchConfig {
    bool query_until_lower = false;
    bool continue_at_min = false;
    unsigned num_initial = 1;
    // Cap on the view's query counter (distinct nodes observed).
    std::size_t budget = 300;
    bool restart_on_convergence = true;

    void validate() const;
};

struct Visit {
    NodeId node;
    double loss;
};

struct SearchTrace {
    // Every evaluation made by this search, in order, starting with the start.
    std::vector<Visit> visited;
    // Occupied nodes: the start followed by each accepted move or jump.
    std::vector<Visit> path;
    NodeId final_node = 0;
    // Strictly improving moves.
    std::size_t iterations = 0;
    // continue_at_min jumps to the best unexpanded node.
    std::size_t jumps = 0;
    bool converged = false;
    bool budget_exhausted = false;
};

// Runs Algorithm 1 from `start` against `view`. Moves require a strictly lower
// loss; among equal improving neighbors the lowest id wins. Evaluation stops
// as soon as view.queries() reaches cfg.budget.
SearchTrace local_search(LandscapeView& view, NodeId start, const SearchConfig& cfg);

struct QueryRecord {
    std::size_t query;  // 1-based
    NodeId node;
    double val_loss;
    double best_val;
    double best_test;  // NaN when the landscape has no test losses
};

struct RunHistory {
    std::vector<QueryRecord> records;
    std::size_t restarts = 0;
    std::vector<std::string> warnings;

    double final_best() const;
};

// Draws num_initial distinct unevaluated starts (uniform), evaluates them and
// climbs from the best. With restart_on_convergence it starts over until the
// budget is spent or the graph is exhausted. Restarts share the view cache.
RunHistory run_budgeted(LandscapeView& view, const SearchConfig& cfg, std::uint64_t seed);

// `budget` distinct uniform random nodes. A budget above n is capped at n and
// a warning is recorded.
RunHistory random_search(LandscapeView& view, std::size_t budget, std::uint64_t seed);

// Builds the per-query records from the view's log, starting at log index
// `from`.
RunHistory history_from_log(const LandscapeView& view, std::size_t from = 0);

enum class Algorithm { Local, QueryUntilLower, ContinueAtMin, Random };

Algorithm parse_algorithm(const std::string& name);
std::string to_string(Algorithm algo);

struct TrialPlan {
    Algorithm algo = Algorithm::Local;
    SearchConfig cfg;
    std::size_t trials = 1;
    std::uint64_t seed = 0;
    unsigned jobs = 1;
};

// Trial i uses seed mix64(plan.seed, i) for its view; results come back in
// trial order regardless of jobs.
std::vector<RunHistory> run_trials(std::shared_ptr<const Landscape> landscape,
                                   const NoiseSpec& noise, const TrialPlan& plan);

// `trial,query,node,val_loss,best_val,best_test`
void write_history_csv(const std::vector<RunHistory>& runs, std::ostream& out);

// Mean and standard deviation of best-so-far per query index.
nlohmann::json summarize_runs(const std::vector<RunHistory>& runs);

}  // namespace lsland
