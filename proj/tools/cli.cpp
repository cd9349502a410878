#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "lsland/analysis.hpp"
#include "lsland/csv.hpp"
#include "lsland/error.hpp"
#include "lsland/fit.hpp"
#include "lsland/landscape.hpp"
#include "lsland/pdf.hpp"
#include "lsland/search.hpp"
#include "lsland/theory.hpp"
#include "lsland/topology.hpp"
#include "lsland/view.hpp"

#ifndef LSCAPE_VERSION
#define LSCAPE_VERSION "0.0.0"
#endif

namespace lscape {
namespace {

using nlohmann::json;
using namespace lsland;
namespace fs = std::filesystem;

const std::vector<std::string> kCommands = {"gen",   "search", "analyze", "rwa",
                                            "theory", "fit",   "compare"};

struct Options {
    // global
    std::uint64_t seed = 0;
    std::string out = ".";
    std::string config;
    unsigned jobs = 1;

    // shared between several commands
    std::string landscape;
    std::string topo;
    std::string noise = "none";
    double eps_max = 0.1;
    std::size_t eps_count = 101;
    std::vector<double> epsilons;
    std::size_t walk_len = 100000;
    std::size_t max_lag = 20;

    // gen
    std::string model = "uniform";
    std::string name = "landscape";

    // search
    std::string algo = "local";
    std::size_t budget = 300;
    unsigned num_initial = 1;
    std::size_t trials = 1;
    bool no_restart = false;

    // analyze
    std::string global_ref = "observed";
    std::size_t export_tree = 0;

    // theory
    std::string pdf_n = "uniform";
    std::string pdf_e = "uniform";
    std::size_t s = 0;
    std::size_t n = 0;
    std::vector<double> b;
    std::optional<double> b_beyond;
    double ell_star = 0.0;
    std::size_t max_k = 5;
    std::size_t points = 2048;
    std::string rule = "simpson";
    std::string closed_form = "none";
    std::size_t x_count = 21;
    double sigma_noise = 0.0;
    double delta = 1e-3;

    // fit
    std::string mode = "histogram";
    std::string rwa;
    std::vector<double> candidates;
    double root_center = 0.25;
    double root_sigma = 0.18;

    // compare
    std::string sim;
    std::string theory;
};

struct OutputFile {
    std::string name;
    std::string body;
};

struct Result {
    std::vector<OutputFile> files;
    json resolved = json::object();
    std::vector<std::string> notes;
};

// ---------------------------------------------------------------- helpers

std::string csv_body(const std::vector<std::string>& header,
                     const std::vector<std::vector<std::string>>& rows) {
    std::ostringstream os;
    for (std::size_t i = 0; i < header.size(); ++i) {
        os << (i ? "," : "") << header[i];
    }
    os << '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            os << (i ? "," : "") << row[i];
        }
        os << '\n';
    }
    return os.str();
}

std::string fmt(double x) { return format_double(x); }
std::string fmt(std::size_t x) { return std::to_string(x); }

std::string json_body(const json& j) { return j.dump(2) + "\n"; }

std::shared_ptr<const Landscape> open_landscape(const Options& o) {
    if (o.landscape.empty()) {
        throw ArgumentError("--landscape is required");
    }
    if (o.topo.empty()) {
        return std::make_shared<const Landscape>(load_landscape(o.landscape));
    }
    auto topology = std::make_shared<const Topology>(parse_topology_spec(o.topo));
    std::ifstream in(o.landscape);
    if (!in) {
        throw DataError("cannot open " + o.landscape);
    }
    Landscape l = load_tabular(in, std::move(topology), o.landscape);
    l.meta = {{"source", o.landscape}};
    return std::make_shared<const Landscape>(std::move(l));
}

std::vector<double> epsilon_grid(const Options& o) {
    std::vector<double> eps = o.epsilons;
    if (eps.empty()) {
        if (o.eps_count < 2 || !(o.eps_max > 0.0) || !std::isfinite(o.eps_max)) {
            throw ArgumentError("epsilon grid needs --eps-count >= 2 and --eps-max > 0");
        }
        for (std::size_t i = 0; i < o.eps_count; ++i) {
            eps.push_back(o.eps_max * static_cast<double>(i) /
                          static_cast<double>(o.eps_count - 1));
        }
    }
    for (std::size_t i = 0; i < eps.size(); ++i) {
        if (!std::isfinite(eps[i]) || eps[i] < 0.0 || (i && eps[i] <= eps[i - 1])) {
            throw ArgumentError("epsilons must be finite, >= 0 and strictly ascending");
        }
    }
    return eps;
}

std::string curve_body(const std::vector<CurvePoint>& curve, const std::string& column) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& p : curve) {
        rows.push_back({fmt(p.epsilon), fmt(p.fraction)});
    }
    return csv_body({"epsilon", column}, rows);
}

CsvTable read_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open " + path);
    }
    return read_csv(in);
}

std::vector<double> numeric_column(const CsvTable& t, const std::string& column,
                                   const std::string& path) {
    const auto idx = t.column(column);
    if (!idx) {
        throw DataError(path + ": missing column " + column);
    }
    std::vector<double> values;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        auto v = *idx < row.size() ? parse_double(row[*idx]) : std::nullopt;
        if (!v) {
            throw DataError(path + ":" + std::to_string(t.line_numbers[r]) +
                            ": bad value in column " + column);
        }
        values.push_back(*v);
    }
    return values;
}

// ---------------------------------------------------------------- commands

Result cmd_gen(const Options& o) {
    if (o.topo.empty()) {
        throw ArgumentError("--topo is required");
    }
    if (o.name.empty() || o.name.find('/') != std::string::npos) {
        throw ArgumentError("--name must be a plain file stem");
    }
    auto topology = std::make_shared<const Topology>(parse_topology_spec(o.topo));

    const auto colon = o.model.find(':');
    const std::string kind = o.model.substr(0, colon);
    std::vector<double> params;
    if (colon != std::string::npos) {
        for (const auto& field : split_fields(o.model.substr(colon + 1))) {
            auto v = parse_double(field);
            if (!v) {
                throw ArgumentError("bad number '" + field + "' in model '" + o.model + "'");
            }
            params.push_back(*v);
        }
    }

    Landscape l;
    if (kind == "uniform" && params.empty()) {
        l = sample_uniform(topology, o.seed);
    } else if (kind == "markov-tn" && (params.size() == 1 || params.size() == 3)) {
        const double center = params.size() == 3 ? params[1] : 0.25;
        const double root_sigma = params.size() == 3 ? params[2] : 0.18;
        l = sample_markov_truncnorm(topology, params[0], center, root_sigma, o.seed);
    } else if (kind == "truncnorm" && params.size() == 2) {
        l = sample_iid_truncnorm(topology, params[0], params[1], o.seed);
    } else {
        throw ArgumentError("unknown model '" + o.model +
                            "' (uniform, markov-tn:SIGMA[,CENTER,ROOT_SIGMA], truncnorm:C,S)");
    }

    Result r;
    std::ostringstream csv;
    write_landscape_csv(l, csv);
    r.files.push_back({o.name + ".csv", csv.str()});
    r.files.push_back({o.name + ".meta.json", json_body(landscape_sidecar(l))});
    r.resolved = {{"n", l.size()}, {"topology", topology->describe()}, {"meta", l.meta}};
    return r;
}

Result cmd_search(const Options& o) {
    auto land = open_landscape(o);
    const NoiseSpec noise = parse_noise_spec(o.noise);
    validate_noise(noise, land->size());

    TrialPlan plan;
    plan.algo = parse_algorithm(o.algo);
    plan.cfg.budget = o.budget;
    plan.cfg.num_initial = o.num_initial;
    plan.cfg.restart_on_convergence = !o.no_restart;
    plan.trials = o.trials;
    plan.seed = o.seed;
    plan.jobs = o.jobs;
    if (plan.trials < 1) {
        throw ArgumentError("--trials must be >= 1");
    }
    if (o.budget < 1) {
        throw ArgumentError("--budget must be >= 1");
    }

    const auto runs = run_trials(land, noise, plan);
    Result r;
    std::ostringstream csv;
    write_history_csv(runs, csv);
    json summary = summarize_runs(runs);
    summary["algo"] = to_string(plan.algo);
    r.files.push_back({"history.csv", csv.str()});
    r.files.push_back({"summary.json", json_body(summary)});
    for (const auto& w : summary["warnings"]) {
        r.notes.push_back(w.get<std::string>());
    }
    r.resolved = {{"n", land->size()}, {"noise", describe(noise)}};
    return r;
}

Result cmd_analyze(const Options& o) {
    auto land = open_landscape(o);
    const NoiseSpec noise = parse_noise_spec(o.noise);
    if (!is_frozen(noise)) {
        throw ArgumentError("analyze needs a frozen noise mode, '" + o.noise +
                            "' redraws on every query");
    }
    validate_noise(noise, land->size());
    GlobalReference ref;
    if (o.global_ref == "observed") {
        ref = GlobalReference::Observed;
    } else if (o.global_ref == "base") {
        ref = GlobalReference::Base;
    } else {
        throw ArgumentError("--global-ref must be observed or base");
    }
    const auto eps = epsilon_grid(o);

    LandscapeView view(land, noise, o.seed);
    const BasinResult basin = basins(view, ref);
    const auto& st = basin.stats;
    const auto curve = within_epsilon_curve(view, eps);

    Result r;
    r.files.push_back(
        {"stats.csv",
         csv_body({"metric", "value"},
                  {{"n", fmt(st.n)},
                   {"num_local_minima", fmt(st.num_local_minima)},
                   {"avg_iterations", fmt(st.avg_iterations)},
                   {"global_min", fmt(static_cast<std::size_t>(st.global_min))},
                   {"fraction_reaching_global_min", fmt(st.fraction_reaching_global_min)},
                   {"pct_global_basin", fmt(100.0 * st.fraction_reaching_global_min)}})});
    r.files.push_back({"curve.csv", curve_body(curve, "fraction")});

    std::map<std::size_t, std::size_t> histogram;
    for (const auto& bs : st.basin_sizes) {
        ++histogram[bs.size];
    }
    std::vector<std::vector<std::string>> rows;
    for (const auto& [size, count] : histogram) {
        rows.push_back({fmt(size), fmt(count)});
    }
    r.files.push_back({"basins.csv", csv_body({"basin_size", "count"}, rows)});

    if (o.export_tree > 0) {
        const TreeExport trees = export_search_tree(view, o.export_tree);
        for (std::size_t i = 0; i < trees.minima.size(); ++i) {
            const std::string stem = "tree_" + std::to_string(i + 1);
            r.files.push_back({stem + ".json", json_body(trees.trees[i])});
            r.files.push_back({stem + ".dot", trees.dot[i]});
        }
        if (trees.warning) {
            r.notes.push_back(*trees.warning);
        }
    }
    r.resolved = {{"n", land->size()}, {"noise", describe(noise)}, {"epsilons", eps}};
    return r;
}

Result cmd_rwa(const Options& o) {
    auto land = open_landscape(o);
    const NoiseSpec noise = parse_noise_spec(o.noise);
    validate_noise(noise, land->size());
    LandscapeView view(land, noise, o.seed);
    const auto pts = rwa(view, o.walk_len, o.max_lag, o.seed);

    std::vector<std::vector<std::string>> rows;
    for (const auto& p : pts) {
        rows.push_back({fmt(p.lag), fmt(p.sqrt_lag), fmt(p.rho)});
    }
    Result r;
    r.files.push_back({"rwa.csv", csv_body({"lag", "sqrt_lag", "rho"}, rows)});
    r.resolved = {{"n", land->size()}, {"noise", describe(noise)}};
    return r;
}

Result cmd_theory(const Options& o) {
    const PdfSpec pdf_n = parse_pdf_spec(o.pdf_n);
    const LocalPdfSpec pdf_e = parse_local_pdf_spec(o.pdf_e);

    TheoryParams params;
    if (!o.topo.empty()) {
        params = TheoryParams::from_topology(parse_topology_spec(o.topo));
    }
    if (o.s) {
        params.s = o.s;
    }
    if (o.n) {
        params.n = o.n;
    }
    if (!o.b.empty()) {
        params.b = {1.0};
        params.b.insert(params.b.end(), o.b.begin(), o.b.end());
    }
    if (o.b_beyond) {
        params.b_beyond = *o.b_beyond;
    }
    params.ell_star = o.ell_star;
    params.validate();

    QuadratureOptions q;
    q.points = o.points;
    q.rule = parse_rule(o.rule);
    q.max_k = o.max_k;
    if (q.max_k < 1) {
        throw ArgumentError("--max-k must be >= 1");
    }
    if (o.x_count < 2) {
        throw ArgumentError("--x-count must be >= 2");
    }

    const bool closed = o.closed_form == "uniform";
    if (!closed && o.closed_form != "none") {
        throw ArgumentError("--closed-form must be none or uniform");
    }
    if (closed && (pdf_n.kind() != PdfSpec::Kind::Uniform01 || !pdf_e.is_independent() ||
                   pdf_e.g().kind() != PdfSpec::Kind::Uniform01)) {
        throw ArgumentError("--closed-form uniform needs --pdf-n uniform and --pdf-e uniform");
    }
    const auto eps = epsilon_grid(o);
    const double n = static_cast<double>(params.n);

    double fraction;
    std::vector<CurvePoint> curve;
    std::optional<PreimageTable> table;
    if (closed) {
        fraction = uniform_closed_form_minima(params.n, params.s) / n;
        curve = uniform_closed_form_curve(params, eps);
    } else {
        fraction = expected_minima_fraction(pdf_n, pdf_e, params.s, q, params.ell_star);
        curve = success_curve(pdf_n, pdf_e, params, eps, q);
        table.emplace(pdf_e, params, q);
    }

    std::vector<double> xs;
    for (std::size_t i = 0; i < o.x_count; ++i) {
        xs.push_back(params.ell_star + (1.0 - params.ell_star) * static_cast<double>(i) /
                                           static_cast<double>(o.x_count - 1));
    }
    std::vector<std::vector<std::string>> pre_rows;
    for (double x : xs) {
        for (std::size_t k = 1; k <= q.max_k; ++k) {
            const double v = closed ? independent_closed_form(PdfSpec::uniform(), params, x, k)
                                    : table->value(x, k);
            pre_rows.push_back({fmt(x), fmt(k), fmt(v)});
        }
    }

    Result r;
    r.files.push_back({"minima.csv", csv_body({"metric", "value"},
                                              {{"expected_minima_fraction", fmt(fraction)},
                                               {"expected_minima", fmt(fraction * n)}})});
    r.files.push_back({"curve.csv", curve_body(curve, "fraction_theory")});
    r.files.push_back({"preimages.csv", csv_body({"x", "k", "expected_size"}, pre_rows)});

    if (pdf_e.is_independent()) {
        std::vector<std::vector<std::string>> rows;
        for (double x : xs) {
            const double g_val = pdf_e.g().tail(x);
            const auto bounds = full_preimage_bounds(g_val, params.s);
            rows.push_back({fmt(x), fmt(g_val), fmt(full_preimage_series(pdf_e.g(), params, x)),
                            fmt(bounds.lower), fmt(bounds.upper)});
        }
        r.files.push_back(
            {"bounds.csv", csv_body({"x", "g_val", "series", "lower", "upper"}, rows)});
    }
    if (o.sigma_noise > 0.0) {
        const auto cb =
            chebyshev_minima_bound(pdf_n, pdf_e, params.s, o.sigma_noise, params.n, o.delta, q);
        r.files.push_back({"chebyshev.csv", csv_body({"metric", "value"},
                                                     {{"sigma", fmt(o.sigma_noise)},
                                                      {"delta", fmt(cb.delta)},
                                                      {"integral", fmt(cb.integral)},
                                                      {"bound", fmt(cb.value)},
                                                      {"vacuous", cb.vacuous ? "1" : "0"}})});
    } else if (o.sigma_noise < 0.0 || !std::isfinite(o.sigma_noise)) {
        throw ArgumentError("--sigma-noise must be finite and >= 0");
    }

    r.resolved = {{"n", params.n},
                  {"s", params.s},
                  {"b", params.b},
                  {"b_beyond", params.b_beyond},
                  {"ell_star", params.ell_star},
                  {"pdf_n", pdf_n.to_json()},
                  {"pdf_e", pdf_e.to_json()},
                  {"epsilons", eps}};
    return r;
}

Result cmd_fit(const Options& o) {
    Result r;
    if (o.mode == "histogram") {
        if (o.landscape.empty() || !o.rwa.empty()) {
            throw ArgumentError("histogram fit takes --landscape (losses), not --rwa");
        }
        auto land = open_landscape(o);
        const GlobalFit f = fit_global_truncnorm(land->val_loss);
        r.files.push_back({"fit.json", json_body({{"mode", "histogram"},
                                                  {"sigma", f.sigma},
                                                  {"v", f.center},
                                                  {"objective", f.objective},
                                                  {"count", land->size()}})});
        r.resolved = {{"n", land->size()}};
        return r;
    }
    if (o.mode != "rwa") {
        throw ArgumentError("--mode must be histogram or rwa");
    }

    std::shared_ptr<const Topology> topology;
    std::vector<RwaPoint> observed;
    if (!o.rwa.empty()) {
        if (!o.topo.empty()) {
            topology = std::make_shared<const Topology>(parse_topology_spec(o.topo));
        } else if (!o.landscape.empty()) {
            topology = open_landscape(o)->topology;
        } else {
            throw ArgumentError("rwa fit needs a topology (--topo or --landscape)");
        }
        const CsvTable t = read_table(o.rwa);
        const auto lags = numeric_column(t, "lag", o.rwa);
        const auto rho = numeric_column(t, "rho", o.rwa);
        for (std::size_t i = 0; i < lags.size(); ++i) {
            if (lags[i] < 0 || lags[i] != std::floor(lags[i])) {
                throw DataError(o.rwa + ": lag must be a non-negative integer");
            }
            observed.push_back({static_cast<std::size_t>(lags[i]), std::sqrt(lags[i]), rho[i]});
        }
    } else if (!o.landscape.empty()) {
        auto land = open_landscape(o);
        topology = land->topology;
        LandscapeView view(land, noise::None{}, o.seed);
        observed = rwa(view, o.walk_len, o.max_lag, o.seed);
    } else {
        throw ArgumentError("rwa fit takes --rwa (curve CSV) or --landscape");
    }

    std::vector<double> candidates = o.candidates;
    if (candidates.empty()) {
        for (int i = 5; i <= 100; ++i) {
            candidates.push_back(i / 100.0);
        }
    }
    RwaFitOptions fo;
    fo.walk_len = o.walk_len;
    fo.root_center = o.root_center;
    fo.root_sigma = o.root_sigma;
    const LocalFit f = fit_local_sigma_via_rwa(observed, topology, candidates, o.seed, fo);
    r.files.push_back({"fit.json", json_body({{"mode", "rwa"},
                                              {"sigma_local", f.sigma},
                                              {"objective", f.objective},
                                              {"candidates", f.candidates},
                                              {"objectives", f.objectives}})});
    r.resolved = {{"topology", topology->describe()}, {"candidates", f.candidates}};
    return r;
}

Result cmd_compare(const Options& o) {
    if (o.sim.empty() || o.theory.empty()) {
        throw ArgumentError("compare needs --sim and --theory");
    }
    const CsvTable sim_t = read_table(o.sim);
    const CsvTable th_t = read_table(o.theory);
    const auto sim_eps = numeric_column(sim_t, "epsilon", o.sim);
    const auto sim_f = numeric_column(sim_t, "fraction", o.sim);
    const auto th_eps = numeric_column(th_t, "epsilon", o.theory);
    const auto th_f = numeric_column(th_t, "fraction_theory", o.theory);

    std::vector<std::string> mismatched;
    const std::size_t common = std::min(sim_eps.size(), th_eps.size());
    for (std::size_t i = 0; i < common; ++i) {
        const double tol = 1e-12 * std::max({1.0, std::abs(sim_eps[i]), std::abs(th_eps[i])});
        if (std::abs(sim_eps[i] - th_eps[i]) > tol) {
            mismatched.push_back("row " + std::to_string(i + 1) + ": " + fmt(sim_eps[i]) +
                                 " vs " + fmt(th_eps[i]));
        }
    }
    for (std::size_t i = common; i < sim_eps.size(); ++i) {
        mismatched.push_back(fmt(sim_eps[i]) + " only in " + o.sim);
    }
    for (std::size_t i = common; i < th_eps.size(); ++i) {
        mismatched.push_back(fmt(th_eps[i]) + " only in " + o.theory);
    }
    if (!mismatched.empty()) {
        std::string msg = "epsilon grids differ:";
        for (const auto& m : mismatched) {
            msg += "\n  " + m;
        }
        throw DataError(msg);
    }

    std::vector<std::vector<std::string>> rows;
    double max_gap = 0.0;
    double at = common ? sim_eps[0] : 0.0;
    for (std::size_t i = 0; i < common; ++i) {
        const double gap = sim_f[i] - th_f[i];
        if (std::abs(gap) > max_gap) {
            max_gap = std::abs(gap);
            at = sim_eps[i];
        }
        rows.push_back({fmt(sim_eps[i]), fmt(sim_f[i]), fmt(th_f[i]), fmt(gap)});
    }
    Result r;
    r.files.push_back(
        {"compare.csv", csv_body({"epsilon", "fraction_sim", "fraction_theory", "gap"}, rows)});
    r.files.push_back({"compare.json", json_body({{"points", common},
                                                  {"max_abs_gap", max_gap},
                                                  {"max_abs_gap_epsilon", at}})});
    r.notes.push_back("max |gap| = " + fmt(max_gap) + " at epsilon " + fmt(at));
    return r;
}

// ---------------------------------------------------------------- plumbing

// Config values are appended as flags unless the command line already sets
// them, so flags win. A section named after the command overrides top-level
// keys.
std::vector<std::string> merge_config(std::vector<std::string> args) {
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            path = args[i + 1];
        } else if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
        }
    }
    if (path.empty()) {
        return args;
    }
    std::ifstream in(path);
    if (!in) {
        throw ArgumentError("cannot open config file " + path);
    }
    json cfg;
    try {
        cfg = json::parse(in);
    } catch (const json::exception& e) {
        throw ArgumentError(path + ": " + e.what());
    }
    if (!cfg.is_object()) {
        throw ArgumentError(path + ": config must be a JSON object");
    }
    std::string command;
    for (const auto& a : args) {
        if (std::find(kCommands.begin(), kCommands.end(), a) != kCommands.end()) {
            command = a;
            break;
        }
    }

    std::map<std::string, json> values;
    for (const auto& [key, value] : cfg.items()) {
        if (!value.is_object()) {
            values[key] = value;
        }
    }
    if (!command.empty() && cfg.contains(command) && cfg[command].is_object()) {
        for (const auto& [key, value] : cfg[command].items()) {
            values[key] = value;
        }
    }

    auto given = [&](const std::string& flag) {
        return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
            return a == flag || a.rfind(flag + "=", 0) == 0;
        });
    };
    auto scalar = [](const json& v) {
        return v.is_string() ? v.get<std::string>() : v.dump();
    };
    std::vector<std::string> extra;
    for (const auto& [key, value] : values) {
        std::string flag = "--" + key;
        std::replace(flag.begin() + 2, flag.end(), '_', '-');
        if (key == "config" || given(flag)) {
            continue;
        }
        if (value.is_boolean()) {
            if (value.get<bool>()) {
                extra.push_back(flag);
            }
        } else if (value.is_array()) {
            if (!value.empty()) {
                extra.push_back(flag);
                for (const auto& e : value) {
                    extra.push_back(scalar(e));
                }
            }
        } else if (!value.is_null()) {
            extra.push_back(flag);
            extra.push_back(scalar(value));
        }
    }
    args.insert(args.end(), extra.begin(), extra.end());
    return args;
}

json typed(const std::string& text) {
    if (text == "true") {
        return true;
    }
    if (text == "false") {
        return false;
    }
    std::uint64_t u = 0;
    auto [pu, eu] = std::from_chars(text.data(), text.data() + text.size(), u);
    if (eu == std::errc() && pu == text.data() + text.size()) {
        return u;
    }
    if (auto d = parse_double(text); d && std::isfinite(*d)) {
        return *d;
    }
    return text;
}

void record_options(const CLI::App& app, json& into) {
    for (const CLI::Option* opt : app.get_options()) {
        const auto& names = opt->get_lnames();
        if (names.empty() || names.front() == "help" || names.front() == "version") {
            continue;
        }
        std::string key = names.front();
        std::replace(key.begin(), key.end(), '-', '_');
        if (opt->get_expected_min() == 0) {
            into[key] = opt->count() > 0;
            continue;
        }
        const bool many = opt->get_items_expected_max() > 1;
        std::vector<std::string> values;
        if (opt->count() > 0) {
            values = opt->results();
        } else if (!many && !opt->get_default_str().empty()) {
            values = {opt->get_default_str()};
        }
        if (many) {
            json arr = json::array();
            for (const auto& v : values) {
                arr.push_back(typed(v));
            }
            into[key] = arr;
        } else {
            into[key] = values.empty() ? json(nullptr) : typed(values.front());
        }
    }
}

std::string utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

void write_file(const fs::path& path, const std::string& body) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) {
            throw DataError("cannot write " + tmp.string());
        }
        out << body;
        if (!out.flush()) {
            throw DataError("write failed for " + tmp.string());
        }
    }
    fs::rename(tmp, path);
}

void add_landscape_flags(CLI::App* sub, Options& o) {
    sub->add_option("--landscape", o.landscape, "Landscape CSV (sidecar next to it)");
    sub->add_option("--topo", o.topo, "Topology for a CSV without sidecar");
}

void add_noise_flag(CLI::App* sub, Options& o) {
    sub->add_option("--noise", o.noise,
                    "none | gaussian:S | gaussian-fresh:S | seed-average:S,K | "
                    "uniform-replace | scaled:X,SIGMA");
}

void add_eps_flags(CLI::App* sub, Options& o) {
    sub->add_option("--eps-max", o.eps_max, "Largest epsilon of the default grid");
    sub->add_option("--eps-count", o.eps_count, "Points in the default grid");
    sub->add_option("--epsilons", o.epsilons, "Explicit ascending epsilon grid");
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Local-search landscapes: generate, search, analyze and compare with theory",
                 "lscape"};
    app.option_defaults()->always_capture_default();
    app.require_subcommand(1);
    app.set_version_flag("--version", LSCAPE_VERSION);
    app.add_option("--seed", o.seed, "Root seed");
    app.add_option("--out", o.out, "Output directory");
    app.add_option("--config", o.config, "JSON file mirroring flag names");
    app.add_option("--jobs", o.jobs, "Parallel trials")->check(CLI::PositiveNumber);

    std::map<std::string, CLI::App*> subs;
    auto add = [&](const std::string& name, const std::string& help) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->fallthrough();
        subs[name] = sub;
        return sub;
    };

    auto* gen = add("gen", "Generate a synthetic landscape");
    gen->add_option("--topo", o.topo, "clique-power:M,D | complete:N | tree:A,H | adjacency:PATH");
    gen->add_option("--model", o.model, "uniform | markov-tn:SIGMA[,CENTER,ROOT_SIGMA] | truncnorm:C,S");
    gen->add_option("--name", o.name, "Output file stem");

    auto* search = add("search", "Run budgeted searches over many trials");
    add_landscape_flags(search, o);
    add_noise_flag(search, o);
    search->add_option("--algo", o.algo, "local | local-qul | local-cam | random");
    search->add_option("--budget", o.budget, "Distinct queries per trial");
    search->add_option("--num-initial", o.num_initial, "Random starts per restart");
    search->add_option("--trials", o.trials, "Independent trials");
    search->add_flag("--no-restart", o.no_restart, "Stop at the first local minimum");

    auto* analyze = add("analyze", "Exhaustive landscape statistics");
    add_landscape_flags(analyze, o);
    add_noise_flag(analyze, o);
    add_eps_flags(analyze, o);
    analyze->add_option("--global-ref", o.global_ref, "observed | base");
    analyze->add_option("--export-tree", o.export_tree, "Export preimage trees of the k best minima");

    auto* rwa_cmd = add("rwa", "Random-walk autocorrelation");
    add_landscape_flags(rwa_cmd, o);
    add_noise_flag(rwa_cmd, o);
    rwa_cmd->add_option("--walk-len", o.walk_len, "Walk length");
    rwa_cmd->add_option("--max-lag", o.max_lag, "Largest lag");

    auto* theory = add("theory", "Evaluate the expected-performance formulas");
    theory->add_option("--pdf-n", o.pdf_n, "uniform | truncnorm:C,S | tabulated:PATH");
    theory->add_option("--pdf-e", o.pdf_e, "uniform | truncnorm-local:S | independent:<pdf>");
    theory->add_option("--topo", o.topo, "Topology providing n, s and b");
    theory->add_option("--s", o.s, "Degree");
    theory->add_option("--n", o.n, "Number of nodes");
    theory->add_option("--b", o.b, "Branching fractions b_1, b_2, ...");
    theory->add_option("--b-beyond", o.b_beyond, "Branching fraction past the listed ones");
    theory->add_option("--ell-star", o.ell_star, "Global minimum loss");
    theory->add_option("--max-k", o.max_k, "Deepest preimage level");
    theory->add_option("--points", o.points, "Quadrature grid points");
    theory->add_option("--rule", o.rule, "simpson | trapezoid");
    theory->add_option("--closed-form", o.closed_form, "none | uniform");
    theory->add_option("--x-count", o.x_count, "Points of the x grid for preimage tables");
    theory->add_option("--sigma-noise", o.sigma_noise, "Noise level for the Chebyshev bound");
    theory->add_option("--delta", o.delta, "Diagonal band excluded by the Chebyshev bound");
    add_eps_flags(theory, o);

    auto* fit = add("fit", "Fit global or local densities");
    add_landscape_flags(fit, o);
    fit->add_option("--mode", o.mode, "histogram | rwa");
    fit->add_option("--rwa", o.rwa, "Observed lag,sqrt_lag,rho CSV");
    fit->add_option("--candidates", o.candidates, "Local sigma candidates");
    fit->add_option("--walk-len", o.walk_len, "Walk length");
    fit->add_option("--max-lag", o.max_lag, "Largest lag when measuring --landscape");
    fit->add_option("--root-center", o.root_center, "Root density center");
    fit->add_option("--root-sigma", o.root_sigma, "Root density sigma");

    auto* compare = add("compare", "Join a simulated and a theoretical curve");
    compare->add_option("--sim", o.sim, "epsilon,fraction CSV");
    compare->add_option("--theory", o.theory, "epsilon,fraction_theory CSV");

    try {
        std::vector<std::string> args = merge_config(raw_args);
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    } catch (const lsland::Error& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }

    std::string command;
    for (const auto& [name, sub] : subs) {
        if (sub->parsed()) {
            command = name;
        }
    }

    try {
        Result r;
        if (command == "gen") {
            r = cmd_gen(o);
        } else if (command == "search") {
            r = cmd_search(o);
        } else if (command == "analyze") {
            r = cmd_analyze(o);
        } else if (command == "rwa") {
            r = cmd_rwa(o);
        } else if (command == "theory") {
            r = cmd_theory(o);
        } else if (command == "fit") {
            r = cmd_fit(o);
        } else {
            r = cmd_compare(o);
        }

        json config = json::object();
        record_options(app, config);
        record_options(*subs[command], config);
        json files = json::array();
        for (const auto& f : r.files) {
            files.push_back(f.name);
        }
        const json manifest = {{"tool", "lscape"},
                               {"version", LSCAPE_VERSION},
                               {"command", command},
                               {"timestamp", utc_now()},
                               {"config", config},
                               {"resolved", r.resolved},
                               {"outputs", files}};

        const fs::path dir(o.out);
        fs::create_directories(dir);
        write_file(dir / "manifest.json", json_body(manifest));
        for (const auto& f : r.files) {
            write_file(dir / f.name, f.body);
        }
        for (const auto& note : r.notes) {
            err << "note: " << note << '\n';
        }
        out << command << ": wrote " << r.files.size() << " file(s) to " << dir.string() << '\n';
        return 0;
    } catch (const lsland::ArgumentError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 3;
    }
}

}  // namespace lscape
