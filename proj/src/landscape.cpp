#include "lsland/landscape.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include "lsland/csv.hpp"
#include "lsland/error.hpp"
#include "lsland/rng.hpp"
#include "lsland/truncnorm.hpp"

namespace lsland {

namespace {

void require_topology(const std::shared_ptr<const Topology>& topology) {
    if (!topology) {
        throw ArgumentError("landscape needs a topology");
    }
}

void check_sigma(double sigma, const char* what) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw ArgumentError(std::string(what) + " must be a positive finite number");
    }
}

}  // namespace

void Landscape::validate() const {
    if (!topology) {
        throw DataError("landscape has no topology");
    }
    if (val_loss.size() != topology->size()) {
        throw DataError("landscape has " + std::to_string(val_loss.size()) +
                        " losses for a topology of " + std::to_string(topology->size()) +
                        " nodes");
    }
    for (std::size_t v = 0; v < val_loss.size(); ++v) {
        if (!std::isfinite(val_loss[v])) {
            throw DataError("non-finite val_loss at node " + std::to_string(v));
        }
    }
    if (test_loss) {
        if (test_loss->size() != val_loss.size()) {
            throw DataError("test_loss length differs from val_loss length");
        }
        for (std::size_t v = 0; v < test_loss->size(); ++v) {
            if (!std::isfinite((*test_loss)[v])) {
                throw DataError("non-finite test_loss at node " + std::to_string(v));
            }
        }
    }
}

Landscape sample_uniform(std::shared_ptr<const Topology> topology, std::uint64_t seed) {
    require_topology(topology);
    Landscape l;
    l.val_loss.resize(topology->size());
    for (std::size_t v = 0; v < l.val_loss.size(); ++v) {
        l.val_loss[v] = to_unit_open(mix64(seed, v));
    }
    l.meta = {{"generator", "uniform"}, {"params", nlohmann::json::object()}, {"seed", seed}};
    l.topology = std::move(topology);
    return l;
}

Landscape sample_iid_truncnorm(std::shared_ptr<const Topology> topology, double center,
                               double sigma, std::uint64_t seed) {
    require_topology(topology);
    check_sigma(sigma, "sigma");
    Landscape l;
    l.val_loss.resize(topology->size());
    for (std::size_t v = 0; v < l.val_loss.size(); ++v) {
        l.val_loss[v] = truncnorm_quantile(to_unit_open(mix64(seed, v)), center, sigma);
    }
    l.meta = {{"generator", "truncnorm"},
              {"params", {{"center", center}, {"sigma", sigma}}},
              {"seed", seed}};
    l.topology = std::move(topology);
    return l;
}

Landscape sample_markov_truncnorm(std::shared_ptr<const Topology> topology, double sigma_local,
                                  double root_center, double root_sigma, std::uint64_t seed) {
    require_topology(topology);
    check_sigma(sigma_local, "sigma_local");
    check_sigma(root_sigma, "root_sigma");
    const std::size_t n = topology->size();
    std::vector<double> loss(n, std::numeric_limits<double>::quiet_NaN());
    std::vector<bool> seen(n, false);
    std::vector<NodeId> queue;
    queue.reserve(n);
    std::vector<NodeId> nbrs;

    loss[0] = truncnorm_quantile(to_unit_open(mix64(seed, 0)), root_center, root_sigma);
    seen[0] = true;
    queue.push_back(0);
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const NodeId u = queue[head];
        topology->neighbors(u, nbrs);
        for (NodeId w : nbrs) {
            if (!seen[w]) {
                seen[w] = true;
                loss[w] = truncnorm_quantile(to_unit_open(mix64(seed, w)), loss[u], sigma_local);
                queue.push_back(w);
            }
        }
    }
    if (queue.size() != n) {
        throw DataError("markov generator needs a connected topology (reached " +
                        std::to_string(queue.size()) + " of " + std::to_string(n) + " nodes)");
    }
    Landscape l;
    l.val_loss = std::move(loss);
    l.meta = {{"generator", "markov-truncnorm"},
              {"params",
               {{"sigma_local", sigma_local},
                {"root_center", root_center},
                {"root_sigma", root_sigma}}},
              {"seed", seed}};
    l.topology = std::move(topology);
    return l;
}

Landscape load_tabular(std::istream& in, std::shared_ptr<const Topology> topology,
                       const std::string& source) {
    require_topology(topology);
    const CsvTable table = read_csv(in);
    const auto id_col = table.column("id");
    const auto val_col = table.column("val_loss");
    const auto test_col = table.column("test_loss");
    if (!id_col || !val_col) {
        throw DataError(source + ": header must contain 'id' and 'val_loss'");
    }
    const std::size_t n = topology->size();
    if (table.rows.size() != n) {
        throw DataError(source + ": expected " + std::to_string(n) + " rows, found " +
                        std::to_string(table.rows.size()));
    }
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> val(n, nan);
    std::vector<double> test;
    if (test_col) {
        test.assign(n, nan);
    }
    std::vector<bool> seen(n, false);
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const auto where = source + " line " + std::to_string(table.line_numbers[r]);
        const auto id = parse_double(row[*id_col]);
        if (!id || *id < 0 || *id != std::floor(*id)) {
            throw DataError(where + ": bad node id '" + row[*id_col] + "'");
        }
        if (*id >= static_cast<double>(n) || seen[static_cast<std::size_t>(*id)]) {
            throw DataError(where + ": duplicate or missing id (id " + row[*id_col] + ")");
        }
        const auto v = static_cast<std::size_t>(*id);
        seen[v] = true;
        const auto value = parse_double(row[*val_col]);
        if (!value || !std::isfinite(*value)) {
            throw DataError(where + ": non-finite val_loss '" + row[*val_col] + "'");
        }
        val[v] = *value;
        if (test_col) {
            const auto t = parse_double(row[*test_col]);
            if (!t || !std::isfinite(*t)) {
                throw DataError(where + ": non-finite test_loss '" + row[*test_col] + "'");
            }
            test[v] = *t;
        }
    }
    // Row count equals n and no id repeats, so every id is present.
    Landscape l;
    l.val_loss = std::move(val);
    if (test_col) {
        l.test_loss = std::move(test);
    }
    nlohmann::json columns = {"id", "val_loss"};
    if (test_col) {
        columns.push_back("test_loss");
    }
    l.meta = {{"source", source}, {"columns", columns}};
    l.topology = std::move(topology);
    return l;
}

void write_landscape_csv(const Landscape& landscape, std::ostream& out) {
    landscape.validate();
    out << (landscape.test_loss ? "id,val_loss,test_loss" : "id,val_loss");
    for (std::size_t v = 0; v < landscape.size(); ++v) {
        out << '\n' << v << ',' << format_double(landscape.val_loss[v]);
        if (landscape.test_loss) {
            out << ',' << format_double((*landscape.test_loss)[v]);
        }
    }
    out << '\n';
}

nlohmann::json landscape_sidecar(const Landscape& landscape) {
    return {{"format_version", kLandscapeFormatVersion},
            {"topology", landscape.topology->to_json()},
            {"meta", landscape.meta}};
}

std::filesystem::path sidecar_path(const std::filesystem::path& csv_path) {
    auto p = csv_path;
    p.replace_extension(".meta.json");
    return p;
}

void save_landscape(const Landscape& landscape, const std::filesystem::path& csv_path) {
    std::ofstream csv(csv_path, std::ios::binary);
    if (!csv) {
        throw DataError("cannot write " + csv_path.string());
    }
    write_landscape_csv(landscape, csv);
    std::ofstream meta(sidecar_path(csv_path), std::ios::binary);
    if (!meta) {
        throw DataError("cannot write " + sidecar_path(csv_path).string());
    }
    meta << landscape_sidecar(landscape).dump(2) << '\n';
    if (!csv || !meta) {
        throw DataError("write failed for " + csv_path.string());
    }
}

Landscape load_landscape(const std::filesystem::path& csv_path) {
    const auto meta_path = sidecar_path(csv_path);
    std::ifstream meta_in(meta_path);
    if (!meta_in) {
        throw DataError("cannot open " + meta_path.string());
    }
    nlohmann::json sidecar;
    try {
        sidecar = nlohmann::json::parse(meta_in);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(meta_path.string() + ": " + e.what());
    }
    if (!sidecar.contains("format_version") || !sidecar["format_version"].is_number_integer() ||
        sidecar["format_version"].get<int>() != kLandscapeFormatVersion) {
        throw FormatVersionError(meta_path.string() + ": unsupported format_version " +
                                 (sidecar.contains("format_version")
                                      ? sidecar["format_version"].dump()
                                      : std::string("(absent)")) +
                                 ", expected " + std::to_string(kLandscapeFormatVersion));
    }
    auto topology =
        std::make_shared<const Topology>(Topology::from_json(sidecar.at("topology")));
    std::ifstream csv(csv_path);
    if (!csv) {
        throw DataError("cannot open " + csv_path.string());
    }
    Landscape l = load_tabular(csv, std::move(topology), csv_path.string());
    l.meta = sidecar.value("meta", nlohmann::json::object());
    return l;
}

}  // namespace lsland
