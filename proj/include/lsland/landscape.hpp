#pragma once

// Base losses attached to the nodes of a topology.

#include <cstdint>
#include <filesystem>
#include <istream>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lsland/topology.hpp"

namespace lsland {

inline constexpr int kLandscapeFormatVersion = 1;

struct Landscape {
    std::shared_ptr<const Topology> topology;
    std::vector<double> val_loss;
    std::optional<std::vector<double>> test_loss;
    // {generator, params, seed} for synthetic landscapes, {source, columns}
    // for ingested ones.
    nlohmann::json meta = nlohmann::json::object();

    std::size_t size() const noexcept { return val_loss.size(); }

    // Checks array lengths against the topology and that every value is
    // finite. Throws DataError.
    void validate() const;
};

// i.i.d. U(0, 1). Node v gets to_unit_open(mix64(seed, v)), so the value of a
// node does not depend on the size of the graph.
Landscape sample_uniform(std::shared_ptr<const Topology> topology, std::uint64_t seed);

// i.i.d. truncated normal on [0, 1].
Landscape sample_iid_truncnorm(std::shared_ptr<const Topology> topology, double center,
                               double sigma, std::uint64_t seed);

// BFS from node 0. The root is drawn from truncnorm(root_center, root_sigma),
// every other node from truncnorm(loss of its BFS parent, sigma_local).
Landscape sample_markov_truncnorm(std::shared_ptr<const Topology> topology, double sigma_local,
                                  double root_center, double root_sigma, std::uint64_t seed);

// CSV with columns `id,val_loss[,test_loss]` (extra columns ignored, any row
// order). Every id 0..n-1 must appear exactly once.
Landscape load_tabular(std::istream& in, std::shared_ptr<const Topology> topology,
                       const std::string& source = "<stream>");

// Writes the CSV body (header plus rows sorted by id, no trailing blank line).
void write_landscape_csv(const Landscape& landscape, std::ostream& out);

// Sidecar document: format_version, topology and meta.
nlohmann::json landscape_sidecar(const Landscape& landscape);

// `<dir>/<stem>.csv` plus `<dir>/<stem>.meta.json`.
std::filesystem::path sidecar_path(const std::filesystem::path& csv_path);
void save_landscape(const Landscape& landscape, const std::filesystem::path& csv_path);
Landscape load_landscape(const std::filesystem::path& csv_path);

}  // namespace lsland
