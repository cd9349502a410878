#pragma once

// Neighborhood graphs on which landscapes live.
//
// Nodes are dense integer ids 0..n-1. Neighbor lists are always reported in
// ascending id order; every tie-break downstream relies on that.

#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace lsland {

using NodeId = std::uint32_t;

class Topology {
public:
    enum class Kind { CliquePower, Complete, RegularTree, Custom };

    // (K_m)^d: length-d strings over m symbols, adjacent iff they differ in
    // exactly one position. id = sum_i digit_i * m^i (little-endian).
    static Topology clique_power(unsigned m, unsigned d);
    static Topology complete(std::size_t n);
    // Root has `arity` children, every internal non-root node has arity-1
    // children, leaves sit at `depth`. Ids are assigned in BFS order, root 0.
    static Topology regular_tree(unsigned arity, unsigned depth);
    // Edges are symmetrised and deduplicated. Self-loops are rejected.
    static Topology from_edges(std::size_t n, std::span<const std::pair<NodeId, NodeId>> edges);

    Kind kind() const noexcept { return kind_; }
    std::size_t size() const noexcept { return n_; }

    // Uniform degree, present only when every node has the same degree.
    std::optional<std::size_t> regular_degree() const noexcept { return degree_; }
    std::size_t degree(NodeId v) const;

    // Fills `out` with the neighbors of v in ascending order.
    void neighbors(NodeId v, std::vector<NodeId>& out) const;
    std::vector<NodeId> neighbors(NodeId v) const;

    // [|N_0(v)|, |N_1(v)|, ..., |N_ecc(v)|] by breadth-first search.
    std::vector<std::size_t> shell_sizes(NodeId v) const;

    // Largest eccentricity; computed exactly for generated kinds and by
    // all-pairs BFS for Custom graphs (O(n * edges)).
    std::size_t diameter() const;

    bool connected() const;

    // b_k = |N_k(v)| / (|N_{k-1}(v)| * |N(v)|) with the closed forms
    //   CliquePower(m, d): (d - k + 1) / (d k)
    //   Complete:          1 for k = 1, else 0
    //   RegularTree, measured from the root: 1 up to the depth, 0 beyond
    // and the BFS ratio otherwise. k beyond the reference's eccentricity
    // gives 0. Throws RangeError for k < 1 and ArgumentError when the
    // reference node has no neighbors.
    double branching_fraction(std::size_t k, NodeId reference) const;

    // Round-trippable description, e.g. "clique-power:5,6".
    nlohmann::json to_json() const;
    static Topology from_json(const nlohmann::json& j);
    std::string describe() const;

    unsigned clique_base() const noexcept { return m_; }
    unsigned clique_dims() const noexcept { return d_; }
    unsigned tree_arity() const noexcept { return arity_; }
    unsigned tree_depth() const noexcept { return depth_; }

private:
    Topology() = default;
    void check_node(NodeId v) const;
    void finalize_adjacency(std::vector<std::vector<NodeId>> lists);

    Kind kind_ = Kind::Custom;
    std::size_t n_ = 0;
    std::optional<std::size_t> degree_;
    // CliquePower parameters
    unsigned m_ = 0;
    unsigned d_ = 0;
    std::vector<std::uint64_t> place_;  // m^i
    // RegularTree parameters
    unsigned arity_ = 0;
    unsigned depth_ = 0;
    // CSR adjacency for RegularTree and Custom
    std::vector<std::size_t> offsets_;
    std::vector<NodeId> adjacency_;
};

// Parses "clique-power:m,d", "complete:n", "tree:arity,depth" or
// "adjacency:<path>". Throws ArgumentError on malformed specs.
Topology parse_topology_spec(const std::string& spec);

// Adjacency file: first line `n <count>`, then `<u> <v>` per edge,
// `#` starts a comment.
Topology load_adjacency(std::istream& in);

}  // namespace lsland
