#include "lsland/topology.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <limits>
#include <queue>
#include <sstream>

#include "lsland/error.hpp"

namespace lsland {

namespace {

constexpr std::uint64_t kMaxNodes = std::numeric_limits<NodeId>::max();

unsigned parse_unsigned(std::string_view text, const std::string& context) {
    unsigned value = 0;
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) {
        throw ArgumentError("bad integer '" + std::string(text) + "' in " + context);
    }
    return value;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = text.find(sep, start);
        parts.push_back(text.substr(start, pos - start));
        if (pos == std::string_view::npos) {
            break;
        }
        start = pos + 1;
    }
    return parts;
}

}  // namespace

Topology Topology::clique_power(unsigned m, unsigned d) {
    if (m < 2 || d < 1) {
        throw ArgumentError("clique power needs m >= 2 and d >= 1");
    }
    Topology t;
    t.kind_ = Kind::CliquePower;
    t.m_ = m;
    t.d_ = d;
    std::uint64_t n = 1;
    t.place_.reserve(d);
    for (unsigned i = 0; i < d; ++i) {
        t.place_.push_back(n);
        if (n > kMaxNodes / m) {
            throw SizeError("clique power (K_" + std::to_string(m) + ")^" + std::to_string(d) +
                            " does not fit the node-id type");
        }
        n *= m;
    }
    t.n_ = static_cast<std::size_t>(n);
    t.degree_ = static_cast<std::size_t>(d) * (m - 1);
    return t;
}

Topology Topology::complete(std::size_t n) {
    if (n < 1) {
        throw ArgumentError("complete graph needs at least one node");
    }
    if (n > kMaxNodes) {
        throw SizeError("complete graph does not fit the node-id type");
    }
    Topology t;
    t.kind_ = Kind::Complete;
    t.n_ = n;
    t.degree_ = n - 1;
    return t;
}

Topology Topology::regular_tree(unsigned arity, unsigned depth) {
    if (arity < 2 || depth < 1) {
        throw ArgumentError("regular tree needs arity >= 2 and depth >= 1");
    }
    // 1 + a + a(a-1) + ... + a(a-1)^(depth-1)
    std::uint64_t n = 1;
    std::uint64_t level = arity;
    for (unsigned k = 1; k <= depth; ++k) {
        n += level;
        if (n > kMaxNodes) {
            throw SizeError("regular tree does not fit the node-id type");
        }
        if (k < depth) {
            if (level > kMaxNodes / (arity - 1 ? arity - 1 : 1)) {
                throw SizeError("regular tree does not fit the node-id type");
            }
            level *= (arity - 1);
        }
    }
    std::vector<std::vector<NodeId>> lists(static_cast<std::size_t>(n));
    NodeId next = 1;
    std::vector<NodeId> frontier{0};
    for (unsigned k = 1; k <= depth; ++k) {
        std::vector<NodeId> deeper;
        for (NodeId parent : frontier) {
            const unsigned children = parent == 0 ? arity : arity - 1;
            for (unsigned c = 0; c < children; ++c) {
                const NodeId child = next++;
                lists[parent].push_back(child);
                lists[child].push_back(parent);
                deeper.push_back(child);
            }
        }
        frontier = std::move(deeper);
    }
    Topology t;
    t.kind_ = Kind::RegularTree;
    t.arity_ = arity;
    t.depth_ = depth;
    t.finalize_adjacency(std::move(lists));
    return t;
}

Topology Topology::from_edges(std::size_t n, std::span<const std::pair<NodeId, NodeId>> edges) {
    if (n == 0) {
        throw DataError("empty graph");
    }
    if (n > kMaxNodes) {
        throw SizeError("graph does not fit the node-id type");
    }
    std::vector<std::vector<NodeId>> lists(n);
    for (const auto& [u, v] : edges) {
        if (u >= n || v >= n) {
            throw DataError("edge (" + std::to_string(u) + ", " + std::to_string(v) +
                            ") references a node id out of range for n = " + std::to_string(n));
        }
        if (u == v) {
            throw DataError("self-loop at node " + std::to_string(u));
        }
        lists[u].push_back(v);
        lists[v].push_back(u);
    }
    Topology t;
    t.kind_ = Kind::Custom;
    t.finalize_adjacency(std::move(lists));
    return t;
}

void Topology::finalize_adjacency(std::vector<std::vector<NodeId>> lists) {
    n_ = lists.size();
    offsets_.assign(n_ + 1, 0);
    adjacency_.clear();
    std::optional<std::size_t> common;
    bool regular = true;
    for (std::size_t v = 0; v < n_; ++v) {
        auto& l = lists[v];
        std::sort(l.begin(), l.end());
        l.erase(std::unique(l.begin(), l.end()), l.end());
        adjacency_.insert(adjacency_.end(), l.begin(), l.end());
        offsets_[v + 1] = adjacency_.size();
        if (!common) {
            common = l.size();
        } else if (*common != l.size()) {
            regular = false;
        }
    }
    degree_ = regular ? common : std::nullopt;
}

void Topology::check_node(NodeId v) const {
    if (v >= n_) {
        throw RangeError("node id " + std::to_string(v) + " out of range for n = " +
                         std::to_string(n_));
    }
}

std::size_t Topology::degree(NodeId v) const {
    check_node(v);
    switch (kind_) {
        case Kind::CliquePower:
        case Kind::Complete:
            return *degree_;
        default:
            return offsets_[v + 1] - offsets_[v];
    }
}

void Topology::neighbors(NodeId v, std::vector<NodeId>& out) const {
    check_node(v);
    out.clear();
    switch (kind_) {
        case Kind::CliquePower: {
            out.reserve(*degree_);
            std::uint64_t rest = v;
            for (unsigned i = 0; i < d_; ++i) {
                const auto digit = static_cast<unsigned>(rest % m_);
                rest /= m_;
                const std::uint64_t base = v - digit * place_[i];
                for (unsigned a = 0; a < m_; ++a) {
                    if (a != digit) {
                        out.push_back(static_cast<NodeId>(base + a * place_[i]));
                    }
                }
            }
            std::sort(out.begin(), out.end());
            break;
        }
        case Kind::Complete:
            out.reserve(n_ - 1);
            for (std::size_t u = 0; u < n_; ++u) {
                if (u != v) {
                    out.push_back(static_cast<NodeId>(u));
                }
            }
            break;
        default:
            out.assign(adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[v]),
                       adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[v + 1]));
            break;
    }
}

std::vector<NodeId> Topology::neighbors(NodeId v) const {
    std::vector<NodeId> out;
    neighbors(v, out);
    return out;
}

std::vector<std::size_t> Topology::shell_sizes(NodeId v) const {
    check_node(v);
    constexpr auto unseen = std::numeric_limits<std::uint32_t>::max();
    std::vector<std::uint32_t> dist(n_, unseen);
    std::vector<std::size_t> shells{1};
    std::vector<NodeId> frontier{v};
    std::vector<NodeId> buffer;
    dist[v] = 0;
    while (!frontier.empty()) {
        std::vector<NodeId> next;
        for (NodeId u : frontier) {
            neighbors(u, buffer);
            for (NodeId w : buffer) {
                if (dist[w] == unseen) {
                    dist[w] = dist[u] + 1;
                    next.push_back(w);
                }
            }
        }
        if (!next.empty()) {
            shells.push_back(next.size());
        }
        frontier = std::move(next);
    }
    return shells;
}

std::size_t Topology::diameter() const {
    switch (kind_) {
        case Kind::CliquePower:
            return d_;
        case Kind::Complete:
            return n_ > 1 ? 1 : 0;
        case Kind::RegularTree:
            return 2 * static_cast<std::size_t>(depth_);
        case Kind::Custom:
            break;
    }
    std::size_t best = 0;
    for (std::size_t v = 0; v < n_; ++v) {
        const auto shells = shell_sizes(static_cast<NodeId>(v));
        best = std::max(best, shells.size() - 1);
    }
    return best;
}

bool Topology::connected() const {
    switch (kind_) {
        case Kind::CliquePower:
        case Kind::Complete:
        case Kind::RegularTree:
            return true;
        case Kind::Custom:
            break;
    }
    std::size_t reached = 0;
    for (std::size_t s : shell_sizes(0)) {
        reached += s;
    }
    return reached == n_;
}

double Topology::branching_fraction(std::size_t k, NodeId reference) const {
    check_node(reference);
    if (k < 1) {
        throw RangeError("branching fraction is defined for k >= 1");
    }
    const std::size_t deg = degree(reference);
    if (deg == 0) {
        throw ArgumentError("branching fraction undefined: node " + std::to_string(reference) +
                            " has no neighbors");
    }
    switch (kind_) {
        case Kind::CliquePower:
            if (k > d_) {
                return 0.0;
            }
            return static_cast<double>(d_ - k + 1) / static_cast<double>(d_ * k);
        case Kind::Complete:
            return k == 1 ? 1.0 : 0.0;
        case Kind::RegularTree:
            if (reference == 0) {
                return k <= depth_ ? 1.0 : 0.0;
            }
            break;
        case Kind::Custom:
            break;
    }
    const auto shells = shell_sizes(reference);
    if (k >= shells.size()) {
        return 0.0;
    }
    return static_cast<double>(shells[k]) /
           (static_cast<double>(shells[k - 1]) * static_cast<double>(deg));
}

nlohmann::json Topology::to_json() const {
    switch (kind_) {
        case Kind::CliquePower:
            return {{"kind", "clique-power"}, {"m", m_}, {"d", d_}};
        case Kind::Complete:
            return {{"kind", "complete"}, {"n", n_}};
        case Kind::RegularTree:
            return {{"kind", "tree"}, {"arity", arity_}, {"depth", depth_}};
        case Kind::Custom:
            break;
    }
    nlohmann::json edges = nlohmann::json::array();
    for (std::size_t u = 0; u < n_; ++u) {
        for (std::size_t i = offsets_[u]; i < offsets_[u + 1]; ++i) {
            if (adjacency_[i] > u) {
                edges.push_back({u, adjacency_[i]});
            }
        }
    }
    return {{"kind", "custom"}, {"n", n_}, {"edges", std::move(edges)}};
}

Topology Topology::from_json(const nlohmann::json& j) {
    try {
        const auto kind = j.at("kind").get<std::string>();
        if (kind == "clique-power") {
            return clique_power(j.at("m").get<unsigned>(), j.at("d").get<unsigned>());
        }
        if (kind == "complete") {
            return complete(j.at("n").get<std::size_t>());
        }
        if (kind == "tree") {
            return regular_tree(j.at("arity").get<unsigned>(), j.at("depth").get<unsigned>());
        }
        if (kind == "custom") {
            std::vector<std::pair<NodeId, NodeId>> edges;
            for (const auto& e : j.at("edges")) {
                edges.emplace_back(e.at(0).get<NodeId>(), e.at(1).get<NodeId>());
            }
            return from_edges(j.at("n").get<std::size_t>(), edges);
        }
        throw DataError("unknown topology kind '" + kind + "'");
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed topology description: ") + e.what());
    }
}

std::string Topology::describe() const {
    switch (kind_) {
        case Kind::CliquePower:
            return "clique-power:" + std::to_string(m_) + "," + std::to_string(d_);
        case Kind::Complete:
            return "complete:" + std::to_string(n_);
        case Kind::RegularTree:
            return "tree:" + std::to_string(arity_) + "," + std::to_string(depth_);
        case Kind::Custom:
            break;
    }
    return "custom(n=" + std::to_string(n_) + ")";
}

Topology parse_topology_spec(const std::string& spec) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos) {
        throw ArgumentError("topology spec '" + spec + "' must look like kind:params");
    }
    const std::string kind = spec.substr(0, colon);
    const std::string_view rest = std::string_view(spec).substr(colon + 1);
    if (kind == "adjacency") {
        std::ifstream in{std::string(rest)};
        if (!in) {
            throw DataError("cannot open adjacency file '" + std::string(rest) + "'");
        }
        return load_adjacency(in);
    }
    const auto parts = split(rest, ',');
    if (kind == "clique-power" && parts.size() == 2) {
        return Topology::clique_power(parse_unsigned(parts[0], spec), parse_unsigned(parts[1], spec));
    }
    if (kind == "complete" && parts.size() == 1) {
        return Topology::complete(parse_unsigned(parts[0], spec));
    }
    if (kind == "tree" && parts.size() == 2) {
        return Topology::regular_tree(parse_unsigned(parts[0], spec), parse_unsigned(parts[1], spec));
    }
    throw ArgumentError("unrecognised topology spec '" + spec + "'");
}

Topology load_adjacency(std::istream& in) {
    std::optional<std::size_t> n;
    std::vector<std::pair<NodeId, NodeId>> edges;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        std::istringstream fields(line);
        std::string first;
        if (!(fields >> first)) {
            continue;
        }
        const auto where = "adjacency line " + std::to_string(lineno);
        if (!n) {
            std::size_t count = 0;
            if (first != "n" || !(fields >> count)) {
                throw DataError(where + ": expected 'n <node_count>' header");
            }
            n = count;
        } else {
            long long u = 0;
            long long v = 0;
            std::istringstream pair(line);
            if (!(pair >> u >> v)) {
                throw DataError(where + ": expected '<u> <v>'");
            }
            if (u < 0 || v < 0 || static_cast<std::uint64_t>(u) >= *n ||
                static_cast<std::uint64_t>(v) >= *n) {
                throw DataError(where + ": node id out of range");
            }
            edges.emplace_back(static_cast<NodeId>(u), static_cast<NodeId>(v));
        }
        std::string extra;
        if (fields >> extra && !n) {
            throw DataError(where + ": trailing characters");
        }
    }
    if (!n || *n == 0) {
        throw DataError("empty graph");
    }
    return Topology::from_edges(*n, edges);
}

}  // namespace lsland
