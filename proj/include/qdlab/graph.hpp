#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qdlab/bits.hpp"

namespace qdlab {

struct Edge {
    std::uint32_t u = 0;
    std::uint32_t v = 0;
    std::uint64_t w = 0;
};

/// Connected undirected graph with pairwise-distinct positive integer weights.
/// Genotypes over this graph have length m = edges.size(); bit i selects edge i.
struct WeightedGraph {
    std::size_t n_nodes = 0;
    std::vector<Edge> edges;

    std::size_t n_edges() const { return edges.size(); }
    std::uint64_t max_weight() const {
        std::uint64_t w = 0;
        for (const auto& e : edges) w = std::max(w, e.w);
        return w;
    }
    std::uint64_t total_weight() const {
        std::uint64_t s = 0;
        for (const auto& e : edges) s += e.w;
        return s;
    }
};

class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n), components_(n) {
        std::iota(parent_.begin(), parent_.end(), 0u);
    }
    std::uint32_t find(std::uint32_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];  // path halving
            x = parent_[x];
        }
        return x;
    }
    /// Returns true when the union merged two components.
    bool unite(std::uint32_t a, std::uint32_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent_[a] = b;
        --components_;
        return true;
    }
    std::size_t components() const { return components_; }

private:
    std::vector<std::uint32_t> parent_;
    std::size_t components_;
};

/// Number of connected components of the subgraph selected by x, over all
/// n_nodes vertices (unselected vertices count as isolated components).
inline std::size_t cc_count(const WeightedGraph& g, const Genotype& x) {
    if (x.size() != g.n_edges())
        throw std::invalid_argument("cc_count: genotype length " + std::to_string(x.size()) +
                                    " does not match edge count " + std::to_string(g.n_edges()));
    UnionFind uf(g.n_nodes);
    for (std::size_t i = 0; i < g.edges.size(); ++i)
        if (x.test(i)) uf.unite(g.edges[i].u, g.edges[i].v);
    return uf.components();
}

inline bool is_connected(const WeightedGraph& g) {
    if (g.n_nodes == 0) return false;
    UnionFind uf(g.n_nodes);
    for (const auto& e : g.edges) uf.unite(e.u, e.v);
    return uf.components() == 1;
}

/// Validates the invariants every MST instance relies on: connectivity,
/// positive pairwise-distinct weights, simple edges within node range.
inline void validate_graph(const WeightedGraph& g) {
    if (g.n_nodes < 2) throw std::runtime_error("graph: need at least 2 nodes");
    std::set<std::uint64_t> weights;
    std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
    for (const auto& e : g.edges) {
        if (e.u >= g.n_nodes || e.v >= g.n_nodes)
            throw std::runtime_error("graph: node id out of range");
        if (e.u == e.v) throw std::runtime_error("graph: self-loops not supported");
        if (e.w == 0) throw std::runtime_error("graph: weights must be positive");
        if (!weights.insert(e.w).second)
            throw std::runtime_error("graph: duplicate weight " + std::to_string(e.w) +
                                     " (weights must be pairwise distinct)");
        auto key = std::minmax(e.u, e.v);
        if (!seen.insert(key).second) throw std::runtime_error("graph: parallel edges not supported");
    }
    if (!is_connected(g)) throw std::runtime_error("graph: not connected");
}

/// Edge-list format: first line "n_G m", then m lines "u v w"
/// with 0-based node ids and positive integer weights.
inline WeightedGraph parse_graph(std::istream& in) {
    WeightedGraph g;
    std::size_t m = 0;
    if (!(in >> g.n_nodes >> m)) throw std::runtime_error("graph: bad header, expected 'n_G m'");
    g.edges.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
        Edge e;
        if (!(in >> e.u >> e.v >> e.w))
            throw std::runtime_error("graph: bad edge line " + std::to_string(i + 1));
        g.edges.push_back(e);
    }
    validate_graph(g);
    return g;
}

inline WeightedGraph load_graph(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("graph: cannot open " + path);
    return parse_graph(in);
}

inline void write_graph(std::ostream& out, const WeightedGraph& g) {
    out << g.n_nodes << ' ' << g.n_edges() << '\n';
    for (const auto& e : g.edges) out << e.u << ' ' << e.v << ' ' << e.w << '\n';
}

inline void save_graph(const std::string& path, const WeightedGraph& g) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("graph: cannot write " + path);
    write_graph(out, g);
}

/// Random connected simple graph: a random spanning tree plus extra random
/// edges up to m_edges, weights a random permutation of {1..m}.
inline WeightedGraph random_connected_graph(std::size_t n_nodes, std::size_t m_edges,
                                            RandomSource& rng) {
    if (n_nodes < 2) throw std::invalid_argument("random_connected_graph: need >= 2 nodes");
    std::size_t max_m = n_nodes * (n_nodes - 1) / 2;
    if (m_edges < n_nodes - 1 || m_edges > max_m)
        throw std::invalid_argument("random_connected_graph: m must lie in [n-1, n(n-1)/2]");

    WeightedGraph g;
    g.n_nodes = n_nodes;
    std::set<std::pair<std::uint32_t, std::uint32_t>> used;

    // random spanning tree: attach each node to a random earlier node
    std::vector<std::uint32_t> order(n_nodes);
    std::iota(order.begin(), order.end(), 0u);
    for (std::size_t i = n_nodes - 1; i > 0; --i)
        std::swap(order[i], order[rng.below(i + 1)]);
    for (std::size_t i = 1; i < n_nodes; ++i) {
        std::uint32_t a = order[i];
        std::uint32_t b = order[rng.below(i)];
        used.insert(std::minmax(a, b));
        g.edges.push_back({a, b, 0});
    }
    while (g.edges.size() < m_edges) {
        auto a = static_cast<std::uint32_t>(rng.below(n_nodes));
        auto b = static_cast<std::uint32_t>(rng.below(n_nodes));
        if (a == b) continue;
        if (!used.insert(std::minmax(a, b)).second) continue;
        g.edges.push_back({a, b, 0});
    }

    std::vector<std::uint64_t> weights(g.edges.size());
    std::iota(weights.begin(), weights.end(), 1ull);
    for (std::size_t i = weights.size() - 1; i > 0; --i)
        std::swap(weights[i], weights[rng.below(i + 1)]);
    for (std::size_t i = 0; i < g.edges.size(); ++i) g.edges[i].w = weights[i];
    return g;
}

}  // namespace qdlab
