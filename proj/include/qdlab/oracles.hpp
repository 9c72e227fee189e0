#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "qdlab/bits.hpp"
#include "qdlab/features.hpp"
#include "qdlab/graph.hpp"
#include "qdlab/problems.hpp"

namespace qdlab {

// ---------------------------------------------------------------------------
// Exact mutation transition probabilities
// ---------------------------------------------------------------------------

inline long double log_choose(std::size_t n, std::size_t k) {
    if (k > n) return -std::numeric_limits<long double>::infinity();
    return std::lgamma(static_cast<long double>(n) + 1) -
           std::lgamma(static_cast<long double>(k) + 1) -
           std::lgamma(static_cast<long double>(n - k) + 1);
}

/// log of the probability that standard bit mutation with rate p_m turns a
/// parent with i ones into an offspring with j ones, summed over all ways of
/// flipping a one-bits and a + (j-i) zero-bits. Log-domain throughout; the
/// smallest terms for n <= 200 are far below double range but fine here.
inline long double log_transition_prob(std::size_t n, double p_m, std::size_t i, std::size_t j) {
    if (i > n || j > n) throw std::invalid_argument("transition_prob: indices must lie in [0, n]");
    if (!(p_m > 0.0) || !(p_m < 1.0))
        throw std::invalid_argument("transition_prob: p_m must lie in (0,1)");
    const long double lp = std::log(static_cast<long double>(p_m));
    const long double lq = std::log1p(static_cast<long double>(-p_m));

    // a = ones flipped to zero, b = a + (j - i) = zeros flipped to one
    std::size_t a_lo = i > j ? i - j : 0;
    std::size_t a_hi = std::min(i, n - j);
    if (a_lo > a_hi) return -std::numeric_limits<long double>::infinity();

    long double max_term = -std::numeric_limits<long double>::infinity();
    std::vector<long double> terms;
    terms.reserve(a_hi - a_lo + 1);
    for (std::size_t a = a_lo; a <= a_hi; ++a) {
        std::size_t b = a + j - i;
        std::size_t flips = a + b;
        long double t = log_choose(i, a) + log_choose(n - i, b) +
                        static_cast<long double>(flips) * lp +
                        static_cast<long double>(n - flips) * lq;
        terms.push_back(t);
        max_term = std::max(max_term, t);
    }
    long double s = 0.0L;
    for (long double t : terms) s += std::exp(t - max_term);
    return max_term + std::log(s);
}

inline long double transition_prob(std::size_t n, double p_m, std::size_t i, std::size_t j) {
    return std::exp(log_transition_prob(n, p_m, i, j));
}

/// All p_{i,j} for one (n, p_m); rows indexed by parent one-count.
class TransitionTable {
public:
    TransitionTable(std::size_t n, double p_m) : n_(n), p_m_(p_m), log_p_((n + 1) * (n + 1)) {
        for (std::size_t i = 0; i <= n; ++i)
            for (std::size_t j = 0; j <= n; ++j)
                log_p_[i * (n + 1) + j] = log_transition_prob(n, p_m, i, j);
    }

    std::size_t n() const { return n_; }
    double p_m() const { return p_m_; }
    long double log_p(std::size_t i, std::size_t j) const { return log_p_.at(i * (n_ + 1) + j); }
    long double p(std::size_t i, std::size_t j) const { return std::exp(log_p(i, j)); }

    long double row_sum(std::size_t i) const {
        long double s = 0.0L;
        for (std::size_t j = 0; j <= n_; ++j) s += p(i, j);
        return s;
    }

    /// Testing hook: scales one entry, breaking the row-stochastic and decay
    /// properties on purpose (negative control for the checkers).
    void corrupt_entry(std::size_t i, std::size_t j, long double factor) {
        log_p_.at(i * (n_ + 1) + j) += std::log(factor);
    }

private:
    std::size_t n_;
    double p_m_;
    std::vector<long double> log_p_;
};

/// Decaying-jump inequality for downward moves:
/// p_{i, j-k} <= (i p_m / (1 - p_m))^k * p_{i, j}. Exact log-domain
/// comparison with a hair of slack for rounding.
inline bool check_jump_decay(const TransitionTable& t, std::size_t i, std::size_t j,
                             std::size_t k) {
    if (j >= i || k > j)
        throw std::invalid_argument("check_jump_decay: need j < i and 0 <= k <= j");
    long double ratio = std::log(static_cast<long double>(i) *
                                  static_cast<long double>(t.p_m()) /
                                  (1.0L - static_cast<long double>(t.p_m())));
    return t.log_p(i, j - k) <= static_cast<long double>(k) * ratio + t.log_p(i, j) + 1e-9L;
}

inline bool check_jump_decay(std::size_t n, double p_m, std::size_t i, std::size_t j,
                             std::size_t k) {
    if (j >= i || k > j)
        throw std::invalid_argument("check_jump_decay: need j < i and 0 <= k <= j");
    long double ratio =
        std::log(static_cast<long double>(i) * static_cast<long double>(p_m) /
                  (1.0L - static_cast<long double>(p_m)));
    return log_transition_prob(n, p_m, i, j - k) <=
           static_cast<long double>(k) * ratio + log_transition_prob(n, p_m, i, j) + 1e-9L;
}

// ---------------------------------------------------------------------------
// Greedy and exhaustive submodular references
// ---------------------------------------------------------------------------

struct GreedyResult {
    std::vector<std::uint32_t> picks;  // in pick order
    double value = 0.0;
};

/// r rounds of adding the set with maximal marginal coverage gain,
/// ties broken by lowest index. Deterministic.
inline GreedyResult greedy_submodular(const CoverageInstance& inst) {
    if (inst.r < 1) throw std::invalid_argument("greedy_submodular: r must be >= 1");
    GreedyResult res;
    std::vector<std::uint64_t> acc(inst.blocks, 0ull);
    std::vector<char> taken(inst.n, 0);
    std::size_t rounds = std::min(inst.r, inst.n);
    for (std::size_t round = 0; round < rounds; ++round) {
        std::size_t best = inst.n;
        std::size_t best_gain = 0;
        bool found = false;
        for (std::size_t i = 0; i < inst.n; ++i) {
            if (taken[i]) continue;
            std::size_t gain = 0;
            for (std::size_t b = 0; b < inst.blocks; ++b)
                gain += static_cast<std::size_t>(
                    std::popcount(inst.masks[i * inst.blocks + b] & ~acc[b]));
            if (!found || gain > best_gain) {
                found = true;
                best = i;
                best_gain = gain;
            }
        }
        taken[best] = 1;
        res.picks.push_back(static_cast<std::uint32_t>(best));
        for (std::size_t b = 0; b < inst.blocks; ++b) acc[b] |= inst.masks[best * inst.blocks + b];
    }
    std::size_t covered = 0;
    for (auto w : acc) covered += static_cast<std::size_t>(std::popcount(w));
    res.value = static_cast<double>(covered);
    return res;
}

/// Exact optimum over all subsets of at most r sets; 2^n scan, so n <= 20.
inline double exhaustive_best_coverage(const CoverageInstance& inst, std::size_t r) {
    if (inst.n > 20)
        throw std::invalid_argument("exhaustive_best_coverage: refusing n > 20 (2^n scan)");
    double best = 0.0;
    for (std::uint64_t mask = 0; mask < (1ull << inst.n); ++mask) {
        if (static_cast<std::size_t>(std::popcount(mask)) > r) continue;
        best = std::max(best, coverage_value_mask(inst, mask));
    }
    return best;
}

// ---------------------------------------------------------------------------
// Kruskal and exhaustive MST references
// ---------------------------------------------------------------------------

struct KruskalResult {
    std::vector<std::uint32_t> edge_indices;  // in acceptance order
    std::uint64_t weight = 0;
};

inline KruskalResult kruskal(const WeightedGraph& g) {
    std::vector<std::uint32_t> order(g.n_edges());
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(),
              [&](std::uint32_t a, std::uint32_t b) { return g.edges[a].w < g.edges[b].w; });
    UnionFind uf(g.n_nodes);
    KruskalResult res;
    for (auto idx : order) {
        const Edge& e = g.edges[idx];
        if (uf.unite(e.u, e.v)) {
            res.edge_indices.push_back(idx);
            res.weight += e.w;
        }
    }
    if (res.edge_indices.size() != g.n_nodes - 1)
        throw std::runtime_error("kruskal: graph is not connected");
    return res;
}

/// weight[c] = weight of the minimum spanning forest with exactly c+1
/// components (the first n_G-1-c Kruskal acceptances). weight[n_G-1] = 0 is
/// the empty edge set; weight[0] is the MST weight.
inline std::vector<std::uint64_t> kruskal_forest_weights(const WeightedGraph& g) {
    KruskalResult k = kruskal(g);
    std::vector<std::uint64_t> w(g.n_nodes, 0);
    // after t acceptances the forest has n_G - t components; index by components - 1
    std::uint64_t acc = 0;
    for (std::size_t t = 0; t < k.edge_indices.size(); ++t) {
        acc += g.edges[k.edge_indices[t]].w;
        w[g.n_nodes - t - 2] = acc;
    }
    return w;
}

/// Minimum spanning-subgraph weight by scanning all edge subsets; 2^m scan,
/// so m <= 22. Verification-only counterpart of kruskal().
inline std::uint64_t exhaustive_mst_weight(const WeightedGraph& g) {
    std::size_t m = g.n_edges();
    if (m > 22) throw std::invalid_argument("exhaustive_mst_weight: refusing m > 22 (2^m scan)");
    std::uint64_t best = ~0ull;
    for (std::uint64_t mask = 0; mask < (1ull << m); ++mask) {
        UnionFind uf(g.n_nodes);
        std::uint64_t weight = 0;
        for (std::size_t i = 0; i < m; ++i)
            if ((mask >> i) & 1u) {
                uf.unite(g.edges[i].u, g.edges[i].v);
                weight += g.edges[i].w;
            }
        if (uf.components() == 1) best = std::min(best, weight);
    }
    if (best == ~0ull) throw std::runtime_error("exhaustive_mst_weight: graph is not connected");
    return best;
}

// ---------------------------------------------------------------------------
// Per-cell optima
// ---------------------------------------------------------------------------

/// Exact per-cell maximum fitness by full enumeration of {0,1}^n; n <= 16.
/// Callers with larger n must disable the optimal-coverage milestone.
inline std::vector<double> cell_optima_bruteforce(const Problem& problem,
                                                  const FeatureSpace& space) {
    if (problem.n > 16)
        throw std::invalid_argument("cell_optima_bruteforce: refusing n > 16 (2^n enumeration); "
                                    "disable the optimal-coverage milestone instead");
    std::vector<double> best(space.cell_count(), -std::numeric_limits<double>::infinity());
    for (std::uint64_t mask = 0; mask < (1ull << problem.n); ++mask) {
        Genotype x = Genotype::from_mask(problem.n, mask);
        std::size_t cell = space.cell_index(x);
        best[cell] = std::max(best[cell], problem.eval(x));
    }
    return best;
}

/// Closed-form per-cell optima for functions of unitation on a NoO space:
/// the cell maximum is the maximum of u over the cell's one-count interval.
inline std::vector<double> cell_optima_unitation(const Problem& problem,
                                                 const FeatureSpace& space) {
    if (!problem.unitation)
        throw std::invalid_argument("cell_optima_unitation: problem is not a function of unitation");
    if (space.kind() != FeatureSpace::Kind::NumberOfOnes)
        throw std::invalid_argument("cell_optima_unitation: needs a NoO space");
    std::size_t k = space.granularity();
    std::vector<double> best(space.cell_count(), -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < space.cell_count(); ++i) {
        std::size_t lo = i * k;
        std::size_t hi = std::min(problem.n, i * k + k - 1);
        for (std::size_t o = lo; o <= hi; ++o) best[i] = std::max(best[i], problem.unitation(o));
    }
    return best;
}

// ---------------------------------------------------------------------------
// Leading-order bound evaluators
// ---------------------------------------------------------------------------

struct BoundParams {
    std::size_t n = 0;       // genotype length
    std::size_t k = 1;       // NoO granularity
    double p_m = 0.0;
    std::size_t r = 0;       // cardinality constraint
    std::size_t n_nodes = 0; // graph nodes
    std::size_t m_edges = 0; // graph edges
    std::uint64_t w_max = 0; // largest edge weight
};

inline double choose(std::size_t n, std::size_t k) {
    if (k > n) return 0.0;
    k = std::min(k, n - k);
    double c = 1.0;
    for (std::size_t i = 1; i <= k; ++i)
        c = c * static_cast<double>(n - k + i) / static_cast<double>(i);
    return c;
}

/// Leading-order runtime expressions (no hidden constants):
///   cover_k1  n^2 ln n            cover time, NoO(1)
///   cover_k   L p_m^-k / C(2k-1,k) cover time, NoO(k), k >= 2
///   submod    n^2 (ln n + r)      (1-1/e)-approximation time
///   mst_zero  n m ln(n w_max)     empty-edge-set hitting time
///   mst_opt   n^2 m               MST optimisation time from 0^m
inline double bound_value(const std::string& bound_id, const BoundParams& p) {
    if (bound_id == "cover_k1") {
        if (p.n < 2) throw std::invalid_argument("bound cover_k1: need n >= 2");
        double n = static_cast<double>(p.n);
        return n * n * std::log(n);
    }
    if (bound_id == "cover_k") {
        if (p.k < 2) throw std::invalid_argument("bound cover_k: defined for k >= 2 (k=1 uses cover_k1)");
        if ((p.n + 1) % p.k != 0)
            throw std::invalid_argument("bound cover_k: k must divide n+1");
        if (!(p.p_m > 0.0) || !(p.p_m < 1.0))
            throw std::invalid_argument("bound cover_k: p_m must lie in (0,1)");
        double L = static_cast<double>((p.n + 1) / p.k);
        return L * std::pow(1.0 / p.p_m, static_cast<double>(p.k)) / choose(2 * p.k - 1, p.k);
    }
    if (bound_id == "submod") {
        if (p.n < 2 || p.r < 1) throw std::invalid_argument("bound submod: need n >= 2, r >= 1");
        double n = static_cast<double>(p.n);
        return n * n * (std::log(n) + static_cast<double>(p.r));
    }
    if (bound_id == "mst_zero") {
        if (p.n_nodes < 2 || p.m_edges < 1 || p.w_max < 1)
            throw std::invalid_argument("bound mst_zero: need n_nodes, m_edges, w_max");
        double n = static_cast<double>(p.n_nodes);
        double m = static_cast<double>(p.m_edges);
        return n * m * std::log(n * static_cast<double>(p.w_max));
    }
    if (bound_id == "mst_opt") {
        if (p.n_nodes < 2 || p.m_edges < 1)
            throw std::invalid_argument("bound mst_opt: need n_nodes and m_edges");
        double n = static_cast<double>(p.n_nodes);
        return n * n * static_cast<double>(p.m_edges);
    }
    throw std::invalid_argument("bound_value: unknown bound id '" + bound_id + "'");
}

}  // namespace qdlab
