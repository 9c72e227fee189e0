#pragma once

#include <bit>
#include <cstdint>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qdlab/bits.hpp"
#include "qdlab/features.hpp"
#include "qdlab/graph.hpp"

namespace qdlab {

/// A fitness evaluator in maximisation orientation (minimisation problems are
/// negated at this boundary). `unitation` is set iff the fitness depends on
/// |x|_1 only. Optimum detection is a fitness threshold by default; problems
/// whose target is not the fitness-wide maximum (MST: the best genotype of
/// one cell) install a genotype predicate instead.
struct Problem {
    std::string name;
    std::size_t n = 0;
    std::function<double(const Genotype&)> eval;
    std::function<double(std::size_t)> unitation;
    std::optional<double> optimum;
    std::function<bool(const Genotype&, double)> is_global_opt_fn;

    bool has_optimum() const { return optimum.has_value() || static_cast<bool>(is_global_opt_fn); }

    bool is_global_opt(const Genotype& x, double fitness) const {
        if (is_global_opt_fn) return is_global_opt_fn(x, fitness);
        return optimum && fitness >= *optimum - 1e-9;
    }
};

inline Problem make_onemax(std::size_t n) {
    Problem p;
    p.name = "onemax";
    p.n = n;
    p.eval = [](const Genotype& x) { return static_cast<double>(x.ones()); };
    p.unitation = [](std::size_t o) { return static_cast<double>(o); };
    p.optimum = static_cast<double>(n);
    return p;
}

/// Fitness g + |x|_1 on the plateau |x|_1 <= n-g and at |x|_1 = n; the gap
/// region scores n - |x|_1. Unique maximum n+g at the all-ones string.
inline Problem make_jump(std::size_t n, std::size_t gap) {
    if (gap < 2 || gap > n / 2)
        throw std::invalid_argument("jump: gap must satisfy 2 <= g <= n/2");
    Problem p;
    p.name = "jump:" + std::to_string(gap);
    p.n = n;
    auto u = [n, gap](std::size_t o) {
        if (o <= n - gap || o == n) return static_cast<double>(gap + o);
        return static_cast<double>(n - o);
    };
    p.unitation = u;
    p.eval = [u](const Genotype& x) { return u(x.ones()); };
    p.optimum = static_cast<double>(n + gap);
    return p;
}

/// |x|_1 up to the cliff at n-d, then drops by d - 1/2. Unique maximum
/// n - d + 1/2 at the all-ones string.
inline Problem make_cliff(std::size_t n, std::size_t d) {
    if (d < 1 || d >= n) throw std::invalid_argument("cliff: d must satisfy 1 <= d < n");
    Problem p;
    p.name = "cliff:" + std::to_string(d);
    p.n = n;
    auto u = [n, d](std::size_t o) {
        if (o <= n - d) return static_cast<double>(o);
        return static_cast<double>(o) - static_cast<double>(d) + 0.5;
    };
    p.unitation = u;
    p.eval = [u](const Genotype& x) { return u(x.ones()); };
    p.optimum = static_cast<double>(n - d) + 0.5;
    return p;
}

/// n+1 at the all-zeros string, |x|_1 everywhere else. Unique maximum at 0^n.
inline Problem make_trap(std::size_t n) {
    Problem p;
    p.name = "trap";
    p.n = n;
    auto u = [n](std::size_t o) {
        return o == 0 ? static_cast<double>(n + 1) : static_cast<double>(o);
    };
    p.unitation = u;
    p.eval = [u](const Genotype& x) { return u(x.ones()); };
    p.optimum = static_cast<double>(n + 1);
    return p;
}

/// Monotone linear function with strictly positive weights; unique optimum 1^n.
inline Problem make_linear(std::vector<double> weights) {
    if (weights.empty()) throw std::invalid_argument("linear: need at least one weight");
    double total = 0.0;
    for (double w : weights) {
        if (!(w > 0.0)) throw std::invalid_argument("linear: weights must be positive");
        total += w;
    }
    Problem p;
    p.name = "linear";
    p.n = weights.size();
    p.optimum = total;
    p.eval = [ws = std::move(weights)](const Genotype& x) {
        double s = 0.0;
        for (std::size_t i = 0; i < ws.size(); ++i)
            if (x.test(i)) s += ws[i];
        return s;
    };
    return p;
}

// ---------------------------------------------------------------------------
// Monotone submodular maximisation: max-coverage instances
// ---------------------------------------------------------------------------

/// Max-coverage instance: n sets over a universe U, cardinality constraint r.
/// f(A) = |union of selected sets| is monotone and submodular with f({}) = 0.
struct CoverageInstance {
    std::size_t n = 0;
    std::size_t universe = 0;
    std::size_t r = 1;
    std::vector<std::vector<std::uint32_t>> sets;

    // packed element masks, one block row per set
    std::vector<std::uint64_t> masks;
    std::size_t blocks = 0;

    void build_masks() {
        blocks = (universe + 63) / 64;
        masks.assign(n * blocks, 0ull);
        for (std::size_t i = 0; i < n; ++i)
            for (auto el : sets[i]) {
                if (el >= universe)
                    throw std::runtime_error("coverage: element id " + std::to_string(el) +
                                             " outside universe of size " + std::to_string(universe));
                masks[i * blocks + (el >> 6)] |= 1ull << (el & 63);
            }
    }
};

inline double coverage_value(const CoverageInstance& inst, const Genotype& x) {
    if (x.size() != inst.n) throw std::invalid_argument("coverage_value: length mismatch");
    std::uint64_t acc_small = 0;
    if (inst.blocks == 1) {  // common case: |U| <= 64
        for (std::size_t i = 0; i < inst.n; ++i)
            if (x.test(i)) acc_small |= inst.masks[i];
        return static_cast<double>(std::popcount(acc_small));
    }
    std::vector<std::uint64_t> acc(inst.blocks, 0ull);
    for (std::size_t i = 0; i < inst.n; ++i)
        if (x.test(i))
            for (std::size_t b = 0; b < inst.blocks; ++b) acc[b] |= inst.masks[i * inst.blocks + b];
    std::size_t c = 0;
    for (auto w : acc) c += static_cast<std::size_t>(std::popcount(w));
    return static_cast<double>(c);
}

/// Union value of an explicit element subset given as a set-index mask
/// (used by the small-n oracles).
inline double coverage_value_mask(const CoverageInstance& inst, std::uint64_t set_mask) {
    std::vector<std::uint64_t> acc(inst.blocks, 0ull);
    for (std::size_t i = 0; i < inst.n; ++i)
        if ((set_mask >> i) & 1u)
            for (std::size_t b = 0; b < inst.blocks; ++b) acc[b] |= inst.masks[i * inst.blocks + b];
    std::size_t c = 0;
    for (auto w : acc) c += static_cast<std::size_t>(std::popcount(w));
    return static_cast<double>(c);
}

/// Plain-text format: header "n |U| r", then n lines of space-separated
/// element ids (a line may be empty for an empty set).
inline CoverageInstance parse_coverage(std::istream& in) {
    CoverageInstance inst;
    std::string header;
    while (std::getline(in, header)) {
        if (!header.empty() && header[0] != '#') break;
    }
    std::istringstream hs(header);
    if (!(hs >> inst.n >> inst.universe >> inst.r))
        throw std::runtime_error("coverage: bad header, expected 'n |U| r'");
    if (inst.n == 0 || inst.universe == 0 || inst.r < 1)
        throw std::runtime_error("coverage: header values must be positive");
    inst.sets.resize(inst.n);
    for (std::size_t i = 0; i < inst.n; ++i) {
        std::string line;
        if (!std::getline(in, line))
            throw std::runtime_error("coverage: expected " + std::to_string(inst.n) + " set lines");
        std::istringstream ls(line);
        std::uint32_t el;
        while (ls >> el) inst.sets[i].push_back(el);
    }
    inst.build_masks();
    return inst;
}

inline CoverageInstance load_coverage(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("coverage: cannot open " + path);
    return parse_coverage(in);
}

inline void write_coverage(std::ostream& out, const CoverageInstance& inst) {
    out << inst.n << ' ' << inst.universe << ' ' << inst.r << '\n';
    for (const auto& s : inst.sets) {
        for (std::size_t j = 0; j < s.size(); ++j) out << (j ? " " : "") << s[j];
        out << '\n';
    }
}

inline void save_coverage(const std::string& path, const CoverageInstance& inst) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("coverage: cannot write " + path);
    write_coverage(out, inst);
}

/// Random instance: each set includes each element independently with a
/// per-set probability drawn from [0.25, 0.50]; empty sets are topped up with
/// one random element.
inline CoverageInstance random_coverage(std::size_t n, std::size_t universe, std::size_t r,
                                        RandomSource& rng) {
    if (n == 0 || universe == 0 || r < 1)
        throw std::invalid_argument("random_coverage: need n, |U|, r >= 1");
    CoverageInstance inst;
    inst.n = n;
    inst.universe = universe;
    inst.r = r;
    inst.sets.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double q = 0.25 + 0.25 * rng.unit();
        for (std::uint32_t el = 0; el < universe; ++el)
            if (rng.bernoulli(q)) inst.sets[i].push_back(el);
        if (inst.sets[i].empty())
            inst.sets[i].push_back(static_cast<std::uint32_t>(rng.below(universe)));
    }
    inst.build_masks();
    return inst;
}

/// Archive fitness for submodular runs is the set function itself; the
/// cardinality constraint only filters reporting via best_feasible.
inline Problem make_coverage_problem(const CoverageInstance& inst) {
    Problem p;
    p.name = "coverage";
    p.n = inst.n;
    p.eval = [&inst](const Genotype& x) { return coverage_value(inst, x); };
    return p;
}

// ---------------------------------------------------------------------------
// Minimum spanning tree
// ---------------------------------------------------------------------------

/// Negated total weight of the selected edges, so the archive's maximisation
/// rule searches for minimum weight. Reports un-negate.
inline double mst_fitness(const WeightedGraph& g, const Genotype& x) {
    if (x.size() != g.n_edges()) throw std::invalid_argument("mst_fitness: length mismatch");
    std::uint64_t s = 0;
    for (std::size_t i = 0; i < g.edges.size(); ++i)
        if (x.test(i)) s += g.edges[i].w;
    return -static_cast<double>(s);
}

/// `optimum_fitness` is -w(MST) when hunting the spanning tree, or 0 when the
/// target is the empty edge set (the only genotype with fitness 0). A weight
/// threshold alone cannot identify the MST (sparse edge sets also weigh
/// little), so the spanning-tree target additionally demands connectivity;
/// a connected selection of weight w(MST) is necessarily the unique MST.
inline Problem make_mst_problem(const WeightedGraph& g, std::optional<double> optimum_fitness,
                                std::string name = "mst") {
    Problem p;
    p.name = std::move(name);
    p.n = g.n_edges();
    p.eval = [&g](const Genotype& x) { return mst_fitness(g, x); };
    p.optimum = optimum_fitness;
    if (optimum_fitness && *optimum_fitness < 0.0) {
        p.is_global_opt_fn = [&g, opt = *optimum_fitness](const Genotype& x, double fitness) {
            return fitness >= opt - 1e-9 && cc_count(g, x) == 1;
        };
    }
    return p;
}

// ---------------------------------------------------------------------------
// Feasible-best extraction for cardinality-constrained runs
// ---------------------------------------------------------------------------

/// Best elite among cells 0..r of a NoO(1) archive, i.e. the best stored
/// solution with |x|_1 <= r. Cells above r are ignored for approximation
/// reporting. Empty feasible region yields nothing.
inline std::optional<Elite> best_feasible(const Archive& archive, std::size_t r) {
    const auto& space = archive.space();
    if (space.kind() != FeatureSpace::Kind::NumberOfOnes || space.granularity() != 1)
        throw std::logic_error("best_feasible: requires the NoO(1) feature space");
    std::optional<Elite> best;
    std::size_t top = std::min(r, archive.cell_count() - 1);
    for (std::size_t i = 0; i <= top; ++i) {
        const auto& c = archive.cell(i);
        if (c && (!best || c->fitness > best->fitness)) best = *c;
    }
    return best;
}

}  // namespace qdlab
