#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qdlab/bits.hpp"
#include "qdlab/graph.hpp"
#include "qdlab/rng.hpp"

namespace qdlab {

/// Cell-index function over genotypes. Two kinds:
///  - NumberOfOnes(k): cell i holds solutions with |x|_1 in [ik, (i+1)k-1];
///    L = (n+1)/k cells, k must divide n+1.
///  - ConnectedComponents(graph): cell i holds solutions whose selected edge
///    set has i+1 connected components; L = node count.
/// Indices are 0-based internally; reports may relabel 1-based.
class FeatureSpace {
public:
    enum class Kind { NumberOfOnes, ConnectedComponents };

    static FeatureSpace number_of_ones(std::size_t n, std::size_t k) {
        if (n == 0) throw std::invalid_argument("FeatureSpace: n must be >= 1");
        if (k < 1 || k > n + 1)
            throw std::invalid_argument("FeatureSpace: k=" + std::to_string(k) +
                                        " outside [1, n+1] for n=" + std::to_string(n));
        if ((n + 1) % k != 0)
            throw std::invalid_argument("FeatureSpace: granularity k=" + std::to_string(k) +
                                        " does not divide n+1=" + std::to_string(n + 1));
        FeatureSpace s;
        s.kind_ = Kind::NumberOfOnes;
        s.n_ = n;
        s.k_ = k;
        s.cells_ = (n + 1) / k;
        return s;
    }

    /// The graph reference must outlive the feature space.
    static FeatureSpace connected_components(const WeightedGraph& g) {
        FeatureSpace s;
        s.kind_ = Kind::ConnectedComponents;
        s.n_ = g.n_edges();
        s.graph_ = &g;
        s.cells_ = g.n_nodes;
        return s;
    }

    Kind kind() const { return kind_; }
    std::size_t genotype_length() const { return n_; }
    std::size_t granularity() const { return k_; }
    const WeightedGraph* graph() const { return graph_; }

    std::size_t cell_count() const { return cells_; }

    std::size_t cell_index(const Genotype& x) const {
        if (x.size() != n_)
            throw std::invalid_argument("cell_index: genotype length " + std::to_string(x.size()) +
                                        " incompatible with space length " + std::to_string(n_));
        if (kind_ == Kind::NumberOfOnes) return x.ones() / k_;
        return cc_count(*graph_, x) - 1;
    }

private:
    Kind kind_ = Kind::NumberOfOnes;
    std::size_t n_ = 0;
    std::size_t k_ = 1;
    std::size_t cells_ = 0;
    const WeightedGraph* graph_ = nullptr;
};

enum class OfferOutcome { NewCell, Replaced, Rejected };

struct Elite {
    Genotype genotype;
    double fitness = 0.0;
};

struct OfferResult {
    OfferOutcome outcome;
    std::size_t cell;
};

/// The elite map M: one best-so-far solution per cell, maximisation
/// orientation. Cells never empty out, so the covered-cell index list is
/// append-only and parent sampling is O(1).
class Archive {
public:
    explicit Archive(const FeatureSpace& space)
        : space_(&space), cells_(space.cell_count()) {}

    const FeatureSpace& space() const { return *space_; }
    std::size_t cell_count() const { return cells_.size(); }
    std::size_t covered() const { return covered_cells_.size(); }
    const std::vector<std::uint32_t>& covered_cells() const { return covered_cells_; }
    const std::optional<Elite>& cell(std::size_t i) const { return cells_[i]; }

    /// Algorithm step acceptance: an empty target cell stores y
    /// unconditionally; an occupied cell stores y iff f(y) >= f(z).
    OfferResult offer(const Genotype& y, double f_y) {
        std::size_t idx = space_->cell_index(y);
        auto& slot = cells_[idx];
        if (!slot) {
            slot = Elite{y, f_y};
            covered_cells_.push_back(static_cast<std::uint32_t>(idx));
            return {OfferOutcome::NewCell, idx};
        }
        if (f_y >= slot->fitness) {
            slot->genotype = y;
            slot->fitness = f_y;
            return {OfferOutcome::Replaced, idx};
        }
        return {OfferOutcome::Rejected, idx};
    }

    /// Uniform over covered cells (not over all L cells).
    const Elite& sample_parent(RandomSource& rng) const {
        if (covered_cells_.empty())
            throw std::logic_error("sample_parent: archive is empty");
        std::size_t pick = covered_cells_.size() == 1
                               ? 0
                               : static_cast<std::size_t>(rng.below(covered_cells_.size()));
        return *cells_[covered_cells_[pick]];
    }

    /// Parent of a given rank among covered cells, in coverage order.
    /// Testing seam for coupled-randomness harnesses.
    const Elite& parent_at(std::size_t rank) const { return *cells_[covered_cells_.at(rank)]; }

private:
    const FeatureSpace* space_;
    std::vector<std::optional<Elite>> cells_;
    std::vector<std::uint32_t> covered_cells_;
};

}  // namespace qdlab
