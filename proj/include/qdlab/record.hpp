#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace qdlab {

/// Per-run trace: the evaluation counts at which each watched milestone was
/// first reached, plus end-of-run payloads. Milestones are counted in
/// function evaluations (the initial sample is evaluation 1), never in
/// iterations. Optimal coverage, when recorded, is the largest of the three
/// hitting times.
struct RunRecord {
    std::string config_id;
    std::string problem;
    std::size_t n = 0;
    std::string k_or_cc;  // granularity k for NoO spaces, node count for CC spaces
    double p_m = 0.0;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;

    std::optional<std::uint64_t> t_cover;
    std::optional<std::uint64_t> t_opt;
    std::optional<std::uint64_t> t_copt;
    std::optional<std::uint64_t> t_approx;

    std::optional<double> final_best_feasible;
    std::optional<double> final_mst_weight;

    bool truncated = false;
    std::uint64_t wall_ns = 0;
};

}  // namespace qdlab
