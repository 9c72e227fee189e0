#pragma once

#include <atomic>
#include <cmath>
#include <condition_variable>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "qdlab/engines.hpp"
#include "qdlab/oracles.hpp"
#include "qdlab/problems.hpp"
#include "qdlab/record.hpp"
#include "qdlab/stats.hpp"

namespace qdlab {

// ---------------------------------------------------------------------------
// Work distribution
// ---------------------------------------------------------------------------

/// Runs f(0..count-1) on up to `threads` workers pulling from a shared
/// counter. threads = 0 means hardware concurrency. Tasks must be
/// independent; determinism comes from per-task (seed, stream) addressing,
/// never from schedule order.
template <class F>
inline void parallel_for(std::size_t count, std::size_t threads, F&& f) {
    if (count == 0) return;
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, count);
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::mutex error_mutex;
    for (std::size_t t = 0; t < threads; ++t)
        pool.emplace_back([&]() {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    f(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

// ---------------------------------------------------------------------------
// Sweep configuration
// ---------------------------------------------------------------------------

inline constexpr double kOneMinusInvE = 0.63212055882855767840;

/// Declarative sweep description; mirrors the config file keys one-to-one.
struct SweepConfig {
    std::string config_id = "sweep";
    std::string problem = "onemax";      // onemax | jump:<g> | cliff:<d> | trap | linear
                                         // | coverage | mst | mstzero
    std::string space = "noo";           // noo | cc
    std::size_t k = 1;                   // NoO granularity
    double pm_c = 1.0;                   // p_m = pm_c / n
    std::vector<std::size_t> grid;       // n values for synthetic problems
    std::vector<std::string> instances;  // instance files for coverage/mst problems
    std::size_t reps = 30;
    std::string stop;                    // any of: cover opt copt approx (budget always applies)
    double alpha = kOneMinusInvE;        // approximation milestone target
    std::uint64_t budget = 0;            // explicit cap; 0 = budget_factor * leading bound
    double budget_factor = 50.0;
    std::string copt = "auto";           // auto | off
    std::uint64_t master_seed = 1;
    std::string out;                     // CSV path; empty = stdout
    std::size_t threads = 0;
};

namespace detail {

inline std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ' ' || c == '\t' || c == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

inline std::uint64_t parse_u64(const std::string& s, const std::string& key) {
    try {
        std::size_t pos = 0;
        std::uint64_t v = std::stoull(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (...) {
        throw std::runtime_error("config: bad integer for '" + key + "': " + s);
    }
}

inline double parse_f64(const std::string& s, const std::string& key) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (...) {
        throw std::runtime_error("config: bad number for '" + key + "': " + s);
    }
}

}  // namespace detail

/// Parses the declarative "key = value" format; '#' starts a comment.
/// Unknown keys are errors so that typos cannot silently change a sweep.
inline SweepConfig parse_sweep_config(std::istream& in) {
    SweepConfig cfg;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config line " + std::to_string(lineno) +
                                     ": expected 'key = value'");
        std::string key = detail::trim(line.substr(0, eq));
        std::string value = detail::trim(line.substr(eq + 1));
        if (key == "config_id") cfg.config_id = value;
        else if (key == "problem") cfg.problem = value;
        else if (key == "space") cfg.space = value;
        else if (key == "k") cfg.k = detail::parse_u64(value, key);
        else if (key == "pm_c") cfg.pm_c = detail::parse_f64(value, key);
        else if (key == "grid") {
            cfg.grid.clear();
            for (const auto& tok : detail::split_list(value))
                cfg.grid.push_back(detail::parse_u64(tok, key));
        } else if (key == "instances") cfg.instances = detail::split_list(value);
        else if (key == "reps") cfg.reps = detail::parse_u64(value, key);
        else if (key == "stop") cfg.stop = value;
        else if (key == "alpha") cfg.alpha = detail::parse_f64(value, key);
        else if (key == "budget") cfg.budget = detail::parse_u64(value, key);
        else if (key == "budget_factor") cfg.budget_factor = detail::parse_f64(value, key);
        else if (key == "copt") cfg.copt = value;
        else if (key == "master_seed") cfg.master_seed = detail::parse_u64(value, key);
        else if (key == "out") cfg.out = value;
        else if (key == "threads") cfg.threads = detail::parse_u64(value, key);
        else throw std::runtime_error("config line " + std::to_string(lineno) +
                                      ": unknown key '" + key + "'");
    }
    return cfg;
}

inline SweepConfig load_sweep_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path);
    return parse_sweep_config(in);
}

// ---------------------------------------------------------------------------
// Grid-point materialisation
// ---------------------------------------------------------------------------

/// One fully wired experiment: problem + space + milestone info + budget.
/// Owns any instance data its lambdas reference, so it must stay put
/// (held by unique_ptr) while runs execute.
struct GridPoint {
    std::string problem_label;
    std::size_t n = 0;
    std::string k_or_cc;
    double p_m = 0.0;
    std::uint64_t budget = 0;

    Problem problem;
    std::optional<FeatureSpace> space;
    std::optional<std::vector<double>> cell_opt;
    std::optional<ApproxGoal> approx;
    std::optional<std::size_t> feasible_r;  // report best_feasible over cells 0..r
    bool is_mst = false;

    bool stop_on_cover = false, stop_on_opt = false, stop_on_copt = false, stop_on_approx = false;

    std::shared_ptr<WeightedGraph> graph;
    std::shared_ptr<CoverageInstance> coverage;
};

namespace detail {

inline std::pair<std::string, std::optional<std::uint64_t>> split_problem_token(
    const std::string& label) {
    auto colon = label.find(':');
    if (colon == std::string::npos) return {label, std::nullopt};
    return {label.substr(0, colon), parse_u64(label.substr(colon + 1), "problem parameter")};
}

inline void apply_stop_tokens(const std::string& stop, GridPoint& gp) {
    for (const auto& tok : split_list(stop)) {
        if (tok == "cover") gp.stop_on_cover = true;
        else if (tok == "opt") gp.stop_on_opt = true;
        else if (tok == "copt") gp.stop_on_copt = true;
        else if (tok == "approx") gp.stop_on_approx = true;
        else throw std::runtime_error("config: unknown stop token '" + tok + "'");
    }
}

}  // namespace detail

/// Builds the grid point at `index`. For synthetic problems the index walks
/// cfg.grid; for instance problems it walks cfg.instances.
inline std::unique_ptr<GridPoint> build_grid_point(const SweepConfig& cfg, std::size_t index) {
    auto gp = std::make_unique<GridPoint>();
    auto [token, param] = detail::split_problem_token(cfg.problem);
    gp->problem_label = cfg.problem;

    bool instance_based = (token == "coverage" || token == "mst" || token == "mstzero");
    if (instance_based) {
        if (index >= cfg.instances.size()) throw std::out_of_range("grid index out of range");
    } else {
        if (index >= cfg.grid.size()) throw std::out_of_range("grid index out of range");
    }

    if (token == "coverage") {
        if (cfg.space != "noo" || cfg.k != 1)
            throw std::runtime_error("config: coverage runs need space=noo and k=1");
        gp->coverage = std::make_shared<CoverageInstance>(load_coverage(cfg.instances[index]));
        gp->problem = make_coverage_problem(*gp->coverage);
        gp->n = gp->problem.n;
        gp->space = FeatureSpace::number_of_ones(gp->n, 1);
        gp->k_or_cc = "1";
        gp->feasible_r = gp->coverage->r;
        double opt_value = gp->n <= 20 ? exhaustive_best_coverage(*gp->coverage, gp->coverage->r)
                                       : greedy_submodular(*gp->coverage).value;
        gp->approx = ApproxGoal{cfg.alpha, opt_value, gp->coverage->r};
    } else if (token == "mst" || token == "mstzero") {
        if (cfg.space != "cc") throw std::runtime_error("config: MST runs need space=cc");
        gp->graph = std::make_shared<WeightedGraph>(load_graph(cfg.instances[index]));
        double optimum = token == "mst" ? -static_cast<double>(kruskal(*gp->graph).weight) : 0.0;
        gp->problem = make_mst_problem(*gp->graph, optimum, token);
        gp->n = gp->problem.n;
        gp->space = FeatureSpace::connected_components(*gp->graph);
        gp->k_or_cc = std::to_string(gp->graph->n_nodes);
        gp->is_mst = true;
    } else {
        std::size_t n = cfg.grid[index];
        if (cfg.space != "noo") throw std::runtime_error("config: problem '" + token +
                                                         "' needs space=noo");
        if (token == "onemax") gp->problem = make_onemax(n);
        else if (token == "jump") gp->problem = make_jump(n, param.value_or(3));
        else if (token == "cliff") gp->problem = make_cliff(n, param.value_or(std::max<std::size_t>(1, n / 3)));
        else if (token == "trap") gp->problem = make_trap(n);
        else if (token == "linear") {
            // deterministic positive weights per (master_seed, n)
            RandomSource wrng(cfg.master_seed, (1ull << 32) + n);
            std::vector<double> ws(n);
            for (auto& w : ws) w = 1.0 + 9.0 * wrng.unit();
            gp->problem = make_linear(std::move(ws));
        } else {
            throw std::runtime_error("config: unknown problem '" + token + "'");
        }
        gp->n = n;
        gp->space = FeatureSpace::number_of_ones(n, cfg.k);  // validates k | n+1, names both
        gp->k_or_cc = std::to_string(cfg.k);
    }

    gp->p_m = cfg.pm_c / static_cast<double>(gp->n);
    if (!(gp->p_m > 0.0) || !(gp->p_m < 1.0))
        throw std::runtime_error("config: pm_c/n must land in (0,1)");

    // optimal-coverage detection where structure permits
    if (cfg.copt == "auto") {
        if (gp->problem.unitation && gp->space->kind() == FeatureSpace::Kind::NumberOfOnes)
            gp->cell_opt = cell_optima_unitation(gp->problem, *gp->space);
        else if (gp->n <= 16)
            gp->cell_opt = cell_optima_bruteforce(gp->problem, *gp->space);
    } else if (cfg.copt != "off") {
        throw std::runtime_error("config: copt must be 'auto' or 'off'");
    }

    detail::apply_stop_tokens(cfg.stop, *gp);
    if (gp->stop_on_opt && !gp->problem.optimum)
        throw std::runtime_error("config: stop=opt but the problem has no known optimum");
    if (gp->stop_on_copt && !gp->cell_opt)
        throw std::runtime_error("config: stop=copt but per-cell optima are unavailable");
    if (gp->stop_on_approx && !gp->approx)
        throw std::runtime_error("config: stop=approx is only meaningful for coverage runs");

    if (cfg.budget > 0) {
        gp->budget = cfg.budget;
    } else {
        BoundParams bp;
        bp.n = gp->n;
        bp.k = cfg.k;
        bp.p_m = gp->p_m;
        double bound;
        if (token == "coverage") {
            bp.r = gp->coverage->r;
            bound = bound_value("submod", bp);
        } else if (token == "mst") {
            bp.n_nodes = gp->graph->n_nodes;
            bp.m_edges = gp->graph->n_edges();
            bound = bound_value("mst_opt", bp);
        } else if (token == "mstzero") {
            bp.n_nodes = gp->graph->n_nodes;
            bp.m_edges = gp->graph->n_edges();
            bp.w_max = gp->graph->max_weight();
            bound = bound_value("mst_zero", bp);
        } else {
            bound = bound_value(cfg.k == 1 ? "cover_k1" : "cover_k", bp);
        }
        gp->budget = static_cast<std::uint64_t>(std::ceil(cfg.budget_factor * bound));
    }
    if (gp->budget == 0) throw std::runtime_error("config: budget resolved to 0");
    return gp;
}

inline std::size_t grid_size(const SweepConfig& cfg) {
    auto [token, param] = detail::split_problem_token(cfg.problem);
    (void)param;
    bool instance_based = (token == "coverage" || token == "mst" || token == "mstzero");
    std::size_t g = instance_based ? cfg.instances.size() : cfg.grid.size();
    if (g == 0) throw std::runtime_error("config: empty grid/instances");
    return g;
}

// ---------------------------------------------------------------------------
// Single run and sweep execution
// ---------------------------------------------------------------------------

/// Executes one replication of a grid point with an explicit (seed, stream)
/// address, so any CSV row can be re-created in isolation.
inline RunRecord run_grid_point_stream(const GridPoint& gp, const SweepConfig& cfg,
                                       std::uint64_t stream) {
    QdRunOptions opt;
    opt.budget = gp.budget;
    opt.stop_on_cover = gp.stop_on_cover;
    opt.stop_on_opt = gp.stop_on_opt;
    opt.stop_on_copt = gp.stop_on_copt;
    opt.stop_on_approx = gp.stop_on_approx;
    if (gp.cell_opt) opt.cell_opt = &*gp.cell_opt;
    opt.approx = gp.approx;

    RandomSource rng(cfg.master_seed, stream);
    QdRunOutput out = qd_run(gp.problem, *gp.space, gp.p_m, opt, rng);

    RunRecord rec = std::move(out.record);
    rec.config_id = cfg.config_id;
    rec.problem = gp.problem_label;
    rec.k_or_cc = gp.k_or_cc;
    rec.seed = cfg.master_seed;
    rec.stream = stream;
    if (gp.feasible_r) {
        auto best = best_feasible(out.archive, *gp.feasible_r);
        if (best) rec.final_best_feasible = best->fitness;
    }
    if (gp.is_mst) {
        const auto& tree_cell = out.archive.cell(0);  // cc = 1
        if (tree_cell) rec.final_mst_weight = -tree_cell->fitness;
    }
    return rec;
}

/// Sweep replication addressing: stream = grid_index * R + rep.
inline RunRecord run_grid_point(const GridPoint& gp, const SweepConfig& cfg,
                                std::size_t grid_index, std::size_t rep) {
    return run_grid_point_stream(gp, cfg, static_cast<std::uint64_t>(grid_index) * cfg.reps + rep);
}

/// R independent runs per grid point, parallel across replications, streamed
/// to `sink` (when given) in (grid_index, rep) order regardless of completion
/// order. Deterministic for a fixed master seed.
inline std::vector<RunRecord> run_sweep(const SweepConfig& cfg, std::ostream* sink = nullptr);

// ---------------------------------------------------------------------------
// CSV schema
// ---------------------------------------------------------------------------

inline const char* kCsvHeader =
    "config_id,problem,n,k_or_cc,p_m,seed,stream,t_cover,t_opt,t_copt,t_approx,"
    "final_best_feasible,final_mst_weight,truncated,wall_ns";

namespace detail {

inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

inline std::string opt_u64(const std::optional<std::uint64_t>& v) {
    return v ? std::to_string(*v) : std::string();
}

inline std::string opt_f64(const std::optional<double>& v) {
    return v ? format_double(*v) : std::string();
}

}  // namespace detail

inline std::string csv_row(const RunRecord& r) {
    std::ostringstream os;
    os << r.config_id << ',' << r.problem << ',' << r.n << ',' << r.k_or_cc << ','
       << detail::format_double(r.p_m) << ',' << r.seed << ',' << r.stream << ','
       << detail::opt_u64(r.t_cover) << ',' << detail::opt_u64(r.t_opt) << ','
       << detail::opt_u64(r.t_copt) << ',' << detail::opt_u64(r.t_approx) << ','
       << detail::opt_f64(r.final_best_feasible) << ',' << detail::opt_f64(r.final_mst_weight)
       << ',' << (r.truncated ? 1 : 0) << ',' << r.wall_ns;
    return os.str();
}

inline void write_csv(std::ostream& out, const std::vector<RunRecord>& records) {
    out << kCsvHeader << '\n';
    for (const auto& r : records) out << csv_row(r) << '\n';
}

inline std::vector<RunRecord> read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("csv: empty input");
    if (detail::trim(line) != kCsvHeader)
        throw std::runtime_error("csv: unexpected header (schema mismatch)");
    std::vector<RunRecord> records;
    while (std::getline(in, line)) {
        if (detail::trim(line).empty()) continue;
        std::vector<std::string> f;
        std::string cur;
        for (char c : line) {
            if (c == ',') {
                f.push_back(cur);
                cur.clear();
            } else
                cur.push_back(c);
        }
        f.push_back(cur);
        if (f.size() != 15) throw std::runtime_error("csv: expected 15 fields, got " +
                                                     std::to_string(f.size()));
        RunRecord r;
        r.config_id = f[0];
        r.problem = f[1];
        r.n = detail::parse_u64(f[2], "n");
        r.k_or_cc = f[3];
        r.p_m = detail::parse_f64(f[4], "p_m");
        r.seed = detail::parse_u64(f[5], "seed");
        r.stream = detail::parse_u64(f[6], "stream");
        auto opt_u = [](const std::string& s) -> std::optional<std::uint64_t> {
            if (s.empty()) return std::nullopt;
            return detail::parse_u64(s, "milestone");
        };
        auto opt_f = [](const std::string& s) -> std::optional<double> {
            if (s.empty()) return std::nullopt;
            return detail::parse_f64(s, "payload");
        };
        r.t_cover = opt_u(f[7]);
        r.t_opt = opt_u(f[8]);
        r.t_copt = opt_u(f[9]);
        r.t_approx = opt_u(f[10]);
        r.final_best_feasible = opt_f(f[11]);
        r.final_mst_weight = opt_f(f[12]);
        r.truncated = detail::parse_u64(f[13], "truncated") != 0;
        r.wall_ns = detail::parse_u64(f[14], "wall_ns");
        records.push_back(std::move(r));
    }
    return records;
}

inline std::vector<RunRecord> run_sweep(const SweepConfig& cfg, std::ostream* sink) {
    std::size_t g = grid_size(cfg);
    if (cfg.reps == 0) throw std::runtime_error("config: reps must be >= 1");

    std::vector<std::unique_ptr<GridPoint>> points;
    points.reserve(g);
    for (std::size_t i = 0; i < g; ++i) points.push_back(build_grid_point(cfg, i));

    std::size_t total = g * cfg.reps;
    std::vector<std::optional<RunRecord>> slots(total);
    std::mutex m;
    std::condition_variable cv;
    std::size_t done = 0;

    std::thread pump([&]() {
        parallel_for(total, cfg.threads, [&](std::size_t t) {
            RunRecord rec = run_grid_point(*points[t / cfg.reps], cfg, t / cfg.reps, t % cfg.reps);
            {
                std::lock_guard<std::mutex> lock(m);
                slots[t] = std::move(rec);
                ++done;
            }
            cv.notify_one();
        });
    });

    // stream rows in fixed (grid_index, rep) order as they become available
    if (sink) *sink << kCsvHeader << '\n';
    std::vector<RunRecord> records;
    records.reserve(total);
    for (std::size_t i = 0; i < total; ++i) {
        std::unique_lock<std::mutex> lock(m);
        cv.wait(lock, [&]() { return slots[i].has_value(); });
        RunRecord rec = std::move(*slots[i]);
        slots[i].reset();
        lock.unlock();
        if (sink) *sink << csv_row(rec) << '\n';
        records.push_back(std::move(rec));
    }
    pump.join();
    return records;
}

// ---------------------------------------------------------------------------
// Scaling fits
// ---------------------------------------------------------------------------

struct FitGroup {
    std::size_t n = 0;
    std::string k_or_cc;
    std::size_t count = 0;      // non-truncated runs with the milestone present
    std::size_t truncated = 0;  // truncated runs in the group
    double mean = 0.0;
    double median = 0.0;
    Interval ci;
    double bound = 0.0;
    double ratio = 0.0;
};

struct FitResult {
    std::string bound_id;
    std::string milestone;
    std::vector<FitGroup> groups;
    double ratio_spread = 0.0;
    double slope = 0.0;         // log mean vs log bound
    double range_factor = 0.0;  // max n / min n
    bool reliable = false;      // truncation <= 5% in every group
};

inline std::optional<std::uint64_t> milestone_of(const RunRecord& r, const std::string& name) {
    if (name == "t_cover") return r.t_cover;
    if (name == "t_opt") return r.t_opt;
    if (name == "t_copt") return r.t_copt;
    if (name == "t_approx") return r.t_approx;
    throw std::invalid_argument("milestone_of: unknown milestone '" + name + "'");
}

/// Groups records by (n, k_or_cc), compares group means against the named
/// leading-order bound and fits the log-log slope. Requires >= 3 groups with
/// >= 30 usable runs each; truncated runs are counted, never silently
/// dropped, and more than 5% of them in any group marks the fit unreliable.
inline FitResult fit_scaling(const std::vector<RunRecord>& records, const std::string& bound_id,
                             const std::string& milestone = "t_cover",
                             const BoundParams& extra = {}) {
    if (records.empty()) throw std::invalid_argument("fit_scaling: no records");

    std::map<std::pair<std::size_t, std::string>, std::vector<const RunRecord*>> by_group;
    for (const auto& r : records) by_group[{r.n, r.k_or_cc}].push_back(&r);
    if (by_group.size() < 3)
        throw std::invalid_argument("fit_scaling: need >= 3 grid points, got " +
                                    std::to_string(by_group.size()));

    FitResult fit;
    fit.bound_id = bound_id;
    fit.milestone = milestone;
    fit.reliable = true;

    RandomSource ci_rng(0xC1C1C1C1ull, 0);
    for (auto& [key, rows] : by_group) {
        FitGroup grp;
        grp.n = key.first;
        grp.k_or_cc = key.second;
        std::vector<double> values;
        for (const RunRecord* r : rows) {
            if (r->truncated) {
                ++grp.truncated;
                continue;
            }
            auto t = milestone_of(*r, milestone);
            if (!t)
                throw std::invalid_argument("fit_scaling: non-truncated record lacks " + milestone);
            values.push_back(static_cast<double>(*t));
        }
        if (values.size() < 30)
            throw std::invalid_argument("fit_scaling: group n=" + std::to_string(grp.n) +
                                        " has fewer than 30 usable runs");
        grp.count = values.size();
        grp.mean = mean(values);
        grp.median = median(values);
        grp.ci = bootstrap_mean_ci(values, 0.95, 2000, ci_rng);

        BoundParams bp = extra;
        bp.n = grp.n;
        bp.p_m = rows.front()->p_m;
        if (bound_id == "cover_k" || bound_id == "cover_k1")
            bp.k = static_cast<std::size_t>(detail::parse_u64(grp.k_or_cc, "k_or_cc"));
        if (bound_id == "mst_zero" || bound_id == "mst_opt") {
            bp.n_nodes = static_cast<std::size_t>(detail::parse_u64(grp.k_or_cc, "k_or_cc"));
            bp.m_edges = grp.n;
            if (bp.w_max == 0) bp.w_max = grp.n;  // permutation weights default
        }
        grp.bound = bound_value(bound_id, bp);
        grp.ratio = grp.mean / grp.bound;

        double trunc_frac = static_cast<double>(grp.truncated) /
                            static_cast<double>(grp.truncated + grp.count);
        if (trunc_frac > 0.05) fit.reliable = false;
        fit.groups.push_back(std::move(grp));
    }

    double rmin = fit.groups.front().ratio, rmax = rmin;
    std::size_t nmin = fit.groups.front().n, nmax = nmin;
    std::vector<double> log_bound, log_mean;
    for (const auto& g : fit.groups) {
        rmin = std::min(rmin, g.ratio);
        rmax = std::max(rmax, g.ratio);
        nmin = std::min(nmin, g.n);
        nmax = std::max(nmax, g.n);
        log_bound.push_back(std::log(g.bound));
        log_mean.push_back(std::log(g.mean));
    }
    fit.ratio_spread = rmax / rmin;
    fit.slope = regression_slope(log_bound, log_mean);
    fit.range_factor = static_cast<double>(nmax) / static_cast<double>(nmin);
    return fit;
}

/// Operationalised Theta-claim: stable ratios over a wide enough grid.
inline bool theta_pass(const FitResult& fit, double max_spread = 2.5, double min_range = 8.0) {
    return fit.reliable && fit.ratio_spread <= max_spread && fit.range_factor >= min_range;
}

}  // namespace qdlab
