#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "qdlab/lab.hpp"

namespace qdlab {

enum class VerifyLevel { fast, full };

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string details;
    double seconds = 0.0;
};

namespace detail {

inline CheckResult timed_check(const std::string& name,
                               const std::function<std::pair<bool, std::string>()>& body) {
    auto t0 = std::chrono::steady_clock::now();
    CheckResult res;
    res.name = name;
    try {
        auto [pass, details] = body();
        res.pass = pass;
        res.details = details;
    } catch (const std::exception& e) {
        res.pass = false;
        res.details = std::string("exception: ") + e.what();
    }
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

inline std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// P1: decaying-jump inequality, exact transition probabilities
// ---------------------------------------------------------------------------

inline CheckResult check_p1_decay(VerifyLevel level) {
    return detail::timed_check("P1 transition-decay inequality", [&]() {
        std::vector<std::size_t> ns = level == VerifyLevel::full
                                          ? std::vector<std::size_t>{10, 30, 60}
                                          : std::vector<std::size_t>{10, 30};
        std::vector<double> cs = level == VerifyLevel::full ? std::vector<double>{1.0, 2.0}
                                                            : std::vector<double>{1.0};
        std::size_t checked = 0, violations = 0;
        for (std::size_t n : ns)
            for (double c : cs) {
                TransitionTable t(n, c / static_cast<double>(n));
                for (std::size_t i = 1; i <= n; ++i)
                    for (std::size_t j = 0; j < i; ++j)
                        for (std::size_t k = 0; k <= j; ++k) {
                            ++checked;
                            if (!check_jump_decay(t, i, j, k)) ++violations;
                        }
            }
        std::ostringstream os;
        os << checked << " (i,j,k) triples over n in {";
        for (std::size_t i = 0; i < ns.size(); ++i) os << (i ? "," : "") << ns[i];
        os << "}, p_m in {c/n : c in {";
        for (std::size_t i = 0; i < cs.size(); ++i) os << (i ? "," : "") << cs[i];
        os << "}}; violations=" << violations;
        return std::make_pair(violations == 0, os.str());
    });
}

/// Falsifiability control: a deliberately corrupted table entry must trip the
/// decay checker and the row-sum test.
inline CheckResult check_p1_negative_control() {
    return detail::timed_check("P1 negative control (corrupted table)", [&]() {
        TransitionTable t(10, 0.1);
        bool before = check_jump_decay(t, 5, 3, 2);
        t.corrupt_entry(5, 1, 1.0e9L);
        bool after = check_jump_decay(t, 5, 3, 2);
        bool row_broken = std::fabs(static_cast<double>(t.row_sum(5)) - 1.0) > 1e-12;
        bool pass = before && !after && row_broken;
        return std::make_pair(pass, std::string("decay check flips to fail and row sum breaks ") +
                                        (pass ? "as expected" : "NOT as expected"));
    });
}

// ---------------------------------------------------------------------------
// P2: oracle suite
// ---------------------------------------------------------------------------

inline CheckResult check_p2_row_sums() {
    return detail::timed_check("P2 transition rows sum to 1", [&]() {
        double worst = 0.0;
        for (std::size_t n : {10ul, 30ul, 50ul, 60ul}) {
            TransitionTable t(n, 1.0 / static_cast<double>(n));
            for (std::size_t i = 0; i <= n; ++i)
                worst = std::max(worst, std::fabs(static_cast<double>(t.row_sum(i)) - 1.0));
        }
        return std::make_pair(worst <= 1e-12,
                              "max |row sum - 1| = " + detail::fmt(worst) + " (tol 1e-12)");
    });
}

inline CheckResult check_p2_kruskal(VerifyLevel level) {
    return detail::timed_check("P2 Kruskal vs exhaustive MST", [&]() {
        std::size_t graphs = level == VerifyLevel::full ? 100 : 25;
        RandomSource rng(0x6B72, 0);
        std::size_t mismatches = 0;
        for (std::size_t g = 0; g < graphs; ++g) {
            std::size_t n = 4 + rng.below(6);  // 4..9 nodes
            std::size_t max_m = std::min<std::size_t>(n * (n - 1) / 2, 16);
            std::size_t m = (n - 1) + rng.below(max_m - (n - 1) + 1);
            WeightedGraph graph = random_connected_graph(n, m, rng);
            if (kruskal(graph).weight != exhaustive_mst_weight(graph)) ++mismatches;
        }
        return std::make_pair(mismatches == 0, std::to_string(graphs) +
                                                   " random graphs (n<=9), mismatches=" +
                                                   std::to_string(mismatches));
    });
}

inline CheckResult check_p2_greedy(VerifyLevel level) {
    return detail::timed_check("P2 greedy >= (1-1/e) * exhaustive OPT", [&]() {
        std::size_t count = level == VerifyLevel::full ? 200 : 50;
        RandomSource rng(0x9D, 0);
        std::size_t failures = 0;
        double worst_ratio = 1.0;
        for (std::size_t t = 0; t < count; ++t) {
            std::size_t n = 8 + rng.below(7);       // 8..14 sets
            std::size_t u = 15 + rng.below(16);     // 15..30 elements
            std::size_t r = 1 + rng.below(4);       // 1..4
            CoverageInstance inst = random_coverage(n, u, r, rng);
            double opt = exhaustive_best_coverage(inst, r);
            double greedy = greedy_submodular(inst).value;
            if (opt > 0.0) worst_ratio = std::min(worst_ratio, greedy / opt);
            if (greedy < kOneMinusInvE * opt - 1e-9) ++failures;
        }
        return std::make_pair(failures == 0, std::to_string(count) + " instances, worst ratio " +
                                                 detail::fmt(worst_ratio) + ", failures=" +
                                                 std::to_string(failures));
    });
}

/// Archive invariants re-asserted while an engine runs: coverage
/// non-decreasing, per-cell fitness non-decreasing, elites stored in their
/// own cells, outcome bookkeeping consistent.
inline CheckResult check_p2_archive_invariants(VerifyLevel level) {
    return detail::timed_check("P2 archive invariants under engine steps", [&]() {
        const std::size_t steps = level == VerifyLevel::full ? 1000000 : 100000;
        const std::size_t n = 33;
        RandomSource wrng(0xA5, 7);
        std::vector<double> ws(n);
        for (auto& w : ws) w = 1.0 + 9.0 * wrng.unit();
        Problem problem = make_linear(std::move(ws));
        FeatureSpace space = FeatureSpace::number_of_ones(n, 1);
        QdEngine engine(problem, space, 1.0 / n, RandomSource(0xA5, 8));
        engine.init();

        std::vector<double> best(space.cell_count(), -1.0);
        std::size_t prev_covered = engine.archive().covered();
        for (std::size_t i = 0; i < space.cell_count(); ++i)
            if (engine.archive().cell(i)) best[i] = engine.archive().cell(i)->fitness;

        std::size_t violations = 0;
        for (std::size_t s = 0; s < steps; ++s) {
            OfferResult res = engine.step();
            const Archive& a = engine.archive();
            if (a.covered() < prev_covered) ++violations;
            prev_covered = a.covered();
            const auto& cell = a.cell(res.cell);
            if (!cell) {
                ++violations;
                continue;
            }
            if (cell->fitness < best[res.cell] - 1e-12) ++violations;
            if (res.outcome == OfferOutcome::Rejected && cell->fitness != best[res.cell])
                ++violations;
            best[res.cell] = std::max(best[res.cell], cell->fitness);
            if ((s & 0xFFFF) == 0) {  // periodic deep scan
                for (std::size_t i = 0; i < a.cell_count(); ++i)
                    if (a.cell(i) && space.cell_index(a.cell(i)->genotype) != i) ++violations;
            }
        }
        if (engine.evals() != steps + 1) ++violations;
        return std::make_pair(violations == 0, std::to_string(steps) + " steps, violations=" +
                                                   std::to_string(violations));
    });
}

// ---------------------------------------------------------------------------
// E1/E2: cover-time scaling
// ---------------------------------------------------------------------------

inline CheckResult check_e1_onemax_cover(VerifyLevel level, std::size_t threads) {
    return detail::timed_check("E1 OneMax cover time, k=1", [&]() {
        SweepConfig cfg;
        cfg.config_id = "e1";
        cfg.problem = "onemax";
        cfg.k = 1;
        cfg.grid = level == VerifyLevel::full ? std::vector<std::size_t>{31, 63, 127, 255}
                                              : std::vector<std::size_t>{31, 63, 127};
        cfg.reps = level == VerifyLevel::full ? 100 : 30;
        cfg.stop = "cover";
        cfg.master_seed = 101;
        cfg.threads = threads;
        auto records = run_sweep(cfg);
        FitResult fit = fit_scaling(records, "cover_k1", "t_cover");
        bool pass = fit.reliable && fit.ratio_spread <= 2.5 && fit.slope >= 0.85 &&
                    fit.slope <= 1.15;
        std::ostringstream os;
        os << "seed=101 R=" << cfg.reps << " spread=" << detail::fmt(fit.ratio_spread)
           << " (<=2.5) slope=" << detail::fmt(fit.slope) << " (in [0.85,1.15]) ratios=[";
        for (std::size_t i = 0; i < fit.groups.size(); ++i)
            os << (i ? " " : "") << "n" << fit.groups[i].n << ":"
               << detail::fmt(fit.groups[i].ratio);
        os << "]";
        return std::make_pair(pass, os.str());
    });
}

inline CheckResult check_e2_k_scaling(VerifyLevel level, std::size_t threads) {
    return detail::timed_check("E2 k-scaling of cover time", [&]() {
        SweepConfig cfg;
        cfg.config_id = "e2k2";
        cfg.problem = "onemax";
        cfg.k = 2;
        cfg.grid = {31, 63, 95};
        cfg.reps = level == VerifyLevel::full ? 100 : 30;
        cfg.stop = "cover";
        cfg.master_seed = 102;
        cfg.threads = threads;
        auto rec2 = run_sweep(cfg);
        FitResult fit2 = fit_scaling(rec2, "cover_k", "t_cover");
        bool pass = fit2.reliable && fit2.ratio_spread <= 2.5;
        std::ostringstream os;
        os << "seed=102 R=" << cfg.reps << " k=2 spread=" << detail::fmt(fit2.ratio_spread)
           << " (<=2.5, truncation<5%)";

        if (level == VerifyLevel::full) {
            SweepConfig cfg3 = cfg;
            cfg3.config_id = "e2k3";
            cfg3.k = 3;
            cfg3.grid = {29, 59};
            auto rec3 = run_sweep(cfg3);
            std::size_t truncated = 0;
            std::map<std::size_t, std::vector<double>> by_n;
            for (const auto& r : rec3) {
                if (r.truncated) { ++truncated; continue; }
                by_n[r.n].push_back(static_cast<double>(*r.t_cover));
            }
            double trunc_frac = static_cast<double>(truncated) / static_cast<double>(rec3.size());
            pass = pass && trunc_frac < 0.05;
            os << "; k=3 truncation=" << detail::fmt(100.0 * trunc_frac) << "% (<5%) ratios=[";
            bool first = true;
            for (auto& [n, v] : by_n) {
                BoundParams bp;
                bp.n = n;
                bp.k = 3;
                bp.p_m = 1.0 / static_cast<double>(n);
                os << (first ? "" : " ") << "n" << n << ":"
                   << detail::fmt(mean(v) / bound_value("cover_k", bp));
                first = false;
            }
            os << "]";
        }
        return std::make_pair(pass, os.str());
    });
}

// ---------------------------------------------------------------------------
// E3: unitation optimisation
// ---------------------------------------------------------------------------

inline CheckResult check_e3_unitation(VerifyLevel level, std::size_t threads) {
    return detail::timed_check("E3 unitation optimisation (Trap, Jump)", [&]() {
        std::ostringstream os;
        bool pass = true;
        os << "seed=103 ";
        for (const char* prob : {"trap", "jump:3"}) {
            SweepConfig cfg;
            cfg.config_id = std::string("e3-") + prob;
            cfg.problem = prob;
            cfg.k = 1;
            cfg.grid = {31, 63, 127};
            cfg.reps = level == VerifyLevel::full ? 100 : 30;
            cfg.stop = "copt";
            cfg.master_seed = 103;
            cfg.threads = threads;
            auto records = run_sweep(cfg);

            std::size_t eq_all = 0, eq_copt_cover = 0, usable = 0;
            for (const auto& r : records) {
                if (r.truncated || !r.t_cover || !r.t_opt || !r.t_copt) continue;
                ++usable;
                if (*r.t_copt == *r.t_cover) ++eq_copt_cover;
                if (*r.t_opt == *r.t_cover && *r.t_copt == *r.t_cover) ++eq_all;
            }
            bool equal_per_run = usable == records.size() && eq_all == records.size();

            FitResult fit = fit_scaling(records, "cover_k1", "t_opt");
            bool scaling = fit.reliable && fit.ratio_spread <= 2.5 && fit.slope >= 0.85 &&
                           fit.slope <= 1.15;
            pass = pass && equal_per_run && scaling;
            os << prob << ": t_opt=t_copt=t_cover in " << eq_all << "/" << records.size()
               << " runs (t_copt=t_cover in " << eq_copt_cover << "), t_opt spread="
               << detail::fmt(fit.ratio_spread) << " slope=" << detail::fmt(fit.slope) << "; ";
        }
        return std::make_pair(pass, os.str());
    });
}

// ---------------------------------------------------------------------------
// E4: QD vs GSEMO equivalence
// ---------------------------------------------------------------------------

/// Drives QD on OneMax / NoO(1) and GSEMO on OneMinMax with shared parent
/// ranks and mutation masks; the covered one-count sets (and the stored
/// genotypes per class) must coincide after every step.
inline std::pair<bool, std::string> coupled_trajectories(std::size_t n, std::size_t steps,
                                                         std::uint64_t seed) {
    Problem onemax = make_onemax(n);
    FeatureSpace space = FeatureSpace::number_of_ones(n, 1);
    BiObjective omm = make_oneminmax(n);
    double p_m = 1.0 / static_cast<double>(n);

    // engine-internal RNGs are never drawn from; all randomness is shared
    QdEngine qd(onemax, space, p_m, RandomSource(0, 0));
    GsemoEngine gs(omm, p_m, RandomSource(0, 0));

    RandomSource rng(seed, 0);
    Genotype x0 = Genotype::uniform(n, rng);
    qd.offer_offspring(x0);
    gs.offer_offspring(x0);

    for (std::size_t s = 0; s < steps; ++s) {
        std::size_t covered = qd.archive().covered();
        if (gs.population().size() != covered)
            return {false, "population sizes diverged at step " + std::to_string(s)};
        std::size_t rank = covered == 1 ? 0 : static_cast<std::size_t>(rng.below(covered));
        const Elite& parent = qd.archive().parent_at(rank);

        const GsemoMember* twin = nullptr;
        for (const auto& mem : gs.population())
            if (mem.genotype.ones() == parent.genotype.ones()) twin = &mem;
        if (!twin || twin->genotype != parent.genotype)
            return {false, "stored genotypes diverged at step " + std::to_string(s)};

        Genotype y = mutate(parent.genotype, p_m, rng);
        qd.offer_offspring(y);
        gs.offer_offspring(y);

        std::set<std::size_t> qd_classes, gs_classes;
        for (auto cell : qd.archive().covered_cells()) qd_classes.insert(cell);
        for (const auto& mem : gs.population()) gs_classes.insert(mem.genotype.ones());
        if (qd_classes != gs_classes)
            return {false, "covered one-count sets diverged at step " + std::to_string(s)};
    }
    return {true, "identical covered sets for " + std::to_string(steps) + " steps at n=" +
                      std::to_string(n)};
}

inline CheckResult check_e4_gsemo_equivalence(VerifyLevel level, std::size_t threads) {
    return detail::timed_check("E4 QD/GSEMO cover-time equivalence", [&]() {
        const std::size_t n = 63;
        const std::size_t reps = level == VerifyLevel::full ? 300 : 60;

        SweepConfig cfg;
        cfg.config_id = "e4qd";
        cfg.problem = "onemax";
        cfg.k = 1;
        cfg.grid = {n};
        cfg.reps = reps;
        cfg.stop = "cover";
        cfg.master_seed = 104;
        cfg.threads = threads;
        auto qd_records = run_sweep(cfg);

        BoundParams bp;
        bp.n = n;
        auto budget = static_cast<std::uint64_t>(std::ceil(50.0 * bound_value("cover_k1", bp)));
        BiObjective omm = make_oneminmax(n);
        std::vector<double> gs_times(reps, 0.0);
        std::vector<char> gs_truncated(reps, 0);
        parallel_for(reps, threads, [&](std::size_t rep) {
            auto out = gsemo_run(omm, 1.0 / n, budget, RandomSource(204, rep));
            if (out.record.t_cover) gs_times[rep] = static_cast<double>(*out.record.t_cover);
            else gs_truncated[rep] = 1;
        });

        std::vector<double> qd_times;
        for (const auto& r : qd_records)
            if (!r.truncated) qd_times.push_back(static_cast<double>(*r.t_cover));
        std::vector<double> gs_ok;
        for (std::size_t i = 0; i < reps; ++i)
            if (!gs_truncated[i]) gs_ok.push_back(gs_times[i]);

        RandomSource boot(104, 999999);
        Interval qd_ci = bootstrap_mean_ci(qd_times, 0.95, 2000, boot);
        Interval gs_ci = bootstrap_mean_ci(gs_ok, 0.95, 2000, boot);
        bool ci_overlap = qd_ci.overlaps(gs_ci) && qd_times.size() == qd_records.size() &&
                          gs_ok.size() == reps;

        auto [coupled_ok, coupled_msg] = coupled_trajectories(20, 1000, 42);

        std::ostringstream os;
        os << "seed=104 R=" << reps << " QD mean=" << detail::fmt(mean(qd_times)) << " CI=["
           << detail::fmt(qd_ci.lo) << "," << detail::fmt(qd_ci.hi) << "], GSEMO mean="
           << detail::fmt(mean(gs_ok)) << " CI=[" << detail::fmt(gs_ci.lo) << ","
           << detail::fmt(gs_ci.hi) << "], overlap=" << (ci_overlap ? "yes" : "NO")
           << "; coupling: " << coupled_msg;
        return std::make_pair(ci_overlap && coupled_ok, os.str());
    });
}

// ---------------------------------------------------------------------------
// E5: submodular approximation
// ---------------------------------------------------------------------------

inline CheckResult check_e5_submodular(VerifyLevel level, std::size_t threads) {
    return detail::timed_check("E5 (1-1/e)-approximation on coverage", [&]() {
        const std::size_t n = 14, universe = 40;
        const std::size_t instances = level == VerifyLevel::full ? 50 : 12;

        struct RunOut {
            bool approx_reached = false;
            bool final_ok = false;
            double t_approx = 0.0;
            std::size_t r = 0;
            std::size_t traj_obs = 0, traj_ok = 0;
        };
        std::vector<RunOut> outs(instances);

        parallel_for(instances, threads, [&](std::size_t idx) {
            std::size_t r = (idx % 2 == 0) ? 3 : 5;
            RandomSource gen_rng(105, idx);
            CoverageInstance inst = random_coverage(n, universe, r, gen_rng);
            double opt = exhaustive_best_coverage(inst, r);
            Problem problem = make_coverage_problem(inst);
            FeatureSpace space = FeatureSpace::number_of_ones(n, 1);

            BoundParams bp;
            bp.n = n;
            bp.r = r;
            auto budget =
                static_cast<std::uint64_t>(std::ceil(20.0 * bound_value("submod", bp)));

            QdRunOptions opt_run;  // run the full pinned budget; the record keeps t_approx
            opt_run.budget = budget;
            opt_run.approx = ApproxGoal{kOneMinusInvE, opt, r};
            std::vector<double> first_fit;
            opt_run.first_cover_fitness = &first_fit;

            QdRunOutput out = qd_run(problem, space, 1.0 / n, opt_run, RandomSource(205, idx));

            RunOut& ro = outs[idx];
            ro.r = r;
            ro.approx_reached = out.record.t_approx.has_value();
            if (ro.approx_reached) ro.t_approx = static_cast<double>(*out.record.t_approx);
            auto best = best_feasible(out.archive, r);
            ro.final_ok = best && best->fitness >= kOneMinusInvE * opt - 1e-9;
            for (std::size_t j = 0; j <= r; ++j) {
                if (std::isnan(first_fit[j])) continue;  // cell not covered by stop time
                ++ro.traj_obs;
                double target = (1.0 - std::pow(1.0 - 1.0 / static_cast<double>(r),
                                                static_cast<double>(j))) * opt;
                if (first_fit[j] >= target - 1e-9) ++ro.traj_ok;
            }
        });

        std::size_t final_ok = 0, reached = 0, traj_obs = 0, traj_ok = 0;
        std::map<std::size_t, std::vector<double>> t_by_r;
        for (const auto& ro : outs) {
            if (ro.final_ok) ++final_ok;
            if (ro.approx_reached) {
                ++reached;
                t_by_r[ro.r].push_back(ro.t_approx);
            }
            traj_obs += ro.traj_obs;
            traj_ok += ro.traj_ok;
        }
        bool mean_ok = true;
        std::ostringstream means;
        for (auto& [r, v] : t_by_r) {
            BoundParams bp;
            bp.n = n;
            bp.r = r;
            double cap = 20.0 * bound_value("submod", bp);
            double m = mean(v);
            mean_ok = mean_ok && m <= cap;
            means << " r=" << r << ":" << detail::fmt(m) << "/" << detail::fmt(cap);
        }
        double traj_frac = traj_obs ? static_cast<double>(traj_ok) / traj_obs : 0.0;
        bool pass = final_ok == instances && reached == instances && mean_ok &&
                    traj_frac >= 0.95;
        std::ostringstream os;
        os << "seed=105/205 instances=" << instances << " final>=(1-1/e)OPT: " << final_ok << "/"
           << instances << "; mean t_approx (<= 20 n^2(ln n + r)):" << means.str()
           << "; trajectory bound held in " << detail::fmt(100.0 * traj_frac) << "% of " << traj_obs
           << " (run,j) obs (>=95%)";
        return std::make_pair(pass, os.str());
    });
}

// ---------------------------------------------------------------------------
// E6: minimum spanning trees on the CC feature space
// ---------------------------------------------------------------------------

inline CheckResult check_e6_mst(VerifyLevel level, std::size_t threads) {
    return detail::timed_check("E6 MST via connected-components space", [&]() {
        const std::vector<std::size_t> sizes = {8, 12, 16};
        const std::size_t graphs_per_size = level == VerifyLevel::full ? 10 : 3;
        const std::size_t reps = level == VerifyLevel::full ? 30 : 10;

        struct Task {
            WeightedGraph graph;
            std::uint64_t kruskal_weight = 0;
        };
        std::vector<Task> tasks;
        for (std::size_t si = 0; si < sizes.size(); ++si)
            for (std::size_t g = 0; g < graphs_per_size; ++g) {
                RandomSource rng(106, si * graphs_per_size + g);
                Task t;
                t.graph = random_connected_graph(sizes[si], 2 * sizes[si], rng);
                t.kruskal_weight = kruskal(t.graph).weight;
                tasks.push_back(std::move(t));
            }

        std::size_t total = tasks.size() * reps;
        std::vector<double> opt_times(total, -1.0), zero_times(total, -1.0);
        std::vector<char> final_matches(total, 0);
        parallel_for(total, threads, [&](std::size_t idx) {
            const Task& task = tasks[idx / reps];
            const WeightedGraph& graph = task.graph;
            FeatureSpace space = FeatureSpace::connected_components(graph);
            double p_m = 1.0 / static_cast<double>(graph.n_edges());
            BoundParams bp;
            bp.n_nodes = graph.n_nodes;
            bp.m_edges = graph.n_edges();
            bp.w_max = graph.max_weight();

            Problem mst = make_mst_problem(graph, -static_cast<double>(task.kruskal_weight));
            QdRunOptions o1;
            o1.budget = static_cast<std::uint64_t>(std::ceil(50.0 * bound_value("mst_opt", bp)));
            o1.stop_on_opt = true;
            QdRunOutput r1 = qd_run(mst, space, p_m, o1, RandomSource(206, idx));
            if (r1.record.t_opt) opt_times[idx] = static_cast<double>(*r1.record.t_opt);
            const auto& tree_cell = r1.archive.cell(0);
            final_matches[idx] =
                tree_cell && -tree_cell->fitness == static_cast<double>(task.kruskal_weight);

            Problem zero = make_mst_problem(graph, 0.0, "mstzero");
            QdRunOptions o2;
            o2.budget = static_cast<std::uint64_t>(std::ceil(50.0 * bound_value("mst_zero", bp)));
            o2.stop_on_opt = true;
            QdRunOutput r2 = qd_run(zero, space, p_m, o2, RandomSource(306, idx));
            if (r2.record.t_opt) zero_times[idx] = static_cast<double>(*r2.record.t_opt);
        });

        std::size_t opt_hit = 0, zero_hit = 0, final_ok = 0;
        std::map<std::size_t, std::vector<double>> opt_by_size, zero_by_size;
        for (std::size_t idx = 0; idx < total; ++idx) {
            std::size_t size = tasks[idx / reps].graph.n_nodes;
            if (opt_times[idx] >= 0) {
                ++opt_hit;
                opt_by_size[size].push_back(opt_times[idx]);
            }
            if (zero_times[idx] >= 0) {
                ++zero_hit;
                zero_by_size[size].push_back(zero_times[idx]);
            }
            if (final_matches[idx]) ++final_ok;
        }

        auto spread_of = [&](std::map<std::size_t, std::vector<double>>& by_size,
                             const std::string& bound_id) {
            double lo = 0.0, hi = 0.0;
            bool first = true;
            for (auto& [size, v] : by_size) {
                BoundParams bp;
                bp.n_nodes = size;
                bp.m_edges = 2 * size;
                bp.w_max = 2 * size;  // permutation weights: w_max = m
                double ratio = mean(v) / bound_value(bound_id, bp);
                if (first) { lo = hi = ratio; first = false; }
                lo = std::min(lo, ratio);
                hi = std::max(hi, ratio);
            }
            return hi / lo;
        };
        double opt_spread = spread_of(opt_by_size, "mst_opt");
        double zero_spread = spread_of(zero_by_size, "mst_zero");

        bool pass = opt_hit == total && final_ok == total && zero_hit == total &&
                    opt_spread <= 3.0 && zero_spread <= 3.0;
        std::ostringstream os;
        os << "seed=106/206/306 graphs=" << tasks.size() << " R=" << reps << " Kruskal weight hit "
           << opt_hit << "/" << total << " (final match " << final_ok << "/" << total
           << "); t_opt/(n^2 m) spread=" << detail::fmt(opt_spread) << " (<=3); 0^m hit "
           << zero_hit << "/" << total << ", t/(n m ln(n w_max)) spread="
           << detail::fmt(zero_spread) << " (<=3)";
        return std::make_pair(pass, os.str());
    });
}

// ---------------------------------------------------------------------------
// Suite
// ---------------------------------------------------------------------------

inline std::vector<CheckResult> verify_suite(VerifyLevel level, std::size_t threads = 0) {
    std::vector<CheckResult> results;
    results.push_back(check_p1_decay(level));
    results.push_back(check_p1_negative_control());
    results.push_back(check_p2_row_sums());
    results.push_back(check_p2_kruskal(level));
    results.push_back(check_p2_greedy(level));
    results.push_back(check_p2_archive_invariants(level));
    results.push_back(check_e1_onemax_cover(level, threads));
    results.push_back(check_e2_k_scaling(level, threads));
    results.push_back(check_e3_unitation(level, threads));
    results.push_back(check_e4_gsemo_equivalence(level, threads));
    results.push_back(check_e5_submodular(level, threads));
    results.push_back(check_e6_mst(level, threads));
    return results;
}

inline void print_report(std::ostream& out, const std::vector<CheckResult>& results) {
    for (const auto& r : results) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.1fs", r.seconds);
        out << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << " — " << r.details << " (" << buf
            << ")\n";
    }
    std::size_t failed = 0;
    for (const auto& r : results)
        if (!r.pass) ++failed;
    out << (failed == 0 ? "all checks passed" : std::to_string(failed) + " check(s) failed")
        << " (" << results.size() << " total)\n";
}

}  // namespace qdlab
