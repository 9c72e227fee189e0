// qdlab command-line front end: single runs, sweeps, scaling fits, the
// verification suite, and instance generation.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "qdlab/lab.hpp"
#include "qdlab/verify.hpp"

namespace {

using nlohmann::json;

json record_to_json(const qdlab::RunRecord& r) {
    json j;
    j["config_id"] = r.config_id;
    j["problem"] = r.problem;
    j["n"] = r.n;
    j["k_or_cc"] = r.k_or_cc;
    j["p_m"] = r.p_m;
    j["seed"] = r.seed;
    j["stream"] = r.stream;
    auto put_u = [&](const char* key, const std::optional<std::uint64_t>& v) {
        if (v) j[key] = *v; else j[key] = nullptr;
    };
    auto put_f = [&](const char* key, const std::optional<double>& v) {
        if (v) j[key] = *v; else j[key] = nullptr;
    };
    put_u("t_cover", r.t_cover);
    put_u("t_opt", r.t_opt);
    put_u("t_copt", r.t_copt);
    put_u("t_approx", r.t_approx);
    put_f("final_best_feasible", r.final_best_feasible);
    put_f("final_mst_weight", r.final_mst_weight);
    j["truncated"] = r.truncated;
    j["wall_ns"] = r.wall_ns;
    return j;
}

json fit_to_json(const qdlab::FitResult& fit, bool pass) {
    json j;
    j["bound_id"] = fit.bound_id;
    j["milestone"] = fit.milestone;
    j["ratio_spread"] = fit.ratio_spread;
    j["slope"] = fit.slope;
    j["range_factor"] = fit.range_factor;
    j["reliable"] = fit.reliable;
    j["pass"] = pass;
    j["groups"] = json::array();
    for (const auto& g : fit.groups) {
        json jg;
        jg["n"] = g.n;
        jg["k_or_cc"] = g.k_or_cc;
        jg["count"] = g.count;
        jg["truncated"] = g.truncated;
        jg["mean"] = g.mean;
        jg["median"] = g.median;
        jg["ci95"] = {g.ci.lo, g.ci.hi};
        jg["bound"] = g.bound;
        jg["ratio"] = g.ratio;
        j["groups"].push_back(jg);
    }
    return j;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"qdlab: quality-diversity archive algorithms under measurement"};
    app.require_subcommand(1);

    // ---- run ----
    auto* run_cmd = app.add_subcommand("run", "run one configuration and print its record as JSON");
    qdlab::SweepConfig run_cfg;
    std::size_t run_n = 0;
    std::string run_instance;
    std::uint64_t run_stream = 0;
    run_cmd->add_option("--problem", run_cfg.problem,
                        "onemax|jump:<g>|cliff:<d>|trap|linear|coverage|mst|mstzero");
    run_cmd->add_option("--n", run_n, "genotype length (synthetic problems)");
    run_cmd->add_option("--instance", run_instance, "instance file (coverage/mst problems)");
    run_cmd->add_option("--space", run_cfg.space, "noo|cc");
    run_cmd->add_option("--k", run_cfg.k, "NoO granularity (must divide n+1)");
    run_cmd->add_option("--pm-c", run_cfg.pm_c, "mutation rate constant, p_m = c/n");
    run_cmd->add_option("--stop", run_cfg.stop, "stop milestones: cover opt copt approx");
    run_cmd->add_option("--alpha", run_cfg.alpha, "approximation target");
    run_cmd->add_option("--budget", run_cfg.budget, "explicit evaluation budget (0 = auto)");
    run_cmd->add_option("--budget-factor", run_cfg.budget_factor,
                        "auto budget = factor * leading-order bound");
    run_cmd->add_option("--copt", run_cfg.copt, "optimal-coverage detection: auto|off");
    run_cmd->add_option("--seed", run_cfg.master_seed, "seed");
    run_cmd->add_option("--stream", run_stream, "stream (replication id)");
    run_cmd->add_option("--config-id", run_cfg.config_id, "config id for the record");

    // ---- sweep ----
    auto* sweep_cmd = app.add_subcommand("sweep", "run a sweep config file and emit CSV");
    std::string sweep_config_path, sweep_out_override;
    std::size_t sweep_threads_override = SIZE_MAX;
    sweep_cmd->add_option("--config", sweep_config_path, "sweep config file")->required();
    sweep_cmd->add_option("--out", sweep_out_override, "override the config's output path");
    sweep_cmd->add_option("--threads", sweep_threads_override, "override worker count");

    // ---- fit ----
    auto* fit_cmd = app.add_subcommand("fit", "fit recorded hitting times against a bound");
    std::string fit_csv, fit_bound, fit_milestone = "t_cover";
    qdlab::BoundParams fit_extra;
    double fit_max_spread = 2.5, fit_min_range = 8.0;
    fit_cmd->add_option("--csv", fit_csv, "sweep CSV file")->required();
    fit_cmd->add_option("--bound", fit_bound,
                        "bound id: cover_k1|cover_k|submod|mst_zero|mst_opt")
        ->required();
    fit_cmd->add_option("--milestone", fit_milestone, "t_cover|t_opt|t_copt|t_approx");
    fit_cmd->add_option("--r", fit_extra.r, "cardinality constraint (submod bound)");
    fit_cmd->add_option("--wmax", fit_extra.w_max, "max edge weight (mst_zero bound)");
    fit_cmd->add_option("--max-spread", fit_max_spread, "verdict: max ratio spread");
    fit_cmd->add_option("--min-range", fit_min_range, "verdict: min n range factor");

    // ---- verify ----
    auto* verify_cmd = app.add_subcommand("verify", "run the oracle and experiment check suite");
    std::string verify_level = "fast";
    std::size_t verify_threads = 0;
    verify_cmd->add_option("--level", verify_level, "fast|full");
    verify_cmd->add_option("--threads", verify_threads, "worker count (0 = hardware)");

    // ---- gen ----
    auto* gen_cmd = app.add_subcommand("gen", "generate random instances");
    auto* gen_graph = gen_cmd->add_subcommand("graph", "random connected weighted graph");
    std::size_t gg_nodes = 12, gg_edges = 0;
    std::uint64_t gg_seed = 1;
    std::string gg_out;
    gen_graph->add_option("--nodes", gg_nodes, "node count");
    gen_graph->add_option("--edges", gg_edges, "edge count (default 2*nodes)");
    gen_graph->add_option("--seed", gg_seed, "seed");
    gen_graph->add_option("--out", gg_out, "output path (default stdout)");
    auto* gen_cov = gen_cmd->add_subcommand("coverage", "random max-coverage instance");
    std::size_t gc_n = 14, gc_u = 40, gc_r = 5;
    std::uint64_t gc_seed = 1;
    std::string gc_out;
    gen_cov->add_option("--n", gc_n, "number of sets");
    gen_cov->add_option("--universe", gc_u, "universe size");
    gen_cov->add_option("--r", gc_r, "cardinality constraint");
    gen_cov->add_option("--seed", gc_seed, "seed");
    gen_cov->add_option("--out", gc_out, "output path (default stdout)");
    gen_cmd->require_subcommand(1);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run_cmd) {
            if (!run_instance.empty()) run_cfg.instances = {run_instance};
            else if (run_n > 0) run_cfg.grid = {run_n};
            else throw std::runtime_error("run: need --n or --instance");
            run_cfg.reps = 1;
            auto gp = qdlab::build_grid_point(run_cfg, 0);
            qdlab::RunRecord rec = qdlab::run_grid_point_stream(*gp, run_cfg, run_stream);
            std::cout << record_to_json(rec).dump(2) << '\n';
            return 0;
        }
        if (*sweep_cmd) {
            qdlab::SweepConfig cfg = qdlab::load_sweep_config(sweep_config_path);
            if (!sweep_out_override.empty()) cfg.out = sweep_out_override;
            if (sweep_threads_override != SIZE_MAX) cfg.threads = sweep_threads_override;
            if (cfg.out.empty()) {
                qdlab::run_sweep(cfg, &std::cout);
            } else {
                std::ofstream out(cfg.out);
                if (!out) throw std::runtime_error("sweep: cannot write " + cfg.out);
                auto records = qdlab::run_sweep(cfg, &out);
                std::cerr << "wrote " << records.size() << " records to " << cfg.out << '\n';
            }
            return 0;
        }
        if (*fit_cmd) {
            std::ifstream in(fit_csv);
            if (!in) throw std::runtime_error("fit: cannot open " + fit_csv);
            auto records = qdlab::read_csv(in);
            qdlab::FitResult fit =
                qdlab::fit_scaling(records, fit_bound, fit_milestone, fit_extra);
            bool pass = qdlab::theta_pass(fit, fit_max_spread, fit_min_range);
            std::cout << fit_to_json(fit, pass).dump(2) << '\n';
            return pass ? 0 : 1;
        }
        if (*verify_cmd) {
            qdlab::VerifyLevel level;
            if (verify_level == "fast") level = qdlab::VerifyLevel::fast;
            else if (verify_level == "full") level = qdlab::VerifyLevel::full;
            else throw std::runtime_error("verify: level must be fast or full");
            auto results = qdlab::verify_suite(level, verify_threads);
            qdlab::print_report(std::cout, results);
            for (const auto& r : results)
                if (!r.pass) return 1;
            return 0;
        }
        if (*gen_graph) {
            qdlab::RandomSource rng(gg_seed, 0);
            if (gg_edges == 0) gg_edges = 2 * gg_nodes;
            qdlab::WeightedGraph g = qdlab::random_connected_graph(gg_nodes, gg_edges, rng);
            if (gg_out.empty()) qdlab::write_graph(std::cout, g);
            else qdlab::save_graph(gg_out, g);
            return 0;
        }
        if (*gen_cov) {
            qdlab::RandomSource rng(gc_seed, 0);
            qdlab::CoverageInstance inst = qdlab::random_coverage(gc_n, gc_u, gc_r, rng);
            if (gc_out.empty()) qdlab::write_coverage(std::cout, inst);
            else qdlab::save_coverage(gc_out, inst);
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
