#include <catch2/catch_amalgamated.hpp>

#include <atomic>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qdlab/lab.hpp"

using namespace qdlab;

namespace {

std::string strip_wall_ns(const std::string& csv) {
    std::istringstream in(csv);
    std::ostringstream out;
    std::string line;
    while (std::getline(in, line)) {
        auto pos = line.rfind(',');
        out << line.substr(0, pos) << '\n';
    }
    return out.str();
}

std::vector<RunRecord> synthetic_records(const std::vector<std::size_t>& grid, std::size_t reps,
                                         const std::function<double(double)>& t_of_n) {
    std::vector<RunRecord> records;
    for (std::size_t gi = 0; gi < grid.size(); ++gi)
        for (std::size_t rep = 0; rep < reps; ++rep) {
            RunRecord r;
            r.config_id = "synthetic";
            r.problem = "onemax";
            r.n = grid[gi];
            r.k_or_cc = "1";
            r.p_m = 1.0 / static_cast<double>(grid[gi]);
            r.seed = 1;
            r.stream = gi * reps + rep;
            r.t_cover = static_cast<std::uint64_t>(t_of_n(static_cast<double>(grid[gi])));
            records.push_back(r);
        }
    return records;
}

}  // namespace

TEST_CASE("config parsing") {
    std::istringstream in(
        "# comment\n"
        "config_id = demo\n"
        "problem = jump:3\n"
        "k = 1\n"
        "grid = 31, 63 127\n"
        "reps = 100\n"
        "stop = copt\n"
        "master_seed = 7\n"
        "out = demo.csv\n");
    SweepConfig cfg = parse_sweep_config(in);
    CHECK(cfg.config_id == "demo");
    CHECK(cfg.problem == "jump:3");
    CHECK(cfg.grid == std::vector<std::size_t>{31, 63, 127});
    CHECK(cfg.reps == 100);
    CHECK(cfg.stop == "copt");
    CHECK(cfg.master_seed == 7);
    CHECK(cfg.out == "demo.csv");

    SECTION("unknown keys are rejected") {
        std::istringstream bad("probelm = onemax\n");
        CHECK_THROWS_WITH(parse_sweep_config(bad), Catch::Matchers::ContainsSubstring("probelm"));
    }
    SECTION("bad numbers are rejected") {
        std::istringstream bad("reps = many\n");
        CHECK_THROWS_AS(parse_sweep_config(bad), std::runtime_error);
    }
}

TEST_CASE("grid points reject invalid granularity naming both values") {
    SweepConfig cfg;
    cfg.problem = "onemax";
    cfg.k = 3;
    cfg.grid = {31};  // 3 does not divide 32
    CHECK_THROWS_WITH(build_grid_point(cfg, 0), Catch::Matchers::ContainsSubstring("3") &&
                                                    Catch::Matchers::ContainsSubstring("32"));
}

TEST_CASE("auto budget applies the 50x leading-order rule") {
    SweepConfig cfg;
    cfg.problem = "onemax";
    cfg.k = 1;
    cfg.grid = {100};
    auto gp = build_grid_point(cfg, 0);
    BoundParams bp;
    bp.n = 100;
    CHECK(gp->budget == static_cast<std::uint64_t>(std::ceil(50.0 * bound_value("cover_k1", bp))));
    CHECK(gp->p_m == 0.01);

    SECTION("explicit budgets win") {
        cfg.budget = 1234;
        auto gp2 = build_grid_point(cfg, 0);
        CHECK(gp2->budget == 1234);
    }
}

TEST_CASE("sweeps are deterministic and stream in fixed row order") {
    SweepConfig cfg;
    cfg.config_id = "det";
    cfg.problem = "onemax";
    cfg.k = 1;
    cfg.grid = {7};
    cfg.reps = 2;
    cfg.stop = "cover";
    cfg.master_seed = 11;

    std::ostringstream csv1, csv2;
    auto rec1 = run_sweep(cfg, &csv1);
    auto rec2 = run_sweep(cfg, &csv2);
    REQUIRE(rec1.size() == 2);
    CHECK(rec1[0].stream == 0);
    CHECK(rec1[1].stream == 1);
    CHECK(strip_wall_ns(csv1.str()) == strip_wall_ns(csv2.str()));

    SECTION("worker count does not change the records") {
        cfg.threads = 3;
        std::ostringstream csv3;
        run_sweep(cfg, &csv3);
        CHECK(strip_wall_ns(csv3.str()) == strip_wall_ns(csv1.str()));
    }
}

TEST_CASE("records respect the milestone ordering invariant") {
    SweepConfig cfg;
    cfg.config_id = "ord";
    cfg.problem = "trap";
    cfg.k = 1;
    cfg.grid = {15};
    cfg.reps = 20;
    cfg.stop = "copt";
    cfg.master_seed = 13;
    auto records = run_sweep(cfg);
    for (const auto& r : records) {
        REQUIRE(r.t_cover);
        REQUIRE(r.t_opt);
        REQUIRE(r.t_copt);
        REQUIRE(*r.t_cover <= *r.t_copt);
        REQUIRE(*r.t_opt <= *r.t_copt);
        REQUIRE_FALSE(r.truncated);
    }
}

TEST_CASE("worker pool propagates task exceptions") {
    CHECK_THROWS_WITH(parallel_for(8, 4,
                                   [](std::size_t i) {
                                       if (i == 5) throw std::runtime_error("task 5 boom");
                                   }),
                      Catch::Matchers::ContainsSubstring("boom"));
    std::atomic<std::size_t> ran{0};
    parallel_for(100, 4, [&](std::size_t) { ran.fetch_add(1); });
    CHECK(ran.load() == 100);
}

TEST_CASE("mean cover time grows with n (post-hoc, not per-run)") {
    SweepConfig cfg;
    cfg.config_id = "mono";
    cfg.problem = "onemax";
    cfg.k = 1;
    cfg.grid = {15, 31, 63};
    cfg.reps = 50;
    cfg.stop = "cover";
    cfg.master_seed = 17;
    auto records = run_sweep(cfg);
    REQUIRE(records.size() == 150);
    std::vector<double> means;
    for (std::size_t gi = 0; gi < 3; ++gi) {
        std::vector<double> v;
        for (const auto& r : records)
            if (r.n == cfg.grid[gi]) v.push_back(static_cast<double>(*r.t_cover));
        REQUIRE(v.size() == 50);
        means.push_back(mean(v));
    }
    CHECK(means[0] < means[1]);
    CHECK(means[1] < means[2]);
}

TEST_CASE("csv schema and round trip") {
    SweepConfig cfg;
    cfg.config_id = "csv";
    cfg.problem = "onemax";
    cfg.k = 1;
    cfg.grid = {7};
    cfg.reps = 2;
    cfg.stop = "cover";
    auto records = run_sweep(cfg);

    std::ostringstream os;
    write_csv(os, records);
    std::string text = os.str();
    CHECK(text.rfind("config_id,problem,n,k_or_cc,p_m,seed,stream,t_cover,t_opt,t_copt,t_approx,"
                     "final_best_feasible,final_mst_weight,truncated,wall_ns\n", 0) == 0);
    // onemax sweep has no approximation or MST payloads: empty fields stay empty
    CHECK(text.find(",,") != std::string::npos);

    std::istringstream is(text);
    auto back = read_csv(is);
    REQUIRE(back.size() == records.size());
    for (std::size_t i = 0; i < back.size(); ++i) {
        CHECK(back[i].stream == records[i].stream);
        CHECK(back[i].t_cover == records[i].t_cover);
        CHECK(back[i].t_approx == records[i].t_approx);
        CHECK(back[i].final_mst_weight == records[i].final_mst_weight);
        CHECK(back[i].wall_ns == records[i].wall_ns);
    }

    SECTION("schema drift is rejected") {
        std::istringstream bad("config_id,problem\nx,y\n");
        CHECK_THROWS_WITH(read_csv(bad), Catch::Matchers::ContainsSubstring("schema"));
    }
}

TEST_CASE("fit recovers exact synthetic scaling") {
    auto records = synthetic_records({31, 63, 127, 255}, 30, [](double n) {
        return 3.0 * n * n * std::log(n);
    });
    FitResult fit = fit_scaling(records, "cover_k1", "t_cover");
    CHECK(fit.ratio_spread < 1.0001);
    CHECK_THAT(fit.slope, Catch::Matchers::WithinAbs(1.0, 1e-3));
    CHECK(fit.reliable);
    CHECK(fit.range_factor > 8.0);
    CHECK(theta_pass(fit));
}

TEST_CASE("fit flags an analytic mismatch") {
    auto records = synthetic_records({31, 63, 127, 255}, 30, [](double n) { return n * n * n; });
    FitResult fit = fit_scaling(records, "cover_k1", "t_cover");
    CHECK(fit.slope > 1.0);
    CHECK(fit.ratio_spread > 2.5);
    CHECK_FALSE(theta_pass(fit));
}

TEST_CASE("fit preconditions and truncation accounting") {
    SECTION("needs at least 3 grid points") {
        auto records = synthetic_records({31, 63}, 30, [](double n) { return n * n; });
        CHECK_THROWS_WITH(fit_scaling(records, "cover_k1", "t_cover"),
                          Catch::Matchers::ContainsSubstring("3 grid points"));
    }
    SECTION("needs 30 usable runs per group") {
        auto records = synthetic_records({31, 63, 127}, 10, [](double n) { return n * n; });
        CHECK_THROWS_WITH(fit_scaling(records, "cover_k1", "t_cover"),
                          Catch::Matchers::ContainsSubstring("30"));
    }
    SECTION("more than 5% truncation makes the fit unreliable, not dropped") {
        auto records = synthetic_records({31, 63, 127}, 40, [](double n) {
            return 3.0 * n * n * std::log(n);
        });
        for (std::size_t i = 0; i < 3; ++i) {  // 3/43 > 5% in the n=31 group
            RunRecord r = records[0];
            r.truncated = true;
            r.t_cover.reset();
            records.push_back(r);
        }
        FitResult fit = fit_scaling(records, "cover_k1", "t_cover");
        CHECK_FALSE(fit.reliable);
        CHECK_FALSE(theta_pass(fit));
        CHECK(fit.groups[0].truncated == 3);
    }
}

TEST_CASE("sweeps over generated instances carry the right payload columns") {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "qdlab_test_instances";
    fs::create_directories(dir);

    SECTION("coverage: final_best_feasible and t_approx") {
        RandomSource rng(91, 0);
        CoverageInstance inst = random_coverage(10, 25, 3, rng);
        fs::path f = dir / "cov.txt";
        save_coverage(f.string(), inst);

        SweepConfig cfg;
        cfg.config_id = "cov";
        cfg.problem = "coverage";
        cfg.space = "noo";
        cfg.k = 1;
        cfg.instances = {f.string()};
        cfg.reps = 3;
        cfg.stop = "approx";
        cfg.budget_factor = 30;
        auto records = run_sweep(cfg);
        REQUIRE(records.size() == 3);
        double opt = exhaustive_best_coverage(inst, 3);
        for (const auto& r : records) {
            REQUIRE_FALSE(r.truncated);
            REQUIRE(r.t_approx);
            REQUIRE(r.final_best_feasible);
            CHECK(*r.final_best_feasible >= kOneMinusInvE * opt - 1e-9);
            CHECK_FALSE(r.final_mst_weight);
            CHECK(r.k_or_cc == "1");
        }
    }

    SECTION("mst: final_mst_weight equals the Kruskal weight at the optimum stop") {
        RandomSource rng(93, 0);
        WeightedGraph g = random_connected_graph(8, 16, rng);
        fs::path f = dir / "g.txt";
        save_graph(f.string(), g);

        SweepConfig cfg;
        cfg.config_id = "mst";
        cfg.problem = "mst";
        cfg.space = "cc";
        cfg.instances = {f.string()};
        cfg.reps = 3;
        cfg.stop = "opt";
        auto records = run_sweep(cfg);
        std::uint64_t kw = kruskal(g).weight;
        for (const auto& r : records) {
            REQUIRE_FALSE(r.truncated);
            REQUIRE(r.t_opt);
            REQUIRE(r.final_mst_weight);
            CHECK(*r.final_mst_weight == static_cast<double>(kw));
            CHECK(r.k_or_cc == "8");
            CHECK(r.n == 16);
        }

        SECTION("mstzero records the empty-edge-set hitting time in t_opt") {
            cfg.problem = "mstzero";
            cfg.config_id = "mstzero";
            auto zrecords = run_sweep(cfg);
            for (const auto& r : zrecords) {
                REQUIRE(r.t_opt);
                REQUIRE_FALSE(r.truncated);
            }
        }
    }

    SECTION("coverage sweeps demand the NoO(1) space") {
        SweepConfig cfg;
        cfg.problem = "coverage";
        cfg.space = "cc";
        cfg.instances = {"unused"};
        CHECK_THROWS_WITH(build_grid_point(cfg, 0),
                          Catch::Matchers::ContainsSubstring("noo"));
    }
}
