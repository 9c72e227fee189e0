#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "qdlab/oracles.hpp"

using namespace qdlab;

TEST_CASE("transition probability matches direct enumeration at n=2") {
    // parent "10", p_m = 1/2: reach 0 ones by flipping the 1 and keeping the 0
    CHECK_THAT(static_cast<double>(transition_prob(2, 0.5, 1, 0)),
               Catch::Matchers::WithinAbs(0.25, 1e-15));
    CHECK_THAT(static_cast<double>(transition_prob(2, 0.5, 1, 1)),
               Catch::Matchers::WithinAbs(0.50, 1e-15));
    CHECK_THAT(static_cast<double>(transition_prob(2, 0.5, 1, 2)),
               Catch::Matchers::WithinAbs(0.25, 1e-15));
    CHECK_THROWS_AS(transition_prob(2, 0.5, 3, 0), std::invalid_argument);
    CHECK_THROWS_AS(transition_prob(2, 1.5, 1, 0), std::invalid_argument);
}

TEST_CASE("transition rows are probability distributions") {
    TransitionTable t(50, 1.0 / 50);
    for (std::size_t i = 0; i <= 50; ++i)
        REQUIRE(std::fabs(static_cast<double>(t.row_sum(i)) - 1.0) <= 1e-12);

    SECTION("entries stay finite and in [0,1] for large n and tiny p_m") {
        TransitionTable big(200, 1.0 / 200);
        for (std::size_t i : {0ul, 100ul, 200ul})
            for (std::size_t j : {0ul, 100ul, 200ul}) {
                long double p = big.p(i, j);
                REQUIRE(p >= 0.0L);
                REQUIRE(p <= 1.0L);
            }
        REQUIRE(std::fabs(static_cast<double>(big.row_sum(100)) - 1.0) <= 1e-12);
    }
}

TEST_CASE("transition probabilities match mutation frequencies") {
    const std::size_t n = 8;
    const double p_m = 1.0 / n;
    TransitionTable table(n, p_m);
    RandomSource rng(81, 0);
    const std::size_t samples = 1000000;

    for (std::size_t i : {0ul, 3ul, 8ul}) {
        Genotype parent = Genotype::zeros(n);
        for (std::size_t b = 0; b < i; ++b) parent.set(b, true);
        std::vector<double> counts(n + 1, 0.0);
        Genotype child;
        for (std::size_t s = 0; s < samples; ++s) {
            mutate_into(parent, p_m, rng, child);
            counts[child.ones()] += 1.0;
        }
        for (std::size_t j = 0; j <= n; ++j) {
            double p = static_cast<double>(table.p(i, j));
            double sigma = std::sqrt(p * (1 - p) / samples);
            INFO("i=" << i << " j=" << j);
            REQUIRE(std::fabs(counts[j] / samples - p) <= 4.0 * sigma + 1e-9);
        }
    }
}

TEST_CASE("decay inequality holds exactly, k=0 is equality") {
    TransitionTable t(10, 0.1);
    CHECK(check_jump_decay(t, 5, 3, 0));

    for (std::size_t n : {10ul, 30ul}) {
        TransitionTable table(n, 1.0 / static_cast<double>(n));
        for (std::size_t i = 1; i <= n; ++i)
            for (std::size_t j = 0; j < i; ++j)
                for (std::size_t k = 0; k <= j; ++k) REQUIRE(check_jump_decay(table, i, j, k));
    }

    SECTION("precondition violations are rejected") {
        CHECK_THROWS_AS(check_jump_decay(t, 3, 5, 0), std::invalid_argument);
        CHECK_THROWS_AS(check_jump_decay(t, 5, 3, 4), std::invalid_argument);
    }

    SECTION("a corrupted entry is detected") {
        TransitionTable bad(10, 0.1);
        bad.corrupt_entry(5, 1, 1.0e9L);
        CHECK_FALSE(check_jump_decay(bad, 5, 3, 2));
    }
}

TEST_CASE("greedy on disjoint sets picks the r largest") {
    CoverageInstance inst;
    inst.n = 4;
    inst.universe = 11;
    inst.r = 2;
    inst.sets = {{0}, {1, 2, 3, 4, 5}, {6, 7}, {8, 9, 10}};  // sizes 1, 5, 2, 3
    inst.build_masks();
    GreedyResult g = greedy_submodular(inst);
    CHECK(g.value == 8.0);  // 5 + 3
    REQUIRE(g.picks.size() == 2);
    CHECK(g.picks[0] == 1);
    CHECK(g.picks[1] == 3);

    SECTION("r = n selects everything") {
        inst.r = 4;
        CHECK(greedy_submodular(inst).value == 11.0);
    }

    SECTION("ties break toward the lowest index") {
        CoverageInstance tie;
        tie.n = 3;
        tie.universe = 6;
        tie.r = 1;
        tie.sets = {{0, 1}, {2, 3}, {4, 5}};
        tie.build_masks();
        CHECK(greedy_submodular(tie).picks[0] == 0);
    }
}

TEST_CASE("greedy achieves (1-1/e) of the exhaustive optimum") {
    RandomSource rng(83, 0);
    for (int t = 0; t < 40; ++t) {
        std::size_t n = 8 + rng.below(7);
        std::size_t u = 15 + rng.below(10);
        std::size_t r = 1 + rng.below(4);
        CoverageInstance inst = random_coverage(n, u, r, rng);
        double opt = exhaustive_best_coverage(inst, r);
        double greedy = greedy_submodular(inst).value;
        REQUIRE(greedy >= (1.0 - 1.0 / std::exp(1.0)) * opt - 1e-9);
        REQUIRE(greedy <= opt + 1e-9);
    }
}

TEST_CASE("kruskal basics") {
    SECTION("a tree keeps all its edges") {
        WeightedGraph g;
        g.n_nodes = 4;
        g.edges = {{0, 1, 5}, {1, 2, 2}, {1, 3, 9}};
        KruskalResult k = kruskal(g);
        CHECK(k.edge_indices.size() == 3);
        CHECK(k.weight == 16);
    }
    SECTION("triangle 1,2,3 keeps the two lightest edges") {
        WeightedGraph g;
        g.n_nodes = 3;
        g.edges = {{0, 1, 1}, {1, 2, 2}, {0, 2, 3}};
        KruskalResult k = kruskal(g);
        CHECK(k.weight == 3);
        REQUIRE(k.edge_indices.size() == 2);
        CHECK(k.edge_indices[0] == 0);
        CHECK(k.edge_indices[1] == 1);
    }
}

TEST_CASE("kruskal equals exhaustive search on random graphs") {
    RandomSource rng(87, 0);
    for (int t = 0; t < 30; ++t) {
        std::size_t n = 4 + rng.below(6);
        std::size_t max_m = std::min<std::size_t>(n * (n - 1) / 2, 15);
        std::size_t m = (n - 1) + rng.below(max_m - (n - 1) + 1);
        WeightedGraph g = random_connected_graph(n, m, rng);
        REQUIRE(kruskal(g).weight == exhaustive_mst_weight(g));
    }
}

TEST_CASE("kruskal prefixes give the optimal forest weight per component count") {
    RandomSource rng(89, 0);
    for (int t = 0; t < 15; ++t) {
        std::size_t n = 4 + rng.below(4);  // 4..7 nodes
        std::size_t max_m = std::min<std::size_t>(n * (n - 1) / 2, 14);
        std::size_t m = (n - 1) + rng.below(max_m - (n - 1) + 1);
        WeightedGraph g = random_connected_graph(n, m, rng);
        std::vector<std::uint64_t> fw = kruskal_forest_weights(g);
        REQUIRE(fw[n - 1] == 0);              // empty edge set
        REQUIRE(fw[0] == kruskal(g).weight);  // spanning tree

        // brute force: min weight over all edge subsets with a given cc count
        std::vector<std::uint64_t> best(n + 1, ~0ull);
        for (std::uint64_t mask = 0; mask < (1ull << m); ++mask) {
            Genotype x = Genotype::from_mask(m, mask);
            std::size_t cc = cc_count(g, x);
            std::uint64_t w = static_cast<std::uint64_t>(-mst_fitness(g, x));
            best[cc] = std::min(best[cc], w);
        }
        for (std::size_t c = 1; c <= n; ++c) REQUIRE(fw[c - 1] == best[c]);
    }
}

TEST_CASE("brute-force cell optima") {
    SECTION("onemax at unit granularity: cell i tops out at i") {
        Problem p = make_onemax(12);
        FeatureSpace s = FeatureSpace::number_of_ones(12, 1);
        auto opt = cell_optima_bruteforce(p, s);
        for (std::size_t i = 0; i < opt.size(); ++i) REQUIRE(opt[i] == static_cast<double>(i));
    }
    SECTION("trap at unit granularity: cell 0 holds the global optimum") {
        Problem p = make_trap(12);
        FeatureSpace s = FeatureSpace::number_of_ones(12, 1);
        auto opt = cell_optima_bruteforce(p, s);
        CHECK(opt[0] == 13.0);
        for (std::size_t i = 1; i < opt.size(); ++i) REQUIRE(opt[i] == static_cast<double>(i));
    }
    SECTION("a single cell holds the global maximum") {
        Problem p = make_jump(12, 3);
        FeatureSpace s = FeatureSpace::number_of_ones(12, 13);
        auto opt = cell_optima_bruteforce(p, s);
        REQUIRE(opt.size() == 1);
        CHECK(opt[0] == 15.0);
    }
    SECTION("refuses to enumerate beyond n = 16") {
        Problem p = make_onemax(17);
        FeatureSpace s = FeatureSpace::number_of_ones(17, 1);
        CHECK_THROWS_WITH(cell_optima_bruteforce(p, s),
                          Catch::Matchers::ContainsSubstring("refusing"));
    }
}

TEST_CASE("analytic unitation cell optima agree with brute force") {
    for (std::size_t k : {1ul, 2ul, 7ul, 14ul}) {
        Problem trap = make_trap(13);
        Problem jump = make_jump(13, 4);
        FeatureSpace s = FeatureSpace::number_of_ones(13, k);
        for (const Problem* p : {&trap, &jump}) {
            auto analytic = cell_optima_unitation(*p, s);
            auto brute = cell_optima_bruteforce(*p, s);
            REQUIRE(analytic == brute);
        }
    }
}

TEST_CASE("bound evaluators") {
    BoundParams p;
    p.n = 100;
    CHECK_THAT(bound_value("cover_k1", p), Catch::Matchers::WithinRel(46051.70186, 1e-9));

    BoundParams q;
    q.n = 99;
    q.k = 2;
    q.p_m = 1.0 / 99;
    CHECK_THAT(bound_value("cover_k", q), Catch::Matchers::WithinRel(163350.0, 1e-12));

    BoundParams r;
    r.n = 14;
    r.r = 5;
    CHECK_THAT(bound_value("submod", r),
               Catch::Matchers::WithinRel(196.0 * (std::log(14.0) + 5.0), 1e-12));

    BoundParams g;
    g.n_nodes = 16;
    g.m_edges = 32;
    g.w_max = 32;
    CHECK_THAT(bound_value("mst_opt", g), Catch::Matchers::WithinRel(8192.0, 1e-12));
    CHECK_THAT(bound_value("mst_zero", g),
               Catch::Matchers::WithinRel(16.0 * 32.0 * std::log(512.0), 1e-12));

    SECTION("cover_k rejects k = 1 and unknown ids are errors") {
        BoundParams bad;
        bad.n = 99;
        bad.k = 1;
        bad.p_m = 1.0 / 99;
        CHECK_THROWS_AS(bound_value("cover_k", bad), std::invalid_argument);
        CHECK_THROWS_AS(bound_value("nope", p), std::invalid_argument);
    }
}
