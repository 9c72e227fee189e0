#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "qdlab/stats.hpp"

using namespace qdlab;

TEST_CASE("mean and median") {
    CHECK(mean({1, 2, 3, 4}) == 2.5);
    CHECK(median({5, 1, 9}) == 5.0);
    CHECK(median({4, 1, 3, 2}) == 2.5);
    CHECK_THROWS_AS(mean({}), std::invalid_argument);
}

TEST_CASE("chi-square survival function reproduces table values") {
    CHECK_THAT(chi_square_sf(3.841, 1), Catch::Matchers::WithinAbs(0.05, 2e-4));
    CHECK_THAT(chi_square_sf(5.991, 2), Catch::Matchers::WithinAbs(0.05, 2e-4));
    CHECK_THAT(chi_square_sf(16.919, 9), Catch::Matchers::WithinAbs(0.05, 2e-4));
    CHECK(chi_square_sf(0.0, 5) == 1.0);
    CHECK(chi_square_sf(1000.0, 3) < 1e-12);
}

TEST_CASE("chi-square p-value on a fair die") {
    std::vector<double> obs{95, 105, 99, 101, 103, 97};
    std::vector<double> exp(6, 100.0);
    CHECK(chi_square_pvalue(obs, exp) > 0.9);
    std::vector<double> skew{200, 40, 90, 110, 80, 80};
    CHECK(chi_square_pvalue(skew, exp) < 1e-6);
}

TEST_CASE("pooling merges sparse bins") {
    std::vector<double> obs{1, 2, 50, 60, 1, 0};
    std::vector<double> exp{0.5, 2.5, 48, 62, 0.8, 0.2};
    auto [o, e] = pool_low_expected(obs, exp, 5.0);
    REQUIRE(o.size() == e.size());
    double so = 0, se = 0, so0 = 0, se0 = 0;
    for (double v : obs) so0 += v;
    for (double v : exp) se0 += v;
    for (double v : o) so += v;
    for (double v : e) se += v;
    CHECK(so == so0);
    CHECK(se == se0);
    for (std::size_t i = 0; i + 1 < e.size(); ++i) REQUIRE(e[i] >= 5.0);
}

TEST_CASE("binomial pmf sums to one and matches known points") {
    double s = 0.0;
    for (std::size_t j = 0; j <= 16; ++j) s += binomial_pmf(16, 1.0 / 16, j);
    CHECK_THAT(s, Catch::Matchers::WithinAbs(1.0, 1e-12));
    CHECK_THAT(binomial_pmf(4, 0.5, 2), Catch::Matchers::WithinAbs(0.375, 1e-12));
}

TEST_CASE("bootstrap CI brackets the mean and degenerates on constant data") {
    RandomSource rng(71, 0);
    std::vector<double> sample;
    for (int i = 0; i < 200; ++i) sample.push_back(10.0 + rng.unit());
    Interval ci = bootstrap_mean_ci(sample, 0.95, 2000, rng);
    double m = mean(sample);
    CHECK(ci.lo <= m);
    CHECK(ci.hi >= m);
    CHECK(ci.hi - ci.lo < 0.5);

    std::vector<double> constant(50, 3.0);
    Interval flat = bootstrap_mean_ci(constant, 0.95, 500, rng);
    CHECK(flat.lo == 3.0);
    CHECK(flat.hi == 3.0);
}

TEST_CASE("interval overlap") {
    CHECK(Interval{0, 2}.overlaps(Interval{1, 3}));
    CHECK(Interval{0, 2}.overlaps(Interval{2, 3}));
    CHECK_FALSE(Interval{0, 1}.overlaps(Interval{2, 3}));
}

TEST_CASE("regression slope") {
    std::vector<double> x{1, 2, 3, 4};
    std::vector<double> y{2, 4, 6, 8};
    CHECK_THAT(regression_slope(x, y), Catch::Matchers::WithinAbs(2.0, 1e-12));
    CHECK_THROWS_AS(regression_slope({1, 1}, {2, 3}), std::invalid_argument);
}
