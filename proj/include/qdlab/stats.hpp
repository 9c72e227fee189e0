#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qdlab/rng.hpp"

namespace qdlab {

inline double mean(const std::vector<double>& v) {
    if (v.empty()) throw std::invalid_argument("mean: empty sample");
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

inline double median(std::vector<double> v) {
    if (v.empty()) throw std::invalid_argument("median: empty sample");
    std::sort(v.begin(), v.end());
    std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool overlaps(const Interval& o) const { return lo <= o.hi && o.lo <= hi; }
};

/// Percentile bootstrap CI for the sample mean.
inline Interval bootstrap_mean_ci(const std::vector<double>& v, double level, std::size_t resamples,
                                  RandomSource& rng) {
    if (v.empty()) throw std::invalid_argument("bootstrap_mean_ci: empty sample");
    std::vector<double> means(resamples);
    for (std::size_t b = 0; b < resamples; ++b) {
        double s = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) s += v[rng.below(v.size())];
        means[b] = s / static_cast<double>(v.size());
    }
    std::sort(means.begin(), means.end());
    double tail = (1.0 - level) / 2.0;
    auto rank = [&](double q) {
        auto idx = static_cast<std::size_t>(q * static_cast<double>(resamples - 1) + 0.5);
        return means[std::min(idx, resamples - 1)];
    };
    return Interval{rank(tail), rank(1.0 - tail)};
}

/// Least-squares slope of y against x.
inline double regression_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("regression_slope: need >= 2 paired points");
    double mx = mean(x), my = mean(y);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        num += (x[i] - mx) * (y[i] - my);
        den += (x[i] - mx) * (x[i] - mx);
    }
    if (den == 0.0) throw std::invalid_argument("regression_slope: x is constant");
    return num / den;
}

// ---------------------------------------------------------------------------
// Regularized incomplete gamma and the chi-square survival function
// ---------------------------------------------------------------------------

namespace detail {

inline double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < 500; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * 1e-15) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

inline double gamma_q_contfrac(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-15) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace detail

/// Q(a, x) = 1 - P(a, x), the upper regularized incomplete gamma function.
inline double gamma_q(double a, double x) {
    if (!(a > 0.0) || x < 0.0) throw std::invalid_argument("gamma_q: need a > 0 and x >= 0");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - detail::gamma_p_series(a, x);
    return detail::gamma_q_contfrac(a, x);
}

/// P(X >= x) for a chi-square variable with `df` degrees of freedom.
inline double chi_square_sf(double x, double df) { return gamma_q(df / 2.0, x / 2.0); }

/// Pools consecutive bins until each pooled bin's expectation reaches
/// `min_expected` (trailing remainder merges into the last pooled bin).
inline std::pair<std::vector<double>, std::vector<double>> pool_low_expected(
    const std::vector<double>& observed, const std::vector<double>& expected,
    double min_expected) {
    if (observed.size() != expected.size() || observed.empty())
        throw std::invalid_argument("pool_low_expected: size mismatch");
    std::vector<double> obs, exp;
    double o = 0.0, e = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        o += observed[i];
        e += expected[i];
        if (e >= min_expected) {
            obs.push_back(o);
            exp.push_back(e);
            o = e = 0.0;
        }
    }
    if (e > 0.0 || o > 0.0) {
        if (exp.empty()) {
            obs.push_back(o);
            exp.push_back(e);
        } else {
            obs.back() += o;
            exp.back() += e;
        }
    }
    return {obs, exp};
}

/// Pearson chi-square p-value, df = bins - 1. Callers pool sparse bins first.
inline double chi_square_pvalue(const std::vector<double>& observed,
                                const std::vector<double>& expected) {
    if (observed.size() != expected.size() || observed.size() < 2)
        throw std::invalid_argument("chi_square_pvalue: need >= 2 matching bins");
    double stat = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        if (!(expected[i] > 0.0)) throw std::invalid_argument("chi_square_pvalue: expected <= 0");
        double d = observed[i] - expected[i];
        stat += d * d / expected[i];
    }
    return chi_square_sf(stat, static_cast<double>(observed.size() - 1));
}

/// Exact Binomial(n, p) probability mass at j.
inline double binomial_pmf(std::size_t n, double p, std::size_t j) {
    if (j > n) return 0.0;
    if (p <= 0.0) return j == 0 ? 1.0 : 0.0;
    if (p >= 1.0) return j == n ? 1.0 : 0.0;
    double lg = std::lgamma(static_cast<double>(n) + 1) - std::lgamma(static_cast<double>(j) + 1) -
                std::lgamma(static_cast<double>(n - j) + 1) +
                static_cast<double>(j) * std::log(p) +
                static_cast<double>(n - j) * std::log1p(-p);
    return std::exp(lg);
}

}  // namespace qdlab
