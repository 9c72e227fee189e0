#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace qdlab {

/// Deterministic random source addressed by (seed, stream).
///
/// PCG32 (Melissa O'Neill's setseq variant: the stream id selects the LCG
/// increment). The output byte stream depends only on the integer state
/// transitions, so identical (seed, stream) pairs reproduce bit-exactly
/// across platforms. Distinct streams are independent sequences and safe to
/// run in parallel; a RandomSource instance is single-owner.
class RandomSource {
public:
    RandomSource(std::uint64_t seed, std::uint64_t stream = 0)
        : state_(0u), inc_((stream << 1u) | 1u) {
        next_u32();
        state_ += seed;
        next_u32();
    }

    std::uint32_t next_u32() {
        std::uint64_t old = state_;
        state_ = old * 6364136223846793005ull + inc_;
        std::uint32_t xorshifted = static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
        std::uint32_t rot = static_cast<std::uint32_t>(old >> 59u);
        return (xorshifted >> rot) | (xorshifted << ((32u - rot) & 31u));
    }

    std::uint64_t next_u64() {
        std::uint64_t hi = next_u32();
        return (hi << 32) | next_u32();
    }

    /// Uniform double in [0, 1), 53 random bits.
    double unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, bound). Rejection sampling, unbiased.
    std::uint64_t below(std::uint64_t bound) {
        if (bound == 0) throw std::invalid_argument("RandomSource::below: bound must be positive");
        if (bound == 1) return 0;
        std::uint64_t threshold = (0ull - bound) % bound;  // 2^64 mod bound
        for (;;) {
            std::uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

    bool bernoulli(double p) { return unit() < p; }

    /// Number of failures before the next success in Bernoulli(p) trials.
    /// Inverse-CDF sampling; used for skip-based position sampling.
    std::uint64_t geometric_gap(double p) {
        if (!(p > 0.0)) throw std::invalid_argument("geometric_gap: p must be positive");
        if (p >= 1.0) return 0;
        double u = unit();  // [0,1), so log1p(-u) is finite
        double g = std::log1p(-u) / std::log1p(-p);
        if (g >= 9.0e18) return 9000000000000000000ull;  // effectively "past any genome"
        return static_cast<std::uint64_t>(g);
    }

private:
    std::uint64_t state_;
    std::uint64_t inc_;
};

}  // namespace qdlab
