#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "qdlab/rng.hpp"

namespace qdlab {

/// Fixed-length bit vector over {0,1}^n with a cached one-count.
///
/// Bits are packed into 64-bit words; unused high bits of the last word stay
/// zero. The one-count is maintained on every write, so fitness functions of
/// |x|_1 are O(1).
class Genotype {
public:
    Genotype() = default;

    explicit Genotype(std::size_t n) : n_(n), words_((n + 63) / 64, 0ull), ones_(0) {
        if (n == 0) throw std::invalid_argument("Genotype: length must be >= 1");
    }

    static Genotype zeros(std::size_t n) { return Genotype(n); }

    static Genotype filled(std::size_t n) {
        Genotype g(n);
        for (auto& w : g.words_) w = ~0ull;
        g.mask_tail();
        g.ones_ = n;
        return g;
    }

    /// Each bit independently 1 with probability 1/2.
    static Genotype uniform(std::size_t n, RandomSource& rng) {
        Genotype g(n);
        for (auto& w : g.words_) w = rng.next_u64();
        g.mask_tail();
        g.recount();
        return g;
    }

    /// Low n bits of `mask` (bit i of the mask becomes position i).
    static Genotype from_mask(std::size_t n, std::uint64_t mask) {
        if (n > 64) throw std::invalid_argument("Genotype::from_mask: n must be <= 64");
        Genotype g(n);
        g.words_[0] = (n == 64) ? mask : (mask & ((1ull << n) - 1));
        g.recount();
        return g;
    }

    /// Parse "0110..." with position 0 first.
    static Genotype from_string(const std::string& s) {
        Genotype g(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (s[i] == '1') g.set(i, true);
            else if (s[i] != '0') throw std::invalid_argument("Genotype::from_string: expected 0/1");
        }
        return g;
    }

    std::size_t size() const { return n_; }
    std::size_t ones() const { return ones_; }

    bool test(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }

    void set(std::size_t i, bool v) {
        std::uint64_t bit = 1ull << (i & 63);
        std::uint64_t& w = words_[i >> 6];
        if (v && !(w & bit)) { w |= bit; ++ones_; }
        else if (!v && (w & bit)) { w &= ~bit; --ones_; }
    }

    void flip(std::size_t i) {
        std::uint64_t bit = 1ull << (i & 63);
        std::uint64_t& w = words_[i >> 6];
        w ^= bit;
        ones_ += (w & bit) ? 1 : -1;
    }

    /// Recomputed popcount over raw words; equals ones() at all times.
    std::size_t popcount_raw() const {
        std::size_t c = 0;
        for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
        return c;
    }

    const std::vector<std::uint64_t>& words() const { return words_; }

    bool operator==(const Genotype& o) const { return n_ == o.n_ && words_ == o.words_; }
    bool operator!=(const Genotype& o) const { return !(*this == o); }

    std::string to_string() const {
        std::string s(n_, '0');
        for (std::size_t i = 0; i < n_; ++i)
            if (test(i)) s[i] = '1';
        return s;
    }

private:
    void mask_tail() {
        std::size_t rem = n_ & 63;
        if (rem) words_.back() &= (1ull << rem) - 1;
    }
    void recount() { ones_ = popcount_raw(); }

    std::size_t n_ = 0;
    std::vector<std::uint64_t> words_;
    std::size_t ones_ = 0;
};

inline std::size_t hamming(const Genotype& a, const Genotype& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("hamming: length mismatch (" + std::to_string(a.size()) +
                                    " vs " + std::to_string(b.size()) + ")");
    std::size_t d = 0;
    for (std::size_t i = 0; i < a.words().size(); ++i)
        d += static_cast<std::size_t>(std::popcount(a.words()[i] ^ b.words()[i]));
    return d;
}

/// Standard bit mutation: copy `parent` into `out`, then flip each position
/// independently with probability p_m. Flip positions are drawn by geometric
/// gap skipping, so the cost is O(1 + n*p_m) expected instead of n coin flips.
inline void mutate_into(const Genotype& parent, double p_m, RandomSource& rng, Genotype& out) {
    if (!(p_m > 0.0) || !(p_m < 1.0))
        throw std::invalid_argument("mutate: p_m must lie in (0,1)");
    out = parent;  // reuses capacity when shapes match
    std::size_t n = parent.size();
    std::uint64_t pos = rng.geometric_gap(p_m);
    while (pos < n) {
        out.flip(pos);
        pos += 1 + rng.geometric_gap(p_m);
    }
}

inline Genotype mutate(const Genotype& parent, double p_m, RandomSource& rng) {
    Genotype out;
    mutate_into(parent, p_m, rng, out);
    return out;
}

}  // namespace qdlab
