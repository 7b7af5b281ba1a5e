#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <vector>

#if defined(__BMI2__)
#include <immintrin.h>
#endif

namespace ladderent::bits {

inline constexpr int kMaxSites = 30;

/// Pascal's triangle up to kMaxSites, built once.
inline const std::array<std::array<uint64_t, kMaxSites + 1>, kMaxSites + 1>& binomials() {
    static const auto table = [] {
        std::array<std::array<uint64_t, kMaxSites + 1>, kMaxSites + 1> c{};
        for (int i = 0; i <= kMaxSites; ++i) {
            c[i][0] = 1;
            for (int j = 1; j <= i; ++j)
                c[i][j] = c[i - 1][j - 1] + (j <= i - 1 ? c[i - 1][j] : 0);
        }
        return c;
    }();
    return table;
}

inline uint64_t binom(int n, int k) {
    if (k < 0 || k > n) return 0;
    return binomials()[n][k];
}

/// Rank of a k-bit pattern among all k-bit patterns sorted by integer value
/// (colexicographic combinadic: sum of C(p_i, i) over the i-th lowest set bit p_i).
inline uint64_t pattern_rank(uint64_t pattern) {
    uint64_t rank = 0;
    int i = 1;
    while (pattern) {
        int p = std::countr_zero(pattern);
        rank += binom(p, i++);
        pattern &= pattern - 1;
    }
    return rank;
}

/// Inverse of pattern_rank for patterns with k set bits out of n.
inline uint64_t pattern_unrank(uint64_t rank, int n, int k) {
    uint64_t pattern = 0;
    for (int i = k; i >= 1; --i) {
        int p = i - 1;
        while (p + 1 <= n - 1 && binom(p + 1, i) <= rank) ++p;
        pattern |= uint64_t{1} << p;
        rank -= binom(p, i);
    }
    return pattern;
}

/// All n-bit integers with exactly k set bits, strictly increasing (Gosper).
inline std::vector<uint64_t> patterns_with_popcount(int n, int k) {
    std::vector<uint64_t> out;
    out.reserve(binom(n, k));
    if (k == 0) {
        out.push_back(0);
        return out;
    }
    uint64_t v = (uint64_t{1} << k) - 1;
    const uint64_t limit = uint64_t{1} << n;
    while (v < limit) {
        out.push_back(v);
        uint64_t t = v | (v - 1);
        v = (t + 1) | (((~t & -~t) - 1) >> (std::countr_zero(v) + 1));
    }
    return out;
}

/// Parallel bit extract: gathers the bits of x selected by mask into the low bits.
inline uint64_t pext(uint64_t x, uint64_t mask) {
#if defined(__BMI2__)
    return _pext_u64(x, mask);
#else
    uint64_t out = 0, bit = 1;
    while (mask) {
        uint64_t low = mask & -mask;
        if (x & low) out |= bit;
        bit <<= 1;
        mask &= mask - 1;
    }
    return out;
#endif
}

/// Parallel bit deposit: scatters the low bits of x into the positions of mask.
inline uint64_t pdep(uint64_t x, uint64_t mask) {
#if defined(__BMI2__)
    return _pdep_u64(x, mask);
#else
    uint64_t out = 0;
    while (mask) {
        uint64_t low = mask & -mask;
        if (x & 1) out |= low;
        x >>= 1;
        mask &= mask - 1;
    }
    return out;
#endif
}

/// Byte-table pext for hot loops without BMI2; covers masks on up to 32 bits.
class PextTable {
public:
    explicit PextTable(uint64_t mask) : mask_(mask) {
        int shift = 0;
        for (int b = 0; b < 4; ++b) {
            uint64_t mb = (mask >> (8 * b)) & 0xff;
            for (int v = 0; v < 256; ++v) tbl_[b][v] = static_cast<uint32_t>(pext(v, mb)) << shift;
            shift += std::popcount(mb);
        }
    }
    uint32_t operator()(uint64_t x) const {
        return tbl_[0][x & 0xff] | tbl_[1][(x >> 8) & 0xff] | tbl_[2][(x >> 16) & 0xff] |
               tbl_[3][(x >> 24) & 0xff];
    }
    uint64_t mask() const { return mask_; }

private:
    uint64_t mask_;
    std::array<std::array<uint32_t, 256>, 4> tbl_{};
};

}  // namespace ladderent::bits
