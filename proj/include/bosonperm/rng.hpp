#pragma once

#include <array>
#include <cstdint>

namespace bosonperm {

/// Philox4x64-10 counter-based generator (Salmon et al., Random123).
///
/// Every output block is a pure function of (counter, key), so a sample can
/// be regenerated from its index alone, independent of which thread draws
/// it or in what order. The counter space is 2^256 per key.
class Philox4x64 {
public:
    using Counter = std::array<std::uint64_t, 4>;
    using Key = std::array<std::uint64_t, 2>;

    static constexpr int kRounds = 10;

    static constexpr Counter generate(Counter ctr, Key key) noexcept {
        for (int round = 0; round < kRounds; ++round) {
            if (round > 0) {
                key[0] += kWeyl0;
                key[1] += kWeyl1;
            }
            ctr = single_round(ctr, key);
        }
        return ctr;
    }

private:
    static constexpr std::uint64_t kMul0 = 0xD2E7470EE14C6C93ULL;
    static constexpr std::uint64_t kMul1 = 0xCA5A826395121157ULL;
    static constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ULL;
    static constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73BULL;

    static constexpr void mulhilo(std::uint64_t a, std::uint64_t b,
                                  std::uint64_t& hi, std::uint64_t& lo) noexcept {
        const unsigned __int128 product = static_cast<unsigned __int128>(a) * b;
        hi = static_cast<std::uint64_t>(product >> 64);
        lo = static_cast<std::uint64_t>(product);
    }

    static constexpr Counter single_round(const Counter& x, const Key& key) noexcept {
        std::uint64_t hi0 = 0, lo0 = 0, hi1 = 0, lo1 = 0;
        mulhilo(kMul0, x[0], hi0, lo0);
        mulhilo(kMul1, x[2], hi1, lo1);
        return {hi1 ^ x[1] ^ key[0], lo1, hi0 ^ x[3] ^ key[1], lo0};
    }
};

/// Stream domains keep independent consumers of one user seed apart.
enum class StreamDomain : std::uint64_t {
    GlynnPhases = 0x676c796e6e000001ULL,
    Bootstrap = 0x626f6f7473000002ULL,
    Test = 0x7465737400000003ULL,
};

/// Maps the top 53 bits of a raw word to [0, 1).
constexpr double to_unit_double(std::uint64_t bits) noexcept {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Unbiased-enough bounded integer in [0, bound) via 64x64 multiply-high.
/// The bias is at most bound / 2^64.
constexpr std::uint64_t to_bounded(std::uint64_t bits, std::uint64_t bound) noexcept {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(bits) * bound) >> 64);
}

/// SplitMix64 finalizer, used to derive replicate seeds from a base seed.
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) noexcept {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace bosonperm
