#pragma once
// Seeded randomness shared by every module.
//
// Two fixed primitives keep runs reproducible across platforms:
//   - FNV-1a 64-bit hashes (seed bytes little-endian, then token bytes),
//     used to turn (seed, token) pairs into generator seeds.
//   - SplitMix64 as the only generator. 64-bit state, passes BigCrush,
//     and trivially portable.

#include <cstdint>
#include <string_view>

namespace kgc {

inline constexpr std::uint64_t kFnvOffsetBasis = 0xcbf29ce484222325ull;
inline constexpr std::uint64_t kFnvPrime = 0x100000001b3ull;

/// FNV-1a over the 8 little-endian bytes of `seed` followed by `data`.
inline std::uint64_t fnv1a64(std::uint64_t seed, std::string_view data) {
    std::uint64_t h = kFnvOffsetBasis;
    for (int i = 0; i < 8; ++i) {
        h ^= (seed >> (8 * i)) & 0xffu;
        h *= kFnvPrime;
    }
    for (unsigned char c : data) {
        h ^= c;
        h *= kFnvPrime;
    }
    return h;
}

/// Named sub-seed of a run seed. All derived RNG streams (split, episodes,
/// training, ...) come from here so they never alias each other.
inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag) {
    return fnv1a64(seed, tag);
}

class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1), 53 bits of mantissa.
    double next_double() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    /// Unbiased uniform integer in [0, bound). bound must be > 0.
    std::uint64_t uniform_below(std::uint64_t bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const std::uint64_t r = next();
            if (r >= threshold) return r % bound;
        }
    }

private:
    std::uint64_t state_;
};

} // namespace kgc
