#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace nax {

/// All randomness in a run flows from one manifest seed. Components draw
/// from named sub-streams so a partial rerun (say, bootstrap only) sees
/// the same stream regardless of what else ran.
inline std::uint64_t substream_seed(std::uint64_t seed, std::string_view name,
                                    std::uint64_t index = 0) {
    // FNV-1a over the name, then splitmix-style finalization with the index.
    std::uint64_t h = 14695981039346656037ull;
    for (char c : name) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (h + index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline std::mt19937_64 make_rng(std::uint64_t seed, std::string_view name,
                                std::uint64_t index = 0) {
    return std::mt19937_64{substream_seed(seed, name, index)};
}

}  // namespace nax
