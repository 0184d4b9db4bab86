#pragma once

// Deterministic random substreams. Every stochastic loop in the project draws
// from a generator keyed by (seed, stream, index) so that results do not depend
// on the order in which work items run or on how many threads run them.

#include <cstdint>
#include <random>

namespace tcups {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Stream tags keep independent consumers of the same seed apart.
enum class Stream : std::uint64_t {
    ClassicalShots = 1,
    PoissonCounts = 2,
    Langevin = 3,
    Bootstrap = 4,
    Test = 99,
};

using Engine = std::mt19937_64;

inline Engine substream(std::uint64_t seed, Stream stream, std::uint64_t index,
                        std::uint64_t sub = 0) {
    std::uint64_t k = splitmix64(seed);
    k = splitmix64(k ^ static_cast<std::uint64_t>(stream));
    k = splitmix64(k ^ index);
    k = splitmix64(k ^ sub);
    return Engine(k);
}

}  // namespace tcups
