#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace darpdp {

using Rng = std::mt19937_64;

// Independent stream for one solver component, derived from the run seed.
inline Rng derive_rng(std::uint64_t seed, std::uint32_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), stream};
    return Rng(seq);
}

inline double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

// Uniform integer in [lo, hi].
inline int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
    // Fisher-Yates with our own index draws so the order does not depend on
    // the standard library's shuffle implementation.
    for (std::size_t i = v.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(i) - 1));
        std::swap(v[i - 1], v[j]);
    }
}

}  // namespace darpdp
