#pragma once

#include <cstdint>
#include <random>

#include "../pnorm.hpp"
#include "../tensor.hpp"

namespace lpspec::detail {

inline std::uint64_t splitmix64(std::uint64_t z)
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Independent generator for restart `index`; depends only on (seed, index)
/// so restarts can be run in any order.
inline std::mt19937_64 restart_rng(std::uint64_t seed, std::uint64_t index)
{
    return std::mt19937_64(splitmix64(seed ^ splitmix64(index + 1)));
}

/// Standard normal sample rescaled onto the unit l^p sphere.
inline Vector random_unit_vector(std::mt19937_64& rng, std::size_t n, int p)
{
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector x(n);
    double n2 = 0.0;
    do {
        for (auto& v : x)
            v = normal(rng);
        n2 = norm2(x);
    } while (n2 == 0.0);
    return normalized(x, p);
}

} // namespace lpspec::detail
