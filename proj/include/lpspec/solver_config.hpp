#pragma once

#include <cstdint>
#include <string>

#include "errors.hpp"

namespace lpspec {

/// Iteration controls shared by the multi-start solvers.
struct SolverConfig
{
    double tol = 1e-10;
    int max_iter = 1000;
    int restarts = 32;
    std::uint64_t seed = 0;

    void validate() const
    {
        if (!(tol > 0.0))
            throw ParameterError("tol must be positive");
        if (max_iter < 1)
            throw ParameterError("max_iter must be at least 1, got " + std::to_string(max_iter));
        if (restarts < 1)
            throw ParameterError("restarts must be at least 1, got " + std::to_string(restarts));
    }
};

/// Tolerance used to identify two pairs found by different restarts.
inline constexpr double dedup_tolerance = 1e-6;

namespace detail {

/// Entries of a converged vector at most this large are tried at zero.
inline constexpr double snap_threshold = 1e-4;

} // namespace detail

} // namespace lpspec
