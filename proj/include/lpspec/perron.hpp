#pragma once

// Nonnegative tensors: irreducibility and the positive l^k eigenpair.
//
// A cubical tensor is reducible when some nonempty proper index set S has
// a_{j_1 j_2 .. j_k} = 0 whenever j_1 is outside S and j_2, .., j_k are all in
// S. For a positive vector x the Collatz-Wielandt ratios
// [A(I, x, .., x)]_i / x_i^{k-1} bracket the Perron value; their maximum is
// mu(x) = inf{ mu >= 0 : A(I, x, .., x) <= mu x^{k-1} }.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "eigen.hpp"
#include "errors.hpp"
#include "pnorm.hpp"
#include "solver_config.hpp"
#include "tensor.hpp"

namespace lpspec {

/// Zero-based index set, sorted ascending.
using IndexSet = std::vector<std::size_t>;

inline constexpr std::size_t reducibility_size_limit = 24;

inline bool is_nonnegative(const DenseTensor& a)
{
    const auto v = a.values();
    return std::all_of(v.begin(), v.end(), [](double x) { return x >= 0.0; });
}

/// A nonempty proper reducing set S, or nullopt when A is irreducible.
///
/// Valid reducing sets are exactly the proper nonempty sets closed under the
/// rules "{j_2, .., j_k} subset of S  =>  j_1 in S" taken over the nonzero
/// entries. Closed sets are stable under intersection, so a reducing set
/// exists iff the closure of some singleton is proper. The closure of the
/// smallest such singleton is returned.
inline std::optional<IndexSet> find_reducing_set(const DenseTensor& a)
{
    if (!a.is_cubical())
        throw DimensionError("reducibility is defined for cubical tensors only");
    const std::size_t n = a.dim(0);
    if (n > reducibility_size_limit)
        throw SizeLimitError("find_reducing_set supports n <= " + std::to_string(reducibility_size_limit)
                             + ", got " + std::to_string(n));
    using Mask = std::uint32_t;
    // rules[j1] = distinct masks of {j_2, .., j_k} over nonzero entries.
    std::vector<std::vector<Mask>> rules(n);
    const auto vals = a.values();
    for (std::size_t off = 0; off < a.size(); ++off) {
        if (vals[off] == 0.0)
            continue;
        const auto idx = a.unravel(off);
        Mask rest = 0;
        for (std::size_t m = 1; m < idx.size(); ++m)
            rest |= Mask{1} << idx[m];
        rules[idx[0]].push_back(rest);
    }
    for (auto& r : rules) {
        std::sort(r.begin(), r.end());
        r.erase(std::unique(r.begin(), r.end()), r.end());
    }
    const Mask full = n == 32 ? ~Mask{0} : ((Mask{1} << n) - 1);
    for (std::size_t seed = 0; seed < n; ++seed) {
        Mask s = Mask{1} << seed;
        bool grew = true;
        while (grew && s != full) {
            grew = false;
            for (std::size_t j = 0; j < n; ++j) {
                if (s & (Mask{1} << j))
                    continue;
                for (Mask rest : rules[j])
                    if ((rest & ~s) == 0) {
                        s |= Mask{1} << j;
                        grew = true;
                        break;
                    }
            }
        }
        if (s != full) {
            IndexSet out;
            for (std::size_t j = 0; j < n; ++j)
                if (s & (Mask{1} << j))
                    out.push_back(j);
            return out;
        }
    }
    return std::nullopt;
}

inline bool is_irreducible(const DenseTensor& a) { return !find_reducing_set(a).has_value(); }

struct CollatzWielandtBounds
{
    double lower = 0.0;
    double upper = 0.0;
};

namespace detail {

/// Bounds for x >= 0; ratios with x_i = 0 count as +inf when y_i > 0 and are
/// skipped when y_i = 0.
inline CollatzWielandtBounds cw_bounds(std::span<const double> y, std::span<const double> x, int k)
{
    CollatzWielandtBounds b{std::numeric_limits<double>::infinity(), 0.0};
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double denom = ipow(x[i], k - 1);
        if (denom == 0.0) {
            if (y[i] > 0.0)
                b.upper = std::numeric_limits<double>::infinity();
            continue;
        }
        const double ratio = y[i] / denom;
        b.lower = std::min(b.lower, ratio);
        b.upper = std::max(b.upper, ratio);
    }
    if (b.lower == std::numeric_limits<double>::infinity())
        b.lower = 0.0;
    return b;
}

} // namespace detail

/// (min_i, max_i) of [A(I, x, .., x)]_i / x_i^{k-1} for entrywise-positive x.
inline CollatzWielandtBounds collatz_wielandt(const DenseTensor& a, std::span<const double> x)
{
    if (!a.is_cubical())
        throw DimensionError("Collatz-Wielandt bounds require a cubical tensor");
    if (!is_nonnegative(a))
        throw DomainError("Collatz-Wielandt bounds require a nonnegative tensor");
    for (std::size_t i = 0; i < x.size(); ++i)
        if (!(x[i] > 0.0))
            throw DomainError("Collatz-Wielandt bounds require x > 0; entry " + std::to_string(i + 1)
                              + " is not positive");
    const auto y = mode_contraction(a, x, 0);
    return detail::cw_bounds(y, x, static_cast<int>(a.order()));
}

struct PerronResult
{
    double lambda = 0.0;
    Vector vector;
    double lower = 0.0;
    double upper = 0.0;
    int iterations = 0;
    bool converged = false;
    double residual = std::numeric_limits<double>::infinity();
    std::vector<std::string> warnings;
};

struct PerronStep
{
    int iteration = 0;
    const Vector& x;
    CollatzWielandtBounds bounds;
};

struct PerronOptions
{
    /// Run on reducible input instead of raising ReducibleError.
    bool force = false;
    /// Use x <- normalize(x + phi_inverse(A(I, x, .., x), k - 1)), which
    /// breaks the cycling of the plain update on periodic structures.
    bool damped = false;
    /// Called once per iterate with its Collatz-Wielandt bounds.
    std::function<void(const PerronStep&)> on_step;
};

/// Entries at or below this value at convergence produce a positivity warning.
inline constexpr double positivity_floor = 1e-12;

/// Positive l^k eigenpair of a nonnegative irreducible tensor by the
/// power-type update x <- phi_inverse(A(I, x, .., x), k - 1) / ||.||_k from
/// the uniform vector. Converged when upper - lower <= tol * max(1, upper);
/// lambda is then the upper bound.
inline PerronResult solve_perron(const DenseTensor& a, const SolverConfig& config, const PerronOptions& options = {})
{
    config.validate();
    if (!a.is_cubical())
        throw DimensionError("solve_perron requires a cubical tensor");
    if (!is_nonnegative(a))
        throw DomainError("solve_perron requires a nonnegative tensor");
    if (a.is_zero())
        throw ZeroTensorError("the zero tensor has no positive eigenvalue");
    if (!options.force) {
        if (auto s = find_reducing_set(a)) {
            std::string msg = "tensor is reducible; reducing set {";
            for (std::size_t i = 0; i < s->size(); ++i)
                msg += (i ? "," : "") + std::to_string((*s)[i] + 1);
            throw ReducibleError(msg + "}");
        }
    }
    const std::size_t n = a.dim(0);
    const int k = static_cast<int>(a.order());
    PerronResult out;
    Vector x(n, std::pow(static_cast<double>(n), -1.0 / k));
    for (int it = 1; it <= config.max_iter; ++it) {
        const auto y = mode_contraction(a, x, 0);
        if (norm2(y) == 0.0)
            throw DegenerateIterateError("A(I, x, .., x) vanished at iteration " + std::to_string(it));
        const auto b = detail::cw_bounds(y, x, k);
        out.iterations = it;
        out.lower = b.lower;
        out.upper = b.upper;
        out.vector = x;
        if (options.on_step)
            options.on_step(PerronStep{it, x, b});
        if (b.upper - b.lower <= config.tol * std::max(1.0, b.upper)) {
            out.converged = true;
            break;
        }
        auto next = phi_inverse(y, k - 1);
        if (options.damped) {
            const double scale = lp_norm(next, k);
            for (std::size_t i = 0; i < n; ++i)
                next[i] = x[i] + next[i] / scale;
        }
        x = normalized(next, k);
    }
    out.lambda = out.upper;
    out.residual = eigen_residual(a, out.vector, out.lambda, k, 0);
    for (std::size_t i = 0; i < n; ++i)
        if (out.vector[i] <= positivity_floor) {
            out.warnings.push_back("eigenvector entry " + std::to_string(i + 1)
                                   + " is not strictly positive at the final iterate");
            break;
        }
    return out;
}

/// Distinct mode-1 l^k eigenpairs with nonnegative eigenvectors found by
/// multi-start search. More than one entry means the positive eigenvector was
/// not unique on this instance.
inline std::vector<EigenPair> nonnegative_eigenpairs(const DenseTensor& a, const SolverConfig& config)
{
    const int k = static_cast<int>(a.order());
    auto pairs = solve_mode_eigenpairs(a, 0, k, config);
    std::vector<EigenPair> out;
    for (auto& pr : pairs) {
        if (std::all_of(pr.vector.begin(), pr.vector.end(), [](double v) { return v >= -positivity_floor; })) {
            out.push_back(std::move(pr));
            continue;
        }
        // (-x, (-1)^k lambda) is also an eigenpair; keep it if that one is nonnegative.
        if (std::all_of(pr.vector.begin(), pr.vector.end(), [](double v) { return v <= positivity_floor; })) {
            for (auto& v : pr.vector)
                v = -v;
            pr.lambda = homogeneous_eval(a, pr.vector);
            out.push_back(std::move(pr));
        }
    }
    return out;
}

} // namespace lpspec
