#pragma once

// l^p eigenpairs of cubical tensors.
//
// A mode-m eigenpair is a unit l^p vector x with a scalar mu such that
//
//   A(x, .., x, I, x, .., x) = mu * phi(x, p - 1)      (identity in slot m)
//
// For symmetric tensors every slot gives the same equation; p = 2 yields the
// Z-eigenpairs and p = k the H-eigenpairs. For nonsymmetric tensors each mode
// is solved on its own with the same vector in all non-identity slots; the
// coupled reading that mixes x_1 and x_2 in one equation is not implemented.
//
// Each restart contributes up to two candidates: a fixed-point run
// x <- phi_inverse(A(.., I, ..), p - 1) / ||.||_p, which converges to
// attracting pairs, and a Newton run on the Lagrange system from the same
// random start, which also reaches saddle-type pairs. Every restart adds one
// shifted fixed-point run, x <- phi_inverse(A(.., I, ..) + s phi(x, p - 1)),
// with s = +-(k - 1) ||A||_F alternating; the shift makes the update climb
// (or descend) A(x, .., x), so the extreme pairs are reached even when a
// larger |lambda| dominates the plain iteration.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "detail/newton.hpp"
#include "detail/random.hpp"
#include "errors.hpp"
#include "pnorm.hpp"
#include "solver_config.hpp"
#include "tensor.hpp"

namespace lpspec {

struct EigenPair
{
    Vector vector;
    double lambda = 0.0;
    std::size_t mode = 0; ///< zero-based identity slot
    int p = 2;
    double residual = std::numeric_limits<double>::infinity();
    bool converged = false;
};

/// || A(x, .., I_mode, .., x) - lambda * phi(x, p - 1) ||_2.
inline double eigen_residual(const DenseTensor& a, std::span<const double> x, double lambda, int p,
                             std::size_t mode = 0)
{
    if (!a.is_cubical())
        throw DimensionError("eigenpairs require a cubical tensor");
    detail::check_mode(a, mode);
    if (p < 2)
        throw ParameterError("norm exponent must be an integer >= 2, got " + std::to_string(p));
    auto c = mode_contraction(a, x, mode);
    const auto f = phi(x, p - 1);
    for (std::size_t i = 0; i < c.size(); ++i)
        c[i] -= lambda * f[i];
    return norm2(c);
}

namespace detail {

/// Lagrange system in z = (x, lambda):
///   A(x, .., I_mode, .., x) - lambda phi(x, p - 1) = 0,   (||x||_p^p - 1) / p = 0.
struct EigenLagrangeSystem
{
    const DenseTensor& a;
    std::size_t mode;
    int p;

    void operator()(const Vector& z, Vector& f, Matrix& jac) const
    {
        const std::size_t n = a.dim(0);
        const std::size_t k = a.order();
        const Vector x(z.begin(), z.begin() + static_cast<std::ptrdiff_t>(n));
        const double lambda = z[n];
        const auto xs = repeat(x, k);
        const auto c = partial_contraction(a, xs, mode);
        const auto ph = phi(x, p - 1);
        f.assign(n + 1, 0.0);
        jac = Matrix(n + 1, n + 1);
        for (std::size_t j = 0; j < k; ++j) {
            if (j == mode)
                continue;
            const auto block = partial_contraction2(a, xs, mode, j);
            for (std::size_t r = 0; r < n; ++r)
                for (std::size_t q = 0; q < n; ++q)
                    jac(r, q) += block(r, q);
        }
        double sum = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            f[r] = c[r] - lambda * ph[r];
            jac(r, r) -= lambda * (p - 1) * ipow(std::abs(x[r]), p - 2);
            jac(r, n) = -ph[r];
            jac(n, r) = ph[r];
            sum += ipow(std::abs(x[r]), p);
        }
        f[n] = (sum - 1.0) / p;
    }
};

/// Normalizes, recomputes lambda = A(x, .., x) and picks the canonical sign:
/// for even k, (x, l) ~ (-x, l) and the first significant entry is made
/// positive; for odd k, (x, l) ~ (-x, -l) and lambda is made nonnegative.
inline void finalize_eigen(const DenseTensor& a, EigenPair& pair, double tol)
{
    pair.vector = normalized(pair.vector, pair.p);
    pair.lambda = homogeneous_eval(a, pair.vector);
    // Near a zero entry the equations can be flat (p > 2 makes phi vanish to
    // higher order), leaving entries of size sqrt(tol). Zero them when that
    // does not raise the residual.
    if (std::any_of(pair.vector.begin(), pair.vector.end(),
                    [](double v) { return v != 0.0 && std::abs(v) <= snap_threshold; })) {
        Vector snapped = pair.vector;
        for (auto& v : snapped)
            if (std::abs(v) <= snap_threshold)
                v = 0.0;
        if (norm2(snapped) > 0.0) {
            snapped = normalized(snapped, pair.p);
            const double l = homogeneous_eval(a, snapped);
            if (eigen_residual(a, snapped, l, pair.p, pair.mode)
                <= eigen_residual(a, pair.vector, pair.lambda, pair.p, pair.mode)) {
                pair.vector = std::move(snapped);
                pair.lambda = l;
            }
        }
    }
    const bool odd = a.order() % 2 == 1;
    bool flip = false;
    if (odd && pair.lambda < 0.0) {
        flip = true;
    } else if (!odd || pair.lambda == 0.0) {
        for (double v : pair.vector)
            if (std::abs(v) > 1e-8) {
                flip = v < 0.0;
                break;
            }
    }
    if (flip) {
        for (auto& v : pair.vector)
            v = -v;
        pair.lambda = homogeneous_eval(a, pair.vector);
    }
    for (auto& v : pair.vector)
        v += 0.0; // no negative zeros in reports
    pair.residual = eigen_residual(a, pair.vector, pair.lambda, pair.p, pair.mode);
    pair.converged = pair.residual <= tol;
}

inline std::optional<EigenPair> newton_eigen(const DenseTensor& a, std::size_t mode, int p, const Vector& x0,
                                             double tol, int max_iter)
{
    Vector z = x0;
    z.push_back(homogeneous_eval(a, x0));
    auto res = newton_solve(EigenLagrangeSystem{a, mode, p}, std::move(z), 1e-3 * tol, max_iter);
    EigenPair out;
    out.vector.assign(res.z.begin(), res.z.end() - 1);
    if (norm2(out.vector) == 0.0)
        return std::nullopt;
    out.mode = mode;
    out.p = p;
    finalize_eigen(a, out, tol);
    if (!out.converged)
        return std::nullopt;
    return out;
}

inline double max_abs_diff(std::span<const double> x, std::span<const double> y)
{
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        d = std::max(d, std::abs(x[i] - y[i]));
    return d;
}

/// Fixed-point run from x0. Switches to damped updates
/// x <- normalize(x + theta (update - x)), theta = 0.5, once the iterates
/// show a period-2 pattern. A nonzero `shift` adds shift * phi(x, p - 1) to
/// the contraction; fixed points are unchanged.
inline EigenPair fixed_point_eigen(const DenseTensor& a, std::size_t mode, int p, Vector x,
                                   const SolverConfig& config, double shift = 0.0)
{
    const bool even = a.order() % 2 == 0;
    EigenPair best;
    best.mode = mode;
    best.p = p;
    Vector prev, prev2;
    bool damped = false;
    double window_start = std::numeric_limits<double>::infinity();
    for (int it = 1; it <= config.max_iter; ++it) {
        auto c = mode_contraction(a, x, mode);
        if (shift != 0.0) {
            const auto px = phi(x, p - 1);
            for (std::size_t i = 0; i < c.size(); ++i)
                c[i] += shift * px[i];
        }
        if (norm2(c) == 0.0)
            throw DegenerateIterateError("contraction vanished at the current iterate");
        auto next = normalized(phi_inverse(c, p - 1), p);
        // For even k, -x is an equivalent representative; keep the orientation.
        if (even && dot(next, x) < 0.0)
            for (auto& v : next)
                v = -v;
        if (damped) {
            for (std::size_t i = 0; i < x.size(); ++i)
                next[i] = x[i] + 0.5 * (next[i] - x[i]);
            if (norm2(next) == 0.0)
                throw DegenerateIterateError("damped update vanished");
            next = normalized(next, p);
        }
        prev2 = std::move(prev);
        prev = std::move(x);
        x = std::move(next);
        if (!damped && it > 10 && !prev2.empty()) {
            const double step = max_abs_diff(x, prev);
            const double back = max_abs_diff(x, prev2);
            if (step > 1e-6 && back < 0.1 * step)
                damped = true;
        }
        const double lambda = homogeneous_eval(a, x);
        const double r = eigen_residual(a, x, lambda, p, mode);
        if (r < best.residual) {
            best.vector = x;
            best.lambda = lambda;
            best.residual = r;
        }
        if (r <= config.tol)
            break;
        if (it % 50 == 1) {
            if (r > 0.999 * window_start)
                break;
            window_start = r;
        }
    }
    finalize_eigen(a, best, config.tol);
    if (!best.converged && best.residual < 1e-3)
        if (auto polished = newton_eigen(a, mode, p, best.vector, config.tol, 50))
            return *polished;
    return best;
}

inline bool same_eigen_pair(const EigenPair& x, const EigenPair& y, std::size_t order, double tol)
{
    if (std::abs(x.lambda - y.lambda) > tol)
        return false;
    if (max_abs_diff(x.vector, y.vector) <= tol)
        return true;
    const bool sign_free = order % 2 == 0 || std::abs(x.lambda) <= tol;
    if (!sign_free)
        return false;
    double d = 0.0;
    for (std::size_t i = 0; i < x.vector.size(); ++i)
        d = std::max(d, std::abs(x.vector[i] + y.vector[i]));
    return d <= tol;
}

inline std::vector<EigenPair> eigen_search(const DenseTensor& a, std::size_t mode, int p, const SolverConfig& config)
{
    config.validate();
    if (p < 2)
        throw ParameterError("norm exponent must be an integer >= 2, got " + std::to_string(p));
    if (a.is_zero())
        throw ZeroTensorError("the zero tensor has no eigenpairs with nonzero contraction");
    const std::size_t n = a.dim(0);
    const double shift = static_cast<double>(a.order() - 1) * a.frobenius_norm();
    std::vector<EigenPair> found;
    auto offer = [&](EigenPair&& pair) {
        if (!pair.converged)
            return;
        const bool dup = std::any_of(found.begin(), found.end(), [&](const EigenPair& q) {
            return same_eigen_pair(q, pair, a.order(), dedup_tolerance);
        });
        if (!dup)
            found.push_back(std::move(pair));
    };
    for (int r = 0; r < config.restarts; ++r) {
        auto rng = restart_rng(config.seed, static_cast<std::uint64_t>(r));
        const auto x0 = random_unit_vector(rng, n, p);
        try {
            offer(fixed_point_eigen(a, mode, p, x0, config));
        } catch (const DegenerateIterateError&) {
        }
        if (auto pair = newton_eigen(a, mode, p, x0, config.tol, 100))
            offer(std::move(*pair));
        try {
            offer(fixed_point_eigen(a, mode, p, x0, config, r % 2 == 0 ? shift : -shift));
        } catch (const DegenerateIterateError&) {
        }
    }
    std::sort(found.begin(), found.end(), [](const EigenPair& x, const EigenPair& y) {
        if (x.lambda != y.lambda)
            return x.lambda > y.lambda;
        return x.vector < y.vector;
    });
    return found;
}

} // namespace detail

/// Distinct converged l^p eigenpairs of a symmetric tensor, sorted by lambda
/// descending. Nonsymmetric input is rejected; symmetrize it first if the
/// homogeneous polynomial is what matters.
inline std::vector<EigenPair> solve_symmetric_eigenpairs(const DenseTensor& a, int p, const SolverConfig& config)
{
    if (!a.is_cubical())
        throw DimensionError("eigenpairs require a cubical tensor");
    if (!is_symmetric(a))
        throw SymmetryError("solve_symmetric_eigenpairs requires a symmetric tensor");
    return detail::eigen_search(a, 0, p, config);
}

/// Distinct converged mode-`mode` eigenpairs (zero-based mode) of a cubical
/// tensor of any symmetry, sorted by mu descending.
inline std::vector<EigenPair> solve_mode_eigenpairs(const DenseTensor& a, std::size_t mode, int p,
                                                    const SolverConfig& config)
{
    if (!a.is_cubical())
        throw DimensionError("eigenpairs require a cubical tensor");
    detail::check_mode(a, mode);
    return detail::eigen_search(a, mode, p, config);
}

} // namespace lpspec
