#pragma once

// l^{p_1,...,p_k} singular pairs of a general tensor: tuples of unit vectors
// (x_1, ..., x_k) with ||x_i||_{p_i} = 1 and a scalar sigma such that
//
//   A(x_1, ..., x_{i-1}, I, x_{i+1}, ..., x_k) = sigma * phi(x_i, p_i - 1)
//
// for every mode i. Pairs are found by an alternating fixed-point sweep: each
// mode update x_i <- phi_inverse(g_i, p_i - 1) / ||.||_{p_i} is the exact
// maximizer of <g_i, x> over the unit l^{p_i} sphere, so sigma = A(x_1..x_k)
// increases monotonically along a sweep. An iterate that stalls with a small
// residual is finished with Newton's method on the Lagrange system.

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

struct SingularPair
{
    std::vector<Vector> vectors;
    double sigma = 0.0;
    double residual = std::numeric_limits<double>::infinity();
    std::vector<int> pnorms;
    bool converged = false;
    int iterations = 0;
};

/// max_i || A(x_1, .., I, .., x_k) - sigma * phi(x_i, p_i - 1) ||_2.
inline double singular_residual(const DenseTensor& a, std::span<const Vector> vectors, double sigma,
                                const PNormSpec& pnorms)
{
    detail::check_vectors(a, vectors, detail::no_mode, detail::no_mode);
    const auto ps = pnorms.expand(a.order());
    double worst = 0.0;
    for (std::size_t i = 0; i < a.order(); ++i) {
        auto g = partial_contraction(a, vectors, i);
        const auto f = phi(vectors[i], ps[i] - 1);
        for (std::size_t j = 0; j < g.size(); ++j)
            g[j] -= sigma * f[j];
        worst = std::max(worst, norm2(g));
    }
    return worst;
}

namespace detail {

/// Residual threshold below which a stalled sweep is handed to Newton.
inline constexpr double polish_threshold = 1e-3;

/// Square Lagrange system in z = (x_1, .., x_k, s_1, .., s_k):
///   A(.., I_i, ..) - s_i phi(x_i, p_i - 1) = 0,   (||x_i||_{p_i}^{p_i} - 1) / p_i = 0.
/// At a root every s_i equals A(x_1, .., x_k).
struct SingularLagrangeSystem
{
    const DenseTensor& a;
    std::vector<int> ps;
    std::vector<std::size_t> starts;
    std::size_t nx = 0;

    SingularLagrangeSystem(const DenseTensor& t, std::vector<int> p) : a(t), ps(std::move(p))
    {
        for (std::size_t i = 0; i < a.order(); ++i) {
            starts.push_back(nx);
            nx += a.dim(i);
        }
    }

    std::vector<Vector> unpack(const Vector& z) const
    {
        std::vector<Vector> xs(a.order());
        for (std::size_t i = 0; i < a.order(); ++i)
            xs[i].assign(z.begin() + static_cast<std::ptrdiff_t>(starts[i]),
                         z.begin() + static_cast<std::ptrdiff_t>(starts[i] + a.dim(i)));
        return xs;
    }

    Vector pack(std::span<const Vector> xs, double sigma) const
    {
        Vector z;
        for (const auto& x : xs)
            z.insert(z.end(), x.begin(), x.end());
        z.insert(z.end(), a.order(), sigma);
        return z;
    }

    void operator()(const Vector& z, Vector& f, Matrix& jac) const
    {
        const std::size_t k = a.order();
        const std::size_t n = nx + k;
        const auto xs = unpack(z);
        f.assign(n, 0.0);
        jac = Matrix(n, n);
        for (std::size_t i = 0; i < k; ++i) {
            const double s = z[nx + i];
            const int p = ps[i];
            const auto g = partial_contraction(a, xs, i);
            const auto ph = phi(xs[i], p - 1);
            for (std::size_t r = 0; r < a.dim(i); ++r) {
                const std::size_t row = starts[i] + r;
                f[row] = g[r] - s * ph[r];
                jac(row, row) -= s * (p - 1) * ipow(std::abs(xs[i][r]), p - 2);
                jac(row, nx + i) = -ph[r];
            }
            for (std::size_t j = 0; j < k; ++j) {
                if (j == i)
                    continue;
                const auto block = partial_contraction2(a, xs, i, j);
                for (std::size_t r = 0; r < a.dim(i); ++r)
                    for (std::size_t c = 0; c < a.dim(j); ++c)
                        jac(starts[i] + r, starts[j] + c) += block(r, c);
            }
            double sum = 0.0;
            for (std::size_t r = 0; r < a.dim(i); ++r) {
                sum += ipow(std::abs(xs[i][r]), p);
                jac(nx + i, starts[i] + r) = ph[r];
            }
            f[nx + i] = (sum - 1.0) / p;
        }
    }
};

inline void finalize_singular(const DenseTensor& a, const std::vector<int>& ps, SingularPair& pair, double tol)
{
    for (std::size_t i = 0; i < pair.vectors.size(); ++i)
        pair.vectors[i] = normalized(pair.vectors[i], ps[i]);
    pair.sigma = multilinear_eval(a, pair.vectors);
    // Same flat-direction cleanup as for eigenpairs.
    bool small = false;
    for (const auto& x : pair.vectors)
        small = small || std::any_of(x.begin(), x.end(), [](double v) { return v != 0.0 && std::abs(v) <= snap_threshold; });
    if (small) {
        auto snapped = pair.vectors;
        bool ok = true;
        for (std::size_t i = 0; i < snapped.size() && ok; ++i) {
            for (auto& v : snapped[i])
                if (std::abs(v) <= snap_threshold)
                    v = 0.0;
            ok = norm2(snapped[i]) > 0.0;
            if (ok)
                snapped[i] = normalized(snapped[i], ps[i]);
        }
        if (ok) {
            const double s = multilinear_eval(a, snapped);
            if (singular_residual(a, snapped, s, PNormSpec(ps))
                <= singular_residual(a, pair.vectors, pair.sigma, PNormSpec(ps))) {
                pair.vectors = std::move(snapped);
                pair.sigma = s;
            }
        }
    }
    if (pair.sigma < 0.0) {
        for (auto& v : pair.vectors[0])
            v = -v;
        pair.sigma = multilinear_eval(a, pair.vectors);
    }
    // Canonical representative under even sign flips: the first significant
    // entry of x_1 .. x_{k-1} is positive, x_k absorbs the flips.
    const std::size_t last = pair.vectors.size() - 1;
    for (std::size_t i = 0; i < last; ++i) {
        const auto lead = std::find_if(pair.vectors[i].begin(), pair.vectors[i].end(),
                                       [](double v) { return std::abs(v) > 1e-8; });
        if (lead != pair.vectors[i].end() && *lead < 0.0)
            for (std::size_t m : {i, last})
                for (auto& v : pair.vectors[m])
                    v = -v;
    }
    for (auto& x : pair.vectors)
        for (auto& v : x)
            v += 0.0;
    pair.pnorms = ps;
    pair.residual = singular_residual(a, pair.vectors, pair.sigma, PNormSpec(ps));
    pair.converged = pair.residual <= tol;
}

inline std::optional<SingularPair> polish_singular(const DenseTensor& a, const std::vector<int>& ps,
                                                   const SingularPair& start, double tol, int max_iter = 50)
{
    SingularLagrangeSystem sys(a, ps);
    auto res = newton_solve(sys, sys.pack(start.vectors, start.sigma), 1e-3 * tol, max_iter);
    SingularPair out;
    out.vectors = sys.unpack(res.z);
    for (const auto& x : out.vectors)
        if (norm2(x) == 0.0)
            return std::nullopt;
    out.iterations = start.iterations + res.iterations;
    finalize_singular(a, ps, out, tol);
    if (!out.converged)
        return std::nullopt;
    return out;
}

/// One alternating fixed-point run from `xs`.
inline SingularPair singular_attempt(const DenseTensor& a, const std::vector<int>& ps, std::vector<Vector> xs,
                                     const SolverConfig& config)
{
    const std::size_t k = a.order();
    for (std::size_t i = 0; i < k; ++i)
        xs[i] = normalized(xs[i], ps[i]);

    SingularPair best;
    best.pnorms = ps;
    double window_start = std::numeric_limits<double>::infinity();
    int it = 1;
    for (; it <= config.max_iter; ++it) {
        for (std::size_t i = 0; i < k; ++i) {
            const auto g = partial_contraction(a, xs, i);
            if (norm2(g) == 0.0)
                throw DegenerateIterateError("contraction vanished in mode " + std::to_string(i + 1));
            xs[i] = normalized(phi_inverse(g, ps[i] - 1), ps[i]);
        }
        const double sigma = multilinear_eval(a, xs);
        const double r = singular_residual(a, xs, sigma, PNormSpec(ps));
        if (r < best.residual) {
            best.vectors = xs;
            best.sigma = sigma;
            best.residual = r;
            best.iterations = it;
        }
        if (r <= config.tol)
            break;
        if (it % 50 == 1) {
            if (r > 0.999 * window_start)
                break;
            window_start = r;
        }
    }
    finalize_singular(a, ps, best, config.tol);
    if (!best.converged && best.residual < polish_threshold)
        if (auto polished = polish_singular(a, ps, best, config.tol))
            return *polished;
    return best;
}

inline std::vector<Vector> random_start(const DenseTensor& a, const std::vector<int>& ps, std::uint64_t seed,
                                        std::uint64_t index)
{
    auto rng = restart_rng(seed, index);
    std::vector<Vector> xs;
    for (std::size_t i = 0; i < a.order(); ++i)
        xs.push_back(random_unit_vector(rng, a.dim(i), ps[i]));
    return xs;
}

inline void check_singular_inputs(const DenseTensor& a, const SolverConfig& config)
{
    config.validate();
    if (a.is_zero())
        throw ZeroTensorError("the zero tensor has no nonzero singular pairs");
}

/// Identifies two sigma >= 0 pairs up to flipping the signs of an even number
/// of mode vectors.
inline bool same_singular_pair(const SingularPair& x, const SingularPair& y, double tol)
{
    if (std::abs(x.sigma - y.sigma) > tol)
        return false;
    int flips = 0;
    for (std::size_t i = 0; i < x.vectors.size(); ++i) {
        double plus = 0.0, minus = 0.0;
        for (std::size_t j = 0; j < x.vectors[i].size(); ++j) {
            plus = std::max(plus, std::abs(x.vectors[i][j] - y.vectors[i][j]));
            minus = std::max(minus, std::abs(x.vectors[i][j] + y.vectors[i][j]));
        }
        if (plus <= tol)
            continue;
        if (minus <= tol)
            ++flips;
        else
            return false;
    }
    return flips % 2 == 0;
}

inline bool singular_order(const SingularPair& x, const SingularPair& y)
{
    if (x.sigma != y.sigma)
        return x.sigma > y.sigma;
    return x.vectors.front() < y.vectors.front();
}

} // namespace detail

/// Finds one singular pair. The first attempt starts from `init` when given,
/// later attempts from seeded random points; stalled or degenerate attempts
/// trigger a restart. Returns the first converged pair, otherwise the best
/// iterate with converged = false. sigma is reported >= 0.
inline SingularPair solve_singular_pair(const DenseTensor& a, const PNormSpec& pnorms, const SolverConfig& config,
                                        std::optional<std::vector<Vector>> init = std::nullopt)
{
    detail::check_singular_inputs(a, config);
    const auto ps = pnorms.expand(a.order());
    if (init) {
        detail::check_vectors(a, *init, detail::no_mode, detail::no_mode);
        for (std::size_t i = 0; i < init->size(); ++i)
            if (norm2((*init)[i]) == 0.0)
                throw ParameterError("initial vector for mode " + std::to_string(i + 1) + " is zero");
    }
    std::optional<SingularPair> best;
    for (int r = 0; r < config.restarts; ++r) {
        auto start = (r == 0 && init) ? *init : detail::random_start(a, ps, config.seed, static_cast<std::uint64_t>(r));
        try {
            auto pair = detail::singular_attempt(a, ps, std::move(start), config);
            if (pair.converged)
                return pair;
            if (!best || pair.residual < best->residual)
                best = std::move(pair);
        } catch (const DegenerateIterateError&) {
        }
    }
    if (!best)
        throw DegenerateIterateError("every restart produced a vanishing contraction");
    return *best;
}

/// Runs every restart independently, each as a fixed-point sweep and a direct
/// Newton solve from the same start, and returns the distinct converged pairs
/// sorted by sigma descending.
inline std::vector<SingularPair> singular_pairs(const DenseTensor& a, const PNormSpec& pnorms,
                                                const SolverConfig& config)
{
    detail::check_singular_inputs(a, config);
    const auto ps = pnorms.expand(a.order());
    std::vector<SingularPair> found;
    auto offer = [&](SingularPair&& pair) {
        if (!pair.converged)
            return;
        const bool dup = std::any_of(found.begin(), found.end(), [&](const SingularPair& q) {
            return detail::same_singular_pair(q, pair, dedup_tolerance);
        });
        if (!dup)
            found.push_back(std::move(pair));
    };
    for (int r = 0; r < config.restarts; ++r) {
        const auto start = detail::random_start(a, ps, config.seed, static_cast<std::uint64_t>(r));
        try {
            offer(detail::singular_attempt(a, ps, start, config));
        } catch (const DegenerateIterateError&) {
        }
        // The sweep only climbs; Newton from the same start also reaches saddles.
        SingularPair seed;
        seed.vectors = start;
        seed.sigma = multilinear_eval(a, start);
        if (auto pair = detail::polish_singular(a, ps, seed, config.tol, 100))
            offer(std::move(*pair));
    }
    std::sort(found.begin(), found.end(), detail::singular_order);
    return found;
}

/// Largest sigma over config.restarts runs: a lower bound on the norm of the
/// multilinear functional induced by the l^{p_i} norms.
inline double sigma_max(const DenseTensor& a, const PNormSpec& pnorms, const SolverConfig& config)
{
    detail::check_singular_inputs(a, config);
    const auto ps = pnorms.expand(a.order());
    double best = 0.0;
    bool any = false;
    for (int r = 0; r < config.restarts; ++r) {
        try {
            auto pair = detail::singular_attempt(a, ps, detail::random_start(a, ps, config.seed, r), config);
            best = any ? std::max(best, pair.sigma) : pair.sigma;
            any = true;
        } catch (const DegenerateIterateError&) {
        }
    }
    if (!any)
        throw DegenerateIterateError("every restart produced a vanishing contraction");
    return best;
}

} // namespace lpspec
