#pragma once

// Dense linear solves and a safeguarded Newton driver for small square
// polynomial systems.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "../tensor.hpp"

namespace lpspec::detail {

/// Solves J x = b by Gaussian elimination with partial pivoting. Returns
/// nullopt when a pivot falls below `pivot_tol` times the largest entry.
inline std::optional<Vector> lu_solve(Matrix j, Vector b, double pivot_tol = 1e-14)
{
    const std::size_t n = j.rows;
    double scale = 0.0;
    for (double v : j.data)
        scale = std::max(scale, std::abs(v));
    if (scale == 0.0)
        return std::nullopt;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(j(r, c)) > std::abs(j(piv, c)))
                piv = r;
        if (std::abs(j(piv, c)) <= pivot_tol * scale)
            return std::nullopt;
        if (piv != c) {
            for (std::size_t q = 0; q < n; ++q)
                std::swap(j(c, q), j(piv, q));
            std::swap(b[c], b[piv]);
        }
        for (std::size_t r = c + 1; r < n; ++r) {
            const double f = j(r, c) / j(c, c);
            if (f == 0.0)
                continue;
            for (std::size_t q = c; q < n; ++q)
                j(r, q) -= f * j(c, q);
            b[r] -= f * b[c];
        }
    }
    Vector x(n);
    for (std::size_t r = n; r-- > 0;) {
        double s = b[r];
        for (std::size_t q = r + 1; q < n; ++q)
            s -= j(r, q) * x[q];
        x[r] = s / j(r, r);
    }
    return x;
}

/// Levenberg-Marquardt step: (J^T J + mu I) dx = -J^T f.
inline std::optional<Vector> damped_step(const Matrix& j, const Vector& f, double mu)
{
    const std::size_t n = j.cols;
    Matrix normal(n, n);
    Vector rhs(n, 0.0);
    for (std::size_t r = 0; r < j.rows; ++r)
        for (std::size_t a = 0; a < n; ++a) {
            const double jra = j(r, a);
            if (jra == 0.0)
                continue;
            rhs[a] -= jra * f[r];
            for (std::size_t b = 0; b < n; ++b)
                normal(a, b) += jra * j(r, b);
        }
    for (std::size_t a = 0; a < n; ++a)
        normal(a, a) += mu;
    return lu_solve(std::move(normal), std::move(rhs), 0.0);
}

struct NewtonResult
{
    Vector z;
    double residual = std::numeric_limits<double>::infinity();
    int iterations = 0;
    bool converged = false;
};

/// Newton iteration for F(z) = 0 with backtracking on ||F||_2 and a
/// Levenberg-Marquardt fallback when the Jacobian is singular or the Newton
/// direction fails to decrease the residual. Accepted steps never increase
/// ||F||_2.
///
/// Stops early when ||F|| shrinks by less than 10% over 10 iterations, which
/// only happens away from roots (even a singular root gives linear
/// convergence with rate about 1/2).
///
/// `system(z, f, j)` must fill f (size m) and j (m x n) at z.
template <class System>
NewtonResult newton_solve(System&& system, Vector z, double tol, int max_iter)
{
    Vector f;
    Matrix j;
    system(z, f, j);
    NewtonResult out;
    double r = norm2(f);
    auto trial = [&](const Vector& step, double t, Vector& zt, Vector& ft, Matrix& jt) {
        zt = z;
        for (std::size_t i = 0; i < z.size(); ++i)
            zt[i] += t * step[i];
        system(zt, ft, jt);
        return norm2(ft);
    };
    Vector zt, ft;
    Matrix jt;
    std::vector<double> history{r};
    int it = 0;
    for (; it < max_iter && r > tol; ++it) {
        if (history.size() > 10 && r > 0.9 * history[history.size() - 11])
            break;
        bool accepted = false;
        std::optional<Vector> step;
        if (j.rows == j.cols) {
            Vector neg(f);
            for (auto& v : neg)
                v = -v;
            step = lu_solve(j, std::move(neg));
        }
        if (step) {
            double t = 1.0;
            for (int ls = 0; ls < 30; ++ls, t *= 0.5) {
                const double rt = trial(*step, t, zt, ft, jt);
                if (std::isfinite(rt) && rt < r) {
                    accepted = true;
                    break;
                }
            }
        }
        if (!accepted) {
            double jscale = 0.0;
            for (double v : j.data)
                jscale = std::max(jscale, v * v);
            double mu = 1e-10 * std::max(1.0, jscale);
            for (int tries = 0; tries < 20 && !accepted; ++tries, mu *= 10.0) {
                auto lm = damped_step(j, f, mu);
                if (!lm)
                    continue;
                const double rt = trial(*lm, 1.0, zt, ft, jt);
                if (std::isfinite(rt) && rt < r)
                    accepted = true;
            }
        }
        if (!accepted)
            break;
        z.swap(zt);
        f.swap(ft);
        std::swap(j, jt);
        r = norm2(f);
        history.push_back(r);
    }
    out.z = std::move(z);
    out.residual = r;
    out.iterations = it;
    out.converged = r <= tol;
    return out;
}

} // namespace lpspec::detail
