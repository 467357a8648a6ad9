#pragma once

// Brute-force verification tools.
//
// Everything here evaluates tensors by direct enumeration of their entries and
// never calls the contraction kernels used by the solvers, so it can serve as
// an independent check on them:
//
//   - enumerate_critical_points: seeds Newton's method from a dense angular
//     grid on the product of unit spheres and collects every distinct root of
//     the singular or eigen stationarity system.
//   - hyperdet_222: Cayley's quartic hyperdeterminant of a 2x2x2 tensor.
//   - dense_baseline_svd / dense_baseline_symeig: one-sided Jacobi SVD and
//     cyclic Jacobi symmetric eigendecomposition for the order-2 reductions.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "detail/newton.hpp"
#include "errors.hpp"
#include "pnorm.hpp"
#include "tensor.hpp"

namespace lpspec {

enum class CriticalKind
{
    singular,
    eigen
};

struct CriticalPoint
{
    std::vector<Vector> vectors; ///< k mode vectors (singular) or the single eigenvector
    double value = 0.0;          ///< sigma or lambda
    CriticalKind kind = CriticalKind::singular;
    double residual = 0.0;
};

inline constexpr double oracle_tolerance = 1e-9;
inline constexpr double oracle_grid_budget = 1e7;
inline constexpr int oracle_default_resolution = 40;

namespace detail::brute {

/// sum over all entries of a_j * prod_m xs[m][j_m].
inline double form(const DenseTensor& a, const std::vector<Vector>& xs)
{
    double s = 0.0;
    const auto vals = a.values();
    for (std::size_t off = 0; off < a.size(); ++off) {
        if (vals[off] == 0.0)
            continue;
        const auto idx = a.unravel(off);
        double t = vals[off];
        for (std::size_t m = 0; m < idx.size(); ++m)
            t *= xs[m][idx[m]];
        s += t;
    }
    return s;
}

/// Product of xs[l][idx[l]] over l not in {skip_a, skip_b}.
inline double product_except(const TensorIndex& idx, const std::vector<Vector>& xs, std::size_t skip_a,
                             std::size_t skip_b)
{
    double t = 1.0;
    for (std::size_t l = 0; l < idx.size(); ++l)
        if (l != skip_a && l != skip_b)
            t *= xs[l][idx[l]];
    return t;
}

inline constexpr std::size_t none = static_cast<std::size_t>(-1);

/// Nonzero entries with their unraveled indices.
struct Entries
{
    std::vector<double> values;
    std::vector<TensorIndex> indices;

    explicit Entries(const DenseTensor& a)
    {
        const auto vals = a.values();
        for (std::size_t off = 0; off < a.size(); ++off)
            if (vals[off] != 0.0) {
                values.push_back(vals[off]);
                indices.push_back(a.unravel(off));
            }
    }
};

/// Mode-wise gradients g_i of the multilinear form and, optionally, the
/// mixed second derivatives H_ij (d_i x d_j).
struct Derivatives
{
    std::vector<Vector> grad;
    std::vector<std::vector<Matrix>> hess;
};

inline Derivatives derivatives(const DenseTensor& a, const Entries& entries, const std::vector<Vector>& xs,
                               bool with_hessian)
{
    const std::size_t k = a.order();
    Derivatives d;
    d.grad.resize(k);
    for (std::size_t i = 0; i < k; ++i)
        d.grad[i].assign(a.dim(i), 0.0);
    if (with_hessian) {
        d.hess.assign(k, std::vector<Matrix>(k));
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j)
                if (i != j)
                    d.hess[i][j] = Matrix(a.dim(i), a.dim(j));
    }
    for (std::size_t e = 0; e < entries.values.size(); ++e) {
        const double v = entries.values[e];
        const auto& idx = entries.indices[e];
        for (std::size_t i = 0; i < k; ++i) {
            d.grad[i][idx[i]] += v * product_except(idx, xs, i, none);
            if (with_hessian)
                for (std::size_t j = 0; j < k; ++j)
                    if (j != i)
                        d.hess[i][j](idx[i], idx[j]) += v * product_except(idx, xs, i, j);
        }
    }
    return d;
}

inline double signed_power(double x, int q)
{
    double r = 1.0;
    for (int i = 0; i < q; ++i)
        r *= std::abs(x);
    return x < 0.0 ? -r : (x > 0.0 ? r : 0.0);
}

inline double abs_power(double x, int q)
{
    double r = 1.0;
    for (int i = 0; i < q; ++i)
        r *= std::abs(x);
    return r;
}

inline double unit_scale(const Vector& x, int p)
{
    double s = 0.0;
    for (double v : x)
        s += abs_power(v, p);
    return std::pow(s, 1.0 / p);
}

/// Unknowns: all mode vectors stacked, then one multiplier per mode.
struct SingularSystem
{
    const DenseTensor& a;
    Entries entries{a};
    std::vector<int> ps;
    std::vector<std::size_t> starts;
    std::size_t nx = 0;

    SingularSystem(const DenseTensor& t, std::vector<int> p) : a(t), ps(std::move(p))
    {
        for (std::size_t i = 0; i < a.order(); ++i) {
            starts.push_back(nx);
            nx += a.dim(i);
        }
    }

    std::vector<Vector> split(const Vector& z) const
    {
        std::vector<Vector> xs(a.order());
        for (std::size_t i = 0; i < a.order(); ++i)
            for (std::size_t r = 0; r < a.dim(i); ++r)
                xs[i].push_back(z[starts[i] + r]);
        return xs;
    }

    void operator()(const Vector& z, Vector& f, Matrix& jac) const
    {
        const std::size_t k = a.order();
        const auto xs = split(z);
        const auto d = derivatives(a, entries, xs, true);
        f.assign(nx + k, 0.0);
        jac = Matrix(nx + k, nx + k);
        for (std::size_t i = 0; i < k; ++i) {
            const double s = z[nx + i];
            const int p = ps[i];
            double norm_p = 0.0;
            for (std::size_t r = 0; r < a.dim(i); ++r) {
                const std::size_t row = starts[i] + r;
                const double xr = xs[i][r];
                f[row] = d.grad[i][r] - s * signed_power(xr, p - 1);
                jac(row, row) = -s * (p - 1) * abs_power(xr, p - 2);
                jac(row, nx + i) = -signed_power(xr, p - 1);
                for (std::size_t j = 0; j < k; ++j)
                    if (j != i)
                        for (std::size_t c = 0; c < a.dim(j); ++c)
                            jac(row, starts[j] + c) = d.hess[i][j](r, c);
                jac(nx + i, row) = signed_power(xr, p - 1);
                norm_p += abs_power(xr, p);
            }
            f[nx + i] = (norm_p - 1.0) / p;
        }
    }
};

/// Unknowns: x then lambda; identity in the first slot, x in all others.
struct EigenSystem
{
    const DenseTensor& a;
    int p;
    Entries entries{a};

    void operator()(const Vector& z, Vector& f, Matrix& jac) const
    {
        const std::size_t n = a.dim(0);
        const std::size_t k = a.order();
        const Vector x(z.begin(), z.begin() + static_cast<std::ptrdiff_t>(n));
        const double lambda = z[n];
        f.assign(n + 1, 0.0);
        jac = Matrix(n + 1, n + 1);
        const std::vector<Vector> xs(k, x);
        for (std::size_t e = 0; e < entries.values.size(); ++e) {
            const double v = entries.values[e];
            const auto& idx = entries.indices[e];
            f[idx[0]] += v * product_except(idx, xs, 0, none);
            for (std::size_t m = 1; m < k; ++m)
                jac(idx[0], idx[m]) += v * product_except(idx, xs, 0, m);
        }
        double norm_p = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            f[r] -= lambda * signed_power(x[r], p - 1);
            jac(r, r) -= lambda * (p - 1) * abs_power(x[r], p - 2);
            jac(r, n) = -signed_power(x[r], p - 1);
            jac(n, r) = signed_power(x[r], p - 1);
            norm_p += abs_power(x[r], p);
        }
        f[n] = (norm_p - 1.0) / p;
    }
};

/// Unit l^2 points from hyperspherical angles: the last angle takes
/// `resolution` values in [0, 2pi), the others `resolution` values in (0, pi).
inline std::vector<Vector> sphere_grid(std::size_t d, int resolution)
{
    if (d == 1)
        return {Vector{1.0}, Vector{-1.0}};
    std::vector<Vector> pts;
    const std::size_t angles = d - 1;
    std::vector<int> counter(angles, 0);
    while (true) {
        Vector x(d);
        double prod = 1.0;
        for (std::size_t a = 0; a < angles; ++a) {
            const bool last = a + 1 == angles;
            const double theta = last ? 2.0 * std::numbers::pi * counter[a] / resolution
                                      : std::numbers::pi * (counter[a] + 0.5) / resolution;
            x[a] = prod * std::cos(theta);
            prod *= std::sin(theta);
        }
        x[d - 1] = prod;
        pts.push_back(std::move(x));
        std::size_t a = angles;
        while (a-- > 0) {
            if (++counter[a] < resolution)
                break;
            counter[a] = 0;
        }
        if (a == static_cast<std::size_t>(-1))
            break;
    }
    return pts;
}

inline double grid_count(std::size_t d, int resolution)
{
    return d == 1 ? 2.0 : std::pow(static_cast<double>(resolution), static_cast<double>(d - 1));
}

inline double first_significant(const Vector& x)
{
    for (double v : x)
        if (std::abs(v) > 1e-8)
            return v;
    return 0.0;
}

inline void negate(Vector& x)
{
    for (auto& v : x)
        v = -v;
}

inline double max_diff(const Vector& x, const Vector& y, double sign)
{
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        d = std::max(d, std::abs(x[i] - sign * y[i]));
    return d;
}

/// Equality up to the admissible sign symmetries: an even number of mode
/// flips for singular points; x -> -x (with lambda -> (-1)^k lambda) for eigen.
inline bool same_point(const CriticalPoint& x, const CriticalPoint& y, std::size_t order, double tol)
{
    if (std::abs(x.value - y.value) > tol)
        return false;
    if (x.kind == CriticalKind::singular) {
        int flips = 0;
        for (std::size_t i = 0; i < x.vectors.size(); ++i) {
            if (max_diff(x.vectors[i], y.vectors[i], 1.0) <= tol)
                continue;
            if (max_diff(x.vectors[i], y.vectors[i], -1.0) > tol)
                return false;
            ++flips;
        }
        return flips % 2 == 0;
    }
    if (max_diff(x.vectors[0], y.vectors[0], 1.0) <= tol)
        return true;
    const bool sign_free = order % 2 == 0 || std::abs(x.value) <= tol;
    return sign_free && max_diff(x.vectors[0], y.vectors[0], -1.0) <= tol;
}

inline void canonicalize(CriticalPoint& pt, std::size_t order)
{
    if (pt.kind == CriticalKind::singular) {
        for (std::size_t i = 1; i < pt.vectors.size(); ++i)
            if (first_significant(pt.vectors[i]) < 0.0) {
                negate(pt.vectors[i]);
                negate(pt.vectors[0]);
            }
        return;
    }
    const bool odd = order % 2 == 1;
    if (odd && pt.value < 0.0) {
        negate(pt.vectors[0]);
        pt.value = -pt.value;
    } else if ((!odd || pt.value == 0.0) && first_significant(pt.vectors[0]) < 0.0) {
        negate(pt.vectors[0]);
    }
}

} // namespace detail::brute

/// Stationarity residual recomputed from scratch: max over modes of
/// ||g_i - sigma phi(x_i, p_i - 1)||_2 with sigma = A(x_1, .., x_k) (singular),
/// or ||A(I, x, .., x) - lambda phi(x, p - 1)||_2 with lambda = A(x, .., x).
inline double oracle_residual(const DenseTensor& a, const CriticalPoint& pt, const std::vector<int>& ps)
{
    namespace b = detail::brute;
    std::vector<Vector> xs = pt.kind == CriticalKind::singular ? pt.vectors
                                                                : std::vector<Vector>(a.order(), pt.vectors[0]);
    const auto d = b::derivatives(a, b::Entries(a), xs, false);
    const std::size_t modes = pt.kind == CriticalKind::singular ? a.order() : 1;
    double worst = 0.0;
    for (std::size_t i = 0; i < modes; ++i) {
        double s = 0.0;
        for (std::size_t r = 0; r < xs[i].size(); ++r) {
            const double e = d.grad[i][r] - pt.value * b::signed_power(xs[i][r], ps[i] - 1);
            s += e * e;
        }
        worst = std::max(worst, std::sqrt(s));
    }
    return worst;
}

/// Distinct critical points of the singular or eigen Lagrange system found by
/// Newton's method from every point of an angular grid with `resolution`
/// steps per angle. For kind = eigen the tensor must be cubical and the first
/// exponent of `pnorms` is used. Completeness is not certified.
inline std::vector<CriticalPoint> enumerate_critical_points(const DenseTensor& a, const PNormSpec& pnorms,
                                                            CriticalKind kind,
                                                            int resolution = oracle_default_resolution)
{
    namespace b = detail::brute;
    if (resolution < 1)
        throw ParameterError("resolution must be positive");
    const std::size_t k = a.order();
    const bool eigen = kind == CriticalKind::eigen;
    if (eigen && !a.is_cubical())
        throw DimensionError("eigen enumeration requires a cubical tensor");
    const auto ps = eigen ? std::vector<int>(k, pnorms.at(0)) : pnorms.expand(k);
    const std::size_t blocks = eigen ? 1 : k;

    double total = 1.0;
    for (std::size_t i = 0; i < blocks; ++i)
        total *= b::grid_count(a.dim(i), resolution);
    if (total > oracle_grid_budget)
        throw SizeLimitError("oracle grid of " + std::to_string(static_cast<long long>(total))
                             + " points exceeds the budget of 1e7");

    std::vector<std::vector<Vector>> grids(blocks);
    for (std::size_t i = 0; i < blocks; ++i) {
        grids[i] = b::sphere_grid(a.dim(i), resolution);
        for (auto& x : grids[i]) {
            const double s = b::unit_scale(x, ps[i]);
            for (auto& v : x)
                v /= s;
        }
    }

    b::SingularSystem ssys(a, ps);
    b::EigenSystem esys{a, ps[0], b::Entries(a)};
    std::vector<CriticalPoint> found;
    std::map<long long, std::vector<std::size_t>> buckets;
    auto bucket_of = [](double v) { return static_cast<long long>(std::floor(v / 1e-5)); };

    std::vector<std::size_t> counter(blocks, 0);
    while (true) {
        std::vector<Vector> seed(blocks);
        for (std::size_t i = 0; i < blocks; ++i)
            seed[i] = grids[i][counter[i]];

        CriticalPoint pt;
        pt.kind = kind;
        Vector z;
        for (const auto& x : seed)
            z.insert(z.end(), x.begin(), x.end());
        const double v0 = b::form(a, eigen ? std::vector<Vector>(k, seed[0]) : seed);
        bool ok = false;
        if (eigen) {
            z.push_back(v0);
            auto res = detail::newton_solve(esys, std::move(z), 1e-13, 60);
            pt.vectors = {Vector(res.z.begin(), res.z.end() - 1)};
            ok = res.residual < 1e-6;
        } else {
            z.insert(z.end(), k, v0);
            auto res = detail::newton_solve(ssys, std::move(z), 1e-13, 60);
            pt.vectors = ssys.split(res.z);
            ok = res.residual < 1e-6;
        }
        if (ok) {
            for (std::size_t i = 0; i < pt.vectors.size(); ++i) {
                const double s = b::unit_scale(pt.vectors[i], ps[i]);
                if (s == 0.0) {
                    ok = false;
                    break;
                }
                for (auto& v : pt.vectors[i])
                    v /= s;
            }
        }
        if (ok) {
            pt.value = b::form(a, eigen ? std::vector<Vector>(k, pt.vectors[0]) : pt.vectors);
            b::canonicalize(pt, k);
            pt.residual = oracle_residual(a, pt, ps);
            if (pt.residual <= oracle_tolerance) {
                const long long key = bucket_of(pt.value);
                bool dup = false;
                for (long long bk = key - 1; bk <= key + 1 && !dup; ++bk) {
                    auto it = buckets.find(bk);
                    if (it == buckets.end())
                        continue;
                    for (std::size_t q : it->second)
                        if (b::same_point(found[q], pt, k, 1e-6)) {
                            dup = true;
                            break;
                        }
                }
                if (!dup) {
                    buckets[key].push_back(found.size());
                    found.push_back(std::move(pt));
                }
            }
        }

        std::size_t i = blocks;
        while (i-- > 0) {
            if (++counter[i] < grids[i].size())
                break;
            counter[i] = 0;
        }
        if (i == static_cast<std::size_t>(-1))
            break;
    }
    std::sort(found.begin(), found.end(), [](const CriticalPoint& x, const CriticalPoint& y) {
        if (x.value != y.value)
            return x.value > y.value;
        return x.vectors < y.vectors;
    });
    return found;
}

/// Cayley's hyperdeterminant of a 2x2x2 tensor (zero-based entries a_ijk).
inline double hyperdet_222(const DenseTensor& t)
{
    if (t.dims() != std::vector<std::size_t>{2, 2, 2})
        throw DimensionError("hyperdet_222 requires a 2x2x2 tensor");
    auto a = [&](std::size_t i, std::size_t j, std::size_t k) { return t.at({i, j, k}); };
    const double a000 = a(0, 0, 0), a001 = a(0, 0, 1), a010 = a(0, 1, 0), a011 = a(0, 1, 1);
    const double a100 = a(1, 0, 0), a101 = a(1, 0, 1), a110 = a(1, 1, 0), a111 = a(1, 1, 1);
    return a000 * a000 * a111 * a111 + a001 * a001 * a110 * a110 + a010 * a010 * a101 * a101
         + a100 * a100 * a011 * a011
         - 2.0 * (a000 * a001 * a110 * a111 + a000 * a010 * a101 * a111 + a000 * a100 * a011 * a111
                  + a001 * a010 * a101 * a110 + a001 * a100 * a011 * a110 + a010 * a100 * a011 * a101)
         + 4.0 * (a000 * a011 * a101 * a110 + a001 * a010 * a100 * a111);
}

/// True when some point in the list has |value| below `tol`.
inline bool has_zero_value(const std::vector<CriticalPoint>& points, double tol)
{
    return std::any_of(points.begin(), points.end(), [&](const CriticalPoint& p) { return std::abs(p.value) < tol; });
}

struct SvdTriple
{
    double sigma = 0.0;
    Vector u;
    Vector v;
};

/// One-sided (Hestenes) Jacobi SVD. Returns min(m, n) triples sorted by sigma
/// descending.
inline std::vector<SvdTriple> dense_baseline_svd(const Matrix& m)
{
    if (m.rows == 0 || m.cols == 0 || m.rows > 64 || m.cols > 64)
        throw DimensionError("dense_baseline_svd supports 1..64 rows and columns");
    const bool flip = m.rows < m.cols;
    Matrix u = flip ? m.transposed() : m;
    const std::size_t rows = u.rows, cols = u.cols;
    Matrix v = Matrix::identity(cols);
    for (int sweep = 0; sweep < 100; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < cols; ++p)
            for (std::size_t q = p + 1; q < cols; ++q) {
                double alpha = 0.0, beta = 0.0, gamma = 0.0;
                for (std::size_t i = 0; i < rows; ++i) {
                    alpha += u(i, p) * u(i, p);
                    beta += u(i, q) * u(i, q);
                    gamma += u(i, p) * u(i, q);
                }
                if (gamma == 0.0 || std::abs(gamma) <= 1e-15 * std::sqrt(alpha * beta))
                    continue;
                rotated = true;
                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (std::size_t i = 0; i < rows; ++i) {
                    const double up = u(i, p), uq = u(i, q);
                    u(i, p) = c * up - s * uq;
                    u(i, q) = s * up + c * uq;
                }
                for (std::size_t i = 0; i < cols; ++i) {
                    const double vp = v(i, p), vq = v(i, q);
                    v(i, p) = c * vp - s * vq;
                    v(i, q) = s * vp + c * vq;
                }
            }
        if (!rotated)
            break;
    }
    std::vector<SvdTriple> out;
    for (std::size_t j = 0; j < cols; ++j) {
        SvdTriple t;
        double s = 0.0;
        for (std::size_t i = 0; i < rows; ++i)
            s += u(i, j) * u(i, j);
        t.sigma = std::sqrt(s);
        for (std::size_t i = 0; i < rows; ++i)
            t.u.push_back(t.sigma > 0.0 ? u(i, j) / t.sigma : 0.0);
        for (std::size_t i = 0; i < cols; ++i)
            t.v.push_back(v(i, j));
        if (flip)
            std::swap(t.u, t.v);
        out.push_back(std::move(t));
    }
    std::sort(out.begin(), out.end(), [](const SvdTriple& x, const SvdTriple& y) { return x.sigma > y.sigma; });
    return out;
}

struct SymEigenPair
{
    double lambda = 0.0;
    Vector x;
};

/// Cyclic Jacobi eigendecomposition of a symmetric matrix, eigenvalues
/// descending, eigenvectors orthonormal.
inline std::vector<SymEigenPair> dense_baseline_symeig(const Matrix& m)
{
    if (m.rows != m.cols || m.rows == 0 || m.rows > 64)
        throw DimensionError("dense_baseline_symeig requires a square matrix of size 1..64");
    const std::size_t n = m.rows;
    Matrix a = m;
    Matrix v = Matrix::identity(n);
    double frob = 0.0;
    for (double x : a.data)
        frob += x * x;
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q)
                off += a(p, q) * a(p, q);
        if (off <= 1e-32 * frob)
            break;
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0)
                    continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                // A <- J^T A J with J the rotation in the (p, q) plane.
                for (std::size_t r = 0; r < n; ++r) {
                    const double arp = a(r, p), arq = a(r, q);
                    a(r, p) = c * arp - s * arq;
                    a(r, q) = s * arp + c * arq;
                }
                for (std::size_t r = 0; r < n; ++r) {
                    const double apr = a(p, r), aqr = a(q, r);
                    a(p, r) = c * apr - s * aqr;
                    a(q, r) = s * apr + c * aqr;
                }
                for (std::size_t r = 0; r < n; ++r) {
                    const double vrp = v(r, p), vrq = v(r, q);
                    v(r, p) = c * vrp - s * vrq;
                    v(r, q) = s * vrp + c * vrq;
                }
            }
    }
    std::vector<SymEigenPair> out;
    for (std::size_t j = 0; j < n; ++j) {
        SymEigenPair e;
        e.lambda = a(j, j);
        for (std::size_t i = 0; i < n; ++i)
            e.x.push_back(v(i, j));
        out.push_back(std::move(e));
    }
    std::sort(out.begin(), out.end(), [](const SymEigenPair& x, const SymEigenPair& y) { return x.lambda > y.lambda; });
    return out;
}

} // namespace lpspec
