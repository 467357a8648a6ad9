#pragma once

// Dense order-k tensors and the multilinear operations built on them.
//
// Storage is a flat row-major array: the last index varies fastest. For dims
// (d_1, ..., d_k) the entry at zero-based coordinates (j_1, ..., j_k) lives at
//
//   offset = ((j_1 * d_2 + j_2) * d_3 + j_3) ... * d_k + j_k
//
// DenseTensor::offset and DenseTensor::unravel are the only places that
// encode this bijection.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace lpspec {

using Vector = std::vector<double>;
using TensorIndex = std::vector<std::size_t>;

/// Row-major dense matrix; used for the factor matrices of multilinear_transform
/// and for Jacobians.
struct Matrix
{
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}
    Matrix(std::size_t r, std::size_t c, std::vector<double> values) : rows(r), cols(c), data(std::move(values))
    {
        if (data.size() != r * c)
            throw DimensionError("matrix value count does not match its shape");
    }

    static Matrix identity(std::size_t n)
    {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i)
            m(i, i) = 1.0;
        return m;
    }

    /// A single column holding x.
    static Matrix column(std::span<const double> x) { return Matrix(x.size(), 1, Vector(x.begin(), x.end())); }

    double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    Matrix transposed() const
    {
        Matrix t(cols, rows);
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < cols; ++c)
                t(c, r) = (*this)(r, c);
        return t;
    }
};

inline Matrix operator*(const Matrix& a, const Matrix& b)
{
    if (a.cols != b.rows)
        throw DimensionError("matrix product: inner dimensions differ");
    Matrix c(a.rows, b.cols);
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t l = 0; l < a.cols; ++l) {
            const double ail = a(i, l);
            for (std::size_t j = 0; j < b.cols; ++j)
                c(i, j) += ail * b(l, j);
        }
    return c;
}

inline Vector operator*(const Matrix& a, std::span<const double> x)
{
    if (a.cols != x.size())
        throw DimensionError("matrix-vector product: dimensions differ");
    Vector y(a.rows, 0.0);
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t j = 0; j < a.cols; ++j)
            y[i] += a(i, j) * x[j];
    return y;
}

inline double dot(std::span<const double> a, std::span<const double> b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += a[i] * b[i];
    return s;
}

inline double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

/// Immutable dense real tensor of order k >= 2.
class DenseTensor
{
public:
    DenseTensor(std::vector<std::size_t> dims, std::vector<double> values)
        : dims_(std::move(dims)), values_(std::move(values))
    {
        if (dims_.size() < 2)
            throw DimensionError("tensor order must be at least 2, got " + std::to_string(dims_.size()));
        std::size_t total = 1;
        for (std::size_t i = 0; i < dims_.size(); ++i) {
            if (dims_[i] == 0)
                throw DimensionError("mode " + std::to_string(i + 1) + " has zero dimension");
            total *= dims_[i];
        }
        if (values_.size() != total)
            throw DimensionError("expected " + std::to_string(total) + " values for the given dims, got "
                                 + std::to_string(values_.size()));
        for (double v : values_)
            if (!std::isfinite(v))
                throw DomainError("tensor entries must be finite");
    }

    static DenseTensor filled(std::vector<std::size_t> dims, double value)
    {
        std::size_t total = 1;
        for (auto d : dims)
            total *= d;
        return DenseTensor(std::move(dims), std::vector<double>(total, value));
    }

    static DenseTensor zeros(std::vector<std::size_t> dims) { return filled(std::move(dims), 0.0); }

    /// Builds a tensor whose entry at each index is f(index).
    static DenseTensor generate(std::vector<std::size_t> dims, const std::function<double(const TensorIndex&)>& f)
    {
        std::size_t total = 1;
        for (auto d : dims)
            total *= d;
        std::vector<double> values(total);
        TensorIndex idx(dims.size(), 0);
        for (std::size_t off = 0; off < total; ++off) {
            values[off] = f(idx);
            for (std::size_t m = dims.size(); m-- > 0;) {
                if (++idx[m] < dims[m])
                    break;
                idx[m] = 0;
            }
        }
        return DenseTensor(std::move(dims), std::move(values));
    }

    /// Cubical tensor from a square matrix.
    static DenseTensor from_matrix(const Matrix& m)
    {
        return DenseTensor({m.rows, m.cols}, m.data);
    }

    std::size_t order() const { return dims_.size(); }
    const std::vector<std::size_t>& dims() const { return dims_; }
    std::size_t dim(std::size_t mode) const { return dims_.at(mode); }
    std::size_t size() const { return values_.size(); }
    std::span<const double> values() const { return values_; }

    bool is_cubical() const
    {
        return std::all_of(dims_.begin(), dims_.end(), [&](std::size_t d) { return d == dims_.front(); });
    }

    std::size_t offset(std::span<const std::size_t> idx) const
    {
        std::size_t off = 0;
        for (std::size_t m = 0; m < dims_.size(); ++m)
            off = off * dims_[m] + idx[m];
        return off;
    }

    TensorIndex unravel(std::size_t off) const
    {
        TensorIndex idx(dims_.size());
        for (std::size_t m = dims_.size(); m-- > 0;) {
            idx[m] = off % dims_[m];
            off /= dims_[m];
        }
        return idx;
    }

    double operator()(std::span<const std::size_t> idx) const { return values_[offset(idx)]; }
    double at(std::initializer_list<std::size_t> idx) const
    {
        if (idx.size() != dims_.size())
            throw DimensionError("index length does not match tensor order");
        std::size_t m = 0;
        for (auto j : idx)
            if (j >= dims_[m++])
                throw DimensionError("index out of range in mode " + std::to_string(m));
        return values_[offset(std::span<const std::size_t>(idx.begin(), idx.size()))];
    }

    bool is_zero() const
    {
        return std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0; });
    }

    double frobenius_norm() const { return norm2(values_); }

    DenseTensor scaled(double c) const
    {
        auto v = values_;
        for (auto& x : v)
            x *= c;
        return DenseTensor(dims_, std::move(v));
    }

    friend bool operator==(const DenseTensor&, const DenseTensor&) = default;

private:
    std::vector<std::size_t> dims_;
    std::vector<double> values_;
};

namespace detail {

/// Working buffer for a chain of single-mode contractions.
struct Slab
{
    std::vector<std::size_t> dims;
    std::vector<double> values;
};

inline void check_mode(const DenseTensor& a, std::size_t mode)
{
    if (mode >= a.order())
        throw ModeError("mode " + std::to_string(mode + 1) + " out of range for order-"
                        + std::to_string(a.order()) + " tensor");
}

inline void check_vector(const DenseTensor& a, std::size_t mode, std::size_t length)
{
    if (length != a.dim(mode))
        throw DimensionError("vector for mode " + std::to_string(mode + 1) + " has length " + std::to_string(length)
                             + ", expected " + std::to_string(a.dim(mode)));
}

/// Contract slot `slot` of the slab with x, removing that slot.
inline void contract_slot(Slab& s, std::size_t slot, std::span<const double> x)
{
    std::size_t outer = 1, inner = 1;
    for (std::size_t m = 0; m < slot; ++m)
        outer *= s.dims[m];
    for (std::size_t m = slot + 1; m < s.dims.size(); ++m)
        inner *= s.dims[m];
    const std::size_t d = s.dims[slot];
    std::vector<double> out(outer * inner, 0.0);
    for (std::size_t o = 0; o < outer; ++o) {
        const double* base = s.values.data() + o * d * inner;
        double* dst = out.data() + o * inner;
        for (std::size_t j = 0; j < d; ++j) {
            const double xj = x[j];
            const double* row = base + j * inner;
            for (std::size_t i = 0; i < inner; ++i)
                dst[i] += row[i] * xj;
        }
    }
    s.values = std::move(out);
    s.dims.erase(s.dims.begin() + static_cast<std::ptrdiff_t>(slot));
}

/// Apply M (d x s) along slot `slot`: new[o, c, i] = sum_j old[o, j, i] * M(j, c).
inline void transform_slot(Slab& s, std::size_t slot, const Matrix& m)
{
    std::size_t outer = 1, inner = 1;
    for (std::size_t q = 0; q < slot; ++q)
        outer *= s.dims[q];
    for (std::size_t q = slot + 1; q < s.dims.size(); ++q)
        inner *= s.dims[q];
    const std::size_t d = s.dims[slot];
    const std::size_t cols = m.cols;
    std::vector<double> out(outer * cols * inner, 0.0);
    for (std::size_t o = 0; o < outer; ++o)
        for (std::size_t c = 0; c < cols; ++c) {
            double* dst = out.data() + (o * cols + c) * inner;
            for (std::size_t j = 0; j < d; ++j) {
                const double mjc = m(j, c);
                const double* row = s.values.data() + (o * d + j) * inner;
                for (std::size_t i = 0; i < inner; ++i)
                    dst[i] += row[i] * mjc;
            }
        }
    s.values = std::move(out);
    s.dims[slot] = cols;
}

/// Contract every slot not listed in `keep` with the matching vector, last
/// slot first. The free slots are left in their original relative order.
inline Slab contract_except(const DenseTensor& a, std::span<const Vector> xs, std::span<const std::size_t> keep)
{
    Slab s{a.dims(), Vector(a.values().begin(), a.values().end())};
    for (std::size_t m = a.order(); m-- > 0;) {
        if (std::find(keep.begin(), keep.end(), m) != keep.end())
            continue;
        contract_slot(s, m, xs[m]);
    }
    return s;
}

inline void check_vectors(const DenseTensor& a, std::span<const Vector> xs, std::size_t skip_a, std::size_t skip_b)
{
    if (xs.size() != a.order())
        throw DimensionError("expected " + std::to_string(a.order()) + " vectors, got " + std::to_string(xs.size()));
    for (std::size_t m = 0; m < a.order(); ++m)
        if (m != skip_a && m != skip_b)
            check_vector(a, m, xs[m].size());
}

inline constexpr std::size_t no_mode = static_cast<std::size_t>(-1);

} // namespace detail

/// A(x_1, ..., x_k): the multilinear functional of the tensor.
inline double multilinear_eval(const DenseTensor& a, std::span<const Vector> xs)
{
    detail::check_vectors(a, xs, detail::no_mode, detail::no_mode);
    auto s = detail::contract_except(a, xs, {});
    return s.values.front();
}

/// A(M_1, ..., M_k), computed as k successive single-mode products.
inline DenseTensor multilinear_transform(const DenseTensor& a, std::span<const Matrix> ms)
{
    if (ms.size() != a.order())
        throw DimensionError("expected " + std::to_string(a.order()) + " matrices, got " + std::to_string(ms.size()));
    for (std::size_t m = 0; m < a.order(); ++m) {
        if (ms[m].rows != a.dim(m))
            throw DimensionError("matrix for mode " + std::to_string(m + 1) + " has " + std::to_string(ms[m].rows)
                                 + " rows, expected " + std::to_string(a.dim(m)));
        if (ms[m].cols == 0)
            throw DimensionError("matrix for mode " + std::to_string(m + 1) + " has no columns");
    }
    detail::Slab s{a.dims(), Vector(a.values().begin(), a.values().end())};
    for (std::size_t m = a.order(); m-- > 0;)
        detail::transform_slot(s, m, ms[m]);
    return DenseTensor(std::move(s.dims), std::move(s.values));
}

/// A(x_1, ..., I, ..., x_k) with the identity in slot `mode`; the gradient of
/// multilinear_eval with respect to the mode-th argument. xs[mode] is ignored.
inline Vector partial_contraction(const DenseTensor& a, std::span<const Vector> xs, std::size_t mode)
{
    detail::check_mode(a, mode);
    detail::check_vectors(a, xs, mode, detail::no_mode);
    const std::size_t keep[] = {mode};
    return detail::contract_except(a, xs, keep).values;
}

/// A(..., I, ..., I, ...) with identities in slots row_mode and col_mode; the
/// returned matrix is indexed (row_mode coordinate, col_mode coordinate).
inline Matrix partial_contraction2(const DenseTensor& a, std::span<const Vector> xs, std::size_t row_mode,
                                   std::size_t col_mode)
{
    detail::check_mode(a, row_mode);
    detail::check_mode(a, col_mode);
    if (row_mode == col_mode)
        throw ModeError("partial_contraction2 needs two distinct modes");
    detail::check_vectors(a, xs, row_mode, col_mode);
    const std::size_t keep[] = {row_mode, col_mode};
    auto s = detail::contract_except(a, xs, keep);
    Matrix m(s.dims[0], s.dims[1], std::move(s.values));
    return row_mode < col_mode ? m : m.transposed();
}

namespace detail {

inline void check_cubical_vector(const DenseTensor& a, std::span<const double> x)
{
    if (!a.is_cubical())
        throw DimensionError("operation requires a cubical tensor");
    if (x.size() != a.dim(0))
        throw DimensionError("vector has length " + std::to_string(x.size()) + ", expected "
                             + std::to_string(a.dim(0)));
}

inline std::vector<Vector> repeat(std::span<const double> x, std::size_t k)
{
    return std::vector<Vector>(k, Vector(x.begin(), x.end()));
}

} // namespace detail

/// A(x, ..., x). For nonsymmetric tensors this is the diagonal restriction of
/// the multilinear form.
inline double homogeneous_eval(const DenseTensor& a, std::span<const double> x)
{
    detail::check_cubical_vector(a, x);
    return multilinear_eval(a, detail::repeat(x, a.order()));
}

/// A(x, ..., I, ..., x) with the identity in slot `mode` and x everywhere else.
inline Vector mode_contraction(const DenseTensor& a, std::span<const double> x, std::size_t mode = 0)
{
    detail::check_cubical_vector(a, x);
    return partial_contraction(a, detail::repeat(x, a.order()), mode);
}

/// Symmetry test with |a_j - a_{sigma(j)}| <= tolerance, for tensors read
/// from text with rounding.
inline bool is_symmetric(const DenseTensor& a, double tolerance)
{
    if (!a.is_cubical())
        return false;
    const auto vals = a.values();
    // Adjacent transpositions generate the symmetric group.
    TensorIndex idx;
    for (std::size_t off = 0; off < a.size(); ++off) {
        idx = a.unravel(off);
        for (std::size_t m = 0; m + 1 < a.order(); ++m) {
            if (idx[m] == idx[m + 1])
                continue;
            std::swap(idx[m], idx[m + 1]);
            const double other = vals[a.offset(idx)];
            std::swap(idx[m], idx[m + 1]);
            if (tolerance == 0.0 ? other != vals[off] : std::abs(other - vals[off]) > tolerance)
                return false;
        }
    }
    return true;
}

/// Exact-equality symmetry test: cubical and invariant under every index permutation.
inline bool is_symmetric(const DenseTensor& a) { return is_symmetric(a, 0.0); }

/// Gradient of x -> A(x, ..., x) for symmetric A: k * A(I, x, ..., x).
/// With `strict`, nonsymmetric input is rejected instead of trusted.
inline Vector homogeneous_gradient(const DenseTensor& a, std::span<const double> x, bool strict = true)
{
    detail::check_cubical_vector(a, x);
    if (strict && !is_symmetric(a))
        throw SymmetryError("homogeneous_gradient requires a symmetric tensor");
    auto g = mode_contraction(a, x, 0);
    const double k = static_cast<double>(a.order());
    for (auto& v : g)
        v *= k;
    return g;
}

/// Average of A over all k! index permutations.
inline DenseTensor symmetrize(const DenseTensor& a)
{
    if (!a.is_cubical())
        throw DimensionError("symmetrize requires a cubical tensor");
    // Mean over the distinct rearrangements of each index, summed in one
    // fixed order so all members of an orbit get the same bits.
    std::vector<double> out(a.size(), 0.0);
    std::vector<bool> done(a.size(), false);
    for (std::size_t off = 0; off < a.size(); ++off) {
        if (done[off])
            continue;
        auto idx = a.unravel(off);
        std::sort(idx.begin(), idx.end());
        std::vector<std::size_t> orbit;
        double sum = 0.0;
        do {
            const auto o = a.offset(idx);
            orbit.push_back(o);
            sum += a.values()[o];
        } while (std::next_permutation(idx.begin(), idx.end()));
        const double mean = sum / static_cast<double>(orbit.size());
        for (auto o : orbit) {
            out[o] = mean;
            done[o] = true;
        }
    }
    return DenseTensor(a.dims(), std::move(out));
}

} // namespace lpspec
