#pragma once

// l^p norms and the sign-power map used in every stationarity equation.
//
// phi(x, q)_i = sgn(x_i) * |x_i|^q. With this reading the gradient of the
// l^p norm is phi(x, p-1) / ||x||_p^(p-1) for every x != 0 and every p >= 2,
// and phi coincides with the plain power x^q whenever q is odd.

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"
#include "tensor.hpp"

namespace lpspec {

/// |x|^q for integer q >= 0 by repeated squaring.
inline double ipow(double x, int q)
{
    double result = 1.0;
    double base = x;
    unsigned e = static_cast<unsigned>(q);
    while (e != 0) {
        if (e & 1u)
            result *= base;
        base *= base;
        e >>= 1u;
    }
    return result;
}

inline double sgn(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

/// Per-mode integer norm exponents, each >= 2.
class PNormSpec
{
public:
    /// A single exponent, broadcast to every mode by at().
    explicit PNormSpec(int p) : exponents_{p} { validate(); }
    explicit PNormSpec(std::vector<int> exponents) : exponents_(std::move(exponents))
    {
        if (exponents_.empty())
            throw ParameterError("PNormSpec needs at least one exponent");
        validate();
    }
    PNormSpec(std::initializer_list<int> exponents) : PNormSpec(std::vector<int>(exponents)) {}

    bool broadcast() const { return exponents_.size() == 1; }

    int at(std::size_t mode) const { return broadcast() ? exponents_.front() : exponents_.at(mode); }

    /// Explicit list for an order-k tensor; throws if the exponent list does not fit.
    std::vector<int> expand(std::size_t order) const
    {
        if (broadcast())
            return std::vector<int>(order, exponents_.front());
        if (exponents_.size() != order)
            throw DimensionError("norm exponent list has " + std::to_string(exponents_.size())
                                 + " entries for an order-" + std::to_string(order) + " tensor");
        return exponents_;
    }

    const std::vector<int>& exponents() const { return exponents_; }

    friend bool operator==(const PNormSpec&, const PNormSpec&) = default;

private:
    void validate() const
    {
        for (int p : exponents_)
            if (p < 2)
                throw ParameterError("norm exponent must be an integer >= 2, got " + std::to_string(p));
    }

    std::vector<int> exponents_;
};

/// (sum |x_i|^p)^(1/p). Accepts p >= 1 for diagnostics.
inline double lp_norm(std::span<const double> x, int p)
{
    if (p < 1)
        throw ParameterError("lp_norm requires p >= 1, got " + std::to_string(p));
    double s = 0.0;
    for (double v : x)
        s += ipow(std::abs(v), p);
    if (p == 1)
        return s;
    if (p == 2)
        return std::sqrt(s);
    return std::pow(s, 1.0 / p);
}

/// Componentwise sgn(x_i) |x_i|^q.
inline Vector phi(std::span<const double> x, int q)
{
    if (q < 1)
        throw ParameterError("phi requires q >= 1, got " + std::to_string(q));
    Vector y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        y[i] = sgn(x[i]) * ipow(std::abs(x[i]), q);
    return y;
}

namespace detail {

inline double real_root(double a, int q)
{
    switch (q) {
    case 1: return a;
    case 2: return std::sqrt(a);
    case 3: return std::cbrt(a);
    default: return std::pow(a, 1.0 / q);
    }
}

} // namespace detail

/// Componentwise sgn(y_i) |y_i|^(1/q); the inverse of phi(., q).
inline Vector phi_inverse(std::span<const double> y, int q)
{
    if (q < 1)
        throw ParameterError("phi_inverse requires q >= 1, got " + std::to_string(q));
    Vector x(y.size());
    for (std::size_t i = 0; i < y.size(); ++i)
        x[i] = sgn(y[i]) * detail::real_root(std::abs(y[i]), q);
    return x;
}

inline Vector lp_norm_gradient(std::span<const double> x, int p)
{
    if (p < 2)
        throw ParameterError("lp_norm_gradient requires p >= 2, got " + std::to_string(p));
    const double n = lp_norm(x, p);
    if (n == 0.0)
        throw SingularPointError("the l^p norm is not differentiable at the origin");
    auto g = phi(x, p - 1);
    const double scale = ipow(n, p - 1);
    for (auto& v : g)
        v /= scale;
    return g;
}

/// x / ||x||_p. Throws SingularPointError for x = 0.
inline Vector normalized(std::span<const double> x, int p)
{
    const double n = lp_norm(x, p);
    if (n == 0.0)
        throw SingularPointError("cannot normalize the zero vector");
    Vector y(x.begin(), x.end());
    for (auto& v : y)
        v /= n;
    return y;
}

} // namespace lpspec
