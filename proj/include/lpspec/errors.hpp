#pragma once

#include <stdexcept>
#include <string>

namespace lpspec {

/// Base class for every error raised by the library.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Operand shapes do not conform (wrong vector length, non-cubical tensor, ...).
class DimensionError : public Error
{
public:
    using Error::Error;
};

class ModeError : public Error
{
public:
    using Error::Error;
};

/// Invalid scalar parameter such as a norm exponent below its admissible range.
class ParameterError : public Error
{
public:
    using Error::Error;
};

/// The l^p norm is not differentiable at the origin.
class SingularPointError : public Error
{
public:
    using Error::Error;
};

class SymmetryError : public Error
{
public:
    using Error::Error;
};

class ZeroTensorError : public Error
{
public:
    using Error::Error;
};

/// An iterate produced an identically zero contraction in some mode.
class DegenerateIterateError : public Error
{
public:
    using Error::Error;
};

/// Brute-force procedure would exceed its work budget.
class SizeLimitError : public Error
{
public:
    using Error::Error;
};

/// Input outside the domain of the operation (negative entries, non-positive vector).
class DomainError : public Error
{
public:
    using Error::Error;
};

class ReducibleError : public Error
{
public:
    using Error::Error;
};

} // namespace lpspec
