#pragma once
#include <cstddef>
#include <stdexcept>
#include <string>

namespace structnet {

/// Base class of every error raised by the library.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or non-finite input data.
class DataError : public Error
{
public:
    using Error::Error;
};

/// Shapes that do not agree, or an index outside its range.
class DimensionError : public Error
{
public:
    using Error::Error;
};

/// A matrix expected to be positive (semi)definite is not.
class DefinitenessError : public Error
{
public:
    DefinitenessError(const std::string& what, std::ptrdiff_t pivot = -1)
        : Error(what), pivot_(pivot)
    {}

    /// Index of the failing pivot, or -1 when not applicable.
    std::ptrdiff_t pivot() const noexcept { return pivot_; }

private:
    std::ptrdiff_t pivot_;
};

/// An iterative solver ran out of iterations.
class ConvergenceError : public Error
{
public:
    ConvergenceError(const std::string& what, double residual)
        : Error(what), residual_(residual)
    {}

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// Argument outside the mathematical domain of a function.
class DomainError : public Error
{
public:
    using Error::Error;
};

/// Penalty calibration impossible for the given inputs.
class CalibrationError : public Error
{
public:
    using Error::Error;
};

/// Invalid user configuration (CLI / config files).
class ConfigError : public Error
{
public:
    using Error::Error;
};

} // namespace structnet
