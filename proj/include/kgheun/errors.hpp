#ifndef KGHEUN_ERRORS_HPP
#define KGHEUN_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kgheun {

/// Base of every error raised by the library.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of the operation.
class DomainError : public Error
{
public:
    using Error::Error;
};

/// The dimensionless reduction is undefined (a3 = 0 makes sigma1 = 2/q diverge).
class DegenerateReduction : public Error
{
public:
    using Error::Error;
};

/// 1 + c1 is zero or a negative integer; the analytic Frobenius solution does not exist.
class SingularParameter : public Error
{
public:
    using Error::Error;
};

/// A series or sum did not converge within its term budget.
class TruncationFailure : public Error
{
public:
    TruncationFailure(std::string const& what, double partial_sum, std::size_t terms)
      : Error(what), partial_sum_(partial_sum), terms_(terms)
    {}

    double partial_sum() const noexcept { return partial_sum_; }
    std::size_t terms() const noexcept { return terms_; }

private:
    double partial_sum_;
    std::size_t terms_;
};

class ConfigError : public Error
{
public:
    using Error::Error;
};

/// An invariant that valid inputs guarantee was violated.
class InternalError : public Error
{
public:
    using Error::Error;
};

} // namespace kgheun

#endif // KGHEUN_ERRORS_HPP
