#ifndef PERCMOD_ERRORS_HPP
#define PERCMOD_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace percmod
{

// Input outside the mathematical domain of an operation.
class domain_error : public std::domain_error
{
public:
    using std::domain_error::domain_error;
};

// A numeric engine could not reach the requested accuracy.
class precision_error : public std::runtime_error
{
public:
    precision_error(const std::string &what, double achieved)
        : std::runtime_error(what + " (achieved bound " + std::to_string(achieved) + ")"), achieved_(achieved)
    {
    }

    double achieved() const noexcept
    {
        return achieved_;
    }

private:
    double achieved_;
};

// A hypergeometric series evaluated at a point where it diverges.
class divergence_error : public std::domain_error
{
public:
    using std::domain_error::domain_error;
};

// Evaluation on a branch cut of a principal-branch closed form.
class branch_error : public std::domain_error
{
public:
    using std::domain_error::domain_error;
};

// Truncation bookkeeping or exact-arithmetic contract violation in formal series.
class series_error : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

// Two routes that must agree (for example repeated character samples) did not.
class consistency_error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

} // namespace percmod

#endif
