#ifndef MCLD_ERRORS_HPP
#define MCLD_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace mcld {

// Base class for everything thrown by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string &msg) : std::runtime_error(msg) {}
};

// Bad inputs or violated preconditions.  The CLI maps these to exit code 2.
class ValidationError : public Error {
public:
    using Error::Error;
};

// A numerical procedure failed to reach its target accuracy.  Exit code 3.
class NumericalError : public Error {
public:
    using Error::Error;
};

struct NotIrreducible final : ValidationError {
    using ValidationError::ValidationError;
};
struct SingularSystem final : ValidationError {
    using ValidationError::ValidationError;
};
struct Unreachable final : ValidationError {
    using ValidationError::ValidationError;
};
struct EmptyLimit final : ValidationError {
    using ValidationError::ValidationError;
};
struct NotDivergenceFree final : ValidationError {
    using ValidationError::ValidationError;
};
struct CrossClassFlow final : ValidationError {
    using ValidationError::ValidationError;
};
struct NotStrictlyPositive final : ValidationError {
    using ValidationError::ValidationError;
};
struct NotMeanZero final : ValidationError {
    using ValidationError::ValidationError;
};
struct AbsorbingState final : ValidationError {
    using ValidationError::ValidationError;
};

struct NonConvergence final : NumericalError {
    using NumericalError::NumericalError;
};
struct NegativeRoot final : NumericalError {
    using NumericalError::NumericalError;
};
struct DegenerateFit final : NumericalError {
    using NumericalError::NumericalError;
};
struct AllRatesVanish final : NumericalError {
    using NumericalError::NumericalError;
};
struct NotCoarser final : NumericalError {
    using NumericalError::NumericalError;
};
struct IterationBound final : NumericalError {
    using NumericalError::NumericalError;
};
struct SingularSymmetricPart final : NumericalError {
    using NumericalError::NumericalError;
};

} // namespace mcld

#endif
