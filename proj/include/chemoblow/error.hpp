#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace chemoblow {

/// One violated constraint of a validated record.
struct FieldViolation {
    std::string field;
    std::string constraint;
};

/// Raised when a parameter record fails validation. Carries every violation,
/// not only the first one.
class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(std::vector<FieldViolation> violations);

    [[nodiscard]] const std::vector<FieldViolation>& violations() const noexcept { return violations_; }

private:
    std::vector<FieldViolation> violations_;
};

/// Argument outside the domain where an operation is well posed.
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Numerical breakdown that well-formed inputs should never trigger.
class NumericalFault : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace chemoblow
