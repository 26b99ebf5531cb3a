#pragma once

#include <stdexcept>
#include <string>

namespace ldedq {

/// Bad input or configuration. The CLI maps this to exit code 1.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Numerical or environment failure during a run. The CLI maps this to exit code 2.
class EvaluationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace ldedq
