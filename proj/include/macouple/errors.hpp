#pragma once

#include <stdexcept>

namespace macouple {

/// Input profile has a value more negative than the clamping tolerance allows.
struct NegativeInputError : std::domain_error {
    using std::domain_error::domain_error;
};

/// A user-supplied nonlinearity returned a negative or non-finite value.
struct NonlinearityRangeError : std::domain_error {
    using std::domain_error::domain_error;
};

/// A solver was invoked on a problem outside its regime precondition.
struct WrongRegimeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Rescaling to a fixed point is undefined when the homogeneity degree is 1.
struct BalancedRegimeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Iteration budget exhausted before the convergence criterion was met.
struct MaxIterExceededError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// The iterate collapsed to (numerical) zero under the operator.
struct ZeroCollapseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A sample point lies outside the closed unit ball.
struct OutOfDomainError : std::domain_error {
    using std::domain_error::domain_error;
};

} // namespace macouple
