#pragma once

#include <stdexcept>
#include <string>

namespace tenrec {

// Invalid argument / precondition violation (bad mode index, shape mismatch, ...).
class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// File or stream level failure (bad magic, truncation, unwritable path, ...).
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Numerical breakdown (non-finite iterate, SVD non-convergence, ...).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Operation called on an object in the wrong state.
class StateError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

} // namespace tenrec
