#pragma once

#include <stdexcept>
#include <string>

namespace pins {

// Base of every error raised by the library. Callers that only care about
// "config problem" vs "numerical problem" can catch the two families below.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad inputs: malformed model, infeasible strategy parameters, bad config.
class InputError : public Error {
public:
    using Error::Error;
};

// Numerical machinery could not deliver a result at the requested accuracy.
class NumericError : public Error {
public:
    using Error::Error;
};

class InvalidModel : public InputError {
public:
    using InputError::InputError;
};

class NoUniqueStationary : public InputError {
public:
    using InputError::InputError;
};

class InfeasibleFloor : public InputError {
public:
    using InputError::InputError;
};

class NoInitialCushion : public InputError {
public:
    using InputError::InputError;
};

class ConfigError : public InputError {
public:
    using InputError::InputError;
};

class NumericFailure : public NumericError {
public:
    using NumericError::NumericError;
};

class GridTooNarrow : public NumericError {
public:
    using NumericError::NumericError;
};

class InsufficientResolution : public NumericError {
public:
    using NumericError::NumericError;
};

}  // namespace pins
