#pragma once

#include <stdexcept>
#include <string>

namespace zice {

/// Input that violates a parameter or configuration invariant.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Parameters outside the resonance / large-detuning closed forms.
class RegimeError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

/// Integration or quadrature that could not produce a trustworthy number.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class QuadratureError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace zice
