#pragma once

#include <stdexcept>
#include <string>

namespace sigmax {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Problems with model parameters or configuration (CLI exit code 1).
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

/// Failures of a numerical procedure (CLI exit code 2).
class NumericalError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public ConfigurationError {
 public:
  using ConfigurationError::ConfigurationError;
};

class DimensionError : public ConfigurationError {
 public:
  using ConfigurationError::ConfigurationError;
};

class TruncationError : public ConfigurationError {
 public:
  using ConfigurationError::ConfigurationError;
};

class InvalidParams : public ConfigurationError {
 public:
  using ConfigurationError::ConfigurationError;
};

class FrameMismatch : public ConfigurationError {
 public:
  using ConfigurationError::ConfigurationError;
};

class DivisionByZero : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class StepFailure : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class DegenerateSteadyState : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class EmptyRecord : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class DegenerateGeometry : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class CollinearCenters : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SchemaError : public ConfigurationError {
 public:
  using ConfigurationError::ConfigurationError;
};

class MissingOutput : public Error {
 public:
  using Error::Error;
};

}  // namespace sigmax
