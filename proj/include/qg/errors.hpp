#pragma once

#include <stdexcept>
#include <string>

namespace qg {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument or violated precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A kernel or field is not resolved by the grid it is placed on.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

/// An iterative or quadrature procedure failed to reach its tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double achieved)
      : Error(what), achieved_(achieved) {}
  double achieved_error() const noexcept { return achieved_; }

 private:
  double achieved_;
};

/// Time step violates the advective stability limit.
class CflError : public Error {
 public:
  using Error::Error;
};

/// NaN/Inf detected in the evolving state.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Rate fit requested on too few samples or too short a span.
class InsufficientSpan : public Error {
 public:
  using Error::Error;
};

/// Config file does not match the expected schema; `path()` names the field.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& path, const std::string& what)
      : Error(path + ": " + what), path_(path) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace qg
