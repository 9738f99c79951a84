#pragma once

#include <stdexcept>
#include <string>

namespace watch {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

class ConfigInvalid : public Error {
 public:
  using Error::Error;
};

/// The exact transport oracle only handles small equal-size instances.
class UnsupportedInstance : public Error {
 public:
  using Error::Error;
};

/// Threshold requested on a buffer holding fewer than two batches.
class DegenerateBuffer : public Error {
 public:
  using Error::Error;
};

class EvalImpossible : public Error {
 public:
  using Error::Error;
};

class Timeout : public Error {
 public:
  using Error::Error;
};

enum class LoadErrorKind {
  io,
  malformed,
  shape_mismatch,
  non_finite,
  parse,
};

class LoadError : public Error {
 public:
  LoadError(LoadErrorKind kind, const std::string& what)
      : Error(what), kind_(kind) {}

  LoadErrorKind kind() const noexcept { return kind_; }

 private:
  LoadErrorKind kind_;
};

}  // namespace watch
