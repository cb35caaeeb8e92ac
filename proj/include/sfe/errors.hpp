#pragma once

#include <stdexcept>
#include <string>

namespace sfe {

/// Base class of every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Evaluation at (or numerically at) a point singularity.
class SingularityError : public Error {
 public:
  using Error::Error;
};

/// Linear system without a unique solution (e.g. unregularized rank deficiency).
class IllPosedError : public Error {
 public:
  using Error::Error;
};

/// Physical parameters that cannot be realized (e.g. T60 too short for the room).
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

/// Input data carrying no information (e.g. all-zero signal with finite SNR).
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

/// Network parameters are non-finite or otherwise unusable.
class ModelCorruptError : public Error {
 public:
  using Error::Error;
};

/// Operation not defined for the given model (e.g. Laplacian through ReLU).
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent configuration; `where` locates the offending entry.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& where, const std::string& what)
      : Error(where.empty() ? what : where + ": " + what), where_(where) {}
  const std::string& where() const noexcept { return where_; }

 private:
  std::string where_;
};

}  // namespace sfe
