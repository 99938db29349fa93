#pragma once

#include <stdexcept>
#include <string>

namespace hybridplace {

/// Base class for all toolkit errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class InvalidInputError : public Error {
 public:
  explicit InvalidInputError(const std::string& msg) : Error(msg) {}
};

class NotPositiveDefiniteError : public Error {
 public:
  NotPositiveDefiniteError(const std::string& msg, int pivot)
      : Error(msg), pivot_index(pivot) {}
  int pivot_index;
};

class SingularMatrixError : public Error {
 public:
  SingularMatrixError(const std::string& msg, double cond)
      : Error(msg), condition_estimate(cond) {}
  double condition_estimate;
};

class DegenerateGeometryError : public Error {
 public:
  explicit DegenerateGeometryError(const std::string& msg) : Error(msg) {}
};

class UnsupportedModelError : public Error {
 public:
  explicit UnsupportedModelError(const std::string& msg) : Error(msg) {}
};

class EstimationFailedError : public Error {
 public:
  explicit EstimationFailedError(const std::string& msg) : Error(msg) {}
};

/// Configuration file problem; message carries "file:line:" context when known.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

}  // namespace hybridplace
