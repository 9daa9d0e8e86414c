#pragma once

#include <stdexcept>
#include <string>

namespace mcckf {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Dimension mismatch in a matrix operation or model wiring.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Input expected to be symmetric deviates beyond tolerance.
class AsymmetryError : public Error {
 public:
  using Error::Error;
};

// A matrix required to be positive definite failed a pivot; carries the
// offending pivot index.
class DefinitenessError : public Error {
 public:
  DefinitenessError(const std::string& msg, int pivot)
      : Error(msg + " (pivot index " + std::to_string(pivot) + ")"),
        pivot_(pivot) {}
  int pivot() const { return pivot_; }

 private:
  int pivot_;
};

// A matrix became numerically singular mid-recursion; carries the step index.
class ConditioningError : public Error {
 public:
  ConditioningError(const std::string& msg, long step)
      : Error(msg + " (step " + std::to_string(step) + ")"), step_(step) {}
  long step() const { return step_; }

 private:
  long step_;
};

// Malformed file content (JSON schema, truncated data, bad field types).
class SchemaError : public Error {
 public:
  using Error::Error;
};

// Invalid configuration (bad flag values, inadmissible strategy/filter combos).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace mcckf
