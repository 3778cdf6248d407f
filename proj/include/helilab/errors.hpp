#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace helilab {

/// Base class of the runtime failures a PDE run can hit. The CLI maps all of
/// these to exit status 3.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A pointwise normalization met a (near) zero vector.
class DegeneratePoint : public SolverError {
 public:
  DegeneratePoint(std::size_t index, double magnitude, const std::string& where);
  std::size_t index() const { return index_; }
  double magnitude() const { return magnitude_; }

 private:
  std::size_t index_;
  double magnitude_;
};

class NoContraction : public SolverError {
 public:
  using SolverError::SolverError;
};

class NonFinite : public SolverError {
 public:
  using SolverError::SolverError;
};

/// The frame chaining step saw |v_prev . H| >= 2^-5.
class HomotopyTooCoarse : public SolverError {
 public:
  using SolverError::SolverError;
};

/// Two sphere points are (nearly) antipodal, so the minimal geodesic is not unique.
class AntipodalPoints : public SolverError {
 public:
  using SolverError::SolverError;
};

/// Bad user configuration; the CLI maps it to exit status 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace helilab
