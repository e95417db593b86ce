#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace topoflock {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NonPositiveDensity : public Error {
 public:
  NonPositiveDensity(std::size_t cell, double value);
  std::size_t cell() const { return cell_; }
  double value() const { return value_; }

 private:
  std::size_t cell_;
  double value_;
};

class SingularEvaluation : public Error {
 public:
  using Error::Error;
};

class RadiusOutOfRange : public Error {
 public:
  using Error::Error;
};

// Density dropped to zero or below during a time step.
class PositivityLoss : public Error {
 public:
  PositivityLoss(std::size_t cell, double value, double time);
  std::size_t cell() const { return cell_; }
  double time() const { return time_; }

 private:
  std::size_t cell_;
  double time_;
};

class CflViolation : public Error {
 public:
  CflViolation(double dt, double bound);
  double dt() const { return dt_; }
  double bound() const { return bound_; }

 private:
  double dt_;
  double bound_;
};

class StiffPairDetected : public Error {
 public:
  StiffPairDetected(std::size_t i, std::size_t j, double distance);
  std::size_t first() const { return i_; }
  std::size_t second() const { return j_; }
  double distance() const { return distance_; }

 private:
  std::size_t i_;
  std::size_t j_;
  double distance_;
};

class EigSolverFailure : public Error {
 public:
  using Error::Error;
};

// Carries every violation found while validating a configuration.
class ConfigInvalid : public Error {
 public:
  explicit ConfigInvalid(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

}  // namespace topoflock
