#pragma once

#include <stdexcept>
#include <string>

namespace thermistor {

/// Bad caller input: out-of-range indices, nonpositive sizes, non-nested grids.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class OutOfDomain : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A nonpositive coefficient where a coercive form needs a positive one.
class CoercivityViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Material data that breaks a hard modelling requirement (asymmetric tensors,
/// conductivity leaving its positive bounds).
class AssumptionViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NotSpd : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SolverFailure : public std::runtime_error {
 public:
  SolverFailure(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

class PicardDivergence : public std::runtime_error {
 public:
  PicardDivergence(const std::string& what, double last_increment)
      : std::runtime_error(what), last_increment_(last_increment) {}
  double last_increment() const { return last_increment_; }

 private:
  double last_increment_;
};

}  // namespace thermistor
