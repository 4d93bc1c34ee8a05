#pragma once

#include <stdexcept>
#include <string>

namespace covsep {

/// Malformed input: wrong dimensions, non-Hermitian matrices, out-of-range
/// parameters. Maps to CLI exit code 1.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Base for failures of an otherwise valid computation. CLI exit code 2.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A reduced state (or filter iterate) has an eigenvalue below the rank cutoff,
/// so no inverse square root filter exists.
class SingularReducedState : public NumericalError {
 public:
  SingularReducedState(const std::string& what, double min_eigenvalue)
      : NumericalError(what), min_eigenvalue_(min_eigenvalue) {}
  double min_eigenvalue() const noexcept { return min_eigenvalue_; }

 private:
  double min_eigenvalue_;
};

/// Iteration budget exhausted. Carries the best residual, and for
/// optimisation problems the bracketing bounds on the optimum.
class NoConvergence : public NumericalError {
 public:
  NoConvergence(const std::string& what, int iterations, double residual,
                double lower_bound = 0.0, double upper_bound = 0.0)
      : NumericalError(what),
        iterations_(iterations),
        residual_(residual),
        lower_bound_(lower_bound),
        upper_bound_(upper_bound) {}
  int iterations() const noexcept { return iterations_; }
  double residual() const noexcept { return residual_; }
  double lower_bound() const noexcept { return lower_bound_; }
  double upper_bound() const noexcept { return upper_bound_; }

 private:
  int iterations_;
  double residual_;
  double lower_bound_;
  double upper_bound_;
};

/// A threshold scan saw no verdict flip on the requested range.
class NoThreshold : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// A threshold scan saw more than one verdict flip on its coarse pre-scan.
class AmbiguousThreshold : public NumericalError {
 public:
  AmbiguousThreshold(const std::string& what, int flips)
      : NumericalError(what), flips_(flips) {}
  int flips() const noexcept { return flips_; }

 private:
  int flips_;
};

}  // namespace covsep
