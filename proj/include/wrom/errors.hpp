// Copyright (c) 2026 The wrom developers.
// SPDX-License-Identifier: Apache-2.0

#ifndef WROM_ERRORS_HPP
#define WROM_ERRORS_HPP

#include <Eigen/Core>
#include <stdexcept>
#include <string>

namespace wrom {

/// Base class for all numerical failures raised by this library. Input and
/// contract violations use std::invalid_argument instead.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Truth (high-fidelity) linear solve failed or did not meet the residual
/// contract. Carries the offending parameter.
class TruthSolveError : public NumericalError {
public:
  TruthSolveError(std::string what, Eigen::VectorXd y)
      : NumericalError(std::move(what)), parameter(std::move(y)) {}

  Eigen::VectorXd parameter;
};

/// The reduced Galerkin system at a parameter value is singular (or so badly
/// conditioned that its solution is meaningless). This is a run-terminating
/// diagnostic: callers must surface the reduced dimension and the parameter,
/// never swallow them.
class SingularReducedSystem : public NumericalError {
public:
  SingularReducedSystem(std::string what, int n, Eigen::VectorXd y, double rcond)
      : NumericalError(std::move(what)), reduced_dim(n), parameter(std::move(y)),
        rcond_estimate(rcond) {}

  int reduced_dim;
  Eigen::VectorXd parameter;
  double rcond_estimate;
};

/// Dense or sparse eigensolver failed to converge.
class EigenSolveError : public NumericalError {
public:
  using NumericalError::NumericalError;
};

} // namespace wrom

#endif
