// Copyright (c) 2026 The wrom developers.
// SPDX-License-Identifier: Apache-2.0
//
// Online phase: dense reduced Galerkin solves, field reconstruction, and
// error/statistics sweeps against the truth solver.

#ifndef WROM_ONLINE_HPP
#define WROM_ONLINE_HPP

#include "wrom/reduced_basis.hpp"

namespace wrom {

/// Solve the N x N reduced system sum_q theta_a_q A^N_q u = sum theta_f_q
/// f^N_q. Throws SingularReducedSystem (with y and a condition estimate
/// attached) when the spectral condition number exceeds 1e14.
Eigen::VectorXd reduced_solve(const ReducedBasis &rb, const ParameterVector &y,
                              const AffineOperatorSet &ops);

/// Same solve on raw reduced blocks; shared by the greedy sweep.
Eigen::VectorXd solve_reduced_system(const std::vector<Eigen::MatrixXd> &A_red,
                                     const std::vector<Eigen::VectorXd> &f_red,
                                     const Eigen::VectorXd &theta_a,
                                     const Eigen::VectorXd &theta_f,
                                     const ParameterVector &y);

/// Lift reduced coefficients to the truth space: Z * uN.
Eigen::VectorXd reconstruct(const ReducedBasis &rb, const Eigen::VectorXd &uN);

/// Reduced compliance output f(y)^T Z uN at reduced cost.
double reduced_output(const ReducedBasis &rb, const AffineOperatorSet &ops,
                      const ParameterVector &y, const Eigen::VectorXd &uN);

/// Fixed test set with cached truth solutions, so per-N error curves reuse
/// the expensive solves.
struct TestSet {
  std::vector<ParameterVector> ys;
  std::vector<Eigen::VectorXd> truth; // full-length coefficient vectors
  std::uint64_t seed = 0;

  int size() const { return static_cast<int>(ys.size()); }
};
TestSet make_test_set(const AffineOperatorSet &ops, const TruthSpace &space,
                      const ParameterDistribution &dist, int m,
                      std::uint64_t seed);

struct ErrorStats {
  double mean_sq_error = 0.0;
  double max_error = 0.0;
  double estimator_mean_sq = 0.0; // NaN when no estimator data exists
};

/// Reduced-vs-truth errors in the V norm over a cached test set.
ErrorStats evaluate_errors(const ReducedBasis &rb, const AffineOperatorSet &ops,
                           const TruthSpace &space, const TestSet &test);

/// Convenience wrapper: draws M rho-distributed samples, runs truth and
/// reduced solves, returns (1/M) sum ||u - u_N||_V^2 plus max error and the
/// estimator aggregate.
ErrorStats mean_square_error(const ReducedBasis &rb,
                             const AffineOperatorSet &ops,
                             const TruthSpace &space,
                             const ParameterDistribution &dist, int m,
                             std::uint64_t seed);

/// Monte-Carlo mean of the reduced output over M rho-distributed samples.
double expected_output(const ReducedBasis &rb, const AffineOperatorSet &ops,
                       const ParameterDistribution &dist, int m,
                       std::uint64_t seed);

} // namespace wrom

#endif
