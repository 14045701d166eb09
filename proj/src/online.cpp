// Copyright (c) 2026 The wrom developers.
// SPDX-License-Identifier: Apache-2.0

#include "wrom/online.hpp"

#include "wrom/errors.hpp"
#include "wrom/greedy.hpp"
#include "wrom/util.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace wrom {

Eigen::VectorXd solve_reduced_system(const std::vector<Eigen::MatrixXd> &A_red,
                                     const std::vector<Eigen::VectorXd> &f_red,
                                     const Eigen::VectorXd &theta_a,
                                     const Eigen::VectorXd &theta_f,
                                     const ParameterVector &y) {
  if (A_red.empty() || A_red.front().rows() == 0)
    throw std::invalid_argument("reduced_solve: empty basis");
  const int n = static_cast<int>(A_red.front().rows());
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t q = 0; q < A_red.size(); ++q)
    A += theta_a[static_cast<Eigen::Index>(q)] * A_red[q];
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  for (std::size_t q = 0; q < f_red.size(); ++q)
    rhs += theta_f[static_cast<Eigen::Index>(q)] * f_red[q];

  // The reduced matrix is symmetric; a spectral condition estimate is cheap
  // at these sizes and gives an honest singularity diagnostic.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  if (es.info() != Eigen::Success)
    throw SingularReducedSystem("reduced_solve: eigensolve failed", n, y,
                                0.0);
  const double abs_max = std::max(std::abs(es.eigenvalues()[0]),
                                  std::abs(es.eigenvalues()[n - 1]));
  const double abs_min = es.eigenvalues().cwiseAbs().minCoeff();
  const double rcond = abs_max > 0.0 ? abs_min / abs_max : 0.0;
  if (!(rcond > 1e-14))
    throw SingularReducedSystem(
        "reduced_solve: singular reduced system (rcond " + fmt_double(rcond) +
            ") at dimension " + std::to_string(n),
        n, y, rcond);
  return es.eigenvectors() *
         (es.eigenvectors().transpose() * rhs).cwiseQuotient(es.eigenvalues());
}

Eigen::VectorXd reduced_solve(const ReducedBasis &rb, const ParameterVector &y,
                              const AffineOperatorSet &ops) {
  return solve_reduced_system(rb.A_red, rb.f_red, ops.theta_a(y),
                              ops.theta_f(y), y);
}

Eigen::VectorXd reconstruct(const ReducedBasis &rb,
                            const Eigen::VectorXd &uN) {
  if (uN.size() != rb.n_basis())
    throw std::invalid_argument("reconstruct: coefficient length mismatch");
  return rb.Z * uN;
}

double reduced_output(const ReducedBasis &rb, const AffineOperatorSet &ops,
                      const ParameterVector &y, const Eigen::VectorXd &uN) {
  const Eigen::VectorXd th_f = ops.theta_f(y);
  double s = 0.0;
  for (std::size_t q = 0; q < rb.f_red.size(); ++q)
    s += th_f[static_cast<Eigen::Index>(q)] * rb.f_red[q].dot(uN);
  return s;
}

TestSet make_test_set(const AffineOperatorSet &ops, const TruthSpace &space,
                      const ParameterDistribution &dist, int m,
                      std::uint64_t seed) {
  if (m < 1)
    throw std::invalid_argument("make_test_set: need at least one sample");
  TestSet test;
  test.seed = seed;
  test.ys = dist.sample(m, seed);
  test.truth.resize(m);
  parallel_for(m, [&](int i) {
    test.truth[i] = solve_truth(ops, space, test.ys[i]).coeffs;
  });
  return test;
}

ErrorStats evaluate_errors(const ReducedBasis &rb, const AffineOperatorSet &ops,
                           const TruthSpace &space, const TestSet &test) {
  const int m = test.size();
  std::vector<double> err_sq(m), est_sq(m, 0.0);
  const bool has_estimator = !rb.estimator.empty();
  parallel_for(m, [&](int i) {
    const Eigen::VectorXd uN = reduced_solve(rb, test.ys[i], ops);
    const Eigen::VectorXd diff = test.truth[i] - reconstruct(rb, uN);
    const double e = v_norm(space, diff);
    err_sq[i] = e * e;
    if (has_estimator) {
      const double eta = estimate(rb.estimator, ops, test.ys[i], uN);
      est_sq[i] = eta * eta;
    }
  });
  ErrorStats stats;
  stats.estimator_mean_sq =
      has_estimator ? 0.0 : std::numeric_limits<double>::quiet_NaN();
  for (int i = 0; i < m; ++i) {
    stats.mean_sq_error += err_sq[i] / m;
    stats.max_error = std::max(stats.max_error, std::sqrt(err_sq[i]));
    if (has_estimator)
      stats.estimator_mean_sq += est_sq[i] / m;
  }
  return stats;
}

ErrorStats mean_square_error(const ReducedBasis &rb,
                             const AffineOperatorSet &ops,
                             const TruthSpace &space,
                             const ParameterDistribution &dist, int m,
                             std::uint64_t seed) {
  return evaluate_errors(rb, ops, space,
                         make_test_set(ops, space, dist, m, seed));
}

double expected_output(const ReducedBasis &rb, const AffineOperatorSet &ops,
                       const ParameterDistribution &dist, int m,
                       std::uint64_t seed) {
  if (m < 1)
    throw std::invalid_argument("expected_output: need at least one sample");
  const std::vector<ParameterVector> ys = dist.sample(m, seed);
  std::vector<double> vals(m);
  parallel_for(m, [&](int i) {
    const Eigen::VectorXd uN = reduced_solve(rb, ys[i], ops);
    vals[i] = reduced_output(rb, ops, ys[i], uN);
  });
  double mean = 0.0;
  for (int i = 0; i < m; ++i)
    mean += vals[i] / m;
  return mean;
}

} // namespace wrom
