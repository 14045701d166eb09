// Copyright (c) 2026 The wrom developers.
// SPDX-License-Identifier: Apache-2.0
//
// Weighted greedy reduced-basis offline stage: snapshot selection by the
// weighted a posteriori estimator w(y) * eta_N(y), with a min-theta
// coercivity lower bound and a Riesz-representer residual dual norm.

#ifndef WROM_GREEDY_HPP
#define WROM_GREEDY_HPP

#include "wrom/quadrature.hpp"
#include "wrom/reduced_basis.hpp"

namespace wrom {

/// Stability constants of the affine family against the X inner product:
/// alpha_bar (gamma_bar) is the smallest (largest) generalized eigenvalue of
/// sum_q A_q v = alpha X v on the free DOFs. Dense solve up to 2000 free
/// DOFs, safeguarded inverse/power iteration beyond. Throws EigenSolveError
/// if alpha_bar fails to come out positive, which signals an assembly bug.
struct StabilityConstants {
  double alpha_bar = 0.0;
  double gamma_bar = 0.0;
};
StabilityConstants compute_stability_constants(const AffineOperatorSet &ops,
                                               const TruthSpace &space);

/// Min-theta bound: a(v,v;y) >= (min_q theta_a(y)_q) * alpha_bar * ||v||_V^2.
double coercivity_lower_bound(const EstimatorData &data,
                              const AffineOperatorSet &ops,
                              const ParameterVector &y);

/// Companion upper bound max_q theta_a(y)_q * gamma_bar, for effectivity logs.
double continuity_upper_bound(const EstimatorData &data,
                              const AffineOperatorSet &ops,
                              const ParameterVector &y);

/// Build estimator Gram blocks for the (possibly empty) basis Z by one Riesz
/// X-solve per affine term and basis vector. Rejects non-X-orthonormal Z.
EstimatorData prepare_estimator(const AffineOperatorSet &ops,
                                const TruthSpace &space,
                                const Eigen::MatrixXd &Z);

/// Extend existing blocks by one X-orthonormal basis column (the Riesz
/// representers kept inside `data` make this incremental).
void extend_estimator(EstimatorData &data, const AffineOperatorSet &ops,
                      const TruthSpace &space, const Eigen::VectorXd &zeta);

/// Residual dual norm ||r(y, uN)||_X' from the Gram blocks; clamped at 0.
/// The theta overload serves archive-only consumers with no assembled
/// operators at hand.
double residual_dual_norm(const EstimatorData &data,
                          const Eigen::VectorXd &theta_a,
                          const Eigen::VectorXd &theta_f,
                          const Eigen::VectorXd &uN);
double residual_dual_norm(const EstimatorData &data,
                          const AffineOperatorSet &ops,
                          const ParameterVector &y,
                          const Eigen::VectorXd &uN);

/// A posteriori bound eta_N(y) = dual norm / coercivity lower bound.
double estimate(const EstimatorData &data, const Eigen::VectorXd &theta_a,
                const Eigen::VectorXd &theta_f, const Eigen::VectorXd &uN);
double estimate(const EstimatorData &data, const AffineOperatorSet &ops,
                const ParameterVector &y, const Eigen::VectorXd &uN);

/// Weighted estimator eta^w_N(y) = w(y) * eta_N(y).
double weighted_estimate(const EstimatorData &data,
                         const AffineOperatorSet &ops,
                         const ParameterVector &y, const Eigen::VectorXd &uN,
                         const WeightFunction &w);

enum class FirstPick { FirstNode, DensityMode };

struct GreedyOptions {
  double eps_tol = 1e-10;
  int n_max = 20;
  FirstPick first_pick = FirstPick::FirstNode;
  const ParameterDistribution *dist = nullptr; // required for DensityMode
};

/// Greedy loop: truth solve at the current pick, X-orthonormal enrichment,
/// incremental estimator extension, weighted-estimator argmax over the
/// training nodes (ties broken by lowest node index), stop on tolerance or
/// n_max. Linearly dependent snapshots are skipped and their node removed;
/// an exhausted training set stops the build with a dedicated status. A
/// singular reduced system during the estimator sweep is caught and reported
/// through meta.status = Breakdown with the failing N and y preserved, and
/// the basis built so far is returned.
ReducedBasis greedy_build(const AffineOperatorSet &ops, const TruthSpace &space,
                          const TrainingSet &training, const WeightFunction &w,
                          const GreedyOptions &opts);

} // namespace wrom

#endif
