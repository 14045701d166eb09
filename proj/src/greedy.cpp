// Copyright (c) 2026 The wrom developers.
// SPDX-License-Identifier: Apache-2.0

#include "wrom/greedy.hpp"

#include "wrom/errors.hpp"
#include "wrom/online.hpp"
#include "wrom/util.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wrom {

namespace {

// Generalized Rayleigh-quotient iteration for the extreme eigenvalues of
// sum_q A_q v = lambda X v when the free space is too large for a dense
// solve. The smallest eigenvalue comes from inverse iteration with a safety
// margin, since overestimating the coercivity constant would invalidate the
// certified bound.
StabilityConstants iterative_constants(const SparseMat &A_sum,
                                       const TruthSpace &space) {
  const int n = static_cast<int>(A_sum.rows());
  Eigen::SimplicialLDLT<SparseMat> A_solver(A_sum);
  if (A_solver.info() != Eigen::Success)
    throw EigenSolveError("stability constants: operator factorization failed");
  Eigen::SimplicialLDLT<SparseMat> X_solver(space.X_free);
  if (X_solver.info() != Eigen::Success)
    throw EigenSolveError("stability constants: X factorization failed");

  auto rayleigh = [&](const Eigen::VectorXd &v) {
    return v.dot(A_sum * v) / v.dot(space.X_free * v);
  };

  StabilityConstants out;
  Eigen::VectorXd v = Eigen::VectorXd::Ones(n).normalized();
  double prev = 0.0;
  for (int it = 0; it < 500; ++it) {
    v = X_solver.solve(A_sum * v);
    v.normalize();
    const double r = rayleigh(v);
    if (it > 2 && std::abs(r - prev) <= 1e-12 * std::abs(r))
      break;
    prev = r;
  }
  out.gamma_bar = rayleigh(v) * (1.0 + 1e-6);

  v = Eigen::VectorXd::Ones(n).normalized();
  prev = 0.0;
  for (int it = 0; it < 500; ++it) {
    v = A_solver.solve(space.X_free * v);
    v.normalize();
    const double r = rayleigh(v);
    if (it > 2 && std::abs(r - prev) <= 1e-12 * std::abs(r))
      break;
    prev = r;
  }
  out.alpha_bar = rayleigh(v) * (1.0 - 1e-6);
  return out;
}

} // namespace

StabilityConstants compute_stability_constants(const AffineOperatorSet &ops,
                                               const TruthSpace &space) {
  SparseMat A_sum = ops.A_free[0];
  for (int q = 1; q < ops.n_a(); ++q)
    A_sum += ops.A_free[q];

  StabilityConstants out;
  if (space.n_free() <= 2000) {
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(
        Eigen::MatrixXd(A_sum), Eigen::MatrixXd(space.X_free),
        Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
      throw EigenSolveError("stability constants: generalized eigensolve failed");
    out.alpha_bar = es.eigenvalues().minCoeff();
    out.gamma_bar = es.eigenvalues().maxCoeff();
  } else {
    out = iterative_constants(A_sum, space);
  }
  if (!(out.alpha_bar > 0.0))
    throw EigenSolveError(
        "stability constants: nonpositive coercivity reference (assembly bug?)");
  return out;
}

double coercivity_lower_bound(const EstimatorData &data,
                              const AffineOperatorSet &ops,
                              const ParameterVector &y) {
  const Eigen::VectorXd th = ops.theta_a(y);
  const double th_min = th.minCoeff();
  if (!(th_min > 0.0))
    throw std::invalid_argument(
        "coercivity_lower_bound: nonpositive material coefficient");
  return th_min * data.alpha_bar;
}

double continuity_upper_bound(const EstimatorData &data,
                              const AffineOperatorSet &ops,
                              const ParameterVector &y) {
  return ops.theta_a(y).maxCoeff() * data.gamma_bar;
}

namespace {

void eigendecompose_gram(EstimatorData &data) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(data.G);
  if (es.info() != Eigen::Success)
    throw EigenSolveError("estimator: Gram eigensolve failed");
  data.G_eval = es.eigenvalues();
  data.G_evec = es.eigenvectors();
}

Eigen::VectorXd riesz_solve(const TruthSpace &space, Eigen::VectorXd rhs) {
  space.apply_constraints(rhs);
  Eigen::VectorXd r = space.X_solver->solve(rhs);
  if (space.X_solver->info() != Eigen::Success)
    throw EigenSolveError("estimator: Riesz X-solve failed");
  return r;
}

} // namespace

EstimatorData prepare_estimator(const AffineOperatorSet &ops,
                                const TruthSpace &space,
                                const Eigen::MatrixXd &Z) {
  const int N = static_cast<int>(Z.cols());
  if (Z.rows() != 0 && Z.rows() != space.n_dof)
    throw std::invalid_argument("prepare_estimator: basis has wrong height");
  if (N > 0) {
    const Eigen::MatrixXd gram = Z.transpose() * (space.X * Z);
    const double dev =
        (gram - Eigen::MatrixXd::Identity(N, N)).cwiseAbs().maxCoeff();
    if (dev > 1e-8)
      throw std::invalid_argument(
          "prepare_estimator: basis is not X-orthonormal (deviation " +
          fmt_double(dev) + ")");
  }

  EstimatorData data;
  data.n_a_terms = ops.n_a();
  data.n_f_terms = ops.n_f();
  data.n_basis = N;

  data.R_f.resize(space.n_dof, data.n_f_terms);
  for (int q = 0; q < data.n_f_terms; ++q)
    data.R_f.col(q) = riesz_solve(space, ops.f[q]);
  data.R_a.resize(space.n_dof, N * data.n_a_terms);
  for (int n = 0; n < N; ++n)
    for (int q = 0; q < data.n_a_terms; ++q)
      data.R_a.col(n * data.n_a_terms + q) =
          riesz_solve(space, ops.A[q] * Z.col(n));

  const int dim = data.dimension();
  Eigen::MatrixXd R(space.n_dof, dim);
  R.leftCols(data.n_f_terms) = data.R_f;
  R.rightCols(N * data.n_a_terms) = data.R_a;
  data.G = R.transpose() * (space.X * R);
  data.G = 0.5 * (data.G + data.G.transpose()).eval();

  const StabilityConstants sc = compute_stability_constants(ops, space);
  data.alpha_bar = sc.alpha_bar;
  data.gamma_bar = sc.gamma_bar;
  eigendecompose_gram(data);
  return data;
}

void extend_estimator(EstimatorData &data, const AffineOperatorSet &ops,
                      const TruthSpace &space, const Eigen::VectorXd &zeta) {
  const int Qa = data.n_a_terms;
  const int old_dim = data.dimension();
  Eigen::MatrixXd R_new(space.n_dof, Qa);
  for (int q = 0; q < Qa; ++q)
    R_new.col(q) = riesz_solve(space, ops.A[q] * zeta);

  Eigen::MatrixXd R_old(space.n_dof, old_dim);
  R_old.leftCols(data.n_f_terms) = data.R_f;
  R_old.rightCols(data.n_basis * Qa) = data.R_a;

  const Eigen::MatrixXd XR_new = space.X * R_new;
  const Eigen::MatrixXd cross = R_old.transpose() * XR_new;   // old_dim x Qa
  const Eigen::MatrixXd corner = R_new.transpose() * XR_new;  // Qa x Qa

  Eigen::MatrixXd G(old_dim + Qa, old_dim + Qa);
  G.topLeftCorner(old_dim, old_dim) = data.G;
  G.topRightCorner(old_dim, Qa) = cross;
  G.bottomLeftCorner(Qa, old_dim) = cross.transpose();
  G.bottomRightCorner(Qa, Qa) = 0.5 * (corner + corner.transpose());
  data.G = std::move(G);

  data.R_a.conservativeResize(Eigen::NoChange, (data.n_basis + 1) * Qa);
  data.R_a.rightCols(Qa) = R_new;
  data.n_basis += 1;
  eigendecompose_gram(data);
}

double residual_dual_norm(const EstimatorData &data,
                          const Eigen::VectorXd &th_a,
                          const Eigen::VectorXd &th_f,
                          const Eigen::VectorXd &uN) {
  if (uN.size() != data.n_basis)
    throw std::invalid_argument("residual_dual_norm: coefficient mismatch");
  Eigen::VectorXd c(data.dimension());
  c.head(data.n_f_terms) = th_f;
  for (int n = 0; n < data.n_basis; ++n)
    for (int q = 0; q < data.n_a_terms; ++q)
      c[data.n_f_terms + n * data.n_a_terms + q] = -th_a[q] * uN[n];

  // Quadratic form through the spectral factors of G with negative
  // eigenvalues clamped: evaluating sum max(lambda,0) * (v^T c)^2 never
  // cancels, so near-zero residuals at snapshot parameters stay >= 0 and at
  // round-off scale instead of going negative.
  const Eigen::VectorXd proj = data.G_evec.transpose() * c;
  double sq = 0.0;
  for (int k = 0; k < proj.size(); ++k)
    sq += std::max(data.G_eval[k], 0.0) * proj[k] * proj[k];
  return std::sqrt(sq);
}

double residual_dual_norm(const EstimatorData &data,
                          const AffineOperatorSet &ops,
                          const ParameterVector &y,
                          const Eigen::VectorXd &uN) {
  return residual_dual_norm(data, ops.theta_a(y), ops.theta_f(y), uN);
}

double estimate(const EstimatorData &data, const Eigen::VectorXd &theta_a,
                const Eigen::VectorXd &theta_f, const Eigen::VectorXd &uN) {
  const double th_min = theta_a.minCoeff();
  if (!(th_min > 0.0))
    throw std::invalid_argument("estimate: nonpositive material coefficient");
  return residual_dual_norm(data, theta_a, theta_f, uN) /
         (th_min * data.alpha_bar);
}

double estimate(const EstimatorData &data, const AffineOperatorSet &ops,
                const ParameterVector &y, const Eigen::VectorXd &uN) {
  return estimate(data, ops.theta_a(y), ops.theta_f(y), uN);
}

double weighted_estimate(const EstimatorData &data,
                         const AffineOperatorSet &ops,
                         const ParameterVector &y, const Eigen::VectorXd &uN,
                         const WeightFunction &w) {
  return w(y) * estimate(data, ops, y, uN);
}

ReducedBasis greedy_build(const AffineOperatorSet &ops, const TruthSpace &space,
                          const TrainingSet &training, const WeightFunction &w,
                          const GreedyOptions &opts) {
  if (training.size() == 0)
    throw std::invalid_argument("greedy_build: empty training set");
  if (!(opts.eps_tol > 0.0))
    throw std::invalid_argument("greedy_build: eps_tol must be positive");
  if (opts.n_max < 1)
    throw std::invalid_argument("greedy_build: n_max must be >= 1");

  const int n_train = training.size();
  std::vector<char> alive(n_train, 1);

  int pick = 0;
  if (opts.first_pick == FirstPick::DensityMode) {
    if (opts.dist == nullptr)
      throw std::invalid_argument(
          "greedy_build: density-mode first pick needs the distribution");
    double best = -1.0;
    for (int i = 0; i < n_train; ++i) {
      const double d = opts.dist->density(training.nodes[i]);
      if (d > best) { // strict: ties keep the lowest index
        best = d;
        pick = i;
      }
    }
  }

  ReducedBasis rb;
  rb.Z.resize(space.n_dof, 0);
  rb.meta.eps_tol = opts.eps_tol;
  rb.meta.n_max = opts.n_max;
  rb.meta.training_provenance = training.provenance;
  rb.meta.training_size = n_train;
  rb.meta.status = BuildStatus::Ok;
  rb.estimator = prepare_estimator(ops, space, rb.Z);

  std::vector<double> sweep(n_train, 0.0);
  bool have_sweep = false;

  while (true) {
    // Truth solve at the pick; skip (and retire the node) if the snapshot is
    // linearly dependent on the current basis.
    const Snapshot snap = solve_truth(ops, space, training.nodes[pick]);
    const OrthoResult ortho = orthonormalize_against(space, rb.Z, snap.coeffs);
    if (ortho.post_norm < 1e-10 * ortho.pre_norm || ortho.pre_norm == 0.0) {
      alive[pick] = 0;
      int next = -1;
      double best = -1.0;
      for (int i = 0; i < n_train; ++i)
        if (alive[i] && have_sweep && sweep[i] > best) {
          best = sweep[i];
          next = i;
        }
      if (next < 0) // no sweep yet or nothing alive: first alive in order
        for (int i = 0; i < n_train; ++i)
          if (alive[i]) {
            next = i;
            break;
          }
      if (next < 0) {
        rb.meta.status = BuildStatus::TrainingExhausted;
        return rb;
      }
      pick = next;
      continue;
    }

    rb.Z.conservativeResize(Eigen::NoChange, rb.Z.cols() + 1);
    rb.Z.col(rb.Z.cols() - 1) = ortho.v;
    rb.selected_params.push_back(training.nodes[pick]);
    project_operators(ops, rb.Z, rb.A_red, rb.f_red);
    extend_estimator(rb.estimator, ops, space, ortho.v);
    const int N = rb.n_basis();

    try {
      parallel_for(n_train, [&](int i) {
        if (!alive[i]) {
          sweep[i] = -1.0;
          return;
        }
        const Eigen::VectorXd uN =
            solve_reduced_system(rb.A_red, rb.f_red, ops.theta_a(training.nodes[i]),
                                 ops.theta_f(training.nodes[i]), training.nodes[i]);
        sweep[i] =
            weighted_estimate(rb.estimator, ops, training.nodes[i], uN, w);
      });
    } catch (const SingularReducedSystem &e) {
      rb.meta.status = BuildStatus::Breakdown;
      rb.meta.breakdown_n = e.reduced_dim;
      rb.meta.breakdown_y = e.parameter;
      rb.meta.breakdown_rcond = e.rcond_estimate;
      return rb;
    }
    have_sweep = true;

    double max_est = 0.0;
    int argmax = -1;
    for (int i = 0; i < n_train; ++i)
      if (alive[i] && sweep[i] > max_est) {
        max_est = sweep[i];
        argmax = i;
      }
    rb.history.push_back({N, training.nodes[pick], max_est});

    if (max_est <= opts.eps_tol) {
      rb.meta.status = BuildStatus::Converged;
      return rb;
    }
    if (N >= opts.n_max)
      return rb;

    pick = argmax;
  }
}

} // namespace wrom
