// Copyright (c) 2026 The wrom developers.
// SPDX-License-Identifier: Apache-2.0

#include "wrom/pod.hpp"

#include "wrom/errors.hpp"
#include "wrom/greedy.hpp"
#include "wrom/util.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

namespace wrom {

Eigen::MatrixXd correlation_matrix(const TruthSpace &space,
                                   const Eigen::MatrixXd &Phi) {
  if (Phi.rows() != space.n_dof)
    throw std::invalid_argument("correlation_matrix: snapshot height mismatch");
  Eigen::MatrixXd C = Phi.transpose() * (space.X * Phi);
  return 0.5 * (C + C.transpose());
}

namespace {

void sort_descending(Eigen::VectorXd &vals, Eigen::MatrixXd &vecs) {
  std::vector<int> order(vals.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return vals[a] > vals[b]; });
  Eigen::VectorXd v2(vals.size());
  Eigen::MatrixXd m2(vecs.rows(), vecs.cols());
  for (int k = 0; k < vals.size(); ++k) {
    v2[k] = vals[order[k]];
    m2.col(k) = vecs.col(order[k]);
  }
  vals = std::move(v2);
  vecs = std::move(m2);
}

Eigen::VectorXd retained_energy_curve(const Eigen::VectorXd &vals) {
  const int n = static_cast<int>(vals.size());
  double total = 0.0;
  for (int k = 0; k < n; ++k)
    total += std::abs(vals[k]);
  Eigen::VectorXd E = Eigen::VectorXd::Zero(n);
  if (total <= 0.0)
    return E;
  double cum = 0.0;
  for (int k = 0; k < n; ++k) {
    cum += std::max(vals[k], 0.0);
    E[k] = cum / total;
  }
  return E;
}

} // namespace

PodSpectrum weighted_eig(const Eigen::MatrixXd &C,
                         const std::vector<double> &weights) {
  const int n = static_cast<int>(C.rows());
  if (C.cols() != n)
    throw std::invalid_argument("weighted_eig: matrix must be square");
  if (static_cast<int>(weights.size()) != n)
    throw std::invalid_argument("weighted_eig: one weight per snapshot");
  bool any_negative = false, any_nonzero = false;
  for (double w : weights) {
    if (!std::isfinite(w))
      throw std::invalid_argument("weighted_eig: weights must be finite");
    any_negative |= (w < 0.0);
    any_nonzero |= (w != 0.0);
  }
  if (!any_nonzero)
    throw std::invalid_argument("weighted_eig: all weights are zero");

  PodSpectrum spec;
  if (!any_negative) {
    // W^(1/2) C W^(1/2) is symmetric and similar to WC on the subspace of
    // nonzero weights; zero-weight snapshots contribute null directions.
    Eigen::VectorXd sqw(n);
    for (int i = 0; i < n; ++i)
      sqw[i] = std::sqrt(weights[i]);
    const Eigen::MatrixXd S = sqw.asDiagonal() * C * sqw.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
    if (es.info() != Eigen::Success)
      throw EigenSolveError("weighted_eig: symmetric eigensolve failed");
    spec.eigenvalues = es.eigenvalues().cwiseMax(0.0); // PSD up to round-off
    spec.eigenvectors.resize(n, n);
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        spec.eigenvectors(i, k) =
            sqw[i] > 0.0 ? es.eigenvectors()(i, k) / sqw[i] : 0.0;
  } else {
    // Sign-indefinite weights: diagonalize WC in the scalar product induced
    // by C, i.e. solve C W C psi = lambda C psi on range(C) through the
    // spectral factorization C = U L U^T.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ec(C);
    if (ec.info() != Eigen::Success)
      throw EigenSolveError("weighted_eig: correlation eigensolve failed");
    const double lmax = ec.eigenvalues().cwiseAbs().maxCoeff();
    std::vector<int> keep;
    for (int i = 0; i < n; ++i)
      if (ec.eigenvalues()[i] > 1e-12 * lmax)
        keep.push_back(i);
    const int r = static_cast<int>(keep.size());
    if (r == 0)
      throw std::invalid_argument("weighted_eig: zero correlation matrix");
    Eigen::MatrixXd U(n, r);
    Eigen::VectorXd L(r);
    for (int j = 0; j < r; ++j) {
      U.col(j) = ec.eigenvectors().col(keep[j]);
      L[j] = ec.eigenvalues()[keep[j]];
    }
    const Eigen::VectorXd Lh = L.cwiseSqrt();
    Eigen::MatrixXd WU(n, r); // row-scaled W * U
    for (int i = 0; i < n; ++i)
      WU.row(i) = weights[i] * U.row(i);
    const Eigen::MatrixXd M =
        Lh.asDiagonal() * (U.transpose() * WU) * Lh.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> em(
        0.5 * (M + M.transpose()));
    if (em.info() != Eigen::Success)
      throw EigenSolveError("weighted_eig: reduced eigensolve failed");
    spec.eigenvalues = em.eigenvalues();
    spec.eigenvectors = U * Lh.cwiseInverse().asDiagonal() * em.eigenvectors();
  }
  sort_descending(spec.eigenvalues, spec.eigenvectors);
  spec.retained_energy = retained_energy_curve(spec.eigenvalues);
  return spec;
}

ReducedBasis pod_build(const AffineOperatorSet &ops, const TruthSpace &space,
                       const TrainingSet &training, const PodOptions &opts) {
  if (training.size() == 0)
    throw std::invalid_argument("pod_build: empty training set");
  if (!(opts.eps_tol > 0.0))
    throw std::invalid_argument(
        "pod_build: eps_tol must be positive (E_N > 1 is unsatisfiable)");
  if (opts.n_max < 1)
    throw std::invalid_argument("pod_build: n_max must be >= 1");

  const int n_t = training.size();
  Eigen::MatrixXd Phi(space.n_dof, n_t);
  parallel_for(n_t, [&](int i) {
    Phi.col(i) = solve_truth(ops, space, training.nodes[i]).coeffs;
  });

  ReducedBasis rb;
  rb.meta.eps_tol = opts.eps_tol;
  rb.meta.n_max = opts.n_max;
  rb.meta.training_provenance = training.provenance;
  rb.meta.training_size = n_t;

  const Eigen::MatrixXd C = correlation_matrix(space, Phi);
  if (C.cwiseAbs().maxCoeff() == 0.0) {
    std::fprintf(stderr,
                 "pod_build: all snapshots have zero energy; empty basis\n");
    rb.Z.resize(space.n_dof, 0);
    rb.meta.status = BuildStatus::ZeroEnergy;
    project_operators(ops, rb.Z, rb.A_red, rb.f_red);
    return rb;
  }
  rb.spectrum = weighted_eig(C, training.weights);

  int n_positive = 0;
  for (int k = 0; k < rb.spectrum.n_modes(); ++k)
    if (rb.spectrum.eigenvalues[k] > 0.0)
      ++n_positive;
  int N = std::min(opts.n_max, n_positive);
  for (int k = 1; k <= std::min(opts.n_max, n_positive); ++k)
    if (rb.spectrum.retained_energy[k - 1] > 1.0 - opts.eps_tol) {
      N = k;
      break;
    }

  Eigen::MatrixXd modes(space.n_dof, N);
  for (int k = 0; k < N; ++k)
    modes.col(k) = Phi * rb.spectrum.eigenvectors.col(k);
  rb.Z = orthonormalize_columns(space, modes);
  project_operators(ops, rb.Z, rb.A_red, rb.f_red);
  rb.meta.status = BuildStatus::Ok;
  if (opts.with_estimator)
    rb.estimator = prepare_estimator(ops, space, rb.Z);
  return rb;
}

} // namespace wrom
