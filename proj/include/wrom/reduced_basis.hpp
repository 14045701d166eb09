// Copyright (c) 2026 The wrom developers.
// SPDX-License-Identifier: Apache-2.0
//
// Shared reduced-basis container produced by the greedy and POD offline
// stages: X-orthonormal basis, reduced affine operators, residual-estimator
// Gram blocks, build history, and a versioned binary archive format.

#ifndef WROM_REDUCED_BASIS_HPP
#define WROM_REDUCED_BASIS_HPP

#include "wrom/fem.hpp"
#include "wrom/param_space.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace wrom {

/// Residual-estimator data: Riesz-representer Gram blocks arranged as one
/// symmetric matrix G over the coefficient vector c = [theta_f ; c_a] with
/// c_a[n*Qa+q] = -theta_a_q * uN_n (basis-major ordering, so truncating the
/// basis to a column prefix truncates G to a leading block). The residual
/// dual norm is evaluated through the eigendecomposition of G with negative
/// eigenvalues clamped at zero, which keeps the quadratic form nonnegative
/// where naive block summation cancels catastrophically.
struct EstimatorData {
  int n_a_terms = 0;
  int n_f_terms = 0;
  int n_basis = 0;
  Eigen::MatrixXd G; // (Qf + N*Qa) x (Qf + N*Qa)
  Eigen::VectorXd G_eval;
  Eigen::MatrixXd G_evec;
  double alpha_bar = 0.0; // smallest generalized eigenvalue of (sum A_q, X)
  double gamma_bar = 0.0; // largest, for effectivity logging

  // Riesz representers (X-solves), kept only in memory to extend G
  // incrementally; not serialized. Column order matches G.
  Eigen::MatrixXd R_f; // n_dof x Qf
  Eigen::MatrixXd R_a; // n_dof x (N*Qa)

  bool empty() const { return G.rows() == 0; }
  int dimension() const { return n_f_terms + n_basis * n_a_terms; }
};

struct GreedyHistoryEntry {
  int iteration = 0;
  ParameterVector chosen_y;
  double max_weighted_estimator = 0.0;
};

struct PodSpectrum {
  Eigen::VectorXd eigenvalues;    // descending
  Eigen::MatrixXd eigenvectors;   // n_t x n_modes, column k for eigenvalue k
  Eigen::VectorXd retained_energy; // E_N for N = 1..n_modes

  int n_modes() const { return static_cast<int>(eigenvalues.size()); }
};

enum class BuildStatus { Ok, Converged, TrainingExhausted, Breakdown, ZeroEnergy };

std::string to_string(BuildStatus s);

struct BuildMetadata {
  std::string method;
  std::string weight_tag;
  std::string training_provenance;
  int training_size = 0;
  std::uint64_t training_seed = 0;
  double eps_tol = 0.0;
  int n_max = 0;
  int n_sub = 0;
  double alpha = 1.0, beta = 1.0; // Beta shapes of the distribution
  BuildStatus status = BuildStatus::Ok;
  int breakdown_n = -1;
  ParameterVector breakdown_y;
  double breakdown_rcond = 0.0;
};

struct ReducedBasis {
  Eigen::MatrixXd Z; // n_dof x N, X-orthonormal columns
  std::vector<ParameterVector> selected_params;
  std::vector<Eigen::MatrixXd> A_red; // Qa dense N x N blocks
  std::vector<Eigen::VectorXd> f_red; // Qf dense length-N blocks
  EstimatorData estimator;            // may be empty (POD builds)
  std::vector<GreedyHistoryEntry> history;
  PodSpectrum spectrum; // filled by POD builds
  BuildMetadata meta;

  int n_basis() const { return static_cast<int>(Z.cols()); }
  /// Nested sub-basis of the first n columns (reduced operators, estimator
  /// blocks, and selected parameters truncated consistently).
  ReducedBasis prefix(int n) const;
};

/// Modified Gram-Schmidt step against the columns of Z in the X inner
/// product, with one reorthogonalization pass. Returns the orthonormalized
/// vector together with its norms before and after projection; callers treat
/// post_norm < 1e-10 * pre_norm as linear dependence.
struct OrthoResult {
  Eigen::VectorXd v;
  double pre_norm = 0.0;
  double post_norm = 0.0;
};
OrthoResult orthonormalize_against(const TruthSpace &space,
                                   const Eigen::MatrixXd &Z,
                                   const Eigen::VectorXd &candidate);

/// X-orthonormalize the columns of M left to right, dropping dependent ones.
Eigen::MatrixXd orthonormalize_columns(const TruthSpace &space,
                                       const Eigen::MatrixXd &M);

/// Galerkin-project the affine operators onto the columns of Z.
void project_operators(const AffineOperatorSet &ops, const Eigen::MatrixXd &Z,
                       std::vector<Eigen::MatrixXd> &A_red,
                       std::vector<Eigen::VectorXd> &f_red);

/// Binary archive with magic header and version byte; Riesz representers are
/// not stored (Gram blocks suffice for online estimation).
void write_archive(const std::string &path, const ReducedBasis &rb);
ReducedBasis read_archive(const std::string &path);

/// CSV sidecars: greedy history (iteration, chosen y, max weighted
/// estimator) and POD spectrum (k, lambda_k, E_k).
void write_history_csv(const std::string &path, const ReducedBasis &rb);
void write_spectrum_csv(const std::string &path, const PodSpectrum &spectrum);

} // namespace wrom

#endif
