// Copyright (c) 2026 The wrom developers.
// SPDX-License-Identifier: Apache-2.0
//
// Weighted POD offline stage: snapshot correlation matrix in the X inner
// product, eigendecomposition of the weighted matrix W*C, retained-energy
// truncation, and basis assembly.

#ifndef WROM_POD_HPP
#define WROM_POD_HPP

#include "wrom/quadrature.hpp"
#include "wrom/reduced_basis.hpp"

namespace wrom {

/// Symmetric n_t x n_t Gram matrix C_ij = <phi_i, phi_j>_V of the snapshot
/// columns of Phi.
Eigen::MatrixXd correlation_matrix(const TruthSpace &space,
                                   const Eigen::MatrixXd &Phi);

/// Spectrum of W*C. Nonnegative weights go through the similar symmetric
/// matrix W^(1/2) C W^(1/2); sign-indefinite weights (sparse rules) through
/// the generalized problem C W C psi = lambda C psi restricted to range(C),
/// i.e. the diagonalization in the scalar product induced by C. Eigenvalues
/// are returned in descending order; with indefinite weights negative ones
/// are kept in the spectrum but only positive modes enter the retained
/// energy, whose denominator uses |lambda|.
PodSpectrum weighted_eig(const Eigen::MatrixXd &C,
                         const std::vector<double> &weights);

struct PodOptions {
  double eps_tol = 1e-8; // truncation: smallest N with E_N > 1 - eps_tol
  int n_max = 20;
  bool with_estimator = false; // also build residual-estimator blocks
};

/// Full POD pipeline: truth solves at every training node (parallel),
/// weighted spectrum, retained-energy truncation, mode assembly
/// xi_k = sum_j psi_k[j] * phi_j, X-orthonormalization, operator projection.
/// eps_tol must be positive (E_N > 1 is unsatisfiable). All-zero snapshots
/// produce an empty basis with status ZeroEnergy.
ReducedBasis pod_build(const AffineOperatorSet &ops, const TruthSpace &space,
                       const TrainingSet &training, const PodOptions &opts);

} // namespace wrom

#endif
