// Copyright (c) 2026 The wrom developers.
// SPDX-License-Identifier: Apache-2.0
//
// P1 finite-element kernel for 2D vector linear elasticity on the unit
// square: structured criss-cross mesh with four quadrant subdomains, the
// affine operator decomposition A(y) = sum_q y^q A_q driven by per-subdomain
// Lame coefficients, traction loads on the two right-edge segments, and a
// sparse direct truth solver.

#ifndef WROM_FEM_HPP
#define WROM_FEM_HPP

#include "wrom/param_space.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace wrom {

using SparseMat = Eigen::SparseMatrix<double>;

enum class EdgeTag { Bottom, Top, RightLower, RightUpper };

struct BoundaryEdge {
  int v0 = 0, v1 = 0;
  EdgeTag tag = EdgeTag::Bottom;
};

/// Structured triangulation of [0,1]^2: n_sub x n_sub cells, each split in
/// two along alternating diagonals, quadrant subdomain ids 1..4 (1 lower
/// left, 2 lower right, 3 upper left, 4 upper right). n_sub must be even so
/// that subdomain interfaces and the right-edge traction split x2 = 1/2 fall
/// on mesh lines.
struct Mesh {
  int n_sub = 0;
  Eigen::Matrix<double, Eigen::Dynamic, 2> vertices;
  Eigen::Matrix<int, Eigen::Dynamic, 3> triangles; // CCW vertex triples
  std::vector<int> subdomain_id;                   // per triangle, 1..4
  std::vector<BoundaryEdge> boundary_edges;

  int n_vertices() const { return static_cast<int>(vertices.rows()); }
  int n_triangles() const { return static_cast<int>(triangles.rows()); }
};

enum class InnerProduct { H1, Energy };

/// Discrete displacement space with homogeneous Dirichlet conditions on the
/// bottom and top edges (both components clamped). DOF 2v is the first and
/// 2v+1 the second displacement component of vertex v. X realizes the V
/// inner product on the constrained space; clamped rows and columns are
/// replaced by identity so X factors as SPD and Riesz solves preserve zeros
/// on clamped DOFs.
struct TruthSpace {
  Mesh mesh;
  int n_dof = 0;
  std::vector<int> dirichlet_set; // sorted clamped DOF indices
  std::vector<char> is_dirichlet; // mask over all DOFs
  std::vector<int> free_dofs;     // ascending complement of dirichlet_set
  SparseMat X;                    // full-size, identity on clamped DOFs
  SparseMat X_free;               // restriction to free DOFs
  std::shared_ptr<Eigen::SimplicialLDLT<SparseMat>> X_solver;

  int n_free() const { return static_cast<int>(free_dofs.size()); }
  /// Zero the clamped entries of a full-length vector in place.
  void apply_constraints(Eigen::VectorXd &v) const;
  /// Gather free entries / scatter back with zeros on clamped DOFs.
  Eigen::VectorXd restrict_free(const Eigen::VectorXd &full) const;
  Eigen::VectorXd prolong_free(const Eigen::VectorXd &free) const;
};

/// Affine decomposition A(y) = sum_q theta_a(y)_q A_q,
/// f(y) = sum_q theta_f(y)_q f_q. Matrices and load vectors are stored raw
/// (no constraints applied) together with their free-DOF restrictions used
/// by the solver. For the elasticity benchmark theta_a(y) = (y1..y4) and
/// theta_f(y) = (y5,y6).
struct AffineOperatorSet {
  std::vector<SparseMat> A;
  std::vector<Eigen::VectorXd> f;
  std::vector<SparseMat> A_free;
  std::vector<Eigen::VectorXd> f_free;
  std::function<Eigen::VectorXd(const ParameterVector &)> theta_a;
  std::function<Eigen::VectorXd(const ParameterVector &)> theta_f;
  double lam = 0.0, mu = 0.0;

  int n_a() const { return static_cast<int>(A.size()); }
  int n_f() const { return static_cast<int>(f.size()); }
};

struct Snapshot {
  Eigen::VectorXd coeffs; // full-length, exact zeros on clamped DOFs
  ParameterVector y;
};

/// Build the mesh, Dirichlet set, and inner-product matrix. Rejects odd or
/// < 2 subdivision counts. The H1 inner product is mass plus full gradient;
/// the energy alternative uses the elasticity form at unit coefficients with
/// E = 1, nu = 0.3.
TruthSpace build_truth_space(int n_sub, InnerProduct ip = InnerProduct::H1);

/// Assemble the four per-subdomain stiffness blocks (exact one-point P1
/// quadrature) and the two traction load vectors integrating the second
/// test-function component over the lower and upper right-edge segments.
AffineOperatorSet assemble_affine(const TruthSpace &space, double lam,
                                  double mu);

/// Plane-strain Lame constants for Young modulus E and Poisson ratio nu.
inline double lame_lambda(double E, double nu) {
  return E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
}
inline double lame_mu(double E, double nu) { return E / (2.0 * (1.0 + nu)); }

/// Sparse SPD solve of the constrained system at parameter y. Throws
/// std::invalid_argument for non-positive material components and
/// TruthSolveError (with y attached) on factorization breakdown or a
/// residual above 1e-10 * ||f(y)||.
Snapshot solve_truth(const AffineOperatorSet &ops, const TruthSpace &space,
                     const ParameterVector &y);

double v_inner(const TruthSpace &space, const Eigen::VectorXd &u,
               const Eigen::VectorXd &v);
double v_norm(const TruthSpace &space, const Eigen::VectorXd &u);

/// Compliance output s(u; y) = f(y)^T u.
double evaluate_output(const AffineOperatorSet &ops, const ParameterVector &y,
                       const Eigen::VectorXd &u);

/// Load vector of a body force: f_i = integral b(x) . phi_i, assembled with
/// the degree-2 edge-midpoint rule. Used by convergence studies.
Eigen::VectorXd
assemble_body_load(const TruthSpace &space,
                   const std::function<Eigen::Vector2d(double, double)> &b);

/// Restrict a symmetric sparse matrix to a subset of row/column indices.
SparseMat restrict_matrix(const SparseMat &A, const std::vector<int> &keep);

/// Debug export in matrix-market coordinate format.
void write_matrix_market(const std::string &path, const SparseMat &A);
void write_matrix_market(const std::string &path, const Eigen::VectorXd &v);

} // namespace wrom

#endif
