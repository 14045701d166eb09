// Copyright (c) 2026 The wrom developers.
// SPDX-License-Identifier: Apache-2.0

#include "wrom/fem.hpp"

#include "wrom/errors.hpp"
#include "wrom/util.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace wrom {

namespace {

struct TriGeom {
  double area;
  double b[3], c[3]; // gradient of barycentric basis i is (b[i], c[i])
};

TriGeom tri_geometry(const Mesh &mesh, int t) {
  const auto &tri = mesh.triangles;
  double x[3], y[3];
  for (int i = 0; i < 3; ++i) {
    x[i] = mesh.vertices(tri(t, i), 0);
    y[i] = mesh.vertices(tri(t, i), 1);
  }
  TriGeom g;
  const double det =
      (x[1] - x[0]) * (y[2] - y[0]) - (x[2] - x[0]) * (y[1] - y[0]);
  g.area = 0.5 * det;
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3, k = (i + 2) % 3;
    g.b[i] = (y[j] - y[k]) / det;
    g.c[i] = (x[k] - x[j]) / det;
  }
  return g;
}

// 6x6 plane-strain elasticity element matrix, vertex-major DOF order
// (v0x, v0y, v1x, v1y, v2x, v2y). Exact for P1 (constant strain).
void elasticity_element(const TriGeom &g, double lam, double mu,
                        double Ke[6][6]) {
  double B[3][6] = {};
  for (int i = 0; i < 3; ++i) {
    B[0][2 * i] = g.b[i];
    B[1][2 * i + 1] = g.c[i];
    B[2][2 * i] = g.c[i];
    B[2][2 * i + 1] = g.b[i];
  }
  const double D[3][3] = {{lam + 2.0 * mu, lam, 0.0},
                          {lam, lam + 2.0 * mu, 0.0},
                          {0.0, 0.0, mu}};
  for (int a = 0; a < 6; ++a)
    for (int b = 0; b < 6; ++b) {
      double s = 0.0;
      for (int r = 0; r < 3; ++r)
        for (int q = 0; q < 3; ++q)
          s += B[r][a] * D[r][q] * B[q][b];
      Ke[a][b] = g.area * s;
    }
}

Mesh build_mesh(int n_sub) {
  Mesh mesh;
  mesh.n_sub = n_sub;
  const int n = n_sub;
  const int nv = (n + 1) * (n + 1);
  mesh.vertices.resize(nv, 2);
  const double h = 1.0 / n;
  auto vid = [n](int i, int j) { return j * (n + 1) + i; };
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) {
      mesh.vertices(vid(i, j), 0) = i * h;
      mesh.vertices(vid(i, j), 1) = j * h;
    }

  mesh.triangles.resize(2 * n * n, 3);
  mesh.subdomain_id.resize(2 * n * n);
  int t = 0;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const int a = vid(i, j), b = vid(i + 1, j);
      const int c = vid(i + 1, j + 1), d = vid(i, j + 1);
      // Alternate the split diagonal so mesh anisotropy cancels pairwise.
      if ((i + j) % 2 == 0) {
        mesh.triangles.row(t) << a, b, c;
        mesh.triangles.row(t + 1) << a, c, d;
      } else {
        mesh.triangles.row(t) << a, b, d;
        mesh.triangles.row(t + 1) << b, c, d;
      }
      const int quad = 1 + (i < n / 2 ? 0 : 1) + (j < n / 2 ? 0 : 2);
      mesh.subdomain_id[t] = quad;
      mesh.subdomain_id[t + 1] = quad;
      t += 2;
    }

  for (int i = 0; i < n; ++i) {
    mesh.boundary_edges.push_back({vid(i, 0), vid(i + 1, 0), EdgeTag::Bottom});
    mesh.boundary_edges.push_back({vid(i, n), vid(i + 1, n), EdgeTag::Top});
  }
  for (int j = 0; j < n; ++j) {
    const EdgeTag tag =
        (j + 1 <= n / 2) ? EdgeTag::RightLower : EdgeTag::RightUpper;
    mesh.boundary_edges.push_back({vid(n, j), vid(n, j + 1), tag});
  }
  return mesh;
}

} // namespace

void TruthSpace::apply_constraints(Eigen::VectorXd &v) const {
  for (int d : dirichlet_set)
    v[d] = 0.0;
}

Eigen::VectorXd TruthSpace::restrict_free(const Eigen::VectorXd &full) const {
  Eigen::VectorXd out(n_free());
  for (int i = 0; i < n_free(); ++i)
    out[i] = full[free_dofs[i]];
  return out;
}

Eigen::VectorXd TruthSpace::prolong_free(const Eigen::VectorXd &free) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n_dof);
  for (int i = 0; i < n_free(); ++i)
    out[free_dofs[i]] = free[i];
  return out;
}

SparseMat restrict_matrix(const SparseMat &A, const std::vector<int> &keep) {
  std::vector<int> global_to_local(A.rows(), -1);
  for (std::size_t i = 0; i < keep.size(); ++i)
    global_to_local[keep[i]] = static_cast<int>(i);
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(A.nonZeros());
  for (int k = 0; k < A.outerSize(); ++k)
    for (SparseMat::InnerIterator it(A, k); it; ++it) {
      const int r = global_to_local[it.row()];
      const int c = global_to_local[it.col()];
      if (r >= 0 && c >= 0)
        trips.emplace_back(r, c, it.value());
    }
  SparseMat out(static_cast<int>(keep.size()), static_cast<int>(keep.size()));
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

TruthSpace build_truth_space(int n_sub, InnerProduct ip) {
  if (n_sub < 2 || n_sub % 2 != 0)
    throw std::invalid_argument(
        "build_truth_space: n_sub must be even and >= 2 so subdomain and "
        "traction boundaries align with mesh lines");

  TruthSpace space;
  space.mesh = build_mesh(n_sub);
  const Mesh &mesh = space.mesh;
  space.n_dof = 2 * mesh.n_vertices();
  space.is_dirichlet.assign(space.n_dof, 0);
  for (int v = 0; v < mesh.n_vertices(); ++v) {
    const double x2 = mesh.vertices(v, 1);
    if (x2 == 0.0 || x2 == 1.0) {
      space.is_dirichlet[2 * v] = 1;
      space.is_dirichlet[2 * v + 1] = 1;
    }
  }
  for (int d = 0; d < space.n_dof; ++d)
    (space.is_dirichlet[d] ? space.dirichlet_set : space.free_dofs).push_back(d);

  std::vector<Eigen::Triplet<double>> trips;
  const double lam0 = lame_lambda(1.0, 0.3), mu0 = lame_mu(1.0, 0.3);
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const TriGeom g = tri_geometry(mesh, t);
    int dof[6];
    for (int i = 0; i < 3; ++i) {
      dof[2 * i] = 2 * mesh.triangles(t, i);
      dof[2 * i + 1] = 2 * mesh.triangles(t, i) + 1;
    }
    double Ke[6][6];
    if (ip == InnerProduct::Energy) {
      elasticity_element(g, lam0, mu0, Ke);
    } else {
      // Componentwise H1 Gram: P1 mass plus gradient stiffness.
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          const double m = g.area / 12.0 * (i == j ? 2.0 : 1.0);
          const double s = g.area * (g.b[i] * g.b[j] + g.c[i] * g.c[j]);
          Ke[2 * i][2 * j] = m + s;
          Ke[2 * i + 1][2 * j + 1] = m + s;
          Ke[2 * i][2 * j + 1] = 0.0;
          Ke[2 * i + 1][2 * j] = 0.0;
        }
    }
    for (int a = 0; a < 6; ++a)
      for (int b = 0; b < 6; ++b)
        if (!space.is_dirichlet[dof[a]] && !space.is_dirichlet[dof[b]])
          trips.emplace_back(dof[a], dof[b], Ke[a][b]);
  }
  for (int d : space.dirichlet_set)
    trips.emplace_back(d, d, 1.0);

  space.X.resize(space.n_dof, space.n_dof);
  space.X.setFromTriplets(trips.begin(), trips.end());
  space.X_free = restrict_matrix(space.X, space.free_dofs);
  space.X_solver =
      std::make_shared<Eigen::SimplicialLDLT<SparseMat>>(space.X);
  if (space.X_solver->info() != Eigen::Success)
    throw EigenSolveError("build_truth_space: inner-product factorization failed");
  return space;
}

AffineOperatorSet assemble_affine(const TruthSpace &space, double lam,
                                  double mu) {
  const Mesh &mesh = space.mesh;
  AffineOperatorSet ops;
  ops.lam = lam;
  ops.mu = mu;

  std::vector<std::vector<Eigen::Triplet<double>>> trips(4);
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const TriGeom g = tri_geometry(mesh, t);
    double Ke[6][6];
    elasticity_element(g, lam, mu, Ke);
    int dof[6];
    for (int i = 0; i < 3; ++i) {
      dof[2 * i] = 2 * mesh.triangles(t, i);
      dof[2 * i + 1] = 2 * mesh.triangles(t, i) + 1;
    }
    auto &dst = trips[mesh.subdomain_id[t] - 1];
    for (int a = 0; a < 6; ++a)
      for (int b = 0; b < 6; ++b)
        dst.emplace_back(dof[a], dof[b], Ke[a][b]);
  }
  ops.A.resize(4);
  for (int q = 0; q < 4; ++q) {
    ops.A[q].resize(space.n_dof, space.n_dof);
    ops.A[q].setFromTriplets(trips[q].begin(), trips[q].end());
  }

  // Traction loads: integral of the second test component over the two
  // right-edge segments; each straight P1 edge contributes h/2 per endpoint.
  ops.f.assign(2, Eigen::VectorXd::Zero(space.n_dof));
  for (const BoundaryEdge &e : mesh.boundary_edges) {
    if (e.tag != EdgeTag::RightLower && e.tag != EdgeTag::RightUpper)
      continue;
    const int q = (e.tag == EdgeTag::RightLower) ? 0 : 1;
    const double len = std::abs(mesh.vertices(e.v1, 1) - mesh.vertices(e.v0, 1));
    ops.f[q][2 * e.v0 + 1] += 0.5 * len;
    ops.f[q][2 * e.v1 + 1] += 0.5 * len;
  }

  ops.A_free.resize(4);
  for (int q = 0; q < 4; ++q)
    ops.A_free[q] = restrict_matrix(ops.A[q], space.free_dofs);
  ops.f_free.resize(2);
  for (int q = 0; q < 2; ++q)
    ops.f_free[q] = space.restrict_free(ops.f[q]);

  ops.theta_a = [](const ParameterVector &y) -> Eigen::VectorXd {
    if (y.size() != 6)
      throw std::invalid_argument("theta_a: parameter must have 6 components");
    return y.head(4);
  };
  ops.theta_f = [](const ParameterVector &y) -> Eigen::VectorXd {
    if (y.size() != 6)
      throw std::invalid_argument("theta_f: parameter must have 6 components");
    return y.tail(2);
  };
  return ops;
}

Snapshot solve_truth(const AffineOperatorSet &ops, const TruthSpace &space,
                     const ParameterVector &y) {
  const Eigen::VectorXd th_a = ops.theta_a(y);
  const Eigen::VectorXd th_f = ops.theta_f(y);
  for (int q = 0; q < th_a.size(); ++q)
    if (!(th_a[q] > 0.0))
      throw std::invalid_argument(
          "solve_truth: material coefficient " + std::to_string(q + 1) +
          " is not strictly positive");

  SparseMat A_ff = th_a[0] * ops.A_free[0];
  for (int q = 1; q < ops.n_a(); ++q)
    A_ff += th_a[q] * ops.A_free[q];
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(space.n_free());
  for (int q = 0; q < ops.n_f(); ++q)
    rhs += th_f[q] * ops.f_free[q];

  Eigen::SimplicialLDLT<SparseMat> solver(A_ff);
  if (solver.info() != Eigen::Success)
    throw TruthSolveError("solve_truth: factorization failed", y);
  const Eigen::VectorXd u_free = solver.solve(rhs);
  const double res = (A_ff * u_free - rhs).norm();
  if (res > 1e-10 * rhs.norm())
    throw TruthSolveError("solve_truth: residual " + fmt_double(res) +
                              " exceeds tolerance",
                          y);

  Snapshot snap;
  snap.coeffs = space.prolong_free(u_free);
  snap.y = y;
  return snap;
}

double v_inner(const TruthSpace &space, const Eigen::VectorXd &u,
               const Eigen::VectorXd &v) {
  if (u.size() != space.n_dof || v.size() != space.n_dof)
    throw std::invalid_argument("v_inner: coefficient length mismatch");
  return u.dot(space.X * v);
}

double v_norm(const TruthSpace &space, const Eigen::VectorXd &u) {
  return std::sqrt(std::max(0.0, v_inner(space, u, u)));
}

double evaluate_output(const AffineOperatorSet &ops, const ParameterVector &y,
                       const Eigen::VectorXd &u) {
  const Eigen::VectorXd th_f = ops.theta_f(y);
  double s = 0.0;
  for (int q = 0; q < ops.n_f(); ++q)
    s += th_f[q] * ops.f[q].dot(u);
  return s;
}

Eigen::VectorXd
assemble_body_load(const TruthSpace &space,
                   const std::function<Eigen::Vector2d(double, double)> &b) {
  const Mesh &mesh = space.mesh;
  Eigen::VectorXd load = Eigen::VectorXd::Zero(space.n_dof);
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const TriGeom g = tri_geometry(mesh, t);
    double x[3], y[3];
    for (int i = 0; i < 3; ++i) {
      x[i] = mesh.vertices(mesh.triangles(t, i), 0);
      y[i] = mesh.vertices(mesh.triangles(t, i), 1);
    }
    // Edge-midpoint rule, exact to degree 2; phi_i is 1/2 on its two
    // adjacent edge midpoints and 0 on the opposite one.
    for (int i = 0; i < 3; ++i) {
      const int j = (i + 1) % 3;
      const Eigen::Vector2d bm =
          b(0.5 * (x[i] + x[j]), 0.5 * (y[i] + y[j]));
      for (int v : {i, j})
        for (int c = 0; c < 2; ++c)
          load[2 * mesh.triangles(t, v) + c] += g.area / 3.0 * 0.5 * bm[c];
    }
  }
  return load;
}

void write_matrix_market(const std::string &path, const SparseMat &A) {
  std::ofstream f(path);
  if (!f)
    throw std::runtime_error("write_matrix_market: cannot open " + path);
  f << "%%MatrixMarket matrix coordinate real general\n";
  f << A.rows() << " " << A.cols() << " " << A.nonZeros() << "\n";
  for (int k = 0; k < A.outerSize(); ++k)
    for (SparseMat::InnerIterator it(A, k); it; ++it)
      f << it.row() + 1 << " " << it.col() + 1 << " " << fmt_double(it.value())
        << "\n";
}

void write_matrix_market(const std::string &path, const Eigen::VectorXd &v) {
  std::ofstream f(path);
  if (!f)
    throw std::runtime_error("write_matrix_market: cannot open " + path);
  f << "%%MatrixMarket matrix array real general\n";
  f << v.size() << " 1\n";
  for (int i = 0; i < v.size(); ++i)
    f << fmt_double(v[i]) << "\n";
}

} // namespace wrom
