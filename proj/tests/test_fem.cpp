// Copyright (c) 2026 The wrom developers.
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "wrom/fem.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <vector>

using wrom::AffineOperatorSet;
using wrom::ParameterVector;
using wrom::TruthSpace;

namespace {

// Independent P1 elasticity element stiffness: shape-function gradients from
// the 3x3 Vandermonde solve, strain-displacement matrix, exact one-point
// integration. Deliberately shares no code with the library assembly.
Eigen::Matrix<double, 6, 6> oracle_element(const Eigen::Vector2d &p0,
                                           const Eigen::Vector2d &p1,
                                           const Eigen::Vector2d &p2,
                                           double lam, double mu) {
  Eigen::Matrix3d V;
  V << 1, p0.x(), p0.y(), 1, p1.x(), p1.y(), 1, p2.x(), p2.y();
  const Eigen::Matrix3d C = V.inverse(); // column i: coeffs of phi_i
  const double area =
      0.5 * std::abs((p1.x() - p0.x()) * (p2.y() - p0.y()) -
                     (p2.x() - p0.x()) * (p1.y() - p0.y()));
  Eigen::Matrix<double, 3, 6> B = Eigen::Matrix<double, 3, 6>::Zero();
  for (int i = 0; i < 3; ++i) {
    const double dx = C(1, i), dy = C(2, i);
    B(0, 2 * i) = dx;
    B(1, 2 * i + 1) = dy;
    B(2, 2 * i) = dy;
    B(2, 2 * i + 1) = dx;
  }
  Eigen::Matrix3d D = Eigen::Matrix3d::Zero();
  D(0, 0) = D(1, 1) = lam + 2.0 * mu;
  D(0, 1) = D(1, 0) = lam;
  D(2, 2) = mu;
  return area * B.transpose() * D * B;
}

Eigen::Vector2d vertex(const TruthSpace &space, int v) {
  return {space.mesh.vertices(v, 0), space.mesh.vertices(v, 1)};
}

Eigen::MatrixXd oracle_global(const TruthSpace &space, double lam, double mu,
                              const Eigen::Vector4d &coeff) {
  const auto &mesh = space.mesh;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(space.n_dof, space.n_dof);
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const int a = mesh.triangles(t, 0), b = mesh.triangles(t, 1),
              c = mesh.triangles(t, 2);
    const Eigen::Matrix<double, 6, 6> Ke =
        oracle_element(vertex(space, a), vertex(space, b), vertex(space, c),
                       lam, mu) *
        coeff[mesh.subdomain_id[static_cast<size_t>(t)] - 1];
    const int dofs[6] = {2 * a, 2 * a + 1, 2 * b, 2 * b + 1, 2 * c, 2 * c + 1};
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j)
        A(dofs[i], dofs[j]) += Ke(i, j);
  }
  return A;
}

// L2 norm of a P1 coefficient field via the exact element mass matrix.
double l2_norm(const TruthSpace &space, const Eigen::VectorXd &u) {
  const auto &mesh = space.mesh;
  Eigen::Matrix3d M;
  M << 2, 1, 1, 1, 2, 1, 1, 1, 2;
  double acc = 0.0;
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const int v[3] = {mesh.triangles(t, 0), mesh.triangles(t, 1),
                      mesh.triangles(t, 2)};
    const Eigen::Vector2d p0 = vertex(space, v[0]), p1 = vertex(space, v[1]),
                          p2 = vertex(space, v[2]);
    const double area = 0.5 * std::abs((p1.x() - p0.x()) * (p2.y() - p0.y()) -
                                       (p2.x() - p0.x()) * (p1.y() - p0.y()));
    for (int comp = 0; comp < 2; ++comp) {
      Eigen::Vector3d e;
      for (int i = 0; i < 3; ++i)
        e[i] = u[2 * v[i] + comp];
      acc += area / 12.0 * e.dot(M * e);
    }
  }
  return std::sqrt(acc);
}

ParameterVector bench_y(double y1, double y2, double y3, double y4, double y5,
                        double y6) {
  ParameterVector y(6);
  y << y1, y2, y3, y4, y5, y6;
  return y;
}

} // namespace

TEST_CASE("mesh counting and subdomains") {
  const TruthSpace space = wrom::build_truth_space(2);
  const auto &mesh = space.mesh;
  CHECK(mesh.n_vertices() == 9);
  CHECK(mesh.n_triangles() == 8);
  int per_sub[4] = {0, 0, 0, 0};
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const int id = mesh.subdomain_id[static_cast<size_t>(t)];
    REQUIRE(id >= 1);
    REQUIRE(id <= 4);
    per_sub[id - 1]++;
    // triangle entirely inside its quadrant
    for (int k = 0; k < 3; ++k) {
      const Eigen::Vector2d p = vertex(space, mesh.triangles(t, k));
      const double x_lo = (id == 1 || id == 3) ? 0.0 : 0.5;
      const double y_lo = (id <= 2) ? 0.0 : 0.5;
      CHECK(p.x() >= x_lo - 1e-14);
      CHECK(p.x() <= x_lo + 0.5 + 1e-14);
      CHECK(p.y() >= y_lo - 1e-14);
      CHECK(p.y() <= y_lo + 0.5 + 1e-14);
    }
  }
  for (int s = 0; s < 4; ++s)
    CHECK(per_sub[s] == 2);
}

TEST_CASE("mesh rejects odd or undersized n_sub") {
  CHECK_THROWS_AS(wrom::build_truth_space(3), std::invalid_argument);
  CHECK_THROWS_AS(wrom::build_truth_space(0), std::invalid_argument);
}

TEST_CASE("dirichlet set covers exactly the top and bottom rows") {
  const TruthSpace space = wrom::build_truth_space(2);
  int clamped_vertices = 0;
  for (int v = 0; v < space.mesh.n_vertices(); ++v) {
    const double y2 = space.mesh.vertices(v, 1);
    const bool clamped = space.is_dirichlet[static_cast<size_t>(2 * v)];
    CHECK(clamped == space.is_dirichlet[static_cast<size_t>(2 * v + 1)]);
    CHECK(clamped == (y2 == 0.0 || y2 == 1.0));
    if (clamped)
      clamped_vertices++;
  }
  CHECK(clamped_vertices == 6);
}

TEST_CASE("right-edge traction segments never straddle the midline") {
  const TruthSpace space = wrom::build_truth_space(8);
  for (const auto &e : space.mesh.boundary_edges) {
    if (e.tag != wrom::EdgeTag::RightLower && e.tag != wrom::EdgeTag::RightUpper)
      continue;
    const double a = space.mesh.vertices(e.v0, 1),
                 b = space.mesh.vertices(e.v1, 1);
    CHECK(space.mesh.vertices(e.v0, 0) == 1.0);
    CHECK(space.mesh.vertices(e.v1, 0) == 1.0);
    if (e.tag == wrom::EdgeTag::RightLower) {
      CHECK(std::max(a, b) <= 0.5 + 1e-14);
    } else {
      CHECK(std::min(a, b) >= 0.5 - 1e-14);
    }
  }
}

TEST_CASE("X inner product is SPD on the constrained space") {
  const TruthSpace space = wrom::build_truth_space(16);
  const Eigen::MatrixXd Xf = Eigen::MatrixXd(space.X_free);
  CHECK((Xf - Xf.transpose()).cwiseAbs().maxCoeff() < 1e-14);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Xf);
  CHECK(es.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("affine terms match an independent assembly oracle") {
  const TruthSpace space = wrom::build_truth_space(4);
  const double lam = wrom::lame_lambda(1.0, 0.3), mu = wrom::lame_mu(1.0, 0.3);
  const AffineOperatorSet ops = wrom::assemble_affine(space, lam, mu);
  REQUIRE(ops.n_a() == 4);
  REQUIRE(ops.n_f() == 2);

  // sum of the affine pieces vs a monolithic unit-coefficient assembly
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(space.n_dof, space.n_dof);
  for (const auto &Aq : ops.A)
    sum += Eigen::MatrixXd(Aq);
  const Eigen::MatrixXd mono =
      oracle_global(space, lam, mu, Eigen::Vector4d::Ones());
  CHECK((sum - mono).cwiseAbs().maxCoeff() < 1e-12);

  // each piece vs the per-subdomain oracle
  for (int q = 0; q < 4; ++q) {
    Eigen::Vector4d c = Eigen::Vector4d::Zero();
    c[q] = 1.0;
    const Eigen::MatrixXd part = oracle_global(space, lam, mu, c);
    CHECK((Eigen::MatrixXd(ops.A[static_cast<size_t>(q)]) - part)
              .cwiseAbs()
              .maxCoeff() < 1e-12);
  }
}

TEST_CASE("affine consistency at random parameters") {
  const TruthSpace space = wrom::build_truth_space(4);
  const AffineOperatorSet ops =
      wrom::assemble_affine(space, wrom::lame_lambda(1.0, 0.3),
                            wrom::lame_mu(1.0, 0.3));
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u14(1.0, 3.0);
  for (int rep = 0; rep < 20; ++rep) {
    Eigen::Vector4d c;
    for (int q = 0; q < 4; ++q)
      c[q] = u14(rng);
    Eigen::MatrixXd Ay = Eigen::MatrixXd::Zero(space.n_dof, space.n_dof);
    for (int q = 0; q < 4; ++q)
      Ay += c[q] * Eigen::MatrixXd(ops.A[static_cast<size_t>(q)]);
    const Eigen::MatrixXd mono =
        oracle_global(space, ops.lam, ops.mu, c);
    CHECK((Ay - mono).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("rigid translation carries no elastic energy") {
  const TruthSpace space = wrom::build_truth_space(4);
  const AffineOperatorSet ops = wrom::assemble_affine(space, 0.576923, 0.384615);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(space.n_dof);
  for (int v = 0; v < space.mesh.n_vertices(); ++v)
    u[2 * v] = 3.25; // constant first component, before constraints
  for (const auto &Aq : ops.A)
    CHECK(std::abs(u.dot(Aq * u)) < 1e-12);
}

TEST_CASE("traction vectors load only v2 on their segment") {
  const TruthSpace space = wrom::build_truth_space(8);
  const AffineOperatorSet ops =
      wrom::assemble_affine(space, wrom::lame_lambda(1.0, 0.3),
                            wrom::lame_mu(1.0, 0.3));
  for (int q = 0; q < 2; ++q) {
    const Eigen::VectorXd &fq = ops.f[static_cast<size_t>(q)];
    CHECK(fq.sum() == doctest::Approx(0.5).epsilon(1e-12));
    for (int v = 0; v < space.mesh.n_vertices(); ++v) {
      CHECK(fq[2 * v] == 0.0); // no first-component load
      if (fq[2 * v + 1] != 0.0) {
        CHECK(space.mesh.vertices(v, 0) == 1.0);
        const double y2 = space.mesh.vertices(v, 1);
        if (q == 0)
          CHECK(y2 <= 0.5 + 1e-14);
        else
          CHECK(y2 >= 0.5 - 1e-14);
      }
    }
  }
}

TEST_CASE("truth solve basics") {
  const TruthSpace space = wrom::build_truth_space(8);
  const AffineOperatorSet ops =
      wrom::assemble_affine(space, wrom::lame_lambda(1.0, 0.3),
                            wrom::lame_mu(1.0, 0.3));

  const auto zero = wrom::solve_truth(ops, space, bench_y(1, 1, 1, 1, 0, 0));
  CHECK(zero.coeffs.cwiseAbs().maxCoeff() == 0.0);

  const ParameterVector y = bench_y(1.5, 2.0, 2.5, 1.2, 3.0, 5.0);
  const auto snap = wrom::solve_truth(ops, space, y);

  // Dirichlet DOFs exactly zero
  for (int i = 0; i < space.n_dof; ++i)
    if (space.is_dirichlet[static_cast<size_t>(i)])
      CHECK(snap.coeffs[i] == 0.0);

  // residual on the free space
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(space.n_dof);
  for (int q = 0; q < 2; ++q)
    rhs += y[4 + q] * ops.f[static_cast<size_t>(q)];
  Eigen::VectorXd Au = Eigen::VectorXd::Zero(space.n_dof);
  for (int q = 0; q < 4; ++q)
    Au += y[q] * (ops.A[static_cast<size_t>(q)] * snap.coeffs);
  double res = 0.0, fn = 0.0;
  for (int i = 0; i < space.n_dof; ++i)
    if (!space.is_dirichlet[static_cast<size_t>(i)]) {
      res += (Au[i] - rhs[i]) * (Au[i] - rhs[i]);
      fn += rhs[i] * rhs[i];
    }
  CHECK(std::sqrt(res) <= 1e-10 * std::sqrt(fn));

  // linearity in the load
  const auto scaled =
      wrom::solve_truth(ops, space, bench_y(1.5, 2.0, 2.5, 1.2, 6.0, 10.0));
  CHECK((scaled.coeffs - 2.0 * snap.coeffs).cwiseAbs().maxCoeff() <
        1e-10 * snap.coeffs.cwiseAbs().maxCoeff());

  // homogeneity in the material
  const auto stiff =
      wrom::solve_truth(ops, space, bench_y(3.0, 4.0, 5.0, 2.4, 3.0, 5.0));
  CHECK((stiff.coeffs - 0.5 * snap.coeffs).cwiseAbs().maxCoeff() <
        1e-10 * snap.coeffs.cwiseAbs().maxCoeff());

  CHECK_THROWS_AS(wrom::solve_truth(ops, space, bench_y(0, 1, 1, 1, 1, 1)),
                  std::invalid_argument);
}

TEST_CASE("inner product and output") {
  const TruthSpace space = wrom::build_truth_space(8);
  const AffineOperatorSet ops =
      wrom::assemble_affine(space, wrom::lame_lambda(1.0, 0.3),
                            wrom::lame_mu(1.0, 0.3));

  CHECK(wrom::v_norm(space, Eigen::VectorXd::Zero(space.n_dof)) == 0.0);

  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  for (int rep = 0; rep < 10; ++rep) {
    Eigen::VectorXd u(space.n_dof), v(space.n_dof);
    for (int i = 0; i < space.n_dof; ++i) {
      u[i] = g(rng);
      v[i] = g(rng);
    }
    CHECK(wrom::v_inner(space, u, v) ==
          doctest::Approx(wrom::v_inner(space, v, u)).epsilon(1e-14));
    CHECK(std::abs(wrom::v_inner(space, u, v)) <=
          wrom::v_norm(space, u) * wrom::v_norm(space, v) * (1 + 1e-12));
  }

  const ParameterVector y = bench_y(2.1, 1.3, 2.8, 1.1, 4.0, 2.5);
  const auto snap = wrom::solve_truth(ops, space, y);
  const double s = wrom::evaluate_output(ops, y, snap.coeffs);
  double energy = 0.0;
  for (int q = 0; q < 4; ++q)
    energy += y[q] * snap.coeffs.dot(ops.A[static_cast<size_t>(q)] * snap.coeffs);
  CHECK(s == doctest::Approx(energy).epsilon(1e-10));
  CHECK(wrom::evaluate_output(ops, bench_y(2.1, 1.3, 2.8, 1.1, 0, 0),
                              snap.coeffs) == 0.0);
}

TEST_CASE("parametric coercivity of the affine sum") {
  const TruthSpace space = wrom::build_truth_space(4);
  const AffineOperatorSet ops =
      wrom::assemble_affine(space, wrom::lame_lambda(1.0, 0.3),
                            wrom::lame_mu(1.0, 0.3));
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u14(1.0, 3.0);
  std::normal_distribution<double> g;
  for (int rep = 0; rep < 20; ++rep) {
    ParameterVector y = bench_y(u14(rng), u14(rng), u14(rng), u14(rng), 1, 1);
    Eigen::VectorXd v = Eigen::VectorXd::Zero(space.n_dof);
    for (int i : space.free_dofs)
      v[i] = g(rng);
    double ay = 0.0, asum = 0.0;
    for (int q = 0; q < 4; ++q) {
      const double vav = v.dot(ops.A[static_cast<size_t>(q)] * v);
      ay += y[q] * vav;
      asum += vav;
    }
    CHECK(ay >= y.head(4).minCoeff() * asum * (1.0 - 1e-12));
  }
}

TEST_CASE("manufactured solution converges at second order in L2") {
  // nu = 0 decouples the components enough that u = (0, sin(pi x2)) solves
  // -div sigma = (0, pi^2 sin(pi x2)) with homogeneous Dirichlet top/bottom
  // and traction-free sides, using 2*mu + lam = 1.
  std::vector<double> errs;
  for (int n : {8, 16, 32}) {
    const TruthSpace space = wrom::build_truth_space(n);
    const AffineOperatorSet ops = wrom::assemble_affine(
        space, wrom::lame_lambda(1.0, 0.0), wrom::lame_mu(1.0, 0.0));
    Eigen::VectorXd load = wrom::assemble_body_load(
        space, [](double, double x2) {
          return Eigen::Vector2d(0.0, M_PI * M_PI * std::sin(M_PI * x2));
        });

    wrom::SparseMat sum = ops.A_free[0];
    for (size_t q = 1; q < ops.A_free.size(); ++q)
      sum += ops.A_free[q];
    Eigen::SimplicialLDLT<wrom::SparseMat> solver(sum);
    const Eigen::VectorXd u_free = solver.solve(space.restrict_free(load));
    const Eigen::VectorXd u = space.prolong_free(u_free);

    Eigen::VectorXd err = u;
    for (int v = 0; v < space.mesh.n_vertices(); ++v)
      err[2 * v + 1] -= std::sin(M_PI * space.mesh.vertices(v, 1));
    errs.push_back(l2_norm(space, err));
  }
  const double rate1 = std::log2(errs[0] / errs[1]);
  const double rate2 = std::log2(errs[1] / errs[2]);
  CHECK(rate1 >= 1.9);
  CHECK(rate2 >= 1.9);
}

TEST_CASE("energy inner product option") {
  const TruthSpace space =
      wrom::build_truth_space(4, wrom::InnerProduct::Energy);
  const Eigen::MatrixXd Xf = Eigen::MatrixXd(space.X_free);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Xf);
  CHECK(es.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("matrix market export writes parseable text") {
  const TruthSpace space = wrom::build_truth_space(2);
  const AffineOperatorSet ops =
      wrom::assemble_affine(space, wrom::lame_lambda(1.0, 0.3),
                            wrom::lame_mu(1.0, 0.3));
  const std::string path = "/tmp/wrom_mm_test.mtx";
  wrom::write_matrix_market(path, ops.A[0]);
  std::ifstream f(path);
  REQUIRE(f.good());
  std::string header;
  std::getline(f, header);
  CHECK(header.find("%%MatrixMarket") != std::string::npos);
  std::remove(path.c_str());
}
