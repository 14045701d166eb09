// Copyright (c) 2026 The wrom developers.
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "wrom/fem.hpp"
#include "wrom/pod.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

using wrom::AffineOperatorSet;
using wrom::ParameterVector;
using wrom::TrainingSet;
using wrom::TruthSpace;

namespace {

// Two-parameter restriction of the benchmark: y = (t1, 1, 1, 1, t2, 0).
ParameterVector restricted(double t1, double t2) {
  ParameterVector y(6);
  y << t1, 1.0, 1.0, 1.0, t2, 0.0;
  return y;
}

TrainingSet restricted_training(int n, std::uint64_t seed) {
  TrainingSet ts;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u1(0.2, 5.0), u2(0.5, 2.0);
  for (int i = 0; i < n; ++i) {
    ts.nodes.push_back(restricted(u1(rng), u2(rng)));
    ts.weights.push_back(1.0 / n);
  }
  ts.provenance = "test(restricted)";
  return ts;
}

struct Setup {
  TruthSpace space;
  AffineOperatorSet ops;
};

Setup make_setup(int n_sub) {
  Setup s{wrom::build_truth_space(n_sub), {}};
  s.ops = wrom::assemble_affine(s.space, wrom::lame_lambda(1.0, 0.3),
                                wrom::lame_mu(1.0, 0.3));
  return s;
}

Eigen::MatrixXd snapshots(const Setup &s, const TrainingSet &ts) {
  Eigen::MatrixXd Phi(s.space.n_dof, ts.size());
  for (int i = 0; i < ts.size(); ++i)
    Phi.col(i) =
        wrom::solve_truth(s.ops, s.space, ts.nodes[static_cast<size_t>(i)])
            .coeffs;
  return Phi;
}

double weighted_projection_error(const Setup &s, const Eigen::MatrixXd &Phi,
                                 const std::vector<double> &w,
                                 const Eigen::MatrixXd &Z) {
  double acc = 0.0;
  for (int i = 0; i < Phi.cols(); ++i) {
    const Eigen::VectorXd phi = Phi.col(i);
    const Eigen::VectorXd d =
        phi - Z * (Z.transpose() * (s.space.X * phi));
    acc += w[static_cast<size_t>(i)] * d.dot(s.space.X * d);
  }
  return acc;
}

} // namespace

TEST_CASE("correlation matrix is a symmetric PSD Gram") {
  const Setup s = make_setup(4);
  const TrainingSet ts = restricted_training(8, 3);
  const Eigen::MatrixXd Phi = snapshots(s, ts);
  const Eigen::MatrixXd C = wrom::correlation_matrix(s.space, Phi);
  REQUIRE(C.rows() == 8);
  CHECK((C - C.transpose()).cwiseAbs().maxCoeff() == 0.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(C);
  CHECK(es.eigenvalues().minCoeff() >= -1e-10 * C.norm());
  for (int i = 0; i < 8; ++i) {
    const double n = wrom::v_norm(s.space, Phi.col(i));
    CHECK(C(i, i) == doctest::Approx(n * n).epsilon(1e-12));
  }

  // identical snapshots give a rank-1 constant matrix
  Eigen::MatrixXd Phi2(s.space.n_dof, 3);
  Phi2.col(0) = Phi.col(0);
  Phi2.col(1) = Phi.col(0);
  Phi2.col(2) = Phi.col(0);
  const Eigen::MatrixXd C2 = wrom::correlation_matrix(s.space, Phi2);
  CHECK((C2.array() - C2(0, 0)).abs().maxCoeff() < 1e-12 * std::abs(C2(0, 0)));
}

TEST_CASE("weighted_eig: unit weights reduce to the plain eigendecomposition") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  Eigen::MatrixXd B(12, 12);
  for (int i = 0; i < 12; ++i)
    for (int j = 0; j < 12; ++j)
      B(i, j) = g(rng);
  const Eigen::MatrixXd C = B * B.transpose();
  const wrom::PodSpectrum sp =
      wrom::weighted_eig(C, std::vector<double>(12, 1.0));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(C);
  const Eigen::VectorXd lam = es.eigenvalues().reverse();
  REQUIRE(sp.n_modes() == 12);
  for (int k = 0; k < 12; ++k)
    CHECK(sp.eigenvalues[k] == doctest::Approx(lam[k]).epsilon(1e-10));
}

TEST_CASE("weighted_eig matches the nonsymmetric W*C oracle") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> upos(0.1, 2.0);
  for (int rep = 0; rep < 10; ++rep) {
    const int n = 20;
    Eigen::MatrixXd B(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        B(i, j) = g(rng);
    const Eigen::MatrixXd C = B * B.transpose();
    std::vector<double> w(static_cast<size_t>(n));
    for (auto &wi : w)
      wi = upos(rng);

    Eigen::MatrixXd WC = C;
    for (int i = 0; i < n; ++i)
      WC.row(i) *= w[static_cast<size_t>(i)];
    Eigen::EigenSolver<Eigen::MatrixXd> es(WC);
    std::vector<double> oracle(static_cast<size_t>(n));
    for (int k = 0; k < n; ++k)
      oracle[static_cast<size_t>(k)] = es.eigenvalues()[k].real();
    std::sort(oracle.rbegin(), oracle.rend());

    const wrom::PodSpectrum sp = wrom::weighted_eig(C, w);
    REQUIRE(sp.n_modes() == n);
    for (int k = 0; k < n; ++k)
      CHECK(sp.eigenvalues[k] ==
            doctest::Approx(oracle[static_cast<size_t>(k)]).epsilon(1e-9));
  }
}

TEST_CASE("weighted_eig with sign-indefinite weights") {
  // Oracle: eigenvalues of WC restricted to range(C). With C full rank this
  // is a plain nonsymmetric eigensolve of W*C.
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(-1.0, 2.0);
  const int n = 10;
  Eigen::MatrixXd B(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      B(i, j) = g(rng);
  const Eigen::MatrixXd C = B * B.transpose();
  std::vector<double> w(static_cast<size_t>(n));
  bool has_neg = false;
  for (auto &wi : w) {
    wi = u(rng);
    has_neg = has_neg || wi < 0.0;
  }
  REQUIRE(has_neg);

  Eigen::MatrixXd WC = C;
  for (int i = 0; i < n; ++i)
    WC.row(i) *= w[static_cast<size_t>(i)];
  Eigen::EigenSolver<Eigen::MatrixXd> es(WC);
  std::vector<double> oracle(static_cast<size_t>(n));
  for (int k = 0; k < n; ++k)
    oracle[static_cast<size_t>(k)] = es.eigenvalues()[k].real();
  std::sort(oracle.rbegin(), oracle.rend());

  const wrom::PodSpectrum sp = wrom::weighted_eig(C, w);
  REQUIRE(sp.n_modes() == n);
  for (int k = 0; k < n; ++k)
    CHECK(sp.eigenvalues[k] ==
          doctest::Approx(oracle[static_cast<size_t>(k)])
              .epsilon(1e-9)
              .scale(std::abs(oracle[0])));

  // an eigenpair check: C W C psi = lambda C psi for the top mode
  const Eigen::VectorXd psi = sp.eigenvectors.col(0);
  const Eigen::VectorXd lhs = C * (Eigen::VectorXd(
      Eigen::Map<const Eigen::VectorXd>(w.data(), n).asDiagonal() *
      (C * psi)));
  const Eigen::VectorXd rhs = sp.eigenvalues[0] * (C * psi);
  CHECK((lhs - rhs).norm() <= 1e-8 * rhs.norm());
}

TEST_CASE("single nonzero weight isolates one mode") {
  Eigen::MatrixXd C(3, 3);
  C << 4, 1, 0.5, 1, 3, 0.2, 0.5, 0.2, 2;
  std::vector<double> w = {0.0, 2.0, 0.0};
  const wrom::PodSpectrum sp = wrom::weighted_eig(C, w);
  int nonzero = 0;
  for (int k = 0; k < sp.n_modes(); ++k)
    if (std::abs(sp.eigenvalues[k]) > 1e-12)
      nonzero++;
  CHECK(nonzero == 1);
  CHECK(sp.eigenvalues[0] == doctest::Approx(2.0 * 3.0).epsilon(1e-12));
}

TEST_CASE("weighted_eig rejects degenerate input") {
  Eigen::MatrixXd C = Eigen::MatrixXd::Identity(3, 3);
  CHECK_THROWS_AS(wrom::weighted_eig(C, std::vector<double>(2, 1.0)),
                  std::invalid_argument);
  CHECK_THROWS_AS(wrom::weighted_eig(C, std::vector<double>(3, 0.0)),
                  std::invalid_argument);
}

TEST_CASE("spectrum invariance under training permutation") {
  const Setup s = make_setup(4);
  TrainingSet ts = restricted_training(12, 13);
  // make the weights distinguishable
  for (int i = 0; i < 12; ++i)
    ts.weights[static_cast<size_t>(i)] = (i + 1.0) / 78.0;
  const Eigen::MatrixXd Phi = snapshots(s, ts);
  const Eigen::MatrixXd C = wrom::correlation_matrix(s.space, Phi);
  const wrom::PodSpectrum sp = wrom::weighted_eig(C, ts.weights);

  std::vector<int> perm(12);
  for (int i = 0; i < 12; ++i)
    perm[static_cast<size_t>(i)] = (i * 5 + 3) % 12; // a 12-cycle
  Eigen::MatrixXd Phi_p(s.space.n_dof, 12);
  std::vector<double> w_p(12);
  for (int i = 0; i < 12; ++i) {
    Phi_p.col(i) = Phi.col(perm[static_cast<size_t>(i)]);
    w_p[static_cast<size_t>(i)] =
        ts.weights[static_cast<size_t>(perm[static_cast<size_t>(i)])];
  }
  const Eigen::MatrixXd C_p = wrom::correlation_matrix(s.space, Phi_p);
  const wrom::PodSpectrum sp_p = wrom::weighted_eig(C_p, w_p);
  REQUIRE(sp_p.n_modes() == sp.n_modes());
  const double scale = std::abs(sp.eigenvalues[0]);
  for (int k = 0; k < sp.n_modes(); ++k)
    CHECK(std::abs(sp_p.eigenvalues[k] - sp.eigenvalues[k]) <= 1e-10 * scale);
}

TEST_CASE("pod_build: truncation rules and identical snapshots") {
  const Setup s = make_setup(4);

  TrainingSet same;
  const ParameterVector y0 = restricted(1.3, 1.1);
  for (int i = 0; i < 4; ++i) {
    same.nodes.push_back(y0);
    same.weights.push_back(0.25);
  }
  same.provenance = "test(identical)";
  wrom::PodOptions opts;
  opts.eps_tol = 1e-8;
  opts.n_max = 4;
  const wrom::ReducedBasis rb = wrom::pod_build(s.ops, s.space, same, opts);
  CHECK(rb.n_basis() == 1);
  CHECK(rb.spectrum.retained_energy[0] == doctest::Approx(1.0).epsilon(1e-12));

  wrom::PodOptions bad;
  bad.eps_tol = 0.0;
  CHECK_THROWS_AS(wrom::pod_build(s.ops, s.space, same, bad),
                  std::invalid_argument);

  wrom::PodOptions loose;
  loose.eps_tol = 1.0; // E_N > 0 already at N=1
  const wrom::ReducedBasis rb1 =
      wrom::pod_build(s.ops, s.space, restricted_training(6, 17), loose);
  CHECK(rb1.n_basis() == 1);
}

TEST_CASE("pod_build: zero snapshots yield an empty basis") {
  const Setup s = make_setup(4);
  TrainingSet ts;
  for (int i = 0; i < 3; ++i) {
    ts.nodes.push_back(restricted(1.0 + i, 0.0)); // zero traction
    ts.weights.push_back(1.0 / 3);
  }
  ts.provenance = "test(zero)";
  wrom::PodOptions opts;
  const wrom::ReducedBasis rb = wrom::pod_build(s.ops, s.space, ts, opts);
  CHECK(rb.n_basis() == 0);
  CHECK(rb.meta.status == wrom::BuildStatus::ZeroEnergy);
}

TEST_CASE("POD energy identity and optimality on the miniature problem") {
  const Setup s = make_setup(6);
  const TrainingSet ts = restricted_training(30, 23);
  const Eigen::MatrixXd Phi = snapshots(s, ts);

  wrom::PodOptions opts;
  opts.eps_tol = 1e-12;
  opts.n_max = 8;
  const wrom::ReducedBasis rb = wrom::pod_build(s.ops, s.space, ts, opts);
  REQUIRE(rb.n_basis() >= 5);

  const Eigen::VectorXd &lam = rb.spectrum.eigenvalues;
  for (int N = 1; N <= 5; ++N) {
    const double measured = weighted_projection_error(
        s, Phi, ts.weights, rb.Z.leftCols(N));
    double tail = 0.0;
    for (int k = N; k < lam.size(); ++k)
      tail += std::max(lam[k], 0.0);
    CHECK(measured == doctest::Approx(tail).epsilon(1e-8).scale(lam[0]));
  }

  // optimality against 20 random rank-N orthonormal subspaces of the
  // snapshot span
  std::mt19937_64 rng(37);
  std::normal_distribution<double> g;
  for (int N = 1; N <= 5; ++N) {
    const double pod_err = weighted_projection_error(
        s, Phi, ts.weights, rb.Z.leftCols(N));
    for (int trial = 0; trial < 20; ++trial) {
      Eigen::MatrixXd R(ts.size(), N);
      for (int i = 0; i < R.rows(); ++i)
        for (int j = 0; j < N; ++j)
          R(i, j) = g(rng);
      const Eigen::MatrixXd W =
          wrom::orthonormalize_columns(s.space, Phi * R);
      if (W.cols() < N)
        continue; // random subspace degenerated; try the next one
      const double rand_err =
          weighted_projection_error(s, Phi, ts.weights, W);
      CHECK(pod_err <= rand_err * (1.0 + 1e-10));
    }
  }
}

TEST_CASE("pod_build with an estimator certifies its snapshots") {
  const Setup s = make_setup(4);
  const TrainingSet ts = restricted_training(10, 41);
  wrom::PodOptions opts;
  opts.eps_tol = 1e-12;
  opts.n_max = 6;
  opts.with_estimator = true;
  const wrom::ReducedBasis rb = wrom::pod_build(s.ops, s.space, ts, opts);
  REQUIRE_FALSE(rb.estimator.empty());
  const Eigen::MatrixXd gram = rb.Z.transpose() * (s.space.X * rb.Z);
  CHECK((gram - Eigen::MatrixXd::Identity(rb.n_basis(), rb.n_basis()))
            .cwiseAbs()
            .maxCoeff() < 1e-10);
}
