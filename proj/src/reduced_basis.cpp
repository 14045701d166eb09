// Copyright (c) 2026 The wrom developers.
// SPDX-License-Identifier: Apache-2.0

#include "wrom/reduced_basis.hpp"

#include "wrom/errors.hpp"
#include "wrom/util.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace wrom {

std::string to_string(BuildStatus s) {
  switch (s) {
  case BuildStatus::Ok:
    return "ok";
  case BuildStatus::Converged:
    return "converged";
  case BuildStatus::TrainingExhausted:
    return "training_exhausted";
  case BuildStatus::Breakdown:
    return "breakdown";
  case BuildStatus::ZeroEnergy:
    return "zero_energy";
  }
  return "ok";
}

static BuildStatus status_from_string(const std::string &s) {
  if (s == "converged")
    return BuildStatus::Converged;
  if (s == "training_exhausted")
    return BuildStatus::TrainingExhausted;
  if (s == "breakdown")
    return BuildStatus::Breakdown;
  if (s == "zero_energy")
    return BuildStatus::ZeroEnergy;
  return BuildStatus::Ok;
}

OrthoResult orthonormalize_against(const TruthSpace &space,
                                   const Eigen::MatrixXd &Z,
                                   const Eigen::VectorXd &candidate) {
  OrthoResult res;
  res.v = candidate;
  res.pre_norm = v_norm(space, res.v);
  // Modified Gram-Schmidt, two passes: the second pass restores
  // orthogonality lost to cancellation when the candidate is nearly in the
  // span (the concentrated-distribution regime).
  for (int pass = 0; pass < 2; ++pass)
    for (int j = 0; j < Z.cols(); ++j) {
      const double c = Z.col(j).dot(space.X * res.v);
      res.v -= c * Z.col(j);
    }
  res.post_norm = v_norm(space, res.v);
  if (res.post_norm > 0.0)
    res.v /= res.post_norm;
  return res;
}

Eigen::MatrixXd orthonormalize_columns(const TruthSpace &space,
                                       const Eigen::MatrixXd &M) {
  Eigen::MatrixXd Z(M.rows(), 0);
  for (int k = 0; k < M.cols(); ++k) {
    OrthoResult res = orthonormalize_against(space, Z, M.col(k));
    if (res.post_norm < 1e-10 * res.pre_norm || res.post_norm == 0.0)
      continue; // dependent column, drop
    Z.conservativeResize(Eigen::NoChange, Z.cols() + 1);
    Z.col(Z.cols() - 1) = res.v;
  }
  return Z;
}

void project_operators(const AffineOperatorSet &ops, const Eigen::MatrixXd &Z,
                       std::vector<Eigen::MatrixXd> &A_red,
                       std::vector<Eigen::VectorXd> &f_red) {
  A_red.resize(ops.n_a());
  f_red.resize(ops.n_f());
  for (int q = 0; q < ops.n_a(); ++q)
    A_red[q] = Z.transpose() * (ops.A[q] * Z);
  for (int q = 0; q < ops.n_f(); ++q)
    f_red[q] = Z.transpose() * ops.f[q];
}

ReducedBasis ReducedBasis::prefix(int n) const {
  if (n < 0 || n > n_basis())
    throw std::invalid_argument("ReducedBasis::prefix: size out of range");
  ReducedBasis out;
  out.meta = meta;
  out.spectrum = spectrum;
  out.Z = Z.leftCols(n);
  const int nsel = std::min<int>(n, static_cast<int>(selected_params.size()));
  out.selected_params.assign(selected_params.begin(),
                             selected_params.begin() + nsel);
  out.A_red.reserve(A_red.size());
  for (const auto &A : A_red)
    out.A_red.push_back(A.topLeftCorner(n, n));
  out.f_red.reserve(f_red.size());
  for (const auto &f : f_red)
    out.f_red.push_back(f.head(n));
  for (const auto &h : history)
    if (h.iteration <= n)
      out.history.push_back(h);
  if (!estimator.empty()) {
    EstimatorData e;
    e.n_a_terms = estimator.n_a_terms;
    e.n_f_terms = estimator.n_f_terms;
    e.n_basis = n;
    const int dim = e.n_f_terms + n * e.n_a_terms;
    e.G = estimator.G.topLeftCorner(dim, dim);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(e.G);
    if (es.info() != Eigen::Success)
      throw EigenSolveError("prefix: estimator Gram eigensolve failed");
    e.G_eval = es.eigenvalues();
    e.G_evec = es.eigenvectors();
    e.alpha_bar = estimator.alpha_bar;
    e.gamma_bar = estimator.gamma_bar;
    if (estimator.R_f.size() > 0) {
      e.R_f = estimator.R_f;
      e.R_a = estimator.R_a.leftCols(n * e.n_a_terms);
    }
    out.estimator = std::move(e);
  }
  return out;
}

namespace {

constexpr char kMagic[6] = {'W', 'R', 'O', 'M', 'R', 'B'};
constexpr std::uint8_t kVersion = 1;

void put_u64(std::ostream &os, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i)
    b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  os.write(reinterpret_cast<const char *>(b), 8);
}

void put_i64(std::ostream &os, std::int64_t v) {
  put_u64(os, static_cast<std::uint64_t>(v));
}

void put_f64(std::ostream &os, double v) {
  put_u64(os, std::bit_cast<std::uint64_t>(v));
}

void put_str(std::ostream &os, const std::string &s) {
  put_u64(os, s.size());
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

void put_vec(std::ostream &os, const Eigen::VectorXd &v) {
  put_i64(os, v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i)
    put_f64(os, v[i]);
}

void put_mat(std::ostream &os, const Eigen::MatrixXd &m) {
  put_i64(os, m.rows());
  put_i64(os, m.cols());
  for (Eigen::Index c = 0; c < m.cols(); ++c)
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      put_f64(os, m(r, c));
}

std::uint64_t get_u64(std::istream &is) {
  unsigned char b[8];
  is.read(reinterpret_cast<char *>(b), 8);
  if (!is)
    throw std::runtime_error("archive: truncated stream");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i)
    v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

std::int64_t get_i64(std::istream &is) {
  return static_cast<std::int64_t>(get_u64(is));
}

double get_f64(std::istream &is) {
  return std::bit_cast<double>(get_u64(is));
}

std::string get_str(std::istream &is) {
  const std::uint64_t n = get_u64(is);
  if (n > (1ull << 20))
    throw std::runtime_error("archive: implausible string length");
  std::string s(n, '\0');
  is.read(s.data(), static_cast<std::streamsize>(n));
  if (!is)
    throw std::runtime_error("archive: truncated stream");
  return s;
}

Eigen::VectorXd get_vec(std::istream &is) {
  const std::int64_t n = get_i64(is);
  if (n < 0 || n > (1ll << 32))
    throw std::runtime_error("archive: implausible vector length");
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i)
    v[i] = get_f64(is);
  return v;
}

Eigen::MatrixXd get_mat(std::istream &is) {
  const std::int64_t r = get_i64(is), c = get_i64(is);
  if (r < 0 || c < 0 || r * c > (1ll << 32))
    throw std::runtime_error("archive: implausible matrix shape");
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index j = 0; j < c; ++j)
    for (Eigen::Index i = 0; i < r; ++i)
      m(i, j) = get_f64(is);
  return m;
}

} // namespace

void write_archive(const std::string &path, const ReducedBasis &rb) {
  std::ofstream os(path, std::ios::binary);
  if (!os)
    throw std::runtime_error("write_archive: cannot open " + path);
  os.write(kMagic, sizeof(kMagic));
  os.put(static_cast<char>(kVersion));

  const BuildMetadata &m = rb.meta;
  put_str(os, m.method);
  put_str(os, m.weight_tag);
  put_str(os, m.training_provenance);
  put_i64(os, m.training_size);
  put_u64(os, m.training_seed);
  put_f64(os, m.eps_tol);
  put_i64(os, m.n_max);
  put_i64(os, m.n_sub);
  put_f64(os, m.alpha);
  put_f64(os, m.beta);
  put_str(os, to_string(m.status));
  put_i64(os, m.breakdown_n);
  put_vec(os, m.breakdown_y);
  put_f64(os, m.breakdown_rcond);

  put_mat(os, rb.Z);
  put_u64(os, rb.selected_params.size());
  for (const auto &y : rb.selected_params)
    put_vec(os, y);
  put_u64(os, rb.A_red.size());
  for (const auto &A : rb.A_red)
    put_mat(os, A);
  put_u64(os, rb.f_red.size());
  for (const auto &f : rb.f_red)
    put_vec(os, f);

  os.put(rb.estimator.empty() ? '\0' : '\1');
  if (!rb.estimator.empty()) {
    put_i64(os, rb.estimator.n_a_terms);
    put_i64(os, rb.estimator.n_f_terms);
    put_i64(os, rb.estimator.n_basis);
    put_mat(os, rb.estimator.G);
    put_f64(os, rb.estimator.alpha_bar);
    put_f64(os, rb.estimator.gamma_bar);
  }

  put_u64(os, rb.history.size());
  for (const auto &h : rb.history) {
    put_i64(os, h.iteration);
    put_vec(os, h.chosen_y);
    put_f64(os, h.max_weighted_estimator);
  }

  put_vec(os, rb.spectrum.eigenvalues);
  put_mat(os, rb.spectrum.eigenvectors);
  put_vec(os, rb.spectrum.retained_energy);
  if (!os)
    throw std::runtime_error("write_archive: write failed for " + path);
}

ReducedBasis read_archive(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is)
    throw std::runtime_error("read_archive: cannot open " + path);
  char magic[6];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw std::runtime_error("read_archive: not a reduced-basis archive: " +
                             path);
  const int version = is.get();
  if (version != kVersion)
    throw std::runtime_error("read_archive: unsupported archive version " +
                             std::to_string(version));

  ReducedBasis rb;
  BuildMetadata &m = rb.meta;
  m.method = get_str(is);
  m.weight_tag = get_str(is);
  m.training_provenance = get_str(is);
  m.training_size = static_cast<int>(get_i64(is));
  m.training_seed = get_u64(is);
  m.eps_tol = get_f64(is);
  m.n_max = static_cast<int>(get_i64(is));
  m.n_sub = static_cast<int>(get_i64(is));
  m.alpha = get_f64(is);
  m.beta = get_f64(is);
  m.status = status_from_string(get_str(is));
  m.breakdown_n = static_cast<int>(get_i64(is));
  m.breakdown_y = get_vec(is);
  m.breakdown_rcond = get_f64(is);

  rb.Z = get_mat(is);
  const std::uint64_t nsel = get_u64(is);
  for (std::uint64_t i = 0; i < nsel; ++i)
    rb.selected_params.push_back(get_vec(is));
  const std::uint64_t na = get_u64(is);
  for (std::uint64_t i = 0; i < na; ++i)
    rb.A_red.push_back(get_mat(is));
  const std::uint64_t nf = get_u64(is);
  for (std::uint64_t i = 0; i < nf; ++i)
    rb.f_red.push_back(get_vec(is));

  if (is.get() == 1) {
    EstimatorData &e = rb.estimator;
    e.n_a_terms = static_cast<int>(get_i64(is));
    e.n_f_terms = static_cast<int>(get_i64(is));
    e.n_basis = static_cast<int>(get_i64(is));
    e.G = get_mat(is);
    e.alpha_bar = get_f64(is);
    e.gamma_bar = get_f64(is);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(e.G);
    if (es.info() != Eigen::Success)
      throw EigenSolveError("read_archive: estimator Gram eigensolve failed");
    e.G_eval = es.eigenvalues();
    e.G_evec = es.eigenvectors();
  }

  const std::uint64_t nh = get_u64(is);
  for (std::uint64_t i = 0; i < nh; ++i) {
    GreedyHistoryEntry h;
    h.iteration = static_cast<int>(get_i64(is));
    h.chosen_y = get_vec(is);
    h.max_weighted_estimator = get_f64(is);
    rb.history.push_back(h);
  }

  rb.spectrum.eigenvalues = get_vec(is);
  rb.spectrum.eigenvectors = get_mat(is);
  rb.spectrum.retained_energy = get_vec(is);
  return rb;
}

void write_history_csv(const std::string &path, const ReducedBasis &rb) {
  std::ofstream f(path);
  if (!f)
    throw std::runtime_error("write_history_csv: cannot open " + path);
  const int K = rb.history.empty()
                    ? 0
                    : static_cast<int>(rb.history.front().chosen_y.size());
  f << "iteration,";
  for (int d = 0; d < K; ++d)
    f << "y_" << (d + 1) << ",";
  f << "max_weighted_estimator\n";
  for (const auto &h : rb.history) {
    f << h.iteration << ",";
    for (int d = 0; d < K; ++d)
      f << fmt_double(h.chosen_y[d]) << ",";
    f << fmt_double(h.max_weighted_estimator) << "\n";
  }
}

void write_spectrum_csv(const std::string &path, const PodSpectrum &spectrum) {
  std::ofstream f(path);
  if (!f)
    throw std::runtime_error("write_spectrum_csv: cannot open " + path);
  f << "k,lambda_k,E_k\n";
  for (int k = 0; k < spectrum.n_modes(); ++k)
    f << (k + 1) << "," << fmt_double(spectrum.eigenvalues[k]) << ","
      << fmt_double(spectrum.retained_energy[k]) << "\n";
}

} // namespace wrom
