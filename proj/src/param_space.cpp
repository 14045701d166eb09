// Copyright (c) 2026 The wrom developers.
// SPDX-License-Identifier: Apache-2.0

#include "wrom/param_space.hpp"

#include "wrom/util.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace wrom {
namespace special {

double log_beta(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

namespace {

// Continued fraction for the incomplete beta function (modified Lentz).
double beta_cont_frac(double a, double b, double x) {
  constexpr int max_iter = 400;
  constexpr double eps = std::numeric_limits<double>::epsilon();
  constexpr double tiny = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < tiny)
    d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= max_iter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny)
      d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny)
      c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny)
      d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny)
      c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) <= eps)
      return h;
  }
  throw std::runtime_error("reg_inc_beta: continued fraction did not converge");
}

} // namespace

double reg_inc_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0))
    throw std::invalid_argument("reg_inc_beta: shape parameters must be positive");
  if (x <= 0.0)
    return 0.0;
  if (x >= 1.0)
    return 1.0;
  const double log_front =
      a * std::log(x) + b * std::log1p(-x) - log_beta(a, b);
  // Use the symmetry that keeps the continued fraction well conditioned.
  if (x < (a + 1.0) / (a + b + 2.0))
    return std::exp(log_front) * beta_cont_frac(a, b, x) / a;
  return 1.0 - std::exp(log_front) * beta_cont_frac(b, a, 1.0 - x) / b;
}

double reg_inc_beta_inv(double a, double b, double p) {
  if (p <= 0.0)
    return 0.0;
  if (p >= 1.0)
    return 1.0;

  double lo = 0.0, hi = 1.0;
  double x = a / (a + b); // start at the mean
  for (int it = 0; it < 200; ++it) {
    const double f = reg_inc_beta(a, b, x) - p;
    if (f > 0.0)
      hi = x;
    else
      lo = x;
    // Newton step with the analytic density as derivative.
    const double log_pdf =
        (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) - log_beta(a, b);
    double step = f * std::exp(-log_pdf);
    double x_new = x - step;
    if (!(x_new > lo) || !(x_new < hi))
      x_new = 0.5 * (lo + hi); // bisect when Newton leaves the bracket
    if (std::abs(x_new - x) <= 1e-16 * (1.0 + std::abs(x))) {
      x = x_new;
      break;
    }
    x = x_new;
  }
  return x;
}

} // namespace special

double BetaMarginal::density(double y) const {
  if (y < lo || y > hi)
    return 0.0;
  const double width = hi - lo;
  const double t = (y - lo) / width;
  if (t <= 0.0 || t >= 1.0) {
    // Endpoint values follow the power exponents; only finite shapes allowed.
    if (alpha == 1.0 && t <= 0.0)
      return std::exp(-special::log_beta(alpha, beta)) / width;
    if (beta == 1.0 && t >= 1.0)
      return std::exp(-special::log_beta(alpha, beta)) / width;
    return (alpha < 1.0 || beta < 1.0) ? std::numeric_limits<double>::infinity() : 0.0;
  }
  const double log_pdf = (alpha - 1.0) * std::log(t) +
                         (beta - 1.0) * std::log1p(-t) -
                         special::log_beta(alpha, beta);
  return std::exp(log_pdf) / width;
}

double BetaMarginal::cdf(double y) const {
  if (y <= lo)
    return 0.0;
  if (y >= hi)
    return 1.0;
  return special::reg_inc_beta(alpha, beta, (y - lo) / (hi - lo));
}

double BetaMarginal::quantile(double p) const {
  return lo + (hi - lo) * special::reg_inc_beta_inv(alpha, beta, p);
}

ParameterDistribution::ParameterDistribution(std::vector<BetaMarginal> marginals)
    : marginals_(std::move(marginals)) {
  for (const auto &m : marginals_) {
    if (!(m.alpha > 0.0) || !(m.beta > 0.0))
      throw std::invalid_argument("ParameterDistribution: Beta shapes must be positive");
    if (!(m.hi > m.lo))
      throw std::invalid_argument("ParameterDistribution: empty support interval");
  }
}

ParameterDistribution ParameterDistribution::benchmark(double alpha, double beta) {
  std::vector<BetaMarginal> m;
  for (int i = 0; i < 4; ++i)
    m.push_back({alpha, beta, 1.0, 3.0});
  for (int i = 0; i < 2; ++i)
    m.push_back({alpha, beta, 2.0, 6.0});
  return ParameterDistribution(std::move(m));
}

ParameterDistribution ParameterDistribution::uniform_on_support() const {
  std::vector<BetaMarginal> m = marginals_;
  for (auto &c : m) {
    c.alpha = 1.0;
    c.beta = 1.0;
  }
  return ParameterDistribution(std::move(m));
}

Eigen::VectorXd ParameterDistribution::lower() const {
  Eigen::VectorXd v(dim());
  for (int i = 0; i < dim(); ++i)
    v[i] = marginals_[static_cast<size_t>(i)].lo;
  return v;
}

Eigen::VectorXd ParameterDistribution::upper() const {
  Eigen::VectorXd v(dim());
  for (int i = 0; i < dim(); ++i)
    v[i] = marginals_[static_cast<size_t>(i)].hi;
  return v;
}

double ParameterDistribution::support_volume() const {
  double vol = 1.0;
  for (const auto &m : marginals_)
    vol *= m.hi - m.lo;
  return vol;
}

bool ParameterDistribution::contains(const ParameterVector &y, double tol) const {
  if (y.size() != dim())
    return false;
  for (int i = 0; i < dim(); ++i) {
    const auto &m = marginals_[static_cast<size_t>(i)];
    if (y[i] < m.lo - tol || y[i] > m.hi + tol)
      return false;
  }
  return true;
}

double ParameterDistribution::density(const ParameterVector &y) const {
  if (y.size() != dim())
    throw std::invalid_argument("density: parameter dimension mismatch");
  double rho = 1.0;
  for (int i = 0; i < dim(); ++i)
    rho *= marginals_[static_cast<size_t>(i)].density(y[i]);
  return rho;
}

std::vector<ParameterVector> ParameterDistribution::sample(int n, std::uint64_t seed) const {
  if (n < 1)
    throw std::invalid_argument("sample: n must be >= 1");
  std::mt19937_64 rng(seed);
  std::vector<ParameterVector> out;
  out.reserve(static_cast<size_t>(n));
  for (int s = 0; s < n; ++s) {
    ParameterVector y(dim());
    for (int i = 0; i < dim(); ++i)
      y[i] = marginals_[static_cast<size_t>(i)].quantile(uniform01_from_bits(rng()));
    out.push_back(std::move(y));
  }
  return out;
}

std::vector<ParameterVector> ParameterDistribution::sample_uniform(int n,
                                                                   std::uint64_t seed) const {
  if (n < 1)
    throw std::invalid_argument("sample_uniform: n must be >= 1");
  std::mt19937_64 rng(seed);
  std::vector<ParameterVector> out;
  out.reserve(static_cast<size_t>(n));
  for (int s = 0; s < n; ++s) {
    ParameterVector y(dim());
    for (int i = 0; i < dim(); ++i) {
      const auto &m = marginals_[static_cast<size_t>(i)];
      y[i] = m.lo + (m.hi - m.lo) * uniform01_from_bits(rng());
    }
    out.push_back(std::move(y));
  }
  return out;
}

double weight_one(const ParameterVector &) { return 1.0; }

double weight_sqrt_rho(const ParameterDistribution &dist, const ParameterVector &y) {
  return std::sqrt(dist.density(y));
}

double weight_rho(const ParameterDistribution &dist, const ParameterVector &y) {
  return dist.density(y);
}

double evaluate_weight(const ParameterDistribution &dist, WeightKind kind,
                       const ParameterVector &y) {
  switch (kind) {
  case WeightKind::One:
    return weight_one(y);
  case WeightKind::SqrtRho:
    return weight_sqrt_rho(dist, y);
  case WeightKind::Rho:
    return weight_rho(dist, y);
  }
  return 1.0;
}

std::string to_string(WeightKind kind) {
  switch (kind) {
  case WeightKind::One:
    return "one";
  case WeightKind::SqrtRho:
    return "sqrt_rho";
  case WeightKind::Rho:
    return "rho";
  }
  return "one";
}

WeightKind weight_kind_from_string(const std::string &s) {
  if (s == "one")
    return WeightKind::One;
  if (s == "sqrt_rho")
    return WeightKind::SqrtRho;
  if (s == "rho")
    return WeightKind::Rho;
  throw std::invalid_argument("unknown weight function tag: " + s);
}

WeightFunction make_weight(const ParameterDistribution &dist, WeightKind kind) {
  if (kind == WeightKind::One)
    return [](const ParameterVector &) { return 1.0; };
  return [dist, kind](const ParameterVector &y) {
    return evaluate_weight(dist, kind, y);
  };
}

} // namespace wrom
