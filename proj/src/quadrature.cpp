// Copyright (c) 2026 The wrom developers.
// SPDX-License-Identifier: Apache-2.0

#include "wrom/quadrature.hpp"

#include "wrom/errors.hpp"
#include "wrom/util.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace wrom {

namespace {

// Golub-Welsch: nodes are the eigenvalues of the symmetric tridiagonal Jacobi
// matrix of the orthonormal recurrence, weights the squared first components
// of its normalized eigenvectors. The recurrence coefficients below are for
// the Jacobi weight (1-x)^a (1+x)^b on [-1,1].
Rule1D golub_welsch_jacobi(int n, double a, double b) {
  if (n < 1)
    throw std::invalid_argument("quadrature: rule size must be >= 1");
  if (a <= -1.0 || b <= -1.0)
    throw std::invalid_argument("quadrature: Jacobi exponents must be > -1");

  Eigen::VectorXd diag(n), sub(std::max(n - 1, 1));
  const double ab = a + b;
  diag[0] = (b - a) / (ab + 2.0);
  for (int i = 2; i <= n; ++i) {
    const double abi = 2.0 * i + ab;
    diag[i - 1] = (b * b - a * a) / ((abi - 2.0) * abi);
  }
  if (n > 1) {
    sub[0] = std::sqrt(4.0 * (1.0 + a) * (1.0 + b) /
                       ((ab + 3.0) * (ab + 2.0) * (ab + 2.0)));
    for (int i = 2; i < n; ++i) {
      const double abi = 2.0 * i + ab;
      sub[i - 1] = std::sqrt(4.0 * i * (i + a) * (i + b) * (i + ab) /
                             ((abi * abi - 1.0) * abi * abi));
    }
  }

  Rule1D rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  if (n == 1) {
    rule.nodes[0] = 0.5 * (1.0 + diag[0]);
    rule.weights[0] = 1.0;
    return rule;
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub.head(n - 1), Eigen::ComputeEigenvectors);
  if (es.info() != Eigen::Success)
    throw EigenSolveError("quadrature: tridiagonal eigensolve failed");
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = 0.5 * (1.0 + es.eigenvalues()[i]); // map [-1,1] -> [0,1]
    const double v0 = es.eigenvectors()(0, i);
    rule.weights[i] = v0 * v0; // probabilist normalization: sums to 1 exactly
  }
  return rule;
}

int binomial(int n, int k) {
  if (k < 0 || k > n)
    return 0;
  long long r = 1;
  for (int i = 1; i <= k; ++i)
    r = r * (n - k + i) / i;
  return static_cast<int>(r);
}

// Lexicographic comparison treating coordinates within tol as equal. A strict
// weak ordering whenever duplicate clusters are tol-tight and distinct nodes
// are separated by much more than tol, which holds for the nested and
// symmetric rules produced here (cluster diameter ~1e-16, node spacing
// >= 1e-3 of the support width).
struct FuzzyLess {
  double tol;
  bool operator()(const std::vector<double> &a,
                  const std::vector<double> &b) const {
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i] < b[i] - tol)
        return true;
      if (a[i] > b[i] + tol)
        return false;
    }
    return false;
  }
};

void enumerate_level_sets(int dim, int remaining_dims, int target_sum,
                          std::vector<int> &current,
                          std::vector<std::vector<int>> &out) {
  if (remaining_dims == 1) {
    if (target_sum >= 1) {
      current.push_back(target_sum);
      out.push_back(current);
      current.pop_back();
    }
    return;
  }
  for (int l = 1; l <= target_sum - (remaining_dims - 1); ++l) {
    current.push_back(l);
    enumerate_level_sets(dim, remaining_dims - 1, target_sum - l, current, out);
    current.pop_back();
  }
}

} // namespace

double TrainingSet::weight_sum() const {
  double s = 0.0;
  for (double w : weights)
    s += w;
  return s;
}

Rule1D gauss_legendre_1d(int n) {
  Rule1D rule = golub_welsch_jacobi(n, 0.0, 0.0);
  rule.family = RuleFamily::GaussLegendre;
  return rule;
}

Rule1D gauss_jacobi_1d(int n, double alpha, double beta) {
  if (alpha <= 0.0 || beta <= 0.0)
    throw std::invalid_argument("quadrature: Beta shapes must be positive");
  // Beta(alpha,beta) density x^(alpha-1)(1-x)^(beta-1) on [0,1] pulls back to
  // the Jacobi weight with a = beta-1 (exponent of 1-x), b = alpha-1.
  Rule1D rule = golub_welsch_jacobi(n, beta - 1.0, alpha - 1.0);
  rule.family = RuleFamily::GaussJacobi;
  rule.alpha = alpha;
  rule.beta = beta;
  return rule;
}

Rule1D clenshaw_curtis_1d(int level) {
  if (level < 1)
    throw std::invalid_argument("quadrature: Clenshaw-Curtis level must be >= 1");
  Rule1D rule;
  rule.family = RuleFamily::ClenshawCurtis;
  rule.level = level;
  if (level == 1) {
    rule.nodes = {0.5};
    rule.weights = {1.0};
    return rule;
  }
  // N is a power of two, so the angle j*pi/N of every even j equals the angle
  // j/2*pi/(N/2) of the coarser rule bit for bit; the node sets nest exactly.
  const int N = 1 << (level - 1);
  const int n = N + 1;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int j = 0; j <= N; ++j) {
    const double theta = static_cast<double>(j) * M_PI / static_cast<double>(N);
    rule.nodes[j] = 0.5 * (1.0 - std::cos(theta)); // ascending in [0,1]
    double s = 1.0;
    for (int k = 1; k <= N / 2; ++k) {
      const double bk = (k == N / 2) ? 1.0 : 2.0;
      s -= bk * std::cos(2.0 * k * theta) / (4.0 * k * k - 1.0);
    }
    const double cj = (j == 0 || j == N) ? 1.0 : 2.0;
    rule.weights[j] = 0.5 * cj * s / N; // /2: uniform probability on [0,1]
  }
  return rule;
}

TrainingSet tensor_rule(const std::vector<Rule1D> &rules,
                        const ParameterDistribution &dist) {
  const int K = dist.dim();
  if (static_cast<int>(rules.size()) != K)
    throw std::invalid_argument("tensor_rule: need one 1D rule per parameter");
  double total = 1.0;
  for (const Rule1D &r : rules)
    total *= r.size();
  if (total > 1e7)
    throw std::invalid_argument("tensor_rule: product exceeds 10^7 nodes");

  TrainingSet ts;
  const int n = static_cast<int>(total);
  ts.nodes.reserve(n);
  ts.weights.reserve(n);
  std::vector<int> idx(K, 0);
  for (int flat = 0; flat < n; ++flat) {
    ParameterVector y(K);
    double w = 1.0;
    for (int d = 0; d < K; ++d) {
      const BetaMarginal &m = dist.marginal(d);
      y[d] = m.lo + rules[d].nodes[idx[d]] * (m.hi - m.lo);
      w *= rules[d].weights[idx[d]];
    }
    ts.nodes.push_back(std::move(y));
    ts.weights.push_back(w);
    for (int d = K - 1; d >= 0; --d) {
      if (++idx[d] < rules[d].size())
        break;
      idx[d] = 0;
    }
  }
  std::ostringstream tag;
  tag << "tensor(";
  for (int d = 0; d < K; ++d)
    tag << (d ? "x" : "") << rules[d].size();
  tag << ")";
  ts.provenance = tag.str();
  return ts;
}

TrainingSet merge_duplicate_nodes(const TrainingSet &ts, double tol) {
  std::map<std::vector<double>, double, FuzzyLess> acc(FuzzyLess{tol});
  const int K = ts.dim();
  for (int i = 0; i < ts.size(); ++i) {
    std::vector<double> key(ts.nodes[i].data(), ts.nodes[i].data() + K);
    acc[key] += ts.weights[i];
  }
  TrainingSet out;
  out.provenance = ts.provenance;
  out.nodes.reserve(acc.size());
  out.weights.reserve(acc.size());
  for (const auto &[key, w] : acc) {
    out.nodes.push_back(Eigen::Map<const ParameterVector>(key.data(), K));
    out.weights.push_back(w);
  }
  return out;
}

TrainingSet smolyak_rule(int q, SmolyakFamily family,
                         const ParameterDistribution &dist) {
  if (q < 1)
    throw std::invalid_argument("smolyak_rule: level must be >= 1");
  const int K = dist.dim();
  const int Q = q + K - 1;

  auto rule_at = [&](int level, int d) -> Rule1D {
    switch (family) {
    case SmolyakFamily::ClenshawCurtis:
      return clenshaw_curtis_1d(level);
    case SmolyakFamily::GaussJacobi: {
      const BetaMarginal &m = dist.marginal(d);
      return gauss_jacobi_1d(level, m.alpha, m.beta);
    }
    case SmolyakFamily::GaussLegendre:
      return gauss_legendre_1d(level);
    }
    throw std::logic_error("smolyak_rule: unknown family");
  };

  TrainingSet raw;
  const int lo = std::max(K, Q - K + 1);
  for (int s = lo; s <= Q; ++s) {
    std::vector<std::vector<int>> level_sets;
    std::vector<int> scratch;
    enumerate_level_sets(K, K, s, scratch, level_sets);
    const int parity = Q - s;
    const double coeff =
        ((parity % 2) ? -1.0 : 1.0) * binomial(K - 1, parity);
    for (const std::vector<int> &lset : level_sets) {
      std::vector<Rule1D> component(K);
      for (int d = 0; d < K; ++d)
        component[d] = rule_at(lset[d], d);
      TrainingSet block = tensor_rule(component, dist);
      for (int i = 0; i < block.size(); ++i) {
        raw.nodes.push_back(std::move(block.nodes[i]));
        raw.weights.push_back(coeff * block.weights[i]);
      }
    }
  }

  TrainingSet merged = merge_duplicate_nodes(raw, 1e-12);
  std::ostringstream tag;
  const char *fam = family == SmolyakFamily::ClenshawCurtis ? "clenshaw_curtis"
                    : family == SmolyakFamily::GaussJacobi  ? "gauss_jacobi"
                                                            : "gauss_legendre";
  tag << "smolyak(" << fam << ",q=" << q << ",nodes=" << merged.size() << ")";
  merged.provenance = tag.str();
  return merged;
}

TrainingSet monte_carlo_rule(const ParameterDistribution &dist, int n,
                             std::uint64_t seed, McSampling sampling,
                             McWeighting weighting) {
  if (n < 1)
    throw std::invalid_argument("monte_carlo_rule: sample count must be >= 1");
  if (sampling == McSampling::Distribution &&
      weighting == McWeighting::DensityReweighted)
    throw std::invalid_argument(
        "monte_carlo_rule: density reweighting of density-drawn samples has "
        "no quadrature interpretation; sample uniformly instead");

  TrainingSet ts;
  ts.nodes = (sampling == McSampling::Distribution)
                 ? dist.sample(n, seed)
                 : dist.sample_uniform(n, seed);
  ts.weights.assign(n, 1.0 / n);
  if (weighting == McWeighting::DensityReweighted) {
    const double vol = dist.support_volume();
    for (int i = 0; i < n; ++i)
      ts.weights[i] = dist.density(ts.nodes[i]) * vol / n;
  }
  std::ostringstream tag;
  tag << "monte_carlo("
      << (sampling == McSampling::Distribution ? "density" : "uniform") << ","
      << (weighting == McWeighting::Plain ? "plain" : "density_reweighted")
      << ",n=" << n << ",seed=" << seed << ")";
  ts.provenance = tag.str();
  return ts;
}

TrainingSet density_reweight(const TrainingSet &ts,
                             const ParameterDistribution &dist) {
  TrainingSet out = ts;
  const double vol = dist.support_volume();
  for (int i = 0; i < out.size(); ++i)
    out.weights[i] *= dist.density(out.nodes[i]) * vol;
  out.provenance = ts.provenance + "+density_reweight";
  return out;
}

void write_training_csv(const std::string &path, const TrainingSet &ts) {
  std::ofstream f(path);
  if (!f)
    throw std::runtime_error("write_training_csv: cannot open " + path);
  f << "# provenance: " << ts.provenance << "\n";
  const int K = ts.dim();
  for (int d = 0; d < K; ++d)
    f << "y_" << (d + 1) << ",";
  f << "weight\n";
  for (int i = 0; i < ts.size(); ++i) {
    for (int d = 0; d < K; ++d)
      f << fmt_double(ts.nodes[i][d]) << ",";
    f << fmt_double(ts.weights[i]) << "\n";
  }
  if (!f)
    throw std::runtime_error("write_training_csv: write failed for " + path);
}

TrainingSet read_training_csv(const std::string &path) {
  std::ifstream f(path);
  if (!f)
    throw std::runtime_error("read_training_csv: cannot open " + path);
  TrainingSet ts;
  std::string line;
  int K = -1;
  while (std::getline(f, line)) {
    if (line.empty())
      continue;
    if (line[0] == '#') {
      const std::string marker = "# provenance: ";
      if (line.rfind(marker, 0) == 0)
        ts.provenance = line.substr(marker.size());
      continue;
    }
    if (line.rfind("y_1", 0) == 0) { // header row
      K = static_cast<int>(std::count(line.begin(), line.end(), ','));
      continue;
    }
    std::vector<double> vals;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ','))
      vals.push_back(std::strtod(cell.c_str(), nullptr));
    if (K < 0)
      K = static_cast<int>(vals.size()) - 1;
    if (static_cast<int>(vals.size()) != K + 1)
      throw std::runtime_error("read_training_csv: malformed row in " + path);
    ts.nodes.push_back(Eigen::Map<const ParameterVector>(vals.data(), K));
    ts.weights.push_back(vals[K]);
  }
  return ts;
}

} // namespace wrom
