// Copyright (c) 2026 The wrom developers.
// SPDX-License-Identifier: Apache-2.0
//
// Training-set generators: Monte-Carlo sampling and deterministic quadrature
// rules (tensor and Smolyak sparse grids) whose nodes and weights drive the
// weighted POD stage. All 1D rules live on the reference interval [0,1] and
// are normalized against a probability measure (weights sum to 1).

#ifndef WROM_QUADRATURE_HPP
#define WROM_QUADRATURE_HPP

#include "wrom/param_space.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace wrom {

enum class RuleFamily { GaussLegendre, GaussJacobi, ClenshawCurtis, MonteCarlo };

/// One-dimensional quadrature rule on [0,1], probability-normalized.
struct Rule1D {
  std::vector<double> nodes;   // ascending
  std::vector<double> weights; // sum to 1
  RuleFamily family = RuleFamily::GaussLegendre;
  double alpha = 1.0; // Beta shapes for GaussJacobi
  double beta = 1.0;
  int level = 0; // ClenshawCurtis level

  int size() const { return static_cast<int>(nodes.size()); }
};

/// n-point Gauss-Legendre rule, exact for polynomials of degree <= 2n-1
/// against the uniform probability measure on [0,1].
Rule1D gauss_legendre_1d(int n);

/// n-point Gauss rule for the Beta(alpha,beta) probability measure on [0,1],
/// built by the Golub-Welsch eigenvalue construction from the Jacobi
/// recurrence with exponents a = beta-1, b = alpha-1.
Rule1D gauss_jacobi_1d(int n, double alpha, double beta);

/// Nested Clenshaw-Curtis rule: 1 node at level 1, 2^(l-1)+1 nodes at level
/// l >= 2; the node set of level l-1 is bit-identical to every other node of
/// level l. Weights are calibrated to the uniform probability measure.
Rule1D clenshaw_curtis_1d(int level);

/// Quadrature training set on Gamma: nodes, weights, provenance tag.
struct TrainingSet {
  std::vector<ParameterVector> nodes;
  std::vector<double> weights;
  std::string provenance;

  int size() const { return static_cast<int>(nodes.size()); }
  int dim() const { return nodes.empty() ? 0 : static_cast<int>(nodes.front().size()); }
  double weight_sum() const;
};

/// Cartesian product of K one-dimensional rules, nodes mapped affinely to
/// each component's support. Rejects products above 10^7 nodes.
TrainingSet tensor_rule(const std::vector<Rule1D> &rules,
                        const ParameterDistribution &dist);

enum class SmolyakFamily { ClenshawCurtis, GaussJacobi, GaussLegendre };

/// Smolyak combination-technique sparse rule of level q >= 1 over the given
/// 1D family (Clenshaw-Curtis levels grow as 2^(l-1)+1 nodes, Gauss levels
/// linearly as l nodes). The combination depth is Q = q + K - 1 so that K=1
/// degenerates to the level-q 1D rule; duplicate nodes are merged with a
/// 1e-12 coordinate tolerance. Weights may be negative.
TrainingSet smolyak_rule(int q, SmolyakFamily family,
                         const ParameterDistribution &dist);

/// Merge nodes equal up to `tol` in every coordinate, summing weights.
/// Assumes distinct physical nodes are separated by much more than tol.
TrainingSet merge_duplicate_nodes(const TrainingSet &ts, double tol = 1e-12);

enum class McSampling { Distribution, Uniform };
enum class McWeighting { Plain, DensityReweighted };

/// Monte-Carlo training sets. Plain weighting gives w_i = 1/n; density
/// reweighting (uniform sampling only) gives w_i = rho(y_i)*|Gamma|/n, the
/// importance-corrected quadrature for the rho-weighted mean-square error.
/// Distribution sampling combined with density reweighting has no quadrature
/// interpretation and is rejected.
TrainingSet monte_carlo_rule(const ParameterDistribution &dist, int n,
                             std::uint64_t seed, McSampling sampling,
                             McWeighting weighting);

/// Convert a rule calibrated to U(Gamma) into one for the rho-weighted
/// integral: w_i <- w_i * rho(y_i) * |Gamma|.
TrainingSet density_reweight(const TrainingSet &ts,
                             const ParameterDistribution &dist);

/// CSV export/import: a provenance comment line, a header row y_1..y_K,weight,
/// then one row per node.
void write_training_csv(const std::string &path, const TrainingSet &ts);
TrainingSet read_training_csv(const std::string &path);

} // namespace wrom

#endif
