// Copyright (c) 2026 The wrom developers.
// SPDX-License-Identifier: Apache-2.0
//
// Experiment driver: declarative config -> offline build -> per-N error
// curves, archive, manifest. Also the cross-run comparison table.

#ifndef WROM_HARNESS_HPP
#define WROM_HARNESS_HPP

#include "wrom/online.hpp"
#include "wrom/quadrature.hpp"
#include "wrom/reduced_basis.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace wrom {

/// Flat declarative experiment description (JSON on disk, schema_version 1).
struct ExperimentConfig {
  int schema_version = 1;
  int n_sub = 16;
  double alpha = 10.0, beta = 10.0;
  std::string method = "pod_mc";
  // Monte-Carlo methods use training_size; tensor rules use training_level
  // points per dimension; the sparse rule uses training_level as its level.
  // 0 = method-specific default (3 per dimension tensor, level-4 sparse).
  int training_size = 100;
  int training_level = 0;
  std::uint64_t training_seed = 7;
  std::string training_sampling; // greedy only: "uniform" | "density"; "" = auto
  std::string weight;            // greedy weight tag; "" = method default
  std::string first_pick = "first_node"; // or "density_mode"
  double eps_tol = 1e-10;
  int n_max = 20;
  int test_size = 100;
  std::uint64_t test_seed = 42;
  std::string inner_product = "h1"; // or "energy"
  int inject_singular_at_n = 0;     // failure-injection hook for tests
  bool full_scale = false;          // published training-set sizes
  std::string out_dir = ".";
};

extern const std::vector<std::string> kMethods;

ExperimentConfig load_config(const std::string &path);
void save_config(const std::string &path, const ExperimentConfig &cfg);

/// Fill the "auto" fields (weight, sampling, level) with method defaults.
ExperimentConfig resolve_config(ExperimentConfig cfg);

/// Validate the method/sampling/weighting grid of a resolved config; throws
/// std::invalid_argument with an explanatory message on meaningless
/// combinations (for example density-sampled POD nodes with density
/// weighting, which has no quadrature interpretation).
void validate_config(const ExperimentConfig &cfg);

/// Build the training set a config describes (after validation).
TrainingSet make_training_set(const ExperimentConfig &cfg,
                              const ParameterDistribution &dist);

struct RunResult {
  ReducedBasis rb;
  int exit_code = 0; // 0 ok, 3 numerical breakdown (partial artifacts kept)
  std::string curve_path, archive_path, manifest_path;
};

/// Execute one experiment: offline build per config, error curve for every
/// nested basis prefix N = 1..N_built, archive, history/spectrum sidecars,
/// and a JSON manifest. Breakdowns are recorded in the manifest with the
/// failing N and y; curves up to the last good N are still written.
RunResult run_experiment(const ExperimentConfig &cfg);

/// Align >= 2 run directories (identical mesh/distribution/test seed
/// required) into a per-N comparison table with error ratios against the
/// first run, plus a whitespace plot-data file.
void compare_runs(const std::vector<std::string> &run_dirs,
                  const std::string &out_dir);

} // namespace wrom

#endif
