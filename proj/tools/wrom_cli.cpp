// Copyright (c) 2026 The wrom developers.
// SPDX-License-Identifier: Apache-2.0
//
// Command-line driver: build experiments from a config file, evaluate an
// archived reduced basis at parameter lists, compare runs, and inspect
// training grids. Exit codes: 0 success, 2 config rejection, 3 numerical
// breakdown (partial artifacts are still on disk).

#include "wrom/errors.hpp"
#include "wrom/greedy.hpp"
#include "wrom/harness.hpp"
#include "wrom/online.hpp"
#include "wrom/util.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <vector>

namespace {

// Parameter-list CSV: header y_1..y_K with an optional trailing weight
// column (ignored), one row per point.
std::vector<wrom::ParameterVector> read_param_list(const std::string &path) {
  std::ifstream f(path);
  if (!f)
    throw std::invalid_argument("evaluate: cannot open " + path);
  std::string line;
  int n_cols = -1;
  bool has_weight = false;
  std::vector<wrom::ParameterVector> out;
  while (std::getline(f, line)) {
    if (line.empty() || line[0] == '#')
      continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ','))
      cells.push_back(cell);
    if (n_cols < 0 && line.rfind("y_1", 0) == 0) {
      n_cols = static_cast<int>(cells.size());
      has_weight = cells.back() == "weight";
      continue;
    }
    if (n_cols < 0) {
      n_cols = static_cast<int>(cells.size());
      has_weight = false;
    }
    const int K = has_weight ? n_cols - 1 : n_cols;
    if (static_cast<int>(cells.size()) != n_cols)
      throw std::invalid_argument("evaluate: malformed row in " + path);
    wrom::ParameterVector y(K);
    for (int d = 0; d < K; ++d)
      y[d] = std::strtod(cells[d].c_str(), nullptr);
    out.push_back(std::move(y));
  }
  return out;
}

int cmd_build(const std::string &config_path, bool has_seed,
              std::uint64_t seed, const std::string &out_dir,
              bool full_scale) {
  wrom::ExperimentConfig cfg = wrom::load_config(config_path);
  if (has_seed)
    cfg.training_seed = seed;
  if (!out_dir.empty())
    cfg.out_dir = out_dir;
  if (full_scale)
    cfg.full_scale = true;
  const wrom::RunResult result = wrom::run_experiment(cfg);
  std::cout << "method=" << result.rb.meta.method
            << " status=" << wrom::to_string(result.rb.meta.status)
            << " N=" << result.rb.n_basis() << " curve=" << result.curve_path
            << "\n";
  if (result.exit_code == 3)
    std::cerr << "numerical breakdown at N=" << result.rb.meta.breakdown_n
              << " (see manifest)\n";
  return result.exit_code;
}

int cmd_evaluate(const std::string &archive_path, const std::string &params_path,
                 const std::string &out_path) {
  const wrom::ReducedBasis rb = wrom::read_archive(archive_path);
  if (rb.n_basis() == 0)
    throw std::invalid_argument("evaluate: archive holds an empty basis");
  if (rb.A_red.size() != 4 || rb.f_red.size() != 2)
    throw std::invalid_argument(
        "evaluate: archive does not hold the six-parameter benchmark layout");
  const std::vector<wrom::ParameterVector> ys = read_param_list(params_path);

  std::ofstream f(out_path);
  if (!f)
    throw std::invalid_argument("evaluate: cannot open " + out_path);
  f << "y_1,y_2,y_3,y_4,y_5,y_6,output,estimator\n";
  for (const auto &y : ys) {
    if (y.size() != 6)
      throw std::invalid_argument("evaluate: parameters must have 6 components");
    const Eigen::VectorXd th_a = y.head(4), th_f = y.tail(2);
    const Eigen::VectorXd uN =
        wrom::solve_reduced_system(rb.A_red, rb.f_red, th_a, th_f, y);
    double s = 0.0;
    for (int q = 0; q < 2; ++q)
      s += th_f[q] * rb.f_red[q].dot(uN);
    f << wrom::fmt_double(y[0]);
    for (int d = 1; d < 6; ++d)
      f << "," << wrom::fmt_double(y[d]);
    f << "," << wrom::fmt_double(s) << ",";
    f << (rb.estimator.empty()
              ? "nan"
              : wrom::fmt_double(wrom::estimate(rb.estimator, th_a, th_f, uN)));
    f << "\n";
  }
  std::cout << "evaluated " << ys.size() << " parameters -> " << out_path
            << "\n";
  return 0;
}

int cmd_gridinfo(const std::string &config_path, const std::string &out_path) {
  const wrom::ExperimentConfig cfg =
      wrom::resolve_config(wrom::load_config(config_path));
  wrom::validate_config(cfg);
  const wrom::ParameterDistribution dist =
      wrom::ParameterDistribution::benchmark(cfg.alpha, cfg.beta);
  const wrom::TrainingSet ts = wrom::make_training_set(cfg, dist);
  wrom::write_training_csv(out_path, ts);
  std::cout << "provenance=" << ts.provenance << " nodes=" << ts.size()
            << " weight_sum=" << wrom::fmt_double(ts.weight_sum()) << "\n";
  return 0;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"weighted reduced order methods for parametrized elliptic PDEs"};
  app.require_subcommand(1);

  std::string config_path, out_dir, archive_path, params_path, out_path;
  std::uint64_t seed = 0;
  bool full_scale = false;
  std::vector<std::string> run_dirs;

  CLI::App *build = app.add_subcommand("build", "run an experiment config");
  build->add_option("--config", config_path, "experiment config (JSON)")
      ->required();
  CLI::Option *seed_opt =
      build->add_option("--seed", seed, "override the training seed");
  build->add_option("--out", out_dir, "output directory");
  build->add_flag("--full-scale", full_scale,
                  "use the published training-set sizes");

  CLI::App *evaluate =
      app.add_subcommand("evaluate", "apply an archived basis to parameters");
  evaluate->add_option("--archive", archive_path, "reduced-basis archive")
      ->required();
  evaluate->add_option("--params", params_path, "parameter-list CSV")
      ->required();
  evaluate->add_option("--out", out_path, "output CSV")->required();

  CLI::App *compare =
      app.add_subcommand("compare", "align runs into a per-N ratio table");
  compare->add_option("dirs", run_dirs, "run directories")->expected(-2);
  compare->add_option("--out", out_dir, "output directory")->required();

  CLI::App *gridinfo =
      app.add_subcommand("gridinfo", "export a config's training set");
  gridinfo->add_option("--config", config_path, "experiment config (JSON)")
      ->required();
  gridinfo->add_option("--out", out_path, "node/weight CSV")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (build->parsed())
      return cmd_build(config_path, seed_opt->count() > 0, seed, out_dir,
                       full_scale);
    if (evaluate->parsed())
      return cmd_evaluate(archive_path, params_path, out_path);
    if (compare->parsed()) {
      wrom::compare_runs(run_dirs, out_dir);
      std::cout << "wrote " << out_dir << "/compare.csv\n";
      return 0;
    }
    if (gridinfo->parsed())
      return cmd_gridinfo(config_path, out_path);
  } catch (const std::invalid_argument &e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const wrom::SingularReducedSystem &e) {
    std::cerr << "numerical breakdown: " << e.what() << "\n";
    return 3;
  } catch (const wrom::NumericalError &e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
