// Copyright (c) 2026 The wrom developers.
// SPDX-License-Identifier: Apache-2.0

#include "wrom/harness.hpp"

#include "wrom/errors.hpp"
#include "wrom/greedy.hpp"
#include "wrom/pod.hpp"
#include "wrom/util.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace wrom {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

const std::vector<std::string> kMethods = {
    "greedy_standard", "greedy_weighted",    "pod_standard",
    "pod_uniform_mc",  "pod_mc",             "pod_gauss_legendre",
    "pod_sparse_gauss_jacobi"};

namespace {

bool is_greedy(const std::string &method) {
  return method.rfind("greedy", 0) == 0;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

} // namespace

ExperimentConfig load_config(const std::string &path) {
  std::ifstream f(path);
  if (!f)
    throw std::invalid_argument("config: cannot open " + path);
  json j;
  try {
    f >> j;
  } catch (const json::parse_error &e) {
    throw std::invalid_argument("config: JSON parse error in " + path + ": " +
                                e.what());
  }

  ExperimentConfig cfg;
  const std::map<std::string, std::function<void(const json &)>> setters = {
      {"schema_version", [&](const json &v) { cfg.schema_version = v; }},
      {"n_sub", [&](const json &v) { cfg.n_sub = v; }},
      {"alpha", [&](const json &v) { cfg.alpha = v; }},
      {"beta", [&](const json &v) { cfg.beta = v; }},
      {"method", [&](const json &v) { cfg.method = v; }},
      {"training_size", [&](const json &v) { cfg.training_size = v; }},
      {"training_level", [&](const json &v) { cfg.training_level = v; }},
      {"training_seed", [&](const json &v) { cfg.training_seed = v; }},
      {"training_sampling", [&](const json &v) { cfg.training_sampling = v; }},
      {"weight", [&](const json &v) { cfg.weight = v; }},
      {"first_pick", [&](const json &v) { cfg.first_pick = v; }},
      {"eps_tol", [&](const json &v) { cfg.eps_tol = v; }},
      {"N_max", [&](const json &v) { cfg.n_max = v; }},
      {"test_size", [&](const json &v) { cfg.test_size = v; }},
      {"test_seed", [&](const json &v) { cfg.test_seed = v; }},
      {"inner_product", [&](const json &v) { cfg.inner_product = v; }},
      {"inject_singular_at_n",
       [&](const json &v) { cfg.inject_singular_at_n = v; }},
      {"full_scale", [&](const json &v) { cfg.full_scale = v; }},
      {"out_dir", [&](const json &v) { cfg.out_dir = v; }},
  };
  for (const auto &[key, value] : j.items()) {
    auto it = setters.find(key);
    if (it == setters.end())
      throw std::invalid_argument("config: unknown key \"" + key + "\"");
    try {
      it->second(value);
    } catch (const json::exception &e) {
      throw std::invalid_argument("config: bad value for \"" + key + "\": " +
                                  e.what());
    }
  }
  return cfg;
}

void save_config(const std::string &path, const ExperimentConfig &cfg) {
  json j;
  j["schema_version"] = cfg.schema_version;
  j["n_sub"] = cfg.n_sub;
  j["alpha"] = cfg.alpha;
  j["beta"] = cfg.beta;
  j["method"] = cfg.method;
  j["training_size"] = cfg.training_size;
  j["training_level"] = cfg.training_level;
  j["training_seed"] = cfg.training_seed;
  j["training_sampling"] = cfg.training_sampling;
  j["weight"] = cfg.weight;
  j["first_pick"] = cfg.first_pick;
  j["eps_tol"] = cfg.eps_tol;
  j["N_max"] = cfg.n_max;
  j["test_size"] = cfg.test_size;
  j["test_seed"] = cfg.test_seed;
  j["inner_product"] = cfg.inner_product;
  j["inject_singular_at_n"] = cfg.inject_singular_at_n;
  j["full_scale"] = cfg.full_scale;
  j["out_dir"] = cfg.out_dir;
  std::ofstream f(path);
  if (!f)
    throw std::runtime_error("save_config: cannot open " + path);
  f << j.dump(2) << "\n";
}

ExperimentConfig resolve_config(ExperimentConfig cfg) {
  if (cfg.weight.empty())
    cfg.weight = (cfg.method == "greedy_weighted") ? "sqrt_rho" : "one";
  if (cfg.training_sampling.empty() && is_greedy(cfg.method))
    cfg.training_sampling =
        (cfg.method == "greedy_weighted") ? "density" : "uniform";
  if (cfg.training_level == 0)
    cfg.training_level = (cfg.method == "pod_sparse_gauss_jacobi") ? 4 : 3;
  if (cfg.full_scale)
    cfg.training_size = 500; // published Monte-Carlo budget
  return cfg;
}

void validate_config(const ExperimentConfig &cfg) {
  if (cfg.schema_version != 1)
    throw std::invalid_argument("config: unsupported schema_version " +
                                std::to_string(cfg.schema_version));
  if (std::find(kMethods.begin(), kMethods.end(), cfg.method) == kMethods.end())
    throw std::invalid_argument("config: unknown method \"" + cfg.method +
                                "\"");
  if (cfg.n_sub < 2 || cfg.n_sub % 2 != 0)
    throw std::invalid_argument("config: n_sub must be even and >= 2");
  if (!(cfg.alpha > 0.0) || !(cfg.beta > 0.0))
    throw std::invalid_argument("config: Beta shapes must be positive");
  if (!(cfg.eps_tol > 0.0))
    throw std::invalid_argument("config: eps_tol must be positive");
  if (cfg.n_max < 1 || cfg.test_size < 1 || cfg.training_size < 1 ||
      cfg.training_level < 1)
    throw std::invalid_argument(
        "config: N_max, sizes and levels must be >= 1");
  if (cfg.inner_product != "h1" && cfg.inner_product != "energy")
    throw std::invalid_argument("config: inner_product must be h1 or energy");
  if (cfg.first_pick != "first_node" && cfg.first_pick != "density_mode")
    throw std::invalid_argument(
        "config: first_pick must be first_node or density_mode");
  if (cfg.inject_singular_at_n != 0 &&
      (cfg.inject_singular_at_n < 2 || cfg.inject_singular_at_n > cfg.n_max))
    throw std::invalid_argument(
        "config: inject_singular_at_n must be 0 (off) or in [2, N_max]");

  const WeightKind wk = weight_kind_from_string(cfg.weight); // validates tag
  if (is_greedy(cfg.method)) {
    if (cfg.training_sampling != "uniform" && cfg.training_sampling != "density")
      throw std::invalid_argument(
          "config: training_sampling must be uniform or density");
    if (cfg.method == "greedy_standard" && wk != WeightKind::One)
      throw std::invalid_argument(
          "config: greedy_standard is the unweighted baseline; set weight to "
          "one or use greedy_weighted");
    if (cfg.method == "greedy_weighted" && wk == WeightKind::One)
      throw std::invalid_argument(
          "config: greedy_weighted needs weight sqrt_rho or rho");
  } else {
    if (!cfg.training_sampling.empty())
      throw std::invalid_argument(
          "config: training_sampling applies to greedy methods only; POD "
          "sampling is implied by the method name");
    if (cfg.method == "pod_mc" && wk == WeightKind::Rho)
      throw std::invalid_argument(
          "config: pod_mc draws training nodes from the density already; "
          "weighting them by rho on top does not admit an interpretation in "
          "terms of the quadrature formula. Use pod_uniform_mc for "
          "density-weighted uniform nodes, or pod_mc with weight one");
    if (wk != WeightKind::One)
      throw std::invalid_argument(
          "config: POD weighting is determined by the training rule; set "
          "weight to one");
  }
}

TrainingSet make_training_set(const ExperimentConfig &cfg,
                              const ParameterDistribution &dist) {
  const int n = cfg.training_size;
  if (cfg.method == "greedy_standard" || cfg.method == "greedy_weighted") {
    const McSampling sampling = cfg.training_sampling == "density"
                                    ? McSampling::Distribution
                                    : McSampling::Uniform;
    return monte_carlo_rule(dist, n, cfg.training_seed, sampling,
                            McWeighting::Plain);
  }
  if (cfg.method == "pod_standard")
    return monte_carlo_rule(dist, n, cfg.training_seed, McSampling::Uniform,
                            McWeighting::Plain);
  if (cfg.method == "pod_uniform_mc")
    return monte_carlo_rule(dist, n, cfg.training_seed, McSampling::Uniform,
                            McWeighting::DensityReweighted);
  if (cfg.method == "pod_mc")
    return monte_carlo_rule(dist, n, cfg.training_seed,
                            McSampling::Distribution, McWeighting::Plain);
  if (cfg.method == "pod_gauss_legendre") {
    std::vector<Rule1D> rules(dist.dim(), gauss_legendre_1d(cfg.training_level));
    return density_reweight(tensor_rule(rules, dist), dist);
  }
  if (cfg.method == "pod_sparse_gauss_jacobi")
    return smolyak_rule(cfg.training_level, SmolyakFamily::GaussJacobi, dist);
  throw std::invalid_argument("config: unknown method \"" + cfg.method + "\"");
}

namespace {

json parameter_to_json(const ParameterVector &y) {
  json a = json::array();
  for (Eigen::Index i = 0; i < y.size(); ++i)
    a.push_back(y[i]);
  return a;
}

struct CurveRow {
  int n = 0;
  ErrorStats stats;
};

void write_curve_csv(const std::string &path, const ExperimentConfig &cfg,
                     const std::vector<CurveRow> &rows) {
  std::ofstream f(path);
  if (!f)
    throw std::runtime_error("run: cannot open " + path);
  f << "method,alpha,beta,N,mean_sq_error,max_error,estimator_mean_sq,seed\n";
  for (const CurveRow &r : rows)
    f << cfg.method << "," << fmt_double(cfg.alpha) << ","
      << fmt_double(cfg.beta) << "," << r.n << ","
      << fmt_double(r.stats.mean_sq_error) << ","
      << fmt_double(r.stats.max_error) << ","
      << fmt_double(r.stats.estimator_mean_sq) << "," << cfg.test_seed << "\n";
}

} // namespace

RunResult run_experiment(const ExperimentConfig &raw_cfg) {
  const ExperimentConfig cfg = resolve_config(raw_cfg);
  validate_config(cfg);
  fs::create_directories(cfg.out_dir);

  const ParameterDistribution dist =
      ParameterDistribution::benchmark(cfg.alpha, cfg.beta);
  const TruthSpace space = build_truth_space(
      cfg.n_sub,
      cfg.inner_product == "energy" ? InnerProduct::Energy : InnerProduct::H1);
  const AffineOperatorSet ops =
      assemble_affine(space, lame_lambda(1.0, 0.3), lame_mu(1.0, 0.3));
  const TrainingSet training = make_training_set(cfg, dist);

  RunResult result;
  const auto t_build = std::chrono::steady_clock::now();
  if (is_greedy(cfg.method)) {
    GreedyOptions gopts;
    gopts.eps_tol = cfg.eps_tol;
    gopts.n_max = cfg.n_max;
    gopts.first_pick = cfg.first_pick == "density_mode" ? FirstPick::DensityMode
                                                        : FirstPick::FirstNode;
    gopts.dist = &dist;
    result.rb = greedy_build(ops, space, training,
                             make_weight(dist, weight_kind_from_string(cfg.weight)),
                             gopts);
  } else {
    PodOptions popts;
    popts.eps_tol = cfg.eps_tol;
    popts.n_max = cfg.n_max;
    result.rb = pod_build(ops, space, training, popts);
  }
  const double build_seconds = seconds_since(t_build);

  ReducedBasis &rb = result.rb;
  rb.meta.method = cfg.method;
  rb.meta.weight_tag = cfg.weight;
  rb.meta.training_seed = cfg.training_seed;
  rb.meta.n_sub = cfg.n_sub;
  rb.meta.alpha = cfg.alpha;
  rb.meta.beta = cfg.beta;

  // Per-N error curves over one cached test set; every basis prefix reuses
  // the same truth solves.
  const auto t_eval = std::chrono::steady_clock::now();
  const TestSet test =
      make_test_set(ops, space, dist, cfg.test_size, cfg.test_seed);
  std::vector<CurveRow> rows;
  int eval_breakdown_n = -1;
  ParameterVector eval_breakdown_y;
  double eval_breakdown_rcond = 0.0;
  for (int n = 1; n <= rb.n_basis(); ++n) {
    ReducedBasis pre = rb.prefix(n);
    if (cfg.inject_singular_at_n == n) {
      // Failure-injection hook: duplicate the first basis vector so the
      // reduced system is exactly singular, exercising the breakdown
      // reporting path end to end.
      pre.Z.col(n - 1) = pre.Z.col(0);
      project_operators(ops, pre.Z, pre.A_red, pre.f_red);
      pre.estimator = EstimatorData{};
    }
    try {
      rows.push_back({n, evaluate_errors(pre, ops, space, test)});
    } catch (const SingularReducedSystem &e) {
      eval_breakdown_n = e.reduced_dim;
      eval_breakdown_y = e.parameter;
      eval_breakdown_rcond = e.rcond_estimate;
      break;
    }
  }
  const double eval_seconds = seconds_since(t_eval);

  result.curve_path = (fs::path(cfg.out_dir) / "curve.csv").string();
  result.archive_path = (fs::path(cfg.out_dir) / "rom.bin").string();
  result.manifest_path = (fs::path(cfg.out_dir) / "manifest.json").string();
  write_curve_csv(result.curve_path, cfg, rows);
  write_archive(result.archive_path, rb);
  write_training_csv((fs::path(cfg.out_dir) / "training.csv").string(),
                     training);
  if (is_greedy(cfg.method))
    write_history_csv((fs::path(cfg.out_dir) / "history.csv").string(), rb);
  else if (rb.spectrum.n_modes() > 0)
    write_spectrum_csv((fs::path(cfg.out_dir) / "spectrum.csv").string(),
                       rb.spectrum);

  const bool build_broke = rb.meta.status == BuildStatus::Breakdown;
  const bool eval_broke = eval_breakdown_n >= 0;
  result.exit_code = (build_broke || eval_broke) ? 3 : 0;

  json manifest;
  manifest["schema_version"] = 1;
  manifest["config"] = {{"method", cfg.method},
                        {"n_sub", cfg.n_sub},
                        {"alpha", cfg.alpha},
                        {"beta", cfg.beta},
                        {"training_size", cfg.training_size},
                        {"training_level", cfg.training_level},
                        {"training_seed", cfg.training_seed},
                        {"training_sampling", cfg.training_sampling},
                        {"weight", cfg.weight},
                        {"first_pick", cfg.first_pick},
                        {"eps_tol", cfg.eps_tol},
                        {"N_max", cfg.n_max},
                        {"test_size", cfg.test_size},
                        {"test_seed", cfg.test_seed},
                        {"inner_product", cfg.inner_product},
                        {"inject_singular_at_n", cfg.inject_singular_at_n},
                        {"full_scale", cfg.full_scale}};
  manifest["training"] = {{"provenance", training.provenance},
                          {"nodes", training.size()},
                          {"weight_sum", training.weight_sum()}};
  manifest["truth"] = {{"n_dof", space.n_dof}, {"n_free", space.n_free()}};
  manifest["build"] = {{"status", to_string(rb.meta.status)},
                       {"n_basis", rb.n_basis()},
                       {"wall_seconds", build_seconds}};
  if (!rb.estimator.empty()) {
    manifest["build"]["alpha_bar"] = rb.estimator.alpha_bar;
    manifest["build"]["gamma_bar"] = rb.estimator.gamma_bar;
  }
  if (build_broke)
    manifest["breakdown"] = {{"phase", "offline"},
                             {"N", rb.meta.breakdown_n},
                             {"y", parameter_to_json(rb.meta.breakdown_y)},
                             {"rcond", rb.meta.breakdown_rcond}};
  else if (eval_broke)
    manifest["breakdown"] = {{"phase", "evaluation"},
                             {"N", eval_breakdown_n},
                             {"y", parameter_to_json(eval_breakdown_y)},
                             {"rcond", eval_breakdown_rcond}};
  else
    manifest["breakdown"] = nullptr;
  manifest["evaluation"] = {{"rows", rows.size()},
                            {"wall_seconds", eval_seconds}};
  manifest["artifacts"] = {{"curve", "curve.csv"},
                           {"archive", "rom.bin"},
                           {"training", "training.csv"}};
  manifest["exit_code"] = result.exit_code;
  std::ofstream mf(result.manifest_path);
  if (!mf)
    throw std::runtime_error("run: cannot open " + result.manifest_path);
  mf << manifest.dump(2) << "\n";
  return result;
}

namespace {

struct LoadedRun {
  std::string name;
  json manifest;
  std::map<int, double> mse; // N -> mean_sq_error
};

LoadedRun load_run(const std::string &dir) {
  LoadedRun run;
  std::ifstream mf(fs::path(dir) / "manifest.json");
  if (!mf)
    throw std::invalid_argument("compare: no manifest.json in " + dir);
  mf >> run.manifest;
  run.name = run.manifest["config"]["method"].get<std::string>();

  std::ifstream cf(fs::path(dir) / "curve.csv");
  if (!cf)
    throw std::invalid_argument("compare: no curve.csv in " + dir);
  std::string line;
  std::getline(cf, line); // header
  std::stringstream hs(line);
  std::vector<std::string> cols;
  std::string cell;
  while (std::getline(hs, cell, ','))
    cols.push_back(cell);
  const auto idx_of = [&](const std::string &name) {
    for (std::size_t i = 0; i < cols.size(); ++i)
      if (cols[i] == name)
        return static_cast<int>(i);
    throw std::invalid_argument("compare: column " + name + " missing in " +
                                dir);
  };
  const int n_col = idx_of("N"), mse_col = idx_of("mean_sq_error");
  while (std::getline(cf, line)) {
    if (line.empty())
      continue;
    std::stringstream ls(line);
    std::vector<std::string> vals;
    while (std::getline(ls, cell, ','))
      vals.push_back(cell);
    run.mse[std::stoi(vals[n_col])] = std::strtod(vals[mse_col].c_str(), nullptr);
  }
  return run;
}

} // namespace

void compare_runs(const std::vector<std::string> &run_dirs,
                  const std::string &out_dir) {
  if (run_dirs.size() < 2)
    throw std::invalid_argument("compare: need at least two run directories");
  std::vector<LoadedRun> runs;
  for (const std::string &dir : run_dirs)
    runs.push_back(load_run(dir));

  const json &ref = runs.front().manifest["config"];
  for (const LoadedRun &run : runs) {
    const json &c = run.manifest["config"];
    for (const char *key : {"n_sub", "alpha", "beta", "test_seed", "test_size"})
      if (c[key] != ref[key])
        throw std::invalid_argument(
            "compare: mismatched test sets (config key \"" + std::string(key) +
            "\" differs); runs must share mesh, distribution and test seed");
  }

  // Disambiguate repeated method names by ordinal suffix.
  std::map<std::string, int> seen;
  for (LoadedRun &run : runs) {
    const int k = ++seen[run.name];
    if (k > 1)
      run.name += "_" + std::to_string(k);
  }

  int n_max = 0;
  for (const LoadedRun &run : runs)
    if (!run.mse.empty())
      n_max = std::max(n_max, run.mse.rbegin()->first);

  fs::create_directories(out_dir);
  std::ofstream f(fs::path(out_dir) / "compare.csv");
  if (!f)
    throw std::runtime_error("compare: cannot open output CSV");
  f << "N";
  for (const LoadedRun &run : runs)
    f << ",mse_" << run.name;
  for (std::size_t r = 1; r < runs.size(); ++r)
    f << ",ratio_" << runs[r].name << "_vs_" << runs[0].name;
  f << "\n";
  for (int n = 1; n <= n_max; ++n) {
    f << n;
    for (const LoadedRun &run : runs) {
      auto it = run.mse.find(n);
      f << ",";
      if (it != run.mse.end())
        f << fmt_double(it->second);
    }
    const auto base = runs[0].mse.find(n);
    for (std::size_t r = 1; r < runs.size(); ++r) {
      const auto it = runs[r].mse.find(n);
      f << ",";
      if (base != runs[0].mse.end() && it != runs[r].mse.end() &&
          base->second != 0.0)
        f << fmt_double(it->second / base->second);
    }
    f << "\n";
  }

  std::ofstream p(fs::path(out_dir) / "plot.dat");
  if (!p)
    throw std::runtime_error("compare: cannot open plot-data file");
  p << "# N";
  for (const LoadedRun &run : runs)
    p << " " << run.name;
  p << "\n";
  for (int n = 1; n <= n_max; ++n) {
    p << n;
    for (const LoadedRun &run : runs) {
      auto it = run.mse.find(n);
      p << " " << (it != run.mse.end() ? fmt_double(it->second) : "nan");
    }
    p << "\n";
  }
}

} // namespace wrom
