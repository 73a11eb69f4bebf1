// Copyright 2026 The cokrig Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "cokrig/bayes.hpp"
#include "cokrig/bench.hpp"
#include "cokrig/config.hpp"
#include "cokrig/demo.hpp"
#include "cokrig/errors.hpp"
#include "cokrig/io.hpp"
#include "cokrig/prediction.hpp"
#include "cokrig/validation.hpp"

namespace cokrig::cli {

namespace {

namespace fs = std::filesystem;

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<double> tolerance;
  std::optional<std::string> q2;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config_path, "run configuration file")->check(CLI::ExistingFile);
  cmd->add_option("--seed", o.seed, "seed for every random choice");
  cmd->add_option("--threads", o.threads, "worker threads (results do not depend on it)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--tolerance", o.tolerance, "point-matching tolerance for nesting checks");
  cmd->add_option("--q2", o.q2, "Q2 convention")
      ->check(CLI::IsMember({"standard", "prediction_spread"}));
}

RunConfig resolve(const CommonOptions& o, RunConfig base = {}) {
  RunConfig c = o.config_path.empty() ? std::move(base) : load_run_config(o.config_path);
  if (o.seed) c.seed = *o.seed;
  if (o.threads) c.threads = *o.threads;
  if (o.tolerance) c.nesting_tolerance = *o.tolerance;
  if (o.q2) c.q2 = *o.q2 == "standard" ? Q2Convention::Standard : Q2Convention::PredictionSpread;
  return c;
}

/// "t:list" selections of level rows, t 1-based.
std::vector<LevelData> apply_level_ids(std::vector<LevelData> levels,
                                       const std::vector<std::string>& specs) {
  for (const auto& spec : specs) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos) {
      throw InvalidArgument("--ids expects LEVEL:LIST, got '" + spec + "'");
    }
    int t = 0;
    try {
      t = std::stoi(spec.substr(0, colon));
    } catch (const std::exception&) {
      throw InvalidArgument("invalid level in --ids '" + spec + "'");
    }
    if (t < 1 || t > static_cast<int>(levels.size())) {
      throw InvalidArgument("--ids level " + std::to_string(t) + " outside 1.." +
                            std::to_string(levels.size()));
    }
    levels[t - 1] = select_rows(levels[t - 1], parse_id_list(spec.substr(colon + 1)),
                                "level " + std::to_string(t));
  }
  return levels;
}

std::vector<LevelData> read_levels(const std::vector<std::string>& paths) {
  std::vector<LevelData> levels;
  for (const auto& p : paths) levels.push_back(read_level_csv(p));
  return levels;
}

/// Writes to `path`, or to `out` when the path is empty.
void emit(const std::string& path, std::ostream& out, const std::string& text) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InvalidArgument("cannot write '" + path + "'");
  os << text;
}

void print_metrics(std::ostream& os, const MetricsReport& m) {
  os << "n_test=" << m.n_test << '\n';
  os << "rmse=" << format_double(m.rmse) << '\n';
  os << "q2=" << (m.q2 ? format_double(*m.q2) : std::string("undefined")) << '\n';
  os << "max_abs_error=" << format_double(m.max_abs_error) << '\n';
  os << "avg_pred_std=" << format_double(m.avg_pred_std) << '\n';
  os << "median_pred_std=" << format_double(m.median_pred_std) << '\n';
  os << "max_pred_std=" << format_double(m.max_pred_std) << '\n';
}

QueryData load_query(const std::string& path, const std::string& ids, Eigen::Index dim) {
  QueryData q = read_query_csv(path);
  if (q.x.cols() != dim) {
    throw DimensionMismatch("query has " + std::to_string(q.x.cols()) +
                            " input columns, the model expects " + std::to_string(dim));
  }
  if (!ids.empty()) {
    LevelData tmp{q.x, q.y ? *q.y : Eigen::VectorXd::Zero(q.x.rows())};
    tmp = select_rows(tmp, parse_id_list(ids), "query");
    q.x = tmp.x;
    if (q.y) q.y = tmp.y;
  }
  return q;
}

// Subcommands

struct FitArgs {
  std::vector<std::string> files;
  std::string output;
  std::string report;
  std::vector<std::string> ids;
  CommonOptions common;
};

int run_fit(const FitArgs& a, std::ostream& out) {
  RunConfig config = resolve(a.common);
  const auto levels = apply_level_ids(read_levels(a.files), a.ids);
  const SortedLevels data = prepare_levels(levels, config.nesting_tolerance);
  const FittedModel model = fit(data, config.fit_config());
  RunConfig echo = config;
  echo.threads = 1;  // keep model files independent of the thread count
  save_model(a.output, model, echo);
  const std::string report = fit_report(model);
  out << report;
  if (!a.report.empty()) emit(a.report, out, report);
  return kOk;
}

struct PredictArgs {
  std::string model;
  std::string query;
  std::string output;
  std::string ids;
  std::string density_dir;
  std::optional<int> particles;
  std::optional<int> grid_points;
  CommonOptions common;
};

void finish_predictions(const PredictArgs& a, const QueryData& q, const RunConfig& config,
                        const std::vector<double>& mean, const std::vector<double>& sd,
                        std::ostream& out, std::ostream& err) {
  std::ostringstream csv;
  write_predictions(csv, q.x, mean, sd);
  emit(a.output, out, csv.str());
  if (q.y && q.x.rows() >= 2) {
    const auto m = compute_metrics(Eigen::Map<const Eigen::VectorXd>(mean.data(), mean.size()),
                                   *q.y, Eigen::Map<const Eigen::VectorXd>(sd.data(), sd.size()),
                                   config.q2);
    print_metrics(a.output.empty() ? err : out, m);
  }
}

int run_predict(const PredictArgs& a, std::ostream& out, std::ostream& err) {
  SavedModel saved = load_model(a.model);
  const RunConfig config = resolve(a.common, saved.config);
  const QueryData q = load_query(a.query, a.ids, saved.model.structure.dim());
  const auto preds = predict_batch(saved.model, q.x, config.threads);
  std::vector<double> mean, sd;
  for (const auto& p : preds) {
    mean.push_back(p.mean);
    sd.push_back(p.std_dev());
  }
  finish_predictions(a, q, config, mean, sd, out, err);
  return kOk;
}

int run_bayes_predict(const PredictArgs& a, std::ostream& out, std::ostream& err) {
  SavedModel saved = load_model(a.model);
  if (saved.model.num_levels() != 2) {
    throw InvalidArgument("bayes-predict supports two-level models only; this model has " +
                          std::to_string(saved.model.num_levels()) + " levels");
  }
  const RunConfig config = resolve(a.common, saved.config);
  const QueryData q = load_query(a.query, a.ids, saved.model.structure.dim());
  IntegrationConfig ic = config.integration();
  if (a.particles) ic.particles = *a.particles;
  if (a.grid_points) ic.grid_points_per_axis = *a.grid_points;
  if (!a.density_dir.empty()) ic.density_points = config.bayes_density_points;
  const auto laws = posterior_laws(saved.model, config.priors());
  const auto preds = predictive_full_batch(saved.model, laws, q.x, ic);
  std::vector<double> mean, sd;
  for (const auto& p : preds) {
    mean.push_back(p.mean);
    sd.push_back(p.std_dev());
  }
  if (!a.density_dir.empty()) {
    fs::create_directories(a.density_dir);
    for (std::size_t i = 0; i < preds.size(); ++i) {
      std::ostringstream name;
      name << "density_" << std::setw(5) << std::setfill('0') << i + 1 << ".csv";
      std::ofstream os(fs::path(a.density_dir) / name.str());
      if (!os) throw InvalidArgument("cannot write into '" + a.density_dir + "'");
      os << "value,density\n";
      for (const auto& [v, d] : preds[i].density) {
        os << format_double(v) << ',' << format_double(d) << '\n';
      }
    }
  }
  finish_predictions(a, q, config, mean, sd, out, err);
  return kOk;
}

struct CvArgs {
  std::vector<std::string> files;
  std::string output;
  std::string holdout;
  std::vector<std::string> ids;
  std::optional<std::string> mode;
  bool compare = false;
  CommonOptions common;
};

int run_cv(const CvArgs& a, std::ostream& out) {
  RunConfig config = resolve(a.common);
  if (a.mode) config.loo_mode = *a.mode == "all_levels" ? LooMode::AllLevels : LooMode::KeepLower;
  const auto levels = apply_level_ids(read_levels(a.files), a.ids);
  if (a.compare && levels.size() < 2) {
    throw InvalidArgument("--compare needs at least two levels");
  }
  LooConfig loo = config.loo();
  if (!a.holdout.empty()) {
    for (Eigen::Index id : parse_id_list(a.holdout)) {
      if (id > levels.back().x.rows()) {
        throw InvalidArgument(
            "held-out id " + std::to_string(id) + " is not a row of the top level; a held-out "
            "point must be observed at every level because it is removed from all of them");
      }
      loo.ids.push_back(id - 1);
    }
  }

  const LooReport full = loo_cv(levels, config.fit_config(), loo);
  std::optional<LooReport> reduced;
  if (a.compare) {
    // Same config with the cheapest level dropped; per-level settings shift down by one.
    RunConfig sub = config;
    auto shift = [](auto& m) {
      std::decay_t<decltype(m)> moved;
      for (auto& [t, v] : m) {
        if (t > 1) moved[t - 1] = v;
      }
      m = std::move(moved);
    };
    shift(sub.fixed_theta);
    shift(sub.trends);
    shift(sub.scales);
    const std::vector<LevelData> top(levels.begin() + 1, levels.end());
    reduced = loo_cv(top, sub.fit_config(), loo);
  }

  std::ostringstream csv;
  csv << (a.compare ? "levels,point_id,error,pred_std\n" : "point_id,error,pred_std\n");
  auto rows = [&](const LooReport& r, std::size_t s) {
    for (const auto& p : r.points) {
      if (a.compare) csv << s << ',';
      csv << p.id + 1 << ',' << format_double(p.error) << ',' << format_double(p.pred_std) << '\n';
    }
  };
  rows(full, levels.size());
  if (reduced) rows(*reduced, levels.size() - 1);
  emit(a.output, out, csv.str());

  const char* prefix = a.output.empty() ? "# " : "";
  out << prefix << "loo_rmse_" << levels.size() << "level=" << format_double(full.rmse) << '\n';
  if (reduced) {
    out << prefix << "loo_rmse_" << levels.size() - 1 << "level=" << format_double(reduced->rmse)
        << '\n';
    out << prefix << "ratio=" << format_double(reduced->rmse / full.rmse) << '\n';
  }
  return kOk;
}

struct BenchArgs {
  std::vector<int> n2;
  int repeats = 3;
  std::uint64_t seed = 0;
  std::string output;
};

int run_bench(const BenchArgs& a, std::ostream& out) {
  BenchConfig bc;
  if (!a.n2.empty()) bc.n2_values = a.n2;
  bc.repeats = a.repeats;
  bc.seed = a.seed;
  emit(a.output, out, bench_csv(run_complexity_bench(bc)));
  return kOk;
}

struct DemoArgs {
  std::string problem;
  std::string dir;
  std::uint64_t seed = 0;
  std::optional<int> test_points;
};

int run_demo(const DemoArgs& a, std::ostream& out) {
  DemoOptions opts;
  if (a.test_points) opts.test_points = *a.test_points;
  const DemoData d = demo_generate(parse_demo_problem(a.problem), a.seed, opts);
  fs::create_directories(a.dir);
  for (std::size_t t = 0; t < d.levels.size(); ++t) {
    const auto path = fs::path(a.dir) / ("level" + std::to_string(t + 1) + ".csv");
    write_level_csv(path.string(), d.levels[t]);
    out << path.string() << '\n';
  }
  const auto test = fs::path(a.dir) / "test.csv";
  write_level_csv(test.string(), d.test);
  out << test.string() << '\n';
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-fidelity co-kriging: fit, predict, validate."};
  app.name(args.empty() ? "cokrig" : fs::path(args[0]).filename().string());
  app.require_subcommand(1);
  app.set_version_flag("--version", "cokrig 1.0.0");

  FitArgs fa;
  auto* fit_cmd = app.add_subcommand("fit", "estimate a model from level CSV files");
  fit_cmd->add_option("levels", fa.files, "level CSV files, cheapest first")
      ->required()
      ->check(CLI::ExistingFile);
  fit_cmd->add_option("-o,--output", fa.output, "model file to write")->required();
  fit_cmd->add_option("--report", fa.report, "also write the parameter report here");
  fit_cmd->add_option("--ids", fa.ids, "keep rows of a level, e.g. 2:1,3,5-9 (repeatable)");
  add_common(fit_cmd, fa.common);

  PredictArgs pa;
  auto* pred_cmd = app.add_subcommand("predict", "plug-in predictions at query points");
  PredictArgs ba;
  auto* bayes_cmd =
      app.add_subcommand("bayes-predict", "Bayesian predictive law (two-level models)");
  for (auto [cmd, target] : {std::pair{pred_cmd, &pa}, std::pair{bayes_cmd, &ba}}) {
    cmd->add_option("model", target->model, "model file")->required()->check(CLI::ExistingFile);
    cmd->add_option("query", target->query, "query CSV (x1..xd[,y])")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("-o,--output", target->output, "predictions CSV (default stdout)");
    cmd->add_option("--ids", target->ids, "keep these 1-based query rows");
    add_common(cmd, target->common);
  }
  bayes_cmd->add_option("--density", ba.density_dir, "write one density CSV per point here");
  bayes_cmd->add_option("--particles", ba.particles, "Monte Carlo particles per node")
      ->check(CLI::PositiveNumber);
  bayes_cmd->add_option("--grid-points", ba.grid_points, "quadrature nodes per variance axis")
      ->check(CLI::PositiveNumber);

  CvArgs ca;
  auto* cv_cmd = app.add_subcommand("cv", "leave-one-out cross-validation");
  cv_cmd->add_option("levels", ca.files, "level CSV files, cheapest first")
      ->required()
      ->check(CLI::ExistingFile);
  cv_cmd->add_option("-o,--output", ca.output, "LOO CSV (default stdout)");
  cv_cmd->add_option("--holdout", ca.holdout, "1-based top-level rows to hold out (default all)");
  cv_cmd->add_option("--ids", ca.ids, "keep rows of a level, e.g. 2:1,3,5-9 (repeatable)");
  cv_cmd->add_option("--mode", ca.mode, "point removal")
      ->check(CLI::IsMember({"all_levels", "keep_lower"}));
  cv_cmd->add_flag("--compare", ca.compare, "also run without the cheapest level");
  add_common(cv_cmd, ca.common);

  BenchArgs bna;
  auto* bench_cmd = app.add_subcommand("bench", "dense versus recursive inversion timings");
  bench_cmd->add_option("--n2", bna.n2, "top-level sizes")->delimiter(',');
  bench_cmd->add_option("--repeats", bna.repeats, "timed repetitions")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--seed", bna.seed, "seed for designs and data");
  bench_cmd->add_option("-o,--output", bna.output, "CSV file (default stdout)");

  DemoArgs da;
  auto* demo_cmd = app.add_subcommand("demo", "write demo problem data");
  demo_cmd->add_option("problem", da.problem, "forrester1 | forrester2 | ishigami3")
      ->required()
      ->check(CLI::IsMember({"forrester1", "forrester2", "ishigami3"}));
  demo_cmd->add_option("--out", da.dir, "output directory")->required();
  demo_cmd->add_option("--seed", da.seed, "seed for designs and test points");
  demo_cmd->add_option("--test-points", da.test_points, "Ishigami test set size")
      ->check(CLI::PositiveNumber);

  std::vector<std::string> storage = args.empty() ? std::vector<std::string>{"cokrig"} : args;
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUserError;
  }

  try {
    if (*fit_cmd) return run_fit(fa, out);
    if (*pred_cmd) return run_predict(pa, out, err);
    if (*bayes_cmd) return run_bayes_predict(ba, out, err);
    if (*cv_cmd) return run_cv(ca, out);
    if (*bench_cmd) return run_bench(bna, out);
    if (*demo_cmd) return run_demo(da, out);
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kUserError;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return kNumericalError;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kUserError;
  }
  return kUserError;
}

}  // namespace cokrig::cli
