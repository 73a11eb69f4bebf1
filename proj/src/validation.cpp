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

#include "cokrig/validation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cokrig/errors.hpp"
#include "cokrig/optimize.hpp"

namespace cokrig {

MetricsReport compute_metrics(const Eigen::VectorXd& predictions, const Eigen::VectorXd& truths,
                              const Eigen::VectorXd& stds, Q2Convention convention) {
  const Eigen::Index n = truths.size();
  if (predictions.size() != n) {
    throw DimensionMismatch(std::to_string(predictions.size()) + " predictions for " +
                            std::to_string(n) + " observations");
  }
  if (n < 2) throw InvalidArgument("metrics need at least 2 test points");
  if (stds.size() != 0 && stds.size() != n) {
    throw DimensionMismatch("predictive standard deviations do not match the test set");
  }
  MetricsReport r;
  r.n_test = static_cast<std::size_t>(n);
  const Eigen::ArrayXd err = (predictions - truths).array();
  r.rmse = std::sqrt(err.square().mean());
  r.max_abs_error = err.abs().maxCoeff();
  const double zbar = truths.mean();
  const double denom = convention == Q2Convention::Standard
                           ? (truths.array() - zbar).square().sum()
                           : (predictions.array() - zbar).square().sum();
  if (denom > 0.0) r.q2 = 1.0 - err.square().sum() / denom;
  if (stds.size() == n) {
    std::vector<double> s(stds.data(), stds.data() + n);
    std::sort(s.begin(), s.end());
    r.avg_pred_std = stds.mean();
    r.max_pred_std = s.back();
    r.median_pred_std = n % 2 ? s[n / 2] : 0.5 * (s[n / 2 - 1] + s[n / 2]);
  }
  return r;
}

MetricsReport compute_metrics(const std::vector<PluginPrediction>& predictions,
                              const Eigen::VectorXd& truths, Q2Convention convention) {
  Eigen::VectorXd mean(predictions.size());
  Eigen::VectorXd sd(predictions.size());
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    mean(i) = predictions[i].mean;
    sd(i) = predictions[i].std_dev();
  }
  return compute_metrics(mean, truths, sd, convention);
}

namespace {

std::string format_point(const Eigen::Ref<const Eigen::VectorXd>& x) {
  std::ostringstream os;
  os.precision(17);
  os << '(';
  for (Eigen::Index i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x(i);
  os << ')';
  return os.str();
}

LevelData drop_row(const LevelData& level, Eigen::Index row) {
  const Eigen::Index n = level.x.rows();
  LevelData out{Eigen::MatrixXd(n - 1, level.x.cols()), Eigen::VectorXd(n - 1)};
  out.x.topRows(row) = level.x.topRows(row);
  out.x.bottomRows(n - 1 - row) = level.x.bottomRows(n - 1 - row);
  out.y.head(row) = level.y.head(row);
  out.y.tail(n - 1 - row) = level.y.tail(n - 1 - row);
  return out;
}

}  // namespace

std::vector<LevelData> remove_point(const std::vector<LevelData>& levels,
                                    const Eigen::Ref<const Eigen::VectorXd>& point, LooMode mode,
                                    double tol) {
  std::vector<LevelData> out = levels;
  const int s = static_cast<int>(levels.size());
  const int first = mode == LooMode::AllLevels ? 0 : s - 1;
  for (int t = first; t < s; ++t) {
    const Eigen::Index row = find_point(levels[t].x, point, tol);
    if (row < 0) {
      throw InvalidArgument("held-out point " + format_point(point) + " is absent from level " +
                            std::to_string(t + 1) +
                            "; leave-one-out removes the point from every level, so it must "
                            "be observed at all levels");
    }
    out[t] = drop_row(levels[t], row);
  }
  return out;
}

LooReport loo_cv(const std::vector<LevelData>& levels, const FitConfig& config,
                 const LooConfig& loo) {
  if (levels.empty()) throw InvalidArgument("no levels given");
  const LevelData& top = levels.back();
  std::vector<Eigen::Index> ids = loo.ids;
  if (ids.empty()) {
    for (Eigen::Index i = 0; i < top.x.rows(); ++i) ids.push_back(i);
  }
  for (Eigen::Index id : ids) {
    if (id < 0 || id >= top.x.rows()) {
      throw InvalidArgument("held-out id " + std::to_string(id) + " is outside the " +
                            std::to_string(top.x.rows()) + " top-level points");
    }
  }

  bool all_fixed = true;
  for (int t = 0; t < static_cast<int>(levels.size()); ++t) all_fixed = all_fixed && config.fixed(t);

  LooReport report;
  report.theta_reoptimized =
      !all_fixed &&
      (loo.theta == LooTheta::Reoptimize || (loo.theta == LooTheta::Auto && ids.size() <= 20));
  FitConfig fold_config = config;
  fold_config.threads = 1;
  fold_config.optimizer.threads = 1;
  if (!report.theta_reoptimized) {
    const FittedModel full = fit(prepare_levels(levels, loo.tolerance), config);
    fold_config.fixed_theta.clear();
    for (int t = 0; t < full.num_levels(); ++t) fold_config.fixed_theta.push_back(full.kernel(t).theta());
  }

  report.points.resize(ids.size());
  parallel_for(static_cast<int>(ids.size()), loo.threads, [&](int k) {
    const Eigen::VectorXd x = top.x.row(ids[k]).transpose();
    const auto reduced = remove_point(levels, x, loo.mode, loo.tolerance);
    const FittedModel model = fit(prepare_levels(reduced, loo.tolerance), fold_config);
    const PluginPrediction p = predict(model, x);
    report.points[k] = {ids[k], x, p.mean - top.y(ids[k]), p.std_dev()};
  });

  double sse = 0.0;
  for (const auto& p : report.points) sse += p.error * p.error;
  report.rmse = std::sqrt(sse / static_cast<double>(report.points.size()));
  return report;
}

}  // namespace cokrig
