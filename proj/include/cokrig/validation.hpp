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

#pragma once

#include <Eigen/Core>
#include <optional>
#include <vector>

#include "cokrig/designs.hpp"
#include "cokrig/estimation.hpp"
#include "cokrig/prediction.hpp"

namespace cokrig {

/// Q2 = 1 - SSE / sum (z - zbar)^2 (Standard), or with the predictions in
/// the denominator, sum (m - zbar)^2 (PredictionSpread).
enum class Q2Convention { Standard, PredictionSpread };

struct MetricsReport {
  double rmse = 0.0;
  std::optional<double> q2;  // missing when the denominator vanishes
  double max_abs_error = 0.0;
  double avg_pred_std = 0.0;
  double median_pred_std = 0.0;
  double max_pred_std = 0.0;
  std::size_t n_test = 0;
};

/// `stds` may be empty (the std summaries are then 0).
MetricsReport compute_metrics(const Eigen::VectorXd& predictions, const Eigen::VectorXd& truths,
                              const Eigen::VectorXd& stds = {},
                              Q2Convention convention = Q2Convention::Standard);

MetricsReport compute_metrics(const std::vector<PluginPrediction>& predictions,
                              const Eigen::VectorXd& truths,
                              Q2Convention convention = Q2Convention::Standard);

enum class LooMode {
  AllLevels,    // the held-out point is removed from every level
  KeepLower,    // removed from the top level only
};

enum class LooTheta {
  Auto,         // re-optimize when there are at most 20 folds
  Reoptimize,
  Fixed,        // reuse the length-scales of the full fit
};

struct LooConfig {
  LooMode mode = LooMode::AllLevels;
  LooTheta theta = LooTheta::Auto;
  /// Rows of the top-level data to hold out; empty means all of them.
  std::vector<Eigen::Index> ids;
  double tolerance = kDefaultNestingTolerance;
  int threads = 1;
};

struct LooPoint {
  Eigen::Index id = 0;
  Eigen::VectorXd x;
  double error = 0.0;  // prediction - observation
  double pred_std = 0.0;
};

struct LooReport {
  std::vector<LooPoint> points;
  double rmse = 0.0;
  bool theta_reoptimized = false;
};

/// Leave-one-out cross-validation over top-level points of `levels`
/// (cheapest first, unsorted, as supplied by the user).
LooReport loo_cv(const std::vector<LevelData>& levels, const FitConfig& config,
                 const LooConfig& loo = {});

/// Removes the point from every level (AllLevels) or from the top level only.
/// Throws InvalidArgument when the point is absent from a level it must
/// be removed from.
std::vector<LevelData> remove_point(const std::vector<LevelData>& levels,
                                    const Eigen::Ref<const Eigen::VectorXd>& point, LooMode mode,
                                    double tol = kDefaultNestingTolerance);

}  // namespace cokrig
