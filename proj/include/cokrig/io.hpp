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
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cokrig/config.hpp"
#include "cokrig/designs.hpp"
#include "cokrig/estimation.hpp"
#include "cokrig/prediction.hpp"

namespace cokrig {

/*
 * CSV layout: a header row x1,...,xd[,y] followed by one row per point.
 * Blank lines are skipped. Parse failures throw ParseError naming the file
 * and the 1-based line.
 */
LevelData read_level_csv(const std::string& path);
void write_level_csv(const std::string& path, const LevelData& data);

struct QueryData {
  Eigen::MatrixXd x;
  std::optional<Eigen::VectorXd> y;  // present when the header ends with y
};
QueryData read_query_csv(const std::string& path);

/// Parses "3,5,8-11" into sorted unique 1-based ids.
std::vector<Eigen::Index> parse_id_list(const std::string& text);

/// Keeps the rows with the given 1-based ids, in id order.
LevelData select_rows(const LevelData& data, const std::vector<Eigen::Index>& ids,
                      const std::string& what);

/// Predictions as x1..xd,mean,std.
void write_predictions(std::ostream& os, const Eigen::MatrixXd& x,
                       const std::vector<double>& mean, const std::vector<double>& std_dev);

/*
 * Model file: JSON with a format tag and schema version, the echoed config,
 * and per level the sorted design, observations, theta, nugget, bases and
 * posterior summary. Loading rebuilds the factorizations from these fields,
 * so predictions of a loaded model match the saved one bitwise.
 */
inline constexpr int kModelFormatVersion = 1;

struct SavedModel {
  FittedModel model;
  RunConfig config;
};

std::string model_to_text(const FittedModel& model, const RunConfig& config);
SavedModel model_from_text(const std::string& text, const std::string& source);
void save_model(const std::string& path, const FittedModel& model, const RunConfig& config);
SavedModel load_model(const std::string& path);

/// Human-readable parameter table: theta, nugget, posterior means, Q_t, alpha_t, sigma_t^2.
std::string fit_report(const FittedModel& model);

}  // namespace cokrig
