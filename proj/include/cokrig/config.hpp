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

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cokrig/bayes.hpp"
#include "cokrig/estimation.hpp"
#include "cokrig/validation.hpp"

namespace cokrig {

struct PriorSpec {
  std::vector<double> b;
  std::vector<double> v;
  double alpha = 1.0;
  double gamma = 1.0;

  bool operator==(const PriorSpec&) const = default;
};

/*
 * Every user-settable constant. The text form is one "key = value" per line
 * with dotted section names; '#' starts a comment. Level indices in keys are
 * 1-based. Keys (defaults in parentheses):
 *
 *   kernel                         matern52 | squared_exponential (matern52)
 *   theta.lower_factor             (1e-3)  bounds are factor * input range
 *   theta.upper_factor             (10)
 *   theta.fixed.<t>                comma list, skips optimization of level t
 *   trend.<t>                      basis such as "1,x1,x2^2" (1)
 *   scale.<t>                      basis of rho between levels t and t+1 (1)
 *   prior.level<1|2>.b / .v        informative prior mean and variances
 *   prior.level<1|2>.alpha/.gamma  inverse-gamma hyperparameters (1, 1)
 *   optimizer.starts               (40)
 *   optimizer.refined_starts       (3)
 *   optimizer.tolerance            (1e-4)
 *   optimizer.initial_step         (0.5)
 *   optimizer.max_local_evaluations (400)
 *   regularization.nuggets         (0,1e-10,1e-8,1e-6)
 *   regularization.max_condition   (1e12)
 *   bayes.grid_points              (21)
 *   bayes.particles                (1000)
 *   bayes.lower_quantile           (1e-5)
 *   bayes.upper_quantile           (0.99999)
 *   bayes.degenerate_ratio         (1e-12)
 *   bayes.lambda_quadrature        (false)
 *   bayes.lambda_grid_points       (41)
 *   bayes.density_points           (401)
 *   nesting.tolerance              (1e-9)
 *   metrics.q2                     standard | prediction_spread (standard)
 *   loo.mode                       all_levels | keep_lower (all_levels)
 *   loo.theta                      auto | reoptimize | fixed (auto)
 *   seed                           (0)
 *   threads                        (1)
 *
 * A prior section is informative as soon as its b and v are given.
 */
struct RunConfig {
  KernelFamily kernel = KernelFamily::Matern52;
  double theta_lower_factor = 1e-3;
  double theta_upper_factor = 10.0;
  std::map<int, std::vector<double>> fixed_theta;
  std::map<int, Basis> trends;
  std::map<int, Basis> scales;
  std::optional<PriorSpec> prior_level1;
  std::optional<PriorSpec> prior_level2;
  int optimizer_starts = 40;
  int optimizer_refined_starts = 3;
  double optimizer_tolerance = 1e-4;
  double optimizer_initial_step = 0.5;
  int optimizer_max_local_evaluations = 400;
  std::vector<double> nuggets{0.0, 1e-10, 1e-8, 1e-6};
  double max_condition = 1e12;
  int bayes_grid_points = 21;
  int bayes_particles = 1000;
  double bayes_lower_quantile = 1e-5;
  double bayes_upper_quantile = 1.0 - 1e-5;
  double bayes_degenerate_ratio = 1e-12;
  bool bayes_lambda_quadrature = false;
  int bayes_lambda_grid_points = 41;
  int bayes_density_points = 401;
  double nesting_tolerance = kDefaultNestingTolerance;
  Q2Convention q2 = Q2Convention::Standard;
  LooMode loo_mode = LooMode::AllLevels;
  LooTheta loo_theta = LooTheta::Auto;
  std::uint64_t seed = 0;
  int threads = 1;

  bool operator==(const RunConfig&) const = default;

  FitConfig fit_config() const;
  Priors2Level priors() const;
  IntegrationConfig integration() const;
  LooConfig loo() const;
};

/// Parses the text form; `source` names the input in error messages.
/// Throws ParseError with the offending line number.
RunConfig parse_run_config(const std::string& text, const std::string& source = "config");
RunConfig load_run_config(const std::string& path);
/// Writes every key; parse_run_config(serialize(c)) == c.
std::string serialize_run_config(const RunConfig& config);

/// Shortest decimal form that reads back to the same double.
std::string format_double(double value);

}  // namespace cokrig
