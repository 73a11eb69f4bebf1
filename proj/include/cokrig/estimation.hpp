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

#include "cokrig/basis.hpp"
#include "cokrig/designs.hpp"
#include "cokrig/kernels.hpp"
#include "cokrig/model_core.hpp"
#include "cokrig/optimize.hpp"

namespace cokrig {

/*
 * Posterior of one level under Jeffreys priors, given theta_t:
 *
 *   lambda_t | z, sigma_t^2  ~ N(lambda_mean, sigma_t^2 * lambda_cov_over_sigma2)
 *   sigma_t^2 | z            ~ IG(alpha, q / 2)
 *
 * lambda_t = (beta_rho_{t-1}, beta_t) for t >= 2 and beta_1 for t = 1.
 * sigma2_reml = q / (2 alpha) is the restricted maximum likelihood estimate.
 */
struct LevelPosterior {
  Eigen::VectorXd lambda_mean;
  Eigen::MatrixXd lambda_cov_over_sigma2;
  double alpha = 0.0;
  double q = 0.0;
  double sigma2_reml = 0.0;
  Eigen::Index scale_size = 0;  // q_{t-1}; 0 for the first level
  Eigen::Index trend_size = 0;  // p_t

  Eigen::VectorXd scale_coefficients() const { return lambda_mean.head(scale_size); }
  Eigen::VectorXd trend_coefficients() const { return lambda_mean.tail(trend_size); }
};

/// Data needed to estimate one level independently of the others.
struct LevelProblem {
  Eigen::MatrixXd x;
  Eigen::VectorXd z;
  std::optional<Eigen::VectorXd> z_previous;  // z_{t-1}(D_t), levels >= 2
  Basis trend = Basis::constant();
  std::optional<Basis> scale;                 // f_rho_{t-1}, levels >= 2
};

/// Level t (zero-based) of sorted data; `scale` is ignored for t = 0.
LevelProblem level_problem(const SortedLevels& data, int t, const Basis& trend,
                           const Basis& scale);

/// H_t = [F_rho(D_t) . (z_{t-1}(D_t) 1^T), F_t(D_t)], or F_1(D_1) for the first level.
Eigen::MatrixXd level_regressors(const LevelProblem& problem);

/// Closed-form conjugate posterior at a fixed correlation matrix.
/// Throws InsufficientData when n_t <= p_t + q_{t-1}, SingularTrend when H_t
/// is rank deficient after whitening.
LevelPosterior posterior_level(const LevelProblem& problem, const FactoredCorrelation& r);

/// log|det R_t| + (n_t - p_t - q_{t-1}) log(sigma2_reml), with R_t regularized
/// through `policy`. Throws StillSingular / SingularTrend.
double concentrated_restricted_nll(const LevelProblem& problem, const Kernel& kernel,
                                   const RegularizationPolicy& policy = {});

struct FitConfig {
  KernelFamily family = KernelFamily::Matern52;
  /// Per level; missing entries default to the constant basis.
  std::vector<Basis> trends;
  /// scales[t - 1] is f_rho between levels t and t + 1 (1-based); constant by default.
  std::vector<Basis> scales;
  /// Per level; a set entry skips the optimization for that level.
  std::vector<std::optional<Eigen::VectorXd>> fixed_theta;
  /// theta bounds are [lower, upper] * (range of the level design per coordinate).
  double theta_lower_factor = 1e-3;
  double theta_upper_factor = 10.0;
  OptimizerConfig optimizer;
  RegularizationPolicy regularization;
  int threads = 1;

  Basis trend(int t) const;
  Basis scale(int t) const;
  std::optional<Eigen::VectorXd> fixed(int t) const;
};

ThetaBounds default_theta_bounds(const Eigen::MatrixXd& design, double lower_factor,
                                 double upper_factor);

/// Immutable result of a fit: posteriors, estimated length-scales, and the
/// joint structure with sigma^2 and rho set to their point estimates.
struct FittedModel {
  SortedLevels data;
  std::vector<LevelPosterior> posteriors;
  CoKrigingStructure structure;
  Eigen::VectorXd beta;  // concatenated trend coefficients (beta_1, ..., beta_s)
  /// gamma_t = R_t^-1 e_t, e_t the level innovations of z - H beta.
  std::vector<Eigen::VectorXd> innovation_weights;

  int num_levels() const { return structure.num_levels(); }
  const Kernel& kernel(int t) const { return structure.level(t).kernel; }
  /// Copy with different variances (posteriors untouched).
  FittedModel with_sigma2(const Eigen::VectorXd& sigma2) const;
};

/// Builds a model from given per-level estimates, factoring each R_t with the
/// recorded nugget. Used by fit() and when loading saved models.
FittedModel assemble_model(SortedLevels data, std::vector<LevelPosterior> posteriors,
                           const std::vector<Kernel>& kernels, const std::vector<Basis>& trends,
                           const std::vector<Basis>& scales, const std::vector<double>& nuggets);

/// Per-level estimation (each level on its own: theta_t, then the posterior).
struct LevelFit {
  LevelPosterior posterior;
  Kernel kernel;
  double nugget = 0.0;
  double objective = 0.0;
};
LevelFit fit_level(const LevelProblem& problem, const FitConfig& config, int t);

FittedModel fit(const SortedLevels& data, const FitConfig& config);

}  // namespace cokrig
