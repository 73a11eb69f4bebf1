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
#include <cmath>
#include <vector>

#include "cokrig/estimation.hpp"
#include "cokrig/model_core.hpp"

namespace cokrig {

struct PluginPrediction {
  double mean = 0.0;
  double variance = 0.0;

  double std_dev() const { return std::sqrt(variance); }
};

/*
 * Conditional law of Z_s(x) given the data at the fitted parameters.
 *
 * Evaluated level by level: with c_t(x) = prod_{i>=t} rho_i(x) and
 * gamma_t = R_t^-1 e_t the innovation weights stored in the model,
 *
 *   mean     = h'_s(x)^T beta + sum_t c_t(x) r_t(x, D_t)^T gamma_t
 *   variance = sum_t c_t(x)^2 sigma_t^2 (1 - r_t(x, D_t)^T R_t^-1 r_t(x, D_t))
 *
 * which equals h'^T beta + t_s^T V_s^-1 (z - H beta) and
 * sigma^2_Zs(x) - t_s^T V_s^-1 t_s. The mean never touches sigma^2.
 */
PluginPrediction predict(const FittedModel& model, const Eigen::Ref<const Eigen::VectorXd>& x);

/// One prediction per row of `xs`; rows are processed in chunks sharing the
/// level factorizations. Results do not depend on `threads`.
std::vector<PluginPrediction> predict_batch(const FittedModel& model, const Eigen::MatrixXd& xs,
                                            int threads = 1);

/// Same law through the joint structures: t_s(x), V_s^-1 applied recursively.
PluginPrediction predict_joint(const CoKrigingStructure& structure, const Eigen::VectorXd& beta,
                               const Eigen::VectorXd& z,
                               const Eigen::Ref<const Eigen::VectorXd>& x);

/// Stacked observations (z_1, ..., z_s) of sorted level data.
Eigen::VectorXd stacked_observations(const SortedLevels& data);

/// Law of beta_1 given z_1 and sigma_1^2: N(mean, sigma_1^2 * cov_over_sigma2).
struct Beta1Law {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov_over_sigma2;
};

/*
 * Two-level conditional law of Z_2(x) given (rho or beta_rho, beta_2),
 * sigma_1^2, sigma_2^2, with beta_1 integrated over its posterior.
 *
 * For a fixed query point the mean is affine in lambda = (beta_rho, beta_2),
 * and the variance depends on lambda only through rho(x):
 *
 *   mu(lambda)         = offset + gradient^T lambda
 *   sigma^2(lambda, .) = rho(x)^2 sigma_1^2 level1_factor + sigma_2^2 level2_factor
 *
 * where level1_factor includes the k_1 A^1 k_1^T term. This is what makes
 * evaluating many parameter particles cheap.
 */
class TwoLevelPredictor {
 public:
  TwoLevelPredictor(const FittedModel& model, const Beta1Law& beta1,
                    const Eigen::Ref<const Eigen::VectorXd>& x);

  Eigen::Index lambda_size() const { return gradient_.size(); }
  double offset() const { return offset_; }
  const Eigen::VectorXd& gradient() const { return gradient_; }
  /// f_rho(x): rho(x) = scale_basis^T lambda.head(q).
  const Eigen::VectorXd& scale_basis() const { return scale_basis_; }
  double level1_factor() const { return level1_factor_; }
  double level2_factor() const { return level2_factor_; }
  /// k_1 without the rho(x) factor: f_1(x) - F_1^T R_1^-1 r_1(x).
  const Eigen::VectorXd& k1_unscaled() const { return k1_unscaled_; }

  double mean(const Eigen::Ref<const Eigen::VectorXd>& lambda) const {
    return offset_ + gradient_.dot(lambda);
  }
  double rho(const Eigen::Ref<const Eigen::VectorXd>& lambda) const {
    return scale_basis_.dot(lambda.head(scale_basis_.size()));
  }
  PluginPrediction operator()(const Eigen::Ref<const Eigen::VectorXd>& lambda, double sigma1_sq,
                              double sigma2_sq) const;

 private:
  double offset_ = 0.0;
  Eigen::VectorXd gradient_;
  Eigen::VectorXd scale_basis_;
  Eigen::VectorXd k1_unscaled_;
  double level1_factor_ = 0.0;
  double level2_factor_ = 0.0;
};

/// Closed-form two-level predictive with beta_1 uncertainty; lambda stacks
/// (beta_rho, beta_2). Throws InvalidArgument unless the model has 2 levels.
PluginPrediction predict_2level_beta1_uncertain(const FittedModel& model, const Beta1Law& beta1,
                                                const Eigen::VectorXd& lambda, double sigma1_sq,
                                                double sigma2_sq,
                                                const Eigen::Ref<const Eigen::VectorXd>& x);

}  // namespace cokrig
