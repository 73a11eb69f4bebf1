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
#include <memory>
#include <vector>

#include "cokrig/basis.hpp"
#include "cokrig/designs.hpp"
#include "cokrig/kernels.hpp"

namespace cokrig {

/// Scale factor rho(x) = f_rho(x)^T beta_rho linking a level to the next one.
/// A constant rho is the one-function constant basis with beta_rho = (rho).
struct ScaleFactor {
  Basis basis = Basis::constant();
  Eigen::VectorXd beta = Eigen::VectorXd::Ones(1);

  static ScaleFactor constant(double rho);
  static ScaleFactor with_basis(Basis basis, Eigen::VectorXd beta);

  bool is_constant() const;
  double operator()(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  /// rho(D) as a vector, one entry per design row.
  Eigen::VectorXd on(const Eigen::MatrixXd& design) const;
};

/// Everything about one level that does not depend on rho or sigma^2.
struct LevelStructure {
  Eigen::MatrixXd design;
  Kernel kernel;
  Basis trend;
  std::shared_ptr<const FactoredCorrelation> factor;
};

/*
 * Joint Gaussian structure of (Z_1(D_1), ..., Z_s(D_s), Z_s(x)) under the
 * autoregressive model Z_t(x) = rho_{t-1}(x) Z_{t-1}(x) + delta_t(x).
 *
 * Levels are zero-based here: scales[t] links level t to level t + 1.
 * Designs must be sorted so that D_{t+1} is the trailing block of D_t; the
 * inverse of V_s is then applied level by level from the factorizations of
 * the R_t alone, at O(sum n_t^3) factorization cost.
 *
 * A nugget recorded on a level's factorization is treated as part of that
 * level's correlation on coincident points, so V_s, its recursive inverse and
 * its dense assembly all describe the same matrix.
 */
class CoKrigingStructure {
 public:
  CoKrigingStructure(std::vector<LevelStructure> levels, std::vector<ScaleFactor> scales,
                     Eigen::VectorXd sigma2);

  /// Assembles and factors every R_t(D_t) through the regularization ladder.
  static CoKrigingStructure build(const SortedLevels& data, const std::vector<Kernel>& kernels,
                                  const std::vector<Basis>& trends,
                                  std::vector<ScaleFactor> scales, Eigen::VectorXd sigma2,
                                  const RegularizationPolicy& policy = {});

  int num_levels() const { return static_cast<int>(levels_.size()); }
  const LevelStructure& level(int t) const { return levels_[t]; }
  const std::vector<ScaleFactor>& scales() const { return scales_; }
  const Eigen::VectorXd& sigma2() const { return sigma2_; }
  Eigen::Index total_size() const;
  Eigen::Index trend_size() const;
  Eigen::Index dim() const { return levels_.front().design.cols(); }

  CoKrigingStructure with_sigma2(Eigen::VectorXd sigma2) const;
  CoKrigingStructure with_scales(std::vector<ScaleFactor> scales) const;

  /// H_s, block lower triangular.
  Eigen::MatrixXd trend_matrix() const;
  /// V^{(t,u)}, for any pair of levels.
  Eigen::MatrixXd covariance_block(int t, int u) const;
  /// V_s assembled densely.
  Eigen::MatrixXd covariance() const;

  /// t_s(x) = Cov(Z_s(x), Z).
  Eigen::VectorXd cross_covariance(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  /// h'_s(x) with E[Z_s(x)] = h'_s(x)^T beta.
  Eigen::VectorXd trend_vector(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  /// sigma^2_{Z_s}(x) = Var(Z_s(x)).
  double prior_variance(const Eigen::Ref<const Eigen::VectorXd>& x) const;

  /// V_s^-1 v through the level recursion (never forms V_s).
  Eigen::VectorXd apply_inverse(const Eigen::VectorXd& v) const;
  Eigen::MatrixXd apply_inverse(const Eigen::MatrixXd& v) const;
  /// v^T V_s^-1 v for every column of v.
  Eigen::VectorXd inverse_quadratic_forms(const Eigen::MatrixXd& v) const;

  /// V_s^-1 assembled densely by the block recursion from the explicit R_t^-1.
  Eigen::MatrixXd inverse() const;

  /// Offset of level t inside the stacked observation vector.
  Eigen::Index offset(int t) const;
  /// rho_{t-1}(D_t) for t >= 1.
  const Eigen::VectorXd& scale_on_level(int t) const { return scale_on_level_[t]; }
  /// Innovations e_t = v_t - rho_{t-1}(D_t) . v_{t-1}(D_t), one block per level.
  std::vector<Eigen::MatrixXd> innovations(const Eigen::MatrixXd& v) const;
  /// prod_{i=from}^{to-1} rho_i(x); 1 when from >= to.
  double scale_product(int from, int to, const Eigen::Ref<const Eigen::VectorXd>& x) const;

 private:
  // prod_{i=from}^{to-1} rho_i evaluated on the rows of `points`.
  Eigen::VectorXd scale_products(int from, int to, const Eigen::MatrixXd& points) const;
  // R_j(A, B) plus the level-j nugget on coincident points.
  Eigen::MatrixXd regularized_correlation(int j, const Eigen::MatrixXd& a,
                                          const Eigen::MatrixXd& b) const;
  void refresh_scales();

  std::vector<LevelStructure> levels_;
  std::vector<ScaleFactor> scales_;
  Eigen::VectorXd sigma2_;
  std::vector<Eigen::VectorXd> scale_on_level_;
};

}  // namespace cokrig
