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

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <string>
#include <vector>

namespace cokrig {

enum class KernelFamily { SquaredExponential, Matern52 };

std::string to_string(KernelFamily family);
KernelFamily parse_kernel_family(const std::string& name);

/*
 * Stationary correlation function r(x - x'; theta).
 *
 *   SquaredExponential:  exp(-sum_i ((x_i - x'_i) / theta_i)^2)
 *   Matern52:            prod_i (1 + sqrt5 h_i + 5/3 h_i^2) exp(-sqrt5 h_i),
 *                        h_i = |x_i - x'_i| / theta_i
 *
 * theta has either one component (shared by every coordinate, which for the
 * squared exponential is the isotropic ||x - x'||^2 / theta^2 form) or one
 * component per input coordinate. Distances are in raw input units.
 */
class Kernel {
 public:
  Kernel(KernelFamily family, Eigen::VectorXd theta);

  KernelFamily family() const { return family_; }
  const Eigen::VectorXd& theta() const { return theta_; }

  /// Throws DimensionMismatch unless theta is scalar or matches `dim`.
  void check_dimension(Eigen::Index dim) const;

  double operator()(const Eigen::Ref<const Eigen::VectorXd>& x,
                    const Eigen::Ref<const Eigen::VectorXd>& y) const;

 private:
  double theta_at(Eigen::Index i) const {
    return theta_.size() == 1 ? theta_(0) : theta_(i);
  }

  KernelFamily family_;
  Eigen::VectorXd theta_;
};

double eval_correlation(const Kernel& kernel,
                        const Eigen::Ref<const Eigen::VectorXd>& x,
                        const Eigen::Ref<const Eigen::VectorXd>& y);

/// R(A, B): rows of `a` and `b` are points.
Eigen::MatrixXd correlation_matrix(const Kernel& kernel, const Eigen::MatrixXd& a,
                                   const Eigen::MatrixXd& b);

/// R(A) = R(A, A), filled symmetrically with an exact unit diagonal.
Eigen::MatrixXd correlation_matrix(const Kernel& kernel, const Eigen::MatrixXd& a);

/// R({x}, A) as a column vector.
Eigen::VectorXd cross_correlation(const Kernel& kernel,
                                  const Eigen::Ref<const Eigen::VectorXd>& x,
                                  const Eigen::MatrixXd& a);

/// Nuggets tried in order; escalation happens on factorization failure or
/// when the estimated condition number exceeds `max_condition`.
struct RegularizationPolicy {
  std::vector<double> nuggets{0.0, 1e-10, 1e-8, 1e-6};
  double max_condition = 1e12;
};

/// Cholesky factorization of a correlation matrix plus the nugget that was
/// added to its diagonal.
class FactoredCorrelation {
 public:
  /// Walks the nugget ladder; throws StillSingular when every rung fails.
  static FactoredCorrelation factor(const Eigen::MatrixXd& r,
                                    const RegularizationPolicy& policy = {});

  /// Factors R + nugget I without any escalation (used when reloading models).
  static FactoredCorrelation with_nugget(const Eigen::MatrixXd& r, double nugget);

  Eigen::Index size() const { return llt_.rows(); }
  double nugget() const { return nugget_; }
  double log_det() const { return log_det_; }
  /// 1 / rcond, the L1 condition estimate used by the ladder.
  double condition_estimate() const { return condition_; }

  Eigen::VectorXd solve(const Eigen::VectorXd& b) const { return llt_.solve(b); }
  Eigen::MatrixXd solve(const Eigen::MatrixXd& b) const { return llt_.solve(b); }

  /// L^-1 b where R + nugget I = L L^T.
  Eigen::MatrixXd whiten(const Eigen::MatrixXd& b) const;
  Eigen::VectorXd whiten(const Eigen::VectorXd& b) const;

  const Eigen::LLT<Eigen::MatrixXd>& llt() const { return llt_; }

 private:
  FactoredCorrelation() = default;

  Eigen::LLT<Eigen::MatrixXd> llt_;
  double nugget_ = 0.0;
  double log_det_ = 0.0;
  double condition_ = 1.0;
};

}  // namespace cokrig
