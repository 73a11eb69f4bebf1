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

#include "cokrig/kernels.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "cokrig/errors.hpp"

namespace cokrig {

namespace {

const double kSqrt5 = std::sqrt(5.0);

// Both families evaluated on coordinates already divided by theta.
double scaled_correlation(KernelFamily family, const double* x, const double* y,
                          Eigen::Index dim) {
  if (family == KernelFamily::SquaredExponential) {
    double d2 = 0.0;
    for (Eigen::Index i = 0; i < dim; ++i) {
      const double h = x[i] - y[i];
      d2 += h * h;
    }
    return std::exp(-d2);
  }
  double poly = 1.0;
  double abs_sum = 0.0;
  for (Eigen::Index i = 0; i < dim; ++i) {
    const double h = std::abs(x[i] - y[i]);
    poly *= 1.0 + kSqrt5 * h + (5.0 / 3.0) * h * h;
    abs_sum += h;
  }
  return poly * std::exp(-kSqrt5 * abs_sum);
}

// Row-major copy of the points divided by theta, one point per column so
// that each point is contiguous.
Eigen::MatrixXd scaled_points(const Kernel& kernel, const Eigen::MatrixXd& a) {
  kernel.check_dimension(a.cols());
  Eigen::MatrixXd out = a.transpose();
  const auto& theta = kernel.theta();
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    out.row(i) /= theta.size() == 1 ? theta(0) : theta(i);
  }
  return out;
}

}  // namespace

std::string to_string(KernelFamily family) {
  return family == KernelFamily::SquaredExponential ? "squared_exponential" : "matern52";
}

KernelFamily parse_kernel_family(const std::string& name) {
  if (name == "squared_exponential" || name == "gaussian" || name == "se") {
    return KernelFamily::SquaredExponential;
  }
  if (name == "matern52" || name == "matern5_2") return KernelFamily::Matern52;
  throw InvalidArgument("unknown kernel family '" + name + "'");
}

Kernel::Kernel(KernelFamily family, Eigen::VectorXd theta)
    : family_(family), theta_(std::move(theta)) {
  if (theta_.size() == 0) throw InvalidArgument("kernel theta must not be empty");
  for (Eigen::Index i = 0; i < theta_.size(); ++i) {
    if (!(theta_(i) > 0.0) || !std::isfinite(theta_(i))) {
      std::ostringstream msg;
      msg << "kernel theta must be positive and finite, got theta[" << i
          << "] = " << theta_(i);
      throw InvalidArgument(msg.str());
    }
  }
}

void Kernel::check_dimension(Eigen::Index dim) const {
  if (theta_.size() != 1 && theta_.size() != dim) {
    throw DimensionMismatch("kernel has " + std::to_string(theta_.size()) +
                            " length-scales but points have dimension " +
                            std::to_string(dim));
  }
}

double Kernel::operator()(const Eigen::Ref<const Eigen::VectorXd>& x,
                          const Eigen::Ref<const Eigen::VectorXd>& y) const {
  if (x.size() != y.size()) {
    throw DimensionMismatch("correlation between points of dimension " +
                            std::to_string(x.size()) + " and " + std::to_string(y.size()));
  }
  check_dimension(x.size());
  Eigen::VectorXd xs(x.size());
  Eigen::VectorXd ys(y.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    xs(i) = x(i) / theta_at(i);
    ys(i) = y(i) / theta_at(i);
  }
  return scaled_correlation(family_, xs.data(), ys.data(), xs.size());
}

double eval_correlation(const Kernel& kernel, const Eigen::Ref<const Eigen::VectorXd>& x,
                        const Eigen::Ref<const Eigen::VectorXd>& y) {
  return kernel(x, y);
}

Eigen::MatrixXd correlation_matrix(const Kernel& kernel, const Eigen::MatrixXd& a,
                                   const Eigen::MatrixXd& b) {
  if (a.cols() != b.cols()) {
    throw DimensionMismatch("design sets of dimension " + std::to_string(a.cols()) +
                            " and " + std::to_string(b.cols()));
  }
  const Eigen::MatrixXd as = scaled_points(kernel, a);
  const Eigen::MatrixXd bs = scaled_points(kernel, b);
  const Eigen::Index dim = a.cols();
  Eigen::MatrixXd r(a.rows(), b.rows());
  for (Eigen::Index j = 0; j < b.rows(); ++j) {
    const double* yj = bs.col(j).data();
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      r(i, j) = scaled_correlation(kernel.family(), as.col(i).data(), yj, dim);
    }
  }
  return r;
}

Eigen::MatrixXd correlation_matrix(const Kernel& kernel, const Eigen::MatrixXd& a) {
  const Eigen::MatrixXd as = scaled_points(kernel, a);
  const Eigen::Index n = a.rows();
  const Eigen::Index dim = a.cols();
  Eigen::MatrixXd r(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    r(j, j) = 1.0;
    const double* yj = as.col(j).data();
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const double v = scaled_correlation(kernel.family(), as.col(i).data(), yj, dim);
      r(i, j) = v;
      r(j, i) = v;
    }
  }
  return r;
}

Eigen::VectorXd cross_correlation(const Kernel& kernel,
                                  const Eigen::Ref<const Eigen::VectorXd>& x,
                                  const Eigen::MatrixXd& a) {
  if (x.size() != a.cols()) {
    throw DimensionMismatch("query point of dimension " + std::to_string(x.size()) +
                            " against design of dimension " + std::to_string(a.cols()));
  }
  return correlation_matrix(kernel, Eigen::MatrixXd(x.transpose()), a).transpose();
}

FactoredCorrelation FactoredCorrelation::with_nugget(const Eigen::MatrixXd& r,
                                                     double nugget) {
  if (r.rows() != r.cols()) throw DimensionMismatch("correlation matrix must be square");
  FactoredCorrelation out;
  out.nugget_ = nugget;
  Eigen::MatrixXd regularized = r;
  regularized.diagonal().array() += nugget;
  out.llt_.compute(regularized);
  if (out.llt_.info() != Eigen::Success) {
    throw StillSingular("correlation matrix is not positive definite with nugget " +
                        std::to_string(nugget));
  }
  const auto& l = out.llt_.matrixLLT();
  double log_det = 0.0;
  for (Eigen::Index i = 0; i < l.rows(); ++i) log_det += std::log(l(i, i));
  out.log_det_ = 2.0 * log_det;
  const double rcond = out.llt_.rcond();
  out.condition_ = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
  return out;
}

FactoredCorrelation FactoredCorrelation::factor(const Eigen::MatrixXd& r,
                                                const RegularizationPolicy& policy) {
  if (r.rows() != r.cols()) throw DimensionMismatch("correlation matrix must be square");
  for (double nugget : policy.nuggets) {
    try {
      FactoredCorrelation out = with_nugget(r, nugget);
      if (out.condition_ <= policy.max_condition) return out;
    } catch (const StillSingular&) {
    }
  }
  std::ostringstream msg;
  msg << "correlation matrix of size " << r.rows()
      << " is singular or ill-conditioned even with nugget "
      << (policy.nuggets.empty() ? 0.0 : policy.nuggets.back())
      << " (duplicate design points or extreme length-scales?)";
  throw StillSingular(msg.str());
}

Eigen::MatrixXd FactoredCorrelation::whiten(const Eigen::MatrixXd& b) const {
  return llt_.matrixL().solve(b);
}

Eigen::VectorXd FactoredCorrelation::whiten(const Eigen::VectorXd& b) const {
  return llt_.matrixL().solve(b);
}

}  // namespace cokrig
