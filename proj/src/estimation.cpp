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

#include "cokrig/estimation.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>

#include "cokrig/errors.hpp"

namespace cokrig {

LevelProblem level_problem(const SortedLevels& data, int t, const Basis& trend,
                           const Basis& scale) {
  LevelProblem problem;
  problem.x = data.x(t);
  problem.z = data.y(t);
  problem.trend = trend;
  if (t > 0) {
    problem.z_previous = data.previous_on_level(t);
    problem.scale = scale;
  }
  return problem;
}

Eigen::MatrixXd level_regressors(const LevelProblem& problem) {
  const Eigen::MatrixXd f = problem.trend.matrix(problem.x);
  if (!problem.scale) return f;
  if (!problem.z_previous || problem.z_previous->size() != problem.x.rows()) {
    throw DimensionMismatch("previous-level observations are required on every design point");
  }
  const Eigen::MatrixXd frho = problem.z_previous->asDiagonal() * problem.scale->matrix(problem.x);
  Eigen::MatrixXd h(problem.x.rows(), frho.cols() + f.cols());
  h << frho, f;
  return h;
}

LevelPosterior posterior_level(const LevelProblem& problem, const FactoredCorrelation& r) {
  const Eigen::MatrixXd h = level_regressors(problem);
  const Eigen::Index n = h.rows();
  const Eigen::Index k = h.cols();
  if (problem.z.size() != n || r.size() != n) {
    throw DimensionMismatch("level data, regressors and correlation sizes disagree");
  }
  if (n <= k) {
    throw InsufficientData(std::to_string(n) + " observations cannot identify " +
                           std::to_string(k) + " regression coefficients plus a variance");
  }
  const Eigen::MatrixXd hw = r.whiten(h);
  const Eigen::VectorXd zw = r.whiten(problem.z);

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(hw);
  qr.setThreshold(1e-10);
  if (qr.rank() < k) {
    throw SingularTrend("regressors are collinear after whitening (rank " +
                        std::to_string(qr.rank()) + " of " + std::to_string(k) + ")");
  }

  LevelPosterior post;
  post.lambda_mean = qr.solve(zw);
  post.q = (zw - hw * post.lambda_mean).squaredNorm();
  // (H^T R^-1 H)^-1 = P (U^T U)^-1 P^T with U the triangular QR factor.
  const Eigen::MatrixXd u = qr.matrixR().topLeftCorner(k, k).triangularView<Eigen::Upper>();
  const Eigen::MatrixXd uinv =
      u.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(k, k));
  const Eigen::MatrixXd cov_perm = uinv * uinv.transpose();
  const auto& perm = qr.colsPermutation();
  Eigen::MatrixXd cov = perm * cov_perm * perm.transpose();
  post.lambda_cov_over_sigma2 = 0.5 * (cov + cov.transpose());
  post.alpha = 0.5 * static_cast<double>(n - k);
  post.sigma2_reml = post.q / (2.0 * post.alpha);
  post.scale_size = problem.scale ? problem.scale->size() : 0;
  post.trend_size = problem.trend.size();
  return post;
}

double concentrated_restricted_nll(const LevelProblem& problem, const Kernel& kernel,
                                   const RegularizationPolicy& policy) {
  const FactoredCorrelation r =
      FactoredCorrelation::factor(correlation_matrix(kernel, problem.x), policy);
  const LevelPosterior post = posterior_level(problem, r);
  return r.log_det() + 2.0 * post.alpha * std::log(post.sigma2_reml);
}

Basis FitConfig::trend(int t) const {
  return t < static_cast<int>(trends.size()) ? trends[t] : Basis::constant();
}

Basis FitConfig::scale(int t) const {
  return t >= 1 && t - 1 < static_cast<int>(scales.size()) ? scales[t - 1] : Basis::constant();
}

std::optional<Eigen::VectorXd> FitConfig::fixed(int t) const {
  return t < static_cast<int>(fixed_theta.size()) ? fixed_theta[t] : std::nullopt;
}

ThetaBounds default_theta_bounds(const Eigen::MatrixXd& design, double lower_factor,
                                 double upper_factor) {
  if (!(lower_factor > 0.0) || !(upper_factor >= lower_factor)) {
    throw InvalidArgument("theta bound factors must satisfy 0 < lower <= upper");
  }
  const Eigen::Index d = design.cols();
  Eigen::VectorXd range(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    const double w = design.rows() > 0 ? design.col(i).maxCoeff() - design.col(i).minCoeff() : 0.0;
    range(i) = w > 0.0 ? w : 1.0;
  }
  return {lower_factor * range, upper_factor * range};
}

LevelFit fit_level(const LevelProblem& problem, const FitConfig& config, int t) {
  const Eigen::Index d = problem.x.cols();
  problem.trend.check_dimension(d);
  if (problem.scale) problem.scale->check_dimension(d);

  Eigen::VectorXd theta;
  if (auto fixed = config.fixed(t)) {
    theta = *fixed;
  } else {
    OptimizerConfig opt = config.optimizer;
    opt.seed = config.optimizer.seed + static_cast<std::uint64_t>(t);
    opt.threads = std::max(opt.threads, config.threads);
    std::atomic<int> failures{0};
    auto objective = [&](const Eigen::VectorXd& th) {
      try {
        return concentrated_restricted_nll(problem, Kernel(config.family, th),
                                           config.regularization);
      } catch (const NumericalError&) {
        ++failures;
        return std::numeric_limits<double>::infinity();
      }
    };
    const auto bounds =
        default_theta_bounds(problem.x, config.theta_lower_factor, config.theta_upper_factor);
    theta = optimize_theta(objective, bounds, opt).theta;
    if (failures > 0) {
      warn("level " + std::to_string(t + 1) + ": " + std::to_string(failures.load()) +
           " length-scale candidates gave a singular problem and were skipped");
    }
  }

  Kernel kernel(config.family, theta);
  kernel.check_dimension(d);
  const FactoredCorrelation r =
      FactoredCorrelation::factor(correlation_matrix(kernel, problem.x), config.regularization);
  if (r.nugget() > 0.0) {
    std::ostringstream msg;
    msg << "level " << t + 1 << ": correlation matrix regularized with nugget " << r.nugget();
    warn(msg.str());
  }
  LevelFit out{posterior_level(problem, r), kernel, r.nugget(), 0.0};
  out.objective = r.log_det() + 2.0 * out.posterior.alpha * std::log(out.posterior.sigma2_reml);
  return out;
}

FittedModel FittedModel::with_sigma2(const Eigen::VectorXd& sigma2) const {
  FittedModel out = *this;
  out.structure = structure.with_sigma2(sigma2);
  return out;
}

FittedModel assemble_model(SortedLevels data, std::vector<LevelPosterior> posteriors,
                           const std::vector<Kernel>& kernels, const std::vector<Basis>& trends,
                           const std::vector<Basis>& scales, const std::vector<double>& nuggets) {
  const int s = data.num_levels();
  if (static_cast<int>(posteriors.size()) != s || static_cast<int>(kernels.size()) != s ||
      static_cast<int>(trends.size()) != s || static_cast<int>(nuggets.size()) != s ||
      static_cast<int>(scales.size()) != s - 1) {
    throw DimensionMismatch("per-level estimates do not match the number of levels");
  }
  std::vector<LevelStructure> levels;
  Eigen::VectorXd sigma2(s);
  std::vector<ScaleFactor> rho;
  Eigen::Index p = 0;
  for (int t = 0; t < s; ++t) {
    auto factor = std::make_shared<const FactoredCorrelation>(
        FactoredCorrelation::with_nugget(correlation_matrix(kernels[t], data.x(t)), nuggets[t]));
    levels.push_back({data.x(t), kernels[t], trends[t], std::move(factor)});
    sigma2(t) = posteriors[t].sigma2_reml;
    if (t > 0) rho.push_back(ScaleFactor::with_basis(scales[t - 1], posteriors[t].scale_coefficients()));
    p += posteriors[t].trend_size;
  }
  Eigen::VectorXd beta(p);
  p = 0;
  for (const auto& post : posteriors) {
    beta.segment(p, post.trend_size) = post.trend_coefficients();
    p += post.trend_size;
  }

  CoKrigingStructure structure(std::move(levels), std::move(rho), sigma2);
  Eigen::VectorXd z(data.total_size());
  for (int t = 0; t < s; ++t) z.segment(structure.offset(t), data.n(t)) = data.y(t);
  const Eigen::VectorXd resid = z - structure.trend_matrix() * beta;
  const auto e = structure.innovations(resid);
  std::vector<Eigen::VectorXd> gamma(s);
  for (int t = 0; t < s; ++t) gamma[t] = structure.level(t).factor->solve(Eigen::VectorXd(e[t].col(0)));

  return FittedModel{std::move(data), std::move(posteriors), std::move(structure), std::move(beta),
                     std::move(gamma)};
}

FittedModel fit(const SortedLevels& data, const FitConfig& config) {
  const int s = data.num_levels();
  std::vector<LevelPosterior> posteriors;
  std::vector<Kernel> kernels;
  std::vector<Basis> trends;
  std::vector<Basis> scales;
  std::vector<double> nuggets;
  for (int t = 0; t < s; ++t) {
    trends.push_back(config.trend(t));
    if (t > 0) scales.push_back(config.scale(t));
    auto fit_one = [&]() {
      try {
        return fit_level(level_problem(data, t, trends.back(), config.scale(t)), config, t);
      } catch (const InsufficientData& e) {
        throw InsufficientData("level " + std::to_string(t + 1) + ": " + e.what());
      } catch (const SingularTrend& e) {
        throw SingularTrend("level " + std::to_string(t + 1) + ": " + e.what());
      }
    };
    LevelFit lf = fit_one();
    posteriors.push_back(std::move(lf.posterior));
    kernels.push_back(std::move(lf.kernel));
    nuggets.push_back(lf.nugget);
  }
  return assemble_model(data, std::move(posteriors), kernels, trends, scales, nuggets);
}

}  // namespace cokrig
