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

#include "cokrig/prediction.hpp"

#include <algorithm>
#include <atomic>

#include "cokrig/errors.hpp"
#include "cokrig/optimize.hpp"

namespace cokrig {

namespace {

constexpr Eigen::Index kChunk = 256;

void predict_chunk(const FittedModel& model, const Eigen::MatrixXd& xs, Eigen::Index begin,
                   Eigen::Index end, std::vector<PluginPrediction>& out,
                   std::atomic<int>& clamped) {
  const auto& st = model.structure;
  const int s = st.num_levels();
  const Eigen::Index m = end - begin;
  const Eigen::MatrixXd xc = xs.middleRows(begin, m);

  Eigen::VectorXd mean(m);
  for (Eigen::Index i = 0; i < m; ++i) mean(i) = st.trend_vector(xc.row(i).transpose()).dot(model.beta);
  Eigen::VectorXd var = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd prior = Eigen::VectorXd::Zero(m);

  for (int t = 0; t < s; ++t) {
    const auto& lv = st.level(t);
    Eigen::VectorXd c(m);
    for (Eigen::Index i = 0; i < m; ++i) c(i) = st.scale_product(t, s - 1, xc.row(i).transpose());
    const Eigen::MatrixXd r = correlation_matrix(lv.kernel, xc, lv.design);  // m x n_t
    mean.array() += c.array() * (r * model.innovation_weights[t]).array();
    const Eigen::MatrixXd white = lv.factor->whiten(Eigen::MatrixXd(r.transpose()));
    Eigen::VectorXd explained = white.colwise().squaredNorm().transpose();
    if (lv.factor->nugget() == 0.0) {
      // Exact interpolation at observed points; skips the 1 - (1 - eps) roundoff.
      for (Eigen::Index i = 0; i < m; ++i) {
        if (find_point(lv.design, xc.row(i).transpose(), 0.0) >= 0) explained(i) = 1.0;
      }
    }
    const Eigen::VectorXd level_prior = st.sigma2()(t) * c.array().square();
    var.array() += level_prior.array() * (1.0 - explained.array());
    prior += level_prior;
  }

  for (Eigen::Index i = 0; i < m; ++i) {
    double v = var(i);
    if (v < 0.0) {
      if (v < -1e-10 * prior(i)) ++clamped;
      v = 0.0;
    }
    out[begin + i] = {mean(i), v};
  }
}

}  // namespace

std::vector<PluginPrediction> predict_batch(const FittedModel& model, const Eigen::MatrixXd& xs,
                                            int threads) {
  if (xs.cols() != model.structure.dim()) {
    throw DimensionMismatch("query points have dimension " + std::to_string(xs.cols()) +
                            ", model inputs have " + std::to_string(model.structure.dim()));
  }
  std::vector<PluginPrediction> out(xs.rows());
  const int chunks = static_cast<int>((xs.rows() + kChunk - 1) / kChunk);
  std::atomic<int> clamped{0};
  parallel_for(chunks, threads, [&](int c) {
    const Eigen::Index begin = c * kChunk;
    predict_chunk(model, xs, begin, std::min<Eigen::Index>(xs.rows(), begin + kChunk), out,
                  clamped);
  });
  if (clamped > 0) {
    warn(std::to_string(clamped.load()) +
         " predictive variances were noticeably negative and were set to 0");
  }
  return out;
}

PluginPrediction predict(const FittedModel& model, const Eigen::Ref<const Eigen::VectorXd>& x) {
  return predict_batch(model, Eigen::MatrixXd(x.transpose())).front();
}

PluginPrediction predict_joint(const CoKrigingStructure& structure, const Eigen::VectorXd& beta,
                               const Eigen::VectorXd& z,
                               const Eigen::Ref<const Eigen::VectorXd>& x) {
  const Eigen::VectorXd t = structure.cross_covariance(x);
  const Eigen::VectorXd resid = z - structure.trend_matrix() * beta;
  const double mean = structure.trend_vector(x).dot(beta) + t.dot(structure.apply_inverse(resid));
  const double var = structure.prior_variance(x) - t.dot(structure.apply_inverse(t));
  return {mean, std::max(0.0, var)};
}

Eigen::VectorXd stacked_observations(const SortedLevels& data) {
  Eigen::VectorXd z(data.total_size());
  Eigen::Index off = 0;
  for (int t = 0; t < data.num_levels(); ++t) {
    z.segment(off, data.n(t)) = data.y(t);
    off += data.n(t);
  }
  return z;
}

TwoLevelPredictor::TwoLevelPredictor(const FittedModel& model, const Beta1Law& beta1,
                                     const Eigen::Ref<const Eigen::VectorXd>& x) {
  const auto& st = model.structure;
  if (st.num_levels() != 2) {
    throw InvalidArgument("the two-level predictive needs exactly 2 levels, model has " +
                          std::to_string(st.num_levels()));
  }
  if (x.size() != st.dim()) {
    throw DimensionMismatch("query point has dimension " + std::to_string(x.size()) +
                            ", model inputs have " + std::to_string(st.dim()));
  }
  const auto& l1 = st.level(0);
  const auto& l2 = st.level(1);
  if (beta1.mean.size() != l1.trend.size() || beta1.cov_over_sigma2.rows() != l1.trend.size()) {
    throw DimensionMismatch("beta_1 law does not match the level-1 trend basis");
  }
  const Eigen::VectorXd& z1 = model.data.y(0);
  const Eigen::VectorXd& z2 = model.data.y(1);

  const Eigen::VectorXd r1 = cross_correlation(l1.kernel, x, l1.design);
  const Eigen::VectorXd a1 = l1.factor->solve(r1);
  const Eigen::MatrixXd f1_design = l1.trend.matrix(l1.design);
  const Eigen::VectorXd f1 = l1.trend.eval(x);
  k1_unscaled_ = f1 - f1_design.transpose() * a1;
  const double m1 = f1.dot(beta1.mean) + a1.dot(z1 - f1_design * beta1.mean);
  level1_factor_ = std::max(0.0, 1.0 - r1.dot(a1)) +
                   k1_unscaled_.dot(beta1.cov_over_sigma2 * k1_unscaled_);

  const Eigen::VectorXd r2 = cross_correlation(l2.kernel, x, l2.design);
  const Eigen::VectorXd a2 = l2.factor->solve(r2);
  level2_factor_ = std::max(0.0, 1.0 - r2.dot(a2));

  const Basis& scale = st.scales()[0].basis;
  scale_basis_ = scale.eval(x);
  const Eigen::MatrixXd rho_part =
      model.data.previous_on_level(1).asDiagonal() * scale.matrix(l2.design);
  const Eigen::MatrixXd f2_design = l2.trend.matrix(l2.design);
  const Eigen::Index q = scale_basis_.size();
  gradient_.resize(q + f2_design.cols());
  gradient_.head(q) = m1 * scale_basis_ - rho_part.transpose() * a2;
  gradient_.tail(f2_design.cols()) = l2.trend.eval(x) - f2_design.transpose() * a2;
  offset_ = a2.dot(z2);
}

PluginPrediction TwoLevelPredictor::operator()(const Eigen::Ref<const Eigen::VectorXd>& lambda,
                                               double sigma1_sq, double sigma2_sq) const {
  if (lambda.size() != lambda_size()) {
    throw DimensionMismatch("lambda has " + std::to_string(lambda.size()) +
                            " components, expected " + std::to_string(lambda_size()));
  }
  const double r = rho(lambda);
  return {mean(lambda), r * r * sigma1_sq * level1_factor_ + sigma2_sq * level2_factor_};
}

PluginPrediction predict_2level_beta1_uncertain(const FittedModel& model, const Beta1Law& beta1,
                                                const Eigen::VectorXd& lambda, double sigma1_sq,
                                                double sigma2_sq,
                                                const Eigen::Ref<const Eigen::VectorXd>& x) {
  return TwoLevelPredictor(model, beta1, x)(lambda, sigma1_sq, sigma2_sq);
}

}  // namespace cokrig
