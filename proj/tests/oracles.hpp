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

// Independent dense reference implementations used by the unit and
// acceptance tests. Nothing here calls the recursive machinery under test.

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "cokrig/basis.hpp"
#include "cokrig/designs.hpp"
#include "cokrig/estimation.hpp"
#include "cokrig/kernels.hpp"
#include "cokrig/model_core.hpp"

namespace oracle {

inline double correlation(cokrig::KernelFamily family, const Eigen::VectorXd& theta,
                          const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  auto th = [&](Eigen::Index i) { return theta.size() == 1 ? theta(0) : theta(i); };
  if (family == cokrig::KernelFamily::SquaredExponential) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) s += std::pow((x(i) - y(i)) / th(i), 2);
    return std::exp(-s);
  }
  double r = 1.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = std::abs(x(i) - y(i)) / th(i);
    r *= (1.0 + std::sqrt(5.0) * h + 5.0 / 3.0 * h * h) * std::exp(-std::sqrt(5.0) * h);
  }
  return r;
}

/// A complete set of model parameters on sorted nested designs.
struct Instance {
  cokrig::SortedLevels data;
  cokrig::KernelFamily family = cokrig::KernelFamily::SquaredExponential;
  std::vector<Eigen::VectorXd> theta;
  std::vector<cokrig::Basis> trends;
  std::vector<cokrig::ScaleFactor> scales;  // scales[t] links level t to t + 1
  Eigen::VectorXd sigma2;
  Eigen::VectorXd beta;  // concatenated trend coefficients

  int levels() const { return data.num_levels(); }
  Eigen::Index dim() const { return data.x(0).cols(); }

  std::vector<cokrig::Kernel> kernels() const {
    std::vector<cokrig::Kernel> out;
    for (const auto& th : theta) out.emplace_back(family, th);
    return out;
  }

  cokrig::CoKrigingStructure structure() const {
    return cokrig::CoKrigingStructure::build(data, kernels(), trends, scales, sigma2);
  }

  // prod_{j=from}^{to-1} rho_j(x), zero-based levels
  double scale_product(int from, int to, const Eigen::VectorXd& x) const {
    double p = 1.0;
    for (int j = from; j < to; ++j) p *= scales[j].basis.eval(x).dot(scales[j].beta);
    return p;
  }

  double cov(int t, const Eigen::VectorXd& x, int u, const Eigen::VectorXd& y) const {
    double c = 0.0;
    for (int k = 0; k <= std::min(t, u); ++k) {
      c += sigma2(k) * correlation(family, theta[k], x, y) * scale_product(k, t, x) *
           scale_product(k, u, y);
    }
    return c;
  }

  // h_t(x): E[Z_t(x)] = h_t(x)^T beta
  Eigen::VectorXd trend_row(int t, const Eigen::VectorXd& x) const {
    Eigen::VectorXd h = Eigen::VectorXd::Zero(beta.size());
    Eigen::Index off = 0;
    for (int k = 0; k < levels(); ++k) {
      const Eigen::Index p = trends[k].size();
      if (k <= t) h.segment(off, p) = scale_product(k, t, x) * trends[k].eval(x);
      off += p;
    }
    return h;
  }

  std::vector<std::pair<int, Eigen::VectorXd>> points() const {
    std::vector<std::pair<int, Eigen::VectorXd>> out;
    for (int t = 0; t < levels(); ++t) {
      for (Eigen::Index i = 0; i < data.n(t); ++i) out.emplace_back(t, data.x(t).row(i).transpose());
    }
    return out;
  }

  Eigen::MatrixXd dense_covariance() const {
    const auto pts = points();
    const auto n = static_cast<Eigen::Index>(pts.size());
    Eigen::MatrixXd v(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        v(i, j) = cov(pts[i].first, pts[i].second, pts[j].first, pts[j].second);
      }
    }
    return v;
  }

  Eigen::MatrixXd dense_trend() const {
    const auto pts = points();
    Eigen::MatrixXd h(static_cast<Eigen::Index>(pts.size()), beta.size());
    for (std::size_t i = 0; i < pts.size(); ++i) h.row(i) = trend_row(pts[i].first, pts[i].second);
    return h;
  }

  Eigen::VectorXd dense_cross(const Eigen::VectorXd& x) const {
    const auto pts = points();
    Eigen::VectorXd k(static_cast<Eigen::Index>(pts.size()));
    for (std::size_t i = 0; i < pts.size(); ++i) {
      k(i) = cov(levels() - 1, x, pts[i].first, pts[i].second);
    }
    return k;
  }

  /// Conditional mean and variance of Z_s(x) given z, with beta known.
  std::pair<double, double> dense_predict(const Eigen::VectorXd& z, const Eigen::VectorXd& x) const {
    const Eigen::MatrixXd v = dense_covariance();
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(v);
    const Eigen::VectorXd k = dense_cross(x);
    const double mean = trend_row(levels() - 1, x).dot(beta) + k.dot(lu.solve(z - dense_trend() * beta));
    const double var = cov(levels() - 1, x, levels() - 1, x) - k.dot(lu.solve(k));
    return {mean, var};
  }
};

/// Nested designs with uniform points on [0,1]^dim: level t keeps a random
/// subset of level t - 1.
inline std::vector<Eigen::MatrixXd> nested_uniform(std::mt19937_64& rng,
                                                   const std::vector<int>& sizes, int dim) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Eigen::MatrixXd> out;
  Eigen::MatrixXd x(sizes[0], dim);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = u(rng);
  out.push_back(x);
  for (std::size_t t = 1; t < sizes.size(); ++t) {
    std::vector<Eigen::Index> idx(out.back().rows());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<Eigen::Index>(i);
    std::shuffle(idx.begin(), idx.end(), rng);
    Eigen::MatrixXd next(sizes[t], dim);
    for (int i = 0; i < sizes[t]; ++i) next.row(i) = out.back().row(idx[i]);
    out.push_back(next);
  }
  return out;
}

/// Draws a response vector from the model itself (dense Cholesky).
inline Eigen::VectorXd sample_responses(const Instance& inst, std::mt19937_64& rng) {
  const Eigen::MatrixXd v = inst.dense_covariance();
  const Eigen::LLT<Eigen::MatrixXd> llt(v + 1e-10 * v.diagonal().maxCoeff() *
                                                Eigen::MatrixXd::Identity(v.rows(), v.cols()));
  std::normal_distribution<double> g;
  Eigen::VectorXd e(v.rows());
  for (Eigen::Index i = 0; i < e.size(); ++i) e(i) = g(rng);
  return inst.dense_trend() * inst.beta + llt.matrixL() * e;
}

/// Random instance for property tests: Matern 5/2 length-scales in
/// [0.15, 0.35], constant or linear rho, responses drawn from the model.
inline Instance random_instance(std::mt19937_64& rng, const std::vector<int>& sizes, int dim,
                                bool linear_rho) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int s = static_cast<int>(sizes.size());
  Instance inst;
  inst.family = cokrig::KernelFamily::Matern52;
  std::vector<Eigen::VectorXd> zeros;
  for (int n : sizes) zeros.push_back(Eigen::VectorXd::Zero(n));
  inst.data = cokrig::sort_nested(cokrig::validate_nesting(nested_uniform(rng, sizes, dim)), zeros);
  inst.sigma2.resize(s);
  std::vector<double> beta;
  for (int t = 0; t < s; ++t) {
    Eigen::VectorXd th(dim);
    for (int i = 0; i < dim; ++i) th(i) = 0.15 + 0.2 * u(rng);
    inst.theta.push_back(th);
    inst.trends.push_back(t == 0 ? cokrig::Basis::constant() : cokrig::Basis::linear(dim));
    for (Eigen::Index k = 0; k < inst.trends.back().size(); ++k) beta.push_back(2.0 * u(rng) - 1.0);
    inst.sigma2(t) = (0.5 + u(rng)) / (1 << t);
    if (t + 1 < s) {
      if (linear_rho) {
        Eigen::VectorXd b(2);
        b << 0.6 + 0.6 * u(rng), 0.8 * u(rng) - 0.4;
        inst.scales.push_back(cokrig::ScaleFactor::with_basis(cokrig::Basis::parse("1,x1"), b));
      } else {
        inst.scales.push_back(cokrig::ScaleFactor::constant(0.6 + 0.8 * u(rng)));
      }
    }
  }
  inst.beta = Eigen::Map<const Eigen::VectorXd>(beta.data(), static_cast<Eigen::Index>(beta.size()));
  const Eigen::VectorXd z = sample_responses(inst, rng);
  Eigen::Index off = 0;
  for (int t = 0; t < s; ++t) {
    inst.data.observations[t] = z.segment(off, sizes[t]);
    off += sizes[t];
  }
  return inst;
}

inline Eigen::VectorXd stacked(const Instance& inst) {
  Eigen::VectorXd z(inst.data.total_size());
  Eigen::Index off = 0;
  for (int t = 0; t < inst.levels(); ++t) {
    z.segment(off, inst.data.n(t)) = inst.data.y(t);
    off += inst.data.n(t);
  }
  return z;
}

/// The parameters a fitted model predicts with, for the dense oracle.
inline Instance from_model(const cokrig::FittedModel& model) {
  Instance inst;
  inst.data = model.data;
  inst.family = model.kernel(0).family();
  for (int t = 0; t < model.num_levels(); ++t) {
    inst.theta.push_back(model.kernel(t).theta());
    inst.trends.push_back(model.structure.level(t).trend);
  }
  inst.scales = model.structure.scales();
  inst.sigma2 = model.structure.sigma2();
  inst.beta = model.beta;
  return inst;
}

}  // namespace oracle
