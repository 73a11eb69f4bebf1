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

#include "cokrig/model_core.hpp"

#include "cokrig/errors.hpp"

namespace cokrig {

ScaleFactor ScaleFactor::constant(double rho) {
  return {Basis::constant(), Eigen::VectorXd::Constant(1, rho)};
}

ScaleFactor ScaleFactor::with_basis(Basis basis, Eigen::VectorXd beta) {
  if (basis.size() != beta.size()) {
    throw DimensionMismatch("scale basis has " + std::to_string(basis.size()) +
                            " functions but " + std::to_string(beta.size()) +
                            " coefficients");
  }
  return {std::move(basis), std::move(beta)};
}

bool ScaleFactor::is_constant() const { return basis == Basis::constant(); }

double ScaleFactor::operator()(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  return basis.eval(x).dot(beta);
}

Eigen::VectorXd ScaleFactor::on(const Eigen::MatrixXd& design) const {
  return basis.matrix(design) * beta;
}

CoKrigingStructure::CoKrigingStructure(std::vector<LevelStructure> levels,
                                       std::vector<ScaleFactor> scales,
                                       Eigen::VectorXd sigma2)
    : levels_(std::move(levels)), scales_(std::move(scales)), sigma2_(std::move(sigma2)) {
  const auto s = levels_.size();
  if (s == 0) throw InvalidArgument("a co-kriging structure needs at least one level");
  if (scales_.size() != s - 1) {
    throw DimensionMismatch("expected " + std::to_string(s - 1) + " scale factors, got " +
                            std::to_string(scales_.size()));
  }
  if (static_cast<std::size_t>(sigma2_.size()) != s) {
    throw DimensionMismatch("expected " + std::to_string(s) + " variances, got " +
                            std::to_string(sigma2_.size()));
  }
  for (std::size_t t = 0; t < s; ++t) {
    const auto& lv = levels_[t];
    if (!lv.factor || lv.factor->size() != lv.design.rows()) {
      throw DimensionMismatch("level " + std::to_string(t + 1) +
                              " factorization does not match its design");
    }
    lv.kernel.check_dimension(lv.design.cols());
    lv.trend.check_dimension(lv.design.cols());
    if (t > 0 && lv.design.rows() > levels_[t - 1].design.rows()) {
      throw InvalidArgument("level " + std::to_string(t + 1) +
                            " has more points than the level below it");
    }
  }
  refresh_scales();
}

void CoKrigingStructure::refresh_scales() {
  scale_on_level_.assign(levels_.size(), Eigen::VectorXd());
  for (std::size_t t = 1; t < levels_.size(); ++t) {
    scale_on_level_[t] = scales_[t - 1].on(levels_[t].design);
  }
}

CoKrigingStructure CoKrigingStructure::build(const SortedLevels& data,
                                             const std::vector<Kernel>& kernels,
                                             const std::vector<Basis>& trends,
                                             std::vector<ScaleFactor> scales,
                                             Eigen::VectorXd sigma2,
                                             const RegularizationPolicy& policy) {
  const int s = data.num_levels();
  if (static_cast<int>(kernels.size()) != s || static_cast<int>(trends.size()) != s) {
    throw DimensionMismatch("one kernel and one trend basis per level are required");
  }
  std::vector<LevelStructure> levels;
  for (int t = 0; t < s; ++t) {
    auto factor = std::make_shared<const FactoredCorrelation>(
        FactoredCorrelation::factor(correlation_matrix(kernels[t], data.x(t)), policy));
    levels.push_back({data.x(t), kernels[t], trends[t], std::move(factor)});
  }
  return CoKrigingStructure(std::move(levels), std::move(scales), std::move(sigma2));
}

Eigen::Index CoKrigingStructure::total_size() const {
  Eigen::Index n = 0;
  for (const auto& lv : levels_) n += lv.design.rows();
  return n;
}

Eigen::Index CoKrigingStructure::trend_size() const {
  Eigen::Index p = 0;
  for (const auto& lv : levels_) p += lv.trend.size();
  return p;
}

Eigen::Index CoKrigingStructure::offset(int t) const {
  Eigen::Index off = 0;
  for (int j = 0; j < t; ++j) off += levels_[j].design.rows();
  return off;
}

CoKrigingStructure CoKrigingStructure::with_sigma2(Eigen::VectorXd sigma2) const {
  return CoKrigingStructure(levels_, scales_, std::move(sigma2));
}

CoKrigingStructure CoKrigingStructure::with_scales(std::vector<ScaleFactor> scales) const {
  return CoKrigingStructure(levels_, std::move(scales), sigma2_);
}

Eigen::VectorXd CoKrigingStructure::scale_products(int from, int to,
                                                  const Eigen::MatrixXd& points) const {
  Eigen::VectorXd out = Eigen::VectorXd::Ones(points.rows());
  for (int i = from; i < to; ++i) out.array() *= scales_[i].on(points).array();
  return out;
}

double CoKrigingStructure::scale_product(int from, int to,
                                         const Eigen::Ref<const Eigen::VectorXd>& x) const {
  double out = 1.0;
  for (int i = from; i < to; ++i) out *= scales_[i](x);
  return out;
}

Eigen::MatrixXd CoKrigingStructure::regularized_correlation(int j, const Eigen::MatrixXd& a,
                                                            const Eigen::MatrixXd& b) const {
  Eigen::MatrixXd r = correlation_matrix(levels_[j].kernel, a, b);
  const double nugget = levels_[j].factor->nugget();
  if (nugget > 0.0) {
    for (Eigen::Index q = 0; q < b.rows(); ++q) {
      for (Eigen::Index p = 0; p < a.rows(); ++p) {
        if (a.row(p) == b.row(q)) r(p, q) += nugget;
      }
    }
  }
  return r;
}

Eigen::MatrixXd CoKrigingStructure::trend_matrix() const {
  const int s = num_levels();
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(total_size(), trend_size());
  Eigen::Index row = 0;
  for (int j = 0; j < s; ++j) {
    const auto& dj = levels_[j].design;
    Eigen::Index col = 0;
    for (int k = 0; k <= j; ++k) {
      const Eigen::VectorXd coef = scale_products(k, j, dj);
      const Eigen::MatrixXd fk = levels_[k].trend.matrix(dj);
      h.block(row, col, dj.rows(), fk.cols()) = coef.asDiagonal() * fk;
      col += fk.cols();
    }
    row += dj.rows();
  }
  return h;
}

Eigen::MatrixXd CoKrigingStructure::covariance_block(int t, int u) const {
  if (t > u) return covariance_block(u, t).transpose();
  const auto& dt = levels_[t].design;
  const auto& du = levels_[u].design;
  // Diagonal-block formula of level t evaluated on (D_t, D_u).
  Eigen::MatrixXd block = Eigen::MatrixXd::Zero(dt.rows(), du.rows());
  for (int j = 0; j <= t; ++j) {
    const Eigen::VectorXd ct = scale_products(j, t, dt);
    const Eigen::VectorXd cu = scale_products(j, t, du);
    block += sigma2_(j) * (ct * cu.transpose()).cwiseProduct(regularized_correlation(j, dt, du));
  }
  if (u > t) block = block * scale_products(t, u, du).asDiagonal();
  return block;
}

Eigen::MatrixXd CoKrigingStructure::covariance() const {
  const int s = num_levels();
  const Eigen::Index n = total_size();
  Eigen::MatrixXd v(n, n);
  for (int t = 0; t < s; ++t) {
    for (int u = t; u < s; ++u) {
      const Eigen::MatrixXd b = covariance_block(t, u);
      v.block(offset(t), offset(u), b.rows(), b.cols()) = b;
      if (u != t) v.block(offset(u), offset(t), b.cols(), b.rows()) = b.transpose();
    }
  }
  return v;
}

Eigen::VectorXd CoKrigingStructure::cross_covariance(
    const Eigen::Ref<const Eigen::VectorXd>& x) const {
  const int s = num_levels();
  if (x.size() != dim()) {
    throw DimensionMismatch("query point has dimension " + std::to_string(x.size()) +
                            ", model inputs have " + std::to_string(dim()));
  }
  Eigen::VectorXd out(total_size());
  // t*_t(x, D_t) = rho_{t-1}(D_t) . t*_{t-1}(x, D_t) + prod_{i>=t} rho_i(x) sigma_t^2 R_t(x, D_t);
  // t*_{t-1}(x, D_t) is the trailing block of t*_{t-1}(x, D_{t-1}).
  Eigen::VectorXd prev;
  for (int t = 0; t < s; ++t) {
    const auto& lv = levels_[t];
    Eigen::VectorXd cur = scale_product(t, s - 1, x) * sigma2_(t) *
                          cross_correlation(lv.kernel, x, lv.design);
    if (t > 0) {
      cur.array() += scale_on_level_[t].array() * prev.tail(lv.design.rows()).array();
    }
    out.segment(offset(t), cur.size()) = cur;
    prev = std::move(cur);
  }
  return out;
}

Eigen::VectorXd CoKrigingStructure::trend_vector(
    const Eigen::Ref<const Eigen::VectorXd>& x) const {
  const int s = num_levels();
  Eigen::VectorXd out(trend_size());
  Eigen::Index col = 0;
  for (int k = 0; k < s; ++k) {
    const Eigen::VectorXd fk = levels_[k].trend.eval(x);
    out.segment(col, fk.size()) = scale_product(k, s - 1, x) * fk;
    col += fk.size();
  }
  return out;
}

double CoKrigingStructure::prior_variance(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  const int s = num_levels();
  double var = 0.0;
  for (int j = 0; j < s; ++j) {
    const double c = scale_product(j, s - 1, x);
    var += sigma2_(j) * c * c;
  }
  return var;
}

std::vector<Eigen::MatrixXd> CoKrigingStructure::innovations(const Eigen::MatrixXd& v) const {
  const int s = num_levels();
  if (v.rows() != total_size()) {
    throw DimensionMismatch("vector of length " + std::to_string(v.rows()) +
                            " applied to a covariance of size " +
                            std::to_string(total_size()));
  }
  std::vector<Eigen::MatrixXd> e(s);
  for (int t = 0; t < s; ++t) {
    const Eigen::Index nt = levels_[t].design.rows();
    e[t] = v.middleRows(offset(t), nt);
    if (t > 0) {
      const Eigen::Index prev_end = offset(t);
      e[t] -= scale_on_level_[t].asDiagonal() * v.middleRows(prev_end - nt, nt);
    }
  }
  return e;
}

Eigen::MatrixXd CoKrigingStructure::apply_inverse(const Eigen::MatrixXd& v) const {
  const int s = num_levels();
  std::vector<Eigen::MatrixXd> w = innovations(v);
  for (int t = 0; t < s; ++t) w[t] = levels_[t].factor->solve(w[t]) / sigma2_(t);
  Eigen::MatrixXd out(v.rows(), v.cols());
  for (int t = 0; t < s; ++t) {
    Eigen::MatrixXd block = w[t];
    if (t + 1 < s) {
      const Eigen::Index nu = levels_[t + 1].design.rows();
      block.bottomRows(nu) -= scale_on_level_[t + 1].asDiagonal() * w[t + 1];
    }
    out.middleRows(offset(t), block.rows()) = block;
  }
  return out;
}

Eigen::VectorXd CoKrigingStructure::apply_inverse(const Eigen::VectorXd& v) const {
  return apply_inverse(Eigen::MatrixXd(v)).col(0);
}

Eigen::VectorXd CoKrigingStructure::inverse_quadratic_forms(const Eigen::MatrixXd& v) const {
  const int s = num_levels();
  const std::vector<Eigen::MatrixXd> e = innovations(v);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(v.cols());
  for (int t = 0; t < s; ++t) {
    const Eigen::MatrixXd white = levels_[t].factor->whiten(e[t]);
    out += white.colwise().squaredNorm().transpose() / sigma2_(t);
  }
  return out;
}

Eigen::MatrixXd CoKrigingStructure::inverse() const {
  const int s = num_levels();
  auto scaled_inverse = [&](int t) {
    const Eigen::Index n = levels_[t].design.rows();
    return Eigen::MatrixXd(levels_[t].factor->solve(Eigen::MatrixXd(Eigen::MatrixXd::Identity(n, n))) /
                           sigma2_(t));
  };
  Eigen::MatrixXd vinv = scaled_inverse(0);
  for (int t = 1; t < s; ++t) {
    const Eigen::Index prev = vinv.rows();
    const Eigen::Index nt = levels_[t].design.rows();
    const Eigen::Index off = prev - nt;  // D_t sits at the end of D_{t-1}
    const Eigen::MatrixXd rinv = scaled_inverse(t);
    const auto p = scale_on_level_[t].asDiagonal();
    Eigen::MatrixXd next = Eigen::MatrixXd::Zero(prev + nt, prev + nt);
    next.topLeftCorner(prev, prev) = vinv;
    next.block(off, off, nt, nt) += p * rinv * p;
    next.block(off, prev, nt, nt) = -(p * rinv);
    next.block(prev, off, nt, nt) = -(rinv * p);
    next.bottomRightCorner(nt, nt) = rinv;
    vinv = std::move(next);
  }
  return vinv;
}

}  // namespace cokrig
