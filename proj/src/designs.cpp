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

#include "cokrig/designs.hpp"

#include <charconv>
#include <string>

#include "cokrig/errors.hpp"

namespace cokrig {

namespace {

bool same_point(const Eigen::MatrixXd& a, Eigen::Index i, const Eigen::MatrixXd& b,
                Eigen::Index j, double tol) {
  for (Eigen::Index k = 0; k < a.cols(); ++k) {
    if (std::abs(a(i, k) - b(j, k)) > tol) return false;
  }
  return true;
}

std::string format_point(const Eigen::MatrixXd& a, Eigen::Index i) {
  std::string out = "(";
  char buf[32];
  for (Eigen::Index k = 0; k < a.cols(); ++k) {
    if (k) out += ", ";
    out.append(buf, std::to_chars(buf, buf + sizeof buf, a(i, k)).ptr);
  }
  return out + ")";
}

}  // namespace

Eigen::Index find_point(const Eigen::MatrixXd& design,
                        const Eigen::Ref<const Eigen::VectorXd>& point, double tol) {
  if (point.size() != design.cols()) {
    throw DimensionMismatch("point of dimension " + std::to_string(point.size()) +
                            " searched in a design of dimension " +
                            std::to_string(design.cols()));
  }
  for (Eigen::Index i = 0; i < design.rows(); ++i) {
    bool match = true;
    for (Eigen::Index k = 0; k < design.cols() && match; ++k) {
      match = std::abs(design(i, k) - point(k)) <= tol;
    }
    if (match) return i;
  }
  return -1;
}

std::vector<Eigen::Index> NestedDesigns::compose(int from, int to) const {
  if (from <= to || to < 0 || from >= num_levels()) {
    throw InvalidArgument("compose requires 0 <= to < from < number of levels");
  }
  std::vector<Eigen::Index> rows = index_maps[from];
  for (int t = from - 1; t > to; --t) {
    for (auto& r : rows) r = index_maps[t][r];
  }
  return rows;
}

NestedDesigns validate_nesting(std::vector<Eigen::MatrixXd> levels, double tol) {
  if (levels.empty()) throw InvalidArgument("at least one level is required");
  if (!(tol >= 0.0)) throw InvalidArgument("nesting tolerance must be nonnegative");
  const Eigen::Index dim = levels.front().cols();
  if (dim == 0) throw DimensionMismatch("design points must have at least one coordinate");
  for (std::size_t t = 0; t < levels.size(); ++t) {
    const auto& d = levels[t];
    if (d.cols() != dim) {
      throw DimensionMismatch("level " + std::to_string(t + 1) + " has dimension " +
                              std::to_string(d.cols()) + ", level 1 has " +
                              std::to_string(dim));
    }
    if (d.rows() == 0) {
      throw InvalidArgument("level " + std::to_string(t + 1) + " has 0 observations");
    }
    for (Eigen::Index i = 0; i < d.rows(); ++i) {
      for (Eigen::Index j = i + 1; j < d.rows(); ++j) {
        if (same_point(d, i, d, j, tol)) {
          throw DuplicatePoint("level " + std::to_string(t + 1) + " rows " +
                               std::to_string(i + 1) + " and " + std::to_string(j + 1) +
                               " are the same point " + format_point(d, i));
        }
      }
    }
  }

  NestedDesigns out;
  out.index_maps.resize(levels.size());
  for (std::size_t t = 1; t < levels.size(); ++t) {
    const auto& upper = levels[t];
    const auto& lower = levels[t - 1];
    auto& map = out.index_maps[t];
    map.reserve(upper.rows());
    for (Eigen::Index i = 0; i < upper.rows(); ++i) {
      Eigen::Index match = -1;
      for (Eigen::Index j = 0; j < lower.rows(); ++j) {
        if (same_point(upper, i, lower, j, tol)) {
          match = j;
          break;
        }
      }
      if (match < 0) throw NotNested(static_cast<int>(t + 1), format_point(upper, i));
      map.push_back(match);
    }
  }
  out.levels = std::move(levels);
  return out;
}

Eigen::Index SortedLevels::total_size() const {
  Eigen::Index n = 0;
  for (const auto& d : designs.levels) n += d.rows();
  return n;
}

Eigen::VectorXd SortedLevels::previous_on_level(int t) const {
  if (t < 1 || t >= num_levels()) {
    throw InvalidArgument("previous-level observations exist only for levels 2..s");
  }
  return observations[t - 1].tail(n(t));
}

std::vector<LevelData> SortedLevels::as_level_data() const {
  std::vector<LevelData> out;
  for (int t = 0; t < num_levels(); ++t) out.push_back({x(t), y(t)});
  return out;
}

SortedLevels sort_nested(const NestedDesigns& designs,
                         const std::vector<Eigen::VectorXd>& observations) {
  const int s = designs.num_levels();
  if (static_cast<int>(observations.size()) != s) {
    throw DimensionMismatch("expected observations for " + std::to_string(s) +
                            " levels, got " + std::to_string(observations.size()));
  }
  for (int t = 0; t < s; ++t) {
    if (observations[t].size() != designs.levels[t].rows()) {
      throw DimensionMismatch("level " + std::to_string(t + 1) + " has " +
                              std::to_string(designs.levels[t].rows()) + " points but " +
                              std::to_string(observations[t].size()) + " observations");
    }
  }

  std::vector<std::vector<Eigen::Index>> perm(s);
  perm[s - 1].resize(designs.levels[s - 1].rows());
  for (Eigen::Index i = 0; i < designs.levels[s - 1].rows(); ++i) perm[s - 1][i] = i;

  for (int t = s - 1; t >= 1; --t) {
    const Eigen::Index n_lower = designs.levels[t - 1].rows();
    std::vector<bool> in_upper(n_lower, false);
    std::vector<Eigen::Index> tail;
    tail.reserve(perm[t].size());
    for (Eigen::Index orig : perm[t]) {
      const Eigen::Index lower_row = designs.index_maps[t][orig];
      in_upper[lower_row] = true;
      tail.push_back(lower_row);
    }
    auto& order = perm[t - 1];
    order.clear();
    order.reserve(n_lower);
    for (Eigen::Index j = 0; j < n_lower; ++j) {
      if (!in_upper[j]) order.push_back(j);
    }
    order.insert(order.end(), tail.begin(), tail.end());
  }

  SortedLevels out;
  out.permutations = perm;
  out.designs.levels.resize(s);
  out.designs.index_maps.resize(s);
  out.observations.resize(s);
  for (int t = 0; t < s; ++t) {
    const auto& src = designs.levels[t];
    Eigen::MatrixXd x(src.rows(), src.cols());
    Eigen::VectorXd y(src.rows());
    for (Eigen::Index i = 0; i < src.rows(); ++i) {
      x.row(i) = src.row(perm[t][i]);
      y(i) = observations[t](perm[t][i]);
    }
    if (t > 0) {
      const Eigen::Index n_t = x.rows();
      x = out.designs.levels[t - 1].bottomRows(n_t);
      auto& map = out.designs.index_maps[t];
      map.resize(n_t);
      const Eigen::Index offset = out.designs.levels[t - 1].rows() - n_t;
      for (Eigen::Index i = 0; i < n_t; ++i) map[i] = offset + i;
    }
    out.designs.levels[t] = std::move(x);
    out.observations[t] = std::move(y);
  }
  return out;
}

SortedLevels prepare_levels(const std::vector<LevelData>& levels, double tol) {
  std::vector<Eigen::MatrixXd> designs;
  std::vector<Eigen::VectorXd> obs;
  for (const auto& level : levels) {
    designs.push_back(level.x);
    obs.push_back(level.y);
  }
  return sort_nested(validate_nesting(std::move(designs), tol), obs);
}

}  // namespace cokrig
