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
#include <vector>

namespace cokrig {

inline constexpr double kDefaultNestingTolerance = 1e-9;

/// Design points (one per row) and observed responses of one code level.
struct LevelData {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
};

/*
 * Validated hierarchy D_s ⊆ D_{s-1} ⊆ ... ⊆ D_1, cheapest level first.
 *
 * index_maps[t] (t >= 1, zero-based level index) lists, for every row of
 * levels[t], the row of levels[t - 1] holding the same point. index_maps[0]
 * is empty.
 */
struct NestedDesigns {
  std::vector<Eigen::MatrixXd> levels;
  std::vector<std::vector<Eigen::Index>> index_maps;

  int num_levels() const { return static_cast<int>(levels.size()); }
  Eigen::Index dim() const { return levels.empty() ? 0 : levels.front().cols(); }

  /// Rows of levels[to] holding the points of levels[from], from > to.
  std::vector<Eigen::Index> compose(int from, int to) const;
};

/// Checks dimensions, duplicates within each level and the subset chain.
/// Points match when every coordinate differs by at most `tol`.
NestedDesigns validate_nesting(std::vector<Eigen::MatrixXd> levels,
                               double tol = kDefaultNestingTolerance);

/*
 * Nested designs reordered so that the trailing rows of every D_{t-1} are
 * exactly D_t, in D_t's order: D_{t-1} = (D_{t-1} \ D_t, D_t). The leading
 * block keeps its original relative order.
 *
 * The coordinates of every D_t are replaced by those of the matching D_1
 * rows, so shared points are bitwise equal across levels.
 */
struct SortedLevels {
  NestedDesigns designs;
  std::vector<Eigen::VectorXd> observations;
  /// permutations[t][i]: original row of sorted row i at level t.
  std::vector<std::vector<Eigen::Index>> permutations;

  int num_levels() const { return designs.num_levels(); }
  const Eigen::MatrixXd& x(int t) const { return designs.levels[t]; }
  const Eigen::VectorXd& y(int t) const { return observations[t]; }
  Eigen::Index n(int t) const { return designs.levels[t].rows(); }
  Eigen::Index total_size() const;
  /// Observations of level t - 1 restricted to D_t (the trailing block).
  Eigen::VectorXd previous_on_level(int t) const;
  std::vector<LevelData> as_level_data() const;
};

SortedLevels sort_nested(const NestedDesigns& designs,
                         const std::vector<Eigen::VectorXd>& observations);

/// validate_nesting followed by sort_nested.
SortedLevels prepare_levels(const std::vector<LevelData>& levels,
                            double tol = kDefaultNestingTolerance);

/// Index of the row of `design` matching `point` within `tol`, or -1.
Eigen::Index find_point(const Eigen::MatrixXd& design,
                        const Eigen::Ref<const Eigen::VectorXd>& point, double tol);

}  // namespace cokrig
