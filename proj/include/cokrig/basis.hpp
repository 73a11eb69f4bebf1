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
#include <string>
#include <vector>

namespace cokrig {

/// Constant, or x_coord^degree with degree 1 or 2 (coord is zero-based).
struct BasisFunction {
  enum class Kind { Constant, Monomial };
  Kind kind = Kind::Constant;
  int coord = 0;
  int degree = 0;

  double operator()(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  bool operator==(const BasisFunction&) const = default;
};

/// Regression functions f(x) = (f^1(x), ..., f^p(x)).
class Basis {
 public:
  Basis() = default;
  explicit Basis(std::vector<BasisFunction> functions);

  static Basis constant();
  /// (1, x_1, ..., x_d)
  static Basis linear(int dim);
  /// Parses "1,x1,x2^2" (coordinates are 1-based in the text form).
  static Basis parse(const std::string& spec);
  std::string to_string() const;

  Eigen::Index size() const { return static_cast<Eigen::Index>(functions_.size()); }
  const std::vector<BasisFunction>& functions() const { return functions_; }

  /// Throws DimensionMismatch when a monomial refers past `dim`.
  void check_dimension(Eigen::Index dim) const;

  Eigen::VectorXd eval(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  /// F(D): one row f(x)^T per design point.
  Eigen::MatrixXd matrix(const Eigen::MatrixXd& design) const;

  bool operator==(const Basis&) const = default;

 private:
  std::vector<BasisFunction> functions_;
};

}  // namespace cokrig
