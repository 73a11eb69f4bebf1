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

#include "cokrig/basis.hpp"

#include <cctype>

#include "cokrig/errors.hpp"

namespace cokrig {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

BasisFunction parse_function(const std::string& token) {
  if (token == "1") return {};
  const auto bad = [&]() {
    return InvalidArgument("bad basis function '" + token +
                           "' (expected 1, xK or xK^2 with K >= 1)");
  };
  if (token.size() < 2 || token[0] != 'x') throw bad();
  const auto caret = token.find('^');
  const std::string index = token.substr(1, caret == std::string::npos ? std::string::npos
                                                                       : caret - 1);
  if (index.empty()) throw bad();
  for (char c : index) {
    if (!std::isdigit(static_cast<unsigned char>(c))) throw bad();
  }
  const int coord = std::stoi(index);
  int degree = 1;
  if (caret != std::string::npos) {
    const std::string deg = token.substr(caret + 1);
    if (deg != "1" && deg != "2") throw bad();
    degree = std::stoi(deg);
  }
  if (coord < 1) throw bad();
  return {BasisFunction::Kind::Monomial, coord - 1, degree};
}

}  // namespace

double BasisFunction::operator()(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (kind == Kind::Constant) return 1.0;
  const double v = x(coord);
  return degree == 1 ? v : v * v;
}

Basis::Basis(std::vector<BasisFunction> functions) : functions_(std::move(functions)) {
  if (functions_.empty()) throw InvalidArgument("a basis needs at least one function");
  for (const auto& f : functions_) {
    if (f.kind == BasisFunction::Kind::Monomial &&
        (f.coord < 0 || f.degree < 1 || f.degree > 2)) {
      throw InvalidArgument("monomials must have degree 1 or 2 in a valid coordinate");
    }
  }
}

Basis Basis::constant() { return Basis({BasisFunction{}}); }

Basis Basis::linear(int dim) {
  std::vector<BasisFunction> fs{BasisFunction{}};
  for (int k = 0; k < dim; ++k) fs.push_back({BasisFunction::Kind::Monomial, k, 1});
  return Basis(std::move(fs));
}

Basis Basis::parse(const std::string& spec) {
  std::vector<BasisFunction> fs;
  std::size_t start = 0;
  while (start <= spec.size()) {
    const auto comma = spec.find(',', start);
    const std::string token =
        trim(spec.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    if (!token.empty()) fs.push_back(parse_function(token));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return Basis(std::move(fs));
}

std::string Basis::to_string() const {
  std::string out;
  for (const auto& f : functions_) {
    if (!out.empty()) out += ",";
    if (f.kind == BasisFunction::Kind::Constant) {
      out += "1";
    } else {
      out += "x" + std::to_string(f.coord + 1);
      if (f.degree == 2) out += "^2";
    }
  }
  return out;
}

void Basis::check_dimension(Eigen::Index dim) const {
  for (const auto& f : functions_) {
    if (f.kind == BasisFunction::Kind::Monomial && f.coord >= dim) {
      throw DimensionMismatch("basis function x" + std::to_string(f.coord + 1) +
                              " used with " + std::to_string(dim) + "-dimensional inputs");
    }
  }
}

Eigen::VectorXd Basis::eval(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  check_dimension(x.size());
  Eigen::VectorXd out(size());
  for (Eigen::Index i = 0; i < size(); ++i) out(i) = functions_[i](x);
  return out;
}

Eigen::MatrixXd Basis::matrix(const Eigen::MatrixXd& design) const {
  check_dimension(design.cols());
  Eigen::MatrixXd out(design.rows(), size());
  for (Eigen::Index r = 0; r < design.rows(); ++r) {
    const Eigen::VectorXd x = design.row(r).transpose();
    for (Eigen::Index i = 0; i < size(); ++i) out(r, i) = functions_[i](x);
  }
  return out;
}

}  // namespace cokrig
