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

#include "cokrig/demo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "cokrig/errors.hpp"

namespace cokrig {

std::string to_string(DemoProblem problem) {
  switch (problem) {
    case DemoProblem::Forrester1:
      return "forrester1";
    case DemoProblem::Forrester2HighFreq:
      return "forrester2";
    case DemoProblem::Ishigami3:
      return "ishigami3";
  }
  return "unknown";
}

DemoProblem parse_demo_problem(const std::string& name) {
  if (name == "forrester1") return DemoProblem::Forrester1;
  if (name == "forrester2" || name == "forrester2-high-freq") return DemoProblem::Forrester2HighFreq;
  if (name == "ishigami3") return DemoProblem::Ishigami3;
  throw InvalidArgument("unknown demo problem '" + name +
                        "' (expected forrester1, forrester2 or ishigami3)");
}

double forrester(double x) {
  const double a = 6.0 * x - 2.0;
  return a * a * std::sin(12.0 * x - 4.0);
}

double forrester_cheap(double x) { return 0.5 * forrester(x) + 10.0 * (x - 0.5) - 5.0; }

double forrester_high_frequency(double x) { return forrester(x) + std::sin(10.0 * std::cos(5.0 * x)); }

double ishigami_level(int t, const Eigen::Ref<const Eigen::VectorXd>& x, double a, double b) {
  if (x.size() != 3) throw DimensionMismatch("the Ishigami function takes 3 inputs");
  if (t < 1 || t > 3) throw InvalidArgument("Ishigami levels are 1, 2 and 3");
  double z = std::sin(x(0));
  if (t >= 2) z += a * std::sin(x(1)) * std::sin(x(1));
  if (t >= 3) z += b * std::pow(x(2), 4) * std::sin(x(0));
  return z;
}

namespace {

LevelData grid_level(const std::vector<double>& xs, double (*f)(double)) {
  LevelData out{Eigen::MatrixXd(xs.size(), 1), Eigen::VectorXd(xs.size())};
  for (std::size_t i = 0; i < xs.size(); ++i) {
    out.x(i, 0) = xs[i];
    out.y(i) = f(xs[i]);
  }
  return out;
}

DemoData forrester_demo(double (*top)(double)) {
  std::vector<double> d1;
  for (int i = 0; i <= 10; ++i) d1.push_back(i / 10.0);
  std::vector<double> test;
  for (int i = 0; i <= 100; ++i) test.push_back(i / 100.0);
  return {{grid_level(d1, forrester_cheap), grid_level({0.0, 0.4, 0.6, 1.0}, top)},
          grid_level(test, top)};
}

Eigen::MatrixXd uniform_cube(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-M_PI, M_PI);
  Eigen::MatrixXd x(n, 3);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < 3; ++j) x(i, j) = u(rng);
  }
  return x;
}

LevelData ishigami_data(int t, Eigen::MatrixXd x) {
  Eigen::VectorXd y(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) y(i) = ishigami_level(t, x.row(i).transpose());
  return {std::move(x), std::move(y)};
}

DemoData ishigami_demo(std::uint64_t seed, const DemoOptions& options) {
  const auto& n = options.sizes;
  if (n.size() != 3 || n[0] < n[1] || n[1] < n[2] || n[2] < 1) {
    throw InvalidArgument("Ishigami sizes must be three decreasing positive counts");
  }
  std::mt19937_64 rng(seed);
  DemoData out;
  Eigen::MatrixXd design = uniform_cube(n[0], rng);
  out.levels.push_back(ishigami_data(1, design));
  for (int t = 1; t < 3; ++t) {
    std::vector<Eigen::Index> rows(design.rows());
    std::iota(rows.begin(), rows.end(), 0);
    std::shuffle(rows.begin(), rows.end(), rng);
    rows.resize(n[t]);
    std::sort(rows.begin(), rows.end());
    Eigen::MatrixXd sub(n[t], 3);
    for (int i = 0; i < n[t]; ++i) sub.row(i) = design.row(rows[i]);
    design = std::move(sub);
    out.levels.push_back(ishigami_data(t + 1, design));
  }
  out.test = ishigami_data(3, uniform_cube(options.test_points, rng));
  return out;
}

}  // namespace

DemoData demo_generate(DemoProblem problem, std::uint64_t seed, const DemoOptions& options) {
  switch (problem) {
    case DemoProblem::Forrester1:
      return forrester_demo(forrester);
    case DemoProblem::Forrester2HighFreq:
      return forrester_demo(forrester_high_frequency);
    case DemoProblem::Ishigami3:
      return ishigami_demo(seed, options);
  }
  throw InvalidArgument("unknown demo problem");
}

}  // namespace cokrig
