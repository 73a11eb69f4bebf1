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
#include <cstdint>
#include <string>
#include <vector>

#include "cokrig/designs.hpp"

namespace cokrig {

enum class DemoProblem { Forrester1, Forrester2HighFreq, Ishigami3 };

std::string to_string(DemoProblem problem);
DemoProblem parse_demo_problem(const std::string& name);

/// (6x - 2)^2 sin(12x - 4)
double forrester(double x);
/// 0.5 forrester(x) + 10 (x - 0.5) - 5
double forrester_cheap(double x);
/// forrester(x) + sin(10 cos(5x))
double forrester_high_frequency(double x);

/// Level t (1-based) of the three-level Ishigami hierarchy on [-pi, pi]^3:
/// sin x1, then + a sin^2 x2, then + b x3^4 sin x1.
double ishigami_level(int t, const Eigen::Ref<const Eigen::VectorXd>& x, double a = 7.0,
                      double b = 0.1);

struct DemoData {
  std::vector<LevelData> levels;  // cheapest first
  LevelData test;                 // top-level responses on a test set
};

struct DemoOptions {
  /// Ishigami design sizes, cheapest first.
  std::vector<int> sizes{400, 200, 50};
  int test_points = 30000;
};

/// Forrester problems use fixed designs and a 101-point test grid; Ishigami
/// draws uniform nested designs and test points from `seed`.
DemoData demo_generate(DemoProblem problem, std::uint64_t seed, const DemoOptions& options = {});

}  // namespace cokrig
