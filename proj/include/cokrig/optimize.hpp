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
#include <functional>

namespace cokrig {

struct ThetaBounds {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
};

struct OptimizerConfig {
  int starts = 40;          // Latin-hypercube starts
  int refined_starts = 3;   // best starts handed to the local search
  double tolerance = 1e-4;  // final coordinate step, in log(theta)
  double initial_step = 0.5;
  int max_local_evaluations = 400;
  std::uint64_t seed = 0;
  int threads = 1;
};

struct OptimizationResult {
  Eigen::VectorXd theta;
  double value = 0.0;
  int evaluations = 0;
};

/*
 * Global + local minimization of an objective over a box of length-scales,
 * working in log(theta): a seeded Latin-hypercube multistart followed by a
 * coordinate line search from the best few starts. Non-finite objective
 * values count as +inf. The result is the best point probed, and is
 * independent of `threads` because all starts are drawn up front.
 */
OptimizationResult optimize_theta(const std::function<double(const Eigen::VectorXd&)>& objective,
                                  const ThetaBounds& bounds, const OptimizerConfig& config);

/// Runs fn(i) for i in [0, n) on up to `threads` threads (contiguous chunks).
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

}  // namespace cokrig
