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

#include "cokrig/estimation.hpp"

namespace cokrig {

/// Wall-clock seconds (medians) of building V_s^-1 and the mean weights
/// V_s^-1 (z - H beta) two ways for one fitted model.
struct InversionTiming {
  double t_crude = 0.0;  // dense V_s, dense Cholesky inverse
  double t_light = 0.0;  // per-level R_t factorizations, block recursion
  /// Largest |mean_crude - mean_light| / max(1, |mean_light|) over the probes.
  double max_mean_gap = 0.0;
  /// L1 condition estimate of the assembled V_s.
  double condition = 1.0;

  double ratio() const { return t_crude / t_light; }
};

/// Times both paths `repeats` times after one discarded warm-up run and
/// compares prediction means at `probes` (one point per row).
InversionTiming time_inversion(const FittedModel& model, int repeats, const Eigen::MatrixXd& probes);

struct BenchRecord {
  Eigen::Index n2 = 0;
  Eigen::Index n1 = 0;
  double t_crude = 0.0;
  double t_light = 0.0;
  double ratio = 0.0;
  double max_mean_gap = 0.0;
  double condition = 1.0;
};

/// Agreement expected between the two paths: 1e-8, widened to
/// 10 * condition * machine epsilon for an ill-conditioned V_s.
double mean_gap_tolerance(double condition);

struct BenchConfig {
  std::vector<int> n2_values{50, 100, 200, 400};
  int repeats = 3;
  int n1_factor = 4;
  int probes = 10;
  std::uint64_t seed = 0;
};

struct BenchResult {
  std::vector<BenchRecord> records;
  /// Least-squares slopes of log(time) against log(n1 + n2).
  double slope_crude = 0.0;
  double slope_light = 0.0;
};

/*
 * Two-level timing experiment: D_1 is a regular grid of n1 = n1_factor * n2
 * points on [0, 1], D_2 its first n2 points, squared-exponential kernels with
 * theta = 5 / n2 on both levels, responses from the 1-D two-level test pair.
 * Parameters are estimated once per size outside the timed sections.
 * Sizes that stay singular after regularization are skipped with a warning.
 */
BenchResult run_complexity_bench(const BenchConfig& config = {});

/// CSV with header n2,n1,t_crude_s,t_light_s,ratio and a trailing
/// "# slope_crude=...,slope_light=..." line.
std::string bench_csv(const BenchResult& result);

/// Least-squares slope of log(y) on log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace cokrig
