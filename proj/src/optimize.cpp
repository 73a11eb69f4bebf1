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

#include "cokrig/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <random>
#include <thread>
#include <vector>

#include "cokrig/errors.hpp"

namespace cokrig {

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  threads = std::max(1, std::min(threads, n));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  const int chunk = (n + threads - 1) / threads;
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&, w]() {
      try {
        const int end = std::min(n, (w + 1) * chunk);
        for (int i = w * chunk; i < end; ++i) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

namespace {

double safe_eval(const std::function<double(const Eigen::VectorXd&)>& objective,
                 const Eigen::VectorXd& log_theta) {
  const double v = objective(log_theta.array().exp().matrix());
  return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
}

}  // namespace

OptimizationResult optimize_theta(const std::function<double(const Eigen::VectorXd&)>& objective,
                                  const ThetaBounds& bounds, const OptimizerConfig& config) {
  const Eigen::Index d = bounds.lower.size();
  if (d == 0 || bounds.upper.size() != d) {
    throw DimensionMismatch("theta bounds must be non-empty and of equal length");
  }
  for (Eigen::Index k = 0; k < d; ++k) {
    if (!(bounds.lower(k) > 0.0) || !(bounds.upper(k) >= bounds.lower(k)) ||
        !std::isfinite(bounds.upper(k))) {
      throw InvalidArgument("theta bounds must be finite, positive and ordered");
    }
  }
  const int starts = std::max(1, config.starts);
  const Eigen::VectorXd lo = bounds.lower.array().log();
  const Eigen::VectorXd hi = bounds.upper.array().log();

  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<Eigen::VectorXd> points(starts, Eigen::VectorXd(d));
  for (Eigen::Index k = 0; k < d; ++k) {
    std::vector<int> strata(starts);
    std::iota(strata.begin(), strata.end(), 0);
    std::shuffle(strata.begin(), strata.end(), rng);
    for (int i = 0; i < starts; ++i) {
      const double u = (strata[i] + unif(rng)) / starts;
      points[i](k) = lo(k) + u * (hi(k) - lo(k));
    }
  }

  std::vector<double> values(starts);
  parallel_for(starts, config.threads,
               [&](int i) { values[i] = safe_eval(objective, points[i]); });
  int evaluations = starts;

  std::vector<int> order(starts);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return values[a] < values[b]; });

  Eigen::VectorXd best = points[order[0]];
  double best_value = values[order[0]];

  const int refined = std::min(starts, std::max(0, config.refined_starts));
  std::vector<Eigen::VectorXd> local_x(refined);
  std::vector<double> local_v(refined);
  std::vector<int> local_evals(refined, 0);
  parallel_for(refined, config.threads, [&](int r) {
    Eigen::VectorXd x = points[order[r]];
    double fx = values[order[r]];
    int evals = 0;
    double step = config.initial_step;
    while (step >= config.tolerance && evals < config.max_local_evaluations) {
      bool improved = false;
      for (Eigen::Index k = 0; k < d && evals < config.max_local_evaluations; ++k) {
        for (double dir : {1.0, -1.0}) {
          double h = step * dir;
          bool moved = false;
          while (evals < config.max_local_evaluations) {
            Eigen::VectorXd y = x;
            y(k) = std::clamp(x(k) + h, lo(k), hi(k));
            if (y(k) == x(k)) break;
            const double fy = safe_eval(objective, y);
            ++evals;
            if (!(fy < fx)) break;
            x = std::move(y);
            fx = fy;
            moved = true;
            h *= 2.0;
          }
          if (moved) {
            improved = true;
            break;
          }
        }
      }
      if (!improved) step *= 0.5;
    }
    local_x[r] = x;
    local_v[r] = fx;
    local_evals[r] = evals;
  });
  for (int r = 0; r < refined; ++r) {
    evaluations += local_evals[r];
    if (local_v[r] < best_value) {
      best_value = local_v[r];
      best = local_x[r];
    }
  }
  return {best.array().exp().matrix(), best_value, evaluations};
}

}  // namespace cokrig
