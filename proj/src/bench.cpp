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

#include "cokrig/bench.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "cokrig/demo.hpp"
#include "cokrig/errors.hpp"
#include "cokrig/prediction.hpp"

namespace cokrig {

namespace {

using Clock = std::chrono::steady_clock;

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

Eigen::VectorXd crude_weights(const FittedModel& model, const Eigen::VectorXd& resid) {
  const Eigen::MatrixXd v = model.structure.covariance();
  Eigen::LLT<Eigen::MatrixXd> llt(v);
  if (llt.info() != Eigen::Success) throw StillSingular("dense covariance is not positive definite");
  const Eigen::MatrixXd vinv = llt.solve(Eigen::MatrixXd::Identity(v.rows(), v.cols()));
  return vinv * resid;
}

Eigen::VectorXd light_weights(const FittedModel& model, const Eigen::VectorXd& resid) {
  const auto& st = model.structure;
  std::vector<LevelStructure> levels;
  for (int t = 0; t < st.num_levels(); ++t) {
    const auto& lv = st.level(t);
    auto factor = std::make_shared<const FactoredCorrelation>(FactoredCorrelation::with_nugget(
        correlation_matrix(lv.kernel, lv.design), lv.factor->nugget()));
    levels.push_back({lv.design, lv.kernel, lv.trend, std::move(factor)});
  }
  const CoKrigingStructure rebuilt(std::move(levels), st.scales(), st.sigma2());
  return rebuilt.inverse() * resid;
}

template <class F>
double timed(F&& f, Eigen::VectorXd& out) {
  const auto start = Clock::now();
  out = f();
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

InversionTiming time_inversion(const FittedModel& model, int repeats, const Eigen::MatrixXd& probes) {
  if (repeats < 1) throw InvalidArgument("at least one timing repeat is required");
  const auto& st = model.structure;
  const Eigen::VectorXd resid = stacked_observations(model.data) - st.trend_matrix() * model.beta;

  Eigen::VectorXd w_crude;
  Eigen::VectorXd w_light;
  timed([&] { return crude_weights(model, resid); }, w_crude);
  timed([&] { return light_weights(model, resid); }, w_light);
  std::vector<double> crude;
  std::vector<double> light;
  for (int r = 0; r < repeats; ++r) {
    crude.push_back(timed([&] { return crude_weights(model, resid); }, w_crude));
    light.push_back(timed([&] { return light_weights(model, resid); }, w_light));
  }

  InversionTiming out{median(crude), median(light), 0.0, 1.0};
  const Eigen::LLT<Eigen::MatrixXd> dense(st.covariance());
  out.condition = 1.0 / dense.rcond();
  for (Eigen::Index i = 0; i < probes.rows(); ++i) {
    const Eigen::VectorXd x = probes.row(i).transpose();
    const Eigen::VectorXd t = st.cross_covariance(x);
    const double trend = st.trend_vector(x).dot(model.beta);
    const double mc = trend + t.dot(w_crude);
    const double ml = trend + t.dot(w_light);
    out.max_mean_gap = std::max(out.max_mean_gap, std::abs(mc - ml) / std::max(1.0, std::abs(ml)));
  }
  return out;
}

BenchResult run_complexity_bench(const BenchConfig& config) {
  if (config.repeats < 1) throw InvalidArgument("at least one timing repeat is required");
  if (!std::is_sorted(config.n2_values.begin(), config.n2_values.end())) {
    throw InvalidArgument("bench sizes must be ascending");
  }
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  BenchResult result;
  std::vector<double> sizes;
  std::vector<double> crude;
  std::vector<double> light;
  for (int n2 : config.n2_values) {
    const int n1 = config.n1_factor * n2;
    if (n2 < 2 || n1 < n2) throw InvalidArgument("bench sizes must satisfy 2 <= n2 <= n1");
    LevelData cheap{Eigen::MatrixXd(n1, 1), Eigen::VectorXd(n1)};
    for (int i = 0; i < n1; ++i) {
      cheap.x(i, 0) = static_cast<double>(i) / (n1 - 1);
      cheap.y(i) = forrester_cheap(cheap.x(i, 0));
    }
    LevelData expensive{cheap.x.topRows(n2), Eigen::VectorXd(n2)};
    for (int i = 0; i < n2; ++i) expensive.y(i) = forrester_high_frequency(expensive.x(i, 0));

    FitConfig fc;
    fc.family = KernelFamily::SquaredExponential;
    const Eigen::VectorXd theta = Eigen::VectorXd::Constant(1, 5.0 / n2);
    fc.fixed_theta = {theta, theta};
    Eigen::MatrixXd probes(config.probes, 1);
    for (int i = 0; i < config.probes; ++i) probes(i, 0) = unif(rng);
    try {
      const FittedModel model = fit(prepare_levels({cheap, expensive}), fc);
      const InversionTiming t = time_inversion(model, config.repeats, probes);
      result.records.push_back({n2, n1, t.t_crude, t.t_light, t.ratio(), t.max_mean_gap,
                                t.condition});
      sizes.push_back(n1 + n2);
      crude.push_back(t.t_crude);
      light.push_back(t.t_light);
    } catch (const NumericalError& e) {
      warn("bench size n2 = " + std::to_string(n2) + " skipped: " + e.what());
    }
  }
  if (sizes.size() >= 2) {
    result.slope_crude = loglog_slope(sizes, crude);
    result.slope_light = loglog_slope(sizes, light);
  }
  return result;
}

double mean_gap_tolerance(double condition) {
  return std::max(1e-8, 10.0 * condition * std::numeric_limits<double>::epsilon());
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw InvalidArgument("a slope needs at least two (x, y) pairs");
  }
  const std::size_t n = x.size();
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= n;
  my /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

std::string bench_csv(const BenchResult& result) {
  std::ostringstream os;
  os << "n2,n1,t_crude_s,t_light_s,ratio\n";
  os.precision(6);
  for (const auto& r : result.records) {
    os << r.n2 << ',' << r.n1 << ',' << r.t_crude << ',' << r.t_light << ',' << r.ratio << '\n';
  }
  os << "# slope_crude=" << result.slope_crude << ",slope_light=" << result.slope_light << '\n';
  return os.str();
}

}  // namespace cokrig
