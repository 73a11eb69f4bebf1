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

#include <cmath>
#include <random>

#include "cokrig/errors.hpp"
#include "cokrig/validation.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace cokrig;

TEST_SUITE("validation") {
  TEST_CASE("metrics on a hand-checked example") {
    const Eigen::Vector4d truth(1.0, 2.0, 3.0, 4.0);
    const Eigen::Vector4d pred(1.0, 2.5, 2.5, 4.0);
    const Eigen::Vector4d sd(0.1, 0.2, 0.3, 0.4);
    const auto m = compute_metrics(pred, truth, sd);
    CHECK(m.n_test == 4);
    CHECK(m.rmse == doctest::Approx(std::sqrt(0.5 / 4.0)));
    CHECK(*m.q2 == doctest::Approx(1.0 - 0.5 / 5.0));
    CHECK(m.max_abs_error == doctest::Approx(0.5));
    CHECK(m.avg_pred_std == doctest::Approx(0.25));
    CHECK(m.median_pred_std == doctest::Approx(0.25));
    CHECK(m.max_pred_std == doctest::Approx(0.4));

    // Alternative convention: spread of the predictions around the test mean.
    const double spread = (pred.array() - truth.mean()).square().sum();
    const auto alt = compute_metrics(pred, truth, sd, Q2Convention::PredictionSpread);
    CHECK(*alt.q2 == doctest::Approx(1.0 - 0.5 / spread));
  }

  TEST_CASE("degenerate inputs") {
    const Eigen::Vector3d flat = Eigen::Vector3d::Constant(2.0);
    CHECK_FALSE(compute_metrics(flat, flat).q2.has_value());
    CHECK_THROWS_AS(compute_metrics(Eigen::VectorXd::Zero(2), flat), DimensionMismatch);
    CHECK_THROWS_AS(compute_metrics(Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1)),
                    InvalidArgument);
  }

  TEST_CASE("removing a point") {
    Eigen::MatrixXd x1(3, 1), x2(2, 1);
    x1 << 0.0, 0.5, 1.0;
    x2 << 0.5, 1.0;
    const std::vector<LevelData> levels{{x1, Eigen::Vector3d(1, 2, 3)}, {x2, Eigen::Vector2d(4, 5)}};
    const Eigen::VectorXd p = Eigen::VectorXd::Constant(1, 0.5);
    const auto all = remove_point(levels, p, LooMode::AllLevels);
    CHECK(all[0].x.rows() == 2);
    CHECK(all[1].x.rows() == 1);
    CHECK(all[0].y == Eigen::Vector2d(1, 3));
    const auto top = remove_point(levels, p, LooMode::KeepLower);
    CHECK(top[0].x.rows() == 3);
    CHECK(top[1].y == Eigen::VectorXd::Constant(1, 5));
    CHECK_THROWS_AS(remove_point(levels, Eigen::VectorXd::Constant(1, 0.0), LooMode::AllLevels),
                    InvalidArgument);
  }

  TEST_CASE("LOO folds match explicit refits") {
    std::mt19937_64 rng(83);
    const auto inst = oracle::random_instance(rng, {30, 12}, 2, false);
    FitConfig c;
    c.fixed_theta = {inst.theta[0], inst.theta[1]};
    const auto levels = inst.data.as_level_data();
    LooConfig loo;
    loo.ids = {0, 5, 11};
    const auto report = loo_cv(levels, c, loo);
    REQUIRE(report.points.size() == 3);
    CHECK_FALSE(report.theta_reoptimized);  // every length-scale is fixed
    double sse = 0.0;
    for (const auto& p : report.points) {
      const auto reduced = remove_point(levels, p.x, LooMode::AllLevels);
      const auto model = fit(prepare_levels(reduced), c);
      const auto pred = predict(model, p.x);
      CHECK(p.error == doctest::Approx(pred.mean - levels[1].y(p.id)).epsilon(1e-12));
      CHECK(p.pred_std == doctest::Approx(pred.std_dev()).epsilon(1e-12));
      sse += p.error * p.error;
    }
    CHECK(report.rmse == doctest::Approx(std::sqrt(sse / 3.0)));

    loo.ids = {12};
    CHECK_THROWS_AS(loo_cv(levels, c, loo), InvalidArgument);
  }

  TEST_CASE("LOO errors are covered by the predictive spread on model data") {
    std::mt19937_64 rng(89);
    int inside = 0, total = 0;
    for (int rep = 0; rep < 3; ++rep) {
      const auto inst = oracle::random_instance(rng, {60, 50}, 2, false);
      FitConfig c;
      c.trends = inst.trends;
      c.fixed_theta = {inst.theta[0], inst.theta[1]};
      const auto report = loo_cv(inst.data.as_level_data(), c);
      for (const auto& p : report.points) {
        inside += std::abs(p.error) <= 2.0 * p.pred_std;
        ++total;
      }
    }
    CHECK(static_cast<double>(inside) / total >= 0.8);
  }
}
