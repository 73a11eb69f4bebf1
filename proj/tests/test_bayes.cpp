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

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "cokrig/bayes.hpp"
#include "cokrig/demo.hpp"
#include "cokrig/errors.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace cokrig;

namespace {

FittedModel two_level_model(std::uint64_t seed, int n1 = 30, int n2 = 12) {
  std::mt19937_64 rng(seed);
  const auto inst = oracle::random_instance(rng, {n1, n2}, 1, false);
  FitConfig c;
  c.trends = {Basis::constant(), Basis::constant()};
  c.fixed_theta = {inst.theta[0], inst.theta[1]};
  return fit(inst.data, c);
}

}  // namespace

TEST_SUITE("bayes") {
  TEST_CASE("inverse-gamma functions") {
    // alpha = 1 has the closed-form cdf exp(-b / x).
    CHECK(ig_cdf(1.0, 2.0, 3.0) == doctest::Approx(std::exp(-2.0 / 3.0)).epsilon(1e-14));
    CHECK(ig_quantile(1.0, 2.0, 0.3) == doctest::Approx(-2.0 / std::log(0.3)).epsilon(1e-11));
    CHECK(ig_cdf(2.0, 1.0, 0.0) == 0.0);

    // pdf integrates to the cdf (trapezoid on a log grid).
    const double a = 3.5, b = 2.0;
    double integral = 0.0;
    double prev_x = 1e-4, prev_f = ig_pdf(a, b, prev_x);
    for (int i = 1; i <= 20000; ++i) {
      const double x = 1e-4 * std::pow(1.5 / 1e-4, i / 20000.0);
      const double f = ig_pdf(a, b, x);
      integral += 0.5 * (f + prev_f) * (x - prev_x);
      prev_x = x;
      prev_f = f;
    }
    CHECK(integral == doctest::Approx(ig_cdf(a, b, 1.5)).epsilon(1e-6));

    for (double p : {1e-5, 0.2, 0.5, 0.99999}) {
      CHECK(ig_cdf(0.5, 0.15, ig_quantile(0.5, 0.15, p)) == doctest::Approx(p).epsilon(1e-9));
    }
    CHECK_THROWS_AS(ig_quantile(1.0, 1.0, 1.0), InvalidArgument);
    CHECK_THROWS_AS(ig_cdf(-1.0, 1.0, 1.0), InvalidArgument);
  }

  TEST_CASE("non-informative laws are the level posteriors") {
    const auto model = two_level_model(3);
    const auto laws = posterior_laws(model);
    CHECK(laws.beta1.mean == model.posteriors[0].lambda_mean);
    CHECK(laws.lambda_mean == model.posteriors[1].lambda_mean);
    CHECK(laws.sigma1.alpha == model.posteriors[0].alpha);
    CHECK(laws.sigma2.scale == doctest::Approx(0.5 * model.posteriors[1].q));
    CHECK(laws.sigma2.point() == doctest::Approx(model.posteriors[1].sigma2_reml));
  }

  TEST_CASE("informative prior follows the conjugate update") {
    const auto model = two_level_model(5);
    const auto& post = model.posteriors[1];
    InformativePrior prior{Eigen::Vector2d(1.0, 0.5), Eigen::Vector2d(0.4, 2.0), 2.0, 3.0};
    const auto laws = posterior_laws(model, {std::nullopt, prior});

    // Dense oracle from M = H^T R^-1 H.
    const auto& st = model.structure;
    const auto problem = level_problem(model.data, 1, st.level(1).trend, st.scales()[0].basis);
    const Eigen::MatrixXd h = level_regressors(problem);
    const Eigen::MatrixXd ri = correlation_matrix(model.kernel(1), problem.x).inverse();
    const Eigen::MatrixXd m = h.transpose() * ri * h;
    const Eigen::MatrixXd vinv = prior.v_diag.cwiseInverse().asDiagonal();
    const Eigen::MatrixXd a = (m + vinv).inverse();
    const Eigen::VectorXd mean = a * (h.transpose() * ri * problem.z + vinv * prior.b);
    const Eigen::VectorXd d = prior.b - post.lambda_mean;
    const Eigen::MatrixXd spread = Eigen::MatrixXd(prior.v_diag.asDiagonal()) + m.inverse();
    const double q = prior.gamma + d.dot(spread.inverse() * d) + post.q;

    CHECK((laws.lambda_mean - mean).cwiseAbs().maxCoeff() < 1e-8);
    CHECK((laws.lambda_cov_over_sigma2 - a).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(laws.sigma2.alpha == doctest::Approx(12.0 / 2.0 + 2.0));
    CHECK(laws.sigma2.scale == doctest::Approx(0.5 * q).epsilon(1e-9));

    InformativePrior vague{Eigen::Vector2d(1.0, 0.5), Eigen::Vector2d::Constant(1e12), 1.0, 1.0};
    const auto near = posterior_laws(model, {std::nullopt, vague});
    CHECK((near.lambda_mean - post.lambda_mean).cwiseAbs().maxCoeff() < 1e-6);

    InformativePrior wrong{Eigen::VectorXd::Ones(3), Eigen::VectorXd::Ones(3), 1.0, 1.0};
    CHECK_THROWS_AS(posterior_laws(model, {std::nullopt, wrong}), DimensionMismatch);
  }

  TEST_CASE("particle sets") {
    const auto mc = monte_carlo_particles(2, 500, 7);
    CHECK(mc.size() == 500);
    CHECK(mc.weights.sum() == doctest::Approx(1.0));
    CHECK(monte_carlo_particles(2, 500, 7).xi == mc.xi);
    CHECK(monte_carlo_particles(2, 500, 8).xi != mc.xi);

    const auto tz = trapezoid_particles(2, 41);
    CHECK(tz.size() == 41 * 41);
    CHECK(tz.weights.sum() == doctest::Approx(1.0));
    const Eigen::VectorXd second = tz.xi.array().square().matrix() * tz.weights;
    CHECK(second(0) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK((tz.xi * tz.weights).cwiseAbs().maxCoeff() < 1e-12);
    CHECK_THROWS_AS(trapezoid_particles(3, 5), InvalidArgument);
  }

  TEST_CASE("variance axes span the requested quantiles") {
    const InverseGammaLaw law{2.5, 1.2};
    const IntegrationConfig c;
    const auto axis = sigma_axis(law, c);
    REQUIRE(axis.nodes.size() == 21);
    CHECK_FALSE(axis.collapsed);
    CHECK(axis.nodes.front() == doctest::Approx(ig_quantile(2.5, 1.2, 1e-5)).epsilon(1e-9));
    CHECK(axis.nodes.back() == doctest::Approx(ig_quantile(2.5, 1.2, 1.0 - 1e-5)).epsilon(1e-9));
    double total = 0.0;
    for (double w : axis.weights) total += w;
    CHECK(total == doctest::Approx(1.0));
    const auto point = collapsed_axis(0.3);
    CHECK(point.collapsed);
    CHECK(point.nodes == std::vector<double>{0.3});
  }

  TEST_CASE("point-mass parameters give back the plug-in prediction") {
    const auto model = two_level_model(11);
    const Eigen::VectorXd b1 = model.posteriors[0].lambda_mean;
    const Eigen::VectorXd b2 = model.posteriors[1].lambda_mean;
    Priors2Level pinned{InformativePrior{b1, Eigen::VectorXd::Constant(1, 1e-24), 1.0, 1.0},
                        InformativePrior{b2, Eigen::VectorXd::Constant(2, 1e-24), 1.0, 1.0}};
    const auto laws = posterior_laws(model, pinned);
    IntegrationConfig c;
    c.collapse_sigma1 = c.collapse_sigma2 = true;
    c.particles = 50;
    const auto at_point =
        model.with_sigma2(Eigen::Vector2d(laws.sigma1.point(), laws.sigma2.point()));
    for (double xv : {0.1, 0.45, 0.9}) {
      const Eigen::VectorXd x = Eigen::VectorXd::Constant(1, xv);
      const auto bp = predictive_full(model, laws, x, c);
      const auto plug = predict(at_point, x);
      CHECK(bp.mean == doctest::Approx(plug.mean).epsilon(1e-10));
      CHECK(bp.variance == doctest::Approx(plug.variance).epsilon(1e-8));
      CHECK(bp.diagnostics.sigma1_collapsed);
    }
  }

  TEST_CASE("predictive law is reproducible and its density is normalized") {
    const auto model = two_level_model(13);
    const auto laws = posterior_laws(model);
    IntegrationConfig c;
    c.grid_points_per_axis = 9;
    c.particles = 200;
    c.seed = 4;
    c.density_points = 801;
    const Eigen::VectorXd x = Eigen::VectorXd::Constant(1, 0.37);
    const auto a = predictive_full(model, laws, x, c);
    const auto b = predictive_full(model, laws, x, c);
    CHECK(a.mean == b.mean);
    CHECK(a.variance == b.variance);
    CHECK(a.diagnostics.nodes == 81);
    CHECK(a.diagnostics.mc_standard_error > 0.0);

    double mass = 0.0, first = 0.0;
    for (std::size_t i = 1; i < a.density.size(); ++i) {
      const double dx = a.density[i].first - a.density[i - 1].first;
      mass += 0.5 * dx * (a.density[i].second + a.density[i - 1].second);
      first += 0.5 * dx * (a.density[i].first * a.density[i].second +
                           a.density[i - 1].first * a.density[i - 1].second);
    }
    CHECK(mass == doctest::Approx(1.0).epsilon(2e-3));
    CHECK(first == doctest::Approx(a.mean).epsilon(1e-2));

    const Eigen::MatrixXd xs = Eigen::VectorXd::LinSpaced(7, 0.0, 1.0);
    c.density_points = 0;
    const auto one = predictive_full_batch(model, laws, xs, c);
    c.threads = 3;
    const auto three = predictive_full_batch(model, laws, xs, c);
    for (std::size_t i = 0; i < one.size(); ++i) CHECK(one[i].mean == three[i].mean);
  }

  TEST_CASE("Bayesian spread exceeds the plug-in spread off the design") {
    const auto demo = demo_generate(DemoProblem::Forrester2HighFreq, 0);
    FitConfig fc;
    fc.family = KernelFamily::SquaredExponential;
    fc.trends = {Basis::constant(), Basis::linear(1)};
    fc.fixed_theta = {Eigen::VectorXd::Constant(1, 0.25), Eigen::VectorXd::Constant(1, 0.07)};
    const auto model = fit(prepare_levels(demo.levels), fc);
    const auto laws = posterior_laws(model);
    IntegrationConfig c;
    c.particles = 200;
    for (double xv : {0.15, 0.5, 0.85}) {
      const Eigen::VectorXd x = Eigen::VectorXd::Constant(1, xv);
      CHECK(predictive_full(model, laws, x, c).std_dev() >= predict(model, x).std_dev());
    }
  }

  TEST_CASE("three-level models are rejected") {
    std::mt19937_64 rng(2);
    const auto inst = oracle::random_instance(rng, {20, 10, 6}, 1, false);
    FitConfig c;
    c.fixed_theta = {inst.theta[0], inst.theta[1], inst.theta[2]};
    const auto model = fit(inst.data, c);
    CHECK_THROWS_AS(posterior_laws(model), InvalidArgument);
  }
}
