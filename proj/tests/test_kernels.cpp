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

#include "cokrig/errors.hpp"
#include "cokrig/kernels.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace cokrig;

TEST_SUITE("kernels") {
  TEST_CASE("correlation values match the closed forms") {
    const Eigen::Vector2d x(0.1, 0.7), y(0.4, 0.2);
    const Eigen::Vector2d theta(0.3, 0.8);
    const Kernel se(KernelFamily::SquaredExponential, theta);
    const Kernel m52(KernelFamily::Matern52, theta);

    const double se_expected = std::exp(-(1.0 + std::pow(0.5 / 0.8, 2)));
    CHECK(se(x, y) == doctest::Approx(se_expected).epsilon(1e-15));

    double m_expected = 1.0;
    for (double h : {1.0, 0.5 / 0.8}) {
      m_expected *= (1 + std::sqrt(5.0) * h + 5.0 * h * h / 3.0) * std::exp(-std::sqrt(5.0) * h);
    }
    CHECK(m52(x, y) == doctest::Approx(m_expected).epsilon(1e-15));
    CHECK(se(x, x) == 1.0);
    CHECK(m52(y, y) == 1.0);
  }

  TEST_CASE("scalar theta is shared by every coordinate") {
    const Kernel iso(KernelFamily::SquaredExponential, Eigen::VectorXd::Constant(1, 0.5));
    const Kernel aniso(KernelFamily::SquaredExponential, Eigen::Vector3d::Constant(0.5));
    const Eigen::Vector3d x(0.0, 0.2, 0.9), y(0.3, 0.1, 0.5);
    CHECK(iso(x, y) == doctest::Approx(aniso(x, y)).epsilon(1e-15));
    CHECK_NOTHROW(iso.check_dimension(3));
    CHECK_THROWS_AS(aniso.check_dimension(2), DimensionMismatch);
  }

  TEST_CASE("invalid kernels are rejected") {
    CHECK_THROWS_AS(Kernel(KernelFamily::Matern52, Eigen::VectorXd()), InvalidArgument);
    CHECK_THROWS_AS(Kernel(KernelFamily::Matern52, Eigen::Vector2d(0.1, -1.0)), InvalidArgument);
    CHECK_THROWS_AS(parse_kernel_family("cubic"), InvalidArgument);
    CHECK(parse_kernel_family(to_string(KernelFamily::SquaredExponential)) ==
          KernelFamily::SquaredExponential);
  }

  TEST_CASE("correlation matrices are symmetric with unit diagonal") {
    std::mt19937_64 rng(3);
    const auto d = oracle::nested_uniform(rng, {25}, 3).front();
    const Kernel k(KernelFamily::Matern52, Eigen::Vector3d(0.2, 0.3, 0.4));
    const Eigen::MatrixXd r = correlation_matrix(k, d);
    CHECK((r - r.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((r.diagonal().array() == 1.0).all());
    for (Eigen::Index i = 0; i < d.rows(); ++i) {
      for (Eigen::Index j = 0; j < d.rows(); ++j) {
        CHECK(r(i, j) == doctest::Approx(oracle::correlation(k.family(), k.theta(),
                                                             d.row(i).transpose(),
                                                             d.row(j).transpose()))
                             .epsilon(1e-14));
      }
    }
    const Eigen::VectorXd c = cross_correlation(k, d.row(4).transpose(), d);
    CHECK((c - r.col(4)).cwiseAbs().maxCoeff() == 0.0);
  }

  TEST_CASE("factored correlation solves and reports log det") {
    std::mt19937_64 rng(11);
    const auto d = oracle::nested_uniform(rng, {30}, 2).front();
    const Kernel k(KernelFamily::Matern52, Eigen::Vector2d(0.2, 0.25));
    const Eigen::MatrixXd r = correlation_matrix(k, d);
    const auto f = FactoredCorrelation::factor(r);
    CHECK(f.nugget() == 0.0);
    CHECK(f.size() == 30);
    CHECK(f.log_det() == doctest::Approx(std::log(r.determinant())).epsilon(1e-10));

    Eigen::VectorXd b = Eigen::VectorXd::LinSpaced(30, -1.0, 2.0);
    const Eigen::VectorXd x = f.solve(b);
    CHECK((r * x - b).cwiseAbs().maxCoeff() < 1e-10);
    const Eigen::VectorXd w = f.whiten(b);
    CHECK(w.squaredNorm() == doctest::Approx(b.dot(x)).epsilon(1e-10));
    CHECK(f.condition_estimate() >= 1.0);
  }

  TEST_CASE("nugget ladder escalates on near-duplicate points") {
    Eigen::MatrixXd d(3, 1);
    d << 0.0, 1e-9, 0.5;
    const Kernel k(KernelFamily::SquaredExponential, Eigen::VectorXd::Constant(1, 0.5));
    const Eigen::MatrixXd r = correlation_matrix(k, d);
    const auto f = FactoredCorrelation::factor(r);
    CHECK(f.nugget() > 0.0);
    CHECK(f.condition_estimate() <= 1e12);

    RegularizationPolicy none;
    none.nuggets = {0.0};
    CHECK_THROWS_AS(FactoredCorrelation::factor(r, none), StillSingular);
  }

  TEST_CASE("with_nugget factors R + nugget I without escalation") {
    Eigen::MatrixXd r(2, 2);
    r << 1.0, 0.5, 0.5, 1.0;
    const auto f = FactoredCorrelation::with_nugget(r, 0.25);
    CHECK(f.nugget() == 0.25);
    const Eigen::Vector2d b(1.0, -1.0);
    const Eigen::MatrixXd shifted = r + 0.25 * Eigen::Matrix2d::Identity();
    CHECK((shifted * f.solve(Eigen::VectorXd(b)) - b).norm() < 1e-14);
  }
}
