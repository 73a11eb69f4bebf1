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

#include <filesystem>
#include <fstream>
#include <random>

#include "cokrig/config.hpp"
#include "cokrig/demo.hpp"
#include "cokrig/errors.hpp"
#include "cokrig/io.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace cokrig;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("cokrig_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_SUITE("config") {
  TEST_CASE("defaults round trip") {
    const RunConfig c;
    CHECK(parse_run_config(serialize_run_config(c), "x") == c);
  }

  TEST_CASE("every field round trips") {
    RunConfig c;
    c.kernel = KernelFamily::SquaredExponential;
    c.theta_lower_factor = 0.01;
    c.theta_upper_factor = 3.0;
    c.fixed_theta[2] = {0.1, 0.2};
    c.trends[2] = Basis::parse("1,x1,x2^2");
    c.scales[1] = Basis::parse("1,x2");
    c.prior_level2 = PriorSpec{{1.0, 2.0}, {0.5, 0.25}, 2.0, 0.1};
    c.optimizer_starts = 7;
    c.optimizer_refined_starts = 2;
    c.optimizer_tolerance = 1e-6;
    c.optimizer_initial_step = 0.3;
    c.optimizer_max_local_evaluations = 99;
    c.nuggets = {1e-9, 1e-7};
    c.max_condition = 1e10;
    c.bayes_grid_points = 11;
    c.bayes_particles = 300;
    c.bayes_lower_quantile = 1e-4;
    c.bayes_upper_quantile = 1.0 - 1e-4;
    c.bayes_degenerate_ratio = 1e-10;
    c.bayes_lambda_quadrature = true;
    c.bayes_lambda_grid_points = 31;
    c.bayes_density_points = 101;
    c.nesting_tolerance = 1e-7;
    c.q2 = Q2Convention::PredictionSpread;
    c.loo_mode = LooMode::KeepLower;
    c.loo_theta = LooTheta::Fixed;
    c.seed = 12345678901234ull;
    c.threads = 4;
    c.theta_lower_factor = 0.1 + 0.2;  // needs all 17 digits
    const std::string text = serialize_run_config(c);
    CHECK(parse_run_config(text, "x") == c);
    CHECK(serialize_run_config(parse_run_config(text, "x")) == text);
  }

  TEST_CASE("comments, blanks and whitespace") {
    const auto c = parse_run_config("# header\n\n  seed = 5   # trailing\nkernel=squared_exponential\n",
                                    "cfg");
    CHECK(c.seed == 5);
    CHECK(c.kernel == KernelFamily::SquaredExponential);
  }

  TEST_CASE("errors carry the line number") {
    auto message = [](const std::string& text) {
      try {
        parse_run_config(text, "cfg.txt");
      } catch (const ParseError& e) {
        return std::string(e.what());
      }
      return std::string();
    };
    CHECK(message("seed = 1\nbogus = 2\n").rfind("cfg.txt:2:", 0) == 0);
    CHECK(message("optimizer.starts = many\n").rfind("cfg.txt:1:", 0) == 0);
    CHECK(message("\n\nno equals sign\n").rfind("cfg.txt:3:", 0) == 0);
    CHECK(message("trend.1 = 1,z\n").rfind("cfg.txt:1:", 0) == 0);
    CHECK(message("metrics.q2 = other\n").find("metrics.q2") != std::string::npos);
  }

  TEST_CASE("conversion to library settings") {
    RunConfig c;
    c.fixed_theta[2] = {0.5};
    c.trends[2] = Basis::linear(1);
    c.seed = 9;
    c.threads = 2;
    const FitConfig f = c.fit_config();
    CHECK(f.trend(0) == Basis::constant());
    CHECK(f.trend(1) == Basis::linear(1));
    CHECK_FALSE(f.fixed(0).has_value());
    CHECK((*f.fixed(1))(0) == 0.5);
    CHECK(f.optimizer.seed == 9);
    CHECK(c.integration().particles == 1000);
    CHECK(c.integration().grid_points_per_axis == 21);
    CHECK(c.loo().threads == 2);
    CHECK_FALSE(c.priors().level1.has_value());
  }
}

TEST_SUITE("cli_io") {
  TEST_CASE("level CSV round trip keeps every bit") {
    const auto dir = scratch_dir("csv");
    LevelData d{Eigen::MatrixXd(2, 2), Eigen::Vector2d(0.1 + 0.2, -1e-300)};
    d.x << 1.0 / 3.0, 2.0, -0.5, 1e10;
    write_level_csv((dir / "a.csv").string(), d);
    const auto back = read_level_csv((dir / "a.csv").string());
    CHECK(back.x == d.x);
    CHECK(back.y == d.y);
    CHECK(read_text(dir / "a.csv").rfind("x1,x2,y\n", 0) == 0);
    const auto q = read_query_csv((dir / "a.csv").string());
    CHECK(q.y.has_value());
  }

  TEST_CASE("malformed rows are named") {
    const auto dir = scratch_dir("bad_csv");
    write_text(dir / "b.csv", "x1,y\n0.1,1\n\n0.2,oops\n");
    try {
      read_level_csv((dir / "b.csv").string());
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find("b.csv:4:") != std::string::npos);
    }
    write_text(dir / "c.csv", "x1,y\n0.1,1,3\n");
    CHECK_THROWS_AS(read_level_csv((dir / "c.csv").string()), ParseError);
    write_text(dir / "q.csv", "x1,x2\n0.1,0.2\n");
    const auto q = read_query_csv((dir / "q.csv").string());
    CHECK_FALSE(q.y.has_value());
    CHECK(q.x.cols() == 2);
  }

  TEST_CASE("id lists and row selection") {
    CHECK(parse_id_list("5,1-3,2") == std::vector<Eigen::Index>{1, 2, 3, 5});
    CHECK_THROWS_AS(parse_id_list("0"), InvalidArgument);
    CHECK_THROWS_AS(parse_id_list("4-2"), InvalidArgument);
    LevelData d{Eigen::Vector3d(0.1, 0.2, 0.3), Eigen::Vector3d(1, 2, 3)};
    const auto s = select_rows(d, {1, 3}, "level 1");
    CHECK(s.y == Eigen::Vector2d(1, 3));
    CHECK_THROWS_AS(select_rows(d, {4}, "level 1"), InvalidArgument);
  }

  TEST_CASE("saved models predict bitwise identically") {
    std::mt19937_64 rng(97);
    const auto inst = oracle::random_instance(rng, {30, 14, 6}, 2, true);
    RunConfig config;
    config.scales[1] = Basis::parse("1,x1");
    config.scales[2] = Basis::parse("1,x1");
    config.trends[2] = Basis::linear(2);
    config.trends[3] = Basis::linear(2);
    config.optimizer_starts = 8;
    const auto model = fit(inst.data, config.fit_config());
    const std::string text = model_to_text(model, config);
    const auto loaded = model_from_text(text, "mem");
    CHECK(loaded.config == config);
    CHECK(model_to_text(loaded.model, loaded.config) == text);
    const Eigen::MatrixXd probes = (Eigen::MatrixXd::Random(50, 2).array() + 1.0) / 2.0;
    const auto a = predict_batch(model, probes);
    const auto b = predict_batch(loaded.model, probes);
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].mean == b[i].mean);
      CHECK(a[i].variance == b[i].variance);
    }
    const std::string report = fit_report(model);
    CHECK(report.find("rho[x1]") != std::string::npos);
    CHECK(report.find("alpha") != std::string::npos);
  }

  TEST_CASE("model files are validated") {
    CHECK_THROWS_AS(model_from_text("{", "m"), ParseError);
    CHECK_THROWS_AS(model_from_text(R"({"format":"other"})", "m"), ParseError);
    CHECK_THROWS_AS(model_from_text(R"({"format":"cokrig-model","version":99})", "m"), ParseError);
    CHECK_THROWS_AS(load_model("/nonexistent/model.json"), InvalidArgument);
  }
}

TEST_SUITE("demo") {
  TEST_CASE("Forrester designs") {
    const auto a = demo_generate(DemoProblem::Forrester1, 0);
    REQUIRE(a.levels.size() == 2);
    CHECK(a.levels[0].x.rows() == 11);
    CHECK(a.levels[0].x(10, 0) == 1.0);
    CHECK(a.levels[1].x.col(0) == Eigen::Vector4d(0.0, 0.4, 0.6, 1.0));
    CHECK(a.levels[1].y(0) == doctest::Approx(forrester(0.0)));
    CHECK(a.test.x.rows() == 101);

    const double x = 0.3;
    const auto b = demo_generate(DemoProblem::Forrester2HighFreq, 0);
    CHECK(forrester_high_frequency(x) - forrester(x) == doctest::Approx(std::sin(10 * std::cos(5 * x))));
    CHECK(b.levels[1].y(1) == doctest::Approx(forrester_high_frequency(0.4)));
    CHECK(parse_demo_problem(to_string(DemoProblem::Ishigami3)) == DemoProblem::Ishigami3);
  }

  TEST_CASE("Ishigami designs are nested, seeded and reproducible") {
    DemoOptions o;
    o.test_points = 100;
    const auto a = demo_generate(DemoProblem::Ishigami3, 3, o);
    const auto b = demo_generate(DemoProblem::Ishigami3, 3, o);
    const auto c = demo_generate(DemoProblem::Ishigami3, 4, o);
    REQUIRE(a.levels.size() == 3);
    CHECK(a.levels[0].x.rows() == 400);
    CHECK(a.levels[2].x.rows() == 50);
    CHECK(a.levels[1].x == b.levels[1].x);
    CHECK(a.levels[1].x != c.levels[1].x);
    CHECK(a.test.x.rows() == 100);
    CHECK_NOTHROW(prepare_levels(a.levels));
    CHECK(a.levels[0].x.cwiseAbs().maxCoeff() <= M_PI);
    const Eigen::Vector3d x(0.5, 1.0, -2.0);
    CHECK(ishigami_level(1, x) == std::sin(0.5));
    CHECK(ishigami_level(2, x) == doctest::Approx(std::sin(0.5) + 7.0 * std::pow(std::sin(1.0), 2)));
    CHECK(ishigami_level(3, x) == doctest::Approx(ishigami_level(2, x) + 0.1 * 16.0 * std::sin(0.5)));
  }
}
