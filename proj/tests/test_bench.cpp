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
#include <sstream>

#include "cokrig/bench.hpp"
#include "doctest.h"

using namespace cokrig;

TEST_SUITE("bench") {
  TEST_CASE("log-log slope of an exact power law") {
    const std::vector<double> n{10, 20, 40, 80};
    std::vector<double> t;
    for (double v : n) t.push_back(3e-7 * std::pow(v, 2.7));
    CHECK(loglog_slope(n, t) == doctest::Approx(2.7).epsilon(1e-12));
  }

  TEST_CASE("gap tolerance grows with the condition number") {
    CHECK(mean_gap_tolerance(1.0) == 1e-8);
    CHECK(mean_gap_tolerance(1e12) > 1e-4);
  }

  TEST_CASE("a small run times both paths and agrees on predictions") {
    BenchConfig c;
    c.n2_values = {10, 20};
    c.repeats = 1;
    c.probes = 4;
    const auto r = run_complexity_bench(c);
    REQUIRE(r.records.size() == 2);
    for (const auto& rec : r.records) {
      CHECK(rec.n1 == 4 * rec.n2);
      CHECK(rec.t_crude > 0.0);
      CHECK(rec.t_light > 0.0);
      CHECK(rec.max_mean_gap <= mean_gap_tolerance(rec.condition));
    }
    const std::string csv = bench_csv(r);
    CHECK(csv.rfind("n2,n1,t_crude_s,t_light_s,ratio\n", 0) == 0);
    CHECK(csv.find("# slope_crude=") != std::string::npos);
  }
}
