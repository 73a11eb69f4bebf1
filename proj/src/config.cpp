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

#include "cokrig/config.hpp"

#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>

#include "cokrig/errors.hpp"

namespace cokrig {

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  if (!s.empty() && s.back() == sep) out.push_back("");
  return out;
}

class LineParser {
 public:
  LineParser(std::string source, int line) : source_(std::move(source)), line_(line) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(source_ + ":" + std::to_string(line_) + ": " + what);
  }

  double number(const std::string& v) const {
    double out = 0.0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (v.empty() || res.ec != std::errc() || res.ptr != v.data() + v.size()) {
      fail("invalid number '" + v + "'");
    }
    return out;
  }

  long long integer(const std::string& v) const {
    long long out = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (v.empty() || res.ec != std::errc() || res.ptr != v.data() + v.size()) {
      fail("invalid integer '" + v + "'");
    }
    return out;
  }

  int positive_int(const std::string& v) const {
    const long long n = integer(v);
    if (n < 1 || n > std::numeric_limits<int>::max()) fail("expected a positive integer, got " + v);
    return static_cast<int>(n);
  }

  std::vector<double> numbers(const std::string& v) const {
    std::vector<double> out;
    for (const auto& item : split(v, ',')) out.push_back(number(item));
    if (out.empty()) fail("expected a comma-separated list of numbers");
    return out;
  }

  bool boolean(const std::string& v) const {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    fail("expected true or false, got '" + v + "'");
  }

  int level_index(const std::string& v) const {
    const long long t = integer(v);
    if (t < 1 || t > 64) fail("level index must lie in 1..64, got " + v);
    return static_cast<int>(t);
  }

  Basis basis(const std::string& v) const {
    try {
      return Basis::parse(v);
    } catch (const InputError& e) {
      fail(e.what());
    }
  }

 private:
  std::string source_;
  int line_;
};

std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + format_double(v[i]);
  return out;
}

void apply(RunConfig& c, const std::string& key, const std::string& value, const LineParser& p) {
  auto prior_of = [&](int level) -> PriorSpec& {
    auto& slot = level == 1 ? c.prior_level1 : c.prior_level2;
    if (!slot) slot = PriorSpec{};
    return *slot;
  };
  const auto dot = key.rfind('.');
  const std::string head = dot == std::string::npos ? "" : key.substr(0, dot);
  const std::string tail = dot == std::string::npos ? key : key.substr(dot + 1);

  if (key == "kernel") {
    try {
      c.kernel = parse_kernel_family(value);
    } catch (const InputError& e) {
      p.fail(e.what());
    }
  } else if (key == "theta.lower_factor") {
    c.theta_lower_factor = p.number(value);
  } else if (key == "theta.upper_factor") {
    c.theta_upper_factor = p.number(value);
  } else if (head == "theta.fixed") {
    c.fixed_theta[p.level_index(tail)] = p.numbers(value);
  } else if (head == "trend") {
    c.trends[p.level_index(tail)] = p.basis(value);
  } else if (head == "scale") {
    c.scales[p.level_index(tail)] = p.basis(value);
  } else if (head == "prior.level1" || head == "prior.level2") {
    PriorSpec& prior = prior_of(head == "prior.level1" ? 1 : 2);
    if (tail == "b") {
      prior.b = p.numbers(value);
    } else if (tail == "v") {
      prior.v = p.numbers(value);
    } else if (tail == "alpha") {
      prior.alpha = p.number(value);
    } else if (tail == "gamma") {
      prior.gamma = p.number(value);
    } else {
      p.fail("unknown key '" + key + "'");
    }
  } else if (key == "optimizer.starts") {
    c.optimizer_starts = p.positive_int(value);
  } else if (key == "optimizer.refined_starts") {
    c.optimizer_refined_starts = static_cast<int>(p.integer(value));
  } else if (key == "optimizer.tolerance") {
    c.optimizer_tolerance = p.number(value);
  } else if (key == "optimizer.initial_step") {
    c.optimizer_initial_step = p.number(value);
  } else if (key == "optimizer.max_local_evaluations") {
    c.optimizer_max_local_evaluations = static_cast<int>(p.integer(value));
  } else if (key == "regularization.nuggets") {
    c.nuggets = p.numbers(value);
  } else if (key == "regularization.max_condition") {
    c.max_condition = p.number(value);
  } else if (key == "bayes.grid_points") {
    c.bayes_grid_points = p.positive_int(value);
  } else if (key == "bayes.particles") {
    c.bayes_particles = p.positive_int(value);
  } else if (key == "bayes.lower_quantile") {
    c.bayes_lower_quantile = p.number(value);
  } else if (key == "bayes.upper_quantile") {
    c.bayes_upper_quantile = p.number(value);
  } else if (key == "bayes.degenerate_ratio") {
    c.bayes_degenerate_ratio = p.number(value);
  } else if (key == "bayes.lambda_quadrature") {
    c.bayes_lambda_quadrature = p.boolean(value);
  } else if (key == "bayes.lambda_grid_points") {
    c.bayes_lambda_grid_points = p.positive_int(value);
  } else if (key == "bayes.density_points") {
    c.bayes_density_points = p.positive_int(value);
  } else if (key == "nesting.tolerance") {
    c.nesting_tolerance = p.number(value);
  } else if (key == "metrics.q2") {
    if (value == "standard") {
      c.q2 = Q2Convention::Standard;
    } else if (value == "prediction_spread") {
      c.q2 = Q2Convention::PredictionSpread;
    } else {
      p.fail("metrics.q2 must be standard or prediction_spread");
    }
  } else if (key == "loo.mode") {
    if (value == "all_levels") {
      c.loo_mode = LooMode::AllLevels;
    } else if (value == "keep_lower") {
      c.loo_mode = LooMode::KeepLower;
    } else {
      p.fail("loo.mode must be all_levels or keep_lower");
    }
  } else if (key == "loo.theta") {
    if (value == "auto") {
      c.loo_theta = LooTheta::Auto;
    } else if (value == "reoptimize") {
      c.loo_theta = LooTheta::Reoptimize;
    } else if (value == "fixed") {
      c.loo_theta = LooTheta::Fixed;
    } else {
      p.fail("loo.theta must be auto, reoptimize or fixed");
    }
  } else if (key == "seed") {
    const long long s = p.integer(value);
    if (s < 0) p.fail("seed must be nonnegative");
    c.seed = static_cast<std::uint64_t>(s);
  } else if (key == "threads") {
    c.threads = p.positive_int(value);
  } else {
    p.fail("unknown key '" + key + "'");
  }
}

std::optional<InformativePrior> to_prior(const std::optional<PriorSpec>& spec, int level) {
  if (!spec) return std::nullopt;
  if (spec->b.empty() || spec->b.size() != spec->v.size()) {
    throw InvalidArgument("prior.level" + std::to_string(level) +
                          " needs b and v of equal, nonzero length");
  }
  InformativePrior prior;
  prior.b = Eigen::Map<const Eigen::VectorXd>(spec->b.data(), spec->b.size());
  prior.v_diag = Eigen::Map<const Eigen::VectorXd>(spec->v.data(), spec->v.size());
  prior.alpha = spec->alpha;
  prior.gamma = spec->gamma;
  return prior;
}

}  // namespace

RunConfig parse_run_config(const std::string& text, const std::string& source) {
  RunConfig c;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const LineParser p(source, number);
    const auto eq = line.find('=');
    if (eq == std::string::npos) p.fail("expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) p.fail("missing key");
    apply(c, key, value, p);
  }
  return c;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_run_config(text.str(), path);
}

std::string serialize_run_config(const RunConfig& c) {
  std::ostringstream os;
  auto put = [&](const std::string& key, const std::string& value) {
    os << key << " = " << value << '\n';
  };
  put("kernel", to_string(c.kernel));
  put("theta.lower_factor", format_double(c.theta_lower_factor));
  put("theta.upper_factor", format_double(c.theta_upper_factor));
  for (const auto& [t, v] : c.fixed_theta) put("theta.fixed." + std::to_string(t), join(v));
  for (const auto& [t, b] : c.trends) put("trend." + std::to_string(t), b.to_string());
  for (const auto& [t, b] : c.scales) put("scale." + std::to_string(t), b.to_string());
  for (int level : {1, 2}) {
    const auto& spec = level == 1 ? c.prior_level1 : c.prior_level2;
    if (!spec) continue;
    const std::string head = "prior.level" + std::to_string(level) + ".";
    put(head + "b", join(spec->b));
    put(head + "v", join(spec->v));
    put(head + "alpha", format_double(spec->alpha));
    put(head + "gamma", format_double(spec->gamma));
  }
  put("optimizer.starts", std::to_string(c.optimizer_starts));
  put("optimizer.refined_starts", std::to_string(c.optimizer_refined_starts));
  put("optimizer.tolerance", format_double(c.optimizer_tolerance));
  put("optimizer.initial_step", format_double(c.optimizer_initial_step));
  put("optimizer.max_local_evaluations", std::to_string(c.optimizer_max_local_evaluations));
  put("regularization.nuggets", join(c.nuggets));
  put("regularization.max_condition", format_double(c.max_condition));
  put("bayes.grid_points", std::to_string(c.bayes_grid_points));
  put("bayes.particles", std::to_string(c.bayes_particles));
  put("bayes.lower_quantile", format_double(c.bayes_lower_quantile));
  put("bayes.upper_quantile", format_double(c.bayes_upper_quantile));
  put("bayes.degenerate_ratio", format_double(c.bayes_degenerate_ratio));
  put("bayes.lambda_quadrature", c.bayes_lambda_quadrature ? "true" : "false");
  put("bayes.lambda_grid_points", std::to_string(c.bayes_lambda_grid_points));
  put("bayes.density_points", std::to_string(c.bayes_density_points));
  put("nesting.tolerance", format_double(c.nesting_tolerance));
  put("metrics.q2", c.q2 == Q2Convention::Standard ? "standard" : "prediction_spread");
  put("loo.mode", c.loo_mode == LooMode::AllLevels ? "all_levels" : "keep_lower");
  put("loo.theta", c.loo_theta == LooTheta::Auto         ? "auto"
                   : c.loo_theta == LooTheta::Reoptimize ? "reoptimize"
                                                         : "fixed");
  put("seed", std::to_string(c.seed));
  put("threads", std::to_string(c.threads));
  return os.str();
}

FitConfig RunConfig::fit_config() const {
  FitConfig f;
  f.family = kernel;
  f.theta_lower_factor = theta_lower_factor;
  f.theta_upper_factor = theta_upper_factor;
  auto grow = [](auto& v, int t) {
    if (static_cast<int>(v.size()) < t) v.resize(t);
  };
  for (const auto& [t, b] : trends) {
    grow(f.trends, t);
    f.trends[t - 1] = b;
  }
  for (int t = 0; t < static_cast<int>(f.trends.size()); ++t) {
    if (!trends.count(t + 1)) f.trends[t] = Basis::constant();
  }
  for (const auto& [t, b] : scales) {
    grow(f.scales, t);
    f.scales[t - 1] = b;
  }
  for (int t = 0; t < static_cast<int>(f.scales.size()); ++t) {
    if (!scales.count(t + 1)) f.scales[t] = Basis::constant();
  }
  for (const auto& [t, v] : fixed_theta) {
    grow(f.fixed_theta, t);
    f.fixed_theta[t - 1] = Eigen::Map<const Eigen::VectorXd>(v.data(), v.size());
  }
  f.optimizer.starts = optimizer_starts;
  f.optimizer.refined_starts = optimizer_refined_starts;
  f.optimizer.tolerance = optimizer_tolerance;
  f.optimizer.initial_step = optimizer_initial_step;
  f.optimizer.max_local_evaluations = optimizer_max_local_evaluations;
  f.optimizer.seed = seed;
  f.optimizer.threads = threads;
  f.regularization.nuggets = nuggets;
  f.regularization.max_condition = max_condition;
  f.threads = threads;
  return f;
}

Priors2Level RunConfig::priors() const {
  return {to_prior(prior_level1, 1), to_prior(prior_level2, 2)};
}

IntegrationConfig RunConfig::integration() const {
  IntegrationConfig ic;
  ic.grid_points_per_axis = bayes_grid_points;
  ic.particles = bayes_particles;
  ic.lower_quantile = bayes_lower_quantile;
  ic.upper_quantile = bayes_upper_quantile;
  ic.degenerate_ratio = bayes_degenerate_ratio;
  ic.lambda_quadrature = bayes_lambda_quadrature;
  ic.lambda_grid_points = bayes_lambda_grid_points;
  ic.seed = seed;
  ic.threads = threads;
  ic.density_points = 0;
  return ic;
}

LooConfig RunConfig::loo() const {
  LooConfig l;
  l.mode = loo_mode;
  l.theta = loo_theta;
  l.tolerance = nesting_tolerance;
  l.threads = threads;
  return l;
}

}  // namespace cokrig
