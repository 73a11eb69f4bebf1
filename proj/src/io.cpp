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

#include "cokrig/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "cokrig/errors.hpp"
#include "json.hpp"

namespace cokrig {

using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

CsvTable read_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open '" + path + "'");
  CsvTable table;
  std::string line;
  int number = 0;
  auto fail = [&](const std::string& what) {
    throw ParseError(path + ":" + std::to_string(number) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++number;
    if (trim(line).empty()) continue;
    auto fields = split_fields(line);
    if (table.header.empty()) {
      table.header = std::move(fields);
      continue;
    }
    if (fields.size() != table.header.size()) {
      fail("expected " + std::to_string(table.header.size()) + " fields, found " +
           std::to_string(fields.size()));
    }
    std::vector<double> row(fields.size());
    for (std::size_t j = 0; j < fields.size(); ++j) {
      const auto& f = fields[j];
      const auto res = std::from_chars(f.data(), f.data() + f.size(), row[j]);
      if (f.empty() || res.ec != std::errc() || res.ptr != f.data() + f.size() ||
          !std::isfinite(row[j])) {
        fail("invalid number '" + f + "' in column " + table.header[j]);
      }
    }
    table.rows.push_back(std::move(row));
  }
  if (table.header.empty()) throw ParseError(path + ": missing header row");
  return table;
}

Eigen::MatrixXd columns(const CsvTable& table, std::size_t count) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(table.rows.size()),
                      static_cast<Eigen::Index>(count));
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    for (std::size_t j = 0; j < count; ++j) out(i, j) = table.rows[i][j];
  }
  return out;
}

void write_header(std::ostream& os, Eigen::Index dim) {
  for (Eigen::Index j = 0; j < dim; ++j) os << (j ? "," : "") << 'x' << j + 1;
}

void write_row(std::ostream& os, const Eigen::Ref<const Eigen::RowVectorXd>& x) {
  for (Eigen::Index j = 0; j < x.size(); ++j) os << (j ? "," : "") << format_double(x(j));
}

// Eigen <-> JSON

json to_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const Eigen::RowVectorXd r = m.row(i);
    rows.push_back(std::vector<double>(r.data(), r.data() + r.size()));
  }
  return rows;
}

Eigen::VectorXd vector_from(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Eigen::MatrixXd matrix_from(const json& j, Eigen::Index cols) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), cols);
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto r = j[i].get<std::vector<double>>();
    if (static_cast<Eigen::Index>(r.size()) != cols) {
      throw ParseError("matrix row " + std::to_string(i) + " has " + std::to_string(r.size()) +
                       " entries, expected " + std::to_string(cols));
    }
    for (Eigen::Index c = 0; c < cols; ++c) m(static_cast<Eigen::Index>(i), c) = r[c];
  }
  return m;
}

std::vector<std::string> term_names(const Basis& b) {
  std::vector<std::string> out;
  std::istringstream in(b.to_string());
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(item);
  return out;
}

}  // namespace

LevelData read_level_csv(const std::string& path) {
  const CsvTable table = read_table(path);
  if (table.header.size() < 2) {
    throw ParseError(path + ":1: level files need at least one input column and y");
  }
  const std::size_t d = table.header.size() - 1;
  LevelData out;
  out.x = columns(table, d);
  out.y.resize(out.x.rows());
  for (std::size_t i = 0; i < table.rows.size(); ++i) out.y(i) = table.rows[i][d];
  return out;
}

void write_level_csv(const std::string& path, const LevelData& data) {
  std::ofstream os(path);
  if (!os) throw InvalidArgument("cannot write '" + path + "'");
  write_header(os, data.x.cols());
  os << ",y\n";
  for (Eigen::Index i = 0; i < data.x.rows(); ++i) {
    write_row(os, data.x.row(i));
    os << ',' << format_double(data.y(i)) << '\n';
  }
}

QueryData read_query_csv(const std::string& path) {
  const CsvTable table = read_table(path);
  const bool has_y = table.header.size() >= 2 && table.header.back() == "y";
  const std::size_t d = table.header.size() - (has_y ? 1 : 0);
  QueryData out;
  out.x = columns(table, d);
  if (has_y) {
    Eigen::VectorXd y(out.x.rows());
    for (std::size_t i = 0; i < table.rows.size(); ++i) y(i) = table.rows[i][d];
    out.y = std::move(y);
  }
  return out;
}

std::vector<Eigen::Index> parse_id_list(const std::string& text) {
  std::vector<Eigen::Index> ids;
  auto number = [&](const std::string& s) {
    long long v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size() || v < 1) {
      throw InvalidArgument("invalid id '" + s + "' in list '" + text + "'");
    }
    return static_cast<Eigen::Index>(v);
  };
  for (const auto& item : split_fields(text)) {
    const auto dash = item.find('-');
    if (dash == std::string::npos) {
      ids.push_back(number(item));
      continue;
    }
    const auto lo = number(trim(item.substr(0, dash)));
    const auto hi = number(trim(item.substr(dash + 1)));
    if (hi < lo) throw InvalidArgument("empty id range '" + item + "'");
    for (auto i = lo; i <= hi; ++i) ids.push_back(i);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

LevelData select_rows(const LevelData& data, const std::vector<Eigen::Index>& ids,
                      const std::string& what) {
  LevelData out;
  out.x.resize(static_cast<Eigen::Index>(ids.size()), data.x.cols());
  out.y.resize(static_cast<Eigen::Index>(ids.size()));
  for (std::size_t k = 0; k < ids.size(); ++k) {
    if (ids[k] < 1 || ids[k] > data.x.rows()) {
      throw InvalidArgument(what + ": id " + std::to_string(ids[k]) + " outside 1.." +
                            std::to_string(data.x.rows()));
    }
    out.x.row(k) = data.x.row(ids[k] - 1);
    out.y(k) = data.y(ids[k] - 1);
  }
  return out;
}

void write_predictions(std::ostream& os, const Eigen::MatrixXd& x,
                       const std::vector<double>& mean, const std::vector<double>& std_dev) {
  write_header(os, x.cols());
  os << ",mean,std\n";
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    write_row(os, x.row(i));
    os << ',' << format_double(mean[i]) << ',' << format_double(std_dev[i]) << '\n';
  }
}

std::string model_to_text(const FittedModel& model, const RunConfig& config) {
  json levels = json::array();
  const auto& st = model.structure;
  for (int t = 0; t < model.num_levels(); ++t) {
    const auto& lvl = st.level(t);
    const auto& post = model.posteriors[t];
    json l;
    l["n"] = model.data.n(t);
    l["x"] = to_json(model.data.x(t));
    l["y"] = to_json(model.data.y(t));
    l["theta"] = to_json(lvl.kernel.theta());
    l["nugget"] = lvl.factor->nugget();
    l["trend"] = lvl.trend.to_string();
    if (t > 0) l["scale"] = st.scales()[t - 1].basis.to_string();
    l["posterior"] = {{"lambda_mean", to_json(post.lambda_mean)},
                      {"lambda_cov_over_sigma2", to_json(post.lambda_cov_over_sigma2)},
                      {"alpha", post.alpha},
                      {"q", post.q},
                      {"sigma2_reml", post.sigma2_reml},
                      {"scale_size", post.scale_size},
                      {"trend_size", post.trend_size}};
    levels.push_back(std::move(l));
  }
  json root;
  root["format"] = "cokrig-model";
  root["version"] = kModelFormatVersion;
  root["kernel"] = to_string(model.kernel(0).family());
  root["dim"] = st.dim();
  root["config"] = serialize_run_config(config);
  root["levels"] = std::move(levels);
  return root.dump(1) + "\n";
}

SavedModel model_from_text(const std::string& text, const std::string& source) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(source + ": " + e.what());
  }
  try {
    if (root.at("format") != "cokrig-model") throw ParseError(source + ": not a model file");
    const int version = root.at("version").get<int>();
    if (version != kModelFormatVersion) {
      throw ParseError(source + ": unsupported model version " + std::to_string(version));
    }
    RunConfig config = parse_run_config(root.at("config").get<std::string>(), source + " (config)");
    const auto family = parse_kernel_family(root.at("kernel").get<std::string>());
    const Eigen::Index dim = root.at("dim").get<Eigen::Index>();

    const auto& jl = root.at("levels");
    if (jl.empty()) throw ParseError(source + ": no levels");
    std::vector<LevelData> data;
    std::vector<LevelPosterior> posteriors;
    std::vector<Kernel> kernels;
    std::vector<Basis> trends, scales;
    std::vector<double> nuggets;
    for (std::size_t t = 0; t < jl.size(); ++t) {
      const auto& l = jl[t];
      LevelData d;
      d.x = matrix_from(l.at("x"), dim);
      d.y = vector_from(l.at("y"));
      data.push_back(std::move(d));
      kernels.emplace_back(family, vector_from(l.at("theta")));
      nuggets.push_back(l.at("nugget").get<double>());
      trends.push_back(Basis::parse(l.at("trend").get<std::string>()));
      if (t > 0) scales.push_back(Basis::parse(l.at("scale").get<std::string>()));
      const auto& p = l.at("posterior");
      LevelPosterior post;
      post.lambda_mean = vector_from(p.at("lambda_mean"));
      post.lambda_cov_over_sigma2 =
          matrix_from(p.at("lambda_cov_over_sigma2"), post.lambda_mean.size());
      post.alpha = p.at("alpha").get<double>();
      post.q = p.at("q").get<double>();
      post.sigma2_reml = p.at("sigma2_reml").get<double>();
      post.scale_size = p.at("scale_size").get<Eigen::Index>();
      post.trend_size = p.at("trend_size").get<Eigen::Index>();
      posteriors.push_back(std::move(post));
    }
    // Saved designs are already sorted and canonical; sorting again is the identity.
    SortedLevels sorted = prepare_levels(data, config.nesting_tolerance);
    return {assemble_model(std::move(sorted), std::move(posteriors), kernels, trends, scales,
                           nuggets),
            std::move(config)};
  } catch (const json::exception& e) {
    throw ParseError(source + ": malformed model file: " + e.what());
  }
}

void save_model(const std::string& path, const FittedModel& model, const RunConfig& config) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InvalidArgument("cannot write '" + path + "'");
  os << model_to_text(model, config);
}

SavedModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open model file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return model_from_text(text.str(), path);
}

std::string fit_report(const FittedModel& model) {
  std::ostringstream os;
  os << std::setprecision(6);
  const auto& st = model.structure;
  os << "kernel " << to_string(model.kernel(0).family()) << ", " << model.num_levels()
     << " level(s), dimension " << st.dim() << "\n";
  for (int t = 0; t < model.num_levels(); ++t) {
    const auto& post = model.posteriors[t];
    const auto& lvl = st.level(t);
    os << "\nlevel " << t + 1 << "  (n = " << model.data.n(t) << ")\n";
    os << "  theta       ";
    for (Eigen::Index i = 0; i < lvl.kernel.theta().size(); ++i) os << ' ' << lvl.kernel.theta()(i);
    os << "\n  nugget       " << lvl.factor->nugget() << "\n";
    std::vector<std::string> names;
    if (t > 0) {
      for (const auto& n : term_names(st.scales()[t - 1].basis)) names.push_back("rho[" + n + "]");
    }
    for (const auto& n : term_names(lvl.trend)) names.push_back("beta[" + n + "]");
    for (Eigen::Index k = 0; k < post.lambda_mean.size(); ++k) {
      const double sd = std::sqrt(std::max(0.0, post.lambda_cov_over_sigma2(k, k) * post.sigma2_reml));
      os << "  " << std::left << std::setw(12) << names[k] << std::right << ' '
         << std::setw(13) << post.lambda_mean(k) << "   (sd " << sd << ")\n";
    }
    os << "  Q            " << post.q << "\n";
    os << "  alpha        " << post.alpha << "\n";
    os << "  sigma2       " << post.sigma2_reml << "\n";
  }
  return os.str();
}

}  // namespace cokrig
