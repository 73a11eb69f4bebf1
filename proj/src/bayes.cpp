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

#include "cokrig/bayes.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "cokrig/errors.hpp"
#include "cokrig/optimize.hpp"

namespace cokrig {

namespace {

struct LevelLaw {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
  InverseGammaLaw sigma;
};

LevelLaw level_law(const LevelProblem& problem, const FactoredCorrelation& r,
                   const LevelPosterior& jeffreys, const std::optional<InformativePrior>& prior,
                   int level) {
  LevelLaw out{jeffreys.lambda_mean, jeffreys.lambda_cov_over_sigma2,
               {jeffreys.alpha, 0.5 * jeffreys.q}};
  if (!prior) return out;

  const std::string where = "level " + std::to_string(level) + " prior: ";
  const Eigen::Index k = jeffreys.lambda_mean.size();
  if (prior->b.size() != k || prior->v_diag.size() != k) {
    throw DimensionMismatch(where + "expected " + std::to_string(k) + " coefficients");
  }
  if (!(prior->v_diag.array() > 0.0).all() || !(prior->alpha > 0.0) || !(prior->gamma > 0.0)) {
    throw InvalidArgument(where + "variances, alpha and gamma must be positive");
  }
  const Eigen::MatrixXd hw = r.whiten(level_regressors(problem));
  const Eigen::VectorXd zw = r.whiten(problem.z);
  const Eigen::MatrixXd m = hw.transpose() * hw;
  const Eigen::VectorXd vinv = prior->v_diag.cwiseInverse();

  Eigen::MatrixXd precision = m;
  precision.diagonal() += vinv;
  Eigen::LLT<Eigen::MatrixXd> llt(precision);
  out.cov = llt.solve(Eigen::MatrixXd::Identity(k, k));
  out.cov = 0.5 * (out.cov + out.cov.transpose());
  out.mean = llt.solve(hw.transpose() * zw + vinv.cwiseProduct(prior->b));

  const Eigen::VectorXd diff = prior->b - jeffreys.lambda_mean;
  Eigen::MatrixXd spread = jeffreys.lambda_cov_over_sigma2;
  spread.diagonal() += prior->v_diag;
  const double correction = diff.dot(spread.llt().solve(diff));
  const double n = static_cast<double>(problem.z.size());
  out.sigma = {0.5 * n + prior->alpha, 0.5 * (prior->gamma + correction + jeffreys.q)};
  return out;
}

// Symmetric square root factor L with L L^T = a, tolerant to semidefinite a.
Eigen::MatrixXd sqrt_factor(const Eigen::MatrixXd& a) {
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a);
  const Eigen::VectorXd root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * root.asDiagonal();
}

// Standardized directions of mu and rho(x) in xi space, per query point.
struct ParticleProjection {
  double mu0 = 0.0;
  double rho0 = 0.0;
  Eigen::VectorXd mu_dir;   // (L^T g)^T xi_j for each particle
  Eigen::VectorXd rho_dir;  // (L^T f_rho)^T xi_j
};

ParticleProjection project(const TwoLevelPredictor& cond, const PosteriorLaws2Level& laws,
                           const Eigen::MatrixXd& root, const ParticleSet& particles) {
  const Eigen::Index k = cond.lambda_size();
  if (laws.lambda_mean.size() != k || particles.xi.rows() != k) {
    throw DimensionMismatch("lambda law, particles and predictor sizes disagree");
  }
  Eigen::VectorXd rho_full = Eigen::VectorXd::Zero(k);
  rho_full.head(cond.scale_basis().size()) = cond.scale_basis();
  ParticleProjection p;
  p.mu0 = cond.mean(laws.lambda_mean);
  p.rho0 = cond.rho(laws.lambda_mean);
  p.mu_dir = particles.xi.transpose() * (root.transpose() * cond.gradient());
  p.rho_dir = particles.xi.transpose() * (root.transpose() * rho_full);
  return p;
}

struct NodeDraws {
  Eigen::VectorXd mu;
  Eigen::VectorXd var;
};

NodeDraws node_draws(const TwoLevelPredictor& cond, const ParticleProjection& p, double s1,
                     double s2) {
  const double scale = std::sqrt(s2);
  NodeDraws d;
  d.mu = (p.mu0 + scale * p.mu_dir.array()).matrix();
  const Eigen::ArrayXd rho = p.rho0 + scale * p.rho_dir.array();
  d.var = (rho.square() * (s1 * cond.level1_factor()) + s2 * cond.level2_factor()).matrix();
  return d;
}

NodeMoments moments(const NodeDraws& d, const Eigen::VectorXd& w) {
  NodeMoments m;
  m.mean = w.dot(d.mu);
  m.mean_of_variances = w.dot(d.var);
  m.variance_of_means = w.dot((d.mu.array() - m.mean).square().matrix());
  m.variance = m.mean_of_variances + m.variance_of_means;
  return m;
}

double variance_of_z(const Eigen::VectorXd& z) {
  if (z.size() < 2) return 0.0;
  return (z.array() - z.mean()).square().sum() / static_cast<double>(z.size() - 1);
}

const double kInvSqrt2Pi = 0.3989422804014327;

}  // namespace

PosteriorLaws2Level posterior_laws(const FittedModel& model, const Priors2Level& priors) {
  const auto& st = model.structure;
  if (st.num_levels() != 2) {
    throw InvalidArgument("Bayesian prediction is available for 2 levels only, model has " +
                          std::to_string(st.num_levels()));
  }
  const Basis scale = st.scales()[0].basis;
  const LevelProblem p1 = level_problem(model.data, 0, st.level(0).trend, scale);
  const LevelProblem p2 = level_problem(model.data, 1, st.level(1).trend, scale);
  const LevelLaw l1 = level_law(p1, *st.level(0).factor, model.posteriors[0], priors.level1, 1);
  const LevelLaw l2 = level_law(p2, *st.level(1).factor, model.posteriors[1], priors.level2, 2);
  if (!(l1.sigma.alpha > 0.0) || !(l2.sigma.alpha > 0.0)) {
    throw InsufficientData("posterior variance laws need a positive shape");
  }
  return {{l1.mean, l1.cov}, l2.mean, l2.cov, l1.sigma, l2.sigma};
}

double ig_cdf(double alpha, double scale, double x) {
  if (!(alpha > 0.0) || !(scale > 0.0)) throw InvalidArgument("IG parameters must be positive");
  if (x <= 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  return boost::math::gamma_q(alpha, scale / x);
}

double ig_pdf(double alpha, double scale, double x) {
  if (!(alpha > 0.0) || !(scale > 0.0)) throw InvalidArgument("IG parameters must be positive");
  if (x <= 0.0) return 0.0;
  const double log_pdf =
      alpha * std::log(scale) - std::lgamma(alpha) - (alpha + 1.0) * std::log(x) - scale / x;
  return std::exp(log_pdf);
}

double ig_quantile(double alpha, double scale, double p) {
  if (!(alpha > 0.0) || !(scale > 0.0)) throw InvalidArgument("IG parameters must be positive");
  if (!(p > 0.0 && p < 1.0)) throw InvalidArgument("quantile level must lie in (0, 1)");
  double lo = scale / std::max(alpha, 1.0);
  double hi = lo;
  while (ig_cdf(alpha, scale, lo) > p) lo *= 0.5;
  while (ig_cdf(alpha, scale, hi) < p) hi *= 2.0;
  // Bisection in log space: the bracket may span many decades.
  for (int it = 0; it < 400 && hi - lo > 1e-12 * hi; ++it) {
    const double mid = std::sqrt(lo * hi);
    const double m = (mid > lo && mid < hi) ? mid : 0.5 * (lo + hi);
    if (ig_cdf(alpha, scale, m) < p) {
      lo = m;
    } else {
      hi = m;
    }
  }
  return 0.5 * (lo + hi);
}

ParticleSet monte_carlo_particles(Eigen::Index dim, int count, std::uint64_t seed) {
  if (count < 1) throw InvalidArgument("at least one particle is required");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  ParticleSet out{Eigen::MatrixXd(dim, count),
                  Eigen::VectorXd::Constant(count, 1.0 / count)};
  for (int j = 0; j < count; ++j) {
    for (Eigen::Index i = 0; i < dim; ++i) out.xi(i, j) = normal(rng);
  }
  return out;
}

ParticleSet trapezoid_particles(Eigen::Index dim, int points_per_axis) {
  if (dim < 1 || dim > 2) {
    throw InvalidArgument("lambda quadrature supports 1 or 2 dimensions, got " +
                          std::to_string(dim));
  }
  if (points_per_axis < 3) throw InvalidArgument("lambda quadrature needs at least 3 points");
  const double span = 6.0;
  const double h = 2.0 * span / (points_per_axis - 1);
  Eigen::VectorXd u(points_per_axis);
  Eigen::VectorXd w(points_per_axis);
  for (int i = 0; i < points_per_axis; ++i) {
    u(i) = -span + i * h;
    const double edge = (i == 0 || i == points_per_axis - 1) ? 0.5 : 1.0;
    w(i) = edge * h * kInvSqrt2Pi * std::exp(-0.5 * u(i) * u(i));
  }
  const int count = dim == 1 ? points_per_axis : points_per_axis * points_per_axis;
  ParticleSet out{Eigen::MatrixXd(dim, count), Eigen::VectorXd(count)};
  for (int j = 0; j < count; ++j) {
    const int a = j % points_per_axis;
    const int b = j / points_per_axis;
    out.xi(0, j) = u(a);
    out.weights(j) = w(a);
    if (dim == 2) {
      out.xi(1, j) = u(b);
      out.weights(j) *= w(b);
    }
  }
  out.weights /= out.weights.sum();
  return out;
}

ParticleSet make_particles(Eigen::Index dim, const IntegrationConfig& config) {
  return config.lambda_quadrature ? trapezoid_particles(dim, config.lambda_grid_points)
                                  : monte_carlo_particles(dim, config.particles, config.seed);
}

NodeMoments predictive_given_sigmas(const TwoLevelPredictor& conditional,
                                    const PosteriorLaws2Level& laws, double sigma1_sq,
                                    double sigma2_sq, const ParticleSet& particles) {
  const Eigen::MatrixXd root = sqrt_factor(laws.lambda_cov_over_sigma2);
  const ParticleProjection p = project(conditional, laws, root, particles);
  return moments(node_draws(conditional, p, sigma1_sq, sigma2_sq), particles.weights);
}

NodeMoments predictive_given_sigmas(const FittedModel& model, const PosteriorLaws2Level& laws,
                                    const Eigen::Ref<const Eigen::VectorXd>& x, double sigma1_sq,
                                    double sigma2_sq, int n_particles, std::uint64_t seed) {
  const TwoLevelPredictor cond(model, laws.beta1, x);
  return predictive_given_sigmas(
      cond, laws, sigma1_sq, sigma2_sq,
      monte_carlo_particles(cond.lambda_size(), n_particles, seed));
}

SigmaAxis collapsed_axis(double value) { return {{value}, {1.0}, true}; }

SigmaAxis sigma_axis(const InverseGammaLaw& law, const IntegrationConfig& config) {
  const int m = config.grid_points_per_axis;
  if (m < 2) throw InvalidArgument("a quadrature axis needs at least 2 points");
  if (!(config.lower_quantile > 0.0 && config.lower_quantile < config.upper_quantile &&
        config.upper_quantile < 1.0)) {
    throw InvalidArgument("quadrature quantiles must satisfy 0 < lower < upper < 1");
  }
  const double lo = ig_quantile(law.alpha, law.scale, config.lower_quantile);
  const double hi = ig_quantile(law.alpha, law.scale, config.upper_quantile);
  const double ratio = std::pow(hi / lo, 1.0 / (m - 1));
  SigmaAxis axis;
  for (int k = 0; k < m; ++k) axis.nodes.push_back(lo * std::pow(ratio, k));
  axis.nodes.back() = hi;
  double total = 0.0;
  for (int k = 0; k < m; ++k) {
    const double left = k > 0 ? axis.nodes[k] - axis.nodes[k - 1] : 0.0;
    const double right = k + 1 < m ? axis.nodes[k + 1] - axis.nodes[k] : 0.0;
    const double w = 0.5 * (left + right) * ig_pdf(law.alpha, law.scale, axis.nodes[k]);
    axis.weights.push_back(w);
    total += w;
  }
  if (!(total > 0.0)) throw NumericalError("inverse-gamma quadrature weights vanish");
  for (auto& w : axis.weights) w /= total;
  return axis;
}

std::pair<SigmaAxis, SigmaAxis> sigma_axes(const FittedModel& model,
                                           const PosteriorLaws2Level& laws,
                                           const IntegrationConfig& config) {
  auto axis_for = [&](int t, const InverseGammaLaw& law, bool forced) {
    const double reml = model.posteriors[t].sigma2_reml;
    const bool degenerate = reml < config.degenerate_ratio * variance_of_z(model.data.y(t));
    if (degenerate && !forced) {
      std::ostringstream msg;
      msg << "level " << t + 1 << " variance estimate " << reml
          << " is degenerate; its quadrature axis collapses to a point mass";
      warn(msg.str());
    }
    if (forced || degenerate || !(law.scale > 0.0)) return collapsed_axis(law.point());
    return sigma_axis(law, config);
  };
  return {axis_for(0, laws.sigma1, config.collapse_sigma1),
          axis_for(1, laws.sigma2, config.collapse_sigma2)};
}

double BayesPredictive::std_dev() const { return std::sqrt(variance); }

namespace {

BayesPredictive integrate_point(const FittedModel& model, const PosteriorLaws2Level& laws,
                                const Eigen::Ref<const Eigen::VectorXd>& x,
                                const IntegrationConfig& config, const SigmaAxis& a1,
                                const SigmaAxis& a2, const Eigen::MatrixXd& root,
                                const ParticleSet& particles) {
  const TwoLevelPredictor cond(model, laws.beta1, x);
  const ParticleProjection proj = project(cond, laws, root, particles);
  const double n = static_cast<double>(particles.size());

  const std::size_t nodes = a1.nodes.size() * a2.nodes.size();
  std::vector<NodeMoments> node(nodes);
  std::vector<double> weight(nodes);
  for (std::size_t i = 0; i < a1.nodes.size(); ++i) {
    for (std::size_t j = 0; j < a2.nodes.size(); ++j) {
      const std::size_t k = i * a2.nodes.size() + j;
      node[k] = moments(node_draws(cond, proj, a1.nodes[i], a2.nodes[j]), particles.weights);
      weight[k] = a1.weights[i] * a2.weights[j];
    }
  }

  BayesPredictive out;
  for (std::size_t k = 0; k < nodes; ++k) out.mean += weight[k] * node[k].mean;
  double se = 0.0;
  for (std::size_t k = 0; k < nodes; ++k) {
    const double d = node[k].mean - out.mean;
    out.variance += weight[k] * (node[k].variance + d * d);
    if (!config.lambda_quadrature) se += weight[k] * std::sqrt(node[k].variance_of_means / n);
  }
  auto& diag = out.diagnostics;
  diag.sigma1_lower = a1.nodes.front();
  diag.sigma1_upper = a1.nodes.back();
  diag.sigma2_lower = a2.nodes.front();
  diag.sigma2_upper = a2.nodes.back();
  diag.sigma1_collapsed = a1.collapsed;
  diag.sigma2_collapsed = a2.collapsed;
  diag.nodes = static_cast<int>(nodes);
  diag.particles = static_cast<int>(particles.size());
  diag.seed = config.seed;
  diag.mc_standard_error = se;

  if (config.density_points <= 1) return out;

  // Value grid v = mean + c sinh(u): resolution c near the centre, reaching
  // 40 mixture standard deviations in the tails.
  double core = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < nodes; ++k) {
    if (weight[k] > 1e-6 && node[k].variance > 0.0) core = std::min(core, std::sqrt(node[k].variance));
  }
  if (!std::isfinite(core) || !(out.variance > 0.0)) {
    warn("predictive law is degenerate; no density emitted");
    return out;
  }
  const double reach = 40.0 * std::sqrt(out.variance);
  const double umax = std::asinh(reach / core);
  const int g = config.density_points;
  std::vector<double> values(g);
  std::vector<double> dens(g, 0.0);
  for (int i = 0; i < g; ++i) values[i] = out.mean + core * std::sinh(-umax + 2.0 * umax * i / (g - 1));
  for (std::size_t i = 0; i < a1.nodes.size(); ++i) {
    for (std::size_t j = 0; j < a2.nodes.size(); ++j) {
      const double w = weight[i * a2.nodes.size() + j];
      if (w == 0.0) continue;
      const NodeDraws d = node_draws(cond, proj, a1.nodes[i], a2.nodes[j]);
      for (Eigen::Index p = 0; p < d.mu.size(); ++p) {
        const double var = d.var(p);
        if (!(var > 0.0)) continue;
        const double c = w * particles.weights(p) * kInvSqrt2Pi / std::sqrt(var);
        for (int v = 0; v < g; ++v) {
          const double z = values[v] - d.mu(p);
          dens[v] += c * std::exp(-0.5 * z * z / var);
        }
      }
    }
  }
  for (int v = 0; v < g; ++v) out.density.emplace_back(values[v], dens[v]);
  return out;
}

}  // namespace

std::vector<BayesPredictive> predictive_full_batch(const FittedModel& model,
                                                   const PosteriorLaws2Level& laws,
                                                   const Eigen::MatrixXd& xs,
                                                   const IntegrationConfig& config) {
  const auto [a1, a2] = sigma_axes(model, laws, config);
  const Eigen::MatrixXd root = sqrt_factor(laws.lambda_cov_over_sigma2);
  const ParticleSet particles = make_particles(laws.lambda_mean.size(), config);
  std::vector<BayesPredictive> out(xs.rows());
  parallel_for(static_cast<int>(xs.rows()), config.threads, [&](int i) {
    out[i] = integrate_point(model, laws, xs.row(i).transpose(), config, a1, a2, root, particles);
  });
  return out;
}

BayesPredictive predictive_full(const FittedModel& model, const PosteriorLaws2Level& laws,
                                const Eigen::Ref<const Eigen::VectorXd>& x,
                                const IntegrationConfig& config) {
  return predictive_full_batch(model, laws, Eigen::MatrixXd(x.transpose()), config).front();
}

}  // namespace cokrig
