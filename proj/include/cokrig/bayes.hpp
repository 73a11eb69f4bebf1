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

#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "cokrig/estimation.hpp"
#include "cokrig/prediction.hpp"

namespace cokrig {

/// Conjugate prior for one level: coefficients ~ N(b, sigma^2 diag(v)),
/// sigma^2 ~ IG(alpha, gamma).
struct InformativePrior {
  Eigen::VectorXd b;
  Eigen::VectorXd v_diag;
  double alpha = 1.0;
  double gamma = 1.0;
};

/// A level without an informative prior uses the Jeffreys prior.
/// level2 covers lambda = (beta_rho, beta_2).
struct Priors2Level {
  std::optional<InformativePrior> level1;
  std::optional<InformativePrior> level2;
};

struct InverseGammaLaw {
  double alpha = 0.0;
  double scale = 0.0;  // Q / 2

  /// Q / (2 alpha), the point estimate used for collapsed axes.
  double point() const { return scale / alpha; }
};

struct PosteriorLaws2Level {
  Beta1Law beta1;
  Eigen::VectorXd lambda_mean;
  Eigen::MatrixXd lambda_cov_over_sigma2;
  InverseGammaLaw sigma1;
  InverseGammaLaw sigma2;
};

/// Posterior laws of (beta_1, lambda, sigma_1^2, sigma_2^2) at the model's
/// length-scales. Throws InvalidArgument for bad hyperparameters or s != 2.
PosteriorLaws2Level posterior_laws(const FittedModel& model, const Priors2Level& priors = {});

double ig_cdf(double alpha, double scale, double x);
double ig_pdf(double alpha, double scale, double x);
/// Bisection on the regularized incomplete gamma, relative accuracy 1e-12.
double ig_quantile(double alpha, double scale, double p);

struct IntegrationConfig {
  int grid_points_per_axis = 21;
  int particles = 1000;
  double lower_quantile = 1e-5;
  double upper_quantile = 1.0 - 1e-5;
  /// An axis collapses to a point mass when sigma^2 < ratio * var(z_t).
  double degenerate_ratio = 1e-12;
  bool collapse_sigma1 = false;
  bool collapse_sigma2 = false;
  /// Tensor trapezoid rule over lambda instead of Monte Carlo (lambda size <= 2).
  bool lambda_quadrature = false;
  int lambda_grid_points = 41;
  std::uint64_t seed = 0;
  int threads = 1;
  /// Number of density grid values per query point; 0 disables the density.
  int density_points = 0;
};

/// Standardized draws xi_j (one per column) with weights summing to 1.
struct ParticleSet {
  Eigen::MatrixXd xi;
  Eigen::VectorXd weights;

  Eigen::Index size() const { return xi.cols(); }
};

ParticleSet monte_carlo_particles(Eigen::Index dim, int count, std::uint64_t seed);
ParticleSet trapezoid_particles(Eigen::Index dim, int points_per_axis);
ParticleSet make_particles(Eigen::Index dim, const IntegrationConfig& config);

struct NodeMoments {
  double mean = 0.0;
  double variance = 0.0;           // mean_of_variances + variance_of_means
  double mean_of_variances = 0.0;
  double variance_of_means = 0.0;
};

/// Mixture over lambda ~ N(lambda_mean, sigma_2^2 cov) at fixed variances.
NodeMoments predictive_given_sigmas(const TwoLevelPredictor& conditional,
                                    const PosteriorLaws2Level& laws, double sigma1_sq,
                                    double sigma2_sq, const ParticleSet& particles);

NodeMoments predictive_given_sigmas(const FittedModel& model, const PosteriorLaws2Level& laws,
                                    const Eigen::Ref<const Eigen::VectorXd>& x, double sigma1_sq,
                                    double sigma2_sq, int n_particles, std::uint64_t seed);

/// One quadrature axis: nodes and normalized weights.
struct SigmaAxis {
  std::vector<double> nodes;
  std::vector<double> weights;
  bool collapsed = false;
};

/// Geometric grid between the IG quantiles, trapezoid weights times density.
SigmaAxis sigma_axis(const InverseGammaLaw& law, const IntegrationConfig& config);
SigmaAxis collapsed_axis(double value);

struct BayesDiagnostics {
  double sigma1_lower = 0.0;
  double sigma1_upper = 0.0;
  double sigma2_lower = 0.0;
  double sigma2_upper = 0.0;
  bool sigma1_collapsed = false;
  bool sigma2_collapsed = false;
  int nodes = 0;
  int particles = 0;
  std::uint64_t seed = 0;
  /// sum over nodes of weight * sqrt(var(mu) / N); 0 under lambda quadrature.
  double mc_standard_error = 0.0;
};

struct BayesPredictive {
  double mean = 0.0;
  double variance = 0.0;
  std::vector<std::pair<double, double>> density;  // (value, density)
  BayesDiagnostics diagnostics;

  double std_dev() const;
};

/// Axes for both variances, collapsing degenerate levels of the model.
std::pair<SigmaAxis, SigmaAxis> sigma_axes(const FittedModel& model,
                                           const PosteriorLaws2Level& laws,
                                           const IntegrationConfig& config);

BayesPredictive predictive_full(const FittedModel& model, const PosteriorLaws2Level& laws,
                                const Eigen::Ref<const Eigen::VectorXd>& x,
                                const IntegrationConfig& config = {});

/// Batch version; all query points share the axes and the particle set.
std::vector<BayesPredictive> predictive_full_batch(const FittedModel& model,
                                                   const PosteriorLaws2Level& laws,
                                                   const Eigen::MatrixXd& xs,
                                                   const IntegrationConfig& config = {});

}  // namespace cokrig
