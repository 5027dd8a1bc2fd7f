#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "spatial_exit/rng.hpp"
#include "spatial_exit/spatial_probit.hpp"
#include "spatial_exit/weights.hpp"

namespace spatial_exit {

/// 199 points from -0.99 to 0.99 in steps of 0.01.
std::vector<double> default_rho_grid();

struct GibbsConfig {
  int n_burn = 1000;
  int n_keep = 5000;
  std::vector<double> rho_grid = default_rho_grid();
  double beta_prior_variance = 1e4;  // N(0, v I) prior on beta
  std::uint64_t seed = 1;

  /// Throws InvalidArgument unless n_keep >= 500, n_burn >= 0 and the grid is
  /// strictly increasing inside (-1, 1).
  void validate() const;
};

struct GibbsDraws {
  Eigen::MatrixXd beta;  // n_keep x k
  Eigen::VectorXd rho;   // n_keep
  Eigen::VectorXd beta_ess;
  double rho_ess = 0.0;
  Eigen::VectorXd last_latent;  // y* from the final sweep
  std::size_t truncation_violations = 0;  // retained y* with the wrong sign; always 0
  double max_grid_normalization_error = 0.0;  // |sum of griddy probabilities - 1|
  bool rho_identified = true;  // false when W has no neighbours (flat rho conditional)
  std::uint64_t seed = 0;

  Eigen::VectorXd beta_mean() const { return beta.colwise().mean().transpose(); }
  Eigen::VectorXd beta_sd() const;
  double rho_mean() const { return rho.mean(); }
  double rho_sd() const;
};

/// Eigenvalues of W, computed block by block.
std::vector<std::complex<double>> weight_eigenvalues(const SpatialWeights& w);

/// log |det(I - rho W)| = sum log |1 - rho lambda|. Throws NonFiniteDensity if
/// the determinant is not positive.
double log_det_lag(const std::vector<std::complex<double>>& eigenvalues, double rho);

/// Normalized probabilities from unnormalized log densities (log-sum-exp).
Eigen::VectorXd griddy_probabilities(const Eigen::VectorXd& log_density);

/// Standard normal draw conditioned on being > a.
double sample_truncated_normal_above(Rng& rng, double a);

/// Gibbs sampler for the spatial lag probit:
///   (a) y*_i | rest: univariate truncated normal from the precision (I-rW)'(I-rW),
///   (b) beta | rest: conjugate normal,
///   (c) rho | rest: griddy Gibbs with precomputed log-determinants.
GibbsDraws gibbs_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                     const SpatialWeights& w, const GibbsConfig& config);

/// One-column-per-parameter CSV of the retained chain.
void write_draws_csv(std::ostream& out, const GibbsDraws& draws,
                     const std::vector<std::string>& beta_names);

/// Effective sample size via Geyer's initial positive sequence.
double effective_sample_size(const Eigen::VectorXd& chain);

struct ComparisonReport {
  std::optional<SpatialFit> gmm;  // empty when rho is not identified (W = 0)
  Eigen::VectorXd gmm_beta;       // falls back to the standard probit estimate
  double gmm_rho = 0.0;
  double rho_posterior_mean = 0.0;
  double rho_posterior_sd = 0.0;
  double rho_gap = 0.0;
  Eigen::VectorXd beta_posterior_mean;
  Eigen::VectorXd beta_gap;
  bool rho_applicable = true;
  double threshold = 0.05;
  bool pass = false;  // rho_gap <= threshold; true when not applicable
  GibbsDraws draws;
};

/// Runs the linearized GMM fit and the Gibbs sampler on the same cell.
ComparisonReport compare_estimators(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                    const SpatialWeights& w, const GibbsConfig& config,
                                    double threshold = 0.05);

}  // namespace spatial_exit
