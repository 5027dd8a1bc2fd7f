#include "spatial_exit/gibbs.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <ostream>

#include "spatial_exit/error.hpp"
#include "spatial_exit/format.hpp"

namespace spatial_exit {

std::vector<double> default_rho_grid() {
  std::vector<double> grid;
  grid.reserve(199);
  for (int i = -99; i <= 99; ++i) grid.push_back(i / 100.0);
  return grid;
}

void GibbsConfig::validate() const {
  if (n_keep < 500) throw Error(Errc::InvalidArgument, "gibbs: n_keep must be >= 500");
  if (n_burn < 0) throw Error(Errc::InvalidArgument, "gibbs: n_burn must be >= 0");
  if (!(beta_prior_variance > 0.0))
    throw Error(Errc::InvalidArgument, "gibbs: beta prior variance must be positive");
  if (rho_grid.empty()) throw Error(Errc::InvalidArgument, "gibbs: empty rho grid");
  for (std::size_t g = 0; g < rho_grid.size(); ++g) {
    if (!(std::abs(rho_grid[g]) < 1.0))
      throw Error(Errc::InvalidArgument, "gibbs: rho grid must lie inside (-1, 1)");
    if (g > 0 && !(rho_grid[g] > rho_grid[g - 1]))
      throw Error(Errc::InvalidArgument, "gibbs: rho grid must be strictly increasing");
  }
}

Eigen::VectorXd GibbsDraws::beta_sd() const {
  const Eigen::RowVectorXd mean = beta.colwise().mean();
  const Eigen::MatrixXd centered = beta.rowwise() - mean;
  return (centered.colwise().squaredNorm() / static_cast<double>(beta.rows() - 1))
      .cwiseSqrt()
      .transpose();
}

double GibbsDraws::rho_sd() const {
  const double m = rho.mean();
  return std::sqrt((rho.array() - m).square().sum() / static_cast<double>(rho.size() - 1));
}

std::vector<std::complex<double>> weight_eigenvalues(const SpatialWeights& w) {
  std::vector<std::complex<double>> out;
  out.reserve(static_cast<std::size_t>(w.size()));
  for (std::size_t b = 0; b < w.blocks().size(); ++b) {
    if (w.blocks()[b].size() == 1) {
      out.emplace_back(0.0, 0.0);
      continue;
    }
    Eigen::EigenSolver<Eigen::MatrixXd> es(w.block_dense(b), false);
    if (es.info() != Eigen::Success)
      throw Error(Errc::NonFiniteDensity, "eigen decomposition of W block failed");
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) out.push_back(es.eigenvalues()(i));
  }
  return out;
}

double log_det_lag(const std::vector<std::complex<double>>& eigenvalues, double rho) {
  double total = 0.0;
  int negative = 0;
  for (const auto& lambda : eigenvalues) {
    const std::complex<double> f = 1.0 - rho * lambda;
    // Complex eigenvalues come in conjugate pairs and contribute |f|^2 > 0.
    if (std::abs(lambda.imag()) < 1e-12 && f.real() <= 0.0) ++negative;
    total += std::log(std::abs(f));
  }
  if (!std::isfinite(total) || negative % 2 != 0)
    throw Error(Errc::NonFiniteDensity,
                "det(I - rho W) is not positive at rho = " + std::to_string(rho));
  return total;
}

Eigen::VectorXd griddy_probabilities(const Eigen::VectorXd& log_density) {
  const double top = log_density.maxCoeff();
  if (!std::isfinite(top)) throw Error(Errc::NonFiniteDensity, "non-finite rho conditional density");
  Eigen::VectorXd p = (log_density.array() - top).exp();
  p /= p.sum();
  return p;
}

double sample_truncated_normal_above(Rng& rng, double a) {
  if (a <= 0.0) {
    for (;;) {
      const double z = rng.normal();
      if (z > a) return z;
    }
  }
  // Exponential proposal with the optimal rate.
  const double alpha = 0.5 * (a + std::sqrt(a * a + 4.0));
  for (;;) {
    const double z = a - std::log(rng.uniform()) / alpha;
    const double d = z - alpha;
    if (rng.uniform() <= std::exp(-0.5 * d * d)) return z;
  }
}

double effective_sample_size(const Eigen::VectorXd& chain) {
  const Eigen::Index n = chain.size();
  if (n < 4 || chain.minCoeff() == chain.maxCoeff()) return static_cast<double>(n);
  const Eigen::VectorXd c = chain.array() - chain.mean();
  auto autocov = [&](Eigen::Index lag) {
    return c.head(n - lag).dot(c.tail(n - lag)) / static_cast<double>(n);
  };
  const double gamma0 = autocov(0);
  if (!(gamma0 > 0.0)) return static_cast<double>(n);
  double sum = 0.0;
  for (Eigen::Index m = 0; 2 * m + 1 < n / 2; ++m) {
    const double pair = autocov(2 * m) + autocov(2 * m + 1);
    if (pair <= 0.0) break;
    sum += pair;
  }
  const double tau = (-gamma0 + 2.0 * sum) / gamma0;
  return static_cast<double>(n) / std::max(tau, 1e-12);
}

GibbsDraws gibbs_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                     const SpatialWeights& w, const GibbsConfig& config) {
  config.validate();
  const Eigen::Index n = x.rows(), k = x.cols();
  if (y.size() != n || w.size() != n) throw Error(Errc::InvalidArgument, "gibbs: dimension mismatch");

  struct Block {
    std::vector<Eigen::Index> idx;
    Eigen::MatrixXd w, s, t, x;
  };
  std::vector<Block> blocks;
  for (std::size_t b = 0; b < w.blocks().size(); ++b) {
    Block blk;
    blk.idx = w.blocks()[b];
    blk.w = w.block_dense(b);
    blk.s = blk.w + blk.w.transpose();
    blk.t = blk.w.transpose() * blk.w;
    blk.x.resize(static_cast<Eigen::Index>(blk.idx.size()), k);
    for (std::size_t a = 0; a < blk.idx.size(); ++a) blk.x.row(static_cast<Eigen::Index>(a)) = x.row(blk.idx[a]);
    blocks.push_back(std::move(blk));
  }

  const auto& grid = config.rho_grid;
  const auto n_grid = static_cast<Eigen::Index>(grid.size());
  const auto eigenvalues = weight_eigenvalues(w);
  Eigen::VectorXd log_det(n_grid);
  for (Eigen::Index g = 0; g < n_grid; ++g) log_det(g) = log_det_lag(eigenvalues, grid[static_cast<std::size_t>(g)]);

  const Eigen::MatrixXd precision =
      x.transpose() * x +
      Eigen::MatrixXd::Identity(k, k) / config.beta_prior_variance;
  const Eigen::LLT<Eigen::MatrixXd> chol(precision);
  if (chol.info() != Eigen::Success) throw Error(Errc::SingularSystem, "gibbs: X'X is singular");

  Rng rng(config.seed);
  GibbsDraws draws;
  draws.seed = config.seed;
  draws.rho_identified = w.has_neighbors();
  draws.beta.resize(config.n_keep, k);
  draws.rho.resize(config.n_keep);

  Eigen::VectorXd z = (2.0 * y.array() - 1.0) * 0.5;
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(k);
  Eigen::Index rho_pos = 0;
  for (Eigen::Index g = 1; g < n_grid; ++g)
    if (std::abs(grid[static_cast<std::size_t>(g)]) < std::abs(grid[static_cast<std::size_t>(rho_pos)])) rho_pos = g;

  const int total = config.n_burn + config.n_keep;
  for (int iter = 0; iter < total; ++iter) {
    const double rho = grid[static_cast<std::size_t>(rho_pos)];

    // (a) latent propensities, single-site systematic scan within each block
    for (auto& blk : blocks) {
      const auto m = static_cast<Eigen::Index>(blk.idx.size());
      Eigen::VectorXd zb(m);
      for (Eigen::Index a = 0; a < m; ++a) zb(a) = z(blk.idx[static_cast<std::size_t>(a)]);
      Eigen::VectorXd mu;
      Eigen::MatrixXd q;
      if (m == 1) {
        mu = blk.x * beta;
        q = Eigen::MatrixXd::Identity(1, 1);
      } else {
        const Eigen::MatrixXd a_mat = Eigen::MatrixXd::Identity(m, m) - rho * blk.w;
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(a_mat);
        if (!(lu.rcond() > 1e-13)) throw Error(Errc::SingularSystem, "gibbs: I - rho W is singular");
        mu = lu.solve(blk.x * beta);
        q = Eigen::MatrixXd::Identity(m, m) - rho * blk.s + rho * rho * blk.t;
      }
      Eigen::VectorXd r = zb - mu;
      for (Eigen::Index a = 0; a < m; ++a) {
        const double qaa = q(a, a);
        const double cond_mean = mu(a) - (q.row(a).dot(r) - qaa * r(a)) / qaa;
        const double cond_sd = 1.0 / std::sqrt(qaa);
        const bool exit = y(blk.idx[static_cast<std::size_t>(a)]) > 0.5;
        double value;
        if (exit) {
          value = cond_mean + cond_sd * sample_truncated_normal_above(rng, -cond_mean / cond_sd);
          value = std::max(value, 0.0);
        } else {
          value = cond_mean - cond_sd * sample_truncated_normal_above(rng, cond_mean / cond_sd);
          if (value >= 0.0) value = -std::numeric_limits<double>::denorm_min();
        }
        zb(a) = value;
        r(a) = value - mu(a);
      }
      for (Eigen::Index a = 0; a < m; ++a) z(blk.idx[static_cast<std::size_t>(a)]) = zb(a);
    }

    // (b) beta | z, rho
    const Eigen::VectorXd wz = w.matrix() * z;
    const Eigen::VectorXd az = z - rho * wz;
    const Eigen::VectorXd mean = chol.solve(x.transpose() * az);
    Eigen::VectorXd noise(k);
    for (Eigen::Index j = 0; j < k; ++j) noise(j) = rng.normal();
    beta = mean + chol.matrixU().solve(noise);

    // (c) rho | z, beta on the grid
    const Eigen::VectorXd e0 = z - x * beta;
    const double ee = e0.squaredNorm(), ew = e0.dot(wz), ww = wz.squaredNorm();
    Eigen::VectorXd log_density(n_grid);
    for (Eigen::Index g = 0; g < n_grid; ++g) {
      const double r = grid[static_cast<std::size_t>(g)];
      log_density(g) = log_det(g) - 0.5 * (ee - 2.0 * r * ew + r * r * ww);
    }
    const Eigen::VectorXd prob = griddy_probabilities(log_density);
    draws.max_grid_normalization_error =
        std::max(draws.max_grid_normalization_error, std::abs(prob.sum() - 1.0));
    const double u = rng.uniform();
    double cum = 0.0;
    rho_pos = n_grid - 1;
    for (Eigen::Index g = 0; g < n_grid; ++g) {
      cum += prob(g);
      if (u <= cum) {
        rho_pos = g;
        break;
      }
    }

    if (iter >= config.n_burn) {
      const int keep = iter - config.n_burn;
      draws.beta.row(keep) = beta.transpose();
      draws.rho(keep) = grid[static_cast<std::size_t>(rho_pos)];
      for (Eigen::Index i = 0; i < n; ++i)
        if ((z(i) >= 0.0) != (y(i) > 0.5)) ++draws.truncation_violations;
    }
  }

  draws.last_latent = z;
  draws.beta_ess.resize(k);
  for (Eigen::Index j = 0; j < k; ++j) draws.beta_ess(j) = effective_sample_size(draws.beta.col(j));
  draws.rho_ess = effective_sample_size(draws.rho);
  return draws;
}

void write_draws_csv(std::ostream& out, const GibbsDraws& draws,
                     const std::vector<std::string>& beta_names) {
  out << "draw";
  for (Eigen::Index j = 0; j < draws.beta.cols(); ++j)
    out << ',' << (static_cast<std::size_t>(j) < beta_names.size() ? beta_names[static_cast<std::size_t>(j)]
                                                                   : "beta" + std::to_string(j));
  out << ",rho\n";
  for (Eigen::Index d = 0; d < draws.beta.rows(); ++d) {
    out << d;
    for (Eigen::Index j = 0; j < draws.beta.cols(); ++j) out << ',' << fmt_shortest(draws.beta(d, j));
    out << ',' << fmt_shortest(draws.rho(d)) << '\n';
  }
}

ComparisonReport compare_estimators(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                    const SpatialWeights& w, const GibbsConfig& config,
                                    double threshold) {
  ComparisonReport report;
  report.threshold = threshold;
  report.rho_applicable = w.has_neighbors();
  if (report.rho_applicable) {
    report.gmm = linearized_gmm_fit(x, y, w);
    report.gmm_beta = report.gmm->beta;
    report.gmm_rho = report.gmm->rho;
  } else {
    report.gmm_beta = probit_fit(x, y).beta;
  }
  report.draws = gibbs_fit(x, y, w, config);
  report.rho_posterior_mean = report.draws.rho_mean();
  report.rho_posterior_sd = report.draws.rho_sd();
  report.beta_posterior_mean = report.draws.beta_mean();
  report.beta_gap = (report.gmm_beta - report.beta_posterior_mean).cwiseAbs();
  report.rho_gap = std::abs(report.gmm_rho - report.rho_posterior_mean);
  report.pass = !report.rho_applicable || report.rho_gap <= threshold;
  return report;
}

}  // namespace spatial_exit
