#include "spatial_exit/spatial_probit.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "spatial_exit/error.hpp"
#include "spatial_exit/normal.hpp"
#include "spatial_exit/rng.hpp"

namespace spatial_exit {

namespace {

constexpr double kSingularRcond = 1e-13;

Eigen::MatrixXd gather_rows(const Eigen::MatrixXd& m, const std::vector<Eigen::Index>& idx) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(idx.size()), m.cols());
  for (std::size_t a = 0; a < idx.size(); ++a) out.row(static_cast<Eigen::Index>(a)) = m.row(idx[a]);
  return out;
}

void scatter_rows(Eigen::MatrixXd& dst, const Eigen::MatrixXd& src,
                  const std::vector<Eigen::Index>& idx) {
  for (std::size_t a = 0; a < idx.size(); ++a) dst.row(idx[a]) = src.row(static_cast<Eigen::Index>(a));
}

// Orthonormal basis of col(Z); the projection P_Z G is Q (Q' G).
Eigen::MatrixXd orthonormal_basis(const Eigen::MatrixXd& z) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(z);
  return qr.householderQ() * Eigen::MatrixXd::Identity(z.rows(), z.cols());
}

struct Residuals {
  Eigen::VectorXd r;
  Eigen::MatrixXd g;  // n x (k + 1) negative Jacobian of r: beta columns then rho
};

Residuals residuals_and_gradient(const ProbabilityGradient& pg, const Eigen::VectorXd& y,
                                 ResidualKind kind) {
  const Eigen::Index n = y.size(), k = pg.g_beta.cols();
  Residuals out;
  out.g.resize(n, k + 1);
  if (kind == ResidualKind::Raw) {
    out.r = y - pg.p;
    out.g.leftCols(k) = pg.g_beta;
    out.g.col(k) = pg.g_rho;
  } else {
    out.r = generalized_residuals_from_index(pg.index, y);
    Eigen::VectorXd curvature(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double qt = (y(i) > 0.5 ? 1.0 : -1.0) * pg.index(i);
      const double lambda = normal::mills_ratio(qt);
      curvature(i) = lambda * (lambda + qt);
    }
    out.g.leftCols(k) = curvature.asDiagonal() * pg.t_beta;
    out.g.col(k) = curvature.cwiseProduct(pg.t_rho);
  }
  return out;
}

// (G^'G^)^{-1} with classic or heteroskedasticity-robust middle.
Eigen::MatrixXd second_stage_vcov(const Eigen::MatrixXd& g_hat, const Eigen::VectorXd& resid,
                                  CovarianceKind kind) {
  const Eigen::Index n = g_hat.rows(), p = g_hat.cols();
  const Eigen::MatrixXd bread =
      (g_hat.transpose() * g_hat).ldlt().solve(Eigen::MatrixXd::Identity(p, p));
  Eigen::MatrixXd v;
  if (kind == CovarianceKind::Classic) {
    const double s2 = resid.squaredNorm() / static_cast<double>(n - p);
    v = s2 * bread;
  } else {
    const Eigen::MatrixXd meat = g_hat.transpose() * resid.array().square().matrix().asDiagonal() * g_hat;
    v = bread * meat * bread;
  }
  return 0.5 * (v + v.transpose());
}

Eigen::VectorXd standard_errors(const Eigen::MatrixXd& vcov) {
  return vcov.diagonal().cwiseMax(0.0).cwiseSqrt();
}

double condition_number(const Eigen::MatrixXd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& s = svd.singularValues();
  return s(s.size() - 1) > 0.0 ? s(0) / s(s.size() - 1) : std::numeric_limits<double>::infinity();
}

}  // namespace

// --- LagOperator -----------------------------------------------------------

LagOperator::LagOperator(const SpatialWeights& w, double rho)
    : weights_(&w), rho_(rho), n_(w.size()) {
  if (!std::isfinite(rho)) throw Error(Errc::InvalidArgument, "rho must be finite");
  blocks_.reserve(w.blocks().size());
  for (std::size_t b = 0; b < w.blocks().size(); ++b) {
    Block blk;
    blk.index = w.blocks()[b];
    blk.w = w.block_dense(b);
    const auto m = blk.w.rows();
    const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(m, m) - rho * blk.w;
    blk.lu.compute(a);
    const double rc = blk.lu.rcond();
    if (!(rc > kSingularRcond))
      throw Error(Errc::SingularSystem, "I - rho W is singular at rho = " + std::to_string(rho));
    blocks_.push_back(std::move(blk));
  }
}

Eigen::MatrixXd LagOperator::solve(const Eigen::MatrixXd& rhs) const {
  if (rhs.rows() != n_) throw Error(Errc::InvalidArgument, "LagOperator::solve: size mismatch");
  Eigen::MatrixXd out(rhs.rows(), rhs.cols());
  for (const auto& blk : blocks_) scatter_rows(out, blk.lu.solve(gather_rows(rhs, blk.index)), blk.index);
  return out;
}

Eigen::MatrixXd LagOperator::apply(const Eigen::MatrixXd& v) const {
  return v - rho_ * (weights_->matrix() * v);
}

Eigen::MatrixXd LagOperator::block_inverse(std::size_t b) const {
  const auto m = blocks_[b].w.rows();
  return blocks_[b].lu.solve(Eigen::MatrixXd::Identity(m, m));
}

// --- reduced form and simulation -------------------------------------------

Eigen::MatrixXd ReducedForm::sigma_dense() const {
  const auto n = sigma_diag_sqrt.size();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t b = 0; b < blocks.size(); ++b)
    for (std::size_t i = 0; i < blocks[b].size(); ++i)
      for (std::size_t j = 0; j < blocks[b].size(); ++j)
        out(blocks[b][i], blocks[b][j]) =
            sigma_blocks[b](static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  return out;
}

ReducedForm reduced_form(const SpatialWeights& w, double rho, const Eigen::MatrixXd& x) {
  if (x.rows() != w.size()) throw Error(Errc::InvalidArgument, "reduced_form: X rows != W size");
  const LagOperator op(w, rho);
  ReducedForm rf;
  rf.rho = rho;
  rf.x_star = op.solve(x);
  rf.blocks = w.blocks();
  rf.sigma_diag_sqrt.resize(w.size());
  rf.sigma_blocks.reserve(op.block_count());
  for (std::size_t b = 0; b < op.block_count(); ++b) {
    const Eigen::MatrixXd inv = op.block_inverse(b);
    Eigen::MatrixXd sigma = inv * inv.transpose();
    const auto& idx = op.block_indices(b);
    for (std::size_t a = 0; a < idx.size(); ++a)
      rf.sigma_diag_sqrt(idx[a]) = std::sqrt(sigma(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(a)));
    rf.sigma_blocks.push_back(std::move(sigma));
  }
  return rf;
}

LatentSample simulate_latent_with_errors(const SpatialWeights& w, double rho,
                                         const Eigen::VectorXd& beta, const Eigen::MatrixXd& x,
                                         const Eigen::VectorXd& eps) {
  if (x.rows() != w.size() || eps.size() != w.size() || x.cols() != beta.size())
    throw Error(Errc::InvalidArgument, "simulate_latent: dimension mismatch");
  if (w.row_normalized() && !(std::abs(rho) < 1.0))
    throw Error(Errc::InvalidArgument, "simulate_latent: |rho| must be < 1 for row-normalized W");
  const LagOperator op(w, rho);
  LatentSample s;
  s.rho = rho;
  s.beta = beta;
  s.eps = eps;
  s.y_star = op.solve(x * beta + eps);
  s.y = (s.y_star.array() >= 0.0).cast<double>();
  return s;
}

LatentSample simulate_latent(const SpatialWeights& w, double rho, const Eigen::VectorXd& beta,
                             const Eigen::MatrixXd& x, double sigma_eps, std::uint64_t seed) {
  if (!(sigma_eps > 0.0)) throw Error(Errc::InvalidArgument, "sigma_eps must be positive");
  Rng rng(seed);
  Eigen::VectorXd eps(w.size());
  for (Eigen::Index i = 0; i < eps.size(); ++i) eps(i) = sigma_eps * rng.normal();
  LatentSample s = simulate_latent_with_errors(w, rho, beta, x, eps);
  s.seed = seed;
  s.sigma_eps = sigma_eps;
  return s;
}

// --- probabilities and residuals -------------------------------------------

Eigen::VectorXd latent_index(const ReducedForm& rf, const Eigen::VectorXd& beta) {
  return (rf.x_star * beta).cwiseQuotient(rf.sigma_diag_sqrt);
}

Eigen::VectorXd heteroskedastic_probabilities(const ReducedForm& rf, const Eigen::VectorXd& beta) {
  return latent_index(rf, beta).unaryExpr([](double t) { return normal::cdf(t); });
}

Eigen::VectorXd generalized_residuals(const Eigen::VectorXd& p, const Eigen::VectorXd& y) {
  if (p.size() != y.size()) throw Error(Errc::InvalidArgument, "generalized_residuals: size mismatch");
  Eigen::VectorXd e(p.size());
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    const double pi = p(i);
    if (!(pi > 0.0 && pi < 1.0))
      throw Error(Errc::ProbabilityUnderflow,
                  "probability " + std::to_string(pi) + " at row " + std::to_string(i) +
                      " is not strictly inside (0, 1)");
    // Recover the index so phi is evaluated exactly where Phi was.
    double lo = -40.0, hi = 40.0;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++it) {
      const double mid = 0.5 * (lo + hi);
      (normal::cdf(mid) < pi ? lo : hi) = mid;
    }
    const double t = 0.5 * (lo + hi);
    e(i) = (y(i) - pi) * normal::pdf(t) / (pi * (1.0 - pi));
  }
  return e;
}

Eigen::VectorXd generalized_residuals_from_index(const Eigen::VectorXd& index,
                                                 const Eigen::VectorXd& y) {
  if (index.size() != y.size())
    throw Error(Errc::InvalidArgument, "generalized_residuals: size mismatch");
  Eigen::VectorXd e(index.size());
  for (Eigen::Index i = 0; i < index.size(); ++i)
    e(i) = y(i) > 0.5 ? normal::mills_ratio(index(i)) : -normal::mills_ratio(-index(i));
  return e;
}

// --- instruments and moments -----------------------------------------------

InstrumentMatrix build_instruments(const Eigen::MatrixXd& x, const SpatialWeights& w) {
  if (x.rows() != w.size()) throw Error(Errc::InvalidArgument, "build_instruments: size mismatch");
  if (x.cols() < 1 || (x.col(0).array() != 1.0).any())
    throw Error(Errc::InvalidArgument, "build_instruments: column 0 of X must be the intercept");
  const Eigen::Index k = x.cols();
  InstrumentMatrix inst;
  inst.z.resize(x.rows(), 2 * k - 1);
  inst.z.leftCols(k) = x;
  if (k > 1) inst.z.rightCols(k - 1) = w.matrix() * x.rightCols(k - 1);
  inst.construction = "[X, W X without intercept]";
  inst.rank = column_rank(inst.z);
  if (inst.rank < inst.z.cols())
    throw Error(Errc::RankDeficient, "instrument matrix has rank " + std::to_string(inst.rank) +
                                         " < " + std::to_string(inst.z.cols()) + " columns");
  inst.condition_number = condition_number(inst.z);
  return inst;
}

Eigen::VectorXd moment_conditions(const Eigen::VectorXd& beta, double rho,
                                  const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                  const SpatialWeights& w, const InstrumentMatrix& z) {
  if (z.z.rows() != y.size()) throw Error(Errc::InvalidArgument, "moment_conditions: size mismatch");
  const ReducedForm rf = reduced_form(w, rho, x);
  const Eigen::VectorXd e = generalized_residuals_from_index(latent_index(rf, beta), y);
  return z.z.transpose() * e / static_cast<double>(y.size());
}

// --- gradients ---------------------------------------------------------------

ProbabilityGradient probability_gradient(const SpatialWeights& w, double rho,
                                         const Eigen::VectorXd& beta, const Eigen::MatrixXd& x) {
  if (x.rows() != w.size() || x.cols() != beta.size())
    throw Error(Errc::InvalidArgument, "probability_gradient: dimension mismatch");
  const LagOperator op(w, rho);
  const Eigen::Index n = x.rows(), k = x.cols();
  ProbabilityGradient pg;
  pg.index.resize(n);
  pg.p.resize(n);
  pg.g_beta.resize(n, k);
  pg.g_rho.resize(n);
  pg.t_beta.resize(n, k);
  pg.t_rho.resize(n);

  for (std::size_t b = 0; b < op.block_count(); ++b) {
    const auto& idx = op.block_indices(b);
    const Eigen::MatrixXd inv = op.block_inverse(b);
    const Eigen::MatrixXd xs = inv * gather_rows(x, idx);
    const Eigen::VectorXd a = xs * beta;
    const Eigen::MatrixXd sigma = inv * inv.transpose();
    const Eigen::MatrixXd bmat = inv * op.block_weights(b);
    const Eigen::VectorXd da = bmat * a;
    // (B Sigma)_ii with Sigma symmetric
    const Eigen::VectorXd bs_diag = (bmat.array() * sigma.array()).rowwise().sum();
    for (std::size_t r = 0; r < idx.size(); ++r) {
      const auto i = idx[r];
      const auto ri = static_cast<Eigen::Index>(r);
      const double s = std::sqrt(sigma(ri, ri));
      const double t = a(ri) / s;
      const double phi = normal::pdf(t);
      pg.index(i) = t;
      pg.p(i) = normal::cdf(t);
      pg.t_beta.row(i) = xs.row(ri) / s;
      pg.t_rho(i) = da(ri) / s - a(ri) * bs_diag(ri) / (s * s * s);
      pg.g_beta.row(i) = phi * pg.t_beta.row(i);
      pg.g_rho(i) = phi * pg.t_rho(i);
    }
  }
  return pg;
}

ProbabilityGradient linearized_gradient(const SpatialWeights& w, const Eigen::VectorXd& beta,
                                        const Eigen::MatrixXd& x) {
  if (x.rows() != w.size() || x.cols() != beta.size())
    throw Error(Errc::InvalidArgument, "linearized_gradient: dimension mismatch");
  ProbabilityGradient pg;
  pg.index = x * beta;
  const Eigen::VectorXd lag = w.matrix() * pg.index;
  const Eigen::VectorXd phi = pg.index.unaryExpr([](double t) { return normal::pdf(t); });
  pg.p = pg.index.unaryExpr([](double t) { return normal::cdf(t); });
  pg.t_beta = x;
  pg.t_rho = lag;
  pg.g_beta = phi.asDiagonal() * x;
  pg.g_rho = phi.cwiseProduct(lag);
  return pg;
}

// --- estimators --------------------------------------------------------------

std::string_view to_string(ResidualKind kind) noexcept {
  return kind == ResidualKind::Raw ? "raw" : "generalized";
}
std::string_view to_string(CovarianceKind kind) noexcept {
  return kind == CovarianceKind::Classic ? "classic" : "robust";
}
std::string_view to_string(Estimator estimator) noexcept {
  return estimator == Estimator::LinearizedGMM ? "linearized_gmm" : "nl2sls";
}

SpatialFit linearized_gmm_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                              const SpatialWeights& w, const LinearizedOptions& options) {
  if (x.rows() != y.size() || x.rows() != w.size())
    throw Error(Errc::InvalidArgument, "linearized_gmm_fit: dimension mismatch");
  const Eigen::Index k = x.cols();
  if (!w.has_neighbors())
    throw Error(Errc::DegenerateRhoGradient, "W has no non-isolated rows: rho is not identified");

  const ProbitFit probit = probit_fit(x, y, options.probit);
  const ProbabilityGradient pg = linearized_gradient(w, probit.beta, x);

  // G_rho must carry information beyond the G_beta columns.
  const Eigen::VectorXd g_rho_fit =
      pg.g_beta * pg.g_beta.colPivHouseholderQr().solve(pg.g_rho);
  const double g_rho_norm = pg.g_rho.norm();
  if (!(g_rho_norm > 0.0) || (pg.g_rho - g_rho_fit).norm() <= 1e-8 * g_rho_norm)
    throw Error(Errc::DegenerateRhoGradient,
                "G_rho is numerically collinear with G_beta: rho is not identified");

  const InstrumentMatrix z = build_instruments(x, w);
  const Residuals res = residuals_and_gradient(pg, y, options.residual);
  const Eigen::MatrixXd q = orthonormal_basis(z.z);
  const Eigen::MatrixXd g_hat = q * (q.transpose() * res.g);

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(g_hat);
  if (qr.rank() < k + 1)
    throw Error(Errc::DegenerateRhoGradient, "projected gradients are rank deficient");

  const Eigen::VectorXd response = res.r + res.g.leftCols(k) * probit.beta;
  const Eigen::VectorXd gamma = qr.solve(response);

  SpatialFit fit;
  fit.method = Estimator::LinearizedGMM;
  fit.beta = gamma.head(k);
  fit.rho = gamma(k);
  fit.probit_beta = probit.beta;
  const Eigen::VectorXd resid = response - res.g * gamma;
  fit.vcov = second_stage_vcov(g_hat, resid, options.covariance);
  fit.se = standard_errors(fit.vcov);
  fit.iterations = 1;
  fit.converged = true;
  fit.rho_outside_unit = std::abs(fit.rho) >= 1.0;
  fit.residual = options.residual;
  fit.covariance = options.covariance;
  fit.instruments = z.construction;
  fit.instrument_condition = z.condition_number;
  return fit;
}

SpatialFit nl2sls_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                      const SpatialWeights& w, const InstrumentMatrix& z,
                      const Nl2slsOptions& options) {
  if (x.rows() != y.size() || x.rows() != w.size() || z.z.rows() != y.size())
    throw Error(Errc::InvalidArgument, "nl2sls_fit: dimension mismatch");
  const Eigen::Index k = x.cols();
  if (z.z.cols() < k + 1)
    throw Error(Errc::InvalidArgument, "nl2sls_fit: need at least k + 1 instruments");
  if (!(std::abs(options.start_rho) < 1.0))
    throw Error(Errc::InvalidArgument, "nl2sls_fit: |start rho| must be < 1");

  SpatialFit fit;
  fit.method = Estimator::NL2SLS;
  fit.residual = options.residual;
  fit.covariance = options.covariance;
  fit.instruments = z.construction;
  fit.instrument_condition = z.condition_number;
  if (options.start_beta) {
    if (options.start_beta->size() != k)
      throw Error(Errc::InvalidArgument, "nl2sls_fit: start beta has wrong length");
    fit.probit_beta = *options.start_beta;
  } else {
    fit.probit_beta = probit_fit(x, y, options.probit).beta;
  }

  Eigen::VectorXd gamma(k + 1);
  gamma.head(k) = fit.probit_beta;
  gamma(k) = options.start_rho;

  const Eigen::MatrixXd q = orthonormal_basis(z.z);
  auto project = [&](const Eigen::MatrixXd& g) -> Eigen::MatrixXd { return q * (q.transpose() * g); };
  auto gradient_at = [&](const Eigen::VectorXd& gm) {
    return probability_gradient(w, gm(k), gm.head(k), x);
  };

  Eigen::MatrixXd frozen_g_hat;
  if (options.freeze_gradients)
    frozen_g_hat = project(residuals_and_gradient(gradient_at(gamma), y, options.residual).g);

  auto objective = [&](const Residuals& res) { return (q.transpose() * res.r).squaredNorm(); };
  auto clamp_rho = [&](Eigen::VectorXd& gm) {
    if (std::abs(gm(k)) <= options.rho_bound) return false;
    gm(k) = std::copysign(options.rho_bound, gm(k));
    return true;
  };

  Residuals res = residuals_and_gradient(gradient_at(gamma), y, options.residual);
  double current = objective(res);
  int consecutive = 0;
  for (int it = 1; it <= options.max_iter; ++it) {
    const Eigen::MatrixXd g_hat = options.freeze_gradients ? frozen_g_hat : project(res.g);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(g_hat);
    if (qr.rank() < k + 1)
      throw Error(Errc::SingularSystem, "nl2sls: projected gradients are rank deficient");
    const Eigen::VectorXd step = qr.solve(res.r);
    if (!step.allFinite()) throw Error(Errc::SingularSystem, "nl2sls: non-finite step");
    if (step.cwiseAbs().maxCoeff() < options.tol) {
      fit.converged = true;
      break;
    }

    Eigen::VectorXd candidate = gamma + step;
    bool projected = clamp_rho(candidate);
    Residuals next = residuals_and_gradient(gradient_at(candidate), y, options.residual);
    double value = objective(next);
    if (options.line_search) {
      double scale = 1.0;
      for (int h = 0; h < 30 && !(value <= current); ++h) {
        scale *= 0.5;
        candidate = gamma + scale * step;
        projected = clamp_rho(candidate);
        next = residuals_and_gradient(gradient_at(candidate), y, options.residual);
        value = objective(next);
      }
      if (!(value <= current)) break;  // stalled: keep the current iterate
    }

    gamma = candidate;
    res = std::move(next);
    current = value;
    fit.iterations = it;
    if (projected) {
      ++fit.projections;
      if (++consecutive >= options.max_consecutive_projections)
        throw Error(Errc::StepOutOfDomain, "nl2sls: rho iterate repeatedly left (-1, 1)");
    } else {
      consecutive = 0;
    }
  }

  fit.beta = gamma.head(k);
  fit.rho = gamma(k);
  fit.rho_outside_unit = std::abs(fit.rho) >= 1.0;
  fit.objective = current;
  fit.vcov = second_stage_vcov(project(res.g), res.r, options.covariance);
  fit.se = standard_errors(fit.vcov);
  return fit;
}

}  // namespace spatial_exit
