#include "spatial_exit/probit.hpp"

#include <cmath>
#include <string>

#include "spatial_exit/error.hpp"
#include "spatial_exit/normal.hpp"

namespace spatial_exit {

namespace {

void check_dims(const Eigen::VectorXd& beta, const Eigen::MatrixXd& x,
                const Eigen::VectorXd& y) {
  if (x.rows() != y.size() || x.cols() != beta.size())
    throw Error(Errc::InvalidArgument, "probit: dimension mismatch");
}

double sign_of(double yi) { return yi > 0.5 ? 1.0 : -1.0; }

}  // namespace

double probit_loglik(const Eigen::VectorXd& beta, const Eigen::MatrixXd& x,
                     const Eigen::VectorXd& y) {
  check_dims(beta, x, y);
  const Eigen::VectorXd index = x * beta;
  double ll = 0.0;
  for (Eigen::Index i = 0; i < index.size(); ++i)
    ll += normal::log_cdf(sign_of(y(i)) * index(i));
  return ll;
}

Eigen::VectorXd probit_score(const Eigen::VectorXd& beta, const Eigen::MatrixXd& x,
                             const Eigen::VectorXd& y) {
  check_dims(beta, x, y);
  const Eigen::VectorXd index = x * beta;
  Eigen::VectorXd weight(index.size());
  for (Eigen::Index i = 0; i < index.size(); ++i) {
    const double q = sign_of(y(i));
    weight(i) = q * normal::mills_ratio(q * index(i));
  }
  return x.transpose() * weight;
}

Eigen::MatrixXd probit_hessian(const Eigen::VectorXd& beta, const Eigen::MatrixXd& x,
                               const Eigen::VectorXd& y) {
  check_dims(beta, x, y);
  const Eigen::VectorXd index = x * beta;
  Eigen::VectorXd curvature(index.size());
  for (Eigen::Index i = 0; i < index.size(); ++i) {
    const double qt = sign_of(y(i)) * index(i);
    const double lambda = normal::mills_ratio(qt);
    curvature(i) = lambda * (lambda + qt);
  }
  return -(x.transpose() * curvature.asDiagonal() * x);
}

Eigen::Index column_rank(const Eigen::MatrixXd& m) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(m);
  return qr.rank();
}

ProbitFit probit_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                     const ProbitOptions& options) {
  const Eigen::Index k = x.cols();
  if (x.rows() != y.size()) throw Error(Errc::InvalidArgument, "probit: dimension mismatch");
  const double ones = y.sum();
  if (ones == 0.0 || ones == static_cast<double>(y.size()))
    throw Error(Errc::AllSameOutcome, "probit: all outcomes identical");
  if (column_rank(x) < k) throw Error(Errc::RankDeficient, "probit: X is rank deficient");

  ProbitFit fit;
  fit.beta = Eigen::VectorXd::Zero(k);
  fit.loglik = probit_loglik(fit.beta, x, y);
  fit.loglik_trace.push_back(fit.loglik);

  for (int it = 1; it <= options.max_iter; ++it) {
    const Eigen::VectorXd score = probit_score(fit.beta, x, y);
    fit.max_abs_score = score.cwiseAbs().maxCoeff();
    if (fit.max_abs_score < options.score_tol) {
      fit.converged = true;
      break;
    }
    const Eigen::MatrixXd neg_hessian = -probit_hessian(fit.beta, x, y);
    const Eigen::VectorXd direction = neg_hessian.ldlt().solve(score);

    // Near the optimum the gain of a Newton step is below the rounding error
    // of the log-likelihood sum, so ascent is only required up to that noise.
    const double noise = 1e-13 * (1.0 + std::abs(fit.loglik));
    double step = 1.0;
    Eigen::VectorXd candidate = fit.beta + direction;
    double ll = probit_loglik(candidate, x, y);
    for (int h = 0; h < 40 && !(ll >= fit.loglik - noise); ++h) {
      step *= 0.5;
      candidate = fit.beta + step * direction;
      ll = probit_loglik(candidate, x, y);
    }
    if (!(ll >= fit.loglik - noise)) break;  // no ascent possible at working precision

    const double change = ll - fit.loglik;
    fit.beta = candidate;
    fit.loglik = ll;
    fit.iterations = it;
    fit.loglik_trace.push_back(ll);

    if (fit.beta.cwiseAbs().maxCoeff() > options.separation_bound)
      throw Error(Errc::PerfectSeparation,
                  "probit: coefficients diverge past " +
                      std::to_string(options.separation_bound) + " (perfect separation)");
    if (change < options.loglik_tol) {
      // Flat objective: stop only once the score confirms the optimum.
      fit.max_abs_score = probit_score(fit.beta, x, y).cwiseAbs().maxCoeff();
      if (fit.max_abs_score < options.score_tol) {
        fit.converged = true;
        break;
      }
    }
  }

  const Eigen::MatrixXd info = -probit_hessian(fit.beta, x, y);
  fit.vcov = info.ldlt().solve(Eigen::MatrixXd::Identity(k, k));
  fit.vcov = 0.5 * (fit.vcov + fit.vcov.transpose());
  return fit;
}

}  // namespace spatial_exit
