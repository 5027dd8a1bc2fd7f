#pragma once

#include <Eigen/Dense>

#include <vector>

namespace spatial_exit {

struct ProbitOptions {
  int max_iter = 100;
  double score_tol = 1e-8;
  double loglik_tol = 1e-12;
  /// |beta_j| beyond this is treated as divergence (perfect separation).
  double separation_bound = 50.0;
};

struct ProbitFit {
  Eigen::VectorXd beta;
  Eigen::MatrixXd vcov;  // inverse negative Hessian at the optimum
  double loglik = 0.0;
  int iterations = 0;
  bool converged = false;  // implies max |score| < score_tol
  double max_abs_score = 0.0;
  std::vector<double> loglik_trace;  // one entry per accepted iterate, starting at beta = 0
};

double probit_loglik(const Eigen::VectorXd& beta, const Eigen::MatrixXd& x,
                     const Eigen::VectorXd& y);
Eigen::VectorXd probit_score(const Eigen::VectorXd& beta, const Eigen::MatrixXd& x,
                             const Eigen::VectorXd& y);
Eigen::MatrixXd probit_hessian(const Eigen::VectorXd& beta, const Eigen::MatrixXd& x,
                               const Eigen::VectorXd& y);

/// Newton-Raphson with step halving.
/// Throws AllSameOutcome, RankDeficient, or PerfectSeparation.
ProbitFit probit_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                     const ProbitOptions& options = {});

/// Numerical column rank via column-pivoting QR.
Eigen::Index column_rank(const Eigen::MatrixXd& m);

}  // namespace spatial_exit
