#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spatial_exit/probit.hpp"
#include "spatial_exit/weights.hpp"

namespace spatial_exit {

/// Block-wise LU factorization of (I - rho W).
///
/// W is block diagonal over its connected components, so every solve is a
/// set of small dense solves. Throws SingularSystem if any block is
/// numerically singular.
class LagOperator {
 public:
  LagOperator(const SpatialWeights& w, double rho);

  double rho() const noexcept { return rho_; }
  Eigen::Index size() const noexcept { return n_; }

  /// (I - rho W)^{-1} rhs
  Eigen::MatrixXd solve(const Eigen::MatrixXd& rhs) const;
  /// (I - rho W) v
  Eigen::MatrixXd apply(const Eigen::MatrixXd& v) const;

  std::size_t block_count() const noexcept { return blocks_.size(); }
  const std::vector<Eigen::Index>& block_indices(std::size_t b) const { return blocks_[b].index; }
  const Eigen::MatrixXd& block_weights(std::size_t b) const { return blocks_[b].w; }
  /// (I - rho W_b)^{-1}
  Eigen::MatrixXd block_inverse(std::size_t b) const;

 private:
  struct Block {
    std::vector<Eigen::Index> index;
    Eigen::MatrixXd w;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu;
  };
  const SpatialWeights* weights_;
  double rho_;
  Eigen::Index n_;
  std::vector<Block> blocks_;
};

/// Solved-out model: Y* = X* beta + u, u ~ N(0, Sigma).
struct ReducedForm {
  double rho = 0.0;
  Eigen::MatrixXd x_star;  // (I - rho W)^{-1} X
  std::vector<std::vector<Eigen::Index>> blocks;
  std::vector<Eigen::MatrixXd> sigma_blocks;  // [(I - rho W)'(I - rho W)]^{-1} per block
  Eigen::VectorXd sigma_diag_sqrt;            // sigma_i

  Eigen::MatrixXd sigma_dense() const;
};

ReducedForm reduced_form(const SpatialWeights& w, double rho, const Eigen::MatrixXd& x);

struct LatentSample {
  Eigen::VectorXd y_star;
  Eigen::VectorXd y;  // 1 iff y_star >= 0
  Eigen::VectorXd eps;
  std::uint64_t seed = 0;
  double rho = 0.0;
  Eigen::VectorXd beta;
  double sigma_eps = 1.0;
};

/// Draws eps ~ N(0, sigma_eps^2 I) and solves (I - rho W) Y* = X beta + eps.
LatentSample simulate_latent(const SpatialWeights& w, double rho, const Eigen::VectorXd& beta,
                             const Eigen::MatrixXd& x, double sigma_eps, std::uint64_t seed);

/// Same with caller-supplied errors (seed recorded as 0).
LatentSample simulate_latent_with_errors(const SpatialWeights& w, double rho,
                                         const Eigen::VectorXd& beta, const Eigen::MatrixXd& x,
                                         const Eigen::VectorXd& eps);

/// x*_i' beta / sigma_i
Eigen::VectorXd latent_index(const ReducedForm& rf, const Eigen::VectorXd& beta);

/// P(y_i = 1) = Phi(x*_i' beta / sigma_i)
Eigen::VectorXd heteroskedastic_probabilities(const ReducedForm& rf, const Eigen::VectorXd& beta);

/// (y - P) phi / [P (1 - P)] from probabilities.
/// Throws ProbabilityUnderflow when some P is not strictly inside (0, 1).
Eigen::VectorXd generalized_residuals(const Eigen::VectorXd& p, const Eigen::VectorXd& y);

/// Same residual evaluated from the index t = Phi^{-1}(P) through the inverse
/// Mills ratio; finite for every finite t.
Eigen::VectorXd generalized_residuals_from_index(const Eigen::VectorXd& index,
                                                 const Eigen::VectorXd& y);

struct InstrumentMatrix {
  Eigen::MatrixXd z;
  std::string construction;
  Eigen::Index rank = 0;
  double condition_number = 0.0;
};

/// Z = [X, W X_{-0}]: X plus spatial lags of every non-intercept column.
/// Throws RankDeficient.
InstrumentMatrix build_instruments(const Eigen::MatrixXd& x, const SpatialWeights& w);

/// m = (1/n) Z' e with e the generalized residuals under (beta, rho).
Eigen::VectorXd moment_conditions(const Eigen::VectorXd& beta, double rho,
                                  const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                  const SpatialWeights& w, const InstrumentMatrix& z);

/// Probabilities and their derivatives with respect to (beta, rho).
struct ProbabilityGradient {
  Eigen::VectorXd index;   // x*_i' beta / sigma_i
  Eigen::VectorXd p;
  Eigen::MatrixXd g_beta;  // n x k, d P / d beta
  Eigen::VectorXd g_rho;   // n,     d P / d rho
  Eigen::MatrixXd t_beta;  // d index / d beta
  Eigen::VectorXd t_rho;   // d index / d rho
};

/// Exact derivatives through the reduced form at any rho.
///
/// With A = I - rho W, B = A^{-1} W, a = A^{-1} X beta and Sigma = A^{-1} A^{-T}:
///   d a / d rho = B a,  d Sigma_ii / d rho = 2 (B Sigma)_ii,
/// so d t_i / d rho = (B a)_i / sigma_i - a_i (B Sigma)_ii / sigma_i^3.
ProbabilityGradient probability_gradient(const SpatialWeights& w, double rho,
                                         const Eigen::VectorXd& beta, const Eigen::MatrixXd& x);

/// Closed form at rho = 0: G_beta = phi(x'b) x and G_rho = phi(x'b) (W X b).
/// The sigma term drops out because d Sigma_ii / d rho = 2 W_ii = 0 there.
ProbabilityGradient linearized_gradient(const SpatialWeights& w, const Eigen::VectorXd& beta,
                                        const Eigen::MatrixXd& x);

/// Residual used by the GMM steps.
///  Raw:         u = y - P, whose negative Jacobian is G = dP/dGamma.
///  Generalized: e = (y - P) phi / [P (1 - P)], whose negative Jacobian is
///               lambda(qt) (lambda(qt) + qt) dt/dGamma with q = 2y - 1.
enum class ResidualKind { Raw, Generalized };
enum class CovarianceKind { Classic, Robust };
enum class Estimator { LinearizedGMM, NL2SLS };

std::string_view to_string(ResidualKind kind) noexcept;
std::string_view to_string(CovarianceKind kind) noexcept;
std::string_view to_string(Estimator estimator) noexcept;

struct SpatialFit {
  Estimator method = Estimator::LinearizedGMM;
  double rho = 0.0;
  Eigen::VectorXd beta;
  Eigen::VectorXd se;    // beta entries then rho
  Eigen::MatrixXd vcov;  // same ordering
  Eigen::VectorXd probit_beta;  // standard probit starting point
  int iterations = 0;
  bool converged = false;
  bool rho_outside_unit = false;  // |rho| >= 1: flagged, never corrected
  int projections = 0;            // NL2SLS iterates pulled back into [-0.99, 0.99]
  double objective = 0.0;         // e' P_Z e at the estimate (NL2SLS)
  ResidualKind residual = ResidualKind::Raw;
  CovarianceKind covariance = CovarianceKind::Robust;
  std::string instruments;
  double instrument_condition = 0.0;

  double rho_se() const { return se(se.size() - 1); }
};

struct LinearizedOptions {
  ResidualKind residual = ResidualKind::Raw;
  CovarianceKind covariance = CovarianceKind::Robust;
  ProbitOptions probit;
};

/// One-step GMM around the standard probit solution at rho = 0.
///
/// Regresses the gradients on Z, then regresses u0 + G_beta b0 on the fitted
/// gradients. Throws DegenerateRhoGradient when G_rho carries no information
/// beyond G_beta (e.g. W = 0), plus any probit error.
SpatialFit linearized_gmm_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                              const SpatialWeights& w, const LinearizedOptions& options = {});

struct Nl2slsOptions {
  std::optional<Eigen::VectorXd> start_beta;  // default: probit estimate
  double start_rho = 0.0;
  int max_iter = 50;
  double tol = 1e-6;
  ResidualKind residual = ResidualKind::Generalized;
  CovarianceKind covariance = CovarianceKind::Robust;
  bool freeze_gradients = false;  // keep the gradients from the start point
  /// Halve the step until the objective e' P_Z e does not increase. Off, every
  /// iterate is the plain update.
  bool line_search = true;
  double rho_bound = 0.99;
  int max_consecutive_projections = 5;
  ProbitOptions probit;
};

/// Iterated Gauss-Newton for nonlinear 2SLS:
///   Gamma_1 = Gamma_0 + (G^' G^)^{-1} G^' e_0,  G^ = P_Z G.
/// Stops when the proposed step is below `tol` in max norm; the current iterate
/// is then kept. Hitting max_iter, or a line search that cannot reduce the
/// objective, returns the last iterate with converged = false.
/// Throws StepOutOfDomain after too many consecutive projections.
SpatialFit nl2sls_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                      const SpatialWeights& w, const InstrumentMatrix& z,
                      const Nl2slsOptions& options = {});

}  // namespace spatial_exit
