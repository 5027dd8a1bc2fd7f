#include <doctest.h>

#include <cmath>

#include "spatial_exit/probit.hpp"
#include "support.hpp"

using namespace spatial_exit;

namespace {

Eigen::MatrixXd intercept_only(Eigen::Index n) { return Eigen::MatrixXd::Ones(n, 1); }

Eigen::VectorXd outcomes(Eigen::Index n, Eigen::Index ones) {
  Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
  y.head(ones).setOnes();
  return y;
}

}  // namespace

TEST_CASE("loglik reference values") {
  Rng rng(1);
  const Eigen::MatrixXd x = testing::random_design(17, 3, rng);
  Eigen::VectorXd y = outcomes(17, 6);
  CHECK(probit_loglik(Eigen::VectorXd::Zero(3), x, y) == doctest::Approx(17 * std::log(0.5)));

  Eigen::MatrixXd one(1, 1);
  one << 1.2816;
  Eigen::VectorXd b(1), y1(1);
  b << 1.0;
  y1 << 1.0;
  CHECK(probit_loglik(b, one, y1) == doctest::Approx(std::log(0.9)).epsilon(1e-5));
}

TEST_CASE("loglik is permutation invariant") {
  Rng rng(2);
  const Eigen::MatrixXd x = testing::random_design(30, 3, rng);
  Eigen::VectorXd y(30);
  for (int i = 0; i < 30; ++i) y(i) = rng.uniform() < 0.4;
  const Eigen::VectorXd b = testing::random_vector(3, rng);
  Eigen::PermutationMatrix<Eigen::Dynamic> p(30);
  p.setIdentity();
  for (int i = 29; i > 0; --i) std::swap(p.indices()(i), p.indices()(static_cast<int>(rng.below(i + 1))));
  const Eigen::MatrixXd xp = p * x;
  const Eigen::VectorXd yp = p * y;
  CHECK(probit_loglik(b, xp, yp) == doctest::Approx(probit_loglik(b, x, y)).epsilon(1e-13));
}

TEST_CASE("intercept-only closed forms") {
  const auto half = probit_fit(intercept_only(40), outcomes(40, 20));
  CHECK(half.converged);
  CHECK(std::abs(half.beta(0)) < 1e-8);

  const auto quarter = probit_fit(intercept_only(40), outcomes(40, 30));
  CHECK(std::abs(quarter.beta(0) - testing::bisect_quantile(0.75)) < 1e-8);
  CHECK(quarter.beta(0) == doctest::Approx(0.6745).epsilon(1e-4));
}

TEST_CASE("fit matches a grid search of the likelihood") {
  for (int f = 0; f < 3; ++f) {
    CAPTURE(f);
    Eigen::MatrixXd x;
    Eigen::VectorXd y;
    testing::probit_fixture(f, x, y);
    const auto fit = probit_fit(x, y);
    REQUIRE(fit.converged);
    const double h = 0.005;
    const Eigen::VectorXd grid = testing::grid_search_probit(x, y, h);
    CHECK((fit.beta - grid).cwiseAbs().maxCoeff() <= h);
    CHECK(fit.loglik >= testing::oracle_probit_loglik(grid, x, y) - 1e-12);
  }
}

TEST_CASE("score and Hessian match finite differences") {
  Rng rng(3);
  for (int t = 0; t < 10; ++t) {
    const Eigen::MatrixXd x = testing::random_design(40, 4, rng);
    Eigen::VectorXd y(40);
    for (int i = 0; i < 40; ++i) y(i) = rng.uniform() < 0.5;
    const Eigen::VectorXd b = testing::random_vector(4, rng, 0.5);
    const Eigen::VectorXd score = probit_score(b, x, y);
    const Eigen::MatrixXd hess = probit_hessian(b, x, y);
    const double h = 1e-5;
    for (Eigen::Index j = 0; j < 4; ++j) {
      Eigen::VectorXd up = b, dn = b;
      up(j) += h;
      dn(j) -= h;
      const double fd = (probit_loglik(up, x, y) - probit_loglik(dn, x, y)) / (2 * h);
      CHECK(std::abs(fd - score(j)) <= 1e-6 * std::max(1.0, std::abs(score(j))));
      const Eigen::VectorXd fd_row = (probit_score(up, x, y) - probit_score(dn, x, y)) / (2 * h);
      CHECK(testing::max_relative_error(fd_row, hess.col(j), 1.0) < 1e-6);
    }
  }
}

TEST_CASE("optimum properties") {
  Rng rng(4);
  const Eigen::MatrixXd x = testing::random_design(300, 3, rng);
  Eigen::VectorXd beta(3);
  beta << 0.2, 1.0, -0.5;
  Eigen::VectorXd y(300);
  for (int i = 0; i < 300; ++i) y(i) = x.row(i).dot(beta) + rng.normal() >= 0;
  const auto fit = probit_fit(x, y);
  REQUIRE(fit.converged);
  CHECK(fit.max_abs_score < 1e-8);
  CHECK(std::abs(probit_score(fit.beta, x, y)(0)) < 1e-8);
  // Monotone up to the rounding of the likelihood sum.
  for (std::size_t i = 1; i < fit.loglik_trace.size(); ++i)
    CHECK(fit.loglik_trace[i] >= fit.loglik_trace[i - 1] - 1e-12);
  CHECK(fit.iterations < 10);
  CHECK(fit.loglik_trace.front() == doctest::Approx(300 * std::log(0.5)));
  CHECK(fit.vcov.isApprox(fit.vcov.transpose(), 1e-12));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(fit.vcov);
  CHECK(eig.eigenvalues().minCoeff() > 0.0);
  CHECK(fit.vcov.isApprox((-probit_hessian(fit.beta, x, y)).inverse(), 1e-10));
}

TEST_CASE("error cases") {
  Rng rng(5);
  const Eigen::MatrixXd x = testing::random_design(30, 2, rng);
  try {
    probit_fit(x, Eigen::VectorXd::Ones(30));
    FAIL("expected AllSameOutcome");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::AllSameOutcome);
  }

  Eigen::MatrixXd dup(30, 3);
  dup << x, x.col(1) * 2.0;
  Eigen::VectorXd y = outcomes(30, 12);
  try {
    probit_fit(dup, y);
    FAIL("expected RankDeficient");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::RankDeficient);
  }

  Eigen::VectorXd sep(30);
  for (int i = 0; i < 30; ++i) sep(i) = x(i, 1) > 0.0;
  try {
    probit_fit(x, sep);
    FAIL("expected PerfectSeparation");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::PerfectSeparation);
  }
}

TEST_CASE("column rank") {
  Eigen::MatrixXd m(4, 3);
  m << 1, 2, 3, 1, 0, 1, 1, 5, 6, 1, 1, 2;
  CHECK(column_rank(m) == 2);
  CHECK(column_rank(Eigen::MatrixXd::Identity(3, 3)) == 3);
}
