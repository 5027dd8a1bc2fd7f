#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "spatial_exit/normal.hpp"
#include "spatial_exit/panel.hpp"
#include "spatial_exit/rng.hpp"
#include "spatial_exit/weights.hpp"

namespace testing {

using spatial_exit::Rng;
using spatial_exit::SpatialWeights;

inline std::filesystem::path data_dir() { return SPATIAL_EXIT_TEST_DATA; }

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void spit(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("spatial_exit_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

/// Random row-normalized inverse-distance W: points uniform on a small patch
/// of the city, block keys drawn from `keys` labels.
inline SpatialWeights random_weights(int n, int keys, Rng& rng) {
  std::vector<spatial_exit::GeoPoint> pts;
  std::vector<std::string> labels;
  for (int i = 0; i < n; ++i) {
    pts.push_back({113.9 + 0.2 * rng.uniform(), 22.5 + 0.2 * rng.uniform()});
    labels.push_back(std::to_string(rng.below(static_cast<std::uint64_t>(keys))));
  }
  return spatial_exit::build_weights_from_distances(
      labels,
      [&](Eigen::Index i, Eigen::Index j) {
        return spatial_exit::great_circle_km(pts[static_cast<std::size_t>(i)],
                                             pts[static_cast<std::size_t>(j)]);
      },
      spatial_exit::kDefaultMinDistanceKm);
}

inline Eigen::MatrixXd random_design(Eigen::Index n, Eigen::Index k, Rng& rng) {
  Eigen::MatrixXd x(n, k);
  for (Eigen::Index i = 0; i < n; ++i) {
    x(i, 0) = 1.0;
    for (Eigen::Index j = 1; j < k; ++j) x(i, j) = rng.normal();
  }
  return x;
}

inline Eigen::VectorXd random_vector(Eigen::Index n, Rng& rng, double scale = 1.0) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = scale * rng.normal();
  return v;
}

/// Brute-force probabilities from the dense reduced form, for gradient oracles.
inline Eigen::VectorXd dense_probabilities(const Eigen::MatrixXd& w, double rho,
                                           const Eigen::VectorXd& beta, const Eigen::MatrixXd& x) {
  const Eigen::Index n = w.rows();
  const Eigen::MatrixXd a_inv =
      (Eigen::MatrixXd::Identity(n, n) - rho * w).fullPivLu().inverse();
  const Eigen::MatrixXd sigma = a_inv * a_inv.transpose();
  const Eigen::VectorXd mean = a_inv * x * beta;
  Eigen::VectorXd p(n);
  for (Eigen::Index i = 0; i < n; ++i)
    p(i) = spatial_exit::normal::cdf(mean(i) / std::sqrt(sigma(i, i)));
  return p;
}

/// Central difference of a vector function of one scalar.
inline Eigen::VectorXd central_difference(const std::function<Eigen::VectorXd(double)>& f,
                                          double at, double h) {
  return (f(at + h) - f(at - h)) / (2.0 * h);
}

/// Fourth-order central difference. Its rounding error is about eps / h, so a
/// larger step than the two-point rule keeps exactly-zero derivatives near zero.
inline Eigen::VectorXd five_point_difference(const std::function<Eigen::VectorXd(double)>& f,
                                             double at, double h) {
  return (f(at - 2.0 * h) - 8.0 * f(at - h) + 8.0 * f(at + h) - f(at + 2.0 * h)) / (12.0 * h);
}

inline double max_relative_error(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                 double floor = 1e-8) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double scale = std::max(std::abs(b.data()[i]), floor);
    worst = std::max(worst, std::abs(a.data()[i] - b.data()[i]) / scale);
  }
  return worst;
}

/// Standard normal quantile by bisection on the CDF.
inline double bisect_quantile(double p) {
  double lo = -10.0, hi = 10.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (0.5 * std::erfc(-mid / std::sqrt(2.0)) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

/// Probit log-likelihood written directly from erfc, independent of the library.
inline double oracle_probit_loglik(const Eigen::VectorXd& beta, const Eigen::MatrixXd& x,
                                   const Eigen::VectorXd& y) {
  double ll = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double t = x.row(i).dot(beta);
    const double q = y(i) > 0.5 ? 1.0 : -1.0;
    ll += std::log(0.5 * std::erfc(-q * t / std::sqrt(2.0)));
  }
  return ll;
}

/// Coarse lattice over [-3, 3]^k, then a fine lattice of step `h` around the
/// coarse winner. Returns the best fine lattice point.
inline Eigen::VectorXd grid_search_probit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                          double h) {
  const Eigen::Index k = x.cols();
  auto search = [&](const Eigen::VectorXd& centre, double step, int half) {
    Eigen::VectorXd best = centre, cur(k);
    double best_ll = -std::numeric_limits<double>::infinity();
    std::vector<int> idx(static_cast<std::size_t>(k), -half);
    while (true) {
      for (Eigen::Index j = 0; j < k; ++j)
        cur(j) = centre(j) + step * idx[static_cast<std::size_t>(j)];
      const double ll = oracle_probit_loglik(cur, x, y);
      if (ll > best_ll) {
        best_ll = ll;
        best = cur;
      }
      std::size_t j = 0;
      while (j < idx.size() && ++idx[j] > half) idx[j++] = -half;
      if (j == idx.size()) break;
    }
    return best;
  };
  const Eigen::VectorXd coarse = search(Eigen::VectorXd::Zero(k), 0.1, 30);
  return search(coarse, h, static_cast<int>(std::ceil(0.15 / h)));
}

/// Small probit fixtures: 20 points with two covariates, 30 points with one,
/// 25 points with a binary and a continuous covariate.
inline void probit_fixture(int which, Eigen::MatrixXd& x, Eigen::VectorXd& y) {
  Rng rng(static_cast<std::uint64_t>(1000 + which));
  const Eigen::Index n = which == 0 ? 20 : which == 1 ? 30 : 25;
  const Eigen::Index k = which == 1 ? 2 : 3;
  x = random_design(n, k, rng);
  if (which == 2)
    for (Eigen::Index i = 0; i < n; ++i) x(i, 1) = rng.uniform() < 0.5 ? 1.0 : 0.0;
  Eigen::VectorXd beta(k);
  if (k == 2) beta << 0.3, 0.8;
  else beta << -0.2, 0.7, -0.6;
  y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) y(i) = x.row(i).dot(beta) + rng.normal() >= 0.0 ? 1.0 : 0.0;
}

}  // namespace testing
