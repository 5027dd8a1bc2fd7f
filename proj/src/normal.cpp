#include "spatial_exit/normal.hpp"

#include <cmath>

namespace spatial_exit::normal {

namespace {
constexpr double kLogSqrt2Pi = 0.91893853320467274178;
constexpr double kSqrt1_2 = 0.70710678118654752440;
// Below this, erfc(-t/sqrt2) is close to underflow; switch to the asymptotic series.
constexpr double kAsymptoticCut = -37.0;
}  // namespace

double pdf(double t) noexcept { return kInvSqrt2Pi * std::exp(-0.5 * t * t); }

double log_pdf(double t) noexcept { return -kLogSqrt2Pi - 0.5 * t * t; }

double cdf(double t) noexcept { return 0.5 * std::erfc(-t * kSqrt1_2); }

double log_cdf(double t) noexcept {
  if (t > 0.0) return std::log1p(-0.5 * std::erfc(t * kSqrt1_2));
  if (t > kAsymptoticCut) return std::log(0.5 * std::erfc(-t * kSqrt1_2));
  // Phi(t) ~ phi(t)/(-t) * (1 - 1/t^2 + 3/t^4 - 15/t^6 + 105/t^8)
  const double inv2 = 1.0 / (t * t);
  const double series =
      1.0 - inv2 * (1.0 - 3.0 * inv2 * (1.0 - 5.0 * inv2 * (1.0 - 7.0 * inv2)));
  return log_pdf(t) - std::log(-t) + std::log(series);
}

double mills_ratio(double t) noexcept {
  if (t > -5.0) return pdf(t) / cdf(t);
  return std::exp(log_pdf(t) - log_cdf(t));
}

}  // namespace spatial_exit::normal
