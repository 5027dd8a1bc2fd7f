#pragma once

namespace spatial_exit::normal {

inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;

double pdf(double t) noexcept;
double log_pdf(double t) noexcept;
double cdf(double t) noexcept;

/// ln Phi(t), accurate far into the lower tail where Phi itself underflows.
double log_cdf(double t) noexcept;

/// phi(t) / Phi(t), the inverse Mills ratio. Finite for every finite t.
double mills_ratio(double t) noexcept;

}  // namespace spatial_exit::normal
