#pragma once

namespace mortrisk {

inline constexpr double kLogSqrtTwoPi = 0.91893853320467274178;  // log(sqrt(2*pi))

/// log of the standard normal density.
inline double log_normal_pdf(double z) noexcept { return -0.5 * z * z - kLogSqrtTwoPi; }

/// log(1 - Phi(z)) without forming 1 - Phi(z) by subtraction.
/// Relative error below 1e-12 on |z| <= 8; asymptotic series for z beyond the erfc range.
double log_normal_survival(double z) noexcept;

/// Inverse of log_normal_survival: the z with log(1 - Phi(z)) = log_survival.
/// log_survival must be <= 0; returns -inf for 0.
double inverse_log_normal_survival(double log_survival);

}  // namespace mortrisk
