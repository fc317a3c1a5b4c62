#include "mortrisk/normal.hpp"

#include <boost/math/special_functions/erf.hpp>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace mortrisk {
namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kSqrt2 = 1.41421356237309504880;
constexpr double kLogHalf = -0.69314718055994530942;

// Beyond this point erfc(z / sqrt 2) approaches the subnormal range and the
// Mills-ratio series is already accurate to well below 1e-14 relative.
constexpr double kAsymptoticFrom = 25.0;

// 1 - Phi(z) = phi(z)/z * (1 - 1/z^2 + 3/z^4 - 15/z^6 + 105/z^8 - 945/z^10 + ...)
double mills_series(double z) noexcept {
    const double w = 1.0 / (z * z);
    return 1.0 + w * (-1.0 + w * (3.0 + w * (-15.0 + w * (105.0 + w * (-945.0 + w * 10395.0)))));
}

double asymptotic_log_survival(double z) noexcept {
    return log_normal_pdf(z) - std::log(z) + std::log(mills_series(z));
}

double d_log_survival(double z) noexcept {
    // d/dz log(1 - Phi(z)) = -phi(z) / (1 - Phi(z)); far out the two logs are huge
    // and nearly equal, so use the Mills ratio directly.
    if (z >= kAsymptoticFrom) return -z / mills_series(z);
    return -std::exp(log_normal_pdf(z) - log_normal_survival(z));
}

}  // namespace

double log_normal_survival(double z) noexcept {
    if (std::isnan(z)) return z;
    if (z < 0.0) {
        // Phi(z) = erfc(-z / sqrt 2) / 2 is the small term here.
        return std::log1p(-0.5 * std::erfc(-z * kInvSqrt2));
    }
    if (z < kAsymptoticFrom) {
        return std::log(0.5 * std::erfc(z * kInvSqrt2));
    }
    if (std::isinf(z)) return -std::numeric_limits<double>::infinity();
    return asymptotic_log_survival(z);
}

double inverse_log_normal_survival(double log_survival) {
    if (std::isnan(log_survival) || log_survival > 0.0) {
        throw std::invalid_argument("inverse_log_normal_survival: argument must be <= 0");
    }
    if (log_survival == 0.0) return -std::numeric_limits<double>::infinity();
    if (std::isinf(log_survival)) return std::numeric_limits<double>::infinity();

    double z;
    if (log_survival > kLogHalf) {
        // survival above 1/2: invert the lower tail Phi(z) = -expm1(log_survival)
        const double lower = -std::expm1(log_survival);
        z = -kSqrt2 * boost::math::erfc_inv(2.0 * lower);
    } else if (log_survival > -700.0) {
        z = kSqrt2 * boost::math::erfc_inv(2.0 * std::exp(log_survival));
    } else {
        // Leading-order tail inversion, refined by Newton below.
        const double a = -2.0 * log_survival;
        z = std::sqrt(a - std::log(a * 2.0 * M_PI));
    }
    // Newton polish in log space; the derivative underflows only deep in the
    // lower tail where the erfc_inv estimate is already exact to rounding.
    for (int k = 0; k < 3; ++k) {
        const double slope = d_log_survival(z);
        if (slope == 0.0 || !std::isfinite(slope)) break;
        const double step = (log_normal_survival(z) - log_survival) / slope;
        z -= step;
        if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(z))) break;
    }
    return z;
}

}  // namespace mortrisk
