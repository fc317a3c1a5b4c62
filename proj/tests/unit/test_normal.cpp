#include "mortrisk/normal.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using mortrisk::inverse_log_normal_survival;
using mortrisk::log_normal_survival;

TEST(LogNormalSurvival, AtZeroIsLogHalf) {
    EXPECT_NEAR(log_normal_survival(0.0), -0.6931471806, 1e-10);
    EXPECT_DOUBLE_EQ(log_normal_survival(0.0), std::log(0.5));
}

TEST(LogNormalSurvival, FarLeftTailIsZero) {
    EXPECT_NEAR(log_normal_survival(-40.0), 0.0, 1e-12);
    EXPECT_NEAR(log_normal_survival(-8.0), -6.22096057427178e-16, 1e-20);
}

TEST(LogNormalSurvival, AtThreeMatchesHighPrecision) {
    const double ref = oracle::log_normal_survival(3.0);
    EXPECT_NEAR(ref, -6.6077, 1e-4);
    EXPECT_NEAR(log_normal_survival(3.0), ref, 1e-13 * std::abs(ref));
}

TEST(LogNormalSurvival, RelativeErrorBelow1e12OnCentralRange) {
    for (double z = -8.0; z <= 8.0; z += 0.0625) {
        const double ref = oracle::log_normal_survival(z);
        EXPECT_LE(std::abs(log_normal_survival(z) - ref), 1e-12 * std::abs(ref)) << "z = " << z;
    }
}

TEST(LogNormalSurvival, AccurateThroughAsymptoticRange) {
    for (double z = 8.0; z <= 40.0; z += 0.25) {
        const double ref = oracle::log_normal_survival(z);
        EXPECT_LE(std::abs(log_normal_survival(z) - ref), 1e-13 * std::abs(ref)) << "z = " << z;
    }
    for (double z : {24.999, 25.0, 25.001}) {
        const double ref = oracle::log_normal_survival(z);
        EXPECT_LE(std::abs(log_normal_survival(z) - ref), 1e-13 * std::abs(ref)) << "z = " << z;
    }
}

TEST(LogNormalSurvival, MonotoneNonincreasing) {
    double prev = log_normal_survival(-45.0);
    for (double z = -45.0; z <= 45.0; z += 0.001) {
        const double v = log_normal_survival(z);
        ASSERT_LE(v, prev) << "z = " << z;
        prev = v;
    }
}

TEST(LogNormalSurvival, FiniteForLargeArguments) {
    EXPECT_TRUE(std::isfinite(log_normal_survival(1e6)));
    EXPECT_TRUE(std::isfinite(log_normal_survival(1e150)));
    EXPECT_EQ(log_normal_survival(-1e6), 0.0);
}

TEST(InverseLogNormalSurvival, RoundTrips) {
    for (double z = -8.0; z <= 38.0; z += 0.37) {
        const double ls = log_normal_survival(z);
        EXPECT_NEAR(inverse_log_normal_survival(ls), z, 1e-9 * std::max(1.0, std::abs(z))) << "z = " << z;
    }
}

TEST(InverseLogNormalSurvival, Limits) {
    EXPECT_EQ(inverse_log_normal_survival(0.0), -std::numeric_limits<double>::infinity());
    EXPECT_NEAR(inverse_log_normal_survival(std::log(0.5)), 0.0, 1e-14);
    EXPECT_THROW(inverse_log_normal_survival(0.1), std::invalid_argument);
}
