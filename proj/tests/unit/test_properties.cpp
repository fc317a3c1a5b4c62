// Randomized invariants over many parameter sets and covariate paths.
#include "mortrisk/hazard.hpp"
#include "mortrisk/normal.hpp"
#include "mortrisk/predict.hpp"
#include "mortrisk/random.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

using namespace mortrisk;

namespace {

struct Case {
    CovariatePath path;
    std::vector<double> theta;
    LognormalBaseline baseline;
};

Case random_case(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> n_obs(1, 6), dim(1, 4);
    std::uniform_real_distribution<double> gap(0.05, 3.0), coef(-1.5, 1.5), mu(-1.0, 4.0), s2(0.05, 4.0);
    std::normal_distribution<double> z;
    const int n = n_obs(rng), p = dim(rng);
    std::vector<double> times;
    std::vector<std::vector<double>> values;
    double t = 0.0;
    for (int j = 0; j < n; ++j) {
        t += gap(rng);
        times.push_back(t);
        std::vector<double> x(p);
        for (auto& v : x) v = z(rng);
        values.push_back(std::move(x));
    }
    std::vector<double> theta(p);
    for (auto& v : theta) v = coef(rng);
    return {CovariatePath(std::move(times), std::move(values)), std::move(theta), LognormalBaseline(mu(rng), s2(rng))};
}

PosteriorSamples random_posterior(std::mt19937_64& rng, std::size_t p, std::size_t g) {
    std::uniform_real_distribution<double> coef(-1.0, 1.0), mu(0.5, 3.5), s2(0.1, 2.0);
    PosteriorSamples s;
    s.schema.assign(p, "x");
    for (std::size_t l = 0; l < g; ++l) {
        ModelParams m;
        m.baseline_default = LognormalBaseline(mu(rng), s2(rng));
        m.baseline_prepay = LognormalBaseline(mu(rng), s2(rng));
        for (std::size_t k = 0; k < p; ++k) {
            m.theta_default.push_back(coef(rng));
            m.theta_prepay.push_back(coef(rng));
        }
        s.draws.push_back(Draw{0, static_cast<int>(l), std::move(m)});
    }
    return s;
}

}  // namespace

TEST(Properties, CumulativeHazardIsNonnegativeAndMonotone) {
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> time(1e-4, 40.0);
    for (int rep = 0; rep < 300; ++rep) {
        const auto c = random_case(rng);
        double a = time(rng), b = time(rng);
        if (a > b) std::swap(a, b);
        const double la = cumulative_hazard(c.path, c.theta, c.baseline, a);
        const double lb = cumulative_hazard(c.path, c.theta, c.baseline, b);
        ASSERT_GE(la, 0.0);
        ASSERT_LE(la, lb * (1 + 1e-14)) << "a=" << a << " b=" << b;
    }
}

TEST(Properties, InversionRoundTrips) {
    std::mt19937_64 rng(202);
    std::exponential_distribution<double> target(1.0);
    for (int rep = 0; rep < 300; ++rep) {
        const auto c = random_case(rng);
        const double h = target(rng);
        const double t = invert_cumulative_hazard(c.path, c.theta, c.baseline, h);
        ASSERT_TRUE(t > 0.0);
        if (!std::isfinite(t)) continue;
        EXPECT_NEAR(cumulative_hazard(c.path, c.theta, c.baseline, t), h, 1e-8 * std::max(1.0, h));
    }
}

TEST(Properties, LoanLoglikIsFiniteAndPartial) {
    std::mt19937_64 rng(303);
    std::uniform_real_distribution<double> time(0.01, 30.0);
    for (int rep = 0; rep < 300; ++rep) {
        auto c = random_case(rng);
        ModelParams m;
        m.baseline_default = c.baseline;
        m.baseline_prepay = LognormalBaseline(c.baseline.mu() - 0.5, 0.5 * c.baseline.sigma2() + 0.1);
        m.theta_default = c.theta;
        m.theta_prepay.assign(c.theta.size(), 0.1);
        const double t = time(rng);
        const double surv = -cumulative_hazard(c.path, m.theta_default, m.baseline_default, t) -
                            cumulative_hazard(c.path, m.theta_prepay, m.baseline_prepay, t);
        const LoanObservation active("a", LoanStatus::Active, t, c.path, 40.0);
        const LoanObservation def("d", LoanStatus::Defaulted, t, c.path, 40.0);
        const LoanObservation pre("p", LoanStatus::Prepaid, t, c.path, 40.0);
        const double la = loan_loglik(active, m);
        ASSERT_TRUE(std::isfinite(la));
        EXPECT_NEAR(la, surv, 1e-10 * std::max(1.0, std::abs(surv)));
        EXPECT_NEAR(loan_loglik(def, m) - la, log_hazard(c.path, m.theta_default, m.baseline_default, t),
                    1e-9 * std::max(1.0, std::abs(la)));
        EXPECT_NEAR(loan_loglik(pre, m) - la, log_hazard(c.path, m.theta_prepay, m.baseline_prepay, t),
                    1e-9 * std::max(1.0, std::abs(la)));
    }
}

TEST(Properties, PredictiveReliabilityIsAProperSurvivalCurve) {
    std::mt19937_64 rng(404);
    for (int rep = 0; rep < 12; ++rep) {
        const auto c = random_case(rng);
        const auto posterior = random_posterior(rng, c.theta.size(), 25);
        for (auto risk : {RiskKind::Default, RiskKind::Prepay}) {
            const PredictiveLaw law(c.path, posterior, risk, 30.0);
            double prev = 1.0;
            for (double t = 1e-3; t < law.horizon(); t *= 1.3) {
                const double r = law.reliability(t);
                ASSERT_GE(r, 0.0);
                ASSERT_LE(r, prev + 1e-15) << "t = " << t;
                ASSERT_GE(law.density(t), 0.0);
                prev = r;
            }
            double last = 0.0;
            for (double u = 0.999; u > 0.001; u -= 0.0371) {
                const auto q = law.quantile(u);
                ASSERT_GE(q.t, last);
                last = q.t;
                if (!q.censored) EXPECT_NEAR(law.reliability(q.t), u, 1e-6);
            }
        }
    }
}

TEST(Properties, ClassificationIsADistribution) {
    std::mt19937_64 rng(505);
    for (int rep = 0; rep < 8; ++rep) {
        const auto c = random_case(rng);
        const auto posterior = random_posterior(rng, c.theta.size(), 20);
        auto stream = make_stream(99, static_cast<std::uint64_t>(rep));
        const auto cls = classify(c.path, posterior, 30.0, 2000, stream);
        EXPECT_GE(cls.p_default, 0.0);
        EXPECT_GE(cls.p_prepay, 0.0);
        EXPECT_GE(cls.p_mature, 0.0);
        EXPECT_EQ(cls.p_default + cls.p_prepay + cls.p_mature, 1.0);
        EXPECT_EQ(cls.n_default + cls.n_prepay + cls.n_mature, cls.n_sims);
    }
}

TEST(Properties, UniformOpenNeverHitsEndpoints) {
    auto rng = make_stream(7, 0);
    for (int i = 0; i < 200000; ++i) {
        const double u = uniform_open(rng);
        ASSERT_GT(u, 0.0);
        ASSERT_LT(u, 1.0);
    }
}

TEST(Properties, LogSurvivalInverseIsMonotone) {
    double prev = -std::numeric_limits<double>::infinity();
    for (double ls = -1e-12; ls > -1e4; ls *= 1.7) {
        const double z = inverse_log_normal_survival(ls);
        ASSERT_GT(z, prev);
        prev = z;
    }
}
