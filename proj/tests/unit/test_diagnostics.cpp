#include "mortrisk/diagnostics.hpp"
#include "mortrisk/errors.hpp"
#include "mortrisk/synth.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace mortrisk;

namespace {

PosteriorSamples baseline_samples(std::vector<std::pair<double, double>> mu_s2_default, double mu_p = 1.0,
                                  double s2_p = 0.5) {
    PosteriorSamples s;
    s.schema = {"intercept"};
    int i = 0;
    for (auto [mu, s2] : mu_s2_default) {
        ModelParams m;
        m.baseline_default = LognormalBaseline(mu, s2);
        m.baseline_prepay = LognormalBaseline(mu_p, s2_p);
        m.theta_default = {0.0};
        m.theta_prepay = {0.0};
        s.draws.push_back(Draw{0, ++i, m});
    }
    return s;
}

PosteriorSamples benchmark_like_posterior(std::size_t g, std::uint64_t seed) {
    const auto truth = BenchmarkConfig::defaults().true_params;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z;
    PosteriorSamples s;
    s.schema = benchmark_schema(3);
    for (std::size_t l = 0; l < g; ++l) {
        ModelParams m = truth;
        m.baseline_default = LognormalBaseline(2.8 + 0.05 * z(rng), 0.81 * std::exp(0.05 * z(rng)));
        m.baseline_prepay = LognormalBaseline(1.6 + 0.05 * z(rng), 0.49 * std::exp(0.05 * z(rng)));
        for (auto& v : m.theta_default) v += 0.05 * z(rng);
        for (auto& v : m.theta_prepay) v += 0.05 * z(rng);
        s.draws.push_back(Draw{0, static_cast<int>(l + 1), m});
    }
    return s;
}

LoanObservation defaulted(double t, std::vector<double> x = {1.0}) {
    return LoanObservation("d", LoanStatus::Defaulted, t, CovariatePath::constant(std::move(x)));
}

}  // namespace

TEST(StandardizedResidual, ZeroAtTheLognormalMean) {
    const auto s = baseline_samples({{0.0, 1.0}});
    EXPECT_NEAR(standardized_residual(defaulted(std::exp(0.5)), s), 0.0, 1e-6);
}

TEST(StandardizedResidual, MatchesTruncatedLognormalMoments) {
    // Partial moments of a lognormal below H: E[T^k; T < H] = e^{k mu + k^2 s2 / 2} Phi((log H - mu - k s2) / s).
    const double mu = 0.0, s2 = 1.0, h = 300.0;
    const auto s = baseline_samples({{mu, s2}});
    auto partial = [&](int k) {
        return std::exp(k * mu + 0.5 * k * k * s2) * oracle::normal_cdf((std::log(h) - mu - k * s2) / std::sqrt(s2));
    };
    const double tail = 1.0 - oracle::normal_cdf((std::log(h) - mu) / std::sqrt(s2));
    const double m1 = partial(1) + h * tail;
    const double m2 = partial(2) + h * h * tail;
    const double sd = std::sqrt(m2 - m1 * m1);
    for (double t : {0.3, 1.0, 5.0, 40.0}) {
        EXPECT_NEAR(standardized_residual(defaulted(t), s), (t - m1) / sd, 1e-6) << t;
    }
    EXPECT_NEAR(standardized_residual(defaulted(1000.0), s), (h - m1) / sd, 1e-6);
}

TEST(StandardizedResidual, DegenerateLawGivesZero) {
    const double t = 4.0;
    const auto s = baseline_samples({{std::log(t), 1e-10}});
    EXPECT_NEAR(standardized_residual(defaulted(t), s), 0.0, 1e-3);
}

TEST(StandardizedResidual, ScaleEquivariance) {
    const std::vector<std::pair<double, double>> base{{1.0, 0.3}, {1.2, 0.4}, {0.8, 0.25}};
    const double c = 0.4;
    std::vector<std::pair<double, double>> shifted;
    for (auto [m, s2] : base) shifted.emplace_back(m + c, s2);
    for (double t : {0.7, 2.5, 6.0}) {
        const double r0 = standardized_residual(defaulted(t), baseline_samples(base));
        const double r1 = standardized_residual(defaulted(t * std::exp(c)), baseline_samples(shifted));
        EXPECT_NEAR(r0, r1, 1e-5) << t;
    }
}

TEST(StandardizedResidual, ActiveLoanIsNotApplicable) {
    const auto s = baseline_samples({{0.0, 1.0}});
    const LoanObservation active("a", LoanStatus::Active, 2.0, CovariatePath::constant({1.0}));
    EXPECT_THROW(standardized_residual(active, s), NotApplicable);
    EXPECT_THROW(observed_quantile(active, s), NotApplicable);
    EXPECT_THROW(law_for(active, s), NotApplicable);
}

TEST(PredictiveMoments, MatchIntegratedReliability) {
    const auto s = benchmark_like_posterior(40, 1);
    const auto path = CovariatePath::constant({0.5, -1.0, 1.0, 1.0});
    for (RiskKind r : kRisks) {
        const PredictiveLaw law(path, s, r, 30.0);
        const auto mom = predictive_moments(law);
        const double h = law.horizon();
        // E min(T, H) = int_0^H R, E min(T, H)^2 = int_0^H 2 t R.
        auto integrate_log = [&](auto&& g) {
            double total = 0.0;
            const double lo = std::log(1e-9), hi = std::log(h);
            for (int k = 0; k < 32; ++k)
                total += oracle::integrate([&](double u) { return g(std::exp(u)) * std::exp(u); },
                                           lo + (hi - lo) * k / 32, lo + (hi - lo) * (k + 1) / 32, 1e-11);
            return total;
        };
        const double m1 = integrate_log([&](double t) { return law.reliability(t); });
        const double m2 = integrate_log([&](double t) { return 2.0 * t * law.reliability(t); });
        EXPECT_NEAR(mom.mean, m1, 1e-6 * m1);
        EXPECT_NEAR(mom.sd, std::sqrt(m2 - m1 * m1), 1e-5 * mom.sd);
        EXPECT_DOUBLE_EQ(mom.remainder, law.reliability(h));
    }
}

TEST(ObservedQuantile, BoundedAndDecreasing) {
    const auto s = benchmark_like_posterior(20, 2);
    const std::vector<double> x{0.3, 0.1, 1.0, 0.0};
    EXPECT_NEAR(observed_quantile(LoanObservation("p", LoanStatus::Prepaid, 1e-9, CovariatePath::constant(x)), s),
                1.0, 1e-12);
    double prev = 1.0;
    for (double t = 0.01; t < 500.0; t *= 1.4) {
        const double q = observed_quantile(LoanObservation("p", LoanStatus::Prepaid, t, CovariatePath::constant(x)), s);
        ASSERT_GE(q, 0.0);
        ASSERT_LE(q, prev);
        prev = q;
    }
}

TEST(PredictionInterval, LevelsAtTheEnds) {
    const auto s = baseline_samples({{1.0, 0.5}});
    const PredictiveLaw law(CovariatePath::constant({1.0}), s, RiskKind::Default);
    const auto all = prediction_interval(law, 1.0);
    EXPECT_EQ(all.lower, 0.0);
    EXPECT_TRUE(std::isinf(all.upper));
    const auto none = prediction_interval(law, 0.0);
    EXPECT_FALSE(none.contains(std::exp(1.0)));
    const auto mid = prediction_interval(law, 0.9);
    EXPECT_NEAR(std::log(mid.lower), 1.0 - 1.6448536269514722 * std::sqrt(0.5), 1e-7);
    EXPECT_NEAR(std::log(mid.upper), 1.0 + 1.6448536269514722 * std::sqrt(0.5), 1e-7);
}

TEST(PredictionInterval, UpperBeyondHorizonIsUnbounded) {
    const auto s = baseline_samples({{6.0, 1.0}});
    const PredictiveLaw law(CovariatePath::constant({1.0}), s, RiskKind::Default, 30.0);
    const auto pi = prediction_interval(law, 0.95);
    EXPECT_TRUE(std::isinf(pi.upper));
    EXPECT_GT(pi.lower, 0.0);
}

TEST(CoverageReport, ExtremeLevels) {
    const auto s = benchmark_like_posterior(10, 3);
    auto cfg = BenchmarkConfig::defaults();
    cfg.n_loans = 200;
    const auto data = make_benchmark(cfg).data;
    const auto& loans = data.loans();
    const auto full = coverage_report(loans, s, 1.0);
    EXPECT_EQ(full.defaulted.hits, full.defaulted.n);
    EXPECT_EQ(full.prepaid.hits, full.prepaid.n);
    const auto zero = coverage_report(loans, s, 0.0);
    EXPECT_EQ(zero.defaulted.hits + zero.prepaid.hits, 0u);
    const auto counts = data.counts();
    EXPECT_EQ(full.defaulted.n, counts.defaulted);
    EXPECT_EQ(full.prepaid.n, counts.prepaid);
    EXPECT_EQ(full.loans.size(), counts.defaulted + counts.prepaid);
    EXPECT_FALSE(CategoryCoverage{}.rate());
}

TEST(Diagnose, ThreadCountDoesNotChangeTheReport) {
    const auto s = benchmark_like_posterior(15, 4);
    auto cfg = BenchmarkConfig::defaults();
    cfg.n_loans = 120;
    const auto data = make_benchmark(cfg).data;
    DiagnoseOptions o;
    const auto one = diagnose(data.loans(), s, o);
    o.threads = 4;
    const auto four = diagnose(data.loans(), s, o);
    ASSERT_EQ(one.loans.size(), four.loans.size());
    for (std::size_t i = 0; i < one.loans.size(); ++i) {
        EXPECT_EQ(one.loans[i].loan_id, four.loans[i].loan_id);
        EXPECT_EQ(one.loans[i].residual, four.loans[i].residual);
        EXPECT_EQ(one.loans[i].quantile, four.loans[i].quantile);
        EXPECT_EQ(one.loans[i].in_interval, four.loans[i].in_interval);
    }
    EXPECT_EQ(one.defaulted_quantiles.median, four.defaulted_quantiles.median);
}

TEST(Calibration, SelfSimulatedCohortIsUniformAndCovered) {
    // Each loan draws a posterior draw and an uncensored event time of one risk, so its
    // observed time follows that risk's predictive law exactly.
    const auto s = benchmark_like_posterior(60, 5);
    const auto profiles = reference_profiles(3);
    Rng rng(6);
    std::vector<LoanObservation> loans;
    for (int i = 0; i < 1200; ++i) {
        const auto& path = profiles[static_cast<std::size_t>(i) % profiles.size()];
        const auto& m = s.draws[rng() % s.size()].params;
        const RiskKind risk = i % 2 == 0 ? RiskKind::Default : RiskKind::Prepay;
        const double t = draw_event_time(m, risk, path, rng);
        loans.emplace_back("c" + std::to_string(i), risk == RiskKind::Default ? LoanStatus::Defaulted : LoanStatus::Prepaid,
                           t, path);
    }
    DiagnoseOptions o;
    o.predictive.table_points = 64;
    const auto rep = diagnose(loans, s, o);
    std::vector<double> q;
    double residual_sum = 0.0;
    for (const auto& d : rep.loans) {
        q.push_back(d.quantile);
        residual_sum += *d.residual;
    }
    const double ks = oracle::ks_statistic(q, [](double u) { return std::clamp(u, 0.0, 1.0); });
    EXPECT_LT(ks, oracle::ks_critical_1pct(q.size()));
    EXPECT_NEAR(residual_sum / static_cast<double>(q.size()), 0.0, 0.1);
    EXPECT_NEAR(*rep.defaulted.rate(), 0.95, 0.025);
    EXPECT_NEAR(*rep.prepaid.rate(), 0.95, 0.025);
}
