// End-to-end acceptance checks. Prints one PASS/FAIL (or SKIP) line per criterion
// and exits nonzero when any criterion fails.
#include "mortrisk/diagnostics.hpp"
#include "mortrisk/draws_io.hpp"
#include "mortrisk/hazard.hpp"
#include "mortrisk/ingest.hpp"
#include "mortrisk/mcmc.hpp"
#include "mortrisk/predict.hpp"
#include "mortrisk/reports.hpp"
#include "mortrisk/summary.hpp"
#include "mortrisk/synth.hpp"

#include "oracles.hpp"

#include <boost/math/special_functions/erf.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

using namespace mortrisk;

namespace {

enum class Verdict { Pass, Fail, Skip };

struct Result {
    Verdict verdict;
    std::string detail;
};

unsigned worker_count() { return std::max(1u, std::thread::hardware_concurrency()); }

std::string fmt(const char* pattern, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, pattern, args...);
    return buf;
}

Result judge(bool ok, std::string detail) { return {ok ? Verdict::Pass : Verdict::Fail, std::move(detail)}; }

// Shared benchmark fit, reused by the predictive and calibration checks.
struct BenchmarkFit {
    Benchmark bench;
    PosteriorSamples samples;
    double seconds = 0.0;
};

BenchmarkFit& benchmark_fit() {
    static std::optional<BenchmarkFit> fit;
    if (!fit) {
        BenchmarkFit f{make_benchmark(BenchmarkConfig::defaults()), {}, 0.0};
        SamplerConfig cfg;  // 4 chains x 20k, burn-in 10k, thin 10
        cfg.threads = worker_count();
        const auto start = std::chrono::steady_clock::now();
        f.samples = run_sampler(f.bench.data, PriorSpec{}, cfg);
        f.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        fit = std::move(f);
    }
    return *fit;
}

Result closed_form_cumhaz() {
    const double mus[] = {-1.0, 0.0, 1.578, 2.817};
    const double sigmas[] = {0.5, 0.717, 0.963, 1.5};
    const double times[] = {0.1, 1.0, 5.0, 30.0};
    double worst = 0.0;
    for (double mu : mus) {
        for (double sigma : sigmas) {
            const LognormalBaseline b(mu, sigma * sigma);
            for (double t : times) {
                const auto hazard = [mu, sigma](double w) {
                    const double z = (std::log(w) - mu) / sigma;
                    const double pdf = std::exp(-0.5 * z * z) / (sigma * w * std::sqrt(2.0 * M_PI));
                    return pdf / (0.5 * boost::math::erfc(z / std::sqrt(2.0)));
                };
                const double ref = oracle::cumhaz_quadrature(hazard, 0.0, t, mu, sigma);
                worst = std::max(worst, std::abs(baseline_cumhaz(0.0, t, b) - ref) / ref);
            }
        }
    }
    return judge(worst <= 1e-8, fmt("max relative error %.3g over 64 grid points", worst));
}

Result likelihood_oracle() {
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> z;
    std::uniform_real_distribution<double> time(0.05, 25.0);
    double worst = 0.0;
    int two_interval = 0;
    for (int i = 0; i < 100; ++i) {
        const std::size_t p = 3;
        std::vector<double> th_d(p), th_p(p);
        for (auto& v : th_d) v = 0.4 * z(rng);
        for (auto& v : th_p) v = 0.4 * z(rng);
        const double mu_d = 2.8 + 0.3 * z(rng), sd_d = 0.9 * std::exp(0.2 * z(rng));
        const double mu_p = 1.6 + 0.3 * z(rng), sd_p = 0.7 * std::exp(0.2 * z(rng));
        auto row = [&] {
            std::vector<double> x{z(rng), z(rng), 1.0};
            return x;
        };
        oracle::Path plain;
        std::optional<CovariatePath> path;
        const double t = time(rng);
        if (i % 2 == 0) {
            const auto x = row();
            plain.values = {x};
            path = CovariatePath::constant(x);
        } else {
            // Observation times tau_1 < tau_2 around t, boundary at their midpoint.
            const double tau1 = t * std::uniform_real_distribution<double>(0.1, 0.9)(rng);
            const double tau2 = tau1 + std::uniform_real_distribution<double>(0.1, 2.0)(rng) * t;
            const auto x1 = row(), x2 = row();
            plain.bounds = {0.5 * (tau1 + tau2)};
            plain.values = {x1, x2};
            path = CovariatePath({tau1, tau2}, {x1, x2});
            if (plain.bounds[0] < t) ++two_interval;
        }
        const LoanStatus statuses[] = {LoanStatus::Defaulted, LoanStatus::Prepaid, LoanStatus::Active};
        const oracle::Status plain_status[] = {oracle::Status::Default, oracle::Status::Prepay,
                                               oracle::Status::Active};
        const int s = i % 3;
        ModelParams m;
        m.baseline_default = LognormalBaseline(mu_d, sd_d * sd_d);
        m.baseline_prepay = LognormalBaseline(mu_p, sd_p * sd_p);
        m.theta_default = th_d;
        m.theta_prepay = th_p;
        const LoanObservation loan("r" + std::to_string(i), statuses[s], t, *path, 30.0);
        const double ref = oracle::loglik(plain, plain_status[s], t, {mu_d, sd_d, th_d}, {mu_p, sd_p, th_p});
        worst = std::max(worst, std::abs(loan_loglik(loan, m) - ref));
    }
    return judge(worst <= 1e-6,
                 fmt("max abs error %.3g over 100 loans (%d cross a covariate change)", worst, two_interval));
}

Result prior_recovery() {
    // IG(12, 11) on sigma2 keeps its prior variance finite (0.1); the default IG(2, 2) has none.
    const PriorSpec prior{10.0, 10.0, 12.0, 11.0};
    const Dataset empty(benchmark_schema(3));
    SamplerConfig cfg;
    cfg.threads = worker_count();
    const auto samples = run_sampler(empty, prior, cfg);

    const double s2_mean = prior.sigma2_rate / (prior.sigma2_shape - 1.0);
    const double s2_var = s2_mean * s2_mean / (prior.sigma2_shape - 2.0);
    int checked = 0, mean_fail = 0, var_fail = 0, rhat_fail = 0;
    double worst_z = 0.0, worst_var = 0.0, worst_rhat = 0.0;
    for (const auto& acc : parameter_accessors(samples.schema)) {
        if (acc.name.rfind("sigma_", 0) == 0) continue;  // sigma itself has no stated prior
        const bool is_s2 = acc.name.rfind("sigma2_", 0) == 0;
        const bool is_mu = acc.name.rfind("mu_", 0) == 0;
        const double want_mean = is_s2 ? s2_mean : 0.0;
        const double want_var = is_s2 ? s2_var : is_mu ? prior.mu_sd * prior.mu_sd : prior.theta_sd * prior.theta_sd;
        const auto chains = chain_values(samples, acc);
        const auto sum = summarize_values(acc.name, chains);
        ++checked;
        const double se = sum.sd / std::sqrt(sum.ess.value_or(1.0));
        const double zscore = std::abs(sum.mean - want_mean) / se;
        const double rel_var = std::abs(sum.sd * sum.sd / want_var - 1.0);
        worst_z = std::max(worst_z, zscore);
        worst_var = std::max(worst_var, rel_var);
        worst_rhat = std::max(worst_rhat, sum.rhat.value_or(99.0));
        if (zscore > 3.0) ++mean_fail;
        if (rel_var > 0.10) ++var_fail;
        if (!(sum.rhat && *sum.rhat < 1.05)) ++rhat_fail;
    }
    return judge(mean_fail == 0 && var_fail == 0 && rhat_fail == 0,
                 fmt("%d parameters: worst |mean|/se %.2f, worst variance error %.1f%%, max split-Rhat %.4f",
                     checked, worst_z, 100.0 * worst_var, worst_rhat));
}

Result parameter_recovery() {
    auto& fit = benchmark_fit();
    const auto& truth = fit.bench.config.true_params;
    const auto summaries = summarize(fit.samples);
    std::map<std::string, double> want;
    const auto schema = benchmark_schema(fit.bench.config.p);
    for (std::size_t k = 0; k < schema.size(); ++k) {
        want["theta_default[" + schema[k] + "]"] = truth.theta_default[k];
        want["theta_prepay[" + schema[k] + "]"] = truth.theta_prepay[k];
    }
    want["mu_default"] = truth.baseline_default.mu();
    want["sigma_default"] = truth.baseline_default.sigma();
    want["mu_prepay"] = truth.baseline_prepay.mu();
    want["sigma_prepay"] = truth.baseline_prepay.sigma();
    int inside = 0, signs = 0, total = 0;
    std::string misses;
    for (const auto& s : summaries) {
        const auto it = want.find(s.name);
        if (it == want.end()) continue;
        ++total;
        if (s.q025 <= it->second && it->second <= s.q975) {
            ++inside;
        } else {
            misses += " " + s.name;
        }
        if ((s.median > 0) == (it->second > 0)) ++signs;
    }
    const bool fast = fit.seconds < 600.0;
    return judge(total == 12 && inside >= 11 && signs == 12 && fast,
                 fmt("%d/%d true values inside 95%% intervals, %d/%d signs correct, fit %.0f s%s%s", inside, total,
                     signs, total, fit.seconds, misses.empty() ? "" : "; outside:", misses.c_str()));
}

Result predictive_partition() {
    auto& fit = benchmark_fit();
    const auto samples = fit.samples.subsample(4);
    const auto profiles = reference_profiles(fit.bench.config.p);
    constexpr std::size_t kSims = 100000, kBrute = 1000000;
    double worst = 0.0;
    bool exact_sum = true;
    std::uniform_int_distribution<std::size_t> pick(0, samples.size() - 1);
    for (std::size_t i = 0; i < profiles.size(); ++i) {
        auto rng = make_stream(515, i);
        const auto c = classify(profiles[i], samples, kDefaultMaturityYears, kSims, rng);
        if (c.p_default + c.p_prepay + c.p_mature != 1.0) exact_sum = false;

        // Independent brute force: exact inversion per draw, no lookup table.
        auto brute_rng = make_stream(919, i);
        std::size_t n_d = 0, n_p = 0;
        for (std::size_t k = 0; k < kBrute; ++k) {
            const double td = draw_event_time(samples.draws[pick(brute_rng)].params, RiskKind::Default,
                                              profiles[i], brute_rng);
            const double tp = draw_event_time(samples.draws[pick(brute_rng)].params, RiskKind::Prepay,
                                              profiles[i], brute_rng);
            if (td < kDefaultMaturityYears && td <= tp) {
                ++n_d;
            } else if (tp < kDefaultMaturityYears && tp < td) {
                ++n_p;
            }
        }
        const double bd = static_cast<double>(n_d) / kBrute, bp = static_cast<double>(n_p) / kBrute;
        worst = std::max({worst, std::abs(c.p_default - bd), std::abs(c.p_prepay - bp),
                          std::abs(c.p_mature - (1.0 - bd - bp))});
    }
    return judge(exact_sum && worst <= 0.01,
                 fmt("six reference loans: sums exactly 1: %s, max deviation from 1e6-pair brute force %.4f",
                     exact_sum ? "yes" : "no", worst));
}

Result calibration() {
    // Each loan's time is drawn from the posterior predictive law of one risk, so
    // R(t_obs) is exactly Uniform(0, 1) under that law.
    auto& fit = benchmark_fit();
    const auto samples = fit.samples.subsample(10);
    const std::size_t p = fit.bench.config.p;
    constexpr std::size_t kLoans = 2000;
    std::vector<LoanObservation> loans;
    loans.reserve(kLoans);
    for (std::size_t i = 0; i < kLoans; ++i) {
        auto rng = make_stream(6060, i);
        const auto path = CovariatePath::constant(benchmark_covariates(p, rng));
        const auto& params = samples.draws[std::uniform_int_distribution<std::size_t>(0, samples.size() - 1)(rng)].params;
        const RiskKind risk = i % 2 == 0 ? RiskKind::Default : RiskKind::Prepay;
        const double t = draw_event_time(params, risk, path, rng);
        loans.emplace_back("c" + std::to_string(i), risk == RiskKind::Default ? LoanStatus::Defaulted : LoanStatus::Prepaid,
                           t, path, kDefaultMaturityYears);
    }
    const auto report = coverage_report(loans, samples, 0.95, worker_count());
    std::vector<double> u;
    std::size_t hits = 0;
    for (const auto& d : report.loans) {
        u.push_back(d.quantile);
        hits += d.in_interval ? 1 : 0;
    }
    const double ks = oracle::ks_statistic(u, [](double x) { return std::clamp(x, 0.0, 1.0); });
    const double crit = oracle::ks_critical_1pct(u.size());
    const double rate = static_cast<double>(hits) / static_cast<double>(u.size());
    return judge(ks < crit && std::abs(rate - 0.95) <= 0.02,
                 fmt("KS D = %.4f (1%% critical %.4f), coverage %.4f over %zu loans", ks, crit, rate, u.size()));
}

Result imbalance() {
    auto cfg = BenchmarkConfig::defaults();
    cfg.n_loans = 3000;
    cfg.seed = 16;
    cfg.true_params.baseline_default = LognormalBaseline(4.5, 0.81);
    const auto bench = make_benchmark(cfg);
    const auto counts = bench.data.counts();
    SamplerConfig sc;
    sc.n_chains = 2;
    sc.n_iters = 10000;
    sc.burn_in = 5000;
    sc.threads = worker_count();
    const auto samples = run_sampler(bench.data, PriorSpec{}, sc).subsample(2);
    const auto report = coverage_report(bench.data.loans(), samples, 0.95, worker_count());
    const auto d = report.defaulted.rate(), pr = report.prepaid.rate();
    const double share = static_cast<double>(counts.defaulted) / static_cast<double>(counts.total());
    return judge(d && pr && *d < *pr,
                 fmt("defaults %.2f%% of cohort; coverage default %.3f (n=%zu) vs prepay %.3f (n=%zu)",
                     100.0 * share, d.value_or(NAN), report.defaulted.n, pr.value_or(NAN), report.prepaid.n));
}

std::string determinism_run(unsigned threads) {
    auto cfg = BenchmarkConfig::defaults();
    cfg.n_loans = 400;
    cfg.seed = 88;
    const auto bench = make_benchmark(cfg);
    SamplerConfig sc;
    sc.n_chains = 4;
    sc.n_iters = 3000;
    sc.burn_in = 1000;
    sc.threads = threads;
    const auto samples = run_sampler(bench.data, PriorSpec{}, sc);
    std::ostringstream out;
    write_draws(out, samples);
    write_summary_csv(out, summarize(samples));
    write_acceptance_csv(out, samples.acceptance);

    const auto thin = samples.subsample(5);
    const std::span<const LoanObservation> loans(bench.data.loans().data(), 120);
    DiagnoseOptions opt;
    opt.threads = threads;
    const auto report = diagnose(loans, thin, opt);
    write_residuals_csv(out, report);
    write_quantiles_csv(out, report);
    write_coverage_csv(out, report);
    write_diagnostics_summary_csv(out, report);

    PortfolioOptions po;
    po.n_sims = 2000;
    po.threads = threads;
    const auto cls = classify_portfolio(loans.first(24), thin, po);
    write_classification_csv(out, loans.first(24), cls);
    return out.str();
}

Result determinism() {
    const auto ref = determinism_run(1);
    bool same = true;
    for (unsigned t : {4u, 8u}) same = same && determinism_run(t) == ref;
    return judge(same, fmt("draws, summary, diagnostics and classification reports (%zu bytes) %s across 1, 4, 8 threads",
                           ref.size(), same ? "identical" : "differ"));
}

Result freddie_sample() {
    const char* dir = std::getenv("MORTRISK_FREDDIE_DIR");
    if (!dir || !*dir) return {Verdict::Skip, "MORTRISK_FREDDIE_DIR not set"};
    namespace fs = std::filesystem;
    const fs::path orig = fs::path(dir) / "sample_orig_1999.txt";
    const fs::path svcg = fs::path(dir) / "sample_svcg_1999.txt";
    if (!fs::exists(orig) || !fs::exists(svcg)) {
        return {Verdict::Fail, "expected sample_orig_1999.txt and sample_svcg_1999.txt in " + std::string(dir)};
    }
    std::ifstream o(orig), s(svcg);
    const auto result = ingest(o, s, IngestSchema::freddie_mac());
    std::size_t routed = 0;
    bool reasons = true;
    for (const auto& r : result.rejects) {
        if (r.source != "performance") ++routed;
        reasons = reasons && !r.reason.empty();
    }
    const bool accounted = routed + result.data.size() == result.origination_lines;

    SamplerConfig sc;
    sc.threads = worker_count();
    const auto samples = run_sampler(result.data, PriorSpec{}, sc);
    // Prepay medians as reported for the 1999 fit; categorical levels without a
    // one-to-one column in this encoding are not compared.
    const std::map<std::string, int> sign{
        {"credit_score", +1}, {"mi_percent", +1},          {"num_units", -1},        {"dti", +1},
        {"upb", +1},          {"orig_interest_rate", +1},  {"num_borrowers", +1},    {"intercept", +1},
        {"first_time_buyer", -1}, {"property_state:judicial", -1}};
    int matched = 0, compared = 0;
    for (const auto& sum : summarize(samples)) {
        for (const auto& [name, want] : sign) {
            if (sum.name != "theta_prepay[" + name + "]") continue;
            ++compared;
            if ((sum.median > 0 ? 1 : -1) == want) ++matched;
        }
    }
    return judge(accounted && reasons && compared == static_cast<int>(sign.size()) && matched == compared,
                 fmt("%zu loans, %zu routed to rejects, all accounted: %s; prepay signs %d/%d", result.data.size(),
                     routed, accounted ? "yes" : "no", matched, compared));
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        std::function<Result()> run;
        double budget_seconds;
    };
    const std::vector<Criterion> criteria{
        {1, "closed-form cumulative hazard vs quadrature", closed_form_cumhaz, 5.0},
        {2, "likelihood vs piecewise-quadrature oracle", likelihood_oracle, 30.0},
        {3, "prior recovery on an empty dataset", prior_recovery, 120.0},
        {4, "synthetic parameter recovery", parameter_recovery, 0.0},
        {5, "predictive partition vs brute force", predictive_partition, 0.0},
        {6, "calibration of observed quantiles", calibration, 0.0},
        {7, "coverage imbalance with rare defaults", imbalance, 0.0},
        {8, "determinism across thread counts", determinism, 0.0},
        {9, "Freddie Mac 1999 sample", freddie_sample, 0.0},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Result out;
        try {
            out = c.run();
        } catch (const std::exception& e) {
            out = {Verdict::Fail, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (out.verdict != Verdict::Skip && c.budget_seconds > 0.0 && secs > c.budget_seconds) {
            out.verdict = Verdict::Fail;
            out.detail += fmt("; exceeded %.0f s budget", c.budget_seconds);
        }
        const char* tag = out.verdict == Verdict::Pass ? "PASS" : out.verdict == Verdict::Fail ? "FAIL" : "SKIP";
        std::printf("%s criterion %d (%s): %s [%.1f s]\n", tag, c.id, c.name, out.detail.c_str(), secs);
        std::fflush(stdout);
        if (out.verdict == Verdict::Fail) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
