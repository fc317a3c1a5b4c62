#include "mortrisk/diagnostics.hpp"

#include "mortrisk/errors.hpp"
#include "mortrisk/parallel.hpp"
#include "mortrisk/summary.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace mortrisk {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Reliability levels whose quantile times split the quadrature range.
constexpr double kSplitLevels[] = {1.0 - 1e-10, 1.0 - 1e-6, 0.999, 0.99, 0.9, 0.75, 0.5,
                                   0.25,        0.1,        0.01,  1e-3, 1e-6, 1e-10};

std::vector<double> split_points(const PredictiveLaw& law) {
    std::vector<double> pts;
    for (double u : kSplitLevels) {
        const auto q = law.quantile(u);
        pts.push_back(q.censored ? law.horizon() : std::min(q.t, law.horizon()));
    }
    pts.push_back(law.horizon());
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

// Integral of g(t) f(t) dt over [pts.front(), pts.back()], in s = log t.
template <class G>
double integrate(const PredictiveLaw& law, const std::vector<double>& pts, G g, double rel_tol) {
    using Rule = boost::math::quadrature::gauss_kronrod<double, 15>;
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const auto integrand = [&](double s) {
            const double t = std::exp(s);
            return g(t) * law.density(t) * t;
        };
        total += Rule::integrate(integrand, std::log(pts[i]), std::log(pts[i + 1]), 15, rel_tol);
    }
    return total;
}

QuantileSummary summarize_quantiles(std::vector<double> values) {
    QuantileSummary s;
    s.n = values.size();
    if (values.empty()) return s;
    std::sort(values.begin(), values.end());
    s.median = quantile_sorted(values, 0.5);
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    return s;
}

}  // namespace

PredictiveMoments predictive_moments(const PredictiveLaw& law, double rel_tol) {
    const double h = law.horizon();
    const double remainder = law.reliability(h);
    const auto pts = split_points(law);
    const double mean = integrate(law, pts, [](double t) { return t; }, rel_tol) + h * remainder;
    const double var =
        integrate(law, pts, [mean](double t) { return (t - mean) * (t - mean); }, rel_tol) +
        (h - mean) * (h - mean) * remainder;
    return {mean, std::sqrt(std::max(0.0, var)), remainder};
}

PredictiveLaw law_for(const LoanObservation& loan, const PosteriorSamples& samples,
                      const PredictiveOptions& options) {
    if (!loan.terminated()) {
        throw NotApplicable("loan " + loan.id() + " is active; diagnostics need an observed event");
    }
    const RiskKind risk = loan.is_event(RiskKind::Default) ? RiskKind::Default : RiskKind::Prepay;
    return PredictiveLaw(loan.covariates(), samples, risk, loan.maturity(), options);
}

double standardized_residual(const LoanObservation& loan, const PredictiveLaw& law, double rel_tol) {
    if (!loan.terminated()) throw NotApplicable("loan " + loan.id() + " is active; no residual");
    const auto m = predictive_moments(law, rel_tol);
    if (!(m.sd > 0.0)) return 0.0;
    // The moments are those of min(T, H), so the observed time is capped the same way.
    return (std::min(loan.time(), law.horizon()) - m.mean) / m.sd;
}

double standardized_residual(const LoanObservation& loan, const PosteriorSamples& samples) {
    return standardized_residual(loan, law_for(loan, samples));
}

double observed_quantile(const LoanObservation& loan, const PosteriorSamples& samples) {
    PredictiveOptions light;
    light.table_points = 2;
    return law_for(loan, samples, light).reliability(loan.time());
}

PredictionInterval prediction_interval(const PredictiveLaw& law, double level) {
    if (level >= 1.0) return {0.0, kInf};
    if (!(level > 0.0)) return {kInf, -kInf};
    const auto lo = law.quantile(0.5 * (1.0 + level));
    const auto hi = law.quantile(0.5 * (1.0 - level));
    return {lo.t, hi.censored ? kInf : hi.t};
}

DiagnosticsReport diagnose(std::span<const LoanObservation> loans, const PosteriorSamples& samples,
                           const DiagnoseOptions& options) {
    std::vector<std::size_t> index;
    for (std::size_t i = 0; i < loans.size(); ++i) {
        if (loans[i].terminated()) index.push_back(i);
    }
    DiagnosticsReport report;
    report.level = options.level;
    report.loans.resize(index.size());
    parallel_for(index.size(), options.threads, [&](std::size_t k) {
        const auto& loan = loans[index[k]];
        const auto law = law_for(loan, samples, options.predictive);
        auto& row = report.loans[k];
        row.loan_id = loan.id();
        row.category = loan.status();
        row.quantile = law.reliability(loan.time());
        row.interval = prediction_interval(law, options.level);
        row.in_interval = row.interval.contains(loan.time());
        if (options.residuals) {
            row.residual = standardized_residual(loan, law, options.moment_rel_tol);
        }
    });

    std::vector<double> q_default, q_prepay;
    for (const auto& row : report.loans) {
        const bool is_default = row.category == LoanStatus::Defaulted;
        auto& cov = is_default ? report.defaulted : report.prepaid;
        ++cov.n;
        if (row.in_interval) ++cov.hits;
        (is_default ? q_default : q_prepay).push_back(row.quantile);
    }
    report.defaulted_quantiles = summarize_quantiles(std::move(q_default));
    report.prepaid_quantiles = summarize_quantiles(std::move(q_prepay));
    return report;
}

DiagnosticsReport coverage_report(std::span<const LoanObservation> loans, const PosteriorSamples& samples,
                                  double level, unsigned threads) {
    DiagnoseOptions o;
    o.level = level;
    o.residuals = false;
    o.threads = threads;
    o.predictive.table_points = 64;
    return diagnose(loans, samples, o);
}

}  // namespace mortrisk
