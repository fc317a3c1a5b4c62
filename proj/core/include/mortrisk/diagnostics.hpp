#pragma once

#include "mortrisk/mcmc.hpp"
#include "mortrisk/predict.hpp"
#include "mortrisk/types.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mortrisk {

/// Moments of the predictive event time truncated at the solver horizon H:
/// mean and sd of min(T, H). `remainder` is R(H), the mass the truncation moves to H.
struct PredictiveMoments {
    double mean;
    double sd;
    double remainder;
};

/// Adaptive Gauss-Kronrod quadrature of the predictive density in log-time,
/// split at quantiles of the law, to relative tolerance `rel_tol`.
PredictiveMoments predictive_moments(const PredictiveLaw& law, double rel_tol = 1e-6);

/// The predictive law of the risk that terminated `loan`; NotApplicable for active loans.
PredictiveLaw law_for(const LoanObservation& loan, const PosteriorSamples& samples,
                      const PredictiveOptions& options = {});

/// (min(t_obs, H) - E[min(T, H)]) / sd(min(T, H)) under the loan's own predictive law.
double standardized_residual(const LoanObservation& loan, const PosteriorSamples& samples);
double standardized_residual(const LoanObservation& loan, const PredictiveLaw& law, double rel_tol = 1e-6);

/// Reliability of the matching risk at the observed time.
double observed_quantile(const LoanObservation& loan, const PosteriorSamples& samples);

/// Central `level` predictive interval [lower, upper]; upper is +inf when it lies
/// beyond the solver horizon. level >= 1 gives [0, inf]; level <= 0 an empty interval.
struct PredictionInterval {
    double lower;
    double upper;
    bool contains(double t) const noexcept { return lower <= t && t <= upper; }
};
PredictionInterval prediction_interval(const PredictiveLaw& law, double level);

struct LoanDiagnostic {
    std::string loan_id;
    LoanStatus category;
    std::optional<double> residual;  // absent unless residuals were requested
    double quantile;
    bool in_interval;
    PredictionInterval interval;
};

struct CategoryCoverage {
    std::size_t n = 0;
    std::size_t hits = 0;
    std::optional<double> rate() const {
        if (n == 0) return std::nullopt;
        return static_cast<double>(hits) / static_cast<double>(n);
    }
};

struct QuantileSummary {
    std::size_t n = 0;
    std::optional<double> median;
    std::optional<double> mean;
};

struct DiagnosticsReport {
    double level;
    std::vector<LoanDiagnostic> loans;  // terminated loans, input order
    CategoryCoverage defaulted;
    CategoryCoverage prepaid;
    QuantileSummary defaulted_quantiles;
    QuantileSummary prepaid_quantiles;
};

struct DiagnoseOptions {
    double level = 0.95;
    bool residuals = true;
    unsigned threads = 1;
    PredictiveOptions predictive;
    double moment_rel_tol = 1e-6;
};

/// Per-loan quantile, interval hit and (optionally) residual for every terminated
/// loan, aggregated by category. Active loans are skipped.
DiagnosticsReport diagnose(std::span<const LoanObservation> loans, const PosteriorSamples& samples,
                           const DiagnoseOptions& options = {});

/// diagnose() without residuals.
DiagnosticsReport coverage_report(std::span<const LoanObservation> loans, const PosteriorSamples& samples,
                                  double level = 0.95, unsigned threads = 1);

}  // namespace mortrisk
