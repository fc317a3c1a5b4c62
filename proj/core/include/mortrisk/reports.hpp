#pragma once

#include "mortrisk/diagnostics.hpp"
#include "mortrisk/predict.hpp"
#include "mortrisk/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace mortrisk {

struct PortfolioOptions {
    std::size_t n_sims = 10000;
    std::uint64_t seed = 20240501;
    unsigned threads = 1;
    PredictiveOptions predictive;
};

/// classify() for every loan at its own maturity. Loan i draws from substream
/// derive_seed(seed, i), so results do not depend on the thread count.
std::vector<Classification> classify_portfolio(std::span<const LoanObservation> loans,
                                               const PosteriorSamples& samples, const PortfolioOptions& options);

/// loan_id,maturity,p_default,p_prepay,p_mature,n_default,n_prepay,n_mature,n_sims
void write_classification_csv(std::ostream& out, std::span<const LoanObservation> loans,
                              std::span<const Classification> results);

/// Log-spaced times from t_min to t_max, both included.
std::vector<double> log_grid(double t_min, double t_max, std::size_t points);

/// t,reliability_default,density_default,reliability_prepay,density_prepay
void write_curve_csv(std::ostream& out, const PredictiveLaw& default_law, const PredictiveLaw& prepay_law,
                     std::span<const double> grid);

/// loan_id,category,residual
void write_residuals_csv(std::ostream& out, const DiagnosticsReport& report);
/// loan_id,category,quantile
void write_quantiles_csv(std::ostream& out, const DiagnosticsReport& report);
/// loan_id,category,lower,upper,in_interval
void write_coverage_csv(std::ostream& out, const DiagnosticsReport& report);
/// category,n,hits,coverage,median_quantile,mean_quantile,level
void write_diagnostics_summary_csv(std::ostream& out, const DiagnosticsReport& report);

}  // namespace mortrisk
