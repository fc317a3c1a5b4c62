#pragma once

#include "mortrisk/random.hpp"
#include "mortrisk/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace mortrisk {

/// One latent event time for `risk`, drawn exactly by inverting the
/// covariate-adjusted cumulative hazard at an Exp(1) target.
double draw_event_time(const ModelParams& params, RiskKind risk, const CovariatePath& path, Rng& rng);

/// Competing-risks draw: t_D and t_P independently, the loan records the first
/// of them if it precedes min(maturity, censor_time), otherwise it is active there.
/// A tie between t_D and t_P is recorded as a default.
LoanObservation simulate_loan(const ModelParams& params, const CovariatePath& path, double maturity,
                              Rng& rng, double censor_time = std::numeric_limits<double>::infinity(),
                              std::string id = "sim");

inline constexpr const char* kInterceptName = "intercept";

/// Benchmark covariates: p - 1 independent N(0, 1) columns x1..x{p-1}, the intercept,
/// then one Bernoulli(1/2) indicator "flag". Coefficient vectors have length p + 1.
struct BenchmarkConfig {
    std::size_t n_loans = 2000;
    std::size_t p = 3;
    ModelParams true_params;
    double censor_time = 15.0;
    double maturity = kDefaultMaturityYears;
    std::uint64_t seed = 7;

    /// n = 2000, p = 3, mu_D = 2.8, sigma_D = 0.9, mu_P = 1.6, sigma_P = 0.7,
    /// theta_D = (-0.6, 0.4, 0.5, -0.3), theta_P = (0.3, -0.2, -0.5, 0.25); censoring at 15 years.
    static BenchmarkConfig defaults();
    void validate() const;
};

std::vector<std::string> benchmark_schema(std::size_t p);

/// Covariate vector in benchmark schema order from the random columns.
std::vector<double> benchmark_covariates(std::size_t p, Rng& rng);

struct Benchmark {
    Dataset data;
    BenchmarkConfig config;
};

/// Loan i uses its own substream derive_seed(seed, i), so the dataset is
/// reproducible and independent of generation order.
Benchmark make_benchmark(const BenchmarkConfig& config);

/// Six fixed covariate profiles used as reference loans for the benchmark schema.
std::vector<CovariatePath> reference_profiles(std::size_t p);

void write_truth_json(std::ostream& out, const BenchmarkConfig& config);
BenchmarkConfig read_truth_json(std::istream& in);

}  // namespace mortrisk
