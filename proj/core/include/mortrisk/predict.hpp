#pragma once

#include "mortrisk/mcmc.hpp"
#include "mortrisk/random.hpp"
#include "mortrisk/types.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace mortrisk {

struct PredictiveOptions {
    std::size_t table_points = 256;  // log-spaced lookup grid for the inverse
    double t_min = 1e-5;             // first grid point (years)
    double horizon_factor = 10.0;    // solver horizon = horizon_factor * maturity
    double rel_tol = 1e-8;           // relative tolerance of the inverse solve

    void validate() const;
};

struct PredictiveCurve {
    std::vector<double> grid;
    std::vector<double> values;
};

struct SampledTime {
    double t;
    bool censored;  // the event lies beyond the solver horizon; t is the horizon
};

struct EventTimePair {
    SampledTime t_default;
    SampledTime t_prepay;
};

/// Posterior predictive law of one risk for one covariate path: the survival
/// function averaged over posterior draws and its density.
class PredictiveLaw {
public:
    PredictiveLaw(const CovariatePath& path, const PosteriorSamples& samples, RiskKind risk,
                  double maturity = kDefaultMaturityYears, PredictiveOptions options = {});

    /// (1/G) sum_l exp(-Lambda_l(t)); 1 for t <= 0.
    double reliability(double t) const;
    /// (1/G) sum_l lambda_l(t) exp(-Lambda_l(t)); 0 for t <= 0.
    double density(double t) const;

    /// The t with reliability(t) = u for u in (0, 1). Flagged censored (t = horizon)
    /// when u < reliability(horizon).
    SampledTime quantile(double u) const;

    /// Table cell k with grid[k-1] < quantile(u) <= grid[k]; k == 0 is (0, grid[0]],
    /// k == grid().size() means beyond the horizon.
    std::size_t cell_of(double u) const;

    RiskKind risk() const noexcept { return risk_; }
    double maturity() const noexcept { return maturity_; }
    double horizon() const noexcept { return grid_.back(); }
    double reliability_at_maturity() const noexcept { return r_maturity_; }
    std::size_t draws() const noexcept { return mu_.size(); }
    std::span<const double> grid() const noexcept { return grid_; }

private:
    double solve(double u, double lo, double hi) const;

    RiskKind risk_;
    double maturity_;
    PredictiveOptions options_;
    std::vector<double> bounds_;   // interval lower ends s_{j-1}
    std::vector<double> mu_;       // per draw
    std::vector<double> sigma_;    // per draw
    std::vector<double> scale_;    // per draw x interval: exp(theta' x_j)
    std::vector<double> log_s_lo_; // per draw x interval: baseline log survival at s_{j-1}
    std::vector<double> cum_lo_;   // per draw x interval: Lambda at s_{j-1}
    std::vector<double> grid_;
    std::vector<double> table_;    // reliability on grid_, nonincreasing
    double r_maturity_ = 1.0;
};

PredictiveCurve predictive_reliability(const CovariatePath& path, const PosteriorSamples& samples,
                                       RiskKind risk, std::span<const double> grid);

std::vector<double> predictive_density(const CovariatePath& path, const PosteriorSamples& samples,
                                       RiskKind risk, std::span<const double> grid);

/// Inverse-CDF draw: u ~ U(0, 1), then t solves reliability(t) = u.
SampledTime sample_event_time(const PredictiveLaw& law, Rng& rng);
SampledTime sample_event_time(const CovariatePath& path, const PosteriorSamples& samples, RiskKind risk,
                              Rng& rng, double maturity = kDefaultMaturityYears);

struct Classification {
    double p_default = 0.0;
    double p_prepay = 0.0;
    double p_mature = 1.0;  // 1 - (p_default + p_prepay), so the three sum to 1 exactly
    std::size_t n_default = 0;
    std::size_t n_prepay = 0;
    std::size_t n_mature = 0;
    std::size_t n_sims = 0;
};

/// Region of a sampled pair: Default if t_D < T_M and t_D <= t_P, Prepay if
/// t_P < T_M and t_P < t_D, otherwise Mature. A tie counts as Default.
enum class Outcome { Default, Prepay, Mature };
Outcome region(double t_default, double t_prepay, double maturity);

/// Monte Carlo region proportions from n_sims pairs drawn from the two
/// predictive laws, which must share one maturity. Only pairs whose times fall
/// into the same table cell are solved exactly; all other comparisons are decided
/// from the table.
Classification classify(const PredictiveLaw& default_law, const PredictiveLaw& prepay_law,
                        std::size_t n_sims, Rng& rng);
Classification classify(const CovariatePath& path, const PosteriorSamples& samples, double maturity,
                        std::size_t n_sims, Rng& rng, const PredictiveOptions& options = {});

}  // namespace mortrisk
