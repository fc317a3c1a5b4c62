#include "mortrisk/hazard.hpp"

#include "mortrisk/normal.hpp"
#include "mortrisk/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace mortrisk {
namespace {

void require_positive_time(double t, const char* where) {
    if (!(t > 0.0)) {
        throw std::invalid_argument(std::string(where) + ": t must be positive");
    }
}

// log P(T > t) with sigma precomputed.
double log_survival_at(double t, double mu, double sigma) noexcept {
    if (t <= 0.0) return 0.0;
    return log_normal_survival((std::log(t) - mu) / sigma);
}

double pairwise_range(const double* terms, std::size_t n) noexcept {
    if (n <= kPairwiseLeaf) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += terms[i];
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_range(terms, half) + pairwise_range(terms + half, n - half);
}

}  // namespace

double log_lognormal_hazard(double t, const LognormalBaseline& b) {
    require_positive_time(t, "log_lognormal_hazard");
    const double sigma = b.sigma();
    const double z = (std::log(t) - b.mu()) / sigma;
    return log_normal_pdf(z) - std::log(sigma * t) - log_normal_survival(z);
}

double lognormal_hazard(double t, const LognormalBaseline& b) {
    return std::exp(log_lognormal_hazard(t, b));
}

double baseline_log_survival(double t, const LognormalBaseline& b) {
    if (t < 0.0) throw std::invalid_argument("baseline_log_survival: t must be >= 0");
    return log_survival_at(t, b.mu(), b.sigma());
}

double baseline_cumhaz(double t_a, double t_b, const LognormalBaseline& b) {
    if (!(t_a >= 0.0)) throw std::invalid_argument("baseline_cumhaz: t_a must be >= 0");
    if (!(t_a <= t_b)) throw std::invalid_argument("baseline_cumhaz: requires t_a <= t_b");
    if (t_a == t_b) return 0.0;
    const double sigma = b.sigma();
    const double upper = log_survival_at(t_b, b.mu(), sigma);
    const double lower = log_survival_at(t_a, b.mu(), sigma);
    return std::max(0.0, lower - upper);
}

std::span<const double> covariate_at(const CovariatePath& path, double t) {
    return path.value(path.interval_of(t));
}

double linear_predictor(std::span<const double> theta, std::span<const double> x) {
    if (theta.size() != x.size()) {
        throw std::invalid_argument("linear_predictor: theta and covariate lengths differ");
    }
    return std::inner_product(theta.begin(), theta.end(), x.begin(), 0.0);
}

double log_hazard(const CovariatePath& path, std::span<const double> theta,
                  const LognormalBaseline& b, double t) {
    return log_lognormal_hazard(t, b) + linear_predictor(theta, covariate_at(path, t));
}

double cumulative_hazard(const CovariatePath& path, std::span<const double> theta,
                         const LognormalBaseline& b, double t) {
    require_positive_time(t, "cumulative_hazard");
    const double sigma = b.sigma();
    const std::size_t last = path.interval_of(t);
    double total = 0.0;
    double log_s_lower = 0.0;  // log survival at s_0 = 0
    for (std::size_t j = 0; j <= last; ++j) {
        const double hi = j == last ? t : path.upper(j);
        const double log_s_upper = log_survival_at(hi, b.mu(), sigma);
        const double segment = std::max(0.0, log_s_lower - log_s_upper);
        total += std::exp(linear_predictor(theta, path.value(j))) * segment;
        log_s_lower = log_s_upper;
    }
    return total;
}

double invert_cumulative_hazard(const CovariatePath& path, std::span<const double> theta,
                                const LognormalBaseline& b, double target) {
    if (!(target >= 0.0)) throw std::invalid_argument("invert_cumulative_hazard: target must be >= 0");
    const double sigma = b.sigma();
    double acc = 0.0;
    for (std::size_t j = 0; j < path.intervals(); ++j) {
        const double scale = std::exp(linear_predictor(theta, path.value(j)));
        const double lo = path.lower(j);
        const double hi = path.upper(j);
        const double log_s_lo = log_survival_at(lo, b.mu(), sigma);
        const double log_s_hi = std::isinf(hi) ? -std::numeric_limits<double>::infinity()
                                               : log_survival_at(hi, b.mu(), sigma);
        const double segment = scale * (log_s_lo - log_s_hi);
        if (scale > 0.0 && acc + segment >= target) {
            // Solve log S(t) = log S(lo) - (target - acc) / scale inside (lo, hi].
            const double log_s_t = std::min(0.0, log_s_lo - (target - acc) / scale);
            const double z = inverse_log_normal_survival(log_s_t);
            const double t = std::exp(b.mu() + sigma * z);
            return std::clamp(t, std::nextafter(lo, hi), hi);
        }
        acc += segment;
    }
    return std::numeric_limits<double>::infinity();
}

double loan_loglik(const LoanObservation& loan, const ModelParams& params) {
    const auto& path = loan.covariates();
    if (path.dimension() != params.theta_default.size() ||
        path.dimension() != params.theta_prepay.size()) {
        throw std::invalid_argument("loan_loglik: covariate length does not match theta for loan " +
                                    loan.id());
    }
    const double t = loan.time();
    double value = -cumulative_hazard(path, params.theta_default, params.baseline_default, t) -
                   cumulative_hazard(path, params.theta_prepay, params.baseline_prepay, t);
    for (RiskKind risk : kRisks) {
        if (loan.is_event(risk)) {
            value += log_hazard(path, params.theta(risk), params.baseline(risk), t);
        }
    }
    return value;
}

double total_loglik(const Dataset& data, const ModelParams& params, unsigned threads) {
    std::vector<double> terms(data.size());
    parallel_for(data.size(), threads,
                 [&](std::size_t i) { terms[i] = loan_loglik(data.loans()[i], params); });
    return pairwise_sum(terms);
}

double pairwise_sum(std::span<const double> terms) noexcept {
    return pairwise_range(terms.data(), terms.size());
}

}  // namespace mortrisk
