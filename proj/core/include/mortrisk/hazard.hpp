#pragma once

#include "mortrisk/types.hpp"

#include <cstddef>
#include <span>

namespace mortrisk {

/// Lognormal failure rate r(t) = f(t) / (1 - F(t)); t > 0.
double lognormal_hazard(double t, const LognormalBaseline& b);

/// log r(t), finite for every t > 0 (no overflow in the far tails).
double log_lognormal_hazard(double t, const LognormalBaseline& b);

/// log P(T > t) for the baseline law; 0 at t = 0.
double baseline_log_survival(double t, const LognormalBaseline& b);

/// Integral of r over [t_a, t_b], in closed form through log survival terms.
double baseline_cumhaz(double t_a, double t_b, const LognormalBaseline& b);

/// Covariate vector in force at time t (piecewise-constant lookup).
std::span<const double> covariate_at(const CovariatePath& path, double t);

double linear_predictor(std::span<const double> theta, std::span<const double> x);

/// log of lambda(t | X(t)) = r(t) exp(theta' X(t)).
double log_hazard(const CovariatePath& path, std::span<const double> theta,
                  const LognormalBaseline& b, double t);

/// Integral of lambda(w | X(w)) over (0, t], summed interval by interval.
double cumulative_hazard(const CovariatePath& path, std::span<const double> theta,
                         const LognormalBaseline& b, double t);

/// The time t at which cumulative_hazard reaches `target` (>= 0); +inf when the
/// hazard never reaches it. The result is always > 0, so target 0 maps to the
/// smallest positive double.
double invert_cumulative_hazard(const CovariatePath& path, std::span<const double> theta,
                                const LognormalBaseline& b, double target);

/// Competing-risks log-likelihood contribution of one loan.
double loan_loglik(const LoanObservation& loan, const ModelParams& params);

/// Sum of loan_loglik over the dataset. Per-loan terms may be computed on up to
/// `threads` workers; they are always combined with pairwise_sum so the result does
/// not depend on the thread count.
double total_loglik(const Dataset& data, const ModelParams& params, unsigned threads = 1);

/// Pairwise summation with a fixed partition: ranges of at most kPairwiseLeaf terms
/// are summed left to right, larger ranges split at n/2 and the halves are added.
inline constexpr std::size_t kPairwiseLeaf = 32;
double pairwise_sum(std::span<const double> terms) noexcept;

}  // namespace mortrisk
