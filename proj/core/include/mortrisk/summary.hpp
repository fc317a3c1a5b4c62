#pragma once

#include "mortrisk/mcmc.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mortrisk {

/// Sample quantile with linear interpolation between order statistics
/// (h = (n - 1) p, the "type 7" rule). `sorted` must be ascending and nonempty.
double quantile_sorted(std::span<const double> sorted, double p);

/// Split-chain potential scale reduction. Each chain is cut in half and the
/// between/within variance ratio is taken over the halves. nullopt when fewer
/// than 2 chains, fewer than 10 draws per chain, or zero within-chain variance.
std::optional<double> split_rhat(const std::vector<std::vector<double>>& chains);

/// Effective sample size from split chains, with Geyer's initial monotone
/// sequence truncation of the combined autocorrelations. nullopt when fewer than
/// 10 draws per chain or zero variance.
std::optional<double> effective_sample_size(const std::vector<std::vector<double>>& chains);

struct ParameterSummary {
    std::string name;
    double mean = 0.0;
    double sd = 0.0;
    double median = 0.0;
    double q025 = 0.0;
    double q975 = 0.0;
    std::optional<double> rhat;
    std::optional<double> ess;
};

/// Named scalar views of a draw, in report order: theta_default[...], theta_prepay[...],
/// then mu_default, sigma2_default, sigma_default, mu_prepay, sigma2_prepay, sigma_prepay.
struct ParameterAccessor {
    std::string name;
    std::function<double(const ModelParams&)> get;
};
std::vector<ParameterAccessor> parameter_accessors(const std::vector<std::string>& schema);

/// Draws of one parameter split by chain (chain order as in the samples).
std::vector<std::vector<double>> chain_values(const PosteriorSamples& samples,
                                              const ParameterAccessor& accessor);

ParameterSummary summarize_values(std::string name, const std::vector<std::vector<double>>& chains);
std::vector<ParameterSummary> summarize(const PosteriorSamples& samples);

}  // namespace mortrisk
