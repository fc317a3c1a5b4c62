#pragma once

#include "mortrisk/random.hpp"
#include "mortrisk/types.hpp"

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mortrisk {

/// Independent N(0, theta_sd^2) on every regression coefficient, N(0, mu_sd^2) on
/// mu_D and mu_P, Inverse-Gamma(sigma2_shape, sigma2_rate) on sigma2_D and sigma2_P.
struct PriorSpec {
    double theta_sd = 10.0;
    double mu_sd = 10.0;
    double sigma2_shape = 2.0;
    double sigma2_rate = 2.0;

    void validate() const;
};

double log_normal_prior(double x, double sd) noexcept;
double log_inverse_gamma_prior(double x, double shape, double rate) noexcept;
double log_prior(const ModelParams& params, const PriorSpec& prior);

/// total_loglik + log_prior. Throws std::invalid_argument on a nonpositive sigma2.
double log_posterior(const Dataset& data, const ModelParams& params, const PriorSpec& prior,
                     unsigned threads = 1);

/// Random-walk scales. theta and mu moves are Gaussian with these standard deviations;
/// a sigma2 move draws uniformly on (a * sigma2, sigma2 / a).
struct ProposalScales {
    double theta_default = 0.05;
    double theta_prepay = 0.05;
    double mu_default = 0.1;
    double mu_prepay = 0.1;
    double a_default = 0.9;
    double a_prepay = 0.9;

    double theta(RiskKind r) const { return r == RiskKind::Default ? theta_default : theta_prepay; }
    double mu(RiskKind r) const { return r == RiskKind::Default ? mu_default : mu_prepay; }
    double a(RiskKind r) const { return r == RiskKind::Default ? a_default : a_prepay; }
    double& theta(RiskKind r) { return r == RiskKind::Default ? theta_default : theta_prepay; }
    double& mu(RiskKind r) { return r == RiskKind::Default ? mu_default : mu_prepay; }
    double& a(RiskKind r) { return r == RiskKind::Default ? a_default : a_prepay; }

    void validate() const;
};

/// Sweep order of the six Metropolis-within-Gibbs blocks.
enum class Block : std::size_t {
    ThetaDefault = 0,
    ThetaPrepay,
    MuDefault,
    MuPrepay,
    Sigma2Default,
    Sigma2Prepay,
};
inline constexpr std::size_t kBlockCount = 6;
std::string_view to_string(Block block);

struct AcceptanceStats {
    std::array<std::uint64_t, kBlockCount> proposed{};
    std::array<std::uint64_t, kBlockCount> accepted{};

    void record(Block b, bool accept) {
        ++proposed[static_cast<std::size_t>(b)];
        if (accept) ++accepted[static_cast<std::size_t>(b)];
    }
    double rate(Block b) const {
        const auto i = static_cast<std::size_t>(b);
        return proposed[i] == 0 ? 0.0 : static_cast<double>(accepted[i]) / proposed[i];
    }
};

struct SamplerConfig {
    int n_chains = 4;
    int n_iters = 20000;
    int burn_in = 10000;
    int thin = 10;
    std::uint64_t seed = 20240501;
    bool adapt_during_burnin = true;
    double target_accept_block = 0.25;   // theta blocks
    double target_accept_scalar = 0.4;   // mu and sigma2
    unsigned threads = 1;                // chain-level workers; never changes the draws
    ProposalScales initial_scales{};
    std::optional<ModelParams> initial_params;

    void validate() const;
    int draws_per_chain() const { return (n_iters - burn_in) / thin; }
};

struct Draw {
    int chain = 0;
    int iteration = 0;
    ModelParams params;
};

struct ChainAcceptance {
    int chain = 0;
    AcceptanceStats burn_in;
    AcceptanceStats sampling;
    ProposalScales final_scales;
};

struct ChainResult {
    std::vector<Draw> draws;
    ChainAcceptance acceptance;
};

struct PosteriorSamples {
    std::vector<std::string> schema;
    std::vector<Draw> draws;                    // grouped by chain, then iteration
    std::vector<ChainAcceptance> acceptance;    // empty when loaded from a draws file

    bool empty() const noexcept { return draws.empty(); }
    std::size_t size() const noexcept { return draws.size(); }
    std::vector<int> chain_ids() const;
    /// Every `stride`-th draw; used to trade predictive resolution for speed.
    PosteriorSamples subsample(std::size_t stride) const;
};

/// Starting point: theta = 0, mu = log(median observed time of that risk's events),
/// sigma2 = 1. Falls back to all observed times, then to mu = 0.
ModelParams default_initial_params(const Dataset& data);

/// Sampler state with per-risk cached likelihood pieces. Proposals for one risk
/// only touch that risk's cache; the other risk's terms cancel in every ratio.
class SamplerState {
public:
    SamplerState(const Dataset& data, const PriorSpec& prior, ModelParams params);
    ~SamplerState();
    SamplerState(SamplerState&&) noexcept;
    SamplerState& operator=(SamplerState&&) noexcept;

    const ModelParams& params() const noexcept { return params_; }
    const PriorSpec& prior() const noexcept { return prior_; }

    /// Risk-specific log-likelihood: sum over that risk's events of log lambda(t_i)
    /// minus the cumulative hazard of every loan at its observed time.
    double risk_loglik(RiskKind risk) const;
    double log_posterior() const;

    /// log of the Metropolis-Hastings ratio for replacing one block with `proposal`.
    /// These stage the proposal; commit_staged(risk) makes it current.
    double log_ratio_theta(RiskKind risk, std::span<const double> proposal);
    double log_ratio_mu(RiskKind risk, double proposal);
    /// Includes the sigma2 / sigma2* Hastings factor of the multiplicative-uniform move.
    double log_ratio_sigma2(RiskKind risk, double proposal);
    void commit_staged(RiskKind risk);

private:
    struct RiskCache;
    RiskCache& cache(RiskKind risk);
    const RiskCache& cache(RiskKind risk) const;

    const Dataset* data_;
    PriorSpec prior_;
    ModelParams params_;
    std::array<std::unique_ptr<RiskCache>, 2> caches_;
};

bool update_theta_block(SamplerState& state, RiskKind risk, Rng& rng, const ProposalScales& scales);
bool update_mu(SamplerState& state, RiskKind risk, Rng& rng, const ProposalScales& scales);
bool update_sigma2(SamplerState& state, RiskKind risk, Rng& rng, const ProposalScales& scales);

/// One chain of n_iters sweeps in the order theta_D, theta_P, mu_D, mu_P, sigma2_D, sigma2_P.
/// Proposal scales adapt (Robbins-Monro on log scale) only during burn-in.
ChainResult run_chain(const Dataset& data, const PriorSpec& prior, const SamplerConfig& config,
                      int chain_id);

/// n_chains independent chains, chain c seeded with derive_seed(seed, c).
PosteriorSamples run_sampler(const Dataset& data, const PriorSpec& prior, const SamplerConfig& config);

}  // namespace mortrisk
