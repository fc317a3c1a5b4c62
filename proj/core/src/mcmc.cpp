#include "mortrisk/mcmc.hpp"

#include "mortrisk/errors.hpp"
#include "mortrisk/hazard.hpp"
#include "mortrisk/normal.hpp"
#include "mortrisk/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <stdexcept>

namespace mortrisk {

// ---------------------------------------------------------------------------
// Priors

void PriorSpec::validate() const {
    if (!(theta_sd > 0.0) || !(mu_sd > 0.0) || !(sigma2_shape > 0.0) || !(sigma2_rate > 0.0)) {
        throw std::invalid_argument("PriorSpec: all hyperparameters must be positive");
    }
}

double log_normal_prior(double x, double sd) noexcept {
    const double u = x / sd;
    return -0.5 * u * u - std::log(sd) - kLogSqrtTwoPi;
}

double log_inverse_gamma_prior(double x, double shape, double rate) noexcept {
    if (!(x > 0.0)) return -std::numeric_limits<double>::infinity();
    return shape * std::log(rate) - std::lgamma(shape) - (shape + 1.0) * std::log(x) - rate / x;
}

namespace {

double log_theta_prior(std::span<const double> theta, double sd) {
    double s = 0.0;
    for (double v : theta) s += log_normal_prior(v, sd);
    return s;
}

}  // namespace

double log_prior(const ModelParams& params, const PriorSpec& prior) {
    double s = log_theta_prior(params.theta_default, prior.theta_sd) +
               log_theta_prior(params.theta_prepay, prior.theta_sd);
    for (RiskKind risk : kRisks) {
        const auto& b = params.baseline(risk);
        s += log_normal_prior(b.mu(), prior.mu_sd);
        s += log_inverse_gamma_prior(b.sigma2(), prior.sigma2_shape, prior.sigma2_rate);
    }
    return s;
}

double log_posterior(const Dataset& data, const ModelParams& params, const PriorSpec& prior,
                     unsigned threads) {
    for (RiskKind risk : kRisks) {
        if (!(params.baseline(risk).sigma2() > 0.0)) {
            throw std::invalid_argument("log_posterior: sigma2 must be positive");
        }
    }
    params.validate(data.dimension());
    return total_loglik(data, params, threads) + log_prior(params, prior);
}

// ---------------------------------------------------------------------------
// Configuration

void ProposalScales::validate() const {
    for (double s : {theta_default, theta_prepay, mu_default, mu_prepay}) {
        if (!(s > 0.0) || !std::isfinite(s)) {
            throw std::invalid_argument("ProposalScales: random-walk scales must be positive");
        }
    }
    for (double a : {a_default, a_prepay}) {
        if (!(a > 0.0 && a < 1.0)) {
            throw std::invalid_argument("ProposalScales: sigma2 proposal width a must lie in (0, 1)");
        }
    }
}

std::string_view to_string(Block block) {
    switch (block) {
        case Block::ThetaDefault: return "theta_default";
        case Block::ThetaPrepay: return "theta_prepay";
        case Block::MuDefault: return "mu_default";
        case Block::MuPrepay: return "mu_prepay";
        case Block::Sigma2Default: return "sigma2_default";
        case Block::Sigma2Prepay: return "sigma2_prepay";
    }
    return "?";
}

void SamplerConfig::validate() const {
    if (n_chains < 1) throw std::invalid_argument("SamplerConfig: n_chains must be >= 1");
    if (n_iters < 1) throw std::invalid_argument("SamplerConfig: n_iters must be >= 1");
    if (burn_in < 0 || burn_in >= n_iters) {
        throw std::invalid_argument("SamplerConfig: burn_in must lie in [0, n_iters)");
    }
    if (thin < 1) throw std::invalid_argument("SamplerConfig: thin must be >= 1");
    if (draws_per_chain() < 1) {
        throw std::invalid_argument("SamplerConfig: (n_iters - burn_in) / thin must be >= 1");
    }
    if (!(target_accept_block > 0.0 && target_accept_block < 1.0) ||
        !(target_accept_scalar > 0.0 && target_accept_scalar < 1.0)) {
        throw std::invalid_argument("SamplerConfig: target acceptance rates must lie in (0, 1)");
    }
    initial_scales.validate();
}

std::vector<int> PosteriorSamples::chain_ids() const {
    std::vector<int> ids;
    for (const auto& d : draws) {
        if (ids.empty() || ids.back() != d.chain) ids.push_back(d.chain);
    }
    return ids;
}

PosteriorSamples PosteriorSamples::subsample(std::size_t stride) const {
    PosteriorSamples out;
    out.schema = schema;
    out.acceptance = acceptance;
    if (stride == 0) stride = 1;
    for (std::size_t i = 0; i < draws.size(); i += stride) out.draws.push_back(draws[i]);
    return out;
}

ModelParams default_initial_params(const Dataset& data) {
    auto median_log_time = [&](auto&& pick) {
        std::vector<double> times;
        for (const auto& loan : data.loans()) {
            if (pick(loan)) times.push_back(loan.time());
        }
        if (times.empty()) return std::optional<double>{};
        const auto mid = times.begin() + static_cast<std::ptrdiff_t>(times.size() / 2);
        std::nth_element(times.begin(), mid, times.end());
        double med = *mid;
        if (times.size() % 2 == 0) {
            med = 0.5 * (med + *std::max_element(times.begin(), mid));
        }
        return std::optional<double>{std::log(med)};
    };
    const double fallback = median_log_time([](const auto&) { return true; }).value_or(0.0);

    ModelParams params;
    params.theta_default.assign(data.dimension(), 0.0);
    params.theta_prepay.assign(data.dimension(), 0.0);
    for (RiskKind risk : kRisks) {
        const double mu =
            median_log_time([risk](const LoanObservation& l) { return l.is_event(risk); })
                .value_or(fallback);
        params.baseline(risk) = LognormalBaseline(mu, 1.0);
    }
    return params;
}

// ---------------------------------------------------------------------------
// Cached risk likelihood

// One "segment" per covariate interval a loan passes through before its observed time.
// The loan's term is  [event] (log r(t) + theta'x_last)  -  sum_seg exp(theta'x_seg) dB_seg,
// where dB_seg is the baseline integral over the segment.
struct SamplerState::RiskCache {
    std::size_t p = 0;
    std::vector<std::size_t> seg_begin;  // per loan, size n + 1
    std::vector<const double*> seg_x;
    std::vector<double> seg_log_lo;      // -inf for s_0 = 0
    std::vector<double> seg_log_hi;
    std::vector<unsigned char> event;

    std::vector<double> xb, scale, dB, logr, terms;
    double value = 0.0;

    std::vector<double> xb_s, scale_s, dB_s, logr_s, terms_s;
    double value_s = 0.0;
    enum class Staged { None, Theta, Baseline } staged = Staged::None;
    std::vector<double> theta_s;
    std::optional<LognormalBaseline> baseline_s;

    RiskCache(const Dataset& data, RiskKind risk, std::span<const double> theta,
              const LognormalBaseline& b) {
        p = data.dimension();
        const std::size_t n = data.size();
        seg_begin.reserve(n + 1);
        event.reserve(n);
        seg_begin.push_back(0);
        for (const auto& loan : data.loans()) {
            const auto& path = loan.covariates();
            const double t = loan.time();
            const std::size_t last = path.interval_of(t);
            for (std::size_t j = 0; j <= last; ++j) {
                const double lo = path.lower(j);
                const double hi = j == last ? t : path.upper(j);
                seg_x.push_back(path.value(j).data());
                seg_log_lo.push_back(lo > 0.0 ? std::log(lo) : -std::numeric_limits<double>::infinity());
                seg_log_hi.push_back(std::log(hi));
            }
            seg_begin.push_back(seg_x.size());
            event.push_back(loan.is_event(risk) ? 1 : 0);
        }
        const std::size_t segs = seg_x.size();
        xb.resize(segs);
        scale.resize(segs);
        dB.resize(segs);
        logr.resize(n);
        terms.resize(n);
        xb_s.resize(segs);
        scale_s.resize(segs);
        dB_s.resize(segs);
        logr_s.resize(n);
        terms_s.resize(n);
        compute_linear(theta, xb, scale);
        compute_baseline(b, dB, logr);
        value = compute_terms(xb, scale, dB, logr, terms);
    }

    void compute_linear(std::span<const double> theta, std::vector<double>& xb_out,
                        std::vector<double>& scale_out) const {
        for (std::size_t k = 0; k < seg_x.size(); ++k) {
            const double* x = seg_x[k];
            double s = 0.0;
            for (std::size_t c = 0; c < p; ++c) s += theta[c] * x[c];
            xb_out[k] = s;
            scale_out[k] = std::exp(s);
        }
    }

    void compute_baseline(const LognormalBaseline& b, std::vector<double>& dB_out,
                          std::vector<double>& logr_out) const {
        const double mu = b.mu();
        const double sigma = b.sigma();
        const double inv_sigma = 1.0 / sigma;
        const double log_sigma = std::log(sigma);
        const std::size_t n = event.size();
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t last = seg_begin[i + 1] - 1;
            double log_s_hi = 0.0;
            for (std::size_t k = seg_begin[i]; k <= last; ++k) {
                const double log_s_lo =
                    std::isinf(seg_log_lo[k]) ? 0.0 : log_normal_survival((seg_log_lo[k] - mu) * inv_sigma);
                log_s_hi = log_normal_survival((seg_log_hi[k] - mu) * inv_sigma);
                dB_out[k] = std::max(0.0, log_s_lo - log_s_hi);
            }
            if (event[i]) {
                const double log_t = seg_log_hi[last];
                const double z = (log_t - mu) * inv_sigma;
                logr_out[i] = log_normal_pdf(z) - log_sigma - log_t - log_s_hi;
            } else {
                logr_out[i] = 0.0;
            }
        }
    }

    double compute_terms(const std::vector<double>& xb_in, const std::vector<double>& scale_in,
                         const std::vector<double>& dB_in, const std::vector<double>& logr_in,
                         std::vector<double>& terms_out) const {
        const std::size_t n = event.size();
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t last = seg_begin[i + 1] - 1;
            double cum = 0.0;
            for (std::size_t k = seg_begin[i]; k <= last; ++k) cum += scale_in[k] * dB_in[k];
            terms_out[i] = (event[i] ? logr_in[i] + xb_in[last] : 0.0) - cum;
        }
        return pairwise_sum(terms_out);
    }

    double stage_theta(std::span<const double> theta) {
        theta_s.assign(theta.begin(), theta.end());
        compute_linear(theta, xb_s, scale_s);
        value_s = compute_terms(xb_s, scale_s, dB, logr, terms_s);
        staged = Staged::Theta;
        return value_s;
    }

    double stage_baseline(const LognormalBaseline& b) {
        baseline_s = b;
        compute_baseline(b, dB_s, logr_s);
        value_s = compute_terms(xb, scale, dB_s, logr_s, terms_s);
        staged = Staged::Baseline;
        return value_s;
    }
};

SamplerState::SamplerState(const Dataset& data, const PriorSpec& prior, ModelParams params)
    : data_(&data), prior_(prior), params_(std::move(params)) {
    prior_.validate();
    params_.validate(data.dimension());
    for (RiskKind risk : kRisks) {
        caches_[static_cast<std::size_t>(risk)] =
            std::make_unique<RiskCache>(data, risk, params_.theta(risk), params_.baseline(risk));
    }
}

SamplerState::~SamplerState() = default;
SamplerState::SamplerState(SamplerState&&) noexcept = default;
SamplerState& SamplerState::operator=(SamplerState&&) noexcept = default;

SamplerState::RiskCache& SamplerState::cache(RiskKind risk) {
    return *caches_[static_cast<std::size_t>(risk)];
}
const SamplerState::RiskCache& SamplerState::cache(RiskKind risk) const {
    return *caches_[static_cast<std::size_t>(risk)];
}

double SamplerState::risk_loglik(RiskKind risk) const { return cache(risk).value; }

double SamplerState::log_posterior() const {
    return cache(RiskKind::Default).value + cache(RiskKind::Prepay).value + log_prior(params_, prior_);
}

double SamplerState::log_ratio_theta(RiskKind risk, std::span<const double> proposal) {
    if (proposal.size() != data_->dimension()) {
        throw std::invalid_argument("log_ratio_theta: proposal length does not match schema");
    }
    auto& c = cache(risk);
    const double proposed = c.stage_theta(proposal);
    return (proposed - c.value) + log_theta_prior(proposal, prior_.theta_sd) -
           log_theta_prior(params_.theta(risk), prior_.theta_sd);
}

double SamplerState::log_ratio_mu(RiskKind risk, double proposal) {
    auto& c = cache(risk);
    const auto& current = params_.baseline(risk);
    const double proposed = c.stage_baseline(LognormalBaseline(proposal, current.sigma2()));
    return (proposed - c.value) + log_normal_prior(proposal, prior_.mu_sd) -
           log_normal_prior(current.mu(), prior_.mu_sd);
}

double SamplerState::log_ratio_sigma2(RiskKind risk, double proposal) {
    auto& c = cache(risk);
    const auto& current = params_.baseline(risk);
    const double proposed = c.stage_baseline(LognormalBaseline(current.mu(), proposal));
    return (proposed - c.value) +
           log_inverse_gamma_prior(proposal, prior_.sigma2_shape, prior_.sigma2_rate) -
           log_inverse_gamma_prior(current.sigma2(), prior_.sigma2_shape, prior_.sigma2_rate) +
           std::log(current.sigma2()) - std::log(proposal);
}

void SamplerState::commit_staged(RiskKind risk) {
    auto& c = cache(risk);
    switch (c.staged) {
        case RiskCache::Staged::None:
            return;
        case RiskCache::Staged::Theta:
            c.xb.swap(c.xb_s);
            c.scale.swap(c.scale_s);
            params_.theta(risk) = c.theta_s;
            break;
        case RiskCache::Staged::Baseline:
            c.dB.swap(c.dB_s);
            c.logr.swap(c.logr_s);
            params_.baseline(risk) = *c.baseline_s;
            break;
    }
    c.terms.swap(c.terms_s);
    c.value = c.value_s;
    c.staged = RiskCache::Staged::None;
}

// ---------------------------------------------------------------------------
// Updates

namespace {

bool metropolis_accept(double log_ratio, Rng& rng) {
    const double u = uniform_open(rng);
    return std::log(u) < log_ratio;
}

}  // namespace

bool update_theta_block(SamplerState& state, RiskKind risk, Rng& rng, const ProposalScales& scales) {
    const auto& current = state.params().theta(risk);
    std::vector<double> proposal(current.size());
    std::normal_distribution<double> normal(0.0, 1.0);
    const double s = scales.theta(risk);
    for (std::size_t k = 0; k < proposal.size(); ++k) proposal[k] = current[k] + s * normal(rng);
    const double lr = state.log_ratio_theta(risk, proposal);
    const bool accept = metropolis_accept(lr, rng);
    if (accept) state.commit_staged(risk);
    return accept;
}

bool update_mu(SamplerState& state, RiskKind risk, Rng& rng, const ProposalScales& scales) {
    std::normal_distribution<double> normal(0.0, 1.0);
    const double proposal = state.params().baseline(risk).mu() + scales.mu(risk) * normal(rng);
    const double lr = state.log_ratio_mu(risk, proposal);
    const bool accept = metropolis_accept(lr, rng);
    if (accept) state.commit_staged(risk);
    return accept;
}

bool update_sigma2(SamplerState& state, RiskKind risk, Rng& rng, const ProposalScales& scales) {
    const double a = scales.a(risk);
    const double s2 = state.params().baseline(risk).sigma2();
    const double lo = a * s2;
    const double hi = s2 / a;
    const double proposal = lo + uniform_open(rng) * (hi - lo);
    const double lr = state.log_ratio_sigma2(risk, proposal);
    const bool accept = metropolis_accept(lr, rng);
    if (accept) state.commit_staged(risk);
    return accept;
}

// ---------------------------------------------------------------------------
// Chains

namespace {

// Robbins-Monro step on the log of a scale; gain n^-0.6 vanishes with n.
void adapt_log_scale(double& scale, double gain, bool accepted, double target) {
    scale = std::exp(std::log(scale) + gain * ((accepted ? 1.0 : 0.0) - target));
}

// The sigma2 move widens as w = -log(a) grows; adapt log(w) and map back to a.
void adapt_width(double& a, double gain, bool accepted, double target) {
    double w = -std::log(a);
    w = std::clamp(std::exp(std::log(w) + gain * ((accepted ? 1.0 : 0.0) - target)), 1e-6, 7.0);
    a = std::exp(-w);
}

}  // namespace

ChainResult run_chain(const Dataset& data, const PriorSpec& prior, const SamplerConfig& config,
                      int chain_id) {
    config.validate();
    prior.validate();
    ModelParams init = config.initial_params ? *config.initial_params : default_initial_params(data);
    try {
        init.validate(data.dimension());
    } catch (const std::invalid_argument& e) {
        throw InitializationError(e.what());
    }
    SamplerState state(data, prior, std::move(init));
    if (!std::isfinite(state.log_posterior())) {
        throw InitializationError("non-finite log-posterior at the initial parameters");
    }

    Rng rng = make_stream(config.seed, static_cast<std::uint64_t>(chain_id));
    ProposalScales scales = config.initial_scales;
    ChainResult result;
    result.acceptance.chain = chain_id;
    result.draws.reserve(static_cast<std::size_t>(config.draws_per_chain()));

    for (int iter = 1; iter <= config.n_iters; ++iter) {
        const bool burning = iter <= config.burn_in;
        std::array<bool, kBlockCount> acc{};
        acc[0] = update_theta_block(state, RiskKind::Default, rng, scales);
        acc[1] = update_theta_block(state, RiskKind::Prepay, rng, scales);
        acc[2] = update_mu(state, RiskKind::Default, rng, scales);
        acc[3] = update_mu(state, RiskKind::Prepay, rng, scales);
        acc[4] = update_sigma2(state, RiskKind::Default, rng, scales);
        acc[5] = update_sigma2(state, RiskKind::Prepay, rng, scales);

        auto& stats = burning ? result.acceptance.burn_in : result.acceptance.sampling;
        for (std::size_t b = 0; b < kBlockCount; ++b) stats.record(static_cast<Block>(b), acc[b]);

        if (burning && config.adapt_during_burnin) {
            const double gain = std::pow(static_cast<double>(iter), -0.6);
            adapt_log_scale(scales.theta_default, gain, acc[0], config.target_accept_block);
            adapt_log_scale(scales.theta_prepay, gain, acc[1], config.target_accept_block);
            adapt_log_scale(scales.mu_default, gain, acc[2], config.target_accept_scalar);
            adapt_log_scale(scales.mu_prepay, gain, acc[3], config.target_accept_scalar);
            adapt_width(scales.a_default, gain, acc[4], config.target_accept_scalar);
            adapt_width(scales.a_prepay, gain, acc[5], config.target_accept_scalar);
        }
        if (!burning && (iter - config.burn_in) % config.thin == 0) {
            result.draws.push_back(Draw{chain_id, iter, state.params()});
        }
    }
    result.acceptance.final_scales = scales;
    return result;
}

PosteriorSamples run_sampler(const Dataset& data, const PriorSpec& prior, const SamplerConfig& config) {
    config.validate();
    const auto chains = static_cast<std::size_t>(config.n_chains);
    std::vector<ChainResult> results(chains);
    std::vector<std::exception_ptr> failures(chains);
    parallel_for(chains, config.threads, [&](std::size_t c) {
        try {
            results[c] = run_chain(data, prior, config, static_cast<int>(c));
        } catch (...) {
            failures[c] = std::current_exception();
        }
    });
    for (std::size_t c = 0; c < chains; ++c) {
        if (!failures[c]) continue;
        try {
            std::rethrow_exception(failures[c]);
        } catch (const InitializationError& e) {
            throw InitializationError("chain " + std::to_string(c) + ": " + e.what());
        } catch (const std::exception& e) {
            throw ChainError(static_cast<int>(c), e.what());
        }
    }

    PosteriorSamples samples;
    samples.schema = data.schema();
    samples.draws.reserve(chains * static_cast<std::size_t>(config.draws_per_chain()));
    for (auto& r : results) {
        samples.draws.insert(samples.draws.end(), std::make_move_iterator(r.draws.begin()),
                             std::make_move_iterator(r.draws.end()));
        samples.acceptance.push_back(r.acceptance);
    }
    return samples;
}

}  // namespace mortrisk
