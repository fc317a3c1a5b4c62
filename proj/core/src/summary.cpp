#include "mortrisk/summary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace mortrisk {
namespace {

constexpr std::size_t kMinDrawsPerChain = 10;

double mean_of(std::span<const double> v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double variance_of(std::span<const double> v, double m) {
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size() - 1);
}

bool constant_draws(const std::vector<std::vector<double>>& chains) {
    const double* first = nullptr;
    for (const auto& c : chains) {
        for (const double& x : c) {
            if (!first) first = &x;
            else if (x != *first) return false;
        }
    }
    return true;
}

// Halves of every chain, truncated to a common even length.
std::optional<std::vector<std::vector<double>>> split_chains(
    const std::vector<std::vector<double>>& chains) {
    if (chains.empty() || constant_draws(chains)) return std::nullopt;
    std::size_t n = chains.front().size();
    for (const auto& c : chains) n = std::min(n, c.size());
    if (n < kMinDrawsPerChain) return std::nullopt;
    const std::size_t half = n / 2;
    std::vector<std::vector<double>> out;
    out.reserve(2 * chains.size());
    for (const auto& c : chains) {
        out.emplace_back(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(half));
        out.emplace_back(c.begin() + static_cast<std::ptrdiff_t>(n - half),
                         c.begin() + static_cast<std::ptrdiff_t>(n));
    }
    return out;
}

struct VarianceParts {
    double within = 0.0;
    double between_over_n = 0.0;
    double var_plus = 0.0;
};

VarianceParts variance_parts(const std::vector<std::vector<double>>& halves) {
    const double n = static_cast<double>(halves.front().size());
    std::vector<double> means, vars;
    for (const auto& h : halves) {
        means.push_back(mean_of(h));
        vars.push_back(variance_of(h, means.back()));
    }
    VarianceParts parts;
    parts.within = mean_of(vars);
    const double grand = mean_of(means);
    double b = 0.0;
    for (double m : means) b += (m - grand) * (m - grand);
    parts.between_over_n = b / static_cast<double>(means.size() - 1);
    parts.var_plus = (n - 1.0) / n * parts.within + parts.between_over_n;
    return parts;
}

}  // namespace

double quantile_sorted(std::span<const double> sorted, double p) {
    if (sorted.empty()) throw std::invalid_argument("quantile_sorted: empty sample");
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("quantile_sorted: p outside [0, 1]");
    const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

std::optional<double> split_rhat(const std::vector<std::vector<double>>& chains) {
    if (chains.size() < 2) return std::nullopt;
    const auto halves = split_chains(chains);
    if (!halves) return std::nullopt;
    const auto parts = variance_parts(*halves);
    if (!(parts.within > 0.0)) return std::nullopt;
    return std::sqrt(parts.var_plus / parts.within);
}

std::optional<double> effective_sample_size(const std::vector<std::vector<double>>& chains) {
    const auto halves = split_chains(chains);
    if (!halves) return std::nullopt;
    const auto parts = variance_parts(*halves);
    if (!(parts.within > 0.0) || !(parts.var_plus > 0.0)) return std::nullopt;

    const std::size_t m = halves->size();
    const std::size_t n = halves->front().size();
    std::vector<double> means;
    for (const auto& h : *halves) means.push_back(mean_of(h));

    // rho_t = 1 - (W - mean autocovariance at lag t) / var_plus
    auto rho = [&](std::size_t lag) {
        double acov = 0.0;
        for (std::size_t c = 0; c < m; ++c) {
            const auto& h = (*halves)[c];
            double s = 0.0;
            for (std::size_t i = 0; i + lag < n; ++i) s += (h[i] - means[c]) * (h[i + lag] - means[c]);
            acov += s / static_cast<double>(n);
        }
        acov /= static_cast<double>(m);
        // W uses divisor n - 1 while the lag-0 autocovariance uses n; keep rho_0 = 1.
        const double w = parts.within * (static_cast<double>(n) - 1.0) / static_cast<double>(n);
        return 1.0 - (w - acov) / parts.var_plus;
    };

    double sum_pairs = 0.0;
    double prev_pair = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; 2 * k + 1 < n; ++k) {
        double pair = rho(2 * k) + rho(2 * k + 1);
        if (pair < 0.0) break;
        pair = std::min(pair, prev_pair);
        sum_pairs += pair;
        prev_pair = pair;
    }
    const double total = static_cast<double>(m * n);
    double tau = -1.0 + 2.0 * sum_pairs;
    tau = std::max(tau, 1.0 / std::log10(std::max(total, 10.0)));
    return total / tau;
}

std::vector<ParameterAccessor> parameter_accessors(const std::vector<std::string>& schema) {
    std::vector<ParameterAccessor> out;
    for (RiskKind risk : kRisks) {
        for (std::size_t k = 0; k < schema.size(); ++k) {
            out.push_back({"theta_" + std::string(to_string(risk)) + "[" + schema[k] + "]",
                           [risk, k](const ModelParams& p) { return p.theta(risk)[k]; }});
        }
    }
    for (RiskKind risk : kRisks) {
        const std::string suffix = "_" + std::string(to_string(risk));
        out.push_back({"mu" + suffix, [risk](const ModelParams& p) { return p.baseline(risk).mu(); }});
        out.push_back(
            {"sigma2" + suffix, [risk](const ModelParams& p) { return p.baseline(risk).sigma2(); }});
        out.push_back(
            {"sigma" + suffix, [risk](const ModelParams& p) { return p.baseline(risk).sigma(); }});
    }
    return out;
}

std::vector<std::vector<double>> chain_values(const PosteriorSamples& samples,
                                              const ParameterAccessor& accessor) {
    std::vector<std::vector<double>> chains;
    int current = 0;
    for (const auto& d : samples.draws) {
        if (chains.empty() || d.chain != current) {
            chains.emplace_back();
            current = d.chain;
        }
        chains.back().push_back(accessor.get(d.params));
    }
    return chains;
}

ParameterSummary summarize_values(std::string name, const std::vector<std::vector<double>>& chains) {
    std::vector<double> all;
    for (const auto& c : chains) all.insert(all.end(), c.begin(), c.end());
    if (all.empty()) throw std::invalid_argument("summarize: no draws for " + name);
    ParameterSummary s;
    s.name = std::move(name);
    std::sort(all.begin(), all.end());
    if (all.front() == all.back()) {
        s.mean = all.front();
        s.sd = 0.0;
    } else {
        s.mean = mean_of(all);
        s.sd = std::sqrt(variance_of(all, s.mean));
    }
    s.median = quantile_sorted(all, 0.5);
    s.q025 = quantile_sorted(all, 0.025);
    s.q975 = quantile_sorted(all, 0.975);
    s.rhat = split_rhat(chains);
    s.ess = effective_sample_size(chains);
    return s;
}

std::vector<ParameterSummary> summarize(const PosteriorSamples& samples) {
    std::vector<ParameterSummary> out;
    for (const auto& acc : parameter_accessors(samples.schema)) {
        out.push_back(summarize_values(acc.name, chain_values(samples, acc)));
    }
    return out;
}

}  // namespace mortrisk
