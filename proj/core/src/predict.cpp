#include "mortrisk/predict.hpp"

#include "mortrisk/errors.hpp"
#include "mortrisk/hazard.hpp"
#include "mortrisk/normal.hpp"

#include <boost/math/tools/toms748_solve.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>

namespace mortrisk {

void PredictiveOptions::validate() const {
    if (table_points < 2) throw std::invalid_argument("PredictiveOptions: table_points must be >= 2");
    if (!(t_min > 0.0)) throw std::invalid_argument("PredictiveOptions: t_min must be positive");
    if (!(horizon_factor >= 1.0)) throw std::invalid_argument("PredictiveOptions: horizon_factor must be >= 1");
    if (!(rel_tol > 0.0 && rel_tol < 1e-2)) throw std::invalid_argument("PredictiveOptions: rel_tol out of range");
}

PredictiveLaw::PredictiveLaw(const CovariatePath& path, const PosteriorSamples& samples, RiskKind risk,
                             double maturity, PredictiveOptions options)
    : risk_(risk), maturity_(maturity), options_(options) {
    options_.validate();
    if (samples.empty()) throw std::invalid_argument("PredictiveLaw: posterior samples are empty");
    if (!(maturity > 0.0) || !std::isfinite(maturity)) {
        throw std::invalid_argument("PredictiveLaw: maturity must be positive and finite");
    }
    if (path.dimension() != samples.schema.size()) {
        throw SchemaMismatch("PredictiveLaw: covariate path has " + std::to_string(path.dimension()) +
                             " entries, draws have " + std::to_string(samples.schema.size()));
    }
    const std::size_t m = path.intervals();
    for (std::size_t j = 1; j < m; ++j) bounds_.push_back(path.lower(j));

    const std::size_t g = samples.size();
    mu_.reserve(g);
    sigma_.reserve(g);
    scale_.reserve(g * m);
    log_s_lo_.reserve(g * m);
    cum_lo_.reserve(g * m);
    for (const auto& draw : samples.draws) {
        const auto& b = draw.params.baseline(risk);
        const auto& theta = draw.params.theta(risk);
        const double mu = b.mu();
        const double sigma = b.sigma();
        mu_.push_back(mu);
        sigma_.push_back(sigma);
        double cum = 0.0;
        double prev_log_s = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            const double lo = path.lower(j);
            const double log_s = lo > 0.0 ? log_normal_survival((std::log(lo) - mu) / sigma) : 0.0;
            if (j > 0) cum += scale_.back() * std::max(0.0, prev_log_s - log_s);
            scale_.push_back(std::exp(linear_predictor(theta, path.value(j))));
            log_s_lo_.push_back(log_s);
            cum_lo_.push_back(cum);
            prev_log_s = log_s;
        }
    }

    const double horizon = options_.horizon_factor * maturity_;
    const double t_min = std::min(options_.t_min, 0.5 * maturity_);
    const std::size_t k = options_.table_points;
    const double step = std::log(horizon / t_min) / static_cast<double>(k - 1);
    grid_.reserve(k + 1);
    for (std::size_t i = 0; i + 1 < k; ++i) grid_.push_back(t_min * std::exp(step * static_cast<double>(i)));
    grid_.push_back(horizon);
    grid_.push_back(maturity_);
    std::sort(grid_.begin(), grid_.end());
    grid_.erase(std::unique(grid_.begin(), grid_.end()), grid_.end());

    table_.reserve(grid_.size());
    double last = 1.0;
    for (double t : grid_) {
        // Rounding can break monotonicity by an ulp in flat regions; the table must not.
        last = std::min(last, reliability(t));
        table_.push_back(last);
    }
    r_maturity_ = reliability(maturity_);
}

double PredictiveLaw::reliability(double t) const {
    if (!(t > 0.0)) return 1.0;
    const std::size_t m = bounds_.size() + 1;
    const std::size_t j = static_cast<std::size_t>(
        std::lower_bound(bounds_.begin(), bounds_.end(), t) - bounds_.begin());
    const double log_t = std::log(t);
    double sum = 0.0;
    for (std::size_t l = 0; l < mu_.size(); ++l) {
        const std::size_t idx = l * m + j;
        const double log_s = log_normal_survival((log_t - mu_[l]) / sigma_[l]);
        const double cum = cum_lo_[idx] + scale_[idx] * std::max(0.0, log_s_lo_[idx] - log_s);
        sum += std::exp(-cum);
    }
    return std::clamp(sum / static_cast<double>(mu_.size()), 0.0, 1.0);
}

double PredictiveLaw::density(double t) const {
    if (!(t > 0.0)) return 0.0;
    const std::size_t m = bounds_.size() + 1;
    const std::size_t j = static_cast<std::size_t>(
        std::lower_bound(bounds_.begin(), bounds_.end(), t) - bounds_.begin());
    const double log_t = std::log(t);
    double sum = 0.0;
    for (std::size_t l = 0; l < mu_.size(); ++l) {
        const std::size_t idx = l * m + j;
        const double z = (log_t - mu_[l]) / sigma_[l];
        const double log_s = log_normal_survival(z);
        const double cum = cum_lo_[idx] + scale_[idx] * std::max(0.0, log_s_lo_[idx] - log_s);
        const double log_r = log_normal_pdf(z) - std::log(sigma_[l]) - log_t - log_s;
        sum += scale_[idx] * std::exp(log_r - cum);
    }
    return sum / static_cast<double>(mu_.size());
}

std::size_t PredictiveLaw::cell_of(double u) const {
    return static_cast<std::size_t>(
        std::lower_bound(table_.begin(), table_.end(), u, std::greater<>()) - table_.begin());
}

double PredictiveLaw::solve(double u, double lo, double hi) const {
    const auto f = [&](double t) { return reliability(t) - u; };
    const double f_lo = f(lo);
    const double f_hi = f(hi);
    if (f_lo <= 0.0) return lo;
    if (f_hi >= 0.0) return hi;
    const double tol = options_.rel_tol;
    auto converged = [tol](double a, double b) { return std::abs(b - a) <= tol * std::min(a, b); };
    std::uintmax_t max_iter = 200;
    const auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, f_lo, f_hi, converged, max_iter);
    return 0.5 * (a + b);
}

SampledTime PredictiveLaw::quantile(double u) const {
    if (!(u > 0.0 && u < 1.0)) throw std::invalid_argument("PredictiveLaw::quantile: u must lie in (0, 1)");
    const std::size_t k = cell_of(u);
    if (k == grid_.size()) return {horizon(), true};
    if (table_[k] == u) return {grid_[k], false};
    double hi = grid_[k];
    double lo;
    if (k > 0) {
        lo = grid_[k - 1];
    } else {
        lo = hi;
        while (reliability(lo) <= u) {
            if (lo < 1e-290) return {lo, false};
            hi = lo;
            lo *= 1e-3;
        }
    }
    return {solve(u, lo, hi), false};
}

namespace {

void require_grid(std::span<const double> grid, const char* where) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] > 0.0) || (i > 0 && !(grid[i] > grid[i - 1]))) {
            throw std::invalid_argument(std::string(where) + ": grid must be positive and increasing");
        }
    }
}

// Pointwise evaluation needs no inverse table.
PredictiveOptions evaluation_only() {
    PredictiveOptions o;
    o.table_points = 2;
    return o;
}

}  // namespace

PredictiveCurve predictive_reliability(const CovariatePath& path, const PosteriorSamples& samples,
                                       RiskKind risk, std::span<const double> grid) {
    require_grid(grid, "predictive_reliability");
    const PredictiveLaw law(path, samples, risk, kDefaultMaturityYears, evaluation_only());
    PredictiveCurve curve{{grid.begin(), grid.end()}, {}};
    curve.values.reserve(grid.size());
    double last = 1.0;
    for (double t : grid) {
        last = std::min(last, law.reliability(t));
        curve.values.push_back(last);
    }
    return curve;
}

std::vector<double> predictive_density(const CovariatePath& path, const PosteriorSamples& samples,
                                       RiskKind risk, std::span<const double> grid) {
    require_grid(grid, "predictive_density");
    const PredictiveLaw law(path, samples, risk, kDefaultMaturityYears, evaluation_only());
    std::vector<double> out;
    out.reserve(grid.size());
    for (double t : grid) out.push_back(law.density(t));
    return out;
}

SampledTime sample_event_time(const PredictiveLaw& law, Rng& rng) {
    return law.quantile(uniform_open(rng));
}

SampledTime sample_event_time(const CovariatePath& path, const PosteriorSamples& samples, RiskKind risk,
                              Rng& rng, double maturity) {
    return sample_event_time(PredictiveLaw(path, samples, risk, maturity), rng);
}

Outcome region(double t_default, double t_prepay, double maturity) {
    if (t_default < maturity && t_default <= t_prepay) return Outcome::Default;
    if (t_prepay < maturity && t_prepay < t_default) return Outcome::Prepay;
    return Outcome::Mature;
}

Classification classify(const PredictiveLaw& default_law, const PredictiveLaw& prepay_law,
                        std::size_t n_sims, Rng& rng) {
    if (n_sims < 1) throw std::invalid_argument("classify: n_sims must be >= 1");
    if (default_law.risk() != RiskKind::Default || prepay_law.risk() != RiskKind::Prepay) {
        throw std::invalid_argument("classify: laws must be (default, prepay)");
    }
    if (default_law.maturity() != prepay_law.maturity()) {
        throw std::invalid_argument("classify: laws disagree on maturity");
    }
    const double r_d = default_law.reliability_at_maturity();
    const double r_p = prepay_law.reliability_at_maturity();
    const bool shared_grid = std::ranges::equal(default_law.grid(), prepay_law.grid());
    Classification c;
    c.n_sims = n_sims;
    for (std::size_t i = 0; i < n_sims; ++i) {
        const double u_d = uniform_open(rng);
        const double u_p = uniform_open(rng);
        // t < T_M exactly when u > R(T_M), since R is strictly decreasing.
        const bool d_early = u_d > r_d;
        const bool p_early = u_p > r_p;
        Outcome o;
        if (!d_early && !p_early) {
            o = Outcome::Mature;
        } else if (!p_early) {
            o = Outcome::Default;
        } else if (!d_early) {
            o = Outcome::Prepay;
        } else {
            const std::size_t k_d = shared_grid ? default_law.cell_of(u_d) : 0;
            const std::size_t k_p = shared_grid ? prepay_law.cell_of(u_p) : 0;
            if (shared_grid && k_d != k_p) {
                o = k_d < k_p ? Outcome::Default : Outcome::Prepay;
            } else {
                o = region(default_law.quantile(u_d).t, prepay_law.quantile(u_p).t, default_law.maturity());
            }
        }
        switch (o) {
            case Outcome::Default: ++c.n_default; break;
            case Outcome::Prepay: ++c.n_prepay; break;
            case Outcome::Mature: ++c.n_mature; break;
        }
    }
    const double n = static_cast<double>(n_sims);
    c.p_default = static_cast<double>(c.n_default) / n;
    c.p_prepay = static_cast<double>(c.n_prepay) / n;
    c.p_mature = 1.0 - (c.p_default + c.p_prepay);
    return c;
}

Classification classify(const CovariatePath& path, const PosteriorSamples& samples, double maturity,
                        std::size_t n_sims, Rng& rng, const PredictiveOptions& options) {
    const PredictiveLaw d(path, samples, RiskKind::Default, maturity, options);
    const PredictiveLaw p(path, samples, RiskKind::Prepay, maturity, options);
    return classify(d, p, n_sims, rng);
}

}  // namespace mortrisk
