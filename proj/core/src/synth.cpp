#include "mortrisk/synth.hpp"

#include "mortrisk/errors.hpp"
#include "mortrisk/hazard.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace mortrisk {

double draw_event_time(const ModelParams& params, RiskKind risk, const CovariatePath& path, Rng& rng) {
    const double target = -std::log(uniform_open(rng));
    return invert_cumulative_hazard(path, params.theta(risk), params.baseline(risk), target);
}

LoanObservation simulate_loan(const ModelParams& params, const CovariatePath& path, double maturity,
                              Rng& rng, double censor_time, std::string id) {
    const double t_default = draw_event_time(params, RiskKind::Default, path, rng);
    const double t_prepay = draw_event_time(params, RiskKind::Prepay, path, rng);
    const double horizon = std::min(maturity, censor_time);
    const double first = std::min(t_default, t_prepay);
    if (first < horizon) {
        const LoanStatus status = t_default <= t_prepay ? LoanStatus::Defaulted : LoanStatus::Prepaid;
        return LoanObservation(std::move(id), status, first, path, maturity);
    }
    return LoanObservation(std::move(id), LoanStatus::Active, horizon, path, maturity);
}

BenchmarkConfig BenchmarkConfig::defaults() {
    BenchmarkConfig c;
    c.true_params.baseline_default = LognormalBaseline(2.8, 0.9 * 0.9);
    c.true_params.baseline_prepay = LognormalBaseline(1.6, 0.7 * 0.7);
    c.true_params.theta_default = {-0.6, 0.4, 0.5, -0.3};
    c.true_params.theta_prepay = {0.3, -0.2, -0.5, 0.25};
    return c;
}

void BenchmarkConfig::validate() const {
    if (p < 1) throw std::invalid_argument("BenchmarkConfig: p must be >= 1");
    true_params.validate(p + 1);
    if (!(maturity > 0.0)) throw std::invalid_argument("BenchmarkConfig: maturity must be positive");
    if (!(censor_time > 0.0)) throw std::invalid_argument("BenchmarkConfig: censor_time must be positive");
}

std::vector<std::string> benchmark_schema(std::size_t p) {
    std::vector<std::string> names;
    for (std::size_t k = 1; k < p; ++k) names.push_back("x" + std::to_string(k));
    names.emplace_back(kInterceptName);
    names.emplace_back("flag");
    return names;
}

std::vector<double> benchmark_covariates(std::size_t p, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> x;
    x.reserve(p + 1);
    for (std::size_t k = 1; k < p; ++k) x.push_back(normal(rng));
    x.push_back(1.0);
    x.push_back(uniform_open(rng) < 0.5 ? 1.0 : 0.0);
    return x;
}

Benchmark make_benchmark(const BenchmarkConfig& config) {
    config.validate();
    Benchmark bench{Dataset(benchmark_schema(config.p)), config};
    for (std::size_t i = 0; i < config.n_loans; ++i) {
        Rng rng = make_stream(config.seed, i);
        auto path = CovariatePath::constant(benchmark_covariates(config.p, rng));
        bench.data.add(simulate_loan(config.true_params, path, config.maturity, rng, config.censor_time,
                                     "L" + std::to_string(i + 1)));
    }
    return bench;
}

std::vector<CovariatePath> reference_profiles(std::size_t p) {
    // (continuous level, flag) pairs; every continuous column gets the same level
    // with alternating sign so profiles spread across the linear predictor.
    const std::vector<std::pair<double, double>> levels{
        {0.0, 0.0}, {0.0, 1.0}, {1.0, 0.0}, {-1.0, 1.0}, {2.0, 1.0}, {-2.0, 0.0}};
    std::vector<CovariatePath> out;
    for (const auto& [level, flag] : levels) {
        std::vector<double> x;
        for (std::size_t k = 1; k < p; ++k) x.push_back(k % 2 == 1 ? level : -level);
        x.push_back(1.0);
        x.push_back(flag);
        out.push_back(CovariatePath::constant(std::move(x)));
    }
    return out;
}

namespace {

nlohmann::json params_json(const ModelParams& p) {
    return {{"mu_default", p.baseline_default.mu()},   {"sigma2_default", p.baseline_default.sigma2()},
            {"mu_prepay", p.baseline_prepay.mu()},     {"sigma2_prepay", p.baseline_prepay.sigma2()},
            {"theta_default", p.theta_default},        {"theta_prepay", p.theta_prepay}};
}

}  // namespace

void write_truth_json(std::ostream& out, const BenchmarkConfig& config) {
    nlohmann::json j{{"format", "mortrisk-truth"},
                     {"version", 1},
                     {"n_loans", config.n_loans},
                     {"p", config.p},
                     {"censor_time", config.censor_time},
                     {"maturity", config.maturity},
                     {"seed", config.seed},
                     {"schema", benchmark_schema(config.p)},
                     {"true_params", params_json(config.true_params)}};
    out << j.dump(2) << '\n';
}

BenchmarkConfig read_truth_json(std::istream& in) {
    try {
        const auto j = nlohmann::json::parse(in);
        if (j.at("version").get<int>() != 1) throw ParseError("truth file: unsupported version");
        BenchmarkConfig c;
        c.n_loans = j.at("n_loans").get<std::size_t>();
        c.p = j.at("p").get<std::size_t>();
        c.censor_time = j.at("censor_time").get<double>();
        c.maturity = j.at("maturity").get<double>();
        c.seed = j.at("seed").get<std::uint64_t>();
        const auto& tp = j.at("true_params");
        c.true_params.baseline_default =
            LognormalBaseline(tp.at("mu_default").get<double>(), tp.at("sigma2_default").get<double>());
        c.true_params.baseline_prepay =
            LognormalBaseline(tp.at("mu_prepay").get<double>(), tp.at("sigma2_prepay").get<double>());
        c.true_params.theta_default = tp.at("theta_default").get<std::vector<double>>();
        c.true_params.theta_prepay = tp.at("theta_prepay").get<std::vector<double>>();
        c.validate();
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("truth file: ") + e.what());
    }
}

}  // namespace mortrisk
