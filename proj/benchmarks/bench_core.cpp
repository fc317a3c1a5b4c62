#include "mortrisk/hazard.hpp"
#include "mortrisk/mcmc.hpp"
#include "mortrisk/normal.hpp"
#include "mortrisk/predict.hpp"
#include "mortrisk/synth.hpp"

#include <benchmark/benchmark.h>

using namespace mortrisk;

namespace {

const Benchmark& bench_data() {
    static const Benchmark b = make_benchmark(BenchmarkConfig::defaults());
    return b;
}

PosteriorSamples point_posterior(std::size_t copies) {
    PosteriorSamples s;
    s.schema = bench_data().data.schema();
    for (std::size_t i = 0; i < copies; ++i) {
        s.draws.push_back(Draw{0, static_cast<int>(i), bench_data().config.true_params});
    }
    return s;
}

void BM_LogNormalSurvival(benchmark::State& state) {
    double z = -6.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(log_normal_survival(z));
        z = z > 30.0 ? -6.0 : z + 0.37;
    }
}
BENCHMARK(BM_LogNormalSurvival);

void BM_CumulativeHazardStepPath(benchmark::State& state) {
    std::vector<double> times;
    std::vector<std::vector<double>> values;
    for (int j = 0; j < state.range(0); ++j) {
        times.push_back(0.5 + j);
        values.push_back({0.1 * j, 1.0, -0.2});
    }
    const CovariatePath path(times, values);
    const std::vector<double> theta{0.3, -0.5, 0.2};
    const LognormalBaseline b(2.8, 0.81);
    for (auto _ : state) benchmark::DoNotOptimize(cumulative_hazard(path, theta, b, state.range(0) - 0.25));
}
BENCHMARK(BM_CumulativeHazardStepPath)->Arg(1)->Arg(12)->Arg(120);

void BM_TotalLoglik(benchmark::State& state) {
    const auto& b = bench_data();
    for (auto _ : state) benchmark::DoNotOptimize(total_loglik(b.data, b.config.true_params));
    state.SetItemsProcessed(state.iterations() * static_cast<long>(b.data.size()));
}
BENCHMARK(BM_TotalLoglik);

void BM_SamplerSweeps(benchmark::State& state) {
    const auto& b = bench_data();
    SamplerConfig cfg;
    cfg.n_chains = 1;
    cfg.n_iters = 200;
    cfg.burn_in = 100;
    cfg.thin = 1;
    for (auto _ : state) benchmark::DoNotOptimize(run_chain(b.data, PriorSpec{}, cfg, 0));
    state.SetItemsProcessed(state.iterations() * cfg.n_iters);
}
BENCHMARK(BM_SamplerSweeps)->Unit(benchmark::kMillisecond);

void BM_PredictiveLaw(benchmark::State& state) {
    const auto samples = point_posterior(static_cast<std::size_t>(state.range(0)));
    const auto path = reference_profiles(3)[2];
    for (auto _ : state) benchmark::DoNotOptimize(PredictiveLaw(path, samples, RiskKind::Prepay));
}
BENCHMARK(BM_PredictiveLaw)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_Classify(benchmark::State& state) {
    const auto samples = point_posterior(500);
    const auto path = reference_profiles(3)[0];
    const PredictiveLaw d(path, samples, RiskKind::Default);
    const PredictiveLaw p(path, samples, RiskKind::Prepay);
    auto rng = make_stream(1, 0);
    for (auto _ : state) benchmark::DoNotOptimize(classify(d, p, static_cast<std::size_t>(state.range(0)), rng));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Classify)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
