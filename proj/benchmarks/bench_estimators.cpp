// Estimator cost at desk scale: one noisy log synthetic likelihood per
// iteration, across summary dimension, batch size and covariance treatment.

#include <benchmark/benchmark.h>

#include "bsl/models.hpp"
#include "bsl/synthetic_likelihood.hpp"

namespace {

bsl::GaussianToyModel make_toy(int ds) {
    bsl::GaussianToyConfig cfg;
    cfg.summary = bsl::GaussianToyConfig::Summary::CoordMeans;
    cfg.coords = ds;
    return bsl::GaussianToyModel(cfg);
}

void bench_loglik(benchmark::State& state, const bsl::EstimatorConfig& est,
                  int ds, int m) {
    const bsl::GaussianToyModel model = make_toy(ds);
    const bsl::ParameterVector theta = bsl::ParameterVector::Constant(1, 0.3);
    const bsl::SummaryVector observed = bsl::SummaryVector::Constant(ds, 0.25);
    const bsl::SeedStream stream(7);
    std::uint64_t t = 0;
    for (auto _ : state) {
        const double ll = bsl::synthetic_loglik(model, theta, observed, m, est,
                                                stream.child(t++));
        benchmark::DoNotOptimize(ll);
    }
}

void standard_loglik(benchmark::State& state) {
    bench_loglik(state, bsl::EstimatorConfig::standard(),
                 static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
}

void shrinkage_loglik(benchmark::State& state) {
    bench_loglik(state, bsl::EstimatorConfig::shrinkage(0.5),
                 static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
}

void whitened_loglik(benchmark::State& state) {
    const int ds = static_cast<int>(state.range(0));
    const bsl::GaussianToyModel model = make_toy(ds);
    const bsl::ParameterVector theta0 = bsl::ParameterVector::Constant(1, 0.0);
    const auto t = bsl::fit_whitening(model, theta0, ds + 50, bsl::SeedStream(11));
    bench_loglik(state, bsl::EstimatorConfig::whitened(t, 0.0), ds,
                 static_cast<int>(state.range(1)));
}

void moments_only(benchmark::State& state) {
    const int ds = static_cast<int>(state.range(0));
    const int m = static_cast<int>(state.range(1));
    const bsl::GaussianToyModel model = make_toy(ds);
    const bsl::ParameterVector theta = bsl::ParameterVector::Constant(1, 0.3);
    const auto batch =
        bsl::simulate_batch(model, theta, m, bsl::SeedStream(3));
    for (auto _ : state) {
        const auto est = bsl::estimate_moments(batch);
        benchmark::DoNotOptimize(est.cov.data());
    }
}

void grid(benchmark::internal::Benchmark* b) {
    for (int ds : {5, 10, 20})
        for (int m : {30, 50, 100}) b->Args({ds, m});
}

BENCHMARK(standard_loglik)->Apply(grid);
BENCHMARK(shrinkage_loglik)->Apply(grid);
BENCHMARK(whitened_loglik)->Apply(grid);
BENCHMARK(moments_only)->Apply(grid);

}  // namespace

BENCHMARK_MAIN();
