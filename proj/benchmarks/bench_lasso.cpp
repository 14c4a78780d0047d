#include <benchmark/benchmark.h>

#include "cig/lasso.hpp"
#include "cig/rng.hpp"

namespace {

void BM_LassoPath(benchmark::State& state) {
    const int n = 100;
    const int m = static_cast<int>(state.range(0));
    cig::Rng rng(11);
    std::vector<std::vector<double>> x(static_cast<std::size_t>(m));
    for (auto& col : x)
        for (int i = 0; i < n; ++i) col.push_back(rng.normal());
    std::vector<double> y;
    for (int i = 0; i < n; ++i)
        y.push_back(x[0][static_cast<std::size_t>(i)] - 0.5 * x[1][static_cast<std::size_t>(i)] +
                    rng.normal());
    for (auto _ : state) {
        cig::LassoPath path = cig::lasso_path(x, y, cig::Family::linear, {});
        benchmark::DoNotOptimize(path.entry_lambda.data());
    }
}

void BM_LogisticLassoPath(benchmark::State& state) {
    const int n = 100;
    const int m = static_cast<int>(state.range(0));
    cig::Rng rng(13);
    std::vector<std::vector<double>> x(static_cast<std::size_t>(m));
    for (auto& col : x)
        for (int i = 0; i < n; ++i) col.push_back(rng.bernoulli(0.5) ? 1.0 : -1.0);
    std::vector<double> y;
    for (int i = 0; i < n; ++i) {
        double eta = x[0][static_cast<std::size_t>(i)];
        y.push_back(rng.uniform() < 1.0 / (1.0 + std::exp(-eta)) ? 1.0 : -1.0);
    }
    y[0] = 1.0;
    y[1] = -1.0;
    for (auto _ : state) {
        cig::LassoPath path = cig::lasso_path(x, y, cig::Family::logistic, {});
        benchmark::DoNotOptimize(path.entry_lambda.data());
    }
}

}  // namespace

BENCHMARK(BM_LassoPath)->Arg(20)->Arg(50)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LogisticLassoPath)->Arg(20)->Arg(50)->Unit(benchmark::kMillisecond);
