#include <benchmark/benchmark.h>

#include "cig/simulate.hpp"

namespace {

void BM_GibbsSample(benchmark::State& state) {
    const int p = static_cast<int>(state.range(0));
    cig::IsingModel model = cig::sample_ising(p, 3);
    for (auto _ : state) {
        cig::MixedDataset draws = cig::gibbs_sample(model, 100, 100, 10, 5);
        benchmark::DoNotOptimize(draws.n());
    }
}

void BM_Dichotomize(benchmark::State& state) {
    const int p = static_cast<int>(state.range(0));
    cig::DagModel model = cig::sample_dag_model(cig::DagKind::mixed, p, 5);
    cig::MixedDataset data = cig::sample_data(model, 200, 6);
    for (auto _ : state) {
        cig::BinaryDataset bin = cig::dichotomize(data);
        benchmark::DoNotOptimize(bin.p());
    }
}

}  // namespace

BENCHMARK(BM_GibbsSample)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Dichotomize)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);
