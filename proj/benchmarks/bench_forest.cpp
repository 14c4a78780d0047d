#include <benchmark/benchmark.h>

#include "cig/forest.hpp"
#include "cig/simulate.hpp"

namespace {

cig::MixedDataset gaussian_data(int p, int n) {
    cig::DagModel model = cig::sample_dag_model(cig::DagKind::gaussian, p, 7);
    return cig::sample_data(model, n, 8);
}

void BM_FitForest(benchmark::State& state) {
    const int p = static_cast<int>(state.range(0));
    cig::MixedDataset data = gaussian_data(p, 100);
    cig::ForestParams params;
    params.n_trees = 100;
    for (auto _ : state) {
        cig::ForestModel model = cig::fit_forest(data, 0, params);
        benchmark::DoNotOptimize(model.trees.size());
    }
}

void BM_PermutationImportance(benchmark::State& state) {
    const int p = static_cast<int>(state.range(0));
    cig::MixedDataset data = gaussian_data(p, 100);
    cig::ForestParams params;
    params.n_trees = 100;
    cig::ForestModel model = cig::fit_forest(data, 0, params);
    for (auto _ : state) {
        auto importance = cig::permutation_importance(model, data, 3);
        benchmark::DoNotOptimize(importance.data());
    }
}

void BM_GrafoRank(benchmark::State& state) {
    const int p = static_cast<int>(state.range(0));
    cig::MixedDataset data = gaussian_data(p, 50);
    cig::ForestParams params;
    params.n_trees = 100;
    for (auto _ : state) {
        cig::RankedEdges ranked = cig::grafo_rank(data, params);
        benchmark::DoNotOptimize(ranked.entries.data());
    }
}

}  // namespace

BENCHMARK(BM_FitForest)->Arg(20)->Arg(50)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PermutationImportance)->Arg(20)->Arg(50)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GrafoRank)->Arg(20)->Arg(50)->Unit(benchmark::kMillisecond);
