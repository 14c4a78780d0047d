#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cig/dataset.hpp"
#include "cig/forest.hpp"
#include "cig/lasso.hpp"
#include "cig/ranking.hpp"

namespace cig {

struct StabilityParams {
    double expected_fp_bound = 1.0;  // E[V], the false-positive budget
    double pi_thr = 0.75;            // selection-frequency threshold, in (0.5, 1)
    int n_sub = 100;
    std::uint64_t seed = 0;
};

struct EdgeFrequency {
    Edge edge;
    double frequency = 0.0;  // multiples of 1/n_sub
};

struct StableGraph {
    int p = 0;
    std::vector<EdgeFrequency> edges;  // all p(p-1)/2 edges
    std::vector<Edge> selected;        // frequency >= pi_thr, sorted
    int q_used = 0;
    int failed_subsamples = 0;         // learner runs that threw; counted as empty
    StabilityParams params;
};

/// Per-subsample edge cap derived from the false-positive budget:
/// q = floor(sqrt((2*pi_thr - 1) * ev * p*(p-1)/2)). q = 0 is legal and
/// means nothing can be selected.
int compute_q(double ev, double pi_thr, int p);

/// Bound on the expected number of false positives implied by a cap q:
/// q^2 / ((2*pi_thr - 1) * p*(p-1)/2).
double fp_bound(int q, double pi_thr, int p);

/// A base learner: ranks all edges of `data`. `seed` is the derived stream
/// for this run; `subsample_index` is the 0-based subsample number, or -1
/// for a full-data (raw) run.
using EdgeRanker =
    std::function<RankedEdges(const MixedDataset& data, std::uint64_t seed, int subsample_index)>;

/// `workers` parallelizes the per-response fits inside one ranking run; keep
/// it at 1 when the caller already parallelizes across subsamples.
EdgeRanker make_grafo_ranker(const ForestParams& params, int workers = 1);
EdgeRanker make_stablasso_ranker(const LassoParams& params, int workers = 1);

/// Rankings of n_sub subsamples of floor(n/2) rows drawn without
/// replacement; subsample k uses RNG stream (seed, k) and failures are
/// recorded as std::nullopt. Deterministic for any worker count.
struct SubsampleRankings {
    std::vector<std::optional<RankedEdges>> rankings;
};
SubsampleRankings run_subsample_rankings(const MixedDataset& data, const EdgeRanker& ranker,
                                         int n_sub, std::uint64_t seed, int workers = 1);

/// Selection frequencies from precomputed rankings cut at q; selected edges
/// are those with frequency >= pi_thr.
StableGraph aggregate_rankings(const SubsampleRankings& subs, int p, int q,
                               const StabilityParams& params);

/// Full Stability Selection: q from compute_q, subsample, cut, aggregate.
StableGraph stability_select(const MixedDataset& data, const EdgeRanker& ranker,
                             const StabilityParams& params, int workers = 1);

/// Same, with the per-subsample cap q given directly (rate-curve sweeps).
StableGraph stability_select_with_q(const MixedDataset& data, const EdgeRanker& ranker, int q,
                                    const StabilityParams& params, int workers = 1);

/// Single learner run on the full data, cut at q (the "raw" baseline).
std::vector<Edge> raw_select(const MixedDataset& data, const EdgeRanker& ranker, int q,
                             std::uint64_t seed);

/// Exports: TSV edge list (i, j, frequency, selected 0/1), DOT of the
/// selected subgraph, JSON metadata block.
void write_stable_graph_tsv(const std::string& path, const StableGraph& graph);
void write_stable_graph_dot(const std::string& path, const StableGraph& graph,
                            const std::vector<std::string>& node_names);
void write_stable_graph_meta_json(const std::string& path, const StableGraph& graph);

}  // namespace cig
