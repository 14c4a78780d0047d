#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cig/forest.hpp"
#include "cig/lasso.hpp"
#include "cig/simulate.hpp"
#include "cig/stability.hpp"

namespace cig {

/// Learners the harness can run. oracle (returns the true graph) and empty
/// (returns nothing) are plumbing checks.
enum class LearnerKind { grafo, stablasso, oracle, empty };

LearnerKind learner_from_string(const std::string& name);
std::string to_string(LearnerKind kind);

struct BenchConfig {
    std::string model = "gaussian";  // a DagKind name or "ising"
    int p = 50;
    int n = 100;
    int repetitions = 50;
    std::vector<double> evs = {1.0, 5.0, 10.0};
    std::vector<LearnerKind> learners = {LearnerKind::grafo, LearnerKind::stablasso};
    ForestParams forest;
    LassoParams lasso;
    double pi_thr = 0.75;
    int n_sub = 100;
    std::uint64_t seed = 0;
    int burn_in_sweeps = 1000;  // ising only
    int thin_sweeps = 100;
    std::vector<int> q_grid;  // empty = 20 geometric points from 1 to p(p-1)/8
};

struct ConfusionCounts {
    int tp = 0;
    int fp = 0;
    double tpr = 0.0;
    double fpr = 0.0;
};

/// TP/FP against the true graph; TPR = TP/|truth| (0 when truth is empty),
/// FPR = FP over the non-edges.
ConfusionCounts evaluate(const std::vector<Edge>& estimated, const TrueCig& truth);

/// One (learner, E[V]) cell of the bound-vs-observed table.
struct BenchCell {
    LearnerKind learner;
    double ev = 0.0;
    int q = 0;
    double bound = 0.0;  // fp_bound at this q
    double mean_tp = 0.0;
    double mean_fp = 0.0;
    double mean_tpr = 0.0;
    double mean_fpr = 0.0;
};

/// One point of a rate curve, stable or raw, at a swept q.
struct CurvePoint {
    LearnerKind learner;
    bool stable = true;
    int q = 0;
    double mean_tpr = 0.0;
    double mean_fpr = 0.0;
    double mean_tp = 0.0;
    double mean_fp = 0.0;
};

struct BenchResult {
    std::vector<BenchCell> cells;
    std::vector<CurvePoint> curves;
    std::vector<int> true_edge_counts;  // per successful repetition
    int failed_repetitions = 0;
};

std::vector<int> default_q_grid(int p);

/// Runs `repetitions` independent draws of (model, data), evaluates every
/// learner at every E[V] plus the q sweep for stable and raw selectors, and
/// averages. Repetition r uses seeds derived from (cfg.seed, r); failed
/// repetitions are excluded from the means and counted.
BenchResult run_bench(const BenchConfig& cfg, int workers = 1);

BenchConfig parse_bench_config_json(const std::string& path);

/// cells.tsv, curves.tsv and summary.json under out_dir.
void write_bench_result(const std::string& out_dir, const BenchConfig& cfg,
                        const BenchResult& result);

}  // namespace cig
