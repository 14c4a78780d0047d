#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cig/dataset.hpp"
#include "cig/ranking.hpp"

namespace cig {

struct ForestParams {
    int n_trees = 500;
    int mtry = 0;           // 0 = default: floor(m/3) regression, floor(sqrt(m)) classification
    int min_node_size = 0;  // 0 = default: 5 regression, 1 classification
    std::uint64_t seed = 0;
};

enum class ResponseKind { regression, classification };

/// Binary tree node. feature < 0 marks a leaf. Continuous splits send
/// x <= threshold left; categorical splits send levels whose observed-level
/// bit is set in left_mask left (levels unseen at fit time go right).
struct TreeNode {
    std::int32_t feature = -1;  // predictor index (into the predictor order)
    double threshold = 0.0;
    std::uint32_t left_mask = 0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    double value = 0.0;              // regression leaf: mean; classification leaf: majority class
    std::vector<std::int32_t> votes; // classification leaf: class counts
};

struct Tree {
    std::vector<TreeNode> nodes;              // nodes[0] is the root
    std::vector<std::int32_t> oob_rows;       // complement of the bootstrap sample
};

/// CART-style forest fit on one response column of a MixedDataset; the
/// predictors are all remaining columns, indexed in column order with the
/// response skipped.
class ForestModel {
public:
    ResponseKind response_kind = ResponseKind::regression;
    int response_column = 0;
    int n_classes = 0;                        // classification only
    bool constant_response = false;           // fit collapsed to single-leaf trees
    std::vector<Tree> trees;
    // Per predictor: observed level values at fit time (empty for continuous);
    // split masks index into this list.
    std::vector<std::vector<std::int32_t>> observed_levels;

    int n_predictors() const { return static_cast<int>(observed_levels.size()); }
    /// Column index of predictor q in the source dataset.
    int predictor_column(int q) const { return q < response_column ? q : q + 1; }

    /// Single-tree prediction for one dataset row; override_predictor >= 0
    /// substitutes override_value for that predictor (used by permutation
    /// importance). Returns the leaf mean or the majority class index.
    double predict_tree(int tree, const MixedDataset& data, int row,
                        int override_predictor = -1, double override_value = 0.0) const;

    /// Bagged prediction: mean of tree predictions (regression) or majority
    /// vote over trees (classification).
    double predict(const MixedDataset& data, int row) const;
};

/// Grows n_trees CART trees on bootstrap samples with random feature subsets
/// chosen per node; deterministic given params.seed (per-tree RNG streams).
ForestModel fit_forest(const MixedDataset& data, int response, const ForestParams& params);

/// Out-of-bag permutation importance: per predictor, the mean over trees of
/// (OOB error after permuting that predictor) - (OOB error), using squared
/// error for regression and the misclassification rate for classification.
std::vector<double> permutation_importance(const ForestModel& model, const MixedDataset& data,
                                           std::uint64_t seed);

/// Ensemble out-of-bag error: each row predicted by the trees that did not
/// see it (mean squared error / misclassification rate over covered rows).
double oob_error(const ForestModel& model, const MixedDataset& data);

/// Per-regression local ranks combined into conservative edge ranks:
/// rank(i-j) = the worse of (rank of i in regression j, rank of j in
/// regression i). local_ranks[j] holds, for response j, a rank per dataset
/// column (position j itself ignored); an empty vector marks a skipped
/// (degenerate) regression. Edges with no surviving direction are unrankable.
RankedEdges combine_conservative_ranks(int p, const std::vector<std::vector<double>>& local_ranks);

/// The GRaFo base learner: one forest per response, permutation-importance
/// ranks within each regression, worse-rank aggregation across the two
/// directions of every edge.
RankedEdges grafo_rank(const MixedDataset& data, const ForestParams& params, int workers = 1);

/// One tree as indented text (debug aid).
std::string dump_tree(const ForestModel& model, const MixedDataset& data, int tree);

}  // namespace cig
