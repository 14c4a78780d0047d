#include "cig/forest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "cig/parallel.hpp"
#include "cig/rng.hpp"

namespace cig {

namespace {

constexpr int kMaxSplitLevels = 10;  // exhaustive subset search cap

struct ResolvedParams {
    int n_trees;
    int mtry;
    int min_node_size;
    std::uint64_t seed;
};

ResolvedParams resolve(const ForestParams& params, ResponseKind kind, int m) {
    ResolvedParams r{};
    r.n_trees = params.n_trees;
    r.seed = params.seed;
    if (r.n_trees < 1) throw std::invalid_argument("forest: n_trees must be positive");
    if (params.mtry == 0) {
        r.mtry = kind == ResponseKind::regression
                     ? std::max(1, m / 3)
                     : std::max(1, static_cast<int>(std::floor(std::sqrt(static_cast<double>(m)))));
    } else {
        r.mtry = params.mtry;
    }
    if (r.mtry < 1 || r.mtry > m)
        throw std::invalid_argument("forest: mtry must be in [1, number of predictors]");
    r.min_node_size = params.min_node_size == 0
                          ? (kind == ResponseKind::regression ? 5 : 1)
                          : params.min_node_size;
    if (r.min_node_size < 1) throw std::invalid_argument("forest: min_node_size must be >= 1");
    return r;
}

// Everything a single tree build needs; scratch buffers are reused across
// nodes of one tree.
struct TreeBuilder {
    const MixedDataset& data;
    const ForestModel& model;
    std::span<const double> y;
    ResolvedParams params;
    Rng rng;

    std::vector<std::int32_t> rows;  // bootstrap rows, partitioned in place
    std::vector<TreeNode> nodes;

    // scratch
    std::vector<int> feature_pool;
    std::vector<std::pair<double, double>> sorted_xy;   // (x, y) for continuous splits
    std::vector<double> level_sum;                      // regression, per node-level
    std::vector<int> level_count;
    std::vector<int> level_class_count;                 // classification, n_obs x n_classes, flat
    std::vector<int> node_levels;                       // observed-level ranks present in node
    std::vector<std::int32_t> partition_scratch;

    TreeBuilder(const MixedDataset& d, const ForestModel& mod, std::span<const double> y_,
                const ResolvedParams& p, Rng r)
        : data(d), model(mod), y(y_), params(p), rng(r) {}

    double value_at(int predictor, std::int32_t row) const {
        return data.cell(row, model.predictor_column(predictor));
    }

    struct Split {
        double gain = 0.0;
        int feature = -1;
        double threshold = 0.0;
        std::uint32_t left_mask = 0;
        bool categorical = false;
    };

    bool node_pure(int begin, int end) const {
        double first = y[static_cast<std::size_t>(rows[static_cast<std::size_t>(begin)])];
        for (int i = begin + 1; i < end; ++i)
            if (y[static_cast<std::size_t>(rows[static_cast<std::size_t>(i)])] != first) return false;
        return true;
    }

    // score = sum^2/count (regression) or sum_c count_c^2/count (classification);
    // split gain = score(left) + score(right) - score(parent) >= 0.
    void best_continuous_split(int feature, int begin, int end, Split& best) {
        const int size = end - begin;
        sorted_xy.clear();
        sorted_xy.reserve(static_cast<std::size_t>(size));
        for (int i = begin; i < end; ++i) {
            std::int32_t row = rows[static_cast<std::size_t>(i)];
            sorted_xy.emplace_back(value_at(feature, row), y[static_cast<std::size_t>(row)]);
        }
        std::sort(sorted_xy.begin(), sorted_xy.end());
        if (sorted_xy.front().first == sorted_xy.back().first) return;  // constant in node

        if (model.response_kind == ResponseKind::regression) {
            double total = 0;
            for (const auto& [x, yy] : sorted_xy) total += yy;
            double parent_score = total * total / size;
            double left_sum = 0;
            for (int i = 0; i + 1 < size; ++i) {
                left_sum += sorted_xy[static_cast<std::size_t>(i)].second;
                if (sorted_xy[static_cast<std::size_t>(i)].first ==
                    sorted_xy[static_cast<std::size_t>(i + 1)].first)
                    continue;
                int nl = i + 1, nr = size - nl;
                double right_sum = total - left_sum;
                double gain = left_sum * left_sum / nl + right_sum * right_sum / nr - parent_score;
                if (gain > best.gain) {
                    best.gain = gain;
                    best.feature = feature;
                    best.threshold = 0.5 * (sorted_xy[static_cast<std::size_t>(i)].first +
                                            sorted_xy[static_cast<std::size_t>(i + 1)].first);
                    best.categorical = false;
                }
            }
        } else {
            const int n_classes = model.n_classes;
            std::vector<int> total(static_cast<std::size_t>(n_classes), 0);
            for (const auto& [x, yy] : sorted_xy) total[static_cast<std::size_t>(static_cast<int>(yy))]++;
            double parent_score = 0;
            for (int c : total) parent_score += static_cast<double>(c) * c;
            parent_score /= size;
            std::vector<int> left(static_cast<std::size_t>(n_classes), 0);
            for (int i = 0; i + 1 < size; ++i) {
                left[static_cast<std::size_t>(static_cast<int>(sorted_xy[static_cast<std::size_t>(i)].second))]++;
                if (sorted_xy[static_cast<std::size_t>(i)].first ==
                    sorted_xy[static_cast<std::size_t>(i + 1)].first)
                    continue;
                int nl = i + 1, nr = size - nl;
                double ls = 0, rs = 0;
                for (int c = 0; c < n_classes; ++c) {
                    double lc = left[static_cast<std::size_t>(c)];
                    double rc = total[static_cast<std::size_t>(c)] - lc;
                    ls += lc * lc;
                    rs += rc * rc;
                }
                double gain = ls / nl + rs / nr - parent_score;
                if (gain > best.gain) {
                    best.gain = gain;
                    best.feature = feature;
                    best.threshold = 0.5 * (sorted_xy[static_cast<std::size_t>(i)].first +
                                            sorted_xy[static_cast<std::size_t>(i + 1)].first);
                    best.categorical = false;
                }
            }
        }
    }

    void best_categorical_split(int feature, int begin, int end, Split& best) {
        const auto& observed = model.observed_levels[static_cast<std::size_t>(feature)];
        const int n_obs = static_cast<int>(observed.size());
        const int size = end - begin;

        // Aggregate per observed-level rank within this node.
        node_levels.clear();
        if (model.response_kind == ResponseKind::regression) {
            level_sum.assign(static_cast<std::size_t>(n_obs), 0.0);
            level_count.assign(static_cast<std::size_t>(n_obs), 0);
            for (int i = begin; i < end; ++i) {
                std::int32_t row = rows[static_cast<std::size_t>(i)];
                int level = static_cast<int>(value_at(feature, row));
                int rank = static_cast<int>(std::lower_bound(observed.begin(), observed.end(), level) -
                                            observed.begin());
                level_sum[static_cast<std::size_t>(rank)] += y[static_cast<std::size_t>(row)];
                level_count[static_cast<std::size_t>(rank)]++;
            }
            for (int r = 0; r < n_obs; ++r)
                if (level_count[static_cast<std::size_t>(r)] > 0) node_levels.push_back(r);
            const int k = static_cast<int>(node_levels.size());
            if (k < 2) return;
            double total = 0;
            for (int r : node_levels) total += level_sum[static_cast<std::size_t>(r)];
            double parent_score = total * total / size;
            // Canonical orientation: the first node-present level goes left.
            for (std::uint32_t mask = 1; mask + 1 < (1u << k); ++mask) {
                if (!(mask & 1u)) continue;
                double lsum = 0;
                int lcnt = 0;
                for (int b = 0; b < k; ++b) {
                    if (mask & (1u << b)) {
                        lsum += level_sum[static_cast<std::size_t>(node_levels[static_cast<std::size_t>(b)])];
                        lcnt += level_count[static_cast<std::size_t>(node_levels[static_cast<std::size_t>(b)])];
                    }
                }
                int rcnt = size - lcnt;
                if (lcnt == 0 || rcnt == 0) continue;
                double rsum = total - lsum;
                double gain = lsum * lsum / lcnt + rsum * rsum / rcnt - parent_score;
                if (gain > best.gain) {
                    best.gain = gain;
                    best.feature = feature;
                    best.categorical = true;
                    std::uint32_t left_mask = 0;
                    for (int b = 0; b < k; ++b)
                        if (mask & (1u << b))
                            left_mask |= 1u << node_levels[static_cast<std::size_t>(b)];
                    best.left_mask = left_mask;
                }
            }
        } else {
            const int n_classes = model.n_classes;
            level_class_count.assign(static_cast<std::size_t>(n_obs) * n_classes, 0);
            level_count.assign(static_cast<std::size_t>(n_obs), 0);
            for (int i = begin; i < end; ++i) {
                std::int32_t row = rows[static_cast<std::size_t>(i)];
                int level = static_cast<int>(value_at(feature, row));
                int rank = static_cast<int>(std::lower_bound(observed.begin(), observed.end(), level) -
                                            observed.begin());
                level_class_count[static_cast<std::size_t>(rank) * n_classes +
                                  static_cast<std::size_t>(static_cast<int>(y[static_cast<std::size_t>(row)]))]++;
                level_count[static_cast<std::size_t>(rank)]++;
            }
            for (int r = 0; r < n_obs; ++r)
                if (level_count[static_cast<std::size_t>(r)] > 0) node_levels.push_back(r);
            const int k = static_cast<int>(node_levels.size());
            if (k < 2) return;
            std::vector<int> total(static_cast<std::size_t>(n_classes), 0);
            for (int r : node_levels)
                for (int c = 0; c < n_classes; ++c)
                    total[static_cast<std::size_t>(c)] +=
                        level_class_count[static_cast<std::size_t>(r) * n_classes + static_cast<std::size_t>(c)];
            double parent_score = 0;
            for (int c : total) parent_score += static_cast<double>(c) * c;
            parent_score /= size;
            std::vector<int> left(static_cast<std::size_t>(n_classes));
            for (std::uint32_t mask = 1; mask + 1 < (1u << k); ++mask) {
                if (!(mask & 1u)) continue;
                std::fill(left.begin(), left.end(), 0);
                int lcnt = 0;
                for (int b = 0; b < k; ++b) {
                    if (mask & (1u << b)) {
                        int r = node_levels[static_cast<std::size_t>(b)];
                        lcnt += level_count[static_cast<std::size_t>(r)];
                        for (int c = 0; c < n_classes; ++c)
                            left[static_cast<std::size_t>(c)] +=
                                level_class_count[static_cast<std::size_t>(r) * n_classes +
                                                  static_cast<std::size_t>(c)];
                    }
                }
                int rcnt = size - lcnt;
                if (lcnt == 0 || rcnt == 0) continue;
                double ls = 0, rs = 0;
                for (int c = 0; c < n_classes; ++c) {
                    double lc = left[static_cast<std::size_t>(c)];
                    double rc = total[static_cast<std::size_t>(c)] - lc;
                    ls += lc * lc;
                    rs += rc * rc;
                }
                double gain = ls / lcnt + rs / rcnt - parent_score;
                if (gain > best.gain) {
                    best.gain = gain;
                    best.feature = feature;
                    best.categorical = true;
                    std::uint32_t left_mask = 0;
                    for (int b = 0; b < k; ++b)
                        if (mask & (1u << b))
                            left_mask |= 1u << node_levels[static_cast<std::size_t>(b)];
                    best.left_mask = left_mask;
                }
            }
        }
    }

    std::int32_t make_leaf(int begin, int end) {
        TreeNode leaf;
        const int size = end - begin;
        if (model.response_kind == ResponseKind::regression) {
            double sum = 0;
            for (int i = begin; i < end; ++i) sum += y[static_cast<std::size_t>(rows[static_cast<std::size_t>(i)])];
            leaf.value = sum / size;
        } else {
            leaf.votes.assign(static_cast<std::size_t>(model.n_classes), 0);
            for (int i = begin; i < end; ++i)
                leaf.votes[static_cast<std::size_t>(static_cast<int>(
                    y[static_cast<std::size_t>(rows[static_cast<std::size_t>(i)])]))]++;
            int best_class = 0;
            for (int c = 1; c < model.n_classes; ++c)
                if (leaf.votes[static_cast<std::size_t>(c)] > leaf.votes[static_cast<std::size_t>(best_class)])
                    best_class = c;
            leaf.value = best_class;
        }
        nodes.push_back(std::move(leaf));
        return static_cast<std::int32_t>(nodes.size() - 1);
    }

    std::int32_t build(int begin, int end) {
        const int size = end - begin;
        if (size < params.min_node_size || node_pure(begin, end)) return make_leaf(begin, end);

        // mtry candidate features, drawn without replacement, evaluated in
        // ascending index order so gain ties resolve to the lowest index.
        const int m = model.n_predictors();
        feature_pool.resize(static_cast<std::size_t>(m));
        std::iota(feature_pool.begin(), feature_pool.end(), 0);
        for (int i = 0; i < params.mtry; ++i) {
            std::size_t j = static_cast<std::size_t>(i) +
                            rng.uniform_index(static_cast<std::size_t>(m - i));
            std::swap(feature_pool[static_cast<std::size_t>(i)], feature_pool[j]);
        }
        std::sort(feature_pool.begin(), feature_pool.begin() + params.mtry);

        Split best;
        best.gain = 1e-12;  // require a strictly positive gain
        for (int i = 0; i < params.mtry; ++i) {
            int feature = feature_pool[static_cast<std::size_t>(i)];
            if (model.observed_levels[static_cast<std::size_t>(feature)].empty())
                best_continuous_split(feature, begin, end, best);
            else
                best_categorical_split(feature, begin, end, best);
        }
        if (best.feature < 0) return make_leaf(begin, end);

        // Partition rows in place, preserving relative order (stable).
        auto goes_left = [&](std::int32_t row) {
            double x = value_at(best.feature, row);
            if (!best.categorical) return x <= best.threshold;
            const auto& observed = model.observed_levels[static_cast<std::size_t>(best.feature)];
            auto it = std::lower_bound(observed.begin(), observed.end(), static_cast<int>(x));
            if (it == observed.end() || *it != static_cast<int>(x)) return false;
            return ((best.left_mask >> (it - observed.begin())) & 1u) != 0;
        };
        // Stable two-pass partition through a reused scratch buffer.
        partition_scratch.clear();
        int mid = begin;
        for (int i = begin; i < end; ++i) {
            std::int32_t row = rows[static_cast<std::size_t>(i)];
            if (goes_left(row)) rows[static_cast<std::size_t>(mid++)] = row;
            else partition_scratch.push_back(row);
        }
        std::copy(partition_scratch.begin(), partition_scratch.end(), rows.begin() + mid);

        TreeNode node;
        node.feature = best.feature;
        node.threshold = best.threshold;
        node.left_mask = best.left_mask;
        if (best.categorical) node.threshold = 0.0;
        nodes.push_back(node);
        std::int32_t id = static_cast<std::int32_t>(nodes.size() - 1);
        std::int32_t left = build(begin, mid);
        std::int32_t right = build(mid, end);
        nodes[static_cast<std::size_t>(id)].left = left;
        nodes[static_cast<std::size_t>(id)].right = right;
        return id;
    }
};

}  // namespace

double ForestModel::predict_tree(int tree, const MixedDataset& data, int row,
                                 int override_predictor, double override_value) const {
    const Tree& t = trees[static_cast<std::size_t>(tree)];
    std::int32_t id = 0;
    for (;;) {
        const TreeNode& node = t.nodes[static_cast<std::size_t>(id)];
        if (node.feature < 0) return node.value;
        double x = node.feature == override_predictor
                       ? override_value
                       : data.cell(row, predictor_column(node.feature));
        bool left;
        const auto& observed = observed_levels[static_cast<std::size_t>(node.feature)];
        if (observed.empty()) {
            left = x <= node.threshold;
        } else {
            auto it = std::lower_bound(observed.begin(), observed.end(), static_cast<int>(x));
            left = it != observed.end() && *it == static_cast<int>(x) &&
                   ((node.left_mask >> (it - observed.begin())) & 1u);
        }
        id = left ? node.left : node.right;
    }
}

double ForestModel::predict(const MixedDataset& data, int row) const {
    if (response_kind == ResponseKind::regression) {
        double sum = 0;
        for (std::size_t t = 0; t < trees.size(); ++t)
            sum += predict_tree(static_cast<int>(t), data, row);
        return sum / static_cast<double>(trees.size());
    }
    std::vector<int> votes(static_cast<std::size_t>(n_classes), 0);
    for (std::size_t t = 0; t < trees.size(); ++t)
        votes[static_cast<std::size_t>(static_cast<int>(predict_tree(static_cast<int>(t), data, row)))]++;
    int best = 0;
    for (int c = 1; c < n_classes; ++c)
        if (votes[static_cast<std::size_t>(c)] > votes[static_cast<std::size_t>(best)]) best = c;
    return best;
}

ForestModel fit_forest(const MixedDataset& data, int response, const ForestParams& params) {
    const int p = data.p();
    if (response < 0 || response >= p) throw std::invalid_argument("forest: response column out of range");
    if (p < 2) throw std::invalid_argument("forest: need at least one predictor");
    if (data.n() < 2) throw std::invalid_argument("forest: need at least 2 rows");

    ForestModel model;
    model.response_column = response;
    model.response_kind = data.is_categorical(response) ? ResponseKind::classification
                                                        : ResponseKind::regression;
    model.n_classes = model.response_kind == ResponseKind::classification ? data.n_levels(response) : 0;

    const int m = p - 1;
    ResolvedParams resolved = resolve(params, model.response_kind, m);

    // Observed level values per categorical predictor; split masks index
    // into these lists, so unseen levels at prediction time go right.
    model.observed_levels.resize(static_cast<std::size_t>(m));
    for (int q = 0; q < m; ++q) {
        int col = model.predictor_column(q);
        if (!data.is_categorical(col)) continue;
        std::vector<std::int32_t> seen;
        for (double v : data.values(col)) {
            auto it = std::lower_bound(seen.begin(), seen.end(), static_cast<std::int32_t>(v));
            if (it == seen.end() || *it != static_cast<std::int32_t>(v))
                seen.insert(it, static_cast<std::int32_t>(v));
        }
        if (seen.size() > kMaxSplitLevels)
            throw std::invalid_argument("forest: categorical predictor '" + data.column(col).name +
                                        "' observes more than 10 levels");
        model.observed_levels[static_cast<std::size_t>(q)] = std::move(seen);
    }
    // Continuous predictors keep empty lists (that is how they are told apart).

    auto y = data.values(response);
    model.constant_response = data.column_degenerate(response);

    const int n = data.n();
    model.trees.resize(static_cast<std::size_t>(resolved.n_trees));
    for (int t = 0; t < resolved.n_trees; ++t) {
        Rng rng = Rng::stream(resolved.seed, static_cast<std::uint64_t>(t));
        TreeBuilder builder(data, model, y, resolved, rng);
        builder.rows.resize(static_cast<std::size_t>(n));
        std::vector<std::uint8_t> in_bag(static_cast<std::size_t>(n), 0);
        for (int i = 0; i < n; ++i) {
            std::size_t r = builder.rng.uniform_index(static_cast<std::size_t>(n));
            builder.rows[static_cast<std::size_t>(i)] = static_cast<std::int32_t>(r);
            in_bag[r] = 1;
        }
        builder.nodes.reserve(64);
        builder.build(0, n);
        Tree& tree = model.trees[static_cast<std::size_t>(t)];
        tree.nodes = std::move(builder.nodes);
        for (int i = 0; i < n; ++i)
            if (!in_bag[static_cast<std::size_t>(i)]) tree.oob_rows.push_back(i);
    }
    return model;
}

namespace {

double tree_oob_error(const ForestModel& model, const MixedDataset& data, int t,
                      std::span<const double> y, int override_predictor,
                      const std::vector<double>& override_values) {
    const Tree& tree = model.trees[static_cast<std::size_t>(t)];
    if (tree.oob_rows.empty()) return 0.0;
    double err = 0;
    for (std::size_t k = 0; k < tree.oob_rows.size(); ++k) {
        std::int32_t row = tree.oob_rows[k];
        double pred = override_predictor < 0
                          ? model.predict_tree(t, data, row)
                          : model.predict_tree(t, data, row, override_predictor, override_values[k]);
        double truth = y[static_cast<std::size_t>(row)];
        if (model.response_kind == ResponseKind::regression)
            err += (pred - truth) * (pred - truth);
        else
            err += pred == truth ? 0.0 : 1.0;
    }
    return err / static_cast<double>(tree.oob_rows.size());
}

}  // namespace

std::vector<double> permutation_importance(const ForestModel& model, const MixedDataset& data,
                                           std::uint64_t seed) {
    const int m = model.n_predictors();
    auto y = data.values(model.response_column);
    std::vector<double> importance(static_cast<std::size_t>(m), 0.0);

    std::vector<std::uint8_t> used(static_cast<std::size_t>(m));
    std::vector<double> permuted;
    std::vector<std::size_t> order;
    for (std::size_t t = 0; t < model.trees.size(); ++t) {
        const Tree& tree = model.trees[t];
        if (tree.oob_rows.empty()) continue;
        Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(t));
        double base = tree_oob_error(model, data, static_cast<int>(t), y, -1, {});

        std::fill(used.begin(), used.end(), 0);
        for (const TreeNode& node : tree.nodes)
            if (node.feature >= 0) used[static_cast<std::size_t>(node.feature)] = 1;

        for (int q = 0; q < m; ++q) {
            if (!used[static_cast<std::size_t>(q)]) continue;  // predictions unchanged, difference 0
            order.resize(tree.oob_rows.size());
            std::iota(order.begin(), order.end(), std::size_t{0});
            rng.shuffle(order);
            permuted.resize(tree.oob_rows.size());
            int col = model.predictor_column(q);
            for (std::size_t k = 0; k < order.size(); ++k)
                permuted[k] = data.cell(tree.oob_rows[order[k]], col);
            double shuffled = tree_oob_error(model, data, static_cast<int>(t), y, q, permuted);
            importance[static_cast<std::size_t>(q)] += shuffled - base;
        }
    }
    for (double& v : importance) v /= static_cast<double>(model.trees.size());
    return importance;
}

double oob_error(const ForestModel& model, const MixedDataset& data) {
    const int n = data.n();
    auto y = data.values(model.response_column);
    // Collect, per row, the trees holding it out.
    std::vector<std::vector<std::int32_t>> oob_trees(static_cast<std::size_t>(n));
    for (std::size_t t = 0; t < model.trees.size(); ++t)
        for (std::int32_t row : model.trees[t].oob_rows)
            oob_trees[static_cast<std::size_t>(row)].push_back(static_cast<std::int32_t>(t));

    double err = 0;
    int covered = 0;
    std::vector<int> votes;
    for (int i = 0; i < n; ++i) {
        const auto& trees = oob_trees[static_cast<std::size_t>(i)];
        if (trees.empty()) continue;
        ++covered;
        if (model.response_kind == ResponseKind::regression) {
            double sum = 0;
            for (std::int32_t t : trees) sum += model.predict_tree(t, data, i);
            double pred = sum / static_cast<double>(trees.size());
            err += (pred - y[static_cast<std::size_t>(i)]) * (pred - y[static_cast<std::size_t>(i)]);
        } else {
            votes.assign(static_cast<std::size_t>(model.n_classes), 0);
            for (std::int32_t t : trees)
                votes[static_cast<std::size_t>(static_cast<int>(model.predict_tree(t, data, i)))]++;
            int best = 0;
            for (int c = 1; c < model.n_classes; ++c)
                if (votes[static_cast<std::size_t>(c)] > votes[static_cast<std::size_t>(best)]) best = c;
            err += best == static_cast<int>(y[static_cast<std::size_t>(i)]) ? 0.0 : 1.0;
        }
    }
    if (covered == 0) throw std::runtime_error("forest: no out-of-bag rows");
    return err / covered;
}

RankedEdges combine_conservative_ranks(int p, const std::vector<std::vector<double>>& local_ranks) {
    if (static_cast<int>(local_ranks.size()) != p)
        throw std::invalid_argument("combine_conservative_ranks: need one rank vector per column");
    RankedEdges out;
    out.p = p;
    const double inf = std::numeric_limits<double>::infinity();
    for (int i = 0; i < p; ++i) {
        for (int j = i + 1; j < p; ++j) {
            double rank = -1;
            const auto& in_j = local_ranks[static_cast<std::size_t>(j)];  // i as predictor of j
            const auto& in_i = local_ranks[static_cast<std::size_t>(i)];  // j as predictor of i
            if (!in_j.empty()) rank = std::max(rank, in_j[static_cast<std::size_t>(i)]);
            if (!in_i.empty()) rank = std::max(rank, in_i[static_cast<std::size_t>(j)]);
            bool ok = rank > 0;
            out.entries.push_back({Edge{i, j}, ok ? rank : inf, ok});
        }
    }
    return out;
}

RankedEdges grafo_rank(const MixedDataset& data, const ForestParams& params, int workers) {
    const int p = data.p();
    if (p < 2) throw std::invalid_argument("grafo: need at least 2 columns");

    std::vector<std::vector<double>> local_ranks(static_cast<std::size_t>(p));
    parallel_for(static_cast<std::size_t>(p), workers, [&](std::size_t jz) {
        const int j = static_cast<int>(jz);
        if (data.column_degenerate(j)) return;  // this regression contributes no edges
        ForestParams fp = params;
        fp.seed = mix_seed(params.seed, 2 * static_cast<std::uint64_t>(j));
        ForestModel model = fit_forest(data, j, fp);
        std::vector<double> importance = permutation_importance(
            model, data, mix_seed(params.seed, 2 * static_cast<std::uint64_t>(j) + 1));
        std::vector<double> pred_ranks = fractional_ranks_desc(importance);
        auto& out = local_ranks[jz];
        out.assign(static_cast<std::size_t>(p), 0.0);
        for (int q = 0; q < p - 1; ++q)
            out[static_cast<std::size_t>(model.predictor_column(q))] = pred_ranks[static_cast<std::size_t>(q)];
    });
    return combine_conservative_ranks(p, local_ranks);
}

std::string dump_tree(const ForestModel& model, const MixedDataset& data, int tree) {
    std::ostringstream out;
    const Tree& t = model.trees[static_cast<std::size_t>(tree)];
    auto walk = [&](auto&& self, std::int32_t id, int depth) -> void {
        const TreeNode& node = t.nodes[static_cast<std::size_t>(id)];
        for (int d = 0; d < depth; ++d) out << "  ";
        if (node.feature < 0) {
            out << "leaf value=" << node.value;
            if (!node.votes.empty()) {
                out << " votes=[";
                for (std::size_t c = 0; c < node.votes.size(); ++c)
                    out << (c ? "," : "") << node.votes[c];
                out << "]";
            }
            out << "\n";
            return;
        }
        int col = model.predictor_column(node.feature);
        out << data.column(col).name;
        if (model.observed_levels[static_cast<std::size_t>(node.feature)].empty()) {
            out << " <= " << node.threshold << "\n";
        } else {
            out << " in {";
            const auto& observed = model.observed_levels[static_cast<std::size_t>(node.feature)];
            bool first = true;
            for (std::size_t b = 0; b < observed.size(); ++b) {
                if ((node.left_mask >> b) & 1u) {
                    if (!first) out << ",";
                    out << data.column(col).type.levels[static_cast<std::size_t>(observed[b])];
                    first = false;
                }
            }
            out << "}\n";
        }
        self(self, node.left, depth + 1);
        self(self, node.right, depth + 1);
    };
    walk(walk, 0, 0);
    return out.str();
}

}  // namespace cig
