#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cig/dataset.hpp"
#include "cig/ranking.hpp"

namespace cig {

enum class Family { linear, logistic };

struct LassoParams {
    int n_lambda = 100;
    double lambda_min_ratio = 0.01;
    double tolerance = 1e-7;
    int max_iter = 100000;  // coordinate-descent sweeps per grid point
};

/// Regularization path on a geometric lambda grid. Coefficients are reported
/// on the original predictor scale; entry_lambda[j] is the largest grid
/// lambda at which predictor j is active, 0 if it never enters.
struct LassoPath {
    std::vector<double> lambdas;              // strictly decreasing, lambdas[0] = lambda_max
    std::vector<double> intercepts;           // per grid point
    std::vector<std::vector<double>> coefs;   // per grid point, length = #predictors
    std::vector<double> entry_lambda;         // per predictor
};

/// Cyclic coordinate descent with warm starts along the path. Predictors are
/// standardized internally (mean 0, variance 1); linear responses are
/// centered; logistic responses must be -1/+1 with both classes present and
/// are solved by IRLS with inner coordinate descent. KKT stationarity holds
/// at `tolerance` for every grid point.
LassoPath lasso_path(const std::vector<std::vector<double>>& x_columns,
                     std::span<const double> y, Family family, const LassoParams& params);

/// Single cold-start fit at one fixed lambda (no warm start); used to
/// cross-check the warm-started path.
struct LassoFit {
    double intercept = 0.0;
    std::vector<double> coefs;
};
LassoFit lasso_fit_single(const std::vector<std::vector<double>>& x_columns,
                          std::span<const double> y, Family family, double lambda,
                          const LassoParams& params);

/// Entry penalty of one predictor in one response's path, with the
/// |coefficient| one grid step below the entry point as tie-break magnitude.
struct DirectedEntry {
    double entry = 0.0;
    double coef_below = 0.0;
};

/// Per-response entry penalties combined into globally ranked edges:
/// lambda(i-j) = min(entries[j][i], entries[i][j]), edges ordered by that
/// penalty descending (ties by coef_below, then average ranks). Edges with
/// penalty 0 are unrankable. entries is p x p, indexed [response][predictor].
RankedEdges combine_entry_penalties(const std::vector<std::vector<DirectedEntry>>& entries);

/// The StabLASSO base learner. Data must be all-continuous (linear family)
/// or all -1/+1 (logistic family); mixed data must pass through dichotomize
/// first. Degenerate columns inside `data` contribute no rankable edges.
RankedEdges stablasso_rank(const MixedDataset& data, const LassoParams& params, int workers = 1);
RankedEdges stablasso_rank(const BinaryDataset& data, const LassoParams& params, int workers = 1);

}  // namespace cig
