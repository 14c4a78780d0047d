#include "cig/lasso.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "cig/parallel.hpp"

namespace cig {

namespace {

struct Standardized {
    std::vector<std::vector<double>> x;  // mean 0, variance 1 (1/n normalization)
    std::vector<double> mean, sd;
    int n = 0, m = 0;
};

Standardized standardize(const std::vector<std::vector<double>>& x_columns) {
    Standardized s;
    s.m = static_cast<int>(x_columns.size());
    if (s.m == 0) throw std::invalid_argument("lasso: no predictors");
    s.n = static_cast<int>(x_columns[0].size());
    s.x.resize(static_cast<std::size_t>(s.m));
    s.mean.resize(static_cast<std::size_t>(s.m));
    s.sd.resize(static_cast<std::size_t>(s.m));
    for (int j = 0; j < s.m; ++j) {
        const auto& col = x_columns[static_cast<std::size_t>(j)];
        if (static_cast<int>(col.size()) != s.n) throw std::invalid_argument("lasso: ragged predictor matrix");
        bool constant = std::all_of(col.begin(), col.end(), [&](double v) { return v == col[0]; });
        double mean = 0;
        for (double v : col) mean += v;
        mean /= s.n;
        double var = 0;
        for (double v : col) var += (v - mean) * (v - mean);
        var /= s.n;
        if (constant || var <= 0.0)
            throw std::invalid_argument("lasso: zero-variance predictor " + std::to_string(j));
        double sd = std::sqrt(var);
        s.mean[static_cast<std::size_t>(j)] = mean;
        s.sd[static_cast<std::size_t>(j)] = sd;
        auto& out = s.x[static_cast<std::size_t>(j)];
        out.resize(col.size());
        for (std::size_t i = 0; i < col.size(); ++i) out[i] = (col[i] - mean) / sd;
    }
    return s;
}

double soft_threshold(double z, double lambda) {
    if (z > lambda) return z - lambda;
    if (z < -lambda) return z + lambda;
    return 0.0;
}

// State for one solve in the standardized problem. Sweeps run over a working
// set of predictors (sequential strong-rule screening); a full KKT pass after
// convergence admits any violators, so screening never changes the solution.
struct Solver {
    const Standardized& s;
    std::span<const double> y;  // linear: centered response; logistic: -1/+1
    Family family;
    const LassoParams& params;
    std::vector<double> beta;   // standardized-scale coefficients
    double intercept = 0.0;
    std::vector<double> eta;    // logistic: current X*beta (intercept kept apart)
    std::vector<double> res;    // linear: current residual y - X*beta
    std::vector<int> working;   // ascending predictor indices in the current sweeps
    std::vector<std::uint8_t> in_working;

    Solver(const Standardized& s_, std::span<const double> y_, Family family_,
           const LassoParams& params_)
        : s(s_), y(y_), family(family_), params(params_),
          beta(static_cast<std::size_t>(s_.m), 0.0), eta(static_cast<std::size_t>(s_.n), 0.0),
          res(y_.begin(), y_.end()), in_working(static_cast<std::size_t>(s_.m), 0) {}

    // Gradient of the smooth loss wrt beta_j. Linear: loss = (1/2n)||res||^2,
    // grad_j = -(1/n) <x_j, res>. Logistic: loss = (1/n) sum log(1+exp(-y_i f_i)),
    // grad_j = -(1/n) sum x_ij y_i sigma(-y_i f_i) with f = intercept + eta.
    double gradient(int j) const {
        const auto& xj = s.x[static_cast<std::size_t>(j)];
        double g = 0;
        if (family == Family::linear) {
            for (int i = 0; i < s.n; ++i) g -= xj[static_cast<std::size_t>(i)] * res[static_cast<std::size_t>(i)];
        } else {
            for (int i = 0; i < s.n; ++i) {
                double margin = y[static_cast<std::size_t>(i)] * (intercept + eta[static_cast<std::size_t>(i)]);
                g -= xj[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(i)] / (1.0 + std::exp(margin));
            }
        }
        return g / s.n;
    }

    double kkt_violation_at(int j, double g, double lambda) const {
        double b = beta[static_cast<std::size_t>(j)];
        return b == 0.0 ? std::max(0.0, std::fabs(g) - lambda)
                        : std::fabs(g + lambda * (b > 0 ? 1.0 : -1.0));
    }

    double max_kkt_violation_working(double lambda) const {
        double worst = 0;
        for (int j : working) worst = std::max(worst, kkt_violation_at(j, gradient(j), lambda));
        return worst;
    }

    void use_all_predictors() {
        working.resize(static_cast<std::size_t>(s.m));
        for (int j = 0; j < s.m; ++j) working[static_cast<std::size_t>(j)] = j;
        std::fill(in_working.begin(), in_working.end(), 1);
    }

    // Sequential strong rule at the warm start: keep active predictors and
    // those with |gradient| >= 2*lambda - lambda_prev.
    void screen_working(double lambda, double lambda_prev) {
        working.clear();
        std::fill(in_working.begin(), in_working.end(), 0);
        double cutoff = 2.0 * lambda - lambda_prev;
        for (int j = 0; j < s.m; ++j) {
            if (beta[static_cast<std::size_t>(j)] != 0.0 || std::fabs(gradient(j)) >= cutoff) {
                working.push_back(j);
                in_working[static_cast<std::size_t>(j)] = 1;
            }
        }
    }

    // Full KKT pass; appends predictors outside the working set whose
    // violation reaches the tolerance. Returns true if any were added.
    bool admit_violators(double lambda) {
        bool added = false;
        for (int j = 0; j < s.m; ++j) {
            if (in_working[static_cast<std::size_t>(j)]) continue;
            if (kkt_violation_at(j, gradient(j), lambda) >= params.tolerance) {
                working.push_back(j);
                in_working[static_cast<std::size_t>(j)] = 1;
                added = true;
            }
        }
        if (added) std::sort(working.begin(), working.end());
        return added;
    }

    // One cyclic sweep over the maintained residual; with standardized
    // predictors <x_j, x_j>/n = 1, each coordinate update is an exact
    // soft-threshold step.
    double sweep_linear(double lambda, bool active_only) {
        double max_delta = 0;
        const int n = s.n;
        for (int j : working) {
            double old = beta[static_cast<std::size_t>(j)];
            if (active_only && old == 0.0) continue;
            const double* xj = s.x[static_cast<std::size_t>(j)].data();
            double rho = 0;
            for (int i = 0; i < n; ++i) rho += xj[i] * res[static_cast<std::size_t>(i)];
            rho = rho / n + old;
            double updated = soft_threshold(rho, lambda);
            if (updated != old) {
                double delta = updated - old;
                for (int i = 0; i < n; ++i) res[static_cast<std::size_t>(i)] -= delta * xj[i];
                beta[static_cast<std::size_t>(j)] = updated;
                max_delta = std::max(max_delta, std::fabs(delta));
            }
        }
        return max_delta;
    }

    void solve_linear(double lambda) {
        int iter = 0;
        for (;;) {
            while (iter < params.max_iter) {
                ++iter;
                if (sweep_linear(lambda, true) < params.tolerance) break;
            }
            ++iter;
            double full_delta = sweep_linear(lambda, false);
            if (iter >= params.max_iter) return;
            if (full_delta < params.tolerance && max_kkt_violation_working(lambda) < params.tolerance)
                return;
        }
    }

    void solve_logistic(double lambda) {
        // IRLS: quadratic expansion at the current eta, inner coordinate
        // descent on the penalized weighted least squares problem. Within a
        // round the working residual r = z - intercept - eta is maintained
        // incrementally and the curvatures den_j = <w, x_j^2>/n are fixed.
        const int n = s.n;
        std::vector<double> w(static_cast<std::size_t>(n)), r(static_cast<std::size_t>(n));
        std::vector<double> den(static_cast<std::size_t>(s.m), 0.0);
        for (int outer = 0; outer < params.max_iter; ++outer) {
            double w_total = 0;
            for (int i = 0; i < n; ++i) {
                double f = intercept + eta[static_cast<std::size_t>(i)];
                double prob = 1.0 / (1.0 + std::exp(-f));  // P(y = +1)
                double wi = std::max(prob * (1.0 - prob), 1e-6);
                double y01 = y[static_cast<std::size_t>(i)] > 0 ? 1.0 : 0.0;
                w[static_cast<std::size_t>(i)] = wi;
                w_total += wi;
                r[static_cast<std::size_t>(i)] = (y01 - prob) / wi;  // z - f at the expansion point
            }
            for (int j : working) {
                const double* xj = s.x[static_cast<std::size_t>(j)].data();
                double d = 0;
                for (int i = 0; i < n; ++i) d += w[static_cast<std::size_t>(i)] * xj[i] * xj[i];
                den[static_cast<std::size_t>(j)] = d / n;
            }
            auto sweep_wls = [&](bool active_only) {
                double max_delta = 0;
                // intercept (unpenalized)
                {
                    double num = 0;
                    for (int i = 0; i < n; ++i) num += w[static_cast<std::size_t>(i)] * r[static_cast<std::size_t>(i)];
                    double delta = num / w_total;
                    intercept += delta;
                    for (int i = 0; i < n; ++i) r[static_cast<std::size_t>(i)] -= delta;
                    max_delta = std::max(max_delta, std::fabs(delta));
                }
                for (int j : working) {
                    double old = beta[static_cast<std::size_t>(j)];
                    if (active_only && old == 0.0) continue;
                    const double* xj = s.x[static_cast<std::size_t>(j)].data();
                    double num = 0;
                    for (int i = 0; i < n; ++i)
                        num += w[static_cast<std::size_t>(i)] * xj[i] * r[static_cast<std::size_t>(i)];
                    double dj = den[static_cast<std::size_t>(j)];
                    double updated = soft_threshold(num / n + old * dj, lambda) / dj;
                    if (updated != old) {
                        double delta = updated - old;
                        for (int i = 0; i < n; ++i) {
                            eta[static_cast<std::size_t>(i)] += delta * xj[i];
                            r[static_cast<std::size_t>(i)] -= delta * xj[i];
                        }
                        beta[static_cast<std::size_t>(j)] = updated;
                        max_delta = std::max(max_delta, std::fabs(delta));
                    }
                }
                return max_delta;
            };
            double max_outer_delta = 0;
            for (int inner = 0; inner < params.max_iter; ++inner) {
                while (inner < params.max_iter && sweep_wls(true) >= params.tolerance) ++inner;
                double max_delta = sweep_wls(false);
                max_outer_delta = std::max(max_outer_delta, max_delta);
                if (max_delta < params.tolerance) break;
            }
            if (max_outer_delta < params.tolerance && max_kkt_violation_working(lambda) < params.tolerance)
                return;
        }
    }

    void solve_restricted(double lambda) {
        if (family == Family::linear) solve_linear(lambda);
        else solve_logistic(lambda);
    }

    // Cold solve over every predictor (single fits).
    void solve(double lambda) {
        use_all_predictors();
        solve_restricted(lambda);
    }

    // Warm path step: screen, solve, then re-admit anything the screen missed.
    void solve_path_step(double lambda, double lambda_prev) {
        screen_working(lambda, lambda_prev);
        for (;;) {
            solve_restricted(lambda);
            if (!admit_violators(lambda)) return;
        }
    }

    // At lambda_max the solution is beta = 0 with the intercept-only fit;
    // setting it directly keeps the first grid point exact.
    void set_intercept_only() {
        std::fill(beta.begin(), beta.end(), 0.0);
        std::fill(eta.begin(), eta.end(), 0.0);
        res.assign(y.begin(), y.end());
        if (family == Family::linear) {
            intercept = 0.0;  // response is centered
        } else {
            double pos = 0;
            for (int i = 0; i < s.n; ++i)
                if (y[static_cast<std::size_t>(i)] > 0) pos += 1.0;
            double p_hat = pos / s.n;
            intercept = std::log(p_hat / (1.0 - p_hat));
        }
    }
};

double lambda_max_of(const Standardized& s, std::span<const double> y, Family family) {
    // Linear: max_j |<x_j, y>|/n on the centered response. Logistic:
    // max_j |<x_j, y/2>|/n, the gradient magnitude at the intercept-only fit.
    double lmax = 0;
    for (int j = 0; j < s.m; ++j) {
        const auto& xj = s.x[static_cast<std::size_t>(j)];
        double dot = 0;
        for (int i = 0; i < s.n; ++i) dot += xj[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(i)];
        dot /= s.n;
        if (family == Family::logistic) dot *= 0.5;
        lmax = std::max(lmax, std::fabs(dot));
    }
    return lmax;
}

void check_params(const LassoParams& params) {
    if (params.n_lambda < 1 || params.lambda_min_ratio <= 0 || params.lambda_min_ratio >= 1 ||
        params.tolerance <= 0 || params.max_iter < 1)
        throw std::invalid_argument("lasso: invalid parameters");
}

std::vector<double> prepare_response(std::span<const double> y, Family family, double* y_mean) {
    std::vector<double> out(y.begin(), y.end());
    *y_mean = 0.0;
    if (family == Family::linear) {
        double mean = 0;
        for (double v : out) mean += v;
        mean /= static_cast<double>(out.size());
        for (double& v : out) v -= mean;
        *y_mean = mean;
    } else {
        bool pos = false, neg = false;
        for (double v : out) {
            if (v == 1.0) pos = true;
            else if (v == -1.0) neg = true;
            else throw std::invalid_argument("lasso: logistic response must be -1/+1");
        }
        if (!pos || !neg) throw std::invalid_argument("lasso: logistic response has a single class");
    }
    return out;
}

}  // namespace

LassoPath lasso_path(const std::vector<std::vector<double>>& x_columns, std::span<const double> y,
                     Family family, const LassoParams& params) {
    check_params(params);
    Standardized s = standardize(x_columns);
    if (static_cast<int>(y.size()) != s.n) throw std::invalid_argument("lasso: response length mismatch");
    double y_mean = 0;
    std::vector<double> yy = prepare_response(y, family, &y_mean);

    double lmax = lambda_max_of(s, yy, family);
    if (lmax <= 0) lmax = 1e-12;  // response orthogonal to every predictor
    LassoPath path;
    path.lambdas.resize(static_cast<std::size_t>(params.n_lambda));
    double ratio = params.n_lambda == 1
                       ? 1.0
                       : std::pow(params.lambda_min_ratio, 1.0 / (params.n_lambda - 1));
    double lam = lmax;
    for (int k = 0; k < params.n_lambda; ++k) {
        path.lambdas[static_cast<std::size_t>(k)] = lam;
        lam *= ratio;
    }

    Solver solver(s, yy, family, params);
    path.coefs.resize(static_cast<std::size_t>(params.n_lambda));
    path.intercepts.resize(static_cast<std::size_t>(params.n_lambda));
    path.entry_lambda.assign(static_cast<std::size_t>(s.m), 0.0);

    for (int k = 0; k < params.n_lambda; ++k) {
        if (k == 0)
            solver.set_intercept_only();
        else
            solver.solve_path_step(path.lambdas[static_cast<std::size_t>(k)],
                                   path.lambdas[static_cast<std::size_t>(k - 1)]);
        // back-transform to the original predictor scale
        std::vector<double> orig(static_cast<std::size_t>(s.m));
        double icept = family == Family::linear ? y_mean : solver.intercept;
        for (int j = 0; j < s.m; ++j) {
            double b = solver.beta[static_cast<std::size_t>(j)] / s.sd[static_cast<std::size_t>(j)];
            orig[static_cast<std::size_t>(j)] = b;
            icept -= b * s.mean[static_cast<std::size_t>(j)];
        }
        path.coefs[static_cast<std::size_t>(k)] = std::move(orig);
        path.intercepts[static_cast<std::size_t>(k)] = icept;
        for (int j = 0; j < s.m; ++j)
            if (path.entry_lambda[static_cast<std::size_t>(j)] == 0.0 &&
                solver.beta[static_cast<std::size_t>(j)] != 0.0)
                path.entry_lambda[static_cast<std::size_t>(j)] = path.lambdas[static_cast<std::size_t>(k)];
    }
    return path;
}

LassoFit lasso_fit_single(const std::vector<std::vector<double>>& x_columns,
                          std::span<const double> y, Family family, double lambda,
                          const LassoParams& params) {
    check_params(params);
    if (lambda < 0) throw std::invalid_argument("lasso: negative lambda");
    Standardized s = standardize(x_columns);
    double y_mean = 0;
    std::vector<double> yy = prepare_response(y, family, &y_mean);
    Solver solver(s, yy, family, params);
    solver.solve(lambda);
    LassoFit fit;
    fit.coefs.resize(static_cast<std::size_t>(s.m));
    fit.intercept = family == Family::linear ? y_mean : solver.intercept;
    for (int j = 0; j < s.m; ++j) {
        double b = solver.beta[static_cast<std::size_t>(j)] / s.sd[static_cast<std::size_t>(j)];
        fit.coefs[static_cast<std::size_t>(j)] = b;
        fit.intercept -= b * s.mean[static_cast<std::size_t>(j)];
    }
    return fit;
}

RankedEdges combine_entry_penalties(const std::vector<std::vector<DirectedEntry>>& entries) {
    const int p = static_cast<int>(entries.size());
    RankedEdges out;
    out.p = p;

    std::vector<Edge> edges;
    std::vector<double> penalty, coef_mag;
    for (int i = 0; i < p; ++i) {
        for (int j = i + 1; j < p; ++j) {
            const DirectedEntry& ij = entries[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
            const DirectedEntry& ji = entries[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            edges.push_back({i, j});
            if (ij.entry < ji.entry) {
                penalty.push_back(ij.entry);
                coef_mag.push_back(ij.coef_below);
            } else if (ji.entry < ij.entry) {
                penalty.push_back(ji.entry);
                coef_mag.push_back(ji.coef_below);
            } else {
                penalty.push_back(ij.entry);
                coef_mag.push_back(std::max(ij.coef_below, ji.coef_below));
            }
        }
    }

    // Rank rankable edges by (penalty desc, coef magnitude desc); exact ties
    // share average ranks. Penalty 0 means never active in one direction.
    std::vector<std::size_t> rankable;
    for (std::size_t e = 0; e < edges.size(); ++e)
        if (penalty[e] > 0.0) rankable.push_back(e);

    std::vector<std::size_t> order = rankable;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (penalty[a] != penalty[b]) return penalty[a] > penalty[b];
        if (coef_mag[a] != coef_mag[b]) return coef_mag[a] > coef_mag[b];
        return edges[a] < edges[b];
    });
    std::vector<double> rank_of(edges.size(), 0.0);
    std::size_t start = 0;
    while (start < order.size()) {
        std::size_t end = start;
        while (end + 1 < order.size() && penalty[order[end + 1]] == penalty[order[start]] &&
               coef_mag[order[end + 1]] == coef_mag[order[start]])
            ++end;
        double avg = 0.5 * static_cast<double>(start + end) + 1.0;
        for (std::size_t k = start; k <= end; ++k) rank_of[order[k]] = avg;
        start = end + 1;
    }

    const double inf = std::numeric_limits<double>::infinity();
    for (std::size_t e = 0; e < edges.size(); ++e) {
        bool ok = penalty[e] > 0.0;
        out.entries.push_back({edges[e], ok ? rank_of[e] : inf, ok});
    }
    return out;
}

RankedEdges stablasso_rank(const MixedDataset& data, const LassoParams& params, int workers) {
    const int p = data.p();
    if (p < 2) throw std::invalid_argument("stablasso: need at least 2 columns");
    for (int j = 0; j < p; ++j)
        if (data.is_categorical(j))
            throw std::invalid_argument(
                "stablasso: categorical column '" + data.column(j).name +
                "'; mixed data must pass through dichotomize first");

    // Family: logistic when every column is -1/+1, linear otherwise.
    bool all_pm1 = true;
    for (int j = 0; j < p && all_pm1; ++j)
        for (double v : data.values(j))
            if (v != -1.0 && v != 1.0) {
                all_pm1 = false;
                break;
            }
    Family family = all_pm1 ? Family::logistic : Family::linear;

    // Columns that are degenerate here (constant in a subsample) are skipped
    // as responses and excluded as predictors; their edges stay unrankable.
    std::vector<bool> usable(static_cast<std::size_t>(p));
    for (int j = 0; j < p; ++j) usable[static_cast<std::size_t>(j)] = !data.column_degenerate(j);

    std::vector<std::vector<DirectedEntry>> entries(
        static_cast<std::size_t>(p), std::vector<DirectedEntry>(static_cast<std::size_t>(p)));

    parallel_for(static_cast<std::size_t>(p), workers, [&](std::size_t jz) {
        const int j = static_cast<int>(jz);
        if (!usable[jz]) return;
        std::vector<std::vector<double>> x_cols;
        std::vector<int> col_of;
        for (int i = 0; i < p; ++i) {
            if (i == j || !usable[static_cast<std::size_t>(i)]) continue;
            auto v = data.values(i);
            x_cols.emplace_back(v.begin(), v.end());
            col_of.push_back(i);
        }
        if (x_cols.empty()) return;
        LassoPath path = lasso_path(x_cols, data.values(j), family, params);
        for (std::size_t q = 0; q < col_of.size(); ++q) {
            DirectedEntry& d = entries[jz][static_cast<std::size_t>(col_of[q])];
            d.entry = path.entry_lambda[q];
            if (d.entry > 0.0) {
                // |coefficient| one grid step below the entry lambda
                auto it = std::find(path.lambdas.begin(), path.lambdas.end(), d.entry);
                std::size_t k = static_cast<std::size_t>(it - path.lambdas.begin());
                std::size_t below = std::min(k + 1, path.lambdas.size() - 1);
                d.coef_below = std::fabs(path.coefs[below][q]);
            }
        }
    });

    return combine_entry_penalties(entries);
}

RankedEdges stablasso_rank(const BinaryDataset& data, const LassoParams& params, int workers) {
    return stablasso_rank(data.as_mixed(), params, workers);
}

}  // namespace cig
