#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cig/dataset.hpp"
#include "cig/ranking.hpp"

namespace cig {

enum class DagKind {
    gaussian,
    gaussian_interactions,
    gaussian_nonlinear,
    bernoulli,
    multinomial,
    mixed
};

DagKind dag_kind_from_string(const std::string& name);
std::string to_string(DagKind kind);

/// One interaction term b * x_i * x_k feeding the mean of some response.
struct Interaction {
    int i = 0;
    int k = 0;
    double weight = 0.0;
};

/// DAG-based generative model. Variables are sampled in index order, so the
/// strictly upper-triangular weight matrix encodes all directed edges.
struct DagModel {
    DagKind kind = DagKind::gaussian;
    int p = 0;
    std::vector<std::vector<double>> weights;          // weights[i][j], nonzero only for i < j
    std::vector<std::vector<Interaction>> interactions;  // per response j (gaussian_interactions)
    std::vector<std::vector<int>> linear_parents;        // per response j (gaussian_nonlinear);
                                                         // remaining parents enter through log|x|
    std::vector<int> levels;                             // per variable: 0 continuous, else C_j
    // Sign vectors attached to edges (i, j): u[i][j] has one entry per level
    // of a categorical predictor i, v[i][j] one per level of response j
    // (length 1 for a continuous response in the mixed model).
    std::map<std::pair<int, int>, std::vector<int>> u, v;

    bool is_categorical_var(int j) const { return levels[static_cast<std::size_t>(j)] > 0; }
    std::vector<int> parents(int j) const;
};

/// Sparse random model: each upper-triangular weight is nonzero with
/// probability 0.01, magnitude uniform on [0.1, 1], sign uniform. Interaction
/// sets, nonlinear splits, level counts and sign vectors are drawn per kind.
DagModel sample_dag_model(DagKind kind, int p, std::uint64_t seed);

/// Linear predictors eta_j^(s) for response j given the values of its
/// predecessors: one entry per level of a categorical response, a single
/// entry for a continuous one. log|0| contributions are treated as 0.
std::vector<double> dag_eta(const DagModel& model, int j, std::span<const double> x);

/// Ancestral sampling of n rows in variable order, following each kind's
/// link exactly. Column x<k> is continuous or categorical as the model says.
MixedDataset sample_data(const DagModel& model, int n, std::uint64_t seed);

struct TrueCig {
    int p = 0;
    std::vector<Edge> edges;  // sorted
    bool has(const Edge& e) const;
};

/// DAG -> CIG: every parent-child pair plus every co-parent pair, undirected.
TrueCig moralize(const DagModel& model);

/// Pairwise binary Markov random field on states {-1, +1}; theta is symmetric
/// with entries in {-1, 0, 1} and the diagonal holds the external fields.
struct IsingModel {
    int p = 0;
    std::vector<std::vector<int>> theta;
};

/// Off-diagonal entries nonzero with probability min(1, 4/(p-1)) for an
/// expected neighborhood of 4, values +-1 uniform; diagonal uniform on
/// {-1, 0, 1}; symmetric by construction.
IsingModel sample_ising(int p, std::uint64_t seed);

/// Edges = nonzero off-diagonal pattern of theta.
TrueCig ising_cig(const IsingModel& model);

/// Systematic-scan Gibbs sampler targeting
///   p(x) = exp(sum_i theta_ii x_i + sum_{i<j} theta_ij x_i x_j - Gamma),
/// full conditional P(x_i = +1 | rest) = 1/(1 + exp(-2(theta_ii +
/// sum_{j != i} theta_ij x_j))). Returns n draws, thin_sweeps sweeps apart,
/// after burn_in_sweeps sweeps; columns are -1/+1 categorical.
MixedDataset gibbs_sample(const IsingModel& model, int n, int burn_in_sweeps = 1000,
                          int thin_sweeps = 100, std::uint64_t seed = 0);

void write_true_cig_tsv(const std::string& path, const TrueCig& cig);
void write_dag_model_json(const std::string& path, const DagModel& model, std::uint64_t seed);
void write_ising_model_json(const std::string& path, const IsingModel& model, std::uint64_t seed);

}  // namespace cig
