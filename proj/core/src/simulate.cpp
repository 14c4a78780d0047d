#include "cig/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "cig/rng.hpp"

namespace cig {

DagKind dag_kind_from_string(const std::string& name) {
    if (name == "gaussian") return DagKind::gaussian;
    if (name == "gaussian_interactions") return DagKind::gaussian_interactions;
    if (name == "gaussian_nonlinear") return DagKind::gaussian_nonlinear;
    if (name == "bernoulli") return DagKind::bernoulli;
    if (name == "multinomial") return DagKind::multinomial;
    if (name == "mixed") return DagKind::mixed;
    throw std::invalid_argument(
        "unknown model '" + name +
        "' (valid: gaussian, gaussian_interactions, gaussian_nonlinear, bernoulli, multinomial, "
        "mixed, ising)");
}

std::string to_string(DagKind kind) {
    switch (kind) {
        case DagKind::gaussian: return "gaussian";
        case DagKind::gaussian_interactions: return "gaussian_interactions";
        case DagKind::gaussian_nonlinear: return "gaussian_nonlinear";
        case DagKind::bernoulli: return "bernoulli";
        case DagKind::multinomial: return "multinomial";
        case DagKind::mixed: return "mixed";
    }
    return "?";
}

std::vector<int> DagModel::parents(int j) const {
    std::vector<int> out;
    for (int i = 0; i < j; ++i)
        if (weights[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] != 0.0) out.push_back(i);
    return out;
}

namespace {

double sample_weight(Rng& rng) {
    double magnitude = rng.uniform(0.1, 1.0);
    return rng.bernoulli(0.5) ? magnitude : -magnitude;
}

// Sign vector in {-1,+1}^len whose sum stays strictly inside (-len, len),
// i.e. both signs occur; unconstrained for len 1.
std::vector<int> sample_sign_vector(Rng& rng, int len) {
    std::vector<int> v(static_cast<std::size_t>(len));
    for (;;) {
        int sum = 0;
        for (int& s : v) {
            s = rng.bernoulli(0.5) ? 1 : -1;
            sum += s;
        }
        if (len == 1 || std::abs(sum) < len) return v;
    }
}

int nearest_half(int count) { return static_cast<int>(std::llround(0.5 * count)); }

}  // namespace

DagModel sample_dag_model(DagKind kind, int p, std::uint64_t seed) {
    if (p < 2) throw std::invalid_argument("simulate: p must be >= 2");
    DagModel model;
    model.kind = kind;
    model.p = p;
    model.weights.assign(static_cast<std::size_t>(p), std::vector<double>(static_cast<std::size_t>(p), 0.0));
    model.interactions.assign(static_cast<std::size_t>(p), {});
    model.linear_parents.assign(static_cast<std::size_t>(p), {});
    model.levels.assign(static_cast<std::size_t>(p), 0);

    Rng rng = Rng::stream(seed, 0);
    for (int i = 0; i < p; ++i)
        for (int j = i + 1; j < p; ++j)
            if (rng.bernoulli(0.01))
                model.weights[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = sample_weight(rng);

    // Variable types per kind. In the mixed model odd positions (1-based)
    // are Gaussian and even ones multinomial.
    for (int j = 0; j < p; ++j) {
        switch (kind) {
            case DagKind::gaussian:
            case DagKind::gaussian_interactions:
            case DagKind::gaussian_nonlinear:
                model.levels[static_cast<std::size_t>(j)] = 0;
                break;
            case DagKind::bernoulli:
                model.levels[static_cast<std::size_t>(j)] = 2;
                break;
            case DagKind::multinomial:
                model.levels[static_cast<std::size_t>(j)] = rng.uniform_int(3, 5);
                break;
            case DagKind::mixed:
                model.levels[static_cast<std::size_t>(j)] = j % 2 == 0 ? 0 : rng.uniform_int(3, 5);
                break;
        }
    }

    if (kind == DagKind::gaussian_interactions) {
        for (int j = 0; j < p; ++j) {
            std::vector<int> parents = model.parents(j);
            std::vector<std::pair<int, int>> pairs;
            for (std::size_t a = 0; a < parents.size(); ++a)
                for (std::size_t b = a + 1; b < parents.size(); ++b)
                    pairs.emplace_back(parents[a], parents[b]);
            int take = nearest_half(static_cast<int>(pairs.size()));
            if (take == 0) continue;
            std::vector<std::size_t> chosen =
                rng.sample_without_replacement(pairs.size(), static_cast<std::size_t>(take));
            for (std::size_t idx : chosen)
                model.interactions[static_cast<std::size_t>(j)].push_back(
                    {pairs[idx].first, pairs[idx].second, sample_weight(rng)});
        }
    }

    if (kind == DagKind::gaussian_nonlinear) {
        // Half of each response's parents keep the linear term, the rest act
        // through log|x|.
        for (int j = 0; j < p; ++j) {
            std::vector<int> parents = model.parents(j);
            int take = nearest_half(static_cast<int>(parents.size()));
            std::vector<std::size_t> chosen =
                rng.sample_without_replacement(parents.size(), static_cast<std::size_t>(take));
            for (std::size_t idx : chosen)
                model.linear_parents[static_cast<std::size_t>(j)].push_back(parents[idx]);
        }
    }

    if (kind == DagKind::multinomial || kind == DagKind::mixed) {
        for (int i = 0; i < p; ++i) {
            for (int j = i + 1; j < p; ++j) {
                if (model.weights[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] == 0.0) continue;
                if (model.is_categorical_var(i))
                    model.u[{i, j}] = sample_sign_vector(rng, model.levels[static_cast<std::size_t>(i)]);
                int response_len = model.is_categorical_var(j) ? model.levels[static_cast<std::size_t>(j)] : 1;
                model.v[{i, j}] = sample_sign_vector(rng, response_len);
            }
        }
    }
    return model;
}

std::vector<double> dag_eta(const DagModel& model, int j, std::span<const double> x) {
    const int n_out = model.is_categorical_var(j) ? model.levels[static_cast<std::size_t>(j)] : 1;
    std::vector<double> eta(static_cast<std::size_t>(n_out), 0.0);

    switch (model.kind) {
        case DagKind::gaussian:
        case DagKind::bernoulli: {
            double sum = 0;
            for (int i = 0; i < j; ++i)
                sum += model.weights[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] *
                       x[static_cast<std::size_t>(i)];
            eta[0] = sum;
            break;
        }
        case DagKind::gaussian_interactions: {
            double sum = 0;
            for (int i = 0; i < j; ++i)
                sum += model.weights[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] *
                       x[static_cast<std::size_t>(i)];
            for (const Interaction& term : model.interactions[static_cast<std::size_t>(j)])
                sum += term.weight * x[static_cast<std::size_t>(term.i)] * x[static_cast<std::size_t>(term.k)];
            eta[0] = sum;
            break;
        }
        case DagKind::gaussian_nonlinear: {
            const auto& linear = model.linear_parents[static_cast<std::size_t>(j)];
            double sum = 0;
            for (int i = 0; i < j; ++i) {
                double a = model.weights[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
                if (a == 0.0) continue;
                double xi = x[static_cast<std::size_t>(i)];
                if (std::find(linear.begin(), linear.end(), i) != linear.end()) {
                    sum += 5.0 * a * xi;
                } else {
                    // log|0| would be -inf; a zero parent contributes nothing
                    if (xi != 0.0) sum += 5.0 * a * std::log(std::fabs(xi));
                }
            }
            eta[0] = sum;
            break;
        }
        case DagKind::multinomial:
        case DagKind::mixed: {
            for (int i = 0; i < j; ++i) {
                double a = model.weights[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
                if (a == 0.0) continue;
                const auto& v = model.v.at({i, j});
                double predictor_term;
                if (model.is_categorical_var(i)) {
                    // sum_l u^(l) (2*I{x_i = l} - 1) = 2 u^(observed) - sum_l u^(l)
                    const auto& u = model.u.at({i, j});
                    int observed = static_cast<int>(x[static_cast<std::size_t>(i)]);
                    int total = 0;
                    for (int s : u) total += s;
                    predictor_term = 2.0 * u[static_cast<std::size_t>(observed)] - total;
                } else {
                    predictor_term = x[static_cast<std::size_t>(i)];
                }
                for (int s = 0; s < n_out; ++s)
                    eta[static_cast<std::size_t>(s)] += v[static_cast<std::size_t>(s)] * a * predictor_term;
            }
            break;
        }
    }
    return eta;
}

namespace {

// Categorical draws use the raw level value; continuous use the real value.
// Bernoulli variables live on {-1, +1} internally (level 0 = "-1").
double bernoulli_to_value(int level) { return level == 0 ? -1.0 : 1.0; }

int sample_softmax(Rng& rng, std::span<const double> eta) {
    double max_eta = *std::max_element(eta.begin(), eta.end());
    std::vector<double> w(eta.size());
    double total = 0;
    for (std::size_t s = 0; s < eta.size(); ++s) {
        w[s] = std::exp(eta[s] - max_eta);
        total += w[s];
    }
    double r = rng.uniform() * total;
    double acc = 0;
    for (std::size_t s = 0; s + 1 < eta.size(); ++s) {
        acc += w[s];
        if (r < acc) return static_cast<int>(s);
    }
    return static_cast<int>(eta.size()) - 1;
}

}  // namespace

MixedDataset sample_data(const DagModel& model, int n, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("simulate: n must be positive");
    const int p = model.p;

    std::vector<Column> columns;
    columns.reserve(static_cast<std::size_t>(p));
    for (int j = 0; j < p; ++j) {
        Column col;
        col.name = "x" + std::to_string(j + 1);
        if (model.is_categorical_var(j)) {
            col.type.kind = ColumnKind::categorical;
            int c = model.levels[static_cast<std::size_t>(j)];
            if (model.kind == DagKind::bernoulli) {
                col.type.levels = {"-1", "1"};
            } else {
                for (int l = 1; l <= c; ++l) col.type.levels.push_back(std::to_string(l));
            }
        } else {
            col.type.kind = ColumnKind::continuous;
        }
        columns.push_back(std::move(col));
    }

    std::vector<std::vector<double>> values(static_cast<std::size_t>(p),
                                            std::vector<double>(static_cast<std::size_t>(n)));
    Rng rng = Rng::stream(seed, 1);
    std::vector<double> x(static_cast<std::size_t>(p));  // predictor values for the current row
    for (int row = 0; row < n; ++row) {
        for (int j = 0; j < p; ++j) {
            std::vector<double> eta = dag_eta(model, j, x);
            double cell;
            switch (model.kind) {
                case DagKind::gaussian:
                case DagKind::gaussian_interactions:
                case DagKind::gaussian_nonlinear: {
                    cell = rng.normal(eta[0], 1.0);
                    x[static_cast<std::size_t>(j)] = cell;
                    break;
                }
                case DagKind::bernoulli: {
                    double prob = 1.0 / (1.0 + std::exp(-eta[0]));
                    int level = rng.bernoulli(prob) ? 1 : 0;
                    cell = level;
                    x[static_cast<std::size_t>(j)] = bernoulli_to_value(level);
                    break;
                }
                case DagKind::multinomial: {
                    int level = sample_softmax(rng, eta);
                    cell = level;
                    x[static_cast<std::size_t>(j)] = level;
                    break;
                }
                case DagKind::mixed: {
                    if (model.is_categorical_var(j)) {
                        int level = sample_softmax(rng, eta);
                        cell = level;
                        x[static_cast<std::size_t>(j)] = level;
                    } else {
                        cell = rng.normal(eta[0], 1.0);
                        x[static_cast<std::size_t>(j)] = cell;
                    }
                    break;
                }
                default:
                    throw std::logic_error("unreachable");
            }
            values[static_cast<std::size_t>(j)][static_cast<std::size_t>(row)] = cell;
        }
    }
    return MixedDataset(std::move(columns), std::move(values));
}

bool TrueCig::has(const Edge& e) const {
    return std::binary_search(edges.begin(), edges.end(), e);
}

TrueCig moralize(const DagModel& model) {
    std::set<Edge> edges;
    for (int j = 0; j < model.p; ++j) {
        std::vector<int> parents = model.parents(j);
        for (int i : parents) edges.insert(make_edge(i, j));
        for (std::size_t a = 0; a < parents.size(); ++a)
            for (std::size_t b = a + 1; b < parents.size(); ++b)
                edges.insert(make_edge(parents[a], parents[b]));
    }
    TrueCig cig;
    cig.p = model.p;
    cig.edges.assign(edges.begin(), edges.end());
    return cig;
}

IsingModel sample_ising(int p, std::uint64_t seed) {
    if (p < 2) throw std::invalid_argument("simulate: p must be >= 2");
    IsingModel model;
    model.p = p;
    model.theta.assign(static_cast<std::size_t>(p), std::vector<int>(static_cast<std::size_t>(p), 0));
    Rng rng = Rng::stream(seed, 2);
    double edge_prob = std::min(1.0, 4.0 / (p - 1));
    for (int i = 0; i < p; ++i) {
        model.theta[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = rng.uniform_int(-1, 1);
        for (int j = i + 1; j < p; ++j) {
            if (!rng.bernoulli(edge_prob)) continue;
            int value = rng.bernoulli(0.5) ? 1 : -1;
            model.theta[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = value;
            model.theta[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = value;
        }
    }
    return model;
}

TrueCig ising_cig(const IsingModel& model) {
    TrueCig cig;
    cig.p = model.p;
    for (int i = 0; i < model.p; ++i)
        for (int j = i + 1; j < model.p; ++j)
            if (model.theta[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] != 0)
                cig.edges.push_back({i, j});
    return cig;
}

MixedDataset gibbs_sample(const IsingModel& model, int n, int burn_in_sweeps, int thin_sweeps,
                          std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("simulate: n must be positive");
    if (burn_in_sweeps < 0 || thin_sweeps < 1)
        throw std::invalid_argument("simulate: invalid burn-in or thinning");
    const int p = model.p;
    Rng rng = Rng::stream(seed, 3);

    std::vector<int> state(static_cast<std::size_t>(p));
    for (int& s : state) s = rng.bernoulli(0.5) ? 1 : -1;

    auto sweep = [&] {
        for (int i = 0; i < p; ++i) {
            double field = model.theta[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)];
            for (int j = 0; j < p; ++j)
                if (j != i)
                    field += model.theta[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] *
                             state[static_cast<std::size_t>(j)];
            double prob_plus = 1.0 / (1.0 + std::exp(-2.0 * field));
            state[static_cast<std::size_t>(i)] = rng.bernoulli(prob_plus) ? 1 : -1;
        }
    };

    for (int s = 0; s < burn_in_sweeps; ++s) sweep();

    std::vector<Column> columns;
    for (int j = 0; j < p; ++j)
        columns.push_back({"x" + std::to_string(j + 1),
                           {ColumnKind::categorical, {"-1", "1"}}});
    std::vector<std::vector<double>> values(static_cast<std::size_t>(p),
                                            std::vector<double>(static_cast<std::size_t>(n)));
    for (int draw = 0; draw < n; ++draw) {
        for (int s = 0; s < thin_sweeps; ++s) sweep();
        for (int j = 0; j < p; ++j)
            values[static_cast<std::size_t>(j)][static_cast<std::size_t>(draw)] =
                state[static_cast<std::size_t>(j)] > 0 ? 1.0 : 0.0;  // level index
    }
    return MixedDataset(std::move(columns), std::move(values));
}

void write_true_cig_tsv(const std::string& path, const TrueCig& cig) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "i\tj\n";
    for (const Edge& e : cig.edges) out << e.i << '\t' << e.j << '\n';
}

namespace {

nlohmann::ordered_json sign_map_json(const std::map<std::pair<int, int>, std::vector<int>>& m) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& [key, vec] : m) {
        nlohmann::ordered_json entry;
        entry["i"] = key.first;
        entry["j"] = key.second;
        entry["signs"] = vec;
        arr.push_back(std::move(entry));
    }
    return arr;
}

}  // namespace

void write_dag_model_json(const std::string& path, const DagModel& model, std::uint64_t seed) {
    nlohmann::ordered_json doc;
    doc["model"] = to_string(model.kind);
    doc["p"] = model.p;
    doc["seed"] = seed;
    nlohmann::ordered_json edges = nlohmann::ordered_json::array();
    for (int i = 0; i < model.p; ++i) {
        for (int j = i + 1; j < model.p; ++j) {
            double w = model.weights[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            if (w == 0.0) continue;
            nlohmann::ordered_json e;
            e["i"] = i;
            e["j"] = j;
            e["weight"] = w;
            edges.push_back(std::move(e));
        }
    }
    doc["edges"] = std::move(edges);
    if (model.kind == DagKind::gaussian_interactions) {
        nlohmann::ordered_json terms = nlohmann::ordered_json::array();
        for (int j = 0; j < model.p; ++j) {
            for (const Interaction& t : model.interactions[static_cast<std::size_t>(j)]) {
                nlohmann::ordered_json e;
                e["i"] = t.i;
                e["k"] = t.k;
                e["j"] = j;
                e["weight"] = t.weight;
                terms.push_back(std::move(e));
            }
        }
        doc["interactions"] = std::move(terms);
    }
    if (model.kind == DagKind::gaussian_nonlinear) {
        nlohmann::ordered_json lp = nlohmann::ordered_json::array();
        for (int j = 0; j < model.p; ++j) lp.push_back(model.linear_parents[static_cast<std::size_t>(j)]);
        doc["linear_parents"] = std::move(lp);
    }
    if (model.kind == DagKind::multinomial || model.kind == DagKind::mixed ||
        model.kind == DagKind::bernoulli)
        doc["levels"] = model.levels;
    if (!model.u.empty()) doc["u"] = sign_map_json(model.u);
    if (!model.v.empty()) doc["v"] = sign_map_json(model.v);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << doc.dump(2) << "\n";
}

void write_ising_model_json(const std::string& path, const IsingModel& model, std::uint64_t seed) {
    nlohmann::ordered_json doc;
    doc["model"] = "ising";
    doc["p"] = model.p;
    doc["seed"] = seed;
    doc["theta"] = model.theta;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << doc.dump(2) << "\n";
}

}  // namespace cig
