#include "cig/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "cig/parallel.hpp"
#include "cig/rng.hpp"

namespace cig {

LearnerKind learner_from_string(const std::string& name) {
    if (name == "grafo") return LearnerKind::grafo;
    if (name == "stablasso") return LearnerKind::stablasso;
    if (name == "oracle") return LearnerKind::oracle;
    if (name == "empty") return LearnerKind::empty;
    throw std::invalid_argument("unknown learner '" + name +
                                "' (valid: grafo, stablasso, oracle, empty)");
}

std::string to_string(LearnerKind kind) {
    switch (kind) {
        case LearnerKind::grafo: return "grafo";
        case LearnerKind::stablasso: return "stablasso";
        case LearnerKind::oracle: return "oracle";
        case LearnerKind::empty: return "empty";
    }
    return "?";
}

ConfusionCounts evaluate(const std::vector<Edge>& estimated, const TrueCig& truth) {
    ConfusionCounts c;
    for (const Edge& e : estimated) {
        if (e.i < 0 || e.j >= truth.p || e.i >= e.j)
            throw std::invalid_argument("evaluate: edge outside the node range");
        if (truth.has(e)) c.tp++;
        else c.fp++;
    }
    double n_true = static_cast<double>(truth.edges.size());
    double n_pairs = 0.5 * static_cast<double>(truth.p) * (truth.p - 1);
    c.tpr = n_true > 0 ? c.tp / n_true : 0.0;
    double n_false = n_pairs - n_true;
    c.fpr = n_false > 0 ? c.fp / n_false : 0.0;
    return c;
}

std::vector<int> default_q_grid(int p) {
    // 20 geometric points from 1 to p(p-1)/8, deduplicated after rounding.
    double hi = std::max(1.0, static_cast<double>(p) * (p - 1) / 8.0);
    std::vector<int> grid;
    for (int k = 0; k < 20; ++k) {
        double t = static_cast<double>(k) / 19.0;
        int q = static_cast<int>(std::llround(std::pow(hi, t)));
        if (grid.empty() || grid.back() != q) grid.push_back(q);
    }
    return grid;
}

namespace {

EdgeRanker make_oracle_ranker(const TrueCig& truth) {
    return [truth](const MixedDataset& data, std::uint64_t, int) {
        RankedEdges out;
        out.p = data.p();
        std::set<Edge> known(truth.edges.begin(), truth.edges.end());
        double next_rank = 1.0;
        const double inf = std::numeric_limits<double>::infinity();
        for (int i = 0; i < out.p; ++i) {
            for (int j = i + 1; j < out.p; ++j) {
                Edge e{i, j};
                if (known.count(e))
                    out.entries.push_back({e, next_rank++, true});
                else
                    out.entries.push_back({e, inf, false});
            }
        }
        return out;
    };
}

EdgeRanker make_empty_ranker() {
    return [](const MixedDataset& data, std::uint64_t, int) {
        RankedEdges out;
        out.p = data.p();
        const double inf = std::numeric_limits<double>::infinity();
        for (int i = 0; i < out.p; ++i)
            for (int j = i + 1; j < out.p; ++j)
                out.entries.push_back({Edge{i, j}, inf, false});
        return out;
    };
}

struct RepOutcome {
    bool ok = false;
    int true_edges = 0;
    // [learner][ev] and [learner][q index]
    std::vector<std::vector<ConfusionCounts>> at_ev;
    std::vector<std::vector<ConfusionCounts>> stable_q;
    std::vector<std::vector<ConfusionCounts>> raw_q;
};

}  // namespace

BenchResult run_bench(const BenchConfig& cfg, int workers) {
    if (cfg.repetitions < 1) throw std::invalid_argument("bench: repetitions must be >= 1");
    if (cfg.p < 2) throw std::invalid_argument("bench: p must be >= 2");
    if (cfg.n < 4) throw std::invalid_argument("bench: n must be >= 4");
    for (double ev : cfg.evs)
        if (ev <= 0) throw std::invalid_argument("bench: E[V] values must be positive");
    if (cfg.learners.empty()) throw std::invalid_argument("bench: no learners");

    const bool ising = cfg.model == "ising";
    const DagKind dag_kind = ising ? DagKind::gaussian : dag_kind_from_string(cfg.model);
    const std::vector<int> q_grid = cfg.q_grid.empty() ? default_q_grid(cfg.p) : cfg.q_grid;

    const std::size_t n_learners = cfg.learners.size();
    const std::size_t n_evs = cfg.evs.size();
    const std::size_t n_qs = q_grid.size();

    std::vector<int> q_at_ev(n_evs);
    for (std::size_t e = 0; e < n_evs; ++e) q_at_ev[e] = compute_q(cfg.evs[e], cfg.pi_thr, cfg.p);

    std::vector<RepOutcome> outcomes(static_cast<std::size_t>(cfg.repetitions));
    parallel_for(static_cast<std::size_t>(cfg.repetitions), workers, [&](std::size_t r) {
        RepOutcome& rep = outcomes[r];
        try {
            std::uint64_t model_seed = mix_seed(cfg.seed, 2 * r);
            std::uint64_t data_seed = mix_seed(cfg.seed, 2 * r + 1);

            TrueCig truth;
            MixedDataset data;
            if (ising) {
                IsingModel model = sample_ising(cfg.p, model_seed);
                truth = ising_cig(model);
                data = gibbs_sample(model, cfg.n, cfg.burn_in_sweeps, cfg.thin_sweeps, data_seed);
            } else {
                DagModel model = sample_dag_model(dag_kind, cfg.p, model_seed);
                truth = moralize(model);
                data = sample_data(model, cfg.n, data_seed);
            }
            rep.true_edges = static_cast<int>(truth.edges.size());

            rep.at_ev.assign(n_learners, std::vector<ConfusionCounts>(n_evs));
            rep.stable_q.assign(n_learners, std::vector<ConfusionCounts>(n_qs));
            rep.raw_q.assign(n_learners, std::vector<ConfusionCounts>(n_qs));

            for (std::size_t l = 0; l < n_learners; ++l) {
                LearnerKind kind = cfg.learners[l];
                // StabLASSO needs -1/+1 input unless the data is all-continuous.
                MixedDataset learner_data = data;
                if (kind == LearnerKind::stablasso) {
                    bool any_categorical = false;
                    for (int j = 0; j < data.p(); ++j)
                        if (data.is_categorical(j)) any_categorical = true;
                    if (any_categorical) learner_data = dichotomize(data).as_mixed();
                }
                EdgeRanker ranker;
                switch (kind) {
                    case LearnerKind::grafo: ranker = make_grafo_ranker(cfg.forest); break;
                    case LearnerKind::stablasso: ranker = make_stablasso_ranker(cfg.lasso); break;
                    case LearnerKind::oracle: ranker = make_oracle_ranker(truth); break;
                    case LearnerKind::empty: ranker = make_empty_ranker(); break;
                }

                StabilityParams sp;
                sp.pi_thr = cfg.pi_thr;
                sp.n_sub = cfg.n_sub;
                sp.seed = mix_seed(cfg.seed, 1000003ULL * (r + 1) + l);
                // One set of subsample rankings serves every E[V] and the
                // whole q sweep; only the cut changes.
                SubsampleRankings subs =
                    run_subsample_rankings(learner_data, ranker, sp.n_sub, sp.seed, 1);

                for (std::size_t e = 0; e < n_evs; ++e) {
                    sp.expected_fp_bound = cfg.evs[e];
                    StableGraph g = aggregate_rankings(subs, cfg.p, q_at_ev[e], sp);
                    rep.at_ev[l][e] = evaluate(g.selected, truth);
                }
                for (std::size_t qi = 0; qi < n_qs; ++qi) {
                    sp.expected_fp_bound = cfg.evs.empty() ? 1.0 : cfg.evs[0];
                    StableGraph g = aggregate_rankings(subs, cfg.p, q_grid[qi], sp);
                    rep.stable_q[l][qi] = evaluate(g.selected, truth);
                }

                RankedEdges raw = ranker(learner_data, mix_seed(sp.seed, 0xfadeULL), -1);
                for (std::size_t qi = 0; qi < n_qs; ++qi)
                    rep.raw_q[l][qi] = evaluate(select_top_q(raw, q_grid[qi]), truth);
            }
            rep.ok = true;
        } catch (const std::exception&) {
            rep.ok = false;
        }
    });

    BenchResult result;
    int good = 0;
    for (const RepOutcome& rep : outcomes) {
        if (!rep.ok) {
            result.failed_repetitions++;
            continue;
        }
        ++good;
        result.true_edge_counts.push_back(rep.true_edges);
    }
    if (good == 0) throw std::runtime_error("bench: every repetition failed");

    for (std::size_t l = 0; l < n_learners; ++l) {
        for (std::size_t e = 0; e < n_evs; ++e) {
            BenchCell cell;
            cell.learner = cfg.learners[l];
            cell.ev = cfg.evs[e];
            cell.q = q_at_ev[e];
            cell.bound = fp_bound(q_at_ev[e], cfg.pi_thr, cfg.p);
            for (const RepOutcome& rep : outcomes) {
                if (!rep.ok) continue;
                cell.mean_tp += rep.at_ev[l][e].tp;
                cell.mean_fp += rep.at_ev[l][e].fp;
                cell.mean_tpr += rep.at_ev[l][e].tpr;
                cell.mean_fpr += rep.at_ev[l][e].fpr;
            }
            cell.mean_tp /= good;
            cell.mean_fp /= good;
            cell.mean_tpr /= good;
            cell.mean_fpr /= good;
            result.cells.push_back(cell);
        }
        for (int stable = 1; stable >= 0; --stable) {
            for (std::size_t qi = 0; qi < n_qs; ++qi) {
                CurvePoint pt;
                pt.learner = cfg.learners[l];
                pt.stable = stable == 1;
                pt.q = q_grid[qi];
                for (const RepOutcome& rep : outcomes) {
                    if (!rep.ok) continue;
                    const ConfusionCounts& c = stable == 1 ? rep.stable_q[l][qi] : rep.raw_q[l][qi];
                    pt.mean_tpr += c.tpr;
                    pt.mean_fpr += c.fpr;
                    pt.mean_tp += c.tp;
                    pt.mean_fp += c.fp;
                }
                pt.mean_tpr /= good;
                pt.mean_fpr /= good;
                pt.mean_tp /= good;
                pt.mean_fp /= good;
                result.curves.push_back(pt);
            }
        }
    }
    return result;
}

namespace {

[[noreturn]] void config_error(const std::string& path_in_doc, const std::string& what) {
    throw std::runtime_error("bench config: field '" + path_in_doc + "': " + what);
}

template <typename T>
T get_field(const nlohmann::json& doc, const std::string& key, T fallback) {
    if (!doc.contains(key)) return fallback;
    try {
        return doc.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        config_error(key, e.what());
    }
}

}  // namespace

BenchConfig parse_bench_config_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open bench config: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("bench config: JSON parse error: " + std::string(e.what()));
    }
    if (!doc.is_object()) throw std::runtime_error("bench config: top level must be an object");

    BenchConfig cfg;
    cfg.model = get_field<std::string>(doc, "model", cfg.model);
    if (cfg.model != "ising") dag_kind_from_string(cfg.model);  // validates the name
    cfg.p = get_field<int>(doc, "p", cfg.p);
    cfg.n = get_field<int>(doc, "n", cfg.n);
    cfg.repetitions = get_field<int>(doc, "repetitions", cfg.repetitions);
    cfg.evs = get_field<std::vector<double>>(doc, "evs", cfg.evs);
    if (doc.contains("learners")) {
        cfg.learners.clear();
        if (!doc["learners"].is_array()) config_error("learners", "must be an array of names");
        for (const auto& name : doc["learners"]) {
            if (!name.is_string()) config_error("learners", "entries must be strings");
            cfg.learners.push_back(learner_from_string(name.get<std::string>()));
        }
    }
    cfg.pi_thr = get_field<double>(doc, "pi_thr", cfg.pi_thr);
    cfg.n_sub = get_field<int>(doc, "n_sub", cfg.n_sub);
    cfg.seed = get_field<std::uint64_t>(doc, "seed", cfg.seed);
    cfg.burn_in_sweeps = get_field<int>(doc, "burn_in_sweeps", cfg.burn_in_sweeps);
    cfg.thin_sweeps = get_field<int>(doc, "thin_sweeps", cfg.thin_sweeps);
    cfg.q_grid = get_field<std::vector<int>>(doc, "q_grid", cfg.q_grid);
    if (doc.contains("forest")) {
        const auto& f = doc["forest"];
        cfg.forest.n_trees = get_field<int>(f, "n_trees", cfg.forest.n_trees);
        cfg.forest.mtry = get_field<int>(f, "mtry", cfg.forest.mtry);
        cfg.forest.min_node_size = get_field<int>(f, "min_node_size", cfg.forest.min_node_size);
        cfg.forest.seed = get_field<std::uint64_t>(f, "seed", cfg.forest.seed);
    }
    if (doc.contains("lasso")) {
        const auto& l = doc["lasso"];
        cfg.lasso.n_lambda = get_field<int>(l, "n_lambda", cfg.lasso.n_lambda);
        cfg.lasso.lambda_min_ratio = get_field<double>(l, "lambda_min_ratio", cfg.lasso.lambda_min_ratio);
        cfg.lasso.tolerance = get_field<double>(l, "tolerance", cfg.lasso.tolerance);
        cfg.lasso.max_iter = get_field<int>(l, "max_iter", cfg.lasso.max_iter);
    }
    if (cfg.pi_thr <= 0.5 || cfg.pi_thr >= 1.0) config_error("pi_thr", "must lie in (0.5, 1)");
    return cfg;
}

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

}  // namespace

void write_bench_result(const std::string& out_dir, const BenchConfig& cfg,
                        const BenchResult& result) {
    std::filesystem::create_directories(out_dir);
    {
        std::ofstream out(out_dir + "/cells.tsv", std::ios::binary);
        if (!out) throw std::runtime_error("cannot write cells.tsv");
        out << "learner\tev\tq\tfp_bound\tmean_tp\tmean_fp\tmean_tpr\tmean_fpr\n";
        for (const BenchCell& c : result.cells)
            out << to_string(c.learner) << '\t' << fmt(c.ev) << '\t' << c.q << '\t'
                << fmt(c.bound) << '\t' << fmt(c.mean_tp) << '\t' << fmt(c.mean_fp) << '\t'
                << fmt(c.mean_tpr) << '\t' << fmt(c.mean_fpr) << '\n';
    }
    {
        std::ofstream out(out_dir + "/curves.tsv", std::ios::binary);
        if (!out) throw std::runtime_error("cannot write curves.tsv");
        out << "learner\tselector\tq\tmean_tpr\tmean_fpr\tmean_tp\tmean_fp\n";
        for (const CurvePoint& pt : result.curves)
            out << to_string(pt.learner) << '\t' << (pt.stable ? "stable" : "raw") << '\t' << pt.q
                << '\t' << fmt(pt.mean_tpr) << '\t' << fmt(pt.mean_fpr) << '\t' << fmt(pt.mean_tp)
                << '\t' << fmt(pt.mean_fp) << '\n';
    }
    {
        nlohmann::ordered_json doc;
        doc["model"] = cfg.model;
        doc["p"] = cfg.p;
        doc["n"] = cfg.n;
        doc["repetitions"] = cfg.repetitions;
        doc["failed_repetitions"] = result.failed_repetitions;
        doc["pi_thr"] = cfg.pi_thr;
        doc["n_sub"] = cfg.n_sub;
        doc["seed"] = cfg.seed;
        doc["evs"] = cfg.evs;
        nlohmann::ordered_json learners = nlohmann::ordered_json::array();
        for (LearnerKind l : cfg.learners) learners.push_back(to_string(l));
        doc["learners"] = std::move(learners);
        doc["true_edge_counts"] = result.true_edge_counts;
        std::ofstream out(out_dir + "/summary.json", std::ios::binary);
        if (!out) throw std::runtime_error("cannot write summary.json");
        out << doc.dump(2) << "\n";
    }
}

}  // namespace cig
