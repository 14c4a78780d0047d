#include "cig/stability.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "cig/parallel.hpp"
#include "cig/rng.hpp"

namespace cig {

namespace {

void check_stability_params(double ev, double pi_thr, int p) {
    if (p < 2) throw std::invalid_argument("stability: p must be >= 2");
    if (pi_thr <= 0.5 || pi_thr >= 1.0)
        throw std::invalid_argument("stability: pi_thr must lie in (0.5, 1)");
    if (ev <= 0) throw std::invalid_argument("stability: E[V] must be positive");
}

double n_pairs(int p) { return 0.5 * static_cast<double>(p) * (p - 1); }

}  // namespace

int compute_q(double ev, double pi_thr, int p) {
    check_stability_params(ev, pi_thr, p);
    double target = (2.0 * pi_thr - 1.0) * ev * n_pairs(p);
    int q = static_cast<int>(std::floor(std::sqrt(target)));
    // Guard the floor against sqrt landing one ulp off an exact square.
    while (static_cast<double>(q + 1) * (q + 1) <= target) ++q;
    while (q > 0 && static_cast<double>(q) * q > target) --q;
    return q;
}

double fp_bound(int q, double pi_thr, int p) {
    if (q < 0) throw std::invalid_argument("stability: q must be non-negative");
    if (p < 2 || pi_thr <= 0.5 || pi_thr >= 1.0)
        throw std::invalid_argument("stability: invalid pi_thr or p");
    return static_cast<double>(q) * q / ((2.0 * pi_thr - 1.0) * n_pairs(p));
}

EdgeRanker make_grafo_ranker(const ForestParams& params, int workers) {
    return [params, workers](const MixedDataset& data, std::uint64_t seed, int) {
        ForestParams fp = params;
        fp.seed = mix_seed(params.seed, seed);
        return grafo_rank(data, fp, workers);
    };
}

EdgeRanker make_stablasso_ranker(const LassoParams& params, int workers) {
    return [params, workers](const MixedDataset& data, std::uint64_t, int) {
        return stablasso_rank(data, params, workers);  // no RNG in this learner
    };
}

SubsampleRankings run_subsample_rankings(const MixedDataset& data, const EdgeRanker& ranker,
                                         int n_sub, std::uint64_t seed, int workers) {
    if (n_sub < 1) throw std::invalid_argument("stability: n_sub must be positive");
    if (data.n() < 4) throw std::invalid_argument("stability: need at least 4 rows");
    const std::size_t half = static_cast<std::size_t>(data.n()) / 2;

    SubsampleRankings out;
    out.rankings.resize(static_cast<std::size_t>(n_sub));
    parallel_for(static_cast<std::size_t>(n_sub), workers, [&](std::size_t k) {
        Rng rng = Rng::stream(seed, k);
        std::vector<std::size_t> rows =
            rng.sample_without_replacement(static_cast<std::size_t>(data.n()), half);
        MixedDataset sub = data.subset_rows(rows);
        try {
            out.rankings[k] = ranker(sub, mix_seed(seed, 0x9d2c5680a1f3ULL + k), static_cast<int>(k));
        } catch (const std::exception&) {
            out.rankings[k] = std::nullopt;  // contributes zero counts
        }
    });
    return out;
}

StableGraph aggregate_rankings(const SubsampleRankings& subs, int p, int q,
                               const StabilityParams& params) {
    StableGraph graph;
    graph.p = p;
    graph.q_used = q;
    graph.params = params;

    auto pair_index = [p](const Edge& e) {
        return static_cast<std::size_t>(e.i) * static_cast<std::size_t>(p) -
               static_cast<std::size_t>(e.i) * (static_cast<std::size_t>(e.i) + 1) / 2 +
               static_cast<std::size_t>(e.j - e.i - 1);
    };
    std::vector<int> counts(static_cast<std::size_t>(n_pairs(p)), 0);
    int n_sub = static_cast<int>(subs.rankings.size());
    for (const auto& ranking : subs.rankings) {
        if (!ranking.has_value()) {
            graph.failed_subsamples++;
            continue;
        }
        for (const Edge& e : select_top_q(*ranking, q)) counts[pair_index(e)]++;
    }

    for (int i = 0; i < p; ++i) {
        for (int j = i + 1; j < p; ++j) {
            Edge e{i, j};
            double freq = static_cast<double>(counts[pair_index(e)]) / n_sub;
            graph.edges.push_back({e, freq});
            if (freq >= params.pi_thr) graph.selected.push_back(e);
        }
    }
    return graph;
}

StableGraph stability_select(const MixedDataset& data, const EdgeRanker& ranker,
                             const StabilityParams& params, int workers) {
    int q = compute_q(params.expected_fp_bound, params.pi_thr, data.p());
    return stability_select_with_q(data, ranker, q, params, workers);
}

StableGraph stability_select_with_q(const MixedDataset& data, const EdgeRanker& ranker, int q,
                                    const StabilityParams& params, int workers) {
    if (params.pi_thr <= 0.5 || params.pi_thr >= 1.0)
        throw std::invalid_argument("stability: pi_thr must lie in (0.5, 1)");
    SubsampleRankings subs =
        run_subsample_rankings(data, ranker, params.n_sub, params.seed, workers);
    return aggregate_rankings(subs, data.p(), q, params);
}

std::vector<Edge> raw_select(const MixedDataset& data, const EdgeRanker& ranker, int q,
                             std::uint64_t seed) {
    RankedEdges ranked = ranker(data, seed, -1);
    return select_top_q(ranked, q);
}

namespace {

std::string format_frequency(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

}  // namespace

void write_stable_graph_tsv(const std::string& path, const StableGraph& graph) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "i\tj\tfrequency\tselected\n";
    for (const auto& [edge, freq] : graph.edges) {
        bool sel = std::binary_search(graph.selected.begin(), graph.selected.end(), edge);
        out << edge.i << '\t' << edge.j << '\t' << format_frequency(freq) << '\t' << (sel ? 1 : 0)
            << '\n';
    }
}

void write_stable_graph_dot(const std::string& path, const StableGraph& graph,
                            const std::vector<std::string>& node_names) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    auto name = [&](int v) {
        if (v < static_cast<int>(node_names.size())) return node_names[static_cast<std::size_t>(v)];
        return "v" + std::to_string(v);
    };
    out << "graph stable_cig {\n";
    for (int v = 0; v < graph.p; ++v) out << "  \"" << name(v) << "\";\n";
    for (const Edge& e : graph.selected)
        out << "  \"" << name(e.i) << "\" -- \"" << name(e.j) << "\";\n";
    out << "}\n";
}

void write_stable_graph_meta_json(const std::string& path, const StableGraph& graph) {
    nlohmann::ordered_json doc;
    doc["p"] = graph.p;
    doc["expected_fp_bound"] = graph.params.expected_fp_bound;
    doc["pi_thr"] = graph.params.pi_thr;
    doc["q"] = graph.q_used;
    doc["n_sub"] = graph.params.n_sub;
    doc["seed"] = graph.params.seed;
    doc["fp_bound_at_q"] = fp_bound(graph.q_used, graph.params.pi_thr, graph.p);
    doc["n_selected"] = graph.selected.size();
    doc["failed_subsamples"] = graph.failed_subsamples;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << doc.dump(2) << "\n";
}

}  // namespace cig
