#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cig/bench.hpp"
#include "cig/dataset.hpp"
#include "cig/forest.hpp"
#include "cig/lasso.hpp"
#include "cig/parallel.hpp"
#include "cig/rng.hpp"
#include "cig/simulate.hpp"
#include "cig/stability.hpp"

namespace {

struct SimulateArgs {
    std::string model = "gaussian";
    int p = 50;
    int n = 100;
    std::uint64_t seed = 0;
    std::string out_dir = ".";
    int burn_in = 1000;
    int thin = 100;
};

int cmd_simulate(const SimulateArgs& args) {
    namespace fs = std::filesystem;
    fs::create_directories(args.out_dir);
    const std::string base = args.out_dir + "/";

    cig::MixedDataset data;
    cig::TrueCig truth;
    if (args.model == "ising") {
        cig::IsingModel model = cig::sample_ising(args.p, args.seed);
        truth = cig::ising_cig(model);
        data = cig::gibbs_sample(model, args.n, args.burn_in, args.thin,
                                 cig::mix_seed(args.seed, 1));
        cig::write_ising_model_json(base + "model.json", model, args.seed);
    } else {
        cig::DagKind kind = cig::dag_kind_from_string(args.model);
        cig::DagModel model = cig::sample_dag_model(kind, args.p, args.seed);
        truth = cig::moralize(model);
        data = cig::sample_data(model, args.n, cig::mix_seed(args.seed, 1));
        cig::write_dag_model_json(base + "model.json", model, args.seed);
    }
    cig::write_csv(base + "data.csv", data);
    cig::write_schema_json(base + "schema.json", data.columns());
    cig::write_true_cig_tsv(base + "true_cig.tsv", truth);
    std::cout << "wrote " << base << "{data.csv, schema.json, true_cig.tsv, model.json}"
              << " (n=" << data.n() << ", p=" << data.p()
              << ", true edges=" << truth.edges.size() << ")\n";
    return 0;
}

struct EstimateArgs {
    std::string data_path;
    std::string schema_path;
    std::string learner = "grafo";
    bool dichotomize = false;
    double ev = 5.0;
    double pi_thr = 0.75;
    int n_sub = 100;
    std::uint64_t seed = 0;
    int raw_q = -1;
    std::string out_dir = ".";
    int workers = 0;
    cig::ForestParams forest;
    cig::LassoParams lasso;
};

int cmd_estimate(const EstimateArgs& args) {
    namespace fs = std::filesystem;
    std::vector<cig::Column> schema = cig::read_schema_json(args.schema_path);
    cig::IngestReport report;
    cig::MixedDataset data = cig::ingest_csv(args.data_path, schema, &report);
    if (report.rows_dropped > 0)
        std::cerr << "note: " << report.rows_dropped << " row(s) dropped (missing cells)\n";

    std::vector<std::string> names;
    for (const auto& col : data.columns()) names.push_back(col.name);

    bool any_categorical = false;
    for (int j = 0; j < data.p(); ++j)
        if (data.is_categorical(j)) any_categorical = true;

    int workers = args.workers > 0 ? args.workers : cig::default_workers();
    // In subsampling mode the parallelism lives at the subsample level; a raw
    // run is a single ranking, so the ranker itself gets the workers.
    int ranker_workers = args.raw_q >= 0 ? workers : 1;

    cig::EdgeRanker ranker;
    cig::MixedDataset learner_data = data;
    if (args.learner == "grafo") {
        cig::ForestParams fp = args.forest;
        fp.seed = args.seed;
        ranker = cig::make_grafo_ranker(fp, ranker_workers);
    } else if (args.learner == "stablasso") {
        if (any_categorical && !args.dichotomize)
            throw std::runtime_error(
                "stablasso needs -1/+1 input: pass --dichotomize to apply the median/balanced "
                "split transform to mixed data");
        if (args.dichotomize) learner_data = cig::dichotomize(data).as_mixed();
        ranker = cig::make_stablasso_ranker(args.lasso, ranker_workers);
    } else {
        throw std::runtime_error("unknown learner '" + args.learner + "' (valid: grafo, stablasso)");
    }
    fs::create_directories(args.out_dir);
    const std::string base = args.out_dir + "/";

    if (args.raw_q >= 0) {
        // Single full-data run cut at q, no subsampling.
        std::vector<cig::Edge> selected =
            cig::raw_select(learner_data, ranker, args.raw_q, args.seed);
        cig::StableGraph graph;
        graph.p = data.p();
        graph.q_used = args.raw_q;
        graph.params = {0.0, args.pi_thr, 0, args.seed};
        for (int i = 0; i < data.p(); ++i)
            for (int j = i + 1; j < data.p(); ++j) {
                cig::Edge e{i, j};
                bool sel = std::binary_search(selected.begin(), selected.end(), e);
                graph.edges.push_back({e, sel ? 1.0 : 0.0});
            }
        graph.selected = selected;
        cig::write_stable_graph_tsv(base + "graph.tsv", graph);
        cig::write_stable_graph_dot(base + "graph.dot", graph, names);
        nlohmann::ordered_json meta;
        meta["mode"] = "raw";
        meta["learner"] = args.learner;
        meta["q"] = args.raw_q;
        meta["seed"] = args.seed;
        meta["p"] = data.p();
        meta["n"] = data.n();
        meta["rows_dropped"] = report.rows_dropped;
        meta["n_selected"] = selected.size();
        std::ofstream out(base + "meta.json", std::ios::binary);
        out << meta.dump(2) << "\n";
        std::cout << "wrote " << base << "{graph.tsv, graph.dot, meta.json}: " << selected.size()
                  << " edge(s) at q=" << args.raw_q << "\n";
        return 0;
    }

    cig::StabilityParams sp;
    sp.expected_fp_bound = args.ev;
    sp.pi_thr = args.pi_thr;
    sp.n_sub = args.n_sub;
    sp.seed = args.seed;
    if (cig::compute_q(sp.expected_fp_bound, sp.pi_thr, data.p()) == 0)
        std::cerr << "warning: the requested E[V] gives q = 0; nothing can be selected\n";
    cig::StableGraph graph = cig::stability_select(learner_data, ranker, sp, workers);

    cig::write_stable_graph_tsv(base + "graph.tsv", graph);
    cig::write_stable_graph_dot(base + "graph.dot", graph, names);
    cig::write_stable_graph_meta_json(base + "meta.json", graph);
    std::cout << "wrote " << base << "{graph.tsv, graph.dot, meta.json}: "
              << graph.selected.size() << " stable edge(s), q=" << graph.q_used << "\n";
    return 0;
}

struct BenchArgs {
    std::string config_path;
    std::string out_dir = ".";
    int workers = 0;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int repetitions = 0;
};

int cmd_bench(const BenchArgs& args) {
    cig::BenchConfig cfg = cig::parse_bench_config_json(args.config_path);
    if (args.seed_set) cfg.seed = args.seed;          // flags win over the JSON record
    if (args.repetitions > 0) cfg.repetitions = args.repetitions;
    int workers = args.workers > 0 ? args.workers : cig::default_workers();
    cig::BenchResult result = cig::run_bench(cfg, workers);
    cig::write_bench_result(args.out_dir, cfg, result);
    std::cout << "wrote " << args.out_dir << "/{cells.tsv, curves.tsv, summary.json}";
    if (result.failed_repetitions > 0)
        std::cout << " (" << result.failed_repetitions << " repetition(s) failed)";
    std::cout << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"conditional independence graph estimation with error-controlled edge selection"};
    app.require_subcommand(1);

    SimulateArgs sim;
    CLI::App* simulate = app.add_subcommand("simulate", "generate a dataset with known ground truth");
    simulate->add_option("--model", sim.model,
                         "gaussian, gaussian_interactions, gaussian_nonlinear, bernoulli, "
                         "multinomial, mixed, or ising")
        ->required();
    simulate->add_option("--p", sim.p, "number of variables")->check(CLI::Range(2, 100000))->required();
    simulate->add_option("--n", sim.n, "number of rows")->check(CLI::PositiveNumber)->required();
    simulate->add_option("--seed", sim.seed, "master seed");
    simulate->add_option("--out-dir", sim.out_dir, "output directory")->required();
    simulate->add_option("--burn-in", sim.burn_in, "Gibbs burn-in sweeps (ising)");
    simulate->add_option("--thin", sim.thin, "Gibbs sweeps between draws (ising)");

    EstimateArgs est;
    CLI::App* estimate = app.add_subcommand("estimate", "estimate a stable graph from a CSV");
    estimate->add_option("--data", est.data_path, "CSV file")->required();
    estimate->add_option("--schema", est.schema_path, "JSON schema sidecar")->required();
    estimate->add_option("--learner", est.learner, "grafo or stablasso")->required();
    estimate->add_flag("--dichotomize", est.dichotomize, "apply the -1/+1 transform first");
    estimate->add_option("--ev", est.ev, "bound on the expected number of false positives")
        ->check(CLI::PositiveNumber);
    estimate->add_option("--pi-thr", est.pi_thr, "selection-frequency threshold in (0.5, 1)")
        ->check(CLI::Range(0.5, 1.0).description("(0.5, 1)"));
    estimate->add_option("--n-sub", est.n_sub, "number of subsamples")->check(CLI::PositiveNumber);
    estimate->add_option("--seed", est.seed, "master seed");
    estimate->add_option("--raw-q", est.raw_q, "skip stability selection; cut one full-data run at q");
    estimate->add_option("--out-dir", est.out_dir, "output directory");
    estimate->add_option("--workers", est.workers, "parallel subsample jobs (default: CIG_WORKERS or 1)")->check(CLI::PositiveNumber);
    estimate->add_option("--n-trees", est.forest.n_trees, "trees per forest");
    estimate->add_option("--mtry", est.forest.mtry, "features tried per node (0 = default)");
    estimate->add_option("--min-node-size", est.forest.min_node_size, "minimum node size (0 = default)");
    estimate->add_option("--n-lambda", est.lasso.n_lambda, "lasso path length");
    estimate->add_option("--lambda-min-ratio", est.lasso.lambda_min_ratio, "lambda_min / lambda_max");

    BenchArgs bench;
    CLI::App* bench_cmd = app.add_subcommand("bench", "run a simulation benchmark from a JSON config");
    bench_cmd->add_option("config", bench.config_path, "BenchConfig JSON file")->required();
    bench_cmd->add_option("--out-dir", bench.out_dir, "output directory");
    bench_cmd->add_option("--workers", bench.workers, "parallel repetitions (default: CIG_WORKERS or 1)")->check(CLI::PositiveNumber);
    auto* seed_opt = bench_cmd->add_option("--seed", bench.seed, "override the config seed");
    bench_cmd->add_option("--repetitions", bench.repetitions, "override the config repetitions");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: usage: " << e.what() << "\n";
        return 2;
    }

    try {
        if (simulate->parsed()) return cmd_simulate(sim);
        if (estimate->parsed()) {
            if (est.pi_thr <= 0.5 || est.pi_thr >= 1.0)
                throw std::runtime_error("--pi-thr must lie strictly inside (0.5, 1)");
            return cmd_estimate(est);
        }
        if (bench_cmd->parsed()) {
            bench.seed_set = seed_opt->count() > 0;
            return cmd_bench(bench);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
