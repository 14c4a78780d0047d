#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "cig/bench.hpp"
#include "test_util.hpp"

using namespace cig;

TEST_CASE("evaluate counts hits and misses") {
    TrueCig truth;
    truth.p = 4;
    truth.edges = {{1, 2}, {2, 3}};

    SUBCASE("perfect recovery") {
        auto c = evaluate({{1, 2}, {2, 3}}, truth);
        CHECK(c.tp == 2);
        CHECK(c.fp == 0);
        CHECK(c.tpr == doctest::Approx(1.0));
        CHECK(c.fpr == doctest::Approx(0.0));
    }
    SUBCASE("empty estimate") {
        auto c = evaluate({}, truth);
        CHECK(c.tp == 0);
        CHECK(c.fp == 0);
        CHECK(c.tpr == 0.0);
        CHECK(c.fpr == 0.0);
    }
    SUBCASE("one hit one miss") {
        TrueCig t2;
        t2.p = 4;
        t2.edges = {{0, 1}};
        auto c = evaluate({{0, 1}, {2, 3}}, t2);
        CHECK(c.tp == 1);
        CHECK(c.fp == 1);
        CHECK(c.tpr == doctest::Approx(1.0));
        CHECK(c.fpr == doctest::Approx(0.2));  // 1 of the 5 non-edges
    }
}

TEST_CASE("oracle learner has zero false positives and full recall") {
    BenchConfig cfg;
    cfg.model = "gaussian";
    cfg.p = 25;
    cfg.n = 60;
    cfg.repetitions = 3;
    cfg.evs = {1.0, 3.0};
    cfg.learners = {LearnerKind::oracle};
    cfg.n_sub = 10;
    cfg.seed = 21;
    BenchResult result = run_bench(cfg);
    REQUIRE(result.cells.size() == 2);
    for (const BenchCell& cell : result.cells) {
        CHECK(cell.mean_fp == 0.0);
        CHECK(cell.mean_tpr == doctest::Approx(1.0));
    }
    CHECK(result.failed_repetitions == 0);
}

TEST_CASE("empty learner selects nothing anywhere") {
    BenchConfig cfg;
    cfg.model = "gaussian";
    cfg.p = 12;
    cfg.n = 40;
    cfg.repetitions = 2;
    cfg.evs = {2.0};
    cfg.learners = {LearnerKind::empty};
    cfg.n_sub = 8;
    BenchResult result = run_bench(cfg);
    for (const BenchCell& cell : result.cells) {
        CHECK(cell.mean_tp == 0.0);
        CHECK(cell.mean_fp == 0.0);
    }
    for (const CurvePoint& pt : result.curves) {
        CHECK(pt.mean_tp == 0.0);
        CHECK(pt.mean_fp == 0.0);
    }
}

TEST_CASE("per-cell tp + fp never exceeds the cap q") {
    BenchConfig cfg;
    cfg.model = "gaussian";
    cfg.p = 12;
    cfg.n = 50;
    cfg.repetitions = 3;
    cfg.evs = {1.0, 4.0};
    cfg.learners = {LearnerKind::grafo};
    cfg.forest.n_trees = 15;
    cfg.n_sub = 12;
    cfg.seed = 5;
    BenchResult result = run_bench(cfg);
    for (const BenchCell& cell : result.cells)
        CHECK(cell.mean_tp + cell.mean_fp <= static_cast<double>(cell.q) + 1e-12);
}

TEST_CASE("raw rate curves grow with q") {
    BenchConfig cfg;
    cfg.model = "gaussian";
    cfg.p = 10;
    cfg.n = 60;
    cfg.repetitions = 2;
    cfg.evs = {1.0};
    cfg.learners = {LearnerKind::oracle};
    cfg.n_sub = 6;
    cfg.q_grid = {1, 3, 9, 20};
    BenchResult result = run_bench(cfg);
    double last = -1;
    for (const CurvePoint& pt : result.curves) {
        if (!pt.stable) {
            CHECK(pt.mean_tpr >= last - 1e-12);
            last = pt.mean_tpr;
        }
    }
}

TEST_CASE("the same master seed reproduces every number") {
    BenchConfig cfg;
    cfg.model = "mixed";
    cfg.p = 8;
    cfg.n = 40;
    cfg.repetitions = 2;
    cfg.evs = {2.0};
    cfg.learners = {LearnerKind::grafo, LearnerKind::stablasso};
    cfg.forest.n_trees = 10;
    cfg.n_sub = 6;
    cfg.seed = 99;
    BenchResult a = run_bench(cfg, 1);
    BenchResult b = run_bench(cfg, 2);
    REQUIRE(a.cells.size() == b.cells.size());
    for (std::size_t i = 0; i < a.cells.size(); ++i) {
        CHECK(a.cells[i].mean_tp == b.cells[i].mean_tp);
        CHECK(a.cells[i].mean_fp == b.cells[i].mean_fp);
    }
    REQUIRE(a.curves.size() == b.curves.size());
    for (std::size_t i = 0; i < a.curves.size(); ++i) {
        CHECK(a.curves[i].mean_tpr == b.curves[i].mean_tpr);
        CHECK(a.curves[i].mean_fpr == b.curves[i].mean_fpr);
    }
}

TEST_CASE("every generative model runs through the full pipeline") {
    for (std::string model : {"gaussian", "gaussian_interactions", "gaussian_nonlinear",
                              "bernoulli", "multinomial", "mixed"}) {
        BenchConfig cfg;
        cfg.model = model;
        cfg.p = 8;
        cfg.n = 40;
        cfg.repetitions = 1;
        cfg.evs = {2.0};
        cfg.learners = {LearnerKind::grafo, LearnerKind::stablasso};
        cfg.forest.n_trees = 8;
        cfg.n_sub = 4;
        cfg.seed = 77;
        cfg.q_grid = {2};
        BenchResult result = run_bench(cfg);
        CHECK(result.failed_repetitions == 0);
        REQUIRE(result.cells.size() == 2);
        for (const BenchCell& cell : result.cells) {
            CHECK(cell.mean_fp >= 0.0);
            CHECK(cell.mean_tp + cell.mean_fp <= static_cast<double>(cell.q));
        }
    }
}

TEST_CASE("ising benchmark runs end to end") {
    BenchConfig cfg;
    cfg.model = "ising";
    cfg.p = 8;
    cfg.n = 40;
    cfg.repetitions = 2;
    cfg.evs = {2.0};
    cfg.learners = {LearnerKind::grafo};
    cfg.forest.n_trees = 10;
    cfg.n_sub = 6;
    cfg.burn_in_sweeps = 100;
    cfg.thin_sweeps = 5;
    BenchResult result = run_bench(cfg);
    CHECK(result.failed_repetitions == 0);
    CHECK(result.true_edge_counts.size() == 2);
    for (int count : result.true_edge_counts) CHECK(count > 0);
}

TEST_CASE("default q grid is geometric up to p(p-1)/8") {
    auto grid = default_q_grid(50);
    REQUIRE(!grid.empty());
    CHECK(grid.front() == 1);
    CHECK(grid.back() == 306);  // 50*49/8 rounded
    for (std::size_t i = 1; i < grid.size(); ++i) CHECK(grid[i] > grid[i - 1]);
    CHECK(grid.size() <= 20);
}

TEST_CASE("config parsing surfaces the failing field") {
    namespace fs = std::filesystem;
    auto path = (fs::temp_directory_path() / "cig_bad_bench.json").string();
    {
        std::ofstream out(path);
        out << R"({"model": "gaussian", "p": "fifty"})";
    }
    CHECK_THROWS_WITH_AS(parse_bench_config_json(path), doctest::Contains("'p'"),
                         std::runtime_error);
    {
        std::ofstream out(path);
        out << R"({"model": "not_a_model"})";
    }
    CHECK_THROWS_AS(parse_bench_config_json(path), std::invalid_argument);
    {
        std::ofstream out(path);
        out << R"({"model": "gaussian", "pi_thr": 0.4})";
    }
    CHECK_THROWS_WITH_AS(parse_bench_config_json(path), doctest::Contains("pi_thr"),
                         std::runtime_error);
}

TEST_CASE("config parsing fills every field") {
    namespace fs = std::filesystem;
    auto path = (fs::temp_directory_path() / "cig_good_bench.json").string();
    {
        std::ofstream out(path);
        out << R"({
          "model": "mixed", "p": 20, "n": 80, "repetitions": 4,
          "evs": [1, 5], "learners": ["grafo", "stablasso"],
          "forest": {"n_trees": 33}, "lasso": {"n_lambda": 40},
          "pi_thr": 0.8, "n_sub": 25, "seed": 7,
          "q_grid": [1, 5, 10]
        })";
    }
    BenchConfig cfg = parse_bench_config_json(path);
    CHECK(cfg.model == "mixed");
    CHECK(cfg.p == 20);
    CHECK(cfg.repetitions == 4);
    CHECK(cfg.evs == std::vector<double>{1.0, 5.0});
    CHECK(cfg.learners.size() == 2);
    CHECK(cfg.forest.n_trees == 33);
    CHECK(cfg.lasso.n_lambda == 40);
    CHECK(cfg.pi_thr == 0.8);
    CHECK(cfg.n_sub == 25);
    CHECK(cfg.q_grid == std::vector<int>{1, 5, 10});
}

TEST_CASE("results land in the output files") {
    BenchConfig cfg;
    cfg.model = "gaussian";
    cfg.p = 8;
    cfg.n = 30;
    cfg.repetitions = 2;
    cfg.evs = {1.0};
    cfg.learners = {LearnerKind::oracle};
    cfg.n_sub = 4;
    BenchResult result = run_bench(cfg);
    namespace fs = std::filesystem;
    std::string dir = (fs::temp_directory_path() / "cig_bench_out").string();
    write_bench_result(dir, cfg, result);
    CHECK(fs::exists(dir + "/cells.tsv"));
    CHECK(fs::exists(dir + "/curves.tsv"));
    CHECK(fs::exists(dir + "/summary.json"));
    std::ifstream cells(dir + "/cells.tsv");
    std::string header;
    std::getline(cells, header);
    CHECK(header == "learner\tev\tq\tfp_bound\tmean_tp\tmean_fp\tmean_tpr\tmean_fpr");
}
