#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

const std::string cli = CIG_CLI_PATH;

int run(const std::string& args) {
    std::string command = cli + " " + args + " >/dev/null 2>&1";
    int status = std::system(command.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string fresh_dir(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir.string();
}

}  // namespace

TEST_CASE("simulate writes the four output files") {
    std::string dir = fresh_dir("cig_cli_sim");
    REQUIRE(run("simulate --model gaussian --p 15 --n 40 --seed 7 --out-dir " + dir) == 0);
    CHECK(fs::exists(dir + "/data.csv"));
    CHECK(fs::exists(dir + "/schema.json"));
    CHECK(fs::exists(dir + "/true_cig.tsv"));
    CHECK(fs::exists(dir + "/model.json"));
}

TEST_CASE("simulate rejects p = 1 with a usage error") {
    std::string dir = fresh_dir("cig_cli_badp");
    CHECK(run("simulate --model gaussian --p 1 --n 40 --seed 7 --out-dir " + dir) != 0);
}

TEST_CASE("unknown model names the valid choices") {
    std::string dir = fresh_dir("cig_cli_badmodel");
    std::string err_file = dir + "/err.txt";
    std::string command = cli + " simulate --model sparkle --p 10 --n 20 --out-dir " + dir +
                          " 2>" + err_file + " >/dev/null";
    int status = std::system(command.c_str());
    CHECK(WEXITSTATUS(status) != 0);
    std::string err = slurp(err_file);
    CHECK(err.find("mixed") != std::string::npos);
    CHECK(err.find("ising") != std::string::npos);
}

TEST_CASE("the same seed writes byte-identical simulation output") {
    std::string a = fresh_dir("cig_cli_det_a");
    std::string b = fresh_dir("cig_cli_det_b");
    REQUIRE(run("simulate --model mixed --p 10 --n 30 --seed 42 --out-dir " + a) == 0);
    REQUIRE(run("simulate --model mixed --p 10 --n 30 --seed 42 --out-dir " + b) == 0);
    for (std::string name : {"data.csv", "schema.json", "true_cig.tsv", "model.json"})
        CHECK(slurp(a + "/" + name) == slurp(b + "/" + name));
}

TEST_CASE("estimate records the derived q in the metadata") {
    std::string sim = fresh_dir("cig_cli_est_sim");
    REQUIRE(run("simulate --model gaussian --p 50 --n 60 --seed 3 --out-dir " + sim) == 0);
    std::string est = fresh_dir("cig_cli_est_out");
    REQUIRE(run("estimate --data " + sim + "/data.csv --schema " + sim +
                "/schema.json --learner grafo --ev 5 --pi-thr 0.75 --n-sub 8 --n-trees 15 "
                "--seed 1 --out-dir " + est) == 0);
    nlohmann::json meta = nlohmann::json::parse(slurp(est + "/meta.json"));
    CHECK(meta["q"] == 55);  // compute_q(5, 0.75, 50)
    CHECK(fs::exists(est + "/graph.tsv"));
    CHECK(fs::exists(est + "/graph.dot"));
}

TEST_CASE("pi-thr outside (0.5, 1) is a usage error") {
    std::string sim = fresh_dir("cig_cli_pthr_sim");
    REQUIRE(run("simulate --model gaussian --p 10 --n 30 --seed 3 --out-dir " + sim) == 0);
    CHECK(run("estimate --data " + sim + "/data.csv --schema " + sim +
              "/schema.json --learner grafo --ev 1 --pi-thr 0.4 --out-dir " + sim) != 0);
}

TEST_CASE("stablasso on mixed data demands the dichotomize flag") {
    std::string sim = fresh_dir("cig_cli_mix_sim");
    REQUIRE(run("simulate --model mixed --p 8 --n 40 --seed 5 --out-dir " + sim) == 0);
    std::string est = fresh_dir("cig_cli_mix_est");
    std::string err_file = est + "/err.txt";
    std::string command = cli + " estimate --data " + sim + "/data.csv --schema " + sim +
                          "/schema.json --learner stablasso --ev 1 --n-sub 6 --out-dir " + est +
                          " 2>" + err_file + " >/dev/null";
    CHECK(WEXITSTATUS(std::system(command.c_str())) != 0);
    CHECK(slurp(err_file).find("--dichotomize") != std::string::npos);

    REQUIRE(run("estimate --data " + sim + "/data.csv --schema " + sim +
                "/schema.json --learner stablasso --dichotomize --ev 1 --n-sub 6 --out-dir " +
                est) == 0);
    CHECK(fs::exists(est + "/graph.tsv"));
}

TEST_CASE("raw mode cuts a single run at q") {
    std::string sim = fresh_dir("cig_cli_raw_sim");
    REQUIRE(run("simulate --model gaussian --p 10 --n 50 --seed 11 --out-dir " + sim) == 0);
    std::string est = fresh_dir("cig_cli_raw_est");
    REQUIRE(run("estimate --data " + sim + "/data.csv --schema " + sim +
                "/schema.json --learner grafo --raw-q 4 --n-trees 15 --seed 2 --out-dir " + est) == 0);
    nlohmann::json meta = nlohmann::json::parse(slurp(est + "/meta.json"));
    CHECK(meta["mode"] == "raw");
    CHECK(meta["q"] == 4);
    CHECK(meta["n_selected"].get<int>() <= 4);
}

TEST_CASE("estimate output is byte-identical across worker counts") {
    std::string sim = fresh_dir("cig_cli_wrk_sim");
    REQUIRE(run("simulate --model gaussian --p 12 --n 40 --seed 13 --out-dir " + sim) == 0);
    std::string w1 = fresh_dir("cig_cli_wrk1");
    std::string w4 = fresh_dir("cig_cli_wrk4");
    std::string flags = " --learner grafo --ev 2 --n-sub 10 --n-trees 10 --seed 17 ";
    REQUIRE(run("estimate --data " + sim + "/data.csv --schema " + sim + "/schema.json" + flags +
                "--workers 1 --out-dir " + w1) == 0);
    REQUIRE(run("estimate --data " + sim + "/data.csv --schema " + sim + "/schema.json" + flags +
                "--workers 4 --out-dir " + w4) == 0);
    for (std::string name : {"graph.tsv", "graph.dot", "meta.json"})
        CHECK(slurp(w1 + "/" + name) == slurp(w4 + "/" + name));
}

TEST_CASE("bench runs a config and is reproducible across workers") {
    std::string dir = fresh_dir("cig_cli_bench");
    std::string config = dir + "/config.json";
    {
        std::ofstream out(config);
        out << R"({"model": "gaussian", "p": 10, "n": 40, "repetitions": 2,
                   "evs": [1.0], "learners": ["oracle"], "n_sub": 6, "seed": 31,
                   "q_grid": [1, 4, 10]})";
    }
    std::string out1 = fresh_dir("cig_cli_bench1");
    std::string out2 = fresh_dir("cig_cli_bench2");
    REQUIRE(run("bench " + config + " --workers 1 --out-dir " + out1) == 0);
    REQUIRE(run("bench " + config + " --workers 2 --out-dir " + out2) == 0);
    for (std::string name : {"cells.tsv", "curves.tsv", "summary.json"})
        CHECK(slurp(out1 + "/" + name) == slurp(out2 + "/" + name));
    // oracle learner never produces false positives
    std::string cells = slurp(out1 + "/cells.tsv");
    CHECK(cells.find("oracle") != std::string::npos);
}

TEST_CASE("a missing bench config is a clean failure") {
    std::string dir = fresh_dir("cig_cli_bench_missing");
    CHECK(run("bench " + dir + "/nope.json --out-dir " + dir) != 0);
}
