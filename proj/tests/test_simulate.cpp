#include <doctest.h>

#include <cmath>
#include <map>

#include "cig/rng.hpp"
#include "cig/simulate.hpp"
#include "test_util.hpp"

using namespace cig;

TEST_CASE("sparsity: about one percent of the upper triangle is nonzero") {
    const int p = 50;
    double total = 0;
    const int seeds = 1000;
    for (int s = 0; s < seeds; ++s) {
        DagModel model = sample_dag_model(DagKind::gaussian, p, static_cast<std::uint64_t>(s));
        for (int i = 0; i < p; ++i)
            for (int j = i + 1; j < p; ++j)
                if (model.weights[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] != 0.0)
                    total += 1.0;
    }
    double mean = total / seeds;  // expectation 0.01 * 1225 = 12.25
    CHECK(std::fabs(mean - 12.25) < 0.7);
}

TEST_CASE("every nonzero weight sits in [0.1, 1] by magnitude") {
    for (std::uint64_t s = 0; s < 50; ++s) {
        DagModel model = sample_dag_model(DagKind::gaussian_interactions, 40, s);
        for (int i = 0; i < 40; ++i)
            for (int j = i + 1; j < 40; ++j) {
                double w = model.weights[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
                if (w == 0.0) continue;
                CHECK(std::fabs(w) >= 0.1);
                CHECK(std::fabs(w) <= 1.0);
            }
        for (int j = 0; j < 40; ++j)
            for (const Interaction& t : model.interactions[static_cast<std::size_t>(j)]) {
                CHECK(std::fabs(t.weight) >= 0.1);
                CHECK(std::fabs(t.weight) <= 1.0);
            }
    }
}

TEST_CASE("sign vectors always carry both signs") {
    for (std::uint64_t s = 0; s < 200; ++s) {
        DagModel model = sample_dag_model(DagKind::multinomial, 30, s);
        for (const auto& [key, u] : model.u) {
            int sum = 0;
            for (int v : u) sum += v;
            CHECK(std::abs(sum) < static_cast<int>(u.size()));
        }
        for (const auto& [key, v] : model.v) {
            int sum = 0;
            for (int sv : v) sum += sv;
            if (v.size() > 1) CHECK(std::abs(sum) < static_cast<int>(v.size()));
        }
    }
}

TEST_CASE("interaction sets pair up existing parents, half of the eligible pairs") {
    for (std::uint64_t s = 0; s < 100; ++s) {
        DagModel model = sample_dag_model(DagKind::gaussian_interactions, 60, s);
        for (int j = 0; j < 60; ++j) {
            auto parents = model.parents(j);
            std::size_t n_pairs = parents.size() * (parents.size() - 1) / 2;
            std::size_t expected = static_cast<std::size_t>(std::llround(0.5 * n_pairs));
            CHECK(model.interactions[static_cast<std::size_t>(j)].size() == expected);
            for (const Interaction& t : model.interactions[static_cast<std::size_t>(j)]) {
                CHECK(model.weights[static_cast<std::size_t>(t.i)][static_cast<std::size_t>(j)] != 0.0);
                CHECK(model.weights[static_cast<std::size_t>(t.k)][static_cast<std::size_t>(j)] != 0.0);
            }
        }
    }
}

TEST_CASE("gaussian correlation matches the closed form") {
    DagModel model;
    model.kind = DagKind::gaussian;
    model.p = 2;
    model.weights = {{0.0, 0.5}, {0.0, 0.0}};
    model.interactions.assign(2, {});
    model.linear_parents.assign(2, {});
    model.levels = {0, 0};
    MixedDataset data = sample_data(model, 10000, 99);
    double m1 = 0, m2 = 0;
    for (int i = 0; i < data.n(); ++i) {
        m1 += data.cell(i, 0);
        m2 += data.cell(i, 1);
    }
    m1 /= data.n();
    m2 /= data.n();
    double c11 = 0, c22 = 0, c12 = 0;
    for (int i = 0; i < data.n(); ++i) {
        double a = data.cell(i, 0) - m1;
        double b = data.cell(i, 1) - m2;
        c11 += a * a;
        c22 += b * b;
        c12 += a * b;
    }
    double corr = c12 / std::sqrt(c11 * c22);
    CHECK(std::fabs(corr - 0.5 / std::sqrt(1.25)) < 0.03);
}

TEST_CASE("independent bernoulli columns are balanced") {
    DagModel model;
    model.kind = DagKind::bernoulli;
    model.p = 3;
    model.weights.assign(3, std::vector<double>(3, 0.0));
    model.interactions.assign(3, {});
    model.linear_parents.assign(3, {});
    model.levels = {2, 2, 2};
    MixedDataset data = sample_data(model, 10000, 7);
    for (int j = 0; j < 3; ++j) {
        double mean = 0;
        for (int i = 0; i < data.n(); ++i) mean += data.cell(i, j) == 1.0 ? 1.0 : -1.0;
        mean /= data.n();
        CHECK(std::fabs(mean) < 0.05);
        CHECK(data.is_categorical(j));
    }
}

TEST_CASE("mixed model alternates continuous and categorical columns") {
    DagModel model = sample_dag_model(DagKind::mixed, 12, 3);
    MixedDataset data = sample_data(model, 50, 4);
    for (int j = 0; j < 12; ++j) {
        if (j % 2 == 0) {
            CHECK_FALSE(data.is_categorical(j));
        } else {
            CHECK(data.is_categorical(j));
            CHECK(data.n_levels(j) >= 3);
            CHECK(data.n_levels(j) <= 5);
        }
    }
    data.validate();
}

TEST_CASE("table links evaluate as written") {
    // two continuous parents feeding x3 in each gaussian flavor
    DagModel model;
    model.p = 3;
    model.weights = {{0, 0, 0.4}, {0, 0, -0.8}, {0, 0, 0}};
    model.interactions.assign(3, {});
    model.linear_parents.assign(3, {});
    model.levels = {0, 0, 0};
    std::vector<double> x = {2.0, -1.5, 0.0};

    model.kind = DagKind::gaussian;
    CHECK(dag_eta(model, 2, x)[0] == doctest::Approx(0.4 * 2.0 - 0.8 * -1.5));

    model.kind = DagKind::gaussian_interactions;
    model.interactions[2].push_back({0, 1, 0.3});
    CHECK(dag_eta(model, 2, x)[0] ==
          doctest::Approx(0.4 * 2.0 - 0.8 * -1.5 + 0.3 * 2.0 * -1.5));

    model.kind = DagKind::gaussian_nonlinear;
    model.linear_parents[2] = {0};  // x1 linear, x2 through log|.|
    CHECK(dag_eta(model, 2, x)[0] ==
          doctest::Approx(5.0 * 0.4 * 2.0 + 5.0 * -0.8 * std::log(1.5)));

    // a zero-valued parent contributes nothing through the log term
    model.linear_parents[2] = {1};
    std::vector<double> with_zero = {0.0, -1.5, 0.0};
    CHECK(dag_eta(model, 2, with_zero)[0] == doctest::Approx(5.0 * -0.8 * -1.5));
}

TEST_CASE("multinomial link uses the sign structure") {
    DagModel model;
    model.kind = DagKind::multinomial;
    model.p = 2;
    model.weights = {{0, 0.6}, {0, 0}};
    model.interactions.assign(2, {});
    model.linear_parents.assign(2, {});
    model.levels = {3, 3};
    model.u[{0, 1}] = {1, -1, 1};
    model.v[{0, 1}] = {-1, 1, 1};
    // x1 at level 1: 2*u[1] - sum(u) = -2 - 1 = -3
    std::vector<double> x = {1.0, 0.0};
    auto eta = dag_eta(model, 1, x);
    double term = 2.0 * -1 - (1 - 1 + 1);
    CHECK(eta[0] == doctest::Approx(-1 * 0.6 * term));
    CHECK(eta[1] == doctest::Approx(1 * 0.6 * term));
    CHECK(eta[2] == doctest::Approx(1 * 0.6 * term));
}

TEST_CASE("moralization marries co-parents") {
    DagModel model;
    model.kind = DagKind::gaussian;
    model.p = 3;
    model.interactions.assign(3, {});
    model.linear_parents.assign(3, {});
    model.levels = {0, 0, 0};

    SUBCASE("collider 1->3, 2->3") {
        model.weights = {{0, 0, 0.5}, {0, 0, 0.5}, {0, 0, 0}};
        TrueCig cig = moralize(model);
        REQUIRE(cig.edges.size() == 3);
        CHECK(cig.has({0, 1}));
        CHECK(cig.has({0, 2}));
        CHECK(cig.has({1, 2}));
    }
    SUBCASE("chain 1->2, 2->3") {
        model.weights = {{0, 0.5, 0}, {0, 0, 0.5}, {0, 0, 0}};
        TrueCig cig = moralize(model);
        REQUIRE(cig.edges.size() == 2);
        CHECK(cig.has({0, 1}));
        CHECK(cig.has({1, 2}));
        CHECK_FALSE(cig.has({0, 2}));
    }
    SUBCASE("empty weights give an empty graph") {
        model.weights = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
        CHECK(moralize(model).edges.empty());
    }
}

TEST_CASE("moralized graph matches the empirical precision pattern") {
    // denser-than-default random gaussian DAGs so the oracle has edges to find
    Rng maker(424242);
    for (int trial = 0; trial < 3; ++trial) {
        int p = 5 + static_cast<int>(maker.uniform_index(2));  // 5 or 6
        DagModel model;
        model.kind = DagKind::gaussian;
        model.p = p;
        model.weights.assign(static_cast<std::size_t>(p),
                             std::vector<double>(static_cast<std::size_t>(p), 0.0));
        model.interactions.assign(static_cast<std::size_t>(p), {});
        model.linear_parents.assign(static_cast<std::size_t>(p), {});
        model.levels.assign(static_cast<std::size_t>(p), 0);
        for (int i = 0; i < p; ++i)
            for (int j = i + 1; j < p; ++j)
                if (maker.bernoulli(0.35)) {
                    double mag = maker.uniform(0.4, 1.0);
                    model.weights[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                        maker.bernoulli(0.5) ? mag : -mag;
                }

        const int n = 200000;
        MixedDataset data = sample_data(model, n, 1000 + static_cast<std::uint64_t>(trial));

        // sample covariance -> precision -> partial correlations
        std::vector<double> mean(static_cast<std::size_t>(p), 0.0);
        for (int j = 0; j < p; ++j)
            for (int i = 0; i < n; ++i) mean[static_cast<std::size_t>(j)] += data.cell(i, j);
        for (double& m : mean) m /= n;
        std::vector<std::vector<double>> cov(static_cast<std::size_t>(p),
                                             std::vector<double>(static_cast<std::size_t>(p), 0.0));
        for (int i = 0; i < n; ++i)
            for (int a = 0; a < p; ++a)
                for (int b = a; b < p; ++b) {
                    double d = (data.cell(i, a) - mean[static_cast<std::size_t>(a)]) *
                               (data.cell(i, b) - mean[static_cast<std::size_t>(b)]);
                    cov[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] += d;
                }
        for (int a = 0; a < p; ++a)
            for (int b = a; b < p; ++b) {
                cov[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] /= n;
                cov[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)] =
                    cov[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
            }
        auto precision = cig_test::invert_matrix(cov);

        TrueCig truth = moralize(model);
        for (int a = 0; a < p; ++a) {
            for (int b = a + 1; b < p; ++b) {
                double partial = -precision[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] /
                                 std::sqrt(precision[static_cast<std::size_t>(a)][static_cast<std::size_t>(a)] *
                                           precision[static_cast<std::size_t>(b)][static_cast<std::size_t>(b)]);
                CHECK((std::fabs(partial) >= 0.02) == truth.has({a, b}));
            }
        }
    }
}

TEST_CASE("ising models are symmetric with mean neighborhood 4") {
    const int p = 50;
    double degree_sum = 0;
    const int seeds = 500;
    for (int s = 0; s < seeds; ++s) {
        IsingModel model = sample_ising(p, static_cast<std::uint64_t>(s));
        for (int i = 0; i < p; ++i) {
            for (int j = 0; j < p; ++j) {
                CHECK(model.theta[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] ==
                      model.theta[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)]);
                if (i != j && model.theta[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] != 0)
                    degree_sum += 1.0;
            }
        }
    }
    double mean_degree = degree_sum / (seeds * p);
    CHECK(std::fabs(mean_degree - 4.0) < 0.2);

    IsingModel model = sample_ising(10, 3);
    TrueCig cig = ising_cig(model);
    for (const Edge& e : cig.edges)
        CHECK(model.theta[static_cast<std::size_t>(e.i)][static_cast<std::size_t>(e.j)] != 0);
}

TEST_CASE("two-site chain matches the exact agreement probability") {
    IsingModel model;
    model.p = 2;
    model.theta = {{0, 1}, {1, 0}};
    const int n = 20000;
    MixedDataset draws = gibbs_sample(model, n, 200, 5, 31);
    double agree = 0;
    for (int i = 0; i < n; ++i)
        if (draws.cell(i, 0) == draws.cell(i, 1)) agree += 1.0;
    agree /= n;
    double exact = std::exp(1.0) / (std::exp(1.0) + std::exp(-1.0));
    CHECK(std::fabs(agree - exact) < 0.02);
}

TEST_CASE("zero couplings give independent fair signs") {
    IsingModel model;
    model.p = 4;
    model.theta.assign(4, std::vector<int>(4, 0));
    MixedDataset draws = gibbs_sample(model, 10000, 50, 2, 17);
    for (int j = 0; j < 4; ++j) {
        double mean = 0;
        for (int i = 0; i < draws.n(); ++i) mean += draws.cell(i, j) == 1.0 ? 1.0 : -1.0;
        mean /= draws.n();
        CHECK(std::fabs(mean) < 0.03);
    }
}

TEST_CASE("three-site empirical distribution is close to the enumeration") {
    Rng maker(55);
    IsingModel model;
    model.p = 3;
    model.theta.assign(3, std::vector<int>(3, 0));
    for (int i = 0; i < 3; ++i) {
        model.theta[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = maker.uniform_int(-1, 1);
        for (int j = i + 1; j < 3; ++j) {
            int v = maker.uniform_int(-1, 1);
            model.theta[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = v;
            model.theta[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = v;
        }
    }
    MixedDataset draws = gibbs_sample(model, 50000, 500, 20, 777);
    auto exact = cig_test::enumerate_ising(model);
    auto empirical = cig_test::empirical_state_distribution(draws);
    CHECK(cig_test::total_variation(exact, empirical) < 0.03);
}

TEST_CASE("gibbs draws are invariant under node relabeling") {
    IsingModel model;
    model.p = 3;
    model.theta = {{1, 1, 0}, {1, 0, -1}, {0, -1, -1}};
    // relabeled: swap nodes 0 and 2
    IsingModel swapped;
    swapped.p = 3;
    swapped.theta = {{-1, -1, 0}, {-1, 0, 1}, {0, 1, 1}};

    MixedDataset a = gibbs_sample(model, 40000, 300, 10, 11);
    MixedDataset b = gibbs_sample(swapped, 40000, 300, 10, 12);
    auto dist_a = cig_test::empirical_state_distribution(a);
    auto dist_b = cig_test::empirical_state_distribution(b);
    // map each state of the swapped model back through the permutation
    std::vector<double> unswapped(8, 0.0);
    for (std::size_t s = 0; s < 8; ++s) {
        std::size_t t = ((s & 1) << 2) | (s & 2) | ((s >> 2) & 1);
        unswapped[t] = dist_b[s];
    }
    CHECK(cig_test::total_variation(dist_a, unswapped) < 0.03);
}

TEST_CASE("simulated datasets satisfy the container invariants") {
    for (DagKind kind : {DagKind::gaussian, DagKind::gaussian_interactions,
                         DagKind::gaussian_nonlinear, DagKind::bernoulli, DagKind::multinomial,
                         DagKind::mixed}) {
        DagModel model = sample_dag_model(kind, 20, 5);
        MixedDataset data = sample_data(model, 200, 6);
        CHECK_NOTHROW(data.validate());
    }
    IsingModel ising = sample_ising(12, 5);
    MixedDataset draws = gibbs_sample(ising, 100, 100, 5, 6);
    CHECK_NOTHROW(draws.validate());
}
