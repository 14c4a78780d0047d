#include <doctest.h>

#include <algorithm>
#include <set>

#include "cig/rng.hpp"

using cig::Rng;

TEST_CASE("identical seeds reproduce the stream") {
    Rng a = Rng::stream(42, 7);
    Rng b = Rng::stream(42, 7);
    for (int i = 0; i < 200; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("different stream ids diverge") {
    Rng a = Rng::stream(42, 0);
    Rng b = Rng::stream(42, 1);
    int equal = 0;
    for (int i = 0; i < 64; ++i)
        if (a.next_u64() == b.next_u64()) ++equal;
    CHECK(equal == 0);
}

TEST_CASE("uniform stays in [0,1) and uniform_index in range") {
    Rng rng(123);
    for (int i = 0; i < 10000; ++i) {
        double u = rng.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        CHECK(rng.uniform_index(7) < 7);
    }
}

TEST_CASE("uniform_int covers its inclusive range") {
    Rng rng(5);
    std::set<int> seen;
    for (int i = 0; i < 1000; ++i) {
        int v = rng.uniform_int(-1, 1);
        CHECK(v >= -1);
        CHECK(v <= 1);
        seen.insert(v);
    }
    CHECK(seen.size() == 3);
}

TEST_CASE("shuffle is a permutation") {
    Rng rng(9);
    std::vector<int> v(50);
    for (int i = 0; i < 50; ++i) v[static_cast<std::size_t>(i)] = i;
    rng.shuffle(v);
    std::vector<int> sorted = v;
    std::sort(sorted.begin(), sorted.end());
    for (int i = 0; i < 50; ++i) CHECK(sorted[static_cast<std::size_t>(i)] == i);
}

TEST_CASE("sample_without_replacement is sorted and distinct") {
    Rng rng(11);
    auto sample = rng.sample_without_replacement(100, 50);
    CHECK(sample.size() == 50);
    CHECK(std::is_sorted(sample.begin(), sample.end()));
    CHECK(std::adjacent_find(sample.begin(), sample.end()) == sample.end());
    CHECK(sample.back() < 100);
}

TEST_CASE("normal moments are sane") {
    Rng rng(77);
    double sum = 0, sumsq = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        double z = rng.normal();
        sum += z;
        sumsq += z * z;
    }
    double mean = sum / n;
    double var = sumsq / n - mean * mean;
    CHECK(std::fabs(mean) < 0.01);
    CHECK(std::fabs(var - 1.0) < 0.02);
}
