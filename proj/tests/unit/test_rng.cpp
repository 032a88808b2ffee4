#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "gazescreen/rng.hpp"

using gazescreen::Pcg64;

TEST_CASE("same seed gives the same stream") {
    Pcg64 a(42), b(42), c(43);
    bool differs = false;
    for (int i = 0; i < 100; ++i) {
        const auto x = a.next();
        CHECK(x == b.next());
        differs = differs || x != c.next();
    }
    CHECK(differs);
}

TEST_CASE("bounded stays in range and covers it evenly") {
    Pcg64 rng(7);
    std::array<int, 6> counts{};
    constexpr int kDraws = 60000;
    for (int i = 0; i < kDraws; ++i) {
        const auto v = rng.bounded(6);
        REQUIRE(v < 6);
        ++counts[v];
    }
    // Chi-square with 5 dof; 20.5 is the 0.999 quantile.
    double chi2 = 0.0;
    for (int c : counts) chi2 += (c - kDraws / 6.0) * (c - kDraws / 6.0) / (kDraws / 6.0);
    CHECK(chi2 < 20.5);
}

TEST_CASE("uniform and normal moments") {
    Pcg64 rng(11);
    constexpr int kDraws = 200000;
    double su = 0.0, sn = 0.0, sn2 = 0.0;
    for (int i = 0; i < kDraws; ++i) {
        const double u = rng.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        su += u;
        const double z = rng.normal();
        sn += z;
        sn2 += z * z;
    }
    CHECK(su / kDraws == doctest::Approx(0.5).epsilon(0.01));
    CHECK(std::abs(sn / kDraws) < 0.01);
    CHECK(sn2 / kDraws == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("categorical follows the weights and skips zeros") {
    Pcg64 rng(3);
    std::array<int, 4> counts{};
    for (int i = 0; i < 40000; ++i) ++counts[rng.categorical({1.0, 0.0, 3.0, 0.0})];
    CHECK(counts[1] == 0);
    CHECK(counts[3] == 0);
    CHECK(counts[2] / 40000.0 == doctest::Approx(0.75).epsilon(0.02));
}

TEST_CASE("shuffle is a permutation") {
    Pcg64 rng(5);
    std::vector<int> v(50);
    std::iota(v.begin(), v.end(), 0);
    auto w = v;
    rng.shuffle(w);
    CHECK(w != v);
    std::sort(w.begin(), w.end());
    CHECK(w == v);
}

TEST_CASE("derived seeds are distinct") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t s = 0; s < 4; ++s) {
        for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(gazescreen::derive_seed(s, i));
    }
    CHECK(seen.size() == 4000);
}
