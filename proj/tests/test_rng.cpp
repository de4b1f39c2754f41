#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "marketdef/rng.hpp"

using namespace marketdef;

TEST_CASE("identical (seed, stream) reproduces identical draws") {
    Rng a(RngSeed{42, 7});
    Rng b(RngSeed{42, 7});
    for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("different streams decorrelate") {
    Rng a(RngSeed{42, 0});
    Rng b(RngSeed{42, 1});
    int same = 0;
    for (int i = 0; i < 1000; ++i)
        if (a.next_u64() == b.next_u64()) ++same;
    CHECK(same == 0);
}

TEST_CASE("child streams are deterministic and distinct") {
    const RngSeed root{9, 3};
    CHECK(root.child(5).stream == root.child(5).stream);
    std::set<std::uint64_t> streams;
    for (std::uint64_t i = 0; i < 100; ++i) streams.insert(root.child(i).stream);
    CHECK(streams.size() == 100);
}

TEST_CASE("next_double lies in [0, 1)") {
    Rng r(RngSeed{1, 0});
    for (int i = 0; i < 10000; ++i) {
        const double u = r.next_double();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("next_below stays in range and covers values") {
    Rng r(RngSeed{2, 0});
    std::vector<int> hits(10, 0);
    for (int i = 0; i < 10000; ++i) ++hits[r.next_below(10)];
    for (int h : hits) {
        CHECK(h > 800);
        CHECK(h < 1200);
    }
    CHECK_THROWS_AS(r.next_below(0), DomainError);
}

TEST_CASE("next_int is inclusive on both ends") {
    Rng r(RngSeed{3, 0});
    bool seen_lo = false, seen_hi = false;
    for (int i = 0; i < 2000; ++i) {
        const long long v = r.next_int(1, 50);
        CHECK(v >= 1);
        CHECK(v <= 50);
        seen_lo = seen_lo || v == 1;
        seen_hi = seen_hi || v == 50;
    }
    CHECK(seen_lo);
    CHECK(seen_hi);
}

TEST_CASE("next_normal has the right first two moments") {
    Rng r(RngSeed{4, 0});
    const int n = 40000;
    double s = 0.0, ss = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = r.next_normal();
        s += x;
        ss += x * x;
    }
    const double mean = s / n;
    const double var = ss / n - mean * mean;
    CHECK(std::abs(mean) < 0.02);
    CHECK(std::abs(var - 1.0) < 0.03);
}

TEST_CASE("shuffle permutes") {
    Rng r(RngSeed{5, 0});
    std::vector<int> v{1, 2, 3, 4, 5, 6, 7, 8};
    auto sorted = v;
    r.shuffle(v);
    auto resorted = v;
    std::sort(resorted.begin(), resorted.end());
    CHECK(resorted == sorted);
}

TEST_CASE("sample_without_replacement draws distinct indices") {
    Rng r(RngSeed{6, 0});
    const auto s = r.sample_without_replacement(20, 8);
    CHECK(s.size() == 8);
    std::set<std::size_t> uniq(s.begin(), s.end());
    CHECK(uniq.size() == 8);
    for (std::size_t i : s) CHECK(i < 20);

    const auto all = r.sample_without_replacement(5, 5);
    std::set<std::size_t> uniq5(all.begin(), all.end());
    CHECK(uniq5.size() == 5);

    CHECK_THROWS_AS(r.sample_without_replacement(3, 4), DomainError);
}
