#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>

#include "marketdef/clustering.hpp"
#include "marketdef/dataset.hpp"
#include "marketdef/simulate.hpp"
#include "oracles.hpp"

using namespace marketdef;

namespace {

Matrix random_matrix(std::size_t n, std::size_t d, RngSeed seed, double scale = 1.0) {
    Rng rng(seed);
    Matrix m(n, d);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < d; ++c) m(r, c) = rng.next_normal() * scale;
    return m;
}

Matrix standardized_wholesalers(RngSeed seed) {
    const CsvTable t = simulate_wholesalers(seed);
    const auto m = from_table(t, wholesaler_specs(), "product_id", "sim");
    return standardize(m).values;
}

// Partition equality up to label renaming.
bool same_partition(const std::vector<int>& a, const std::vector<int>& b) {
    if (a.size() != b.size()) return false;
    std::map<int, int> fwd, bwd;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const auto f = fwd.find(a[i]);
        if (f == fwd.end()) fwd[a[i]] = b[i];
        else if (f->second != b[i]) return false;
        const auto g = bwd.find(b[i]);
        if (g == bwd.end()) bwd[b[i]] = a[i];
        else if (g->second != a[i]) return false;
    }
    return true;
}

} // namespace

TEST_CASE("euclid_sq basics") {
    const std::vector<double> a{0.0, 0.0}, b{3.0, 4.0};
    CHECK(euclid_sq(a, b) == 25.0);
    CHECK(euclid_sq(a, a) == 0.0);
    const std::vector<double> c{1.0, 2.0, 3.0};
    CHECK_THROWS_AS(euclid_sq(a, c), DimensionError);
}

TEST_CASE("euclid_sq matches a per-coordinate loop") {
    Rng rng(RngSeed{20, 0});
    for (int t = 0; t < 50; ++t) {
        std::vector<double> a(5), b(5);
        for (int i = 0; i < 5; ++i) {
            a[static_cast<std::size_t>(i)] = rng.next_normal() * 3.0;
            b[static_cast<std::size_t>(i)] = rng.next_normal() * 3.0;
        }
        double expect = 0.0;
        for (int i = 0; i < 5; ++i) {
            const double d = a[static_cast<std::size_t>(i)] - b[static_cast<std::size_t>(i)];
            expect += d * d;
        }
        CHECK(std::abs(euclid_sq(a, b) - expect) < 1e-12);
    }
}

TEST_CASE("seeding roulette wheel reproduces the nine-point table bit-exactly") {
    // Nine points on a line whose distances to the anchored first center
    // (row 2) are 2,1,0,1,2,2,1,1,2.
    Matrix data{{-2}, {-1}, {0}, {1}, {2}, {2}, {1}, {-1}, {-2}};
    const auto table = kmeanspp_selection(data, {2});

    const std::vector<double> d2{4, 1, 0, 1, 4, 4, 1, 1, 4};
    CHECK(table.d2 == d2);
    CHECK(table.total == 20.0);

    const std::vector<double> prob{0.2, 0.05, 0.0, 0.05, 0.2, 0.2, 0.05, 0.05, 0.2};
    for (std::size_t i = 0; i < 9; ++i) CHECK(table.prob[i] == prob[i]);

    const std::vector<double> cum{4.0 / 20, 5.0 / 20, 5.0 / 20,  6.0 / 20, 10.0 / 20,
                                  14.0 / 20, 15.0 / 20, 16.0 / 20, 20.0 / 20};
    for (std::size_t i = 0; i < 9; ++i) CHECK(table.cum[i] == cum[i]);
    CHECK(table.cum[8] == 1.0);
}

TEST_CASE("zero-probability points are never drawn as the next center") {
    Matrix data{{-2}, {-1}, {0}, {1}, {2}, {2}, {1}, {-1}, {-2}};
    for (std::uint64_t s = 0; s < 200; ++s) {
        const auto rows = kmeanspp_seed_rows(data, 2, RngSeed{s, 0}, 2);
        CHECK(rows[0] == 2);
        CHECK(rows[1] != 2); // the anchor has D(x) = 0
    }
}

TEST_CASE("k = n seeding returns a permutation of all rows") {
    const Matrix data = random_matrix(6, 2, RngSeed{21, 0});
    for (std::uint64_t s = 0; s < 10; ++s) {
        auto rows = kmeanspp_seed_rows(data, 6, RngSeed{s, 1});
        std::sort(rows.begin(), rows.end());
        for (std::size_t i = 0; i < 6; ++i) CHECK(rows[i] == i);
    }
}

TEST_CASE("k = 2 on two distinct points always picks both") {
    Matrix data{{0.0, 0.0}, {1.0, 1.0}};
    for (std::uint64_t s = 0; s < 25; ++s) {
        auto rows = kmeanspp_seed_rows(data, 2, RngSeed{s, 2});
        std::sort(rows.begin(), rows.end());
        CHECK(rows == std::vector<std::size_t>{0, 1});
    }
}

TEST_CASE("anchored seeding always starts from the anchor") {
    const Matrix data = random_matrix(12, 3, RngSeed{22, 0});
    for (std::uint64_t s = 0; s < 50; ++s) {
        const auto rows = kmeanspp_seed_rows(data, 4, RngSeed{s, 3}, 7);
        CHECK(rows[0] == 7);
    }
}

TEST_CASE("duplicate rows: seeding fails only when k exceeds the distinct count") {
    Matrix dup{{1.0, 1.0}, {1.0, 1.0}, {2.0, 2.0}};
    CHECK_THROWS_WITH_AS(kmeanspp_seed_rows(dup, 3, RngSeed{1, 0}),
                         doctest::Contains("distinct"), DomainError);
    for (std::uint64_t s = 0; s < 20; ++s) {
        const auto rows = kmeanspp_seed_rows(dup, 2, RngSeed{s, 4});
        std::set<double> xs;
        for (auto r : rows) xs.insert(dup(r, 0));
        CHECK(xs == std::set<double>{1.0, 2.0});
    }
    CHECK_THROWS_AS(kmeanspp_seed_rows(dup, 4, RngSeed{1, 0}), DomainError);
}

TEST_CASE("lloyd splits the unit square into side pairs from edge midpoints") {
    const Matrix corners{{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}};
    const Matrix init{{0.5, 0.0}, {0.5, 1.0}};
    const auto a = lloyd(corners, init);
    CHECK(a.tot_within_ss == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(a.labels[0] == a.labels[1]);
    CHECK(a.labels[2] == a.labels[3]);
    CHECK(a.labels[0] != a.labels[2]);
    validate_assignment(corners, a);
}

TEST_CASE("lloyd with k = n makes every point its own center") {
    const Matrix data = random_matrix(5, 2, RngSeed{23, 0});
    const auto a = lloyd(data, data);
    CHECK(a.tot_within_ss == 0.0);
    std::set<int> labels(a.labels.begin(), a.labels.end());
    CHECK(labels.size() == 5);
    validate_assignment(data, a);
}

TEST_CASE("lloyd rejects a non-positive iteration budget") {
    const Matrix data = random_matrix(4, 2, RngSeed{24, 0});
    CHECK_THROWS_AS(lloyd(data, data, 0), DomainError);
}

TEST_CASE("lloyd objective is non-increasing at every iteration") {
    for (std::uint64_t s = 0; s < 20; ++s) {
        const Matrix data = random_matrix(24, 3, RngSeed{25, s});
        const Matrix init = uniform_row_seed(data, 4, RngSeed{s, 5});
        std::vector<double> trace;
        const auto a = lloyd(data, init, kDefaultMaxIter, &trace);
        REQUIRE(static_cast<int>(trace.size()) == a.iterations);
        for (std::size_t i = 1; i < trace.size(); ++i)
            CHECK(trace[i] <= trace[i - 1] + 1e-9 * std::max(1.0, trace[i - 1]));
    }
}

TEST_CASE("lloyd repairs empty clusters and keeps k groups") {
    // Far-apart initial centers guarantee one empty cluster on assignment.
    Matrix data{{0.0, 0.0}, {0.1, 0.0}, {0.0, 0.1}, {5.0, 5.0}};
    Matrix init{{0.0, 0.0}, {100.0, 100.0}, {5.0, 5.0}};
    const auto a = lloyd(data, init);
    CHECK(a.k == 3);
    std::set<int> labels(a.labels.begin(), a.labels.end());
    CHECK(labels.size() == 3);
    validate_assignment(data, a);
}

TEST_CASE("best of restarts matches the exhaustive two-cluster optimum") {
    int hit = 0;
    for (std::uint64_t s = 0; s < 20; ++s) {
        Rng rng(RngSeed{26, s});
        const std::size_t n = 4 + rng.next_below(5);
        const Matrix data = random_matrix(n, 2, RngSeed{27, s});
        const double oracle = oracles::best_two_partition_ss(data);
        const auto a = kmeans_restarts(data, 2, 50, RngSeed{s, 6});
        CHECK(a.tot_within_ss >= oracle - 1e-9);
        if (a.tot_within_ss <= oracle + 1e-9) ++hit;
    }
    CHECK(hit >= 19);
}

TEST_CASE("restarts = 1 equals a single seeded run") {
    const Matrix data = standardized_wholesalers(RngSeed{30, 0});
    const RngSeed seed{42, 9};
    const auto one = kmeans_restarts(data, 3, 1, seed);
    const auto direct = lloyd(data, kmeanspp_seed(data, 3, seed.child(0)));
    CHECK(one.labels == direct.labels);
    CHECK(one.centers == direct.centers);
    CHECK(one.tot_within_ss == direct.tot_within_ss);
}

TEST_CASE("identical inputs give bit-identical assignments") {
    const Matrix data = standardized_wholesalers(RngSeed{31, 0});
    const auto a = kmeans_restarts(data, 4, 25, RngSeed{7, 7});
    const auto b = kmeans_restarts(data, 4, 25, RngSeed{7, 7});
    CHECK(a.labels == b.labels);
    CHECK(a.centers == b.centers);
    CHECK(a.tot_within_ss == b.tot_within_ss);
    CHECK(a.iterations == b.iterations);
}

TEST_CASE("thread count never changes the result") {
    const Matrix data = standardized_wholesalers(RngSeed{32, 0});
    const auto seq = kmeans_restarts(data, 3, 32, RngSeed{8, 8}, std::nullopt,
                                     Seeding::kmeanspp, 1);
    const auto par = kmeans_restarts(data, 3, 32, RngSeed{8, 8}, std::nullopt,
                                     Seeding::kmeanspp, 4);
    CHECK(seq.labels == par.labels);
    CHECK(seq.centers == par.centers);
    CHECK(seq.tot_within_ss == par.tot_within_ss);
}

TEST_CASE("more restarts from the same family never hurt") {
    const Matrix data = standardized_wholesalers(RngSeed{33, 0});
    const RngSeed seed{11, 11};
    double prev = std::numeric_limits<double>::infinity();
    for (int restarts : {1, 2, 5, 10, 25, 100}) {
        const auto a = kmeans_restarts(data, 2, restarts, seed, std::nullopt,
                                       Seeding::uniform_rows);
        CHECK(a.tot_within_ss <= prev + 1e-9);
        prev = a.tot_within_ss;
    }
}

TEST_CASE("lloyd partitions are row-order independent given matching centers") {
    for (std::uint64_t s = 0; s < 10; ++s) {
        const Matrix data = random_matrix(15, 3, RngSeed{34, s});
        const Matrix init = uniform_row_seed(data, 3, RngSeed{s, 12});
        const auto base = lloyd(data, init);

        std::vector<std::size_t> perm(15);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        Rng rng(RngSeed{35, s});
        rng.shuffle(perm);
        Matrix shuffled(15, 3);
        for (std::size_t r = 0; r < 15; ++r)
            for (std::size_t c = 0; c < 3; ++c) shuffled(r, c) = data(perm[r], c);

        const auto moved = lloyd(shuffled, init);
        std::vector<int> unshuffled(15);
        for (std::size_t r = 0; r < 15; ++r) unshuffled[perm[r]] = moved.labels[r];
        CHECK(same_partition(base.labels, unshuffled));
    }
}

TEST_CASE("the centroid identity holds on random point sets") {
    Rng rng(RngSeed{36, 0});
    for (int t = 0; t < 100; ++t) {
        const std::size_t n = 2 + rng.next_below(49);
        const std::size_t d = 1 + rng.next_below(10);
        const Matrix s = random_matrix(n, d, RngSeed{37, static_cast<std::uint64_t>(t)}, 2.0);
        std::vector<double> z(d), c(d, 0.0);
        for (std::size_t j = 0; j < d; ++j) z[j] = rng.next_normal() * 2.0;
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t j = 0; j < d; ++j) c[j] += s(r, j);
        for (std::size_t j = 0; j < d; ++j) c[j] /= static_cast<double>(n);

        double to_z = 0.0, to_c = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            to_z += euclid_sq(s.row(r), z);
            to_c += euclid_sq(s.row(r), c);
        }
        const double lhs = to_z - to_c;
        const double rhs = static_cast<double>(n) * euclid_sq(c, z);
        CHECK(std::abs(lhs - rhs) < 1e-8);
    }
}

TEST_CASE("hclust on a line merges nearest first") {
    Matrix data{{0.0}, {1.0}, {10.0}};
    const auto dend = hclust_complete(data);
    REQUIRE(dend.merges.size() == 2);
    CHECK(dend.merges[0].height == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(dend.merges[0].left == 0);
    CHECK(dend.merges[0].right == 1);
    CHECK(dend.merges[1].height == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(dend.merges[1].right == 3); // the {0,1} cluster node
}

TEST_CASE("identical points merge at height zero") {
    Matrix data{{2.0, 3.0}, {2.0, 3.0}};
    const auto dend = hclust_complete(data);
    REQUIRE(dend.merges.size() == 1);
    CHECK(dend.merges[0].height == 0.0);
}

TEST_CASE("hclust matches the naive complete-linkage oracle") {
    for (std::uint64_t s = 0; s < 25; ++s) {
        const Matrix data = random_matrix(8, 2, RngSeed{38, s});
        const auto dend = hclust_complete(data);
        const auto oracle = oracles::naive_complete_linkage_heights(data);
        REQUIRE(dend.merges.size() == oracle.size());
        for (std::size_t i = 0; i < oracle.size(); ++i)
            CHECK(std::abs(dend.merges[i].height - oracle[i]) < 1e-10);
        for (std::size_t i = 1; i < dend.merges.size(); ++i)
            CHECK(dend.merges[i].height >= dend.merges[i - 1].height);
    }
}

TEST_CASE("cutting the dendrogram yields valid partitions at every k") {
    const Matrix data = random_matrix(12, 3, RngSeed{39, 0});
    const auto dend = hclust_complete(data);
    for (std::size_t k = 1; k <= 12; ++k) {
        const auto labels = cut_dendrogram(dend, k);
        std::set<int> distinct(labels.begin(), labels.end());
        CHECK(distinct.size() == k);
        for (int l : labels) {
            CHECK(l >= 0);
            CHECK(l < static_cast<int>(k));
        }
    }
}

TEST_CASE("candidate_k reads the widest gaps") {
    Matrix line{{0.0}, {1.0}, {10.0}};
    CHECK(candidate_k(hclust_complete(line), 1) == std::vector<int>{2});

    Dendrogram flat;
    flat.n = 6;
    for (int t = 0; t < 5; ++t)
        flat.merges.push_back({t, t + 1, 1.0}); // node ids unused by candidate_k
    CHECK(candidate_k(flat, 3) == std::vector<int>{2, 3, 4});

    // Two well-separated blobs: the dominant gap sits at k = 2.
    Rng rng(RngSeed{40, 0});
    Matrix blobs(20, 2);
    for (std::size_t r = 0; r < 20; ++r) {
        const double cx = r < 10 ? 0.0 : 25.0;
        blobs(r, 0) = cx + rng.next_normal();
        blobs(r, 1) = rng.next_normal();
    }
    const auto ks = candidate_k(hclust_complete(blobs), 3);
    CHECK(std::find(ks.begin(), ks.end(), 2) != ks.end());
}

TEST_CASE("pairwise W_K equals the centroid sum of squares") {
    Rng rng(RngSeed{41, 0});
    for (int t = 0; t < 100; ++t) {
        const std::size_t n = 4 + rng.next_below(20);
        const std::size_t d = 1 + rng.next_below(5);
        const int k = 1 + static_cast<int>(rng.next_below(4));
        const Matrix data = random_matrix(n, d, RngSeed{42, static_cast<std::uint64_t>(t)});
        std::vector<int> labels(n);
        for (auto& l : labels) l = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(k)));
        const double pw = pairwise_wk(data, labels, static_cast<std::size_t>(k));
        const double ss = oracles::centroid_ss(data, labels, k);
        CHECK(std::abs(pw - ss) < 1e-8);
    }
}

TEST_CASE("one-dimensional pair: W_1 is 2 by both routes") {
    Matrix data{{0.0}, {2.0}};
    const std::vector<int> labels{0, 0};
    CHECK(pairwise_wk(data, labels, 1) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(oracles::centroid_ss(data, labels, 1) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("elbow curve ends at zero when every point is its own cluster") {
    const Matrix data = random_matrix(6, 2, RngSeed{43, 0});
    const auto wk = elbow_wk(data, 6, 10, RngSeed{1, 13});
    CHECK(wk.size() == 6);
    CHECK(wk[5] == 0.0);
    for (std::size_t i = 1; i < wk.size(); ++i) CHECK(wk[i] <= wk[i - 1] + 1e-9);
}

TEST_CASE("select_k_elbow finds the constructed knee") {
    CHECK(select_k_elbow({100.0, 40.0, 35.0, 33.0, 32.0}, 0.2) == 2);
    CHECK_FALSE(select_k_elbow({64.0, 32.0, 16.0, 8.0, 4.0}, 0.2).has_value());
    CHECK_THROWS_AS(select_k_elbow({10.0, 5.0}, 0.2), DomainError);
    CHECK_THROWS_AS(select_k_elbow({10.0, 0.0, 1.0}, 0.2), DomainError);
    CHECK_THROWS_AS(select_k_elbow({10.0, 5.0, 1.0}, 0.0), DomainError);
}

TEST_CASE("gap report satisfies its own definitions") {
    const Matrix data = standardized_wholesalers(RngSeed{44, 0});
    const auto rep = gap_statistic(data, 6, 8, 10, RngSeed{5, 14});
    REQUIRE(rep.k_range.size() == 6);
    for (std::size_t i = 0; i < 6; ++i) {
        CHECK(rep.gap[i] == rep.e_log_wk[i] - rep.log_wk[i]);
        CHECK(rep.wk[i] == doctest::Approx(std::exp(rep.log_wk[i])).epsilon(1e-12));
        CHECK(rep.se[i] > 0.0);
    }
    int expected = 6;
    for (std::size_t i = 0; i + 1 < 6; ++i) {
        if (rep.gap[i] >= rep.gap[i + 1] - rep.se[i + 1]) {
            expected = static_cast<int>(i + 1);
            break;
        }
    }
    CHECK(rep.selected_k_gap == expected);
}

TEST_CASE("gap statistic is reproducible and thread-invariant") {
    const Matrix data = standardized_wholesalers(RngSeed{45, 0});
    const auto a = gap_statistic(data, 5, 6, 8, RngSeed{9, 15}, GapReference::uniform_box, 1);
    const auto b = gap_statistic(data, 5, 6, 8, RngSeed{9, 15}, GapReference::uniform_box, 4);
    CHECK(a.log_wk == b.log_wk);
    CHECK(a.e_log_wk == b.e_log_wk);
    CHECK(a.se == b.se);
    CHECK(a.selected_k_gap == b.selected_k_gap);
}

TEST_CASE("gap statistic pins degenerate columns and rejects all-degenerate data") {
    Matrix one_flat(10, 2);
    Rng rng(RngSeed{46, 0});
    for (std::size_t r = 0; r < 10; ++r) {
        one_flat(r, 0) = rng.next_normal();
        one_flat(r, 1) = 3.0;
    }
    const auto rep = gap_statistic(one_flat, 3, 4, 5, RngSeed{3, 16});
    CHECK(rep.k_range.size() == 3);

    Matrix all_flat(5, 2, 1.0);
    CHECK_THROWS_AS(gap_statistic(all_flat, 2, 4, 5, RngSeed{3, 17}), DomainError);
}

TEST_CASE("pca-frame reference produces a usable report") {
    const Matrix data = standardized_wholesalers(RngSeed{47, 0});
    const auto rep = gap_statistic(data, 4, 5, 8, RngSeed{6, 18}, GapReference::pca_box);
    CHECK(rep.k_range.size() == 4);
    for (double g : rep.gap) CHECK(std::isfinite(g));
}

TEST_CASE("a clearly three-cluster data set selects k = 3") {
    Rng rng(RngSeed{48, 0});
    Matrix blobs(30, 2);
    const double cx[3] = {0.0, 20.0, 0.0};
    const double cy[3] = {0.0, 0.0, 20.0};
    for (std::size_t r = 0; r < 30; ++r) {
        const std::size_t g = r / 10;
        blobs(r, 0) = cx[g] + rng.next_normal();
        blobs(r, 1) = cy[g] + rng.next_normal();
    }
    const auto rep = gap_statistic(blobs, 6, 10, 15, RngSeed{12, 19});
    CHECK(rep.selected_k_gap == 3);
}

TEST_CASE("anchored restarts keep the anchor in the first cluster's center set") {
    const Matrix data = standardized_wholesalers(RngSeed{49, 0});
    const auto a = kmeans_restarts(data, 3, 10, RngSeed{13, 20}, 4);
    validate_assignment(data, a);
    // The anchor row's own cluster center is nearest to it by construction.
    const auto c = static_cast<std::size_t>(a.labels[4]);
    const double own = euclid_sq(data.row(4), a.centers.row(c));
    for (std::size_t j = 0; j < 3; ++j)
        CHECK(own <= euclid_sq(data.row(4), a.centers.row(j)) + 1e-10);
}
