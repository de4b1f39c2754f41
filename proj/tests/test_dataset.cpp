#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "marketdef/dataset.hpp"
#include "marketdef/rng.hpp"
#include "marketdef/simulate.hpp"
#include "oracles.hpp"

using namespace marketdef;

namespace {

std::vector<FeatureSpec> numeric_specs(const std::vector<std::string>& names) {
    std::vector<FeatureSpec> specs;
    for (const auto& n : names) specs.push_back({n, FeatureKind::numeric, FeatureTransform::zscore});
    return specs;
}

std::filesystem::path write_temp(const std::string& name, const std::string& text) {
    const auto path = std::filesystem::path("dataset_tmp") / name;
    std::filesystem::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    f << text;
    return path;
}

ProductFeatureMatrix matrix_of(Matrix values, bool standardized = false) {
    ProductFeatureMatrix m;
    m.values = std::move(values);
    for (std::size_t c = 0; c < m.values.cols(); ++c)
        m.specs.push_back({"f" + std::to_string(c), FeatureKind::numeric, FeatureTransform::zscore});
    for (std::size_t r = 0; r < m.values.rows(); ++r) m.product_ids.push_back("p" + std::to_string(r));
    m.standardized = standardized;
    return m;
}

} // namespace

TEST_CASE("loads a minimal two-row file") {
    const auto path = write_temp("mini.csv", "product_id,x\na,1\nb,3\n");
    const auto m = load_csv(path, numeric_specs({"x"}), "product_id");
    CHECK(m.n() == 2);
    CHECK(m.d() == 1);
    CHECK(m.values(0, 0) == 1.0);
    CHECK(m.values(1, 0) == 3.0);
    CHECK(m.product_ids == std::vector<std::string>{"a", "b"});
    CHECK_FALSE(m.standardized);
}

TEST_CASE("insurance-style ingestion: five-year premiums pre-averaged to three columns") {
    // 52 rows, three coverage types with five annual columns each; a
    // pre-processing pass averages each block before the toolkit sees it.
    Rng rng(RngSeed{100, 0});
    CsvTable raw;
    raw.header.push_back("state");
    for (const char* prefix : {"liability", "collision", "comprehensive"})
        for (int yr = 0; yr < 5; ++yr)
            raw.header.push_back(std::string(prefix) + "_y" + std::to_string(yr));
    for (int r = 0; r < 52; ++r) {
        std::vector<std::string> row{"st" + std::to_string(r)};
        for (int c = 0; c < 15; ++c)
            row.push_back(format_double(300.0 + static_cast<double>(rng.next_int(0, 700))));
        raw.rows.push_back(row);
    }

    CsvTable averaged;
    averaged.header = {"state", "liability", "collision", "comprehensive"};
    for (const auto& row : raw.rows) {
        std::vector<std::string> out{row[0]};
        for (int block = 0; block < 3; ++block) {
            double s = 0.0;
            for (int yr = 0; yr < 5; ++yr) s += parse_cell(row[1 + 5 * block + yr], 1, "p");
            out.push_back(format_double(s / 5.0));
        }
        averaged.rows.push_back(out);
    }
    const auto path = write_temp("insurance.csv", write_csv(averaged));

    const auto m =
        load_csv(path, numeric_specs({"liability", "collision", "comprehensive"}), "state");
    CHECK(m.n() == 52);
    CHECK(m.d() == 3);

    const auto z = standardize(m);
    for (std::size_t c = 0; c < 3; ++c) {
        const auto col = z.values.col(c);
        CHECK(std::abs(mean(col)) < 1e-9);
        CHECK(std::abs(sample_sd(col) - 1.0) < 1e-9);
    }
}

TEST_CASE("missing declared column is a schema error naming it") {
    const auto path = write_temp("missing.csv", "product_id,x\na,1\nb,2\n");
    CHECK_THROWS_WITH_AS(load_csv(path, numeric_specs({"premium"}), "product_id"),
                         doctest::Contains("premium"), SchemaError);
}

TEST_CASE("non-numeric and non-finite cells are parse errors with position") {
    const auto path = write_temp("badcell.csv", "product_id,x\na,1\nb,oops\n");
    CHECK_THROWS_WITH_AS(load_csv(path, numeric_specs({"x"}), "product_id"),
                         doctest::Contains("row 3"), ParseError);
}

TEST_CASE("binary features admit only 0 and 1") {
    std::vector<FeatureSpec> specs{{"flag", FeatureKind::binary, FeatureTransform::zscore}};
    const auto good = write_temp("bin_ok.csv", "product_id,flag\na,0\nb,1\nc,1\n");
    const auto m = load_csv(good, specs, "product_id");
    CHECK(m.values(2, 0) == 1.0);

    const auto bad = write_temp("bin_bad.csv", "product_id,flag\na,0\nb,2\n");
    CHECK_THROWS_WITH_AS(load_csv(bad, specs, "product_id"), doctest::Contains("flag"),
                         DomainError);
}

TEST_CASE("fewer than two rows is rejected") {
    const auto path = write_temp("single.csv", "product_id,x\na,1\n");
    CHECK_THROWS_AS(load_csv(path, numeric_specs({"x"}), "product_id"), DomainError);
}

TEST_CASE("standardize: two points map to +-1/sqrt(2)") {
    auto m = matrix_of(Matrix{{1.0}, {3.0}});
    const auto z = standardize(m);
    CHECK(z.values(0, 0) == doctest::Approx(-0.7071067811865475).epsilon(1e-12));
    CHECK(z.values(1, 0) == doctest::Approx(0.7071067811865475).epsilon(1e-12));
    CHECK(z.standardized);
}

TEST_CASE("standardize is idempotent on its own output") {
    Rng rng(RngSeed{101, 0});
    Matrix v(20, 3);
    for (std::size_t r = 0; r < 20; ++r)
        for (std::size_t c = 0; c < 3; ++c) v(r, c) = rng.next_normal() * 5.0 + 2.0;
    const auto z1 = standardize(matrix_of(std::move(v)));

    auto again = z1;
    again.standardized = false; // re-ingest the already-scaled values
    const auto z2 = standardize(again);
    for (std::size_t r = 0; r < 20; ++r)
        for (std::size_t c = 0; c < 3; ++c)
            CHECK(std::abs(z2.values(r, c) - z1.values(r, c)) < 1e-12);
}

TEST_CASE("standardizing twice without reset is rejected") {
    const auto z = standardize(matrix_of(Matrix{{1.0}, {3.0}}));
    CHECK_THROWS_AS(standardize(z), DomainError);
}

TEST_CASE("constant zscore column is an error naming the column") {
    auto m = matrix_of(Matrix{{1.0, 5.0}, {2.0, 5.0}, {3.0, 5.0}});
    CHECK_THROWS_WITH_AS(standardize(m), doctest::Contains("f1"), DomainError);
    CHECK(constant_zscore_columns(m) == std::vector<std::string>{"f1"});

    const auto dropped = drop_columns(m, {"f1"});
    CHECK(dropped.d() == 1);
    const auto z = standardize(dropped);
    CHECK(z.values.rows() == 3);
}

TEST_CASE("none-transform columns pass through standardize untouched") {
    ProductFeatureMatrix m = matrix_of(Matrix{{1.0, 10.0}, {2.0, 20.0}, {3.0, 40.0}});
    m.specs[1].transform = FeatureTransform::none;
    const auto z = standardize(m);
    CHECK(z.values(0, 1) == 10.0);
    CHECK(z.values(2, 1) == 40.0);
    CHECK(std::abs(mean(z.values.col(0))) < 1e-12);
}

TEST_CASE("wholesaler panel standardizes to unit columns") {
    const CsvTable t = simulate_wholesalers(RngSeed{77, 0});
    const auto m = from_table(t, wholesaler_specs(), "product_id", "sim");
    const auto z = standardize(m);
    REQUIRE(z.d() == 9);
    REQUIRE(z.n() == 30);
    for (std::size_t c = 0; c < z.d(); ++c) {
        const auto col = z.values.col(c);
        CHECK(std::abs(mean(col)) < 1e-9);
        CHECK(std::abs(sample_sd(col) - 1.0) < 1e-9);
    }
}

TEST_CASE("serialize then reload round-trips bit-exactly") {
    Rng rng(RngSeed{102, 0});
    Matrix v(12, 4);
    for (std::size_t r = 0; r < 12; ++r)
        for (std::size_t c = 0; c < 4; ++c) v(r, c) = rng.next_normal() * 3.7;
    const auto m = matrix_of(std::move(v));

    const CsvTable t = to_table(m);
    CHECK(t.header[0] == "product_id");
    const auto back = from_table(parse_csv(write_csv(t)), m.specs, "product_id", "mem");
    CHECK(back.values == m.values);
    CHECK(back.product_ids == m.product_ids);
}

TEST_CASE("pca2: collinear data explains everything on one axis") {
    Matrix v(6, 2);
    for (std::size_t r = 0; r < 6; ++r) {
        v(r, 0) = static_cast<double>(r);
        v(r, 1) = 2.0 * static_cast<double>(r) + 1.0;
    }
    const auto z = standardize(matrix_of(std::move(v)));
    const auto p = pca2(z);
    CHECK(p.variance_explained[0] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(p.variance_explained[1] == doctest::Approx(0.0).scale(1).epsilon(1e-9));
}

TEST_CASE("pca2: isotropic square corners split 50/50") {
    ProductFeatureMatrix m = matrix_of(Matrix{{1.0, 1.0}, {1.0, -1.0}, {-1.0, 1.0}, {-1.0, -1.0}});
    m.standardized = true; // already centered with unit-ish spread
    const auto p = pca2(m);
    CHECK(p.variance_explained[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(p.variance_explained[1] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("pca2 matches an independent eigendecomposition up to column sign") {
    Rng rng(RngSeed{103, 0});
    Matrix v(10, 4);
    for (std::size_t r = 0; r < 10; ++r)
        for (std::size_t c = 0; c < 4; ++c) v(r, c) = rng.next_normal();
    const auto z = standardize(matrix_of(std::move(v)));
    const auto p = pca2(z);
    const auto oracle = oracles::eigen_pca2(z.values);

    CHECK(p.variance_explained[0] == doctest::Approx(oracle.var1).epsilon(1e-10));
    CHECK(p.variance_explained[1] == doctest::Approx(oracle.var2).epsilon(1e-10));
    for (std::size_t j = 0; j < 2; ++j) {
        const double sign =
            (p.scores(0, j) >= 0) == (oracle.scores(0, j) >= 0) ? 1.0 : -1.0;
        for (std::size_t r = 0; r < 10; ++r)
            CHECK(std::abs(p.scores(r, j) - sign * oracle.scores(r, j)) < 1e-8);
    }
}

TEST_CASE("pca2 components are orthonormal and fractions are ordered") {
    Rng rng(RngSeed{106, 0});
    Matrix v(14, 5);
    for (std::size_t r = 0; r < 14; ++r)
        for (std::size_t c = 0; c < 5; ++c) v(r, c) = rng.next_normal() * (1.0 + 0.3 * c);
    const auto p = pca2(standardize(matrix_of(std::move(v))));
    for (std::size_t a = 0; a < 2; ++a)
        for (std::size_t b = 0; b < 2; ++b) {
            double dot = 0.0;
            for (std::size_t i = 0; i < 5; ++i) dot += p.components(i, a) * p.components(i, b);
            CHECK(std::abs(dot - (a == b ? 1.0 : 0.0)) < 1e-8);
        }
    CHECK(p.variance_explained[0] >= p.variance_explained[1]);
    CHECK(p.variance_explained[0] + p.variance_explained[1] <= 1.0 + 1e-9);
}

TEST_CASE("pca2 component sign convention pins the largest entry non-negative") {
    Rng rng(RngSeed{104, 0});
    Matrix v(15, 3);
    for (std::size_t r = 0; r < 15; ++r)
        for (std::size_t c = 0; c < 3; ++c) v(r, c) = rng.next_normal();
    const auto p = pca2(standardize(matrix_of(std::move(v))));
    for (std::size_t j = 0; j < 2; ++j) {
        std::size_t arg = 0;
        for (std::size_t i = 1; i < 3; ++i)
            if (std::abs(p.components(i, j)) > std::abs(p.components(arg, j))) arg = i;
        CHECK(p.components(arg, j) >= 0.0);
    }
}

TEST_CASE("pca2 scores are row-permutation invariant up to sign") {
    Rng rng(RngSeed{105, 0});
    Matrix v(9, 3);
    for (std::size_t r = 0; r < 9; ++r)
        for (std::size_t c = 0; c < 3; ++c) v(r, c) = rng.next_normal();
    const auto z = standardize(matrix_of(v));
    const auto p = pca2(z);

    const std::vector<std::size_t> perm{4, 2, 8, 0, 6, 1, 7, 5, 3};
    Matrix pv(9, 3);
    for (std::size_t r = 0; r < 9; ++r)
        for (std::size_t c = 0; c < 3; ++c) pv(r, c) = v(perm[r], c);
    const auto zp = standardize(matrix_of(std::move(pv)));
    const auto pp = pca2(zp);

    for (std::size_t j = 0; j < 2; ++j)
        for (std::size_t r = 0; r < 9; ++r)
            CHECK(std::abs(std::abs(pp.scores(r, j)) - std::abs(p.scores(perm[r], j))) < 1e-9);
}

TEST_CASE("pca2 preconditions") {
    CHECK_THROWS_AS(pca2(matrix_of(Matrix{{1.0}, {2.0}, {3.0}}, true)), DimensionError);
    CHECK_THROWS_AS(pca2(matrix_of(Matrix{{1.0, 2.0}, {2.0, 1.0}}, true)), DomainError);
    CHECK_THROWS_AS(pca2(matrix_of(Matrix{{1.0, 2.0}, {2.0, 1.0}, {0.0, 0.0}})), DomainError);
}

TEST_CASE("sample_size applies the 16 sigma^2 / W^2 rule, rounded up") {
    CHECK(sample_size(1.0, 4.0) == 1);
    CHECK(sample_size(2.0, 1.0) == 64);
    CHECK(sample_size(1.5, 0.5) == 144);
    CHECK(sample_size(1.0, 3.0) == 2); // 16/9 rounds up
    CHECK_THROWS_AS(sample_size(0.0, 1.0), DomainError);
    CHECK_THROWS_AS(sample_size(1.0, -2.0), DomainError);
}
