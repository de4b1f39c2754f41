#pragma once
// Product feature ingestion: CSV -> validated feature matrix -> z-scored
// substitutability space, plus the 2-component projection used for plots and
// the survey sample-size rule.

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "marketdef/csv.hpp"
#include "marketdef/matrix.hpp"

namespace marketdef {

enum class FeatureKind { numeric, binary };
enum class FeatureTransform { zscore, none };

struct FeatureSpec {
    std::string name;
    FeatureKind kind = FeatureKind::numeric;
    FeatureTransform transform = FeatureTransform::zscore;
};

struct ProductFeatureMatrix {
    std::vector<std::string> product_ids; // length n
    std::vector<FeatureSpec> specs;       // length d
    Matrix values;                        // n x d
    bool standardized = false;

    std::size_t n() const { return values.rows(); }
    std::size_t d() const { return values.cols(); }
};

struct PcaProjection {
    Matrix components;                            // d x 2, orthonormal columns
    Matrix scores;                                // n x 2
    std::array<double, 2> variance_explained{0.0, 0.0}; // non-increasing fractions
};

// Reads the named feature columns; id_column supplies product labels. Rows
// keep file order. Binary features admit raw {0, 1} only.
ProductFeatureMatrix load_csv(const std::filesystem::path& path,
                              const std::vector<FeatureSpec>& specs,
                              const std::string& id_column);

// Same contract on an in-memory table (the CLI stages through this).
ProductFeatureMatrix from_table(const CsvTable& table, const std::vector<FeatureSpec>& specs,
                                const std::string& id_column, const std::string& origin);

// Z-scores every `zscore` column with the sample (n-1) standard deviation.
// A constant zscore column is an error naming the column.
ProductFeatureMatrix standardize(const ProductFeatureMatrix& m);

// Drops named columns (used by the CLI's --drop-constant path).
ProductFeatureMatrix drop_columns(const ProductFeatureMatrix& m,
                                  const std::vector<std::string>& names);

// Names of zscore columns whose sample standard deviation is zero.
std::vector<std::string> constant_zscore_columns(const ProductFeatureMatrix& m);

// Top-2 principal components of the column-centered matrix. Component sign:
// the entry of largest magnitude is made non-negative.
PcaProjection pca2(const ProductFeatureMatrix& m);

// Survey sample size for population sd `sigma` and full interval width `w`,
// rounded up.
std::int64_t sample_size(double sigma, double w);

// Serializes values with the id column first; doubles in shortest
// round-trip form.
CsvTable to_table(const ProductFeatureMatrix& m, const std::string& id_column = "product_id");

double sample_sd(const std::vector<double>& xs);
double mean(const std::vector<double>& xs);

} // namespace marketdef
