#include "marketdef/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "marketdef/linalg.hpp"

namespace marketdef {

double mean(const std::vector<double>& xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

double sample_sd(const std::vector<double>& xs) {
    if (xs.size() < 2) throw DomainError("sample_sd: need at least two values");
    const double mu = mean(xs);
    double ss = 0.0;
    for (double x : xs) ss += (x - mu) * (x - mu);
    return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

namespace {

void validate_specs(const std::vector<FeatureSpec>& specs) {
    if (specs.empty()) throw SchemaError("feature spec list is empty");
    std::set<std::string> seen;
    for (const auto& s : specs) {
        if (s.name.empty()) throw SchemaError("feature spec with empty name");
        if (!seen.insert(s.name).second)
            throw SchemaError("duplicate feature name \"" + s.name + "\"");
    }
}

} // namespace

ProductFeatureMatrix from_table(const CsvTable& table, const std::vector<FeatureSpec>& specs,
                                const std::string& id_column, const std::string& origin) {
    validate_specs(specs);
    const std::size_t id_idx = table.column(id_column);
    std::vector<std::size_t> col_idx;
    col_idx.reserve(specs.size());
    for (const auto& s : specs) col_idx.push_back(table.column(s.name));

    const std::size_t n = table.rows.size();
    if (n < 2) throw DomainError(origin + ": need at least 2 data rows, got " + std::to_string(n));

    ProductFeatureMatrix m;
    m.specs = specs;
    m.values = Matrix(n, specs.size());
    m.product_ids.reserve(n);

    for (std::size_t r = 0; r < n; ++r) {
        m.product_ids.push_back(table.rows[r][id_idx]);
        for (std::size_t c = 0; c < specs.size(); ++c) {
            // Rows are 1-based in messages, counting the header.
            const double v = parse_cell(table.rows[r][col_idx[c]], r + 2, specs[c].name);
            if (!std::isfinite(v))
                throw ParseError(origin + ": non-finite value at row " + std::to_string(r + 2) +
                                 ", column \"" + specs[c].name + "\"");
            if (specs[c].kind == FeatureKind::binary && v != 0.0 && v != 1.0)
                throw DomainError(origin + ": binary column \"" + specs[c].name +
                                  "\" has value " + format_double(v) + " at row " +
                                  std::to_string(r + 2) + "; expected 0 or 1");
            m.values(r, c) = v;
        }
    }
    return m;
}

ProductFeatureMatrix load_csv(const std::filesystem::path& path,
                              const std::vector<FeatureSpec>& specs,
                              const std::string& id_column) {
    return from_table(read_csv(path), specs, id_column, path.string());
}

std::vector<std::string> constant_zscore_columns(const ProductFeatureMatrix& m) {
    std::vector<std::string> out;
    for (std::size_t c = 0; c < m.d(); ++c) {
        if (m.specs[c].transform != FeatureTransform::zscore) continue;
        if (sample_sd(m.values.col(c)) == 0.0) out.push_back(m.specs[c].name);
    }
    return out;
}

ProductFeatureMatrix standardize(const ProductFeatureMatrix& m) {
    if (m.standardized) throw DomainError("standardize: matrix already standardized");

    ProductFeatureMatrix out = m;
    for (std::size_t c = 0; c < m.d(); ++c) {
        if (m.specs[c].transform != FeatureTransform::zscore) continue;
        const std::vector<double> col = m.values.col(c);
        const double mu = mean(col);
        const double sd = sample_sd(col);
        if (sd == 0.0)
            throw DomainError("standardize: column \"" + m.specs[c].name +
                              "\" is constant; drop it or re-ingest without it");
        for (std::size_t r = 0; r < m.n(); ++r) out.values(r, c) = (col[r] - mu) / sd;
    }
    out.standardized = true;
    return out;
}

ProductFeatureMatrix drop_columns(const ProductFeatureMatrix& m,
                                  const std::vector<std::string>& names) {
    if (names.empty()) return m;
    std::vector<std::size_t> keep;
    for (std::size_t c = 0; c < m.d(); ++c) {
        if (std::find(names.begin(), names.end(), m.specs[c].name) == names.end())
            keep.push_back(c);
    }
    if (keep.size() == m.d()) {
        for (const auto& n : names) throw SchemaError("drop_columns: unknown column \"" + n + "\"");
    }
    if (keep.empty()) throw DomainError("drop_columns: would remove every feature");

    ProductFeatureMatrix out;
    out.product_ids = m.product_ids;
    out.standardized = m.standardized;
    out.values = Matrix(m.n(), keep.size());
    for (std::size_t j = 0; j < keep.size(); ++j) {
        out.specs.push_back(m.specs[keep[j]]);
        for (std::size_t r = 0; r < m.n(); ++r) out.values(r, j) = m.values(r, keep[j]);
    }
    return out;
}

PcaProjection pca2(const ProductFeatureMatrix& m) {
    if (!m.standardized) throw DomainError("pca2: matrix must be standardized first");
    if (m.d() < 2) throw DimensionError("pca2: need at least 2 feature dimensions");
    if (m.n() < 3) throw DomainError("pca2: need at least 3 rows");

    // Center all columns; `none` columns may have nonzero means.
    Matrix x = m.values;
    const std::vector<double> mu = column_means(x);
    for (std::size_t r = 0; r < x.rows(); ++r)
        for (std::size_t c = 0; c < x.cols(); ++c) x(r, c) -= mu[c];

    const Matrix cov = covariance(m.values);
    double total = 0.0;
    for (std::size_t i = 0; i < cov.rows(); ++i) total += cov(i, i);

    const SymmetricEigen eig = eigen_symmetric(cov);

    PcaProjection p;
    p.components = Matrix(m.d(), 2);
    for (std::size_t j = 0; j < 2; ++j) {
        // Deterministic sign: make the largest-magnitude entry non-negative.
        std::size_t arg = 0;
        for (std::size_t i = 1; i < m.d(); ++i)
            if (std::abs(eig.vectors(i, j)) > std::abs(eig.vectors(arg, j))) arg = i;
        const double sign = eig.vectors(arg, j) < 0.0 ? -1.0 : 1.0;
        for (std::size_t i = 0; i < m.d(); ++i) p.components(i, j) = sign * eig.vectors(i, j);

        const double lambda = std::max(eig.values[j], 0.0);
        p.variance_explained[j] = total > 0.0 ? lambda / total : 0.0;
    }

    p.scores = Matrix(m.n(), 2);
    for (std::size_t r = 0; r < m.n(); ++r)
        for (std::size_t j = 0; j < 2; ++j) {
            double s = 0.0;
            for (std::size_t c = 0; c < m.d(); ++c) s += x(r, c) * p.components(c, j);
            p.scores(r, j) = s;
        }
    return p;
}

std::int64_t sample_size(double sigma, double w) {
    if (!(sigma > 0.0)) throw DomainError("sample_size: sigma must be positive");
    if (!(w > 0.0)) throw DomainError("sample_size: interval width must be positive");
    const double v = 16.0 * sigma * sigma / (w * w);
    // Integer-valued results should not creep upward from rounding noise.
    const double nearest = std::nearbyint(v);
    if (std::abs(v - nearest) <= 1e-9 * std::max(1.0, std::abs(v)))
        return static_cast<std::int64_t>(nearest);
    return static_cast<std::int64_t>(std::ceil(v));
}

CsvTable to_table(const ProductFeatureMatrix& m, const std::string& id_column) {
    CsvTable t;
    t.header.push_back(id_column);
    for (const auto& s : m.specs) t.header.push_back(s.name);
    for (std::size_t r = 0; r < m.n(); ++r) {
        std::vector<std::string> row;
        row.reserve(1 + m.d());
        row.push_back(m.product_ids[r]);
        for (std::size_t c = 0; c < m.d(); ++c) row.push_back(format_double(m.values(r, c)));
        t.rows.push_back(std::move(row));
    }
    return t;
}

} // namespace marketdef
