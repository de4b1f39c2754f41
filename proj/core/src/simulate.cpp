#include "marketdef/simulate.hpp"

#include <cstdio>

namespace marketdef {

namespace {

constexpr std::size_t kRows = 30;

std::vector<double> uniform_ints(Rng& rng, int lo, int hi, std::size_t count) {
    std::vector<double> out(count);
    for (auto& v : out) v = static_cast<double>(rng.next_int(lo, hi));
    return out;
}

void append(std::vector<double>& dst, const std::vector<double>& src) {
    dst.insert(dst.end(), src.begin(), src.end());
}

} // namespace

std::vector<FeatureSpec> wholesaler_specs() {
    const char* names[] = {
        "n_categories",       // product categories stocked
        "products_per_category",
        "n_brands",           // brands customers routinely buy
        "n_models",
        "price_dev_product",  // price deviation of a typical product
        "price_dev_category", // price deviation of a typical category
        "pct_non_parts",
        "pct_uncommon_transport",
        "pct_used",
    };
    std::vector<FeatureSpec> specs;
    for (const char* n : names)
        specs.push_back({n, FeatureKind::numeric, FeatureTransform::zscore});
    return specs;
}

CsvTable simulate_wholesalers(RngSeed seed) {
    Rng rng(seed);

    // Categories stocked: three tiers, 10/15/5.
    std::vector<double> ctgr = uniform_ints(rng, 1, 50, 10);
    append(ctgr, uniform_ints(rng, 100, 200, 15));
    append(ctgr, uniform_ints(rng, 250, 300, 5));

    // Products per category: two tiers, 15/15.
    std::vector<double> n_ctgr = uniform_ints(rng, 1, 10, 15);
    append(n_ctgr, uniform_ints(rng, 20, 30, 15));

    // Brands bought: two tiers, 20/10.
    std::vector<double> n_brnd = uniform_ints(rng, 10, 30, 20);
    append(n_brnd, uniform_ints(rng, 1, 10, 10));

    // Models bought: two tiers, 20/10.
    std::vector<double> n_mdl = uniform_ints(rng, 50, 100, 20);
    append(n_mdl, uniform_ints(rng, 1, 50, 10));

    // Price deviations: single pattern across all 30.
    std::vector<double> p_prdct = uniform_ints(rng, 1, 300, kRows);
    std::vector<double> p_ctgr = uniform_ints(rng, 1, 100, kRows);

    // Share of non-parts sales: two tiers, 20/10 (the first interferer).
    std::vector<double> p_np = uniform_ints(rng, 30, 70, 20);
    append(p_np, uniform_ints(rng, 1, 100, 10));

    // Share of uncommon transportation products: three tier-specific mixes.
    std::vector<double> large_t(5, 0.0);
    append(large_t, uniform_ints(rng, 10, 30, 5));
    rng.shuffle(large_t);
    std::vector<double> median_t{0, 0, 0, 0, 0, 0, 100, 100, 20, 10};
    rng.shuffle(median_t);
    std::vector<double> small_t{0, 0, 0, 0, 0, 0, 100, 100, 100, 100};
    rng.shuffle(small_t);
    std::vector<double> p_ut = large_t;
    append(p_ut, median_t);
    append(p_ut, small_t);

    // Share of used products: three tier-specific mixes (second interferer).
    std::vector<double> large_u{0, 0, 0, 0, 0, 0, 0, 0, 3, 5};
    rng.shuffle(large_u);
    std::vector<double> median_u{0, 0, 0, 0, 0, 0, 0, 3, 5, 8};
    rng.shuffle(median_u);
    std::vector<double> small_u(6, 0.0);
    append(small_u, uniform_ints(rng, 1, 20, 4));
    rng.shuffle(small_u);
    std::vector<double> p_up = large_u;
    append(p_up, median_u);
    append(p_up, small_u);

    const std::vector<const std::vector<double>*> cols = {
        &ctgr, &n_ctgr, &n_brnd, &n_mdl, &p_prdct, &p_ctgr, &p_np, &p_ut, &p_up};

    CsvTable t;
    t.header.push_back("product_id");
    for (const auto& s : wholesaler_specs()) t.header.push_back(s.name);
    for (std::size_t r = 0; r < kRows; ++r) {
        std::vector<std::string> row;
        row.reserve(1 + cols.size());
        char id[16];
        std::snprintf(id, sizeof(id), "wh%02zu", r + 1);
        row.emplace_back(id);
        for (const auto* c : cols) row.push_back(format_double((*c)[r]));
        t.rows.push_back(std::move(row));
    }
    return t;
}

} // namespace marketdef
