#pragma once
// Regenerates the simulated wholesaler panel: 30 motor-vehicle parts
// wholesalers described by 9 features with three embedded size tiers (rows
// 1-10 large, 11-20 medium, 21-30 small) and two deliberately interfering
// variables. The distribution shapes are fixed; draws come from the
// toolkit's own seeded generator, so panels are reproducible per seed while
// the embedded tier pattern is what stays constant across seeds.

#include <vector>

#include "marketdef/csv.hpp"
#include "marketdef/dataset.hpp"
#include "marketdef/rng.hpp"

namespace marketdef {

CsvTable simulate_wholesalers(RngSeed seed);

// Feature specs matching simulate_wholesalers' columns (all numeric,
// z-scored).
std::vector<FeatureSpec> wholesaler_specs();

} // namespace marketdef
