#pragma once
// HHI concentration screening: index, class thresholds, and the merger-delta
// action rules.
//
// Boundary semantics, centralized here:
//   HHI exactly 1500 -> ModeratelyConcentrated
//   HHI exactly 2500 -> ModeratelyConcentrated
//   delta exactly 100 -> lower band (no further analysis)
//   delta exactly 200 -> middle band (significant concern when highly conc.)

#include <set>
#include <string>
#include <vector>

#include "marketdef/errors.hpp"

namespace marketdef {

enum class ConcentrationClass { Unconcentrated, ModeratelyConcentrated, HighlyConcentrated };
enum class ScreeningAction { NoFurtherAnalysis, SignificantConcern, PresumedEnhancement };

std::string to_string(ConcentrationClass c);
std::string to_string(ScreeningAction a);

struct MarketShares {
    std::vector<std::string> labels;
    std::vector<double> shares_pct; // >= 0, summing to 100 within +-0.1

    void validate() const;
};

struct ScreeningReport {
    double hhi_pre = 0.0;
    double hhi_post = 0.0;
    double delta = 0.0;
    ConcentrationClass class_pre = ConcentrationClass::Unconcentrated;
    ConcentrationClass class_post = ConcentrationClass::Unconcentrated;
    ScreeningAction action = ScreeningAction::NoFurtherAnalysis;
    bool renormalized = false; // share sum was nudged onto exactly 100
    MarketShares post_shares;
};

// Sum of squared percent shares (monopoly = 10000). Shares are renormalized
// onto exactly 100 before squaring.
double hhi(const MarketShares& shares);

ConcentrationClass classify(double h);

// Replaces the merging firms with one combined entry (labels concatenated in
// original order) at the first merging firm's position.
MarketShares merge_shares(const MarketShares& shares, const std::set<std::string>& merging);

ScreeningReport screen(const MarketShares& pre, const std::set<std::string>& merging);

inline constexpr double kUnconcentratedMax = 1500.0;  // exclusive upper bound
inline constexpr double kModerateMax = 2500.0;        // inclusive upper bound
inline constexpr double kDeltaMinorMax = 100.0;       // inclusive: still minor
inline constexpr double kDeltaConcernMax = 200.0;     // inclusive: still mid band

} // namespace marketdef
