#include "marketdef/concentration.hpp"

#include <algorithm>
#include <cmath>

namespace marketdef {

std::string to_string(ConcentrationClass c) {
    switch (c) {
        case ConcentrationClass::Unconcentrated: return "Unconcentrated";
        case ConcentrationClass::ModeratelyConcentrated: return "ModeratelyConcentrated";
        case ConcentrationClass::HighlyConcentrated: return "HighlyConcentrated";
    }
    return "?";
}

std::string to_string(ScreeningAction a) {
    switch (a) {
        case ScreeningAction::NoFurtherAnalysis: return "NoFurtherAnalysis";
        case ScreeningAction::SignificantConcern: return "SignificantConcern";
        case ScreeningAction::PresumedEnhancement: return "PresumedEnhancement";
    }
    return "?";
}

void MarketShares::validate() const {
    if (labels.size() != shares_pct.size())
        throw DomainError("shares: label/value length mismatch");
    if (labels.empty()) throw DomainError("shares: empty share table");
    double sum = 0.0;
    for (std::size_t i = 0; i < shares_pct.size(); ++i) {
        if (shares_pct[i] < 0.0)
            throw DomainError("shares: negative share for \"" + labels[i] + "\"");
        sum += shares_pct[i];
    }
    if (sum < 99.9 || sum > 100.1)
        throw DomainError("shares: sum " + std::to_string(sum) + " outside [99.9, 100.1]");
    std::set<std::string> seen;
    for (const auto& l : labels)
        if (!seen.insert(l).second) throw DomainError("shares: duplicate firm label \"" + l + "\"");
}

namespace {

bool needs_renormalization(const MarketShares& s) {
    double sum = 0.0;
    for (double v : s.shares_pct) sum += v;
    return std::abs(sum - 100.0) > 1e-12;
}

double hhi_renormalized(const MarketShares& s) {
    double sum = 0.0;
    for (double v : s.shares_pct) sum += v;
    const double scale = 100.0 / sum;
    double h = 0.0;
    for (double v : s.shares_pct) {
        const double p = v * scale;
        h += p * p;
    }
    return h;
}

} // namespace

double hhi(const MarketShares& shares) {
    shares.validate();
    return hhi_renormalized(shares);
}

ConcentrationClass classify(double h) {
    if (h < 0.0 || h > 10000.0 + 1e-6)
        throw DomainError("classify: HHI must lie in [0, 10000]");
    if (h < kUnconcentratedMax) return ConcentrationClass::Unconcentrated;
    if (h <= kModerateMax) return ConcentrationClass::ModeratelyConcentrated;
    return ConcentrationClass::HighlyConcentrated;
}

MarketShares merge_shares(const MarketShares& shares, const std::set<std::string>& merging) {
    shares.validate();
    if (merging.empty()) throw DomainError("merge_shares: empty merging set");
    for (const auto& m : merging)
        if (std::find(shares.labels.begin(), shares.labels.end(), m) == shares.labels.end())
            throw DomainError("merge_shares: unknown firm label \"" + m + "\"");

    MarketShares out;
    bool emitted = false;
    std::string combined_label;
    double combined_share = 0.0;
    for (std::size_t i = 0; i < shares.labels.size(); ++i) {
        if (merging.count(shares.labels[i]) != 0) {
            combined_label += shares.labels[i];
            combined_share += shares.shares_pct[i];
            continue;
        }
        out.labels.push_back(shares.labels[i]);
        out.shares_pct.push_back(shares.shares_pct[i]);
    }
    // Combined entry sits where the first merging firm was.
    for (std::size_t i = 0; i < shares.labels.size() && !emitted; ++i) {
        if (merging.count(shares.labels[i]) == 0) continue;
        std::size_t pos = 0;
        for (std::size_t j = 0; j < i; ++j)
            if (merging.count(shares.labels[j]) == 0) ++pos;
        out.labels.insert(out.labels.begin() + static_cast<std::ptrdiff_t>(pos), combined_label);
        out.shares_pct.insert(out.shares_pct.begin() + static_cast<std::ptrdiff_t>(pos),
                              combined_share);
        emitted = true;
    }
    out.validate();
    return out;
}

ScreeningReport screen(const MarketShares& pre, const std::set<std::string>& merging) {
    ScreeningReport rep;
    rep.renormalized = needs_renormalization(pre);
    rep.hhi_pre = hhi(pre);
    rep.post_shares = merge_shares(pre, merging);
    rep.hhi_post = hhi(rep.post_shares);
    rep.delta = rep.hhi_post - rep.hhi_pre;
    rep.class_pre = classify(rep.hhi_pre);
    rep.class_post = classify(rep.hhi_post);

    if (rep.class_post == ConcentrationClass::Unconcentrated || rep.delta <= kDeltaMinorMax) {
        rep.action = ScreeningAction::NoFurtherAnalysis;
    } else if (rep.class_post == ConcentrationClass::ModeratelyConcentrated) {
        rep.action = ScreeningAction::SignificantConcern;
    } else if (rep.delta <= kDeltaConcernMax) {
        rep.action = ScreeningAction::SignificantConcern;
    } else {
        rep.action = ScreeningAction::PresumedEnhancement;
    }
    return rep;
}

} // namespace marketdef
