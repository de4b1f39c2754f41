#pragma once
// Critical Loss Analysis: the hypothetical-monopolist algebra, the actual-loss
// variants (including two discouraged ones kept only for comparison studies),
// the price-increase scenario taxonomy, AVC aggregation for the hypothetical
// monopolist, and the upward-pricing-pressure screen.
//
// Sign convention: elasticity arguments are magnitudes. Own-price loss and
// cross-price gain both enter non-negative; a signed convention would
// silently flip verdicts.
//
// Units: critical_loss returns percent. Actual-loss calculators return the
// natural unit of their formula (quantities or fractions); ssnip_verdict
// takes explicitly tagged values so percent and fraction bases can never be
// compared by accident.

#include <cstddef>
#include <string>
#include <vector>

#include "marketdef/errors.hpp"

namespace marketdef {

struct FirmEconomics {
    double p0 = 0.0;         // prevailing price, > 0
    double avc0 = 0.0;       // average variable cost, >= 0
    double q0 = 0.0;         // quantity, > 0
    double fixed_cost = 0.0; // informational only

    void validate() const {
        if (!(p0 > 0.0)) throw DomainError("economics: price must be positive");
        if (avc0 < 0.0) throw DomainError("economics: average variable cost must be >= 0");
        if (!(q0 > 0.0)) throw DomainError("economics: quantity must be positive");
        if (fixed_cost < 0.0) throw DomainError("economics: fixed cost must be >= 0");
    }
};

enum class SsnipVariant { all_products, subset, single };

struct SsnipScenario {
    SsnipVariant variant = SsnipVariant::single;
    double y = 0.05; // price-increase fraction
    std::vector<std::size_t> product_indices;

    void validate(std::size_t n_products) const {
        if (!(y > 0.0) || y > 0.5)
            throw DomainError("scenario: price increase must lie in (0, 0.5]");
        if (variant == SsnipVariant::single && product_indices.size() != 1)
            throw DomainError("scenario: single-product variant needs exactly one index");
        if (variant == SsnipVariant::all_products && product_indices.size() != n_products)
            throw DomainError("scenario: all-products variant must list every index");
        for (std::size_t i : product_indices)
            if (i >= n_products) throw DomainError("scenario: product index out of range");
    }
};

enum class AlMethod { demand, elasticity, adr, obrien };

inline bool is_discouraged(AlMethod m) { return m == AlMethod::adr || m == AlMethod::obrien; }

inline std::string to_string(AlMethod m) {
    switch (m) {
        case AlMethod::demand: return "demand";
        case AlMethod::elasticity: return "elasticity";
        case AlMethod::adr: return "adr";
        case AlMethod::obrien: return "obrien";
    }
    return "?";
}

struct ClaVerdict {
    double critical_loss_pct = 0.0;
    double actual_loss_pct = 0.0;
    bool profitable = false;
    AlMethod method = AlMethod::demand;
    bool discouraged = false;
};

enum class LossUnit { percent, fraction };

struct LossValue {
    double value = 0.0;
    LossUnit unit = LossUnit::percent;
};

// (P0 - AVC0) / P0. Requires a positive margin; CLA is undefined otherwise.
inline double contribution_margin(double p0, double avc0) {
    if (!(p0 > 0.0)) throw DomainError("contribution_margin: price must be positive");
    if (avc0 < 0.0) throw DomainError("contribution_margin: cost must be >= 0");
    if (avc0 >= p0)
        throw DomainError("contribution_margin: cost >= price leaves no positive margin");
    return (p0 - avc0) / p0;
}

// Critical loss in percent: 100 * y / (y + cm). The sales loss at which the
// price increase leaves profit exactly unchanged.
inline double critical_loss(double y, double cm) {
    if (!(y > 0.0)) throw DomainError("critical_loss: price increase must be positive");
    if (!(cm > 0.0)) throw DomainError("critical_loss: contribution margin must be positive");
    return 100.0 * y / (y + cm);
}

// General form with distinct pre/post average variable costs, as a fraction:
// (y*p0 + avc0 - avc1) / (p0 + y*p0 - avc1).
inline double critical_loss_general(double y, double p0, double avc0, double avc1) {
    if (!(y > 0.0)) throw DomainError("critical_loss_general: price increase must be positive");
    if (!(p0 > 0.0)) throw DomainError("critical_loss_general: price must be positive");
    if (avc0 < 0.0 || avc1 < 0.0) throw DomainError("critical_loss_general: costs must be >= 0");
    const double denom = p0 + y * p0 - avc1;
    if (!(denom > 0.0))
        throw DomainError("critical_loss_general: post-increase price does not cover avc1");
    return (y * p0 + avc0 - avc1) / denom;
}

// Actual loss in units from demand levels: the price-raised product's lost
// sales net of what the in-market product recaptures. Negative values signal
// a net gain.
inline double actual_loss_demand(double da_p0, double da_p1, double db_p0, double db_p1) {
    if (da_p0 < 0.0 || da_p1 < 0.0 || db_p0 < 0.0 || db_p1 < 0.0)
        throw DomainError("actual_loss_demand: quantities must be >= 0");
    return (da_p0 - da_p1) - (db_p1 - db_p0);
}

// Actual loss in units from elasticity magnitudes: y*E_AA*Q_A - y*E_BA*Q_B.
inline double actual_loss_elasticities(double y, double e_aa, double q_a, double e_ba,
                                       double q_b) {
    if (!(y > 0.0)) throw DomainError("actual_loss_elasticities: price increase must be positive");
    if (e_aa < 0.0 || e_ba < 0.0)
        throw DomainError("actual_loss_elasticities: elasticity magnitudes must be >= 0");
    if (!(q_a > 0.0) || !(q_b > 0.0))
        throw DomainError("actual_loss_elasticities: quantities must be positive");
    return y * e_aa * q_a - y * e_ba * q_b;
}

// Aggregate-diversion-ratio shortcut (y/m)*(1-d), as a fraction. Discouraged:
// it rests on a margin-elasticity identity that tends to conclude narrow
// markets; reports must carry the flag.
inline double actual_loss_adr(double y, double m, double d) {
    if (!(y > 0.0)) throw DomainError("actual_loss_adr: price increase must be positive");
    if (!(m > 0.0)) throw DomainError("actual_loss_adr: gross margin must be positive");
    if (d < 0.0 || d > 1.0) throw DomainError("actual_loss_adr: diversion ratio must lie in [0, 1]");
    return (y / m) * (1.0 - d);
}

// Elasticity-difference shortcut y*(1/cm - e_aa), as a fraction. Discouraged
// for the same reason; implemented verbatim for comparison studies.
inline double actual_loss_obrien(double y, double cm, double e_aa) {
    if (!(y > 0.0)) throw DomainError("actual_loss_obrien: price increase must be positive");
    if (!(cm > 0.0)) throw DomainError("actual_loss_obrien: contribution margin must be positive");
    return y * (1.0 / cm - e_aa);
}

// Hypothetical monopolist AVC, unweighted mean across suppliers.
inline double hm_avc_simple(const std::vector<double>& avcs) {
    if (avcs.empty()) throw DomainError("hm_avc_simple: empty cost list");
    double s = 0.0;
    for (double a : avcs) {
        if (a < 0.0) throw DomainError("hm_avc_simple: costs must be >= 0");
        s += a;
    }
    return s / static_cast<double>(avcs.size());
}

// Hypothetical monopolist AVC, weighted by current production quantity.
inline double hm_avc_weighted(const std::vector<std::pair<double, double>>& avc_quantity) {
    if (avc_quantity.empty()) throw DomainError("hm_avc_weighted: empty cost list");
    double num = 0.0;
    double den = 0.0;
    for (const auto& [avc, q] : avc_quantity) {
        if (avc < 0.0) throw DomainError("hm_avc_weighted: costs must be >= 0");
        if (!(q > 0.0)) throw DomainError("hm_avc_weighted: quantities must be positive");
        num += avc * q;
        den += q;
    }
    return num / den;
}

// Profitability verdict. A tie is not profitable: the critical loss is the
// decrease at which profit is exactly unchanged.
inline ClaVerdict ssnip_verdict(LossValue cl, LossValue al, AlMethod method,
                                const SsnipScenario& scenario) {
    if (cl.unit != al.unit)
        throw DomainError("ssnip_verdict: critical and actual loss use different units");
    if (cl.value < 0.0) throw DomainError("ssnip_verdict: critical loss must be >= 0");
    (void)scenario;
    const double scale = cl.unit == LossUnit::percent ? 1.0 : 100.0;
    ClaVerdict v;
    v.critical_loss_pct = cl.value * scale;
    v.actual_loss_pct = al.value * scale;
    v.profitable = al.value < cl.value;
    v.method = method;
    v.discouraged = is_discouraged(method);
    return v;
}

// Upward pricing pressure: diversion-weighted margin gain net of the
// efficiency credit. Positive flags pressure.
inline double upp(double d12, double p2, double c2, double e1, double c1) {
    if (d12 < 0.0 || d12 > 1.0) throw DomainError("upp: diversion ratio must lie in [0, 1]");
    if (p2 < 0.0 || c2 < 0.0 || c1 < 0.0) throw DomainError("upp: prices and costs must be >= 0");
    if (e1 < 0.0) throw DomainError("upp: efficiency term must be >= 0");
    return d12 * (p2 - c2) - e1 * c1;
}

} // namespace marketdef
