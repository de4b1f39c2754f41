#pragma once
// Demand systems feeding the critical-loss calculators: linear and
// log-linear least-squares fits with coefficient-as-elasticity readout, a
// binary-logit share model with arc quantity-response slopes, and budget
// share / quantity evaluation for an almost-ideal demand system with
// supplied coefficients.

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "marketdef/linalg.hpp"
#include "marketdef/matrix.hpp"

namespace marketdef {

// ---- linear / log-linear regression -------------------------------------

struct LinearDemandFit {
    std::vector<double> intercept;   // alpha per product equation
    Matrix price_coefs;              // beta[i][j]: product i's response to price j
    Matrix shifter_coefs;            // gamma[i][k]
    bool log_space = false;          // when true, coefficients read as elasticities
    // Price range seen while fitting; evaluation outside it is extrapolation.
    std::optional<std::array<double, 2>> price_range;

    double own_elasticity(std::size_t i) const { return price_coefs(i, i); }
    double cross_elasticity(std::size_t i, std::size_t j) const { return price_coefs(i, j); }
};

// False when any price falls outside the range the model was fitted on;
// callers should warn before trusting extrapolated demand.
bool within_fitted_range(const std::optional<std::array<double, 2>>& range,
                         std::span<const double> prices);

// Single-equation least squares: responses on [1 | design]. When log_space,
// responses and the first `price_cols` design columns are logged before
// fitting; remaining columns are demand shifters and enter untransformed.
// Returns the coefficient vector (intercept first).
std::vector<double> ols_fit(const std::vector<double>& responses, const Matrix& design,
                            std::size_t price_cols, bool log_space);

// One equation per product: quantities (obs x j) on prices (obs x j) and
// shifters (obs x k).
LinearDemandFit fit_linear_demand(const Matrix& quantities, const Matrix& prices,
                                  const Matrix& shifters, bool log_space);

// Largest absolute normal-equation residual of a fitted equation,
// max |X^T (y - X b)|; near zero at the least-squares solution.
double normal_equation_residual(const std::vector<double>& responses, const Matrix& design,
                                std::size_t price_cols, bool log_space,
                                const std::vector<double>& coefs);

// ---- logit share model ----------------------------------------------------

struct LogitDemandModel {
    double alpha = 0.0;
    double beta = 0.0;               // price coefficient
    std::vector<double> gamma;       // characteristic coefficients
    double total_q = 1.0;            // candidate-market total demand Q
    std::optional<std::array<double, 2>> price_range; // set when fitted from data

    double predictor(double price, std::span<const double> characteristics) const;
};

// S = 1 / (1 + exp(-(alpha + beta p + gamma.c))); numerically stable across
// the double range.
double logit_share(const LogitDemandModel& model, double price,
                   std::span<const double> characteristics);
double logit_share(const LogitDemandModel& model, double price, double characteristic);
double logit_share(const LogitDemandModel& model, double price);

// Multinomial share of alternative i among mean utilities v.
std::vector<double> multinomial_shares(std::span<const double> utilities);

// Arc quantity-response slope of the product's own demand:
// [Q S(p0) - Q S(p1)] / (p1 - p0).
double logit_own_slope(const LogitDemandModel& model, double p0, double p1,
                       std::span<const double> characteristics = {});

// Arc cross slope: product j's share is re-evaluated with product i's price
// entering as characteristic `rival_index`; j's own price stays fixed.
double logit_cross_slope(const LogitDemandModel& model_j, double own_price,
                         std::vector<double> characteristics, std::size_t rival_index,
                         double rival_p0, double rival_p1);

// Newton maximum-likelihood fit of the binary model on outcomes in {0,1}.
// design columns: price first, then characteristics. Converges when the
// max-abs score drops below 1e-8; separable data raises ConvergenceError.
LogitDemandModel logit_fit(const std::vector<int>& outcomes, const std::vector<double>& prices,
                           const Matrix& characteristics, double total_q,
                           int max_iter = 50);

// ---- almost ideal demand system (evaluation only) -------------------------

struct AidsModel {
    double a0 = 0.0;
    std::vector<double> alpha;
    std::vector<double> beta;
    Matrix gamma;

    std::size_t goods() const { return alpha.size(); }

    // Adding-up restrictions (sum alpha = 1, sum beta = 0, gamma columns sum
    // to 0), reported rather than enforced.
    bool adding_up_ok(double tol = 1e-9) const;
};

// Translog price index: a0 + sum_k alpha_k lp_k + 1/2 sum_jk gamma_jk lp_k lp_j.
double aids_price_index(const AidsModel& model, std::span<const double> log_prices);

// Budget shares w_i = alpha_i + sum_j gamma_ij lp_j + beta_i log(x/P).
std::vector<double> aids_budget_share(const AidsModel& model, std::span<const double> log_prices,
                                      double expenditure);

// Physical quantity from a budget share: w*x/p.
double aids_quantity(double share, double expenditure, double own_price);

// ---- coefficient documents -------------------------------------------------

// A coefficient set loaded from JSON, keyed by model kind. Exactly one of
// the three members is populated.
struct DemandModelDocument {
    std::string kind; // "linear" | "logit" | "aids"
    std::optional<LinearDemandFit> linear;
    std::optional<LogitDemandModel> logit;
    std::optional<AidsModel> aids;
};

DemandModelDocument parse_demand_model(const std::string& json_text, const std::string& origin);
DemandModelDocument load_demand_model(const std::filesystem::path& path);

} // namespace marketdef
