#include "marketdef/demand.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace marketdef {

namespace {

// [1 | design`], logging responses and price columns when requested.
struct PreparedFit {
    Matrix x;
    std::vector<double> y;
};

PreparedFit prepare(const std::vector<double>& responses, const Matrix& design,
                    std::size_t price_cols, bool log_space) {
    const std::size_t m = design.rows();
    const std::size_t p = design.cols();
    if (responses.size() != m) throw DimensionError("ols_fit: response length mismatch");
    if (price_cols > p) throw DimensionError("ols_fit: price column count exceeds design");
    if (m < p + 1) throw DomainError("ols_fit: fewer observations than coefficients");

    PreparedFit out;
    out.x = Matrix(m, p + 1);
    out.y = responses;
    for (std::size_t r = 0; r < m; ++r) {
        out.x(r, 0) = 1.0;
        for (std::size_t c = 0; c < p; ++c) {
            double v = design(r, c);
            if (log_space && c < price_cols) {
                if (!(v > 0.0))
                    throw DomainError("ols_fit: log-space requires positive prices");
                v = std::log(v);
            }
            out.x(r, c + 1) = v;
        }
        if (log_space) {
            if (!(out.y[r] > 0.0))
                throw DomainError("ols_fit: log-space requires positive responses");
            out.y[r] = std::log(out.y[r]);
        }
    }
    return out;
}

} // namespace

std::vector<double> ols_fit(const std::vector<double>& responses, const Matrix& design,
                            std::size_t price_cols, bool log_space) {
    const PreparedFit f = prepare(responses, design, price_cols, log_space);
    return least_squares(f.x, f.y);
}

double normal_equation_residual(const std::vector<double>& responses, const Matrix& design,
                                std::size_t price_cols, bool log_space,
                                const std::vector<double>& coefs) {
    const PreparedFit f = prepare(responses, design, price_cols, log_space);
    if (coefs.size() != f.x.cols()) throw DimensionError("coefficient length mismatch");
    double worst = 0.0;
    for (std::size_t c = 0; c < f.x.cols(); ++c) {
        double g = 0.0;
        for (std::size_t r = 0; r < f.x.rows(); ++r) {
            double fit = 0.0;
            for (std::size_t j = 0; j < f.x.cols(); ++j) fit += f.x(r, j) * coefs[j];
            g += f.x(r, c) * (f.y[r] - fit);
        }
        worst = std::max(worst, std::abs(g));
    }
    return worst;
}

LinearDemandFit fit_linear_demand(const Matrix& quantities, const Matrix& prices,
                                  const Matrix& shifters, bool log_space) {
    const std::size_t obs = quantities.rows();
    const std::size_t j = quantities.cols();
    const std::size_t k = shifters.cols();
    if (prices.rows() != obs || (k > 0 && shifters.rows() != obs))
        throw DimensionError("fit_linear_demand: observation counts differ");
    if (prices.cols() != j) throw DimensionError("fit_linear_demand: need one price per product");

    Matrix design(obs, j + k);
    for (std::size_t r = 0; r < obs; ++r) {
        for (std::size_t c = 0; c < j; ++c) design(r, c) = prices(r, c);
        for (std::size_t c = 0; c < k; ++c) design(r, j + c) = shifters(r, c);
    }

    LinearDemandFit fit;
    fit.log_space = log_space;
    fit.intercept.resize(j);
    fit.price_coefs = Matrix(j, j);
    fit.shifter_coefs = Matrix(j, k);
    for (std::size_t i = 0; i < j; ++i) {
        const std::vector<double> coefs = ols_fit(quantities.col(i), design, j, log_space);
        fit.intercept[i] = coefs[0];
        for (std::size_t c = 0; c < j; ++c) fit.price_coefs(i, c) = coefs[1 + c];
        for (std::size_t c = 0; c < k; ++c) fit.shifter_coefs(i, c) = coefs[1 + j + c];
    }
    double lo = prices(0, 0), hi = prices(0, 0);
    for (std::size_t r = 0; r < obs; ++r)
        for (std::size_t c = 0; c < j; ++c) {
            lo = std::min(lo, prices(r, c));
            hi = std::max(hi, prices(r, c));
        }
    fit.price_range = {{lo, hi}};
    return fit;
}

bool within_fitted_range(const std::optional<std::array<double, 2>>& range,
                         std::span<const double> prices) {
    if (!range) return true; // hand-supplied coefficients carry no range
    for (double p : prices)
        if (p < (*range)[0] || p > (*range)[1]) return false;
    return true;
}

double LogitDemandModel::predictor(double price, std::span<const double> characteristics) const {
    if (characteristics.size() != gamma.size())
        throw DimensionError("logit: characteristic count mismatch");
    double t = alpha + beta * price;
    for (std::size_t i = 0; i < gamma.size(); ++i) t += gamma[i] * characteristics[i];
    return t;
}

namespace {

double sigmoid(double t) {
    if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
    const double e = std::exp(t);
    return e / (1.0 + e);
}

} // namespace

double logit_share(const LogitDemandModel& model, double price,
                   std::span<const double> characteristics) {
    return sigmoid(model.predictor(price, characteristics));
}

double logit_share(const LogitDemandModel& model, double price, double characteristic) {
    return logit_share(model, price, std::span<const double>(&characteristic, 1));
}

double logit_share(const LogitDemandModel& model, double price) {
    return logit_share(model, price, std::span<const double>{});
}

std::vector<double> multinomial_shares(std::span<const double> utilities) {
    if (utilities.empty()) throw DomainError("multinomial_shares: no alternatives");
    const double vmax = *std::max_element(utilities.begin(), utilities.end());
    std::vector<double> out(utilities.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < utilities.size(); ++i) {
        out[i] = std::exp(utilities[i] - vmax);
        sum += out[i];
    }
    for (double& s : out) s /= sum;
    return out;
}

double logit_own_slope(const LogitDemandModel& model, double p0, double p1,
                       std::span<const double> characteristics) {
    if (p0 == p1) throw DomainError("logit_own_slope: degenerate price step");
    if (!(model.total_q > 0.0)) throw DomainError("logit_own_slope: total demand must be positive");
    const double q0 = model.total_q * logit_share(model, p0, characteristics);
    const double q1 = model.total_q * logit_share(model, p1, characteristics);
    return (q0 - q1) / (p1 - p0);
}

double logit_cross_slope(const LogitDemandModel& model_j, double own_price,
                         std::vector<double> characteristics, std::size_t rival_index,
                         double rival_p0, double rival_p1) {
    if (rival_p0 == rival_p1) throw DomainError("logit_cross_slope: degenerate price step");
    if (!(model_j.total_q > 0.0))
        throw DomainError("logit_cross_slope: total demand must be positive");
    if (rival_index >= characteristics.size())
        throw DimensionError("logit_cross_slope: rival characteristic index out of range");
    characteristics[rival_index] = rival_p0;
    const double before = model_j.total_q * logit_share(model_j, own_price, characteristics);
    characteristics[rival_index] = rival_p1;
    const double after = model_j.total_q * logit_share(model_j, own_price, characteristics);
    return (before - after) / (rival_p1 - rival_p0);
}

LogitDemandModel logit_fit(const std::vector<int>& outcomes, const std::vector<double>& prices,
                           const Matrix& characteristics, double total_q, int max_iter) {
    const std::size_t m = outcomes.size();
    const std::size_t kc = characteristics.cols();
    if (prices.size() != m || (kc > 0 && characteristics.rows() != m))
        throw DimensionError("logit_fit: observation counts differ");
    if (!(total_q > 0.0)) throw DomainError("logit_fit: total demand must be positive");
    for (int y : outcomes)
        if (y != 0 && y != 1) throw DomainError("logit_fit: outcomes must be 0 or 1");

    const std::size_t p = 2 + kc; // intercept, price, characteristics
    if (m < p) throw DomainError("logit_fit: fewer observations than coefficients");

    Matrix x(m, p);
    for (std::size_t r = 0; r < m; ++r) {
        x(r, 0) = 1.0;
        x(r, 1) = prices[r];
        for (std::size_t c = 0; c < kc; ++c) x(r, 2 + c) = characteristics(r, c);
    }

    std::vector<double> coef(p, 0.0);
    for (int it = 0; it < max_iter; ++it) {
        // Score and observed information.
        std::vector<double> score(p, 0.0);
        Matrix info(p, p, 0.0);
        double resid_max = 0.0;
        for (std::size_t r = 0; r < m; ++r) {
            double t = 0.0;
            for (std::size_t c = 0; c < p; ++c) t += x(r, c) * coef[c];
            const double mu = sigmoid(t);
            const double w = mu * (1.0 - mu);
            const double resid = static_cast<double>(outcomes[r]) - mu;
            resid_max = std::max(resid_max, std::abs(resid));
            for (std::size_t c = 0; c < p; ++c) {
                score[c] += x(r, c) * resid;
                for (std::size_t c2 = 0; c2 < p; ++c2) info(c, c2) += w * x(r, c) * x(r, c2);
            }
        }

        double score_max = 0.0;
        for (double s : score) score_max = std::max(score_max, std::abs(s));
        if (score_max < 1e-8) {
            // Perfect separation also drives the score to zero, but only by
            // pinning every fitted probability onto its outcome. A genuine
            // optimum keeps interior residuals.
            if (resid_max < 1e-6)
                throw ConvergenceError("logit_fit: data are perfectly separated");
            LogitDemandModel model;
            model.alpha = coef[0];
            model.beta = coef[1];
            model.gamma.assign(coef.begin() + 2, coef.end());
            model.total_q = total_q;
            const auto [lo, hi] = std::minmax_element(prices.begin(), prices.end());
            model.price_range = {{*lo, *hi}};
            return model;
        }

        // Newton step via Cholesky-free elimination on the information matrix.
        std::vector<double> step;
        try {
            step = least_squares(info, score);
        } catch (const DomainError&) {
            throw ConvergenceError("logit_fit: information matrix singular (separable data?)");
        }
        double norm = 0.0;
        for (std::size_t c = 0; c < p; ++c) {
            coef[c] += step[c];
            norm = std::max(norm, std::abs(coef[c]));
        }
        if (!std::isfinite(norm) || norm > 1e8)
            throw ConvergenceError("logit_fit: coefficients diverged (separable data?)");
    }
    throw ConvergenceError("logit_fit: no convergence within iteration budget");
}

bool AidsModel::adding_up_ok(double tol) const {
    if (beta.size() != goods() || gamma.rows() != goods() || gamma.cols() != goods())
        throw DimensionError("aids: coefficient shapes disagree");
    double sa = 0.0;
    for (double a : alpha) sa += a;
    if (std::abs(sa - 1.0) > tol) return false;
    double sb = 0.0;
    for (double b : beta) sb += b;
    if (std::abs(sb) > tol) return false;
    for (std::size_t j = 0; j < goods(); ++j) {
        double sc = 0.0;
        for (std::size_t i = 0; i < goods(); ++i) sc += gamma(i, j);
        if (std::abs(sc) > tol) return false;
    }
    return true;
}

double aids_price_index(const AidsModel& model, std::span<const double> log_prices) {
    const std::size_t n = model.goods();
    if (log_prices.size() != n || model.gamma.rows() != n || model.gamma.cols() != n)
        throw DimensionError("aids_price_index: dimension mismatch");
    double idx = model.a0;
    for (std::size_t k = 0; k < n; ++k) idx += model.alpha[k] * log_prices[k];
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k)
            idx += 0.5 * model.gamma(j, k) * log_prices[k] * log_prices[j];
    return idx;
}

std::vector<double> aids_budget_share(const AidsModel& model, std::span<const double> log_prices,
                                      double expenditure) {
    if (!(expenditure > 0.0)) throw DomainError("aids_budget_share: expenditure must be positive");
    const std::size_t n = model.goods();
    if (model.beta.size() != n) throw DimensionError("aids_budget_share: beta length mismatch");
    const double log_p = aids_price_index(model, log_prices);
    const double real_exp = std::log(expenditure) - log_p;
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) {
        double wi = model.alpha[i] + model.beta[i] * real_exp;
        for (std::size_t j = 0; j < n; ++j) wi += model.gamma(i, j) * log_prices[j];
        w[i] = wi;
    }
    return w;
}

double aids_quantity(double share, double expenditure, double own_price) {
    if (!(own_price > 0.0)) throw DomainError("aids_quantity: price must be positive");
    return share * expenditure / own_price;
}

namespace {

using json = nlohmann::json;

Matrix matrix_field(const json& j, const char* key, const std::string& origin) {
    if (!j.contains(key) || !j.at(key).is_array())
        throw SchemaError(origin + ": demand model needs array \"" + std::string(key) + "\"");
    const auto rows = j.at(key).get<std::vector<std::vector<double>>>();
    if (rows.empty()) return Matrix();
    Matrix m(rows.size(), rows[0].size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != rows[0].size())
            throw SchemaError(origin + ": ragged matrix in \"" + std::string(key) + "\"");
        for (std::size_t c = 0; c < rows[r].size(); ++c) m(r, c) = rows[r][c];
    }
    return m;
}

} // namespace

DemandModelDocument parse_demand_model(const std::string& json_text, const std::string& origin) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw SchemaError(origin + ": invalid JSON: " + e.what());
    }
    DemandModelDocument doc;
    try {
        if (!j.contains("kind")) throw SchemaError(origin + ": demand model needs a kind");
        doc.kind = j.at("kind").get<std::string>();
        if (doc.kind == "linear") {
            LinearDemandFit fit;
            fit.log_space = j.value("log_space", false);
            fit.intercept = j.at("intercept").get<std::vector<double>>();
            fit.price_coefs = matrix_field(j, "price_coefs", origin);
            fit.shifter_coefs =
                j.contains("shifter_coefs") ? matrix_field(j, "shifter_coefs", origin) : Matrix();
            const std::size_t n = fit.intercept.size();
            if (fit.price_coefs.rows() != n || fit.price_coefs.cols() != n)
                throw SchemaError(origin + ": price_coefs must be square over the products");
            doc.linear = std::move(fit);
        } else if (doc.kind == "logit") {
            LogitDemandModel m;
            m.alpha = j.at("alpha").get<double>();
            m.beta = j.at("beta").get<double>();
            if (j.contains("gamma")) m.gamma = j.at("gamma").get<std::vector<double>>();
            m.total_q = j.value("total_q", 1.0);
            if (!(m.total_q > 0.0))
                throw SchemaError(origin + ": logit model needs total_q > 0");
            doc.logit = std::move(m);
        } else if (doc.kind == "aids") {
            AidsModel m;
            m.a0 = j.value("a0", 0.0);
            m.alpha = j.at("alpha").get<std::vector<double>>();
            m.beta = j.at("beta").get<std::vector<double>>();
            m.gamma = matrix_field(j, "gamma", origin);
            const std::size_t n = m.alpha.size();
            if (m.beta.size() != n || m.gamma.rows() != n || m.gamma.cols() != n)
                throw SchemaError(origin + ": aids coefficient shapes disagree");
            doc.aids = std::move(m);
        } else {
            throw SchemaError(origin + ": unknown demand model kind \"" + doc.kind + "\"");
        }
    } catch (const json::exception& e) {
        throw SchemaError(origin + ": bad demand model field: " + e.what());
    }
    return doc;
}

DemandModelDocument load_demand_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_demand_model(buf.str(), path.string());
}

} // namespace marketdef
