#include "marketdef/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace marketdef {

SymmetricEigen eigen_symmetric(const Matrix& a, double tol, int max_sweeps) {
    const std::size_t n = a.rows();
    if (a.cols() != n) throw DimensionError("eigen_symmetric: matrix not square");

    Matrix m = a;
    Matrix v(n, n, 0.0);
    for (std::size_t i = 0; i < n; ++i) v(i, i) = 1.0;

    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) scale = std::max(scale, std::abs(m(i, j)));
    if (scale == 0.0) scale = 1.0;

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off = std::max(off, std::abs(m(p, q)));
        if (off <= tol * scale) break;

        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = m(p, q);
                if (std::abs(apq) <= 1e-300) continue;
                const double theta = (m(q, q) - m(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                for (std::size_t k = 0; k < n; ++k) {
                    const double mkp = m(k, p);
                    const double mkq = m(k, q);
                    m(k, p) = c * mkp - s * mkq;
                    m(k, q) = s * mkp + c * mkq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double mpk = m(p, k);
                    const double mqk = m(q, k);
                    m(p, k) = c * mpk - s * mqk;
                    m(q, k) = s * mpk + c * mqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<double> diag(n);
    for (std::size_t i = 0; i < n; ++i) diag[i] = m(i, i);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t l, std::size_t r) { return diag[l] > diag[r]; });

    SymmetricEigen out;
    out.values.resize(n);
    out.vectors = Matrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        out.values[j] = diag[order[j]];
        for (std::size_t i = 0; i < n; ++i) out.vectors(i, j) = v(i, order[j]);
    }
    return out;
}

std::vector<double> least_squares(const Matrix& x, const std::vector<double>& y) {
    const std::size_t m = x.rows();
    const std::size_t n = x.cols();
    if (y.size() != m) throw DimensionError("least_squares: response length mismatch");
    if (m < n) throw DomainError("least_squares: fewer observations than regressors");

    Matrix r = x;
    std::vector<double> b = y;

    // Householder reflections, column by column.
    double col_scale = 0.0;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) col_scale = std::max(col_scale, std::abs(r(i, j)));
    if (col_scale == 0.0) throw DomainError("singular design matrix: all-zero design");

    for (std::size_t k = 0; k < n; ++k) {
        double norm = 0.0;
        for (std::size_t i = k; i < m; ++i) norm += r(i, k) * r(i, k);
        norm = std::sqrt(norm);
        if (norm <= 1e-12 * col_scale)
            throw DomainError("singular design matrix: rank-deficient column " + std::to_string(k));

        const double alpha = r(k, k) >= 0.0 ? -norm : norm;
        std::vector<double> u(m - k);
        u[0] = r(k, k) - alpha;
        for (std::size_t i = k + 1; i < m; ++i) u[i - k] = r(i, k);
        double unorm2 = 0.0;
        for (double ui : u) unorm2 += ui * ui;
        if (unorm2 > 0.0) {
            for (std::size_t j = k; j < n; ++j) {
                double dot = 0.0;
                for (std::size_t i = k; i < m; ++i) dot += u[i - k] * r(i, j);
                const double f = 2.0 * dot / unorm2;
                for (std::size_t i = k; i < m; ++i) r(i, j) -= f * u[i - k];
            }
            double dot = 0.0;
            for (std::size_t i = k; i < m; ++i) dot += u[i - k] * b[i];
            const double f = 2.0 * dot / unorm2;
            for (std::size_t i = k; i < m; ++i) b[i] -= f * u[i - k];
        }
        r(k, k) = alpha;
    }

    // Back substitution on the upper-triangular factor.
    std::vector<double> beta(n, 0.0);
    for (std::size_t kk = n; kk-- > 0;) {
        double s = b[kk];
        for (std::size_t j = kk + 1; j < n; ++j) s -= r(kk, j) * beta[j];
        if (std::abs(r(kk, kk)) <= 1e-12 * col_scale)
            throw DomainError("singular design matrix: zero pivot at column " + std::to_string(kk));
        beta[kk] = s / r(kk, kk);
    }
    return beta;
}

std::vector<double> column_means(const Matrix& m) {
    std::vector<double> mu(m.cols(), 0.0);
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c) mu[c] += m(r, c);
    for (double& v : mu) v /= static_cast<double>(m.rows());
    return mu;
}

Matrix covariance(const Matrix& m) {
    const std::size_t n = m.rows();
    const std::size_t d = m.cols();
    if (n < 2) throw DomainError("covariance: need at least two rows");
    const std::vector<double> mu = column_means(m);
    Matrix c(d, d, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t i = 0; i < d; ++i) {
            const double xi = m(r, i) - mu[i];
            for (std::size_t j = i; j < d; ++j) c(i, j) += xi * (m(r, j) - mu[j]);
        }
    }
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i; j < d; ++j) {
            c(i, j) /= static_cast<double>(n - 1);
            c(j, i) = c(i, j);
        }
    return c;
}

} // namespace marketdef
