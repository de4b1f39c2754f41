#pragma once
// Minimal numeric kernels: cyclic Jacobi for symmetric eigenproblems and
// Householder QR for least squares. Sizes here are small (d in the tens),
// so robustness and determinism win over speed.

#include <vector>

#include "marketdef/matrix.hpp"

namespace marketdef {

struct SymmetricEigen {
    std::vector<double> values; // descending
    Matrix vectors;             // column j pairs with values[j]
};

// Eigendecomposition of a symmetric matrix via cyclic Jacobi rotations.
SymmetricEigen eigen_symmetric(const Matrix& a, double tol = 1e-12, int max_sweeps = 64);

// Least-squares solution of X b = y via Householder QR with rank check.
// Throws DomainError("singular design ...") when X is rank deficient.
std::vector<double> least_squares(const Matrix& x, const std::vector<double>& y);

// Column means of a matrix.
std::vector<double> column_means(const Matrix& m);

// Covariance of column-centered data, sample (n-1) normalization.
Matrix covariance(const Matrix& m);

} // namespace marketdef
