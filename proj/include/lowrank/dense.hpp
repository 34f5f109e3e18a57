#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <stdexcept>
#include <string>

namespace lowrank {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

namespace detail {

// Singular values sigma_i <= max(rows, cols) * sigma_max * 1e-12 count as zero.
inline double pinv_threshold(Index rows, Index cols) {
    return static_cast<double>(std::max(rows, cols)) * 1e-12;
}

[[noreturn]] inline void size_error(const std::string& what) {
    throw std::invalid_argument(what);
}

}  // namespace detail

/// Stack the columns of X into a single vector (column-major).
inline Vector vec(const Matrix& X) {
    return Eigen::Map<const Vector>(X.data(), X.size());
}

/// Inverse of vec: reshape v into an n1 x n2 matrix.
inline Matrix mat(const Vector& v, Index n1, Index n2) {
    if (n1 < 1 || n2 < 1 || v.size() != n1 * n2) {
        detail::size_error("mat: vector of length " + std::to_string(v.size()) +
                           " cannot fill a " + std::to_string(n1) + "x" + std::to_string(n2) +
                           " matrix");
    }
    return Eigen::Map<const Matrix>(v.data(), n1, n2);
}

/// Minimum-norm least-squares solution x = A^+ b.
inline Vector pinv_solve(const Matrix& A, const Vector& b) {
    if (A.rows() != b.size()) {
        detail::size_error("pinv_solve: A has " + std::to_string(A.rows()) +
                           " rows but b has length " + std::to_string(b.size()));
    }
    Eigen::BDCSVD<Matrix> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(detail::pinv_threshold(A.rows(), A.cols()));
    return svd.solve(b);
}

/// Columnwise minimum-norm least-squares solve, A^+ B.
inline Matrix pinv_solve(const Matrix& A, const Matrix& B) {
    if (A.rows() != B.rows()) {
        detail::size_error("pinv_solve: row counts of A and B differ");
    }
    Eigen::BDCSVD<Matrix> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(detail::pinv_threshold(A.rows(), A.cols()));
    return svd.solve(B);
}

struct TruncatedSvd {
    Matrix U;      // rows x r, orthonormal columns
    Vector sigma;  // r leading singular values, nonincreasing
    Matrix V;      // cols x r, orthonormal columns
};

/// Leading rank-r factors of X; U * diag(sigma) * V^T is the best rank-r approximation.
inline TruncatedSvd truncated_svd(const Matrix& X, Index r) {
    if (r < 1 || r > std::min(X.rows(), X.cols())) {
        throw std::invalid_argument("truncated_svd: rank " + std::to_string(r) +
                                    " out of range for a " + std::to_string(X.rows()) + "x" +
                                    std::to_string(X.cols()) + " matrix");
    }
    Eigen::BDCSVD<Matrix> svd(X, Eigen::ComputeThinU | Eigen::ComputeThinV);
    return {svd.matrixU().leftCols(r), svd.singularValues().head(r), svd.matrixV().leftCols(r)};
}

/// The m x (r*n2) matrix M with M vec(R) = Abar vec(L R) for every r x n2 matrix R.
///
/// Column block j of M is Abar's j-th column block (n1 columns) times L, i.e. the
/// materialized product Abar * blkdiag(L, ..., L).
inline Matrix right_factor_matrix(const Matrix& Abar, const Matrix& L) {
    const Index n1 = L.rows();
    const Index r = L.cols();
    if (n1 < 1 || r < 1 || Abar.cols() % n1 != 0) {
        detail::size_error("right_factor_matrix: Abar has " + std::to_string(Abar.cols()) +
                           " columns, not a multiple of L's row count " + std::to_string(n1));
    }
    const Index n2 = Abar.cols() / n1;
    Matrix M(Abar.rows(), r * n2);
    for (Index j = 0; j < n2; ++j) {
        M.middleCols(j * r, r).noalias() = Abar.middleCols(j * n1, n1) * L;
    }
    return M;
}

/// The m x (n1*r) matrix N with N vec(L) = Abar vec(L R) for every n1 x r matrix L.
inline Matrix left_factor_matrix(const Matrix& Abar, const Matrix& R) {
    const Index r = R.rows();
    const Index n2 = R.cols();
    if (r < 1 || n2 < 1 || Abar.cols() % n2 != 0) {
        detail::size_error("left_factor_matrix: Abar has " + std::to_string(Abar.cols()) +
                           " columns, not a multiple of R's column count " + std::to_string(n2));
    }
    const Index n1 = Abar.cols() / n2;
    Matrix N = Matrix::Zero(Abar.rows(), n1 * r);
    for (Index i = 0; i < r; ++i) {
        for (Index j = 0; j < n2; ++j) {
            if (R(i, j) != 0.0) {
                N.middleCols(i * n1, n1).noalias() += R(i, j) * Abar.middleCols(j * n1, n1);
            }
        }
    }
    return N;
}

}  // namespace lowrank
