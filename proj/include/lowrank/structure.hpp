#pragma once

#include "lowrank/dense.hpp"

#include <stdexcept>
#include <string>

namespace lowrank {

enum class StructureKind { hankel, toeplitz, unstructured };

/// A linear family of n1 x n2 matrices parameterized by p real numbers.
///
/// For hankel, X(i, j) = h(i + j) and p = n1 + n2 - 1.
/// For toeplitz, X(i, j) = h(i - j + n2 - 1) and p = n1 + n2 - 1.
/// For unstructured, h is vec(X) and p = n1 * n2.
struct LinearStructure {
    Index n1 = 0;
    Index n2 = 0;
    Index p = 0;
    StructureKind kind = StructureKind::unstructured;
};

namespace detail {

inline void check_shape(Index n1, Index n2) {
    if (n1 < 1 || n2 < 1) {
        throw std::invalid_argument("structure: matrix dimensions must be positive");
    }
}

}  // namespace detail

inline LinearStructure hankel_structure(Index n1, Index n2) {
    detail::check_shape(n1, n2);
    return {n1, n2, n1 + n2 - 1, StructureKind::hankel};
}

inline LinearStructure toeplitz_structure(Index n1, Index n2) {
    detail::check_shape(n1, n2);
    return {n1, n2, n1 + n2 - 1, StructureKind::toeplitz};
}

inline LinearStructure unstructured(Index n1, Index n2) {
    detail::check_shape(n1, n2);
    return {n1, n2, n1 * n2, StructureKind::unstructured};
}

/// S_chi: build the structured matrix from its parameter vector.
inline Matrix structure_apply(const LinearStructure& s, const Vector& h) {
    if (h.size() != s.p) {
        throw std::invalid_argument("structure_apply: expected " + std::to_string(s.p) +
                                    " parameters, got " + std::to_string(h.size()));
    }
    switch (s.kind) {
        case StructureKind::hankel: {
            Matrix X(s.n1, s.n2);
            for (Index j = 0; j < s.n2; ++j) {
                for (Index i = 0; i < s.n1; ++i) {
                    X(i, j) = h(i + j);
                }
            }
            return X;
        }
        case StructureKind::toeplitz: {
            Matrix X(s.n1, s.n2);
            for (Index j = 0; j < s.n2; ++j) {
                for (Index i = 0; i < s.n1; ++i) {
                    X(i, j) = h(i - j + s.n2 - 1);
                }
            }
            return X;
        }
        case StructureKind::unstructured:
            return mat(h, s.n1, s.n2);
    }
    throw std::logic_error("structure_apply: unknown structure kind");
}

/// T_chi: parameters of the structured matrix closest to X in Frobenius norm.
///
/// For hankel and toeplitz this averages X over each parameter's index set
/// (anti-diagonals and diagonals respectively), which solves the least-squares
/// problem exactly because the index sets partition the entries.
inline Vector structure_fit(const LinearStructure& s, const Matrix& X) {
    if (X.rows() != s.n1 || X.cols() != s.n2) {
        throw std::invalid_argument("structure_fit: matrix shape mismatch");
    }
    switch (s.kind) {
        case StructureKind::hankel: {
            Vector sums = Vector::Zero(s.p);
            Vector counts = Vector::Zero(s.p);
            for (Index j = 0; j < s.n2; ++j) {
                for (Index i = 0; i < s.n1; ++i) {
                    sums(i + j) += X(i, j);
                    counts(i + j) += 1.0;
                }
            }
            return sums.cwiseQuotient(counts);
        }
        case StructureKind::toeplitz: {
            Vector sums = Vector::Zero(s.p);
            Vector counts = Vector::Zero(s.p);
            for (Index j = 0; j < s.n2; ++j) {
                for (Index i = 0; i < s.n1; ++i) {
                    sums(i - j + s.n2 - 1) += X(i, j);
                    counts(i - j + s.n2 - 1) += 1.0;
                }
            }
            return sums.cwiseQuotient(counts);
        }
        case StructureKind::unstructured:
            return vec(X);
    }
    throw std::logic_error("structure_fit: unknown structure kind");
}

/// P_chi = S_chi . T_chi: orthogonal projection of X onto the structured family.
inline Matrix structure_project(const LinearStructure& s, const Matrix& X) {
    return structure_apply(s, structure_fit(s, X));
}

/// The (n1*n2) x p matrix B with B h = vec(S_chi(h)) for all h.
inline Matrix structure_basis(const LinearStructure& s) {
    Matrix B(s.n1 * s.n2, s.p);
    Vector e = Vector::Zero(s.p);
    for (Index k = 0; k < s.p; ++k) {
        e(k) = 1.0;
        B.col(k) = vec(structure_apply(s, e));
        e(k) = 0.0;
    }
    return B;
}

}  // namespace lowrank
