#pragma once

#include "lowrank/dense.hpp"

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <utility>

namespace lowrank {

/// A prewhitened linear measurement model: ybar = Abar vec(X) + white noise.
struct MeasurementModel {
    Matrix Abar;
    Vector ybar;
    Index n1 = 0;
    Index n2 = 0;

    Index m() const { return Abar.rows(); }
};

inline MeasurementModel make_model(Matrix Abar, Vector ybar, Index n1, Index n2) {
    if (n1 < 1 || n2 < 1 || Abar.cols() != n1 * n2) {
        throw std::invalid_argument("make_model: operator has " + std::to_string(Abar.cols()) +
                                    " columns, expected " + std::to_string(n1 * n2));
    }
    if (Abar.rows() != ybar.size()) {
        throw std::invalid_argument("make_model: measurement count mismatch");
    }
    if (!Abar.allFinite() || !ybar.allFinite()) {
        throw std::invalid_argument("make_model: non-finite entries");
    }
    return {std::move(Abar), std::move(ybar), n1, n2};
}

/// Noise covariance description. Isotropic sigma = 0 means noiseless.
struct NoiseSpec {
    double sigma = 1.0;
    std::optional<Matrix> covariance;

    static NoiseSpec isotropic(double s) {
        if (s < 0.0 || !std::isfinite(s)) {
            throw std::invalid_argument("NoiseSpec: sigma must be finite and nonnegative");
        }
        NoiseSpec spec;
        spec.sigma = s;
        return spec;
    }

    static NoiseSpec colored(Matrix C) {
        if (C.rows() != C.cols() || C.rows() < 1) {
            throw std::invalid_argument("NoiseSpec: covariance must be square");
        }
        NoiseSpec spec;
        spec.sigma = 0.0;
        spec.covariance = std::move(C);
        return spec;
    }
};

/// Random sensing operator with i.i.d. N(0, 1/m) entries, filled column-major.
inline Matrix make_gaussian_operator(Index m, Index n1, Index n2, std::uint64_t seed) {
    if (m < 1 || n1 < 1 || n2 < 1) {
        throw std::invalid_argument("make_gaussian_operator: dimensions must be positive");
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double scale = 1.0 / std::sqrt(static_cast<double>(m));
    Matrix A(m, n1 * n2);
    for (Index j = 0; j < A.cols(); ++j) {
        for (Index i = 0; i < m; ++i) {
            A(i, j) = scale * gauss(rng);
        }
    }
    return A;
}

inline Vector apply_operator(const Matrix& A, const Matrix& X) {
    if (A.cols() != X.size()) {
        throw std::invalid_argument("apply_operator: operator expects " +
                                    std::to_string(A.cols()) + " entries, matrix has " +
                                    std::to_string(X.size()));
    }
    return A * vec(X);
}

/// Transform (A, y) so the noise becomes unit-variance white.
///
/// Isotropic noise divides both by sigma (sigma = 0 or 1 leaves them unchanged).
/// A full covariance C is symmetrized, eigendecomposed, and inverted through
/// its symmetric square root; C must be positive definite.
inline MeasurementModel prewhiten(const Matrix& A, const Vector& y, const NoiseSpec& noise,
                                  Index n1, Index n2) {
    if (noise.covariance) {
        const Matrix& C = *noise.covariance;
        if (C.rows() != y.size()) {
            throw std::invalid_argument("prewhiten: covariance size does not match measurements");
        }
        const double scale = std::max(1.0, C.cwiseAbs().maxCoeff());
        if ((C - C.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
            throw std::invalid_argument("prewhiten: covariance must be symmetric");
        }
        Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (C + C.transpose()));
        if (eig.info() != Eigen::Success || eig.eigenvalues().minCoeff() <= 0.0) {
            throw std::invalid_argument("prewhiten: covariance must be positive definite");
        }
        Matrix W = eig.eigenvectors() *
                   eig.eigenvalues().cwiseInverse().cwiseSqrt().asDiagonal() *
                   eig.eigenvectors().transpose();
        return make_model(W * A, W * y, n1, n2);
    }
    if (noise.sigma == 0.0 || noise.sigma == 1.0) {
        return make_model(A, y, n1, n2);
    }
    return make_model(A / noise.sigma, y / noise.sigma, n1, n2);
}

}  // namespace lowrank
