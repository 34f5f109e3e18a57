#pragma once

#include "lowrank/dense.hpp"
#include "lowrank/structure.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <utility>

namespace lowrank {

/// Sum-of-damped-exponentials description of a real sequence:
/// x[t] = Re( sum_i amplitudes(i) * poles(i)^t ).
struct ExponentialModel {
    int order = 0;
    Eigen::VectorXcd poles;
    Eigen::VectorXcd amplitudes;
    bool well_conditioned = true;
};

inline Vector synthesize_real(const Eigen::VectorXcd& poles, const Eigen::VectorXcd& amplitudes,
                              Index length) {
    if (poles.size() != amplitudes.size()) {
        throw std::invalid_argument("synthesize_real: pole and amplitude counts differ");
    }
    Vector x = Vector::Zero(length);
    for (Index i = 0; i < poles.size(); ++i) {
        std::complex<double> zp(1.0, 0.0);
        for (Index t = 0; t < length; ++t) {
            x(t) += (amplitudes(i) * zp).real();
            zp *= poles(i);
        }
    }
    return x;
}

/// Fit an order-r exponential model to x by linear prediction.
///
/// The prediction coefficients solve the least-squares system built from
/// shifted windows of x; the poles are the eigenvalues of the companion
/// matrix of the prediction polynomial, and the amplitudes solve the
/// complex Vandermonde system against x. Requires x.size() >= 2r + 1.
inline ExponentialModel prony_fit(const Vector& x, Index r) {
    const Index n = x.size();
    if (r < 1) {
        throw std::invalid_argument("prony_fit: order must be positive");
    }
    if (n < 2 * r + 1) {
        throw std::invalid_argument("prony_fit: need at least 2r + 1 samples");
    }

    Matrix M(n - r, r);
    Vector rhs(n - r);
    for (Index i = 0; i < n - r; ++i) {
        for (Index j = 0; j < r; ++j) {
            M(i, j) = x(r + i - 1 - j);
        }
        rhs(i) = -x(r + i);
    }
    Vector a = pinv_solve(M, rhs);

    Matrix C = Matrix::Zero(r, r);
    for (Index j = 0; j < r; ++j) {
        C(0, j) = -a(j);
    }
    for (Index i = 1; i < r; ++i) {
        C(i, i - 1) = 1.0;
    }
    Eigen::EigenSolver<Matrix> eig(C);

    ExponentialModel model;
    model.order = static_cast<int>(r);
    model.poles = eig.eigenvalues();

    Eigen::MatrixXcd V(n, r);
    for (Index i = 0; i < r; ++i) {
        std::complex<double> zp(1.0, 0.0);
        for (Index t = 0; t < n; ++t) {
            V(t, i) = zp;
            zp *= model.poles(i);
        }
    }
    model.amplitudes = V.colPivHouseholderQr().solve(x.cast<std::complex<double>>());

    double max_mod = 0.0;
    for (Index i = 0; i < r; ++i) {
        max_mod = std::max(max_mod, std::abs(model.poles(i)));
    }
    double min_sep = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < r; ++i) {
        for (Index j = i + 1; j < r; ++j) {
            min_sep = std::min(min_sep, std::abs(model.poles(i) - model.poles(j)));
        }
    }
    model.well_conditioned = model.poles.allFinite() && model.amplitudes.allFinite() &&
                             (r < 2 || min_sep >= 1e-6 * std::max(1.0, max_mod));
    return model;
}

/// Random rank-r Hankel instance: (h, X = S_hankel(h)) with X exactly rank r.
///
/// Draws a Gaussian sequence, fits an order-r exponential model, clamps any
/// expanding pole z to z / |z|^2, refits amplitudes on the clamped poles, and
/// re-synthesizes. The resulting Hankel matrix has rank r generically; draws
/// that fail the rank check are rejected and retried.
inline std::pair<Vector, Matrix> gen_hankel_lowrank(Index n1, Index n2, Index r,
                                                    std::uint64_t seed) {
    if (r < 1 || r > std::min(n1, n2)) {
        throw std::invalid_argument("gen_hankel_lowrank: rank out of range");
    }
    const Index len = n1 + n2 - 1;
    if (len < 2 * r + 1) {
        throw std::invalid_argument("gen_hankel_lowrank: sequence too short for the order");
    }
    LinearStructure s = hankel_structure(n1, n2);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    for (int attempt = 0; attempt < 64; ++attempt) {
        Vector g(len);
        for (Index t = 0; t < len; ++t) {
            g(t) = gauss(rng);
        }
        ExponentialModel model = prony_fit(g, r);
        if (!model.well_conditioned) {
            continue;
        }
        bool clamped = false;
        for (Index i = 0; i < r; ++i) {
            double mod2 = std::norm(model.poles(i));
            if (mod2 > 1.0) {
                model.poles(i) /= mod2;
                clamped = true;
            }
        }
        if (clamped) {
            Eigen::MatrixXcd V(len, r);
            for (Index i = 0; i < r; ++i) {
                std::complex<double> zp(1.0, 0.0);
                for (Index t = 0; t < len; ++t) {
                    V(t, i) = zp;
                    zp *= model.poles(i);
                }
            }
            model.amplitudes = V.colPivHouseholderQr().solve(g.cast<std::complex<double>>());
        }
        Vector h = synthesize_real(model.poles, model.amplitudes, len);
        Matrix X = structure_apply(s, h);
        if (!X.allFinite()) {
            continue;
        }
        Eigen::BDCSVD<Matrix> svd(X);
        const Vector& sv = svd.singularValues();
        if (sv(0) <= 0.0 || sv(r - 1) < 1e-8 * sv(0)) {
            continue;
        }
        if (r < std::min(n1, n2) && sv(r) > 1e-9 * sv(0)) {
            continue;
        }
        return {std::move(h), std::move(X)};
    }
    throw std::runtime_error("gen_hankel_lowrank: no well-conditioned instance in 64 attempts");
}

/// Random unstructured rank-r matrix from a Gaussian factor product.
inline Matrix gen_lowrank(Index n1, Index n2, Index r, std::uint64_t seed) {
    if (r < 1 || r > std::min(n1, n2)) {
        throw std::invalid_argument("gen_lowrank: rank out of range");
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix G1(n1, r);
    Matrix G2(r, n2);
    for (Index j = 0; j < r; ++j) {
        for (Index i = 0; i < n1; ++i) {
            G1(i, j) = gauss(rng);
        }
    }
    for (Index j = 0; j < n2; ++j) {
        for (Index i = 0; i < r; ++i) {
            G2(i, j) = gauss(rng);
        }
    }
    return G1 * G2;
}

/// Add white Gaussian noise at the requested signal-to-noise level.
///
/// The variance is calibrated against the signal matrix:
/// sigma^2 = ||X||_F^2 / (m 10^(smnr_db / 10)). Passing +infinity returns the
/// measurements unchanged with sigma = 0. Returns (noisy y, sigma).
inline std::pair<Vector, double> add_noise(const Vector& y, const Matrix& X, double smnr_db,
                                           std::uint64_t seed) {
    if (std::isinf(smnr_db) && smnr_db > 0.0) {
        return {y, 0.0};
    }
    if (!std::isfinite(smnr_db)) {
        throw std::invalid_argument("add_noise: noise level must be finite or +infinity");
    }
    const double m = static_cast<double>(y.size());
    const double sigma2 = X.squaredNorm() / (m * std::pow(10.0, smnr_db / 10.0));
    const double sigma = std::sqrt(sigma2);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vector noisy = y;
    for (Index i = 0; i < noisy.size(); ++i) {
        noisy(i) += sigma * gauss(rng);
    }
    return {std::move(noisy), sigma};
}

/// Reconstruction quality in dB: 10 log10(||X||_F^2 / ||X - X_hat||_F^2),
/// capped at 300 so exact recoveries stay finite.
inline double srer_db(const Matrix& X, const Matrix& X_hat) {
    const double sig = X.squaredNorm();
    if (sig <= 0.0) {
        throw std::invalid_argument("srer_db: signal has zero energy");
    }
    const double err = (X - X_hat).squaredNorm();
    if (err <= 0.0) {
        return 300.0;
    }
    return std::min(10.0 * std::log10(sig / err), 300.0);
}

}  // namespace lowrank
