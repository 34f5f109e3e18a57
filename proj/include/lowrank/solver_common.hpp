#pragma once

#include "lowrank/dense.hpp"
#include "lowrank/sensing.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

namespace lowrank {

struct Factorization {
    Matrix L;  // n1 x r
    Matrix R;  // r x n2
    Index r = 0;
};

struct SolverOptions {
    double epsilon = 1e-8;       // outer stopping tolerance
    int k_max = 500;             // outer iteration cap
    double lambda = 0.5;         // ADMM coupling weight
    double lambda_prime = 0.5;   // ADMM dual step size
    double mu = 1.0;             // structure attachment weight
    double inner_tol_primal = 1e-8;
    double inner_tol_dual = 1e-8;
    int inner_max = 1;           // ADMM sweeps per factor per outer iteration
};

inline void validate(const SolverOptions& opts) {
    if (!(opts.epsilon > 0.0) || !std::isfinite(opts.epsilon)) {
        throw std::invalid_argument("SolverOptions: epsilon must be positive");
    }
    if (opts.k_max < 1) {
        throw std::invalid_argument("SolverOptions: k_max must be at least 1");
    }
    if (!(opts.lambda > 0.0) || !(opts.lambda_prime > 0.0) || !(opts.mu >= 0.0)) {
        throw std::invalid_argument(
            "SolverOptions: lambda and lambda_prime must be positive, mu nonnegative");
    }
    if (!(opts.inner_tol_primal > 0.0) || !(opts.inner_tol_dual > 0.0)) {
        throw std::invalid_argument("SolverOptions: inner tolerances must be positive");
    }
    if (opts.inner_max < 1) {
        throw std::invalid_argument("SolverOptions: inner_max must be at least 1");
    }
}

struct Estimate {
    Matrix X_hat;
    Factorization factorization;
    int iterations = 0;
    double final_residual = 0.0;  // ||ybar - Abar vec(X_hat)||_2
    bool converged = false;
};

/// Per-iteration reporting hook: (iteration, residual, primal gap, dual gap).
using TraceSink = std::function<void(int, double, double, double)>;

/// Split X ~= L R with balanced factor norms via the leading rank-r SVD.
inline Factorization svd_factor(const Matrix& X, Index r) {
    TruncatedSvd t = truncated_svd(X, r);
    Vector root = t.sigma.cwiseMax(0.0).cwiseSqrt();
    Factorization f;
    f.L = t.U * root.asDiagonal();
    f.R = root.asDiagonal() * t.V.transpose();
    f.r = r;
    return f;
}

/// Spectral initialization from the back-projected measurements mat(Abar^T ybar).
inline Factorization svd_init(const MeasurementModel& model, Index r,
                              bool* degenerate = nullptr) {
    Matrix B = mat(model.Abar.transpose() * model.ybar, model.n1, model.n2);
    bool zero = B.cwiseAbs().maxCoeff() == 0.0;
    if (degenerate) {
        *degenerate = zero;
    }
    if (zero) {
        // Back-projection vanished; fall back to deterministic unit factors.
        Factorization f;
        f.L = Matrix::Zero(model.n1, r);
        f.R = Matrix::Zero(r, model.n2);
        for (Index i = 0; i < r; ++i) {
            f.L(i % model.n1, i) = 1.0;
            f.R(i, i % model.n2) = 1.0;
        }
        f.r = r;
        return f;
    }
    return svd_factor(B, r);
}

inline double residual_norm(const MeasurementModel& model, const Matrix& X) {
    return (model.ybar - apply_operator(model.Abar, X)).norm();
}

}  // namespace lowrank
