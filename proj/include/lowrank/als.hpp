#pragma once

#include "lowrank/solver_common.hpp"
#include "lowrank/structure.hpp"

#include <cstdint>
#include <optional>

namespace lowrank {

/// Exact least-squares update of the right factor given L.
inline Matrix als_update_R(const MeasurementModel& model, const Matrix& L) {
    Matrix M = right_factor_matrix(model.Abar, L);
    return mat(pinv_solve(M, model.ybar), L.cols(), model.n2);
}

/// Exact least-squares update of the left factor given R.
inline Matrix als_update_L(const MeasurementModel& model, const Matrix& R) {
    Matrix N = left_factor_matrix(model.Abar, R);
    return mat(pinv_solve(N, model.ybar), model.n1, R.rows());
}

/// argmin_R ||L R - X||_F, columnwise minimum-norm.
inline Matrix refit_factor(const Matrix& L, const Matrix& X) {
    return pinv_solve(L, X);
}

/// Alternating least squares, optionally with lift-and-project structure steps.
///
/// Each outer iteration updates R then L by exact least squares against the
/// measurements. When a structure is given, each factor update is followed by
/// projecting L R onto the structured family and refitting that factor to the
/// projection. Stops when the squared residual J stagnates:
/// |J_k - J_{k+1}| / max(J_k, 1e-30) < epsilon.
inline Estimate als_solve(const MeasurementModel& model, Index r,
                          const std::optional<LinearStructure>& structure,
                          const SolverOptions& opts = {},
                          [[maybe_unused]] std::uint64_t seed = 0) {
    validate(opts);
    std::optional<LinearStructure> s = structure;
    if (s && s->kind == StructureKind::unstructured) {
        s.reset();  // identity projection; take the plain path
    }
    if (s && (s->n1 != model.n1 || s->n2 != model.n2)) {
        throw std::invalid_argument("als_solve: structure shape does not match model");
    }

    Factorization f = svd_init(model, r);
    Matrix L = f.L;
    Matrix R = f.R;

    double J_prev = residual_norm(model, L * R);
    J_prev *= J_prev;

    Estimate out;
    for (int k = 1; k <= opts.k_max; ++k) {
        R = als_update_R(model, L);
        if (s) {
            Matrix Xp = structure_project(*s, L * R);
            R = refit_factor(L, Xp);
        }
        L = als_update_L(model, R);
        if (s) {
            Matrix Xp = structure_project(*s, L * R);
            L = refit_factor(R.transpose(), Xp.transpose()).transpose();
        }

        double res = residual_norm(model, L * R);
        double J = res * res;
        out.iterations = k;
        out.final_residual = res;
        if (std::abs(J_prev - J) / std::max(J_prev, 1e-30) < opts.epsilon) {
            out.converged = true;
            break;
        }
        J_prev = J;
    }

    out.X_hat = L * R;
    out.factorization = {L, R, r};
    return out;
}

}  // namespace lowrank
