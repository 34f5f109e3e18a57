#pragma once

#include "lowrank/als.hpp"
#include "lowrank/solver_common.hpp"
#include "lowrank/structure.hpp"

namespace lowrank {

/// argmin_h ||ybar - Abar S_chi(h)||_2 through the structure's basis matrix.
inline Vector initial_param_fit(const MeasurementModel& model, const LinearStructure& s) {
    if (s.n1 != model.n1 || s.n2 != model.n2) {
        throw std::invalid_argument("initial_param_fit: structure shape does not match model");
    }
    return pinv_solve(model.Abar * structure_basis(s), model.ybar);
}

enum class AleLeftUpdate {
    least_squares,   // L = S(h) R^+
    first_columns,   // L = first r columns of S(h)
};

struct AleIterate {
    Matrix L;
    Matrix R;
    Vector h;
};

/// One alternating pass: refresh L from S(h) and the previous R, refresh R
/// from L, then refit the structure parameters to L R.
///
/// If the refreshed L is numerically rank-deficient it is completed with the
/// leading rank-r factor of S(h); degenerate_events counts those repairs.
inline AleIterate ale_iterate_once(const LinearStructure& s, const Vector& h,
                                   const Matrix& R_prev, Index r,
                                   AleLeftUpdate variant = AleLeftUpdate::least_squares,
                                   int* degenerate_events = nullptr) {
    Matrix S = structure_apply(s, h);
    Matrix L;
    if (variant == AleLeftUpdate::first_columns) {
        if (r > S.cols()) {
            throw std::invalid_argument("ale_iterate_once: rank exceeds column count");
        }
        L = S.leftCols(r);
    } else {
        // L = S R_prev^+ = argmin_L ||L R_prev - S||_F
        L = refit_factor(R_prev.transpose(), S.transpose()).transpose();
    }

    Eigen::JacobiSVD<Matrix> svd(L);
    svd.setThreshold(detail::pinv_threshold(L.rows(), L.cols()));
    if (svd.rank() < r) {
        L += svd_factor(S, r).L;
        if (degenerate_events) {
            ++*degenerate_events;
        }
    }

    Matrix R = refit_factor(L, S);
    Vector h_next = structure_fit(s, L * R);
    return {std::move(L), std::move(R), std::move(h_next)};
}

/// Alternating low-rank embedding.
///
/// Fits the structure parameters to the measurements once, then alternates
/// factor refreshes against the current structured matrix, re-averaging the
/// parameters after each pass. Stops when the structured matrix and its
/// factored counterpart agree entrywise: ||S(h) - L R||_max <= epsilon.
inline Estimate ale_solve(const MeasurementModel& model, Index r, const LinearStructure& s,
                          const SolverOptions& opts = {},
                          AleLeftUpdate variant = AleLeftUpdate::least_squares,
                          int* degenerate_events = nullptr) {
    validate(opts);
    if (r < 1 || r > std::min(s.n1, s.n2)) {
        throw std::invalid_argument("ale_solve: rank out of range");
    }

    Vector h = initial_param_fit(model, s);
    Matrix R = svd_factor(structure_apply(s, h), r).R;
    Matrix L;

    Estimate out;
    for (int k = 1; k <= opts.k_max; ++k) {
        AleIterate it = ale_iterate_once(s, h, R, r, variant, degenerate_events);
        L = std::move(it.L);
        R = std::move(it.R);
        h = std::move(it.h);

        out.iterations = k;
        double gap = (structure_apply(s, h) - L * R).cwiseAbs().maxCoeff();
        if (gap <= opts.epsilon) {
            out.converged = true;
            break;
        }
    }

    out.X_hat = structure_apply(s, h);
    out.factorization = {L, R, r};
    out.final_residual = residual_norm(model, out.X_hat);
    return out;
}

}  // namespace lowrank
