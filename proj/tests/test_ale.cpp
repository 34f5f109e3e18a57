#include "lowrank/ale.hpp"

#include "lowrank/probgen.hpp"
#include "oracles.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace lowrank;

namespace {

Matrix random_matrix(Index rows, Index cols, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix M(rows, cols);
    for (Index j = 0; j < cols; ++j) {
        for (Index i = 0; i < rows; ++i) {
            M(i, j) = gauss(rng);
        }
    }
    return M;
}

MeasurementModel hankel_instance(Index n1, Index n2, Index r, Index m, double smnr,
                                 std::uint64_t seed, Matrix* X_out = nullptr) {
    auto [h, X] = gen_hankel_lowrank(n1, n2, r, seed);
    if (X_out) {
        *X_out = X;
    }
    Matrix A = make_gaussian_operator(m, n1, n2, seed + 1);
    Vector y = apply_operator(A, X);
    auto [noisy, sigma] = add_noise(y, X, smnr, seed + 2);
    return prewhiten(A, noisy, NoiseSpec::isotropic(sigma), n1, n2);
}

}  // namespace

TEST_CASE("initial_param_fit solves the structured measurement fit") {
    const Index n1 = 5, n2 = 5, m = 12;
    LinearStructure s = hankel_structure(n1, n2);
    Matrix Abar = make_gaussian_operator(m, n1, n2, 3);
    Vector ybar = vec(random_matrix(m, 1, 4));
    MeasurementModel model = make_model(Abar, ybar, n1, n2);

    Vector h = initial_param_fit(model, s);
    Vector h_ref = oracle::pinv_solve_ref(Abar * structure_basis(s), ybar);
    REQUIRE((h - h_ref).norm() <= 1e-10 * std::max(1.0, h_ref.norm()));
}

TEST_CASE("initial_param_fit reproduces parameters in the determined noiseless case") {
    auto [h, X] = gen_hankel_lowrank(4, 4, 2, 11);
    LinearStructure s = hankel_structure(4, 4);
    MeasurementModel model = make_model(Matrix::Identity(16, 16), vec(X), 4, 4);
    Vector h0 = initial_param_fit(model, s);
    REQUIRE((h0 - h).cwiseAbs().maxCoeff() <= 1e-10 * std::max(1.0, h.cwiseAbs().maxCoeff()));
}

TEST_CASE("ale_iterate_once computes the advertised factor updates") {
    const Index n1 = 6, n2 = 5, r = 2;
    LinearStructure s = hankel_structure(n1, n2);
    Vector h = vec(random_matrix(s.p, 1, 21));
    Matrix R_prev = random_matrix(r, n2, 22);

    AleIterate it = ale_iterate_once(s, h, R_prev, r);
    Matrix S = structure_apply(s, h);

    // L minimizes ||L R_prev - S||_F.
    REQUIRE(((it.L * R_prev - S) * R_prev.transpose()).cwiseAbs().maxCoeff() <= 1e-10);
    // R minimizes ||L R - S||_F.
    REQUIRE((it.L.transpose() * (it.L * it.R - S)).cwiseAbs().maxCoeff() <= 1e-10);
    // h refits the product.
    REQUIRE((it.h - structure_fit(s, it.L * it.R)).cwiseAbs().maxCoeff() <= 1e-13);
}

TEST_CASE("ale_iterate_once first-columns variant copies from the structured matrix") {
    const Index n1 = 5, n2 = 5, r = 2;
    LinearStructure s = hankel_structure(n1, n2);
    Vector h = vec(random_matrix(s.p, 1, 31));
    Matrix R_prev = random_matrix(r, n2, 32);

    AleIterate it = ale_iterate_once(s, h, R_prev, r, AleLeftUpdate::first_columns);
    Matrix S = structure_apply(s, h);
    REQUIRE(it.L == S.leftCols(r));
}

TEST_CASE("ale_iterate_once repairs a rank-deficient left factor") {
    const Index n1 = 5, n2 = 5, r = 2;
    LinearStructure s = hankel_structure(n1, n2);
    // Geometric sequence: the hankel matrix has rank exactly 1 < r.
    Vector h(s.p);
    for (Index t = 0; t < s.p; ++t) {
        h(t) = std::pow(0.8, double(t));
    }
    Matrix R_zero = Matrix::Zero(r, n2);

    int events = 0;
    AleIterate it = ale_iterate_once(s, h, R_zero, r, AleLeftUpdate::least_squares, &events);
    REQUIRE(events == 1);
    REQUIRE(it.L.allFinite());
    // The repaired factor reproduces the rank-1 structured matrix.
    REQUIRE((it.L * it.R - structure_apply(s, h)).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("ale recovers exactly in the noiseless determined case") {
    Matrix X;
    auto [h, X0] = gen_hankel_lowrank(4, 4, 1, 7);
    X = X0;
    MeasurementModel model = make_model(Matrix::Identity(16, 16), vec(X), 4, 4);
    Estimate est = ale_solve(model, 1, hankel_structure(4, 4));
    REQUIRE(est.converged);
    REQUIRE(est.iterations <= 2);
    REQUIRE(srer_db(X, est.X_hat) >= 100.0);
}

TEST_CASE("ale output always lies in the structured family") {
    Matrix X;
    MeasurementModel model = hankel_instance(8, 8, 2, 26, 10.0, 41, &X);
    LinearStructure s = hankel_structure(8, 8);
    Estimate est = ale_solve(model, 2, s);
    REQUIRE((est.X_hat - structure_project(s, est.X_hat)).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("ale converges under both left-update variants") {
    Matrix X;
    MeasurementModel model = hankel_instance(10, 10, 2, 40, 20.0, 51, &X);
    LinearStructure s = hankel_structure(10, 10);

    Estimate ls = ale_solve(model, 2, s, {}, AleLeftUpdate::least_squares);
    Estimate fc = ale_solve(model, 2, s, {}, AleLeftUpdate::first_columns);
    REQUIRE(ls.iterations >= 1);
    REQUIRE(fc.iterations >= 1);
    REQUIRE(srer_db(X, ls.X_hat) > 5.0);
    REQUIRE(srer_db(X, fc.X_hat) > 5.0);
}

TEST_CASE("ale validates rank and options") {
    Matrix X;
    MeasurementModel model = hankel_instance(4, 4, 1, 8, 10.0, 61, &X);
    REQUIRE_THROWS_AS(ale_solve(model, 5, hankel_structure(4, 4)), std::invalid_argument);
    SolverOptions bad;
    bad.k_max = 0;
    REQUIRE_THROWS_AS(ale_solve(model, 1, hankel_structure(4, 4), bad), std::invalid_argument);
    REQUIRE_THROWS_AS(initial_param_fit(model, hankel_structure(5, 5)), std::invalid_argument);
}
