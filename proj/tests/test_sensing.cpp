#include "lowrank/sensing.hpp"

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

}  // namespace

TEST_CASE("gaussian operator is deterministic in the seed") {
    Matrix A1 = make_gaussian_operator(10, 4, 5, 42);
    Matrix A2 = make_gaussian_operator(10, 4, 5, 42);
    Matrix A3 = make_gaussian_operator(10, 4, 5, 43);
    REQUIRE(A1 == A2);
    REQUIRE(A1 != A3);
    REQUIRE(A1.rows() == 10);
    REQUIRE(A1.cols() == 20);
}

TEST_CASE("gaussian operator entries have variance near 1/m") {
    const Index m = 200;
    Matrix A = make_gaussian_operator(m, 10, 10, 7);
    double mean = A.mean();
    double var = (A.array() - mean).square().sum() / static_cast<double>(A.size() - 1);
    REQUIRE(std::abs(mean) <= 0.002);
    REQUIRE(var == Catch::Approx(1.0 / static_cast<double>(m)).epsilon(0.05));
}

TEST_CASE("apply_operator is A times vec(X)") {
    Matrix A = make_gaussian_operator(6, 3, 4, 9);
    Matrix X = random_matrix(3, 4, 10);
    REQUIRE((apply_operator(A, X) - A * vec(X)).norm() == 0.0);
    REQUIRE_THROWS_AS(apply_operator(A, Matrix(random_matrix(4, 4, 11))),
                      std::invalid_argument);
}

TEST_CASE("make_model validates shapes and finiteness") {
    Matrix A = random_matrix(5, 12, 21);
    Vector y = vec(random_matrix(5, 1, 22));
    MeasurementModel model = make_model(A, y, 3, 4);
    REQUIRE(model.m() == 5);
    REQUIRE_THROWS_AS(make_model(A, y, 4, 4), std::invalid_argument);
    REQUIRE_THROWS_AS(make_model(A, Vector(vec(random_matrix(4, 1, 23))), 3, 4),
                      std::invalid_argument);
    Matrix bad = A;
    bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
    REQUIRE_THROWS_AS(make_model(bad, y, 3, 4), std::invalid_argument);
}

TEST_CASE("isotropic prewhitening rescales by sigma") {
    Matrix A = random_matrix(6, 8, 31);
    Vector y = vec(random_matrix(6, 1, 32));

    MeasurementModel scaled = prewhiten(A, y, NoiseSpec::isotropic(2.0), 2, 4);
    REQUIRE((scaled.Abar - A / 2.0).norm() <= 1e-15 * A.norm());
    REQUIRE((scaled.ybar - y / 2.0).norm() <= 1e-15 * y.norm());

    MeasurementModel unit = prewhiten(A, y, NoiseSpec::isotropic(1.0), 2, 4);
    REQUIRE(unit.Abar == A);
    REQUIRE(unit.ybar == y);

    MeasurementModel noiseless = prewhiten(A, y, NoiseSpec::isotropic(0.0), 2, 4);
    REQUIRE(noiseless.Abar == A);
    REQUIRE(noiseless.ybar == y);
}

TEST_CASE("colored prewhitening inverts the covariance square root") {
    const Index m = 7;
    Matrix G = random_matrix(m, m, 41);
    Matrix C = G * G.transpose() + 0.5 * Matrix::Identity(m, m);

    // Feeding the identity as the operator exposes the whitening matrix W.
    Matrix I = Matrix::Identity(m, m);
    Vector y = vec(random_matrix(m, 1, 42));
    MeasurementModel model = prewhiten(I, y, NoiseSpec::colored(C), 1, m);
    const Matrix& W = model.Abar;
    REQUIRE((W - W.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
    REQUIRE((W * C * W.transpose() - I).cwiseAbs().maxCoeff() <= 1e-10);
    REQUIRE((model.ybar - W * y).norm() <= 1e-13 * y.norm());
}

TEST_CASE("prewhitening rejects invalid covariance") {
    Matrix A = random_matrix(4, 6, 51);
    Vector y = vec(random_matrix(4, 1, 52));

    Matrix asym = random_matrix(4, 4, 53);
    REQUIRE_THROWS_AS(prewhiten(A, y, NoiseSpec::colored(asym), 2, 3), std::invalid_argument);

    Matrix G = random_matrix(4, 2, 54);
    Matrix singular = G * G.transpose();  // rank 2, not positive definite
    REQUIRE_THROWS_AS(prewhiten(A, y, NoiseSpec::colored(singular), 2, 3),
                      std::invalid_argument);

    Matrix wrong_size = Matrix::Identity(3, 3);
    REQUIRE_THROWS_AS(prewhiten(A, y, NoiseSpec::colored(wrong_size), 2, 3),
                      std::invalid_argument);
}

TEST_CASE("noise spec constructors validate input") {
    REQUIRE_THROWS_AS(NoiseSpec::isotropic(-1.0), std::invalid_argument);
    REQUIRE_THROWS_AS(NoiseSpec::colored(Matrix(random_matrix(3, 4, 61))),
                      std::invalid_argument);
}
