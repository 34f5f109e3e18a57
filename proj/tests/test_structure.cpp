#include "lowrank/structure.hpp"

#include "oracles.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace lowrank;

namespace {

Vector random_vector(Index n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vector v(n);
    for (Index i = 0; i < n; ++i) {
        v(i) = gauss(rng);
    }
    return v;
}

Matrix random_matrix(Index rows, Index cols, std::uint64_t seed) {
    Vector v = random_vector(rows * cols, seed);
    return mat(v, rows, cols);
}

}  // namespace

TEST_CASE("hankel layout is constant along anti-diagonals") {
    LinearStructure s = hankel_structure(2, 3);
    REQUIRE(s.p == 4);
    Vector h(4);
    h << 1.0, 2.0, 3.0, 4.0;
    Matrix X = structure_apply(s, h);
    Matrix expected(2, 3);
    expected << 1.0, 2.0, 3.0,
                2.0, 3.0, 4.0;
    REQUIRE(X == expected);
}

TEST_CASE("toeplitz layout is constant along diagonals") {
    LinearStructure s = toeplitz_structure(2, 2);
    REQUIRE(s.p == 3);
    Vector h(3);
    h << 5.0, 6.0, 7.0;
    Matrix X = structure_apply(s, h);
    Matrix expected(2, 2);
    expected << 6.0, 5.0,
                7.0, 6.0;
    REQUIRE(X == expected);
}

TEST_CASE("column-reversed toeplitz equals hankel with the same parameters") {
    const std::pair<Index, Index> shapes[] = {{3, 5}, {4, 4}, {6, 2}};
    for (auto [n1, n2] : shapes) {
        Vector h = random_vector(n1 + n2 - 1, 17 * n1 + n2);
        Matrix T = structure_apply(toeplitz_structure(n1, n2), h);
        Matrix H = structure_apply(hankel_structure(n1, n2), h);
        REQUIRE((T.rowwise().reverse() - H).cwiseAbs().maxCoeff() <= 1e-15);
    }
}

TEST_CASE("unstructured family is the identity on vec") {
    LinearStructure s = unstructured(3, 4);
    REQUIRE(s.p == 12);
    Vector h = random_vector(12, 3);
    REQUIRE(structure_apply(s, h) == mat(h, 3, 4));
    REQUIRE(structure_fit(s, mat(h, 3, 4)) == h);
}

TEST_CASE("fit then apply is the identity on parameters") {
    for (const LinearStructure& s :
         {hankel_structure(4, 6), toeplitz_structure(5, 3), unstructured(3, 3)}) {
        Vector h = random_vector(s.p, 7 + s.p);
        Vector h_back = structure_fit(s, structure_apply(s, h));
        REQUIRE((h_back - h).cwiseAbs().maxCoeff() <= 1e-14);
    }
}

TEST_CASE("fit matches the generic least-squares oracle") {
    for (const LinearStructure& s :
         {hankel_structure(5, 4), toeplitz_structure(3, 6), unstructured(4, 2)}) {
        for (std::uint64_t seed : {100, 101, 102}) {
            Matrix X = random_matrix(s.n1, s.n2, seed + s.p);
            Vector h = structure_fit(s, X);
            Vector h_ref = oracle::structure_fit_ref(s, X);
            REQUIRE((h - h_ref).cwiseAbs().maxCoeff() <= 1e-12);
        }
    }
}

TEST_CASE("projection is idempotent and nonexpansive") {
    for (const LinearStructure& s : {hankel_structure(6, 5), toeplitz_structure(4, 7)}) {
        Matrix X = random_matrix(s.n1, s.n2, 201 + s.p);
        Matrix Y = random_matrix(s.n1, s.n2, 202 + s.p);
        Matrix PX = structure_project(s, X);
        REQUIRE((structure_project(s, PX) - PX).cwiseAbs().maxCoeff() <= 1e-13);
        REQUIRE((structure_project(s, X) - structure_project(s, Y)).norm() <=
                (X - Y).norm() + 1e-13);
    }
}

TEST_CASE("projection is linear") {
    LinearStructure s = hankel_structure(5, 5);
    Matrix X = random_matrix(5, 5, 301);
    Matrix Y = random_matrix(5, 5, 302);
    Matrix lhs = structure_project(s, 2.5 * X - 0.75 * Y);
    Matrix rhs = 2.5 * structure_project(s, X) - 0.75 * structure_project(s, Y);
    REQUIRE((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("projection residual is orthogonal to the family") {
    LinearStructure s = toeplitz_structure(6, 4);
    Matrix X = random_matrix(6, 4, 401);
    Matrix resid = X - structure_project(s, X);
    Vector h = random_vector(s.p, 402);
    double inner = (resid.array() * structure_apply(s, h).array()).sum();
    REQUIRE(std::abs(inner) <= 1e-12 * resid.norm() * h.norm());
}

TEST_CASE("basis columns synthesize unit parameter vectors") {
    for (const LinearStructure& s : {hankel_structure(3, 4), unstructured(2, 3)}) {
        Matrix B = structure_basis(s);
        REQUIRE(B.rows() == s.n1 * s.n2);
        REQUIRE(B.cols() == s.p);
        Vector h = random_vector(s.p, 501);
        REQUIRE((B * h - vec(structure_apply(s, h))).cwiseAbs().maxCoeff() <= 1e-14);
    }
}

TEST_CASE("structure maps validate shapes") {
    LinearStructure s = hankel_structure(3, 3);
    REQUIRE_THROWS_AS(structure_apply(s, Vector(random_vector(4, 601))), std::invalid_argument);
    REQUIRE_THROWS_AS(structure_fit(s, Matrix(random_matrix(3, 4, 602))), std::invalid_argument);
    REQUIRE_THROWS_AS(hankel_structure(0, 3), std::invalid_argument);
}
