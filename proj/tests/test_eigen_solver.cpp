#include "argda/eigen_solver.hpp"

#include "support.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

using namespace argda;
using argda::testing::Gen;

namespace {

Matrix centring(int n) { return Matrix::Identity(n, n) - Matrix::Constant(n, n, 1.0 / n); }

Matrix spd(Gen& g, int n) {
    const Matrix b = g.matrix(n, n);
    return b * b.transpose() + 0.5 * Matrix::Identity(n, n);
}

}  // namespace

TEST_CASE("zero coefficient matrix and zero lambda give S1 = 0") {
    Gen g(41);
    const Matrix x = g.matrix(3, 5);
    CHECK(assemble_pencil<double>(x, Matrix::Zero(5, 5), 0.0).s1.isZero(0));
}

TEST_CASE("lambda alone gives S1 = I") {
    Gen g(42);
    const Matrix x = g.matrix(3, 5);
    CHECK(assemble_pencil<double>(x, Matrix::Zero(5, 5), 1.0).s1 == Matrix::Identity(3, 3));
}

TEST_CASE("S2 is the centred scatter of a 2x2 input") {
    Matrix x(2, 2);
    x << 1, 0, 0.5, 1;
    Matrix h(2, 2);
    h << 0.5, -0.5, -0.5, 0.5;
    const Matrix want = x * h * x.transpose();
    CHECK((assemble_pencil<double>(x, Matrix::Zero(2, 2), 0.0).s2 - want).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("pencil matches direct products on random inputs") {
    Gen g(43);
    for (int trial = 0; trial < 20; ++trial) {
        const int l = g.integer(1, 6), n = g.integer(2, 12);
        const Matrix x = g.matrix(l, n);
        const Matrix m = g.symmetric(n), gr = g.symmetric(n);
        const double lambda = g.real(0, 2);
        const auto p = assemble_pencil<double>(x, m, gr, lambda);
        const Matrix s1 = x * (m + gr) * x.transpose() + lambda * Matrix::Identity(l, l);
        const Matrix s2 = x * centring(n) * x.transpose();
        CHECK((p.s1 - s1).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((p.s2 - s2).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(p.s1 == p.s1.transpose());
        CHECK(p.s2 == p.s2.transpose());
    }
}

TEST_CASE("non-finite pencil names the offending matrix") {
    Matrix x = Matrix::Ones(2, 3);
    Matrix m = Matrix::Zero(3, 3);
    m(0, 0) = std::numeric_limits<double>::infinity();
    try {
        assemble_pencil<double>(x, m, 0.0);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("S1") != std::string::npos);
    }
    x(0, 0) = std::numeric_limits<double>::infinity();
    try {
        assemble_pencil<double>(x, Matrix::Zero(3, 3), 0.0);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("S") != std::string::npos);
    }
}

TEST_CASE("pencil rejects inconsistent sizes and negative lambda") {
    const Matrix x = Matrix::Ones(2, 3);
    CHECK_THROWS_AS(assemble_pencil<double>(x, Matrix::Zero(4, 4), 0.0), Error);
    CHECK_THROWS_AS(assemble_pencil<double>(x, Matrix::Zero(3, 3), Matrix::Zero(2, 2), 0.0), Error);
    CHECK_THROWS_AS(assemble_pencil<double>(x, Matrix::Zero(3, 3), -1.0), Error);
}

TEST_CASE("diagonal pencil picks the smaller coordinate") {
    Matrix s1 = Matrix::Zero(2, 2);
    s1.diagonal() << 1, 2;
    const auto p = solve_generalized<double>(s1, Matrix::Identity(2, 2), 1);
    CHECK(p.eigenvalues(0) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(p.a.col(0).isApprox(Vector::Unit(2, 0), 1e-8));
}

TEST_CASE("identity pencil gives unit eigenvalues and orthonormal columns") {
    const auto p = solve_generalized<double>(Matrix::Identity(2, 2), Matrix::Identity(2, 2), 2);
    CHECK(p.eigenvalues.isApproxToConstant(1.0, 1e-8));
    CHECK((p.a.transpose() * p.a - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("random 5x5 pencils match a full generalized decomposition") {
    Gen g(44);
    for (int trial = 0; trial < 20; ++trial) {
        const Matrix s1 = g.symmetric(5), s2 = spd(g, 5);
        const auto p = solve_generalized<double>(s1, s2, 5);
        Matrix b = s2;
        b.diagonal().array() += p.ridge;
        Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> oracle(s1, b);
        CHECK((p.eigenvalues - oracle.eigenvalues()).cwiseAbs().maxCoeff() < 1e-8);
        for (int j = 0; j < 5; ++j) {
            const Vector a = p.a.col(j);
            const double phi = p.eigenvalues(j);
            CHECK((s1 * a - phi * b * a).norm() <= 1e-8 * (s1.norm() + std::abs(phi) * s2.norm()));
            Eigen::Index arg = 0;
            a.cwiseAbs().maxCoeff(&arg);
            CHECK(a(arg) > 0);
        }
        CHECK((p.a.transpose() * b * p.a - Matrix::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("eigenvalues ascend and Rayleigh quotients are nondecreasing") {
    Gen g(45);
    for (int trial = 0; trial < 20; ++trial) {
        const int dim = g.integer(2, 8);
        const Matrix s1 = g.symmetric(dim), s2 = spd(g, dim);
        const auto p = solve_generalized<double>(s1, s2, g.integer(1, dim));
        for (Eigen::Index j = 1; j < p.a.cols(); ++j) {
            CHECK(p.eigenvalues(j) >= p.eigenvalues(j - 1));
            const double prev = p.a.col(j - 1).dot(s1 * p.a.col(j - 1));
            const double cur = p.a.col(j).dot(s1 * p.a.col(j));
            CHECK(cur >= prev - 1e-10);
        }
    }
}

TEST_CASE("rank-deficient S2 is regularized") {
    Gen g(46);
    const Matrix x = g.matrix(6, 3);  // l > n makes X H X' singular
    const auto pencil = assemble_pencil<double>(x, Matrix::Zero(3, 3), 0.1);
    const auto p = solve_generalized(pencil.s1, pencil.s2, 2);
    CHECK(p.ridge > 0);
    CHECK(p.a.allFinite());
}

TEST_CASE("solve is deterministic") {
    Gen g(47);
    const Matrix s1 = g.symmetric(6), s2 = spd(g, 6);
    const auto a = solve_generalized<double>(s1, s2, 3);
    const auto b = solve_generalized<double>(s1, s2, 3);
    CHECK(a.a == b.a);
    CHECK(a.eigenvalues == b.eigenvalues);
}

TEST_CASE("subspace dimension outside the pencil is rejected") {
    const Matrix i = Matrix::Identity(3, 3);
    CHECK_THROWS_AS(solve_generalized<double>(i, i, 0), Error);
    CHECK_THROWS_AS(solve_generalized<double>(i, i, 4), Error);
    CHECK_THROWS_AS(solve_generalized<double>(i, Matrix::Identity(2, 2), 1), Error);
}

TEST_CASE("zero S2 fails with a diagnostic") {
    try {
        solve_generalized<double>(Matrix::Identity(2, 2), Matrix::Zero(2, 2), 1);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("Cholesky") != std::string::npos);
    }
}

TEST_CASE("projection with the identity returns the features") {
    Gen g(48);
    const Matrix x = g.matrix(3, 7);
    Projection<double> p;
    p.a = Matrix::Identity(3, 3);
    CHECK(project(x, p) == x);
    p.a = Vector::Unit(3, 0);
    CHECK(project(x, p) == x.row(0));
}

TEST_CASE("projection matches a naive triple loop") {
    Gen g(49);
    const Matrix x = g.matrix(4, 9);
    Projection<double> p;
    p.a = g.matrix(4, 2);
    const Matrix z = project(x, p);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 9; ++j) {
            double s = 0;
            for (int r = 0; r < 4; ++r) s += p.a(r, i) * x(r, j);
            CHECK(z(i, j) == doctest::Approx(s).epsilon(1e-14));
        }
    p.a = g.matrix(3, 2);
    CHECK_THROWS_AS(project(x, p), Error);
}
