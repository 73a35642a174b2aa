#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "clime/matrix.hpp"
#include "clime/simulation.hpp"
#include "support/oracles.hpp"

using clime::Matrix;

TEST_CASE("matmul basics", "[linalg]") {
    Matrix a = Matrix::from_rows({{1, 2}, {3, 4}});
    Matrix ones = Matrix::from_rows({{1}, {1}});
    Matrix r = clime::matmul(a, ones);
    CHECK(r(0, 0) == 3.0);
    CHECK(r(1, 0) == 7.0);

    Matrix i3 = Matrix::identity(3);
    clime::Rng rng(11);
    Matrix b = oracle::random_matrix(3, 5, rng);
    Matrix ib = clime::matmul(i3, b);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 5; ++j) CHECK(ib(i, j) == b(i, j));

    CHECK_THROWS_AS(clime::matmul(b, b), clime::DimensionMismatch);
}

TEST_CASE("matmul matches triple-loop oracle", "[linalg]") {
    clime::Rng rng(42);
    Matrix a = oracle::random_matrix(5, 4, rng);
    Matrix b = oracle::random_matrix(4, 3, rng);
    Matrix c = clime::matmul(a, b);
    Matrix expect = oracle::matmul_triple_loop(a, b);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 3; ++j) CHECK(std::abs(c(i, j) - expect(i, j)) < 1e-12);
}

TEST_CASE("cholesky on simple cases", "[linalg]") {
    auto f = clime::cholesky(Matrix::identity(4));
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) CHECK(f.lower(i, j) == (i == j ? 1.0 : 0.0));

    Matrix a = Matrix::from_rows({{4, 2}, {2, 3}});
    auto g = clime::cholesky(a);
    CHECK(g.lower(0, 0) == Catch::Approx(2.0));
    CHECK(g.lower(1, 0) == Catch::Approx(1.0));
    CHECK(g.lower(1, 1) == Catch::Approx(std::sqrt(2.0)));
    CHECK(g.lower(0, 1) == 0.0);
}

TEST_CASE("cholesky rejections", "[linalg]") {
    // model-1 precision is PD
    CHECK_NOTHROW(clime::cholesky(clime::model1_precision(10)));

    // model-3 minus 0.6 I has a -0.1 eigenvalue
    Matrix bad = clime::model3_precision(5);
    for (int i = 0; i < 5; ++i) bad(i, i) -= 0.6;
    CHECK(oracle::min_eigenvalue(bad) < 0.0);
    CHECK_THROWS_AS(clime::cholesky(bad), clime::NotPositiveDefinite);

    Matrix asym = Matrix::from_rows({{1, 0.5}, {0.2, 1}});
    CHECK_THROWS_AS(clime::cholesky(asym), clime::NotSymmetric);
}

TEST_CASE("cholesky round-trips random SPD matrices", "[linalg]") {
    clime::Rng rng(7);
    for (int p : {3, 20, 80, 200}) {
        Matrix a = oracle::random_spd(p, rng);
        auto f = clime::cholesky(a);
        for (int i = 0; i < p; ++i) CHECK(f.lower(i, i) > 0.0);
        Matrix rec = clime::matmul(f.lower, f.lower.transpose());
        CHECK(clime::frobenius_norm(rec - a) <= 1e-10 * clime::frobenius_norm(a));
    }
}

TEST_CASE("solve_spd", "[linalg]") {
    clime::Rng rng(3);
    Matrix b = oracle::random_matrix(4, 2, rng);
    Matrix x = clime::solve_spd(Matrix::identity(4), b);
    for (size_t k = 0; k < x.data().size(); ++k) CHECK(x.data()[k] == b.data()[k]);

    Matrix d = Matrix::from_rows({{2, 0}, {0, 4}});
    Matrix rhs = Matrix::from_rows({{1}, {1}});
    Matrix sol = clime::solve_spd(d, rhs);
    CHECK(sol(0, 0) == Catch::Approx(0.5));
    CHECK(sol(1, 0) == Catch::Approx(0.25));

    Matrix a6 = oracle::random_spd(6, rng);
    Matrix b6 = oracle::random_matrix(6, 3, rng);
    Matrix x6 = clime::solve_spd(a6, b6);
    CHECK(clime::frobenius_norm(clime::matmul(a6, x6) - b6) <= 1e-8 * clime::frobenius_norm(b6));
}

TEST_CASE("log_det", "[linalg]") {
    CHECK(clime::log_det(Matrix::identity(6)) == 0.0);
    CHECK(clime::log_det(Matrix::from_rows({{2, 0}, {0, 3}})) == Catch::Approx(std::log(6.0)));

    // model-3 p=5 has eigenvalues {3, 0.5 x4}
    const double expect = std::log(3.0 * 0.5 * 0.5 * 0.5 * 0.5);
    CHECK(clime::log_det(clime::model3_precision(5)) == Catch::Approx(expect).epsilon(1e-10));
}

TEST_CASE("spectral norm basics", "[linalg]") {
    CHECK(clime::spectral_norm(Matrix::identity(5)) == Catch::Approx(1.0));
    CHECK(clime::spectral_norm(Matrix::from_rows({{3, 0}, {0, -5}})) == Catch::Approx(5.0));
    CHECK(clime::spectral_norm(Matrix(4, 4)) == 0.0);
}

TEST_CASE("spectral norm matches Jacobi oracle on symmetric matrices", "[linalg]") {
    clime::Rng rng(19);
    for (int rep = 0; rep < 5; ++rep) {
        Matrix a = oracle::random_symmetric(8, rng);
        const double expect = oracle::max_abs_eigenvalue(a);
        auto res = clime::spectral_norm_detail(a);
        CHECK(res.converged);
        CHECK(std::abs(res.value - expect) < 1e-8);
    }
}

TEST_CASE("elementwise and matrix norms", "[linalg]") {
    Matrix z(3, 3);
    CHECK(clime::frobenius_norm(z) == 0.0);
    CHECK(clime::elementwise_inf_norm(z) == 0.0);
    CHECK(clime::elementwise_l1_norm(z) == 0.0);

    Matrix i3 = Matrix::identity(3);
    CHECK(clime::matrix_l1_norm(i3) == 1.0);
    CHECK(clime::frobenius_norm(i3) == Catch::Approx(std::sqrt(3.0)));
    CHECK(clime::elementwise_inf_norm(i3) == 1.0);
    CHECK(clime::elementwise_l1_norm(i3) == 3.0);

    CHECK(clime::matrix_l1_norm(Matrix::from_rows({{1, -2}, {3, 4}})) == 6.0);

    clime::Rng rng(23);
    Matrix a = oracle::random_matrix(7, 7, rng);
    CHECK(clime::matrix_l1_norm(a) == Catch::Approx(oracle::matrix_l1_double_loop(a)));
    Matrix b = oracle::random_matrix(5, 5, rng);
    CHECK(clime::frobenius_norm(b) == Catch::Approx(oracle::frobenius_double_loop(b)));
    CHECK(clime::elementwise_inf_norm(b) == Catch::Approx(oracle::inf_double_loop(b)));
    CHECK(clime::elementwise_l1_norm(b) == Catch::Approx(oracle::l1_double_loop(b)));
}

TEST_CASE("norm inequalities hold on random matrices", "[linalg][property]") {
    clime::Rng rng(31);
    for (int rep = 0; rep < 20; ++rep) {
        const int p = 2 + static_cast<int>(rng.next_below(8));
        Matrix a = oracle::random_matrix(p, p, rng);
        const double inf = clime::elementwise_inf_norm(a);
        const double spec = clime::spectral_norm(a);
        const double l1 = clime::matrix_l1_norm(a);
        const double l1t = clime::matrix_l1_norm(a.transpose());
        const double fro = clime::frobenius_norm(a);
        CHECK(inf <= spec + 1e-9);
        CHECK(spec <= std::sqrt(l1 * l1t) + 1e-9);
        CHECK(fro * fro <= p * l1 * inf + 1e-9);

        Matrix s = oracle::random_symmetric(p, rng);
        CHECK(clime::spectral_norm(s) <= clime::matrix_l1_norm(s) + 1e-9);
    }
}

TEST_CASE("extreme eigenvalues by bisection match Jacobi", "[linalg]") {
    clime::Rng rng(37);
    for (int rep = 0; rep < 4; ++rep) {
        Matrix a = oracle::random_symmetric(9, rng);
        CHECK(clime::min_eigenvalue_sym(a) ==
              Catch::Approx(oracle::min_eigenvalue(a)).margin(1e-9));
        CHECK(clime::max_eigenvalue_sym(a) ==
              Catch::Approx(oracle::max_eigenvalue(a)).margin(1e-9));
    }
}
