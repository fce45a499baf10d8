#include <cmath>
#include <random>

#include <doctest.h>
#include <unsupported/Eigen/MatrixFunctions>

#include "perieig/banded.hpp"
#include "perieig/dct.hpp"
#include "perieig/roots.hpp"
#include "perieig/small_linalg.hpp"

using namespace perieig;

namespace {

SmallMat random_symmetric(int n, std::mt19937& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    SmallMat s(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) s(i, j) = s(j, i) = u(rng);
    return s;
}

}  // namespace

TEST_CASE("jacobi eigenvalues agree with a dense symmetric solver") {
    std::mt19937 rng(7);
    for (int n : {1, 2, 3, 5, 8}) {
        const SmallMat s = random_symmetric(n, rng);
        const Eigen::MatrixXd dense = s;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ref(dense);
        const auto got = jacobi_eigen(s);
        for (int k = 0; k < n; ++k) CHECK(got.values(k) == doctest::Approx(ref.eigenvalues()(k)).epsilon(1e-12));
        CHECK(largest_eigenvalue(s) == doctest::Approx(ref.eigenvalues()(n - 1)).epsilon(1e-12));
        // Columns are eigenvectors.
        const Eigen::MatrixXd V = got.vectors;
        CHECK((dense * V - V * got.values.asDiagonal().toDenseMatrix()).norm() < 1e-11);
    }
}

TEST_CASE("2x2 Perron value has the closed form") {
    SmallMat s(2, 2);
    s << 0.3, 0.7, 0.7, -1.1;
    const double expected = 0.5 * (0.3 - 1.1) + std::sqrt(0.25 * 1.4 * 1.4 + 0.49);
    CHECK(largest_eigenvalue(s) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("symmetric exponential matches the Pade matrix exponential") {
    std::mt19937 rng(11);
    for (int n : {2, 3, 4}) {
        const SmallMat s = random_symmetric(n, rng);
        const Eigen::MatrixXd ref = (0.7 * Eigen::MatrixXd(s)).exp();
        CHECK((Eigen::MatrixXd(sym_exp(s, 0.7)) - ref).cwiseAbs().maxCoeff() < 1e-13);
    }
}

TEST_CASE("band Cholesky solves like a dense LLT") {
    const int n = 40, bw = 2;
    BandedSymmetric a(n, bw);
    Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = std::max(0, i - bw); j <= i; ++j) {
            const double v = i == j ? 6.0 + 0.1 * i : -1.0 / (1 + i - j) + 0.01 * j;
            a.lower(i, j) = v;
            dense(i, j) = dense(j, i) = v;
        }
    Eigen::VectorXd b = Eigen::VectorXd::LinSpaced(n, -1.0, 2.0);
    std::vector<double> x(b.data(), b.data() + n);
    REQUIRE(cholesky_banded(a));
    cholesky_solve(a, x);
    const Eigen::VectorXd ref = dense.llt().solve(b);
    for (int i = 0; i < n; ++i) CHECK(x[i] == doctest::Approx(ref(i)).epsilon(1e-12));
}

TEST_CASE("band Cholesky reports an indefinite matrix") {
    BandedSymmetric a(3, 1);
    a.lower(0, 0) = 1.0;
    a.lower(1, 0) = 2.0;
    a.lower(1, 1) = 1.0;
    a.lower(2, 2) = 1.0;
    CHECK_FALSE(cholesky_banded(a));
}

TEST_CASE("DCT-I agrees with the defining sum") {
    const int n = 17;
    std::vector<double> x(n);
    for (int j = 0; j < n; ++j) x[j] = std::sin(0.3 * j) + 0.1 * j * j;
    std::vector<double> y = x;
    dct1_for(n)->apply(y.data());
    for (int k = 0; k < n; ++k) {
        double s = x[0] + (k % 2 ? -x[n - 1] : x[n - 1]);
        for (int j = 1; j < n - 1; ++j) s += 2.0 * x[j] * std::cos(M_PI * j * k / (n - 1));
        CHECK(y[k] == doctest::Approx(s).epsilon(1e-12));
    }
}

TEST_CASE("monotone inversion finds roots in linear and log coordinates") {
    const auto cube = [](double x) { return x * x * x; };
    CHECK(invert_monotone(cube, 2.0, 0.0, 3.0).x == doctest::Approx(std::cbrt(2.0)).epsilon(1e-8));
    const auto lg = [](double x) { return std::log(x); };
    const auto r = solve_monotone(lg, std::log(250.0), 1e-3, 1e4, BracketScale::logarithmic, 1e-12, 1e-12,
                                  std::log(1e-3), std::log(1e4));
    CHECK(r.x == doctest::Approx(250.0).epsilon(1e-9));
    CHECK(r.evaluations < 60);
}
