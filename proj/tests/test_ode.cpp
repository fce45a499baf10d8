#include <cmath>
#include <numbers>

#include <doctest.h>
#include <unsupported/Eigen/MatrixFunctions>

#include "perieig/floquet_ode.hpp"
#include "support.hpp"

using namespace perieig;

namespace {

constexpr double pi = std::numbers::pi;

// Principal eigenvalue from a midpoint product of exact matrix exponentials,
// omega phi' = A(t) phi: independent of the RK4 monodromy in the library.
double product_oracle(const TimeMatrixFn& A, double omega, int steps) {
    const int n = static_cast<int>(A(0.0).rows());
    Eigen::MatrixXd P = Eigen::MatrixXd::Identity(n, n);
    double log_scale = 0.0;
    for (int m = 0; m < steps; ++m) {
        const Eigen::MatrixXd a = A((m + 0.5) / steps);
        P = (a / (omega * steps)).exp() * P;
        const double s = P.cwiseAbs().maxCoeff();
        P /= s;
        log_scale += std::log(s);
    }
    const auto ev = P.eigenvalues();
    double rho = 0.0;
    for (int k = 0; k < n; ++k) rho = std::max(rho, std::abs(ev(k)));
    return -omega * (std::log(rho) + log_scale);
}

}  // namespace

TEST_CASE("scalar ODE: h is minus the time average") {
    const TimeMatrixFn a = [](double t) {
        SmallMat m(1, 1);
        m(0, 0) = 0.3 + std::cos(2 * pi * t) + 0.5 * std::sin(4 * pi * t);
        return m;
    };
    for (double w : {0.05, 1.0, 20.0}) CHECK(ode_eigenvalue(a, w, 4096).h == doctest::Approx(-0.3).epsilon(1e-9));
}

TEST_CASE("constant matrix: h = -mu") {
    const TimeMatrixFn a = [](double) {
        SmallMat m(2, 2);
        m << 0.0, 1.0, 1.0, 0.0;
        return m;
    };
    CHECK(ode_eigenvalue(a, 0.7, 512).h == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("time-dependent 2x2 system against an exponential-product oracle") {
    const TimeMatrixFn a = [](double t) {
        SmallMat m(2, 2);
        m << std::cos(2 * pi * t), 0.6 + 0.3 * std::sin(2 * pi * t), 0.6 + 0.3 * std::sin(2 * pi * t),
            -0.5 - std::cos(2 * pi * t);
        return m;
    };
    for (double w : {0.2, 1.0, 5.0}) {
        const double ref = product_oracle(a, w, 20000);
        const auto got = ode_eigenvalue(a, w, 4096);
        CHECK(got.h == doctest::Approx(ref).epsilon(1e-7));
        CHECK(got.eigenvector.minCoeff() > 0.0);
    }
}

TEST_CASE("h_under minimizes over nodes and h_bar uses the spatial average") {
    const auto p = testing::load_problem("generic.cfg");
    OdeOptions opt;
    const auto under = h_under(p.A, 0.5, opt);
    double lo = INFINITY;
    for (double v : under.per_node) lo = std::min(lo, v);
    CHECK(under.value == lo);
    const double ref = product_oracle(spatial_average(p.A), 0.5, 4000);
    CHECK(h_bar(p.A, 0.5, opt) == doctest::Approx(ref).epsilon(1e-6));
}

TEST_CASE("serial and parallel node sweeps agree bitwise") {
    const auto p = testing::load_problem("generic.cfg");
    OdeOptions serial, parallel;
    serial.execution = Execution::serial;
    parallel.execution = Execution::parallel;
    CHECK(h_under(p.A, 0.3, serial).per_node == h_under(p.A, 0.3, parallel).per_node);
}

TEST_CASE("h is nondecreasing in omega") {
    // The generic fixture has a time-independent spatial mean, so use a field that moves.
    const auto p = testing::load_problem("x_independent.cfg");
    double prev = -INFINITY;
    for (double w : {0.01, 0.1, 1.0, 10.0, 100.0}) {
        const double h = h_bar(p.A, w);
        CHECK(h >= prev - 1e-9);
        prev = h;
    }
}
