#include <cmath>
#include <numbers>

#include <doctest.h>

#include "perieig/grid.hpp"

using namespace perieig;

TEST_CASE("trapezoid weights integrate constants and linear functions exactly") {
    const SpatialGrid g{2.0, 41};
    const auto w = trapezoid_weights(g);
    double total = 0.0, first = 0.0;
    for (int j = 0; j < g.nodes; ++j) total += w[j], first += w[j] * g.x(j);
    CHECK(total == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(first == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("Neumann Laplacian is second-order accurate on cos(pi x)") {
    auto error = [](int nodes) {
        const SpatialGrid g{1.0, nodes};
        GridFunction f(1, nodes);
        for (int j = 0; j < nodes; ++j) f(0, j) = std::cos(std::numbers::pi * g.x(j));
        const auto lap = neumann_laplacian(f, g);
        double e = 0.0;
        for (int j = 0; j < nodes; ++j)
            e = std::max(e, std::abs(lap(0, j) + std::numbers::pi * std::numbers::pi * f(0, j)));
        return e;
    };
    const double ratio = error(51) / error(101);
    CHECK(ratio == doctest::Approx(4.0).epsilon(0.02));
}

TEST_CASE("Neumann Laplacian annihilates constants") {
    const SpatialGrid g{1.0, 11};
    const auto lap = neumann_laplacian(GridFunction(2, 11, 3.0), g);
    for (double v : lap.data()) CHECK(v == 0.0);
}

TEST_CASE("periodic time integral and endpoint mismatch flag") {
    const int M = 64;
    std::vector<double> s(M + 1);
    for (int m = 0; m <= M; ++m) s[m] = std::pow(std::sin(2 * std::numbers::pi * m / M), 2);
    const auto r = integrate_time(s);
    CHECK(r.value == doctest::Approx(0.5).epsilon(1e-14));
    CHECK_FALSE(r.periodicity_warning);
    s[M] += 0.1;
    CHECK(integrate_time(s).periodicity_warning);
}

TEST_CASE("central gradient vanishes at the mirror boundary") {
    const SpatialGrid g{1.0, 21};
    std::vector<double> f(21);
    for (int j = 0; j < 21; ++j) f[j] = g.x(j) * g.x(j);
    const auto d = gradient_central(f, g);
    CHECK(d.front() == 0.0);
    CHECK(d.back() == 0.0);
    CHECK(d[10] == doctest::Approx(1.0).epsilon(1e-12));
}
