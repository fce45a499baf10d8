#include <cmath>
#include <numbers>

#include <doctest.h>

#include "perieig/coefficients.hpp"

using namespace perieig;

namespace {

constexpr double pi = std::numbers::pi;

MatrixField scalar_field(std::vector<FourierTerm> terms, int nodes = 101) {
    MatrixField A(1, SpatialGrid{1.0, nodes});
    A.set(0, 0, CoefficientEntry::fourier(std::move(terms)));
    return A;
}

}  // namespace

TEST_CASE("Fourier entries evaluate the documented basis") {
    const auto e = CoefficientEntry::fourier({{0.5, 2, 0, TimeMode::constant}, {1.5, 1, 3, TimeMode::sine}});
    const double x = 0.37, t = 0.61, L = 2.0;
    const double expected = 0.5 * std::cos(2 * pi * x / L) + 1.5 * std::cos(pi * x / L) * std::sin(6 * pi * t);
    CHECK(e.eval_fourier(x, t, L) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("limit constants of a field with a moving maximum") {
    // a = cos(pi x) cos(2 pi t): the maximizer jumps between the ends.
    const auto A = scalar_field({{1.0, 1, 1, TimeMode::cosine}});
    const TimeGrid time{512};
    const auto c = limit_constants(A, time);
    CHECK(c.C_under == doctest::Approx(-2.0 / pi).epsilon(1e-5));
    CHECK(std::abs(c.C_star) < 1e-12);
    CHECK(std::abs(c.C_star_plus) < 1e-12);
    CHECK(std::abs(c.C_under_plus) < 1e-12);
    CHECK(std::abs(c.C_bar) < 1e-12);
    CHECK(c.ordering_violation() < 1e-12);
}

TEST_CASE("limit constants with separate space and time parts") {
    // a = 0.4 cos(pi x) + 0.3 cos(2 pi t) + 0.1: max_x is attained at x = 0 for every t.
    const auto A = scalar_field({{0.4, 1, 0, TimeMode::constant}, {0.3, 0, 1, TimeMode::cosine},
                                 {0.1, 0, 0, TimeMode::constant}});
    const auto c = limit_constants(A, TimeGrid{256});
    CHECK(c.C_under == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(c.C_star == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(c.C_star_plus == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(c.C_under_plus == doctest::Approx(-0.1).epsilon(1e-12));
    CHECK(c.C_bar == doctest::Approx(-0.1).epsilon(1e-12));
}

TEST_CASE("constant symmetric matrix: all five constants equal -mu") {
    MatrixField A(2, SpatialGrid{1.0, 21});
    A.set(0, 1, CoefficientEntry::constant(1.0));
    const auto c = limit_constants(A, TimeGrid{64});
    for (double v : {c.C_under, c.C_star, c.C_star_plus, c.C_under_plus, c.C_bar})
        CHECK(v == doctest::Approx(-1.0).epsilon(1e-14));
}

TEST_CASE("Hamiltonian is the top eigenvalue of diag(d p^2) + A") {
    SmallMat a(2, 2);
    a << 0.2, 0.5, 0.5, -0.4;
    const DiffusionMatrix D{{1.0, 0.5}};
    for (double p : {0.0, 0.7, -1.3}) {
        const double t11 = 0.2 + p * p, t22 = -0.4 + 0.5 * p * p;
        const double expected = 0.5 * (t11 + t22) + std::hypot(0.5 * (t11 - t22), 0.5);
        CHECK(hamiltonian(p, a, D) == doctest::Approx(expected).epsilon(1e-14));
    }
}

TEST_CASE("validation rejects negative coupling and decoupled species") {
    MatrixField neg(2, SpatialGrid{1.0, 11});
    neg.set(0, 1, CoefficientEntry::fourier({{0.2, 0, 0, TimeMode::constant}, {0.5, 1, 0, TimeMode::constant}}));
    const auto r = validate(neg, TimeGrid{16});
    CHECK_FALSE(r.ok);
    REQUIRE(r.witness);
    CHECK(r.witness->value < 0.0);

    MatrixField split(3, SpatialGrid{1.0, 11});
    split.set(0, 1, CoefficientEntry::constant(1.0));
    const auto s = validate(split, TimeGrid{16});
    CHECK_FALSE(s.ok);
    CHECK(s.components.size() == 2);

    MatrixField fine(2, SpatialGrid{1.0, 11});
    fine.set(0, 1, CoefficientEntry::constant(1.0));
    CHECK(validate(fine, TimeGrid{16}).ok);
}

TEST_CASE("time reversal flips t") {
    const auto A = scalar_field({{1.0, 1, 1, TimeMode::sine}}, 11);
    const auto R = A.time_reversed();
    for (int j : {0, 3, 10})
        for (double t : {0.1, 0.35})
            CHECK(R.eval_entry(0, 0, j, t) == doctest::Approx(A.eval_entry(0, 0, j, 1.0 - t)).epsilon(1e-12));
}

TEST_CASE("regrid interpolates tabulated entries linearly") {
    Table tab{3, 2, {0.0, 1.0, 0.0, 2.0, 3.0, 2.0, 4.0, 5.0, 4.0}};
    MatrixField A(1, SpatialGrid{1.0, 3});
    A.set(0, 0, CoefficientEntry::tabulated(tab));
    const auto B = A.regrid(SpatialGrid{1.0, 5});
    CHECK(B.eval_entry(0, 0, 1, 0.0) == doctest::Approx(1.0));
    CHECK(B.eval_entry(0, 0, 3, 0.0) == doctest::Approx(3.0));
    CHECK(B.eval_entry(0, 0, 4, 0.5) == doctest::Approx(5.0));
    CHECK_THROWS(A.regrid(SpatialGrid{2.0, 5}));
}
