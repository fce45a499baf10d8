#include <cmath>

#include <doctest.h>

#include "perieig/levelset.hpp"
#include "support.hpp"

using namespace perieig;

namespace {

// A_hat(x) + cos(2 pi t) I: lambda depends on rho only, so level sets are vertical.
const char* kAdditive = R"(
[problem]
n = 2
diffusion = 1, 0.5
[grid]
nodes = 61
steps = 64
[entry.1.1]
term = 1.0, 1, 0, const
term = 1.0, 0, 1, cos
[entry.2.2]
term = -1.0, 0, 0, const
term = 1.0, 0, 1, cos
[entry.1.2]
term = 1.0, 0, 0, const
)";

LimitConstants chain(double a, double b, double c, double d, double e) {
    LimitConstants k;
    k.C_under = a;
    k.C_star = b;
    k.C_star_plus = c;
    k.C_under_plus = d;
    k.C_bar = e;
    return k;
}

}  // namespace

TEST_CASE("classification by the position of ell") {
    const auto two = chain(-4, -3, -2, -1, 0);    // C_star_plus < C_under_plus
    CHECK(classify(two, -3.5) == CurveType::type1i);
    CHECK(classify(two, -2.5) == CurveType::type1ii);
    CHECK(classify(two, -1.5) == CurveType::type2);
    CHECK(classify(two, -0.5) == CurveType::type4);
    const auto three = chain(-4, -3, -1, -2, 0);  // reversed pair
    CHECK(classify(three, -1.5) == CurveType::type3);
    CHECK(classify(three, -0.5) == CurveType::type4);
    CHECK(std::string(to_string(CurveType::type1ii)) != std::string(to_string(CurveType::type1i)));
}

TEST_CASE("separability residual vanishes only for additive time dependence") {
    const auto sep = build_problem(testing::parse(kAdditive));
    CHECK(separability_residual(sep, 0.1) < 1e-12);
    const auto gen = testing::load_problem("generic.cfg");
    CHECK(separability_residual(gen, 0.1) > 1e-3);
}

TEST_CASE("additive field: constants collapse and the level set is a vertical line") {
    const auto p = build_problem(testing::parse(kAdditive));
    const SpectralOracle o(p);
    const auto& c = o.constants();
    CHECK(c.C_under == doctest::Approx(c.C_star).epsilon(1e-9));
    CHECK(c.C_star_plus == doctest::Approx(c.C_star).epsilon(1e-9));
    CHECK(c.C_under_plus == doctest::Approx(c.C_bar).epsilon(1e-9));
    CHECK(c.C_star == doctest::Approx(-std::sqrt(2.0)).epsilon(1e-9));
    CHECK(c.C_bar == doctest::Approx((1 - std::sqrt(5.0)) / 2).epsilon(1e-9));

    const auto curve = trace_level_set(o, -1.0);
    CHECK(curve.type == CurveType::vertical_line);
    REQUIRE(curve.rho_ell);
    REQUIRE(curve.rho_under_ell);
    CHECK(std::abs(*curve.rho_ell - *curve.rho_under_ell) <= 1e-5 * *curve.rho_ell);
    CHECK(curve.passed());
    for (const auto& s : curve.samples) CHECK(s.lambda_check == doctest::Approx(-1.0).epsilon(1e-4));
}

TEST_CASE("levels outside the constant range or on a separatrix are refused") {
    const auto p = build_problem(testing::parse(kAdditive));
    const SpectralOracle o(p);
    CHECK_THROWS_AS(trace_level_set(o, -2.0), Error);
    CHECK_THROWS_AS(trace_level_set(o, 0.0), Error);
    CHECK_THROWS_AS(trace_level_set(o, o.constants().C_bar - 1e-4), Error);
}

TEST_CASE("oracle caches values and inverts h_under") {
    const auto p = testing::load_problem("x_independent.cfg");
    const SpectralOracle o(p);
    const double a = o.lambda(0.7, 0.2);
    const int n = o.evaluations();
    CHECK(o.lambda(0.7, 0.2) == a);
    CHECK(o.evaluations() == n);
    const double h = o.h_under(2.0);
    const auto inv = o.h_under_inverse(h);
    REQUIRE(inv);
    CHECK(*inv == doctest::Approx(2.0).epsilon(1e-5));
    CHECK_FALSE(o.h_under_inverse(o.constants().C_bar + 1.0));
}
