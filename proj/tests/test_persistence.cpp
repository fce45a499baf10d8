#include <cmath>

#include <doctest.h>

#include "perieig/config.hpp"
#include "perieig/persistence.hpp"
#include "support.hpp"

using namespace perieig;

namespace {

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

TEST_CASE("region case from the sign pattern of the constants") {
    CHECK(region_case(chain(0.1, 0.2, 0.3, 0.4, 0.5)) == 0);
    CHECK(region_case(chain(-0.5, -0.4, -0.3, -0.2, -0.1)) == 0);
    CHECK(region_case(chain(-1, 0.1, 0.2, 0.3, 0.4)) == 1);
    CHECK(region_case(chain(-1, -0.5, 0.2, 0.3, 0.4)) == 2);
    CHECK(region_case(chain(-1, -0.5, -0.3, 0.3, 0.4)) == 3);
    CHECK(region_case(chain(-1, -0.5, 0.3, -0.3, 0.4)) == 4);
    CHECK(region_case(chain(-1, -0.5, -0.4, -0.3, 0.4)) == 5);
}

TEST_CASE("assembled matrix is M plus the diagonal rates") {
    const auto cfg = load_config(testing::fixture("mutation_bounded.cfg"));
    const auto model = build_mutation_model(cfg);
    const auto p = assemble_problem(model);
    const double L = model.M.grid().length;
    for (int j : {0, 17, 100})
        for (double t : {0.0, 0.3}) {
            const double x = model.M.grid().x(j);
            const SmallMat a = p.A.eval(j, t), m = model.M.eval(j, t);
            CHECK(a(0, 0) == doctest::Approx(m(0, 0) + model.rates[0].eval_fourier(x, t, L)));
            CHECK(a(1, 1) == doctest::Approx(m(1, 1) + model.rates[1].eval_fourier(x, t, L)));
            CHECK(a(0, 1) == doctest::Approx(m(0, 1)));
        }
}

TEST_CASE("unbalanced mutation rows are rejected") {
    auto model = build_mutation_model(load_config(testing::fixture("mutation_bounded.cfg")));
    CHECK_NOTHROW(validate_mutation(model));
    model.M.set(0, 0, CoefficientEntry::constant(-0.5));
    CHECK_THROWS_AS(validate_mutation(model), Error);
    CHECK_THROWS_AS(build_mutation_model(load_config(testing::fixture("mutation_invalid.cfg"))), Error);
}

TEST_CASE("adding entries keeps Fourier form and sums values") {
    const SpatialGrid g{1.0, 11};
    const TimeGrid tg{16};
    const auto a = CoefficientEntry::fourier({{0.5, 1, 1, TimeMode::cosine}});
    const auto b = CoefficientEntry::constant(-2.0);
    const auto s = add_entries(a, b, g, tg);
    CHECK_FALSE(s.is_tabulated());
    CHECK(s.eval_fourier(0.3, 0.2, 1.0) ==
          doctest::Approx(a.eval_fourier(0.3, 0.2, 1.0) + b.eval_fourier(0.3, 0.2, 1.0)));
}

TEST_CASE("empty and full regions") {
    for (auto [name, verdict] : {std::pair{"mutation_empty.cfg", RegionVerdict::empty},
                                 std::pair{"mutation_full.cfg", RegionVerdict::full}}) {
        const auto model = build_mutation_model(load_config(testing::fixture(name)));
        const auto r = persistence_region(model);
        CHECK(r.verdict == verdict);
        CHECK_FALSE(r.curve);
        CHECK(r.case_index == 0);
    }
}

TEST_CASE("uniform death or growth on a balanced mutation matrix") {
    // mu(M) = 0, so every constant equals -c.
    for (auto [c, verdict] : {std::pair{-1.0, RegionVerdict::empty}, std::pair{1.0, RegionVerdict::full}}) {
        const std::string text = "[problem]\nn = 2\ndiffusion = 1, 1\n[grid]\nnodes = 21\nsteps = 32\n"
                                 "[mutation.1.1]\nterm = -1, 0, 0, const\n[mutation.1.2]\nterm = 1, 0, 0, const\n"
                                 "[mutation.2.2]\nterm = -1, 0, 0, const\n"
                                 "[rate.1]\nterm = " + std::to_string(c) + ", 0, 0, const\n"
                                 "[rate.2]\nterm = " + std::to_string(c) + ", 0, 0, const\n";
        const auto r = persistence_region(build_mutation_model(testing::parse(text)));
        CHECK(r.verdict == verdict);
        CHECK(r.constants.C_under == doctest::Approx(-c));
        CHECK(r.constants.C_bar == doctest::Approx(-c));
    }
}
