#include <cmath>

#include <doctest.h>
#include <unsupported/Eigen/MatrixFunctions>

#include "perieig/elliptic.hpp"
#include "perieig/floquet_ode.hpp"
#include "perieig/parabolic.hpp"
#include "perieig/verify.hpp"
#include "support.hpp"

using namespace perieig;

namespace {

SolveOptions plain() {
    SolveOptions o;
    o.eigenfunction = false;
    return o;
}

}  // namespace

TEST_CASE("direct heat kernel equals the exponential of the Neumann Laplacian") {
    // The Pade exponential is only accurate relative to the matrix norm, so the
    // comparison is absolute here; the tails are checked separately below.
    const int nodes = 21;
    for (double s : {0.05, 1.0, 7.5}) {
        const auto K = neumann_heat_kernel(nodes, s);
        const Eigen::MatrixXd ref = (s * testing::dense_laplacian(nodes, 1.0)).exp();
        double worst = 0.0;
        for (int j = 0; j < nodes; ++j) {
            double row = 0.0;
            for (int k = 0; k < nodes; ++k) {
                worst = std::max(worst, std::abs(K[j * nodes + k] - ref(j, k)));
                row += K[j * nodes + k];
                CHECK(K[j * nodes + k] > 0.0);
            }
            CHECK(row == doctest::Approx(1.0).epsilon(1e-13));
        }
        CHECK(worst < 1e-13);
    }
}

TEST_CASE("heat kernel keeps relative accuracy deep in the tails") {
    // Far from the diagonal the entries are near 1e-200; a transform would
    // return round-off there. Compare with the leading term of exp(-2s) I_n(2s).
    const int nodes = 201;
    const double s = 0.5;
    const auto K = neumann_heat_kernel(nodes, s);
    const int n = 60;
    double lead = std::exp(-2 * s);
    for (int q = 1; q <= n; ++q) lead *= s / q;  // (2s/2)^n / n!
    const double v = K[100 * nodes + 100 + n];
    CHECK(v > 0.0);
    CHECK(v / lead == doctest::Approx(1.0).epsilon(1e-2));
}

TEST_CASE("constant matrix: lambda = -1 on the kernel and the transform paths") {
    auto cfg = load_config(testing::fixture("constant.cfg"));
    for (int nodes : {201, 1201}) {
        cfg.space.nodes = nodes;
        const auto p = build_problem(cfg);
        for (double w : {0.1, 10.0})
            CHECK(principal_eigenvalue(p, w, 1.0, plain()).lambda == doctest::Approx(-1.0).epsilon(1e-10));
    }
}

TEST_CASE("x-independent field: lambda equals the ODE value for every rho") {
    const auto p = testing::load_problem("x_independent.cfg");
    for (double w : {0.2, 3.0}) {
        const double h = ode_eigenvalue(at_node(p.A, 0), w, 8192).h;
        for (double rho : {0.01, 10.0})
            CHECK(principal_eigenvalue(p, w, rho, plain()).lambda == doctest::Approx(h).epsilon(1e-6));
    }
}

TEST_CASE("t-independent field: splitting error is second order in the step") {
    // With no time dependence only the E K E splitting separates lambda from
    // the elliptic eigenvalue; halving tau should cut that gap by four.
    const auto p = testing::load_problem("t_independent.cfg");
    StaticField B(p.space().nodes);
    for (int j = 0; j < p.space().nodes; ++j) B[j] = p.A.eval(j, 0.0);
    for (double rho : {0.05, 2.0}) {
        const double ref = elliptic_principal(B, rho, p.D, p.space()).lambda;
        auto o = plain();
        o.adaptive_steps = false;
        o.steps = 64;
        const double e1 = principal_eigenvalue(p, 0.5, rho, o).lambda - ref;
        o.steps = 128;
        const double e2 = principal_eigenvalue(p, 0.5, rho, o).lambda - ref;
        CHECK(std::abs(e2) < 1e-3);
        CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.05));
        // Default adaptive policy keeps the gap near its 1e-4 target.
        CHECK(std::abs(principal_eigenvalue(p, 5.0, rho, plain()).lambda - ref) < 1e-4);
    }
}

TEST_CASE("separable fixture against the Galerkin reference") {
    const auto p = testing::load_problem("separable.cfg");
    const auto ref = read_reference(testing::fixture("separable.ref"));
    const double w = std::stod(ref.at("omega")), rho = std::stod(ref.at("rho"));
    CHECK(std::abs(principal_eigenvalue(p, w, rho, plain()).lambda - std::stod(ref.at("lambda"))) < 5e-5);
}

TEST_CASE("eigenfunction is positive and periodic; adjoint pairs to one") {
    const auto p = testing::load_problem("generic.cfg");
    SolveOptions o;
    auto r = principal_eigenvalue(p, 1.0, 0.3, o);
    REQUIRE(r.phi.time_nodes() == r.steps + 1);
    for (const auto& slice : r.phi.slices)
        for (double v : slice.data()) CHECK(v > 0.0);
    CHECK(r.periodicity_defect < 1e-8);
    adjoint_eigenpair(p, r, o);
    CHECK(r.pairing == doctest::Approx(1.0).epsilon(1e-10));
    const auto id = energy_identity_residual(p, r);
    CHECK(id.lhs > 0.0);
    CHECK(id.relative < 1e-4);
}

TEST_CASE("period map is positive and linear") {
    const auto p = testing::load_problem("generic.cfg");
    const PeriodMap P(p, 0.5, 0.2, 256);
    std::vector<double> u(P.size(), 0.0), v(P.size(), 0.0);
    u[3] = 1.0;
    v[P.size() - 5] = 1.0;
    std::vector<double> pu = u, pv = v, sum(P.size());
    const double lu = P.apply(pu), lv = P.apply(pv);
    for (double x : pu) CHECK(x >= 0.0);
    for (int k = 0; k < P.size(); ++k) sum[k] = u[k] + 2.0 * v[k];
    std::vector<double> ps = sum;
    const double ls = P.apply(ps);
    double worst = 0.0;
    for (int k = 0; k < P.size(); ++k) {
        // apply leaves its argument sup-normalized; |u + 2v|_sup = 2.
        const double expect = std::exp(lu) * pu[k] + 2.0 * std::exp(lv) * pv[k];
        worst = std::max(worst, std::abs(2.0 * std::exp(ls) * ps[k] - expect));
    }
    CHECK(worst < 1e-12 * std::exp(ls));
    std::vector<double> neg(P.size(), 0.0);
    neg[0] = -1.0;
    CHECK_THROWS(P.apply(neg));
}

TEST_CASE("adaptive steps grow as omega shrinks; sweep steps keep M omega") {
    const auto p = testing::load_problem("generic.cfg");
    int prev = 1 << 30;
    for (double w : {0.001, 0.01, 0.1, 1.0}) {
        const int m = effective_steps(p, w, 1.0, 512, 1e-4);
        CHECK(m <= prev);
        CHECK(m >= 512);
        prev = m;
    }
    const int anchor = effective_steps(p, 0.01, 5.0, 512, 1e-4);
    for (double w : {0.01, 0.013, 0.05, 0.2, 1.0}) {
        const int m = sweep_steps(p, w, 0.01, 5.0, 512, 1e-4);
        CHECK(m * w >= anchor * 0.01 - 1e-9);
        CHECK(m >= 512);
    }
}

TEST_CASE("invalid parameters are range errors") {
    const auto p = testing::load_problem("constant.cfg");
    CHECK_THROWS_AS(principal_eigenvalue(p, 0.0, 1.0), Error);
    CHECK_THROWS_AS(principal_eigenvalue(p, 1.0, -1.0), Error);
}
