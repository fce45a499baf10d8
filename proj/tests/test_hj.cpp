#include <algorithm>
#include <cmath>

#include <doctest.h>

#include "perieig/hj.hpp"
#include "support.hpp"

using namespace perieig;

TEST_CASE("Lax-Friedrichs step is monotone under its CFL limit") {
    const auto p = testing::load_problem("generic.cfg");
    const auto c = limit_constants(p.A, p.time);
    const HamiltonianLattice H(p, gradient_bound(c, p.D));
    const double h = p.space().h(), theta = 0.7;
    const double dt = theta * h / H.alpha();
    const int n = p.space().nodes;
    std::vector<double> w(n), out0, out1;
    for (int j = 0; j < n; ++j) w[j] = 0.3 * std::sin(3.0 * p.space().x(j));
    lax_friedrichs_step(w, out0, 0.25, dt, theta, h, H, Execution::serial);
    for (int j : {0, n / 3, n - 1}) {
        auto up = w;
        up[j] += 1e-3;
        lax_friedrichs_step(up, out1, 0.25, dt, theta, h, H, Execution::serial);
        for (int k = 0; k < n; ++k) CHECK(out1[k] >= out0[k] - 1e-14);
    }
}

TEST_CASE("lattice reproduces the Hamiltonian between samples") {
    const auto p = testing::load_problem("generic.cfg");
    const HamiltonianLattice H(p, 4.0);
    double worst = 0.0;
    for (double q : {0.0, 0.37, 1.9, 3.3})
        for (int j : {0, 50, 200})
            for (double t : {0.0, 0.123, 0.61})
                worst = std::max(worst, std::abs(H(q, j, t) - hamiltonian(q, j, t, p.A, p.D)));
    CHECK(worst < 2e-3);
    CHECK(H(-1.1, 7, 0.3) == doctest::Approx(H(1.1, 7, 0.3)));
}

TEST_CASE("space-independent field: C equals minus the mean principal eigenvalue") {
    // Flat profiles stay flat, so the drift is the time average of mu(A(t)).
    const auto p = testing::load_problem("x_independent.cfg");
    const double expect = limit_constants(p.A, p.time).C_under;
    const ErgodicSolver solver(p, false);
    for (double theta : {0.3, 3.0}) {
        const auto r = solver.solve(theta);
        CHECK(r.status == ErgodicStatus::converged);
        CHECK(r.C == doctest::Approx(expect).epsilon(1e-4));
    }
}

TEST_CASE("time-independent field: C equals C_star for every theta") {
    const auto p = testing::load_problem("t_independent.cfg");
    const ErgodicSolver solver(p);
    const double c_star = solver.constants().C_star;
    for (double theta : {0.5, 4.0}) {
        const auto r = solver.solve(theta);
        CHECK(r.extrapolated);
        CHECK(std::abs(r.C - c_star) < 2e-3);
        CHECK(std::abs(r.C - c_star) <= std::abs(r.C_coarse - c_star) + 1e-6);
        CHECK(r.C <= solver.constants().C_bar + 1e-6);
    }
}

TEST_CASE("averaged critical value matches the closed form") {
    const auto p = testing::load_problem("t_independent.cfg");
    const ErgodicSolver solver(p);
    const auto avg = averaged_critical_value(p, &solver);
    CHECK(avg.C_star == doctest::Approx(solver.constants().C_star).epsilon(1e-12));
    CHECK(std::abs(avg.evolved - avg.C_star) < 2e-3);
}

TEST_CASE("stationary critical value is minus the largest nodal eigenvalue") {
    const auto p = testing::load_problem("t_independent.cfg");
    double mu = -1e300;
    for (int j = 0; j < p.space().nodes; ++j) mu = std::max(mu, perron(p.A.eval(j, 0.0)).value);
    CHECK(stationary_critical_value(p.A, 0.0) == doctest::Approx(-mu).epsilon(1e-12));
}

TEST_CASE("serial and parallel evolutions agree") {
    auto cfg = load_config(testing::fixture("generic.cfg"));
    cfg.space.nodes = 51;
    const auto p = build_problem(cfg);
    const ErgodicSolver serial(p, false, Execution::serial), parallel(p, false, Execution::parallel);
    ErgodicOptions a, b;
    a.execution = Execution::serial;
    b.execution = Execution::parallel;
    a.min_periods = b.min_periods = 4;
    const auto rs = serial.solve(1.0, a), rp = parallel.solve(1.0, b);
    CHECK(rs.C == rp.C);
    CHECK(rs.periods == rp.periods);
}

TEST_CASE("tiny theta falls back to the C_under limit") {
    const auto p = testing::load_problem("t_independent.cfg");
    const ErgodicSolver solver(p, false);
    const auto r = solver.solve_or_limit(1e-12);
    CHECK(r.status == ErgodicStatus::regime_limit);
    CHECK(r.C == solver.constants().C_under);
    CHECK_THROWS_AS(solver.solve(1e-12), Error);
}
