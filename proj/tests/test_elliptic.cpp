#include <cmath>

#include <doctest.h>

#include "perieig/elliptic.hpp"
#include "support.hpp"

using namespace perieig;

namespace {

// Smallest real eigenvalue of the dense nonsymmetric operator
// -rho D Lap - B(x), unknowns ordered component-major.
double dense_oracle(const StaticField& B, double rho, const DiffusionMatrix& D, const SpatialGrid& g) {
    const int nodes = g.nodes, n = static_cast<int>(B.front().rows());
    const Eigen::MatrixXd lap = testing::dense_laplacian(nodes, g.h());
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n * nodes, n * nodes);
    for (int i = 0; i < n; ++i) {
        L.block(i * nodes, i * nodes, nodes, nodes) = -rho * D.d[i] * lap;
        for (int k = 0; k < n; ++k)
            for (int j = 0; j < nodes; ++j) L(i * nodes + j, k * nodes + j) -= B[j](i, k);
    }
    const Eigen::VectorXcd ev = L.eigenvalues();
    double lo = INFINITY;
    for (int k = 0; k < ev.size(); ++k) lo = std::min(lo, ev(k).real());
    return lo;
}

StaticField frozen(const Problem& p, double t) {
    StaticField b(p.space().nodes);
    for (int j = 0; j < p.space().nodes; ++j) b[j] = p.A.eval(j, t);
    return b;
}

}  // namespace

TEST_CASE("inverse iteration matches the dense eigenvalue") {
    auto cfg = load_config(testing::fixture("generic.cfg"));
    cfg.space.nodes = 61;
    const auto p = build_problem(cfg);
    for (double t : {0.0, 0.3})
        for (double rho : {1e-3, 0.1, 10.0}) {
            const auto B = frozen(p, t);
            const auto r = elliptic_principal(B, rho, p.D, p.space());
            CHECK(r.lambda == doctest::Approx(dense_oracle(B, rho, p.D, p.space())).epsilon(1e-9));
            // Round-off in L phi scales with the operator norm, about 4 rho max d / h^2.
            const double norm = 4.0 * rho * p.D.max() / (p.space().h() * p.space().h()) + 2.0;
            CHECK(r.residual < 1e-11 * norm);
            for (double v : r.eigenfunction.data()) CHECK(v > 0.0);
        }
}

TEST_CASE("constant coupling: lambda = -mu(B) for every rho") {
    const auto p = testing::load_problem("constant.cfg");
    const auto B = frozen(p, 0.0);
    for (double rho : {1e-4, 1.0, 100.0}) {
        const double norm = 4.0 * rho * p.D.max() / (p.space().h() * p.space().h()) + 2.0;
        CHECK(std::abs(elliptic_principal(B, rho, p.D, p.space()).lambda + 1.0) < 1e-13 * norm);
    }
}

TEST_CASE("warm start does not change the answer") {
    const auto p = testing::load_problem("levelset_a.cfg");
    const auto B0 = frozen(p, 0.2), B1 = frozen(p, 0.21);
    const auto first = elliptic_principal(B0, 1e-5, p.D, p.space());
    const auto warm = elliptic_principal(B1, 1e-5, p.D, p.space(), &first.eigenfunction);
    const auto cold = elliptic_principal(B1, 1e-5, p.D, p.space());
    CHECK(warm.lambda == doctest::Approx(cold.lambda).epsilon(1e-10));
}

TEST_CASE("rho below the floor is a regime error") {
    const auto p = testing::load_problem("constant.cfg");
    try {
        elliptic_principal(frozen(p, 0.0), 1e-10, p.D, p.space());
        FAIL("no error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::regime);
    }
}

TEST_CASE("lambda_under: serial warm-started and parallel cold solves agree") {
    auto cfg = load_config(testing::fixture("generic.cfg"));
    cfg.time.steps = 64;
    const auto p = build_problem(cfg);
    const auto s = lambda_under(p, 0.01, Execution::serial);
    const auto q = lambda_under(p, 0.01, Execution::parallel);
    for (size_t m = 0; m < s.frozen.size(); ++m) CHECK(s.frozen[m] == doctest::Approx(q.frozen[m]).epsilon(1e-10));
}

TEST_CASE("lambda_under and lambda_bar approach their limits in rho") {
    const auto p = testing::load_problem("generic.cfg");
    const auto c = limit_constants(p.A, p.time);
    CHECK(std::abs(lambda_under(p, 1e-6).value - c.C_under) < 5e-3);
    CHECK(std::abs(lambda_bar(p, 1e-6).lambda - c.C_star_plus) < 5e-3);
    CHECK(std::abs(lambda_bar(p, 1e4).lambda - c.C_bar) < 1e-3);
}
