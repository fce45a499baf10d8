#include "perieig/floquet_ode.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <omp.h>

#include "perieig/error.hpp"

namespace perieig {

void set_thread_count(int threads) {
    if (threads > 0) omp_set_num_threads(threads);
}

int thread_count() { return omp_get_max_threads(); }

namespace {

// Power iteration on a positive matrix. Squares the matrix whenever progress
// stalls so that multipliers with ratio close to 1 still separate quickly.
SmallVec perron_power(const SmallMat& phi, int& sweeps) {
    const int n = static_cast<int>(phi.rows());
    SmallMat b = phi;
    SmallVec v = SmallVec::Ones(n) / std::sqrt(static_cast<double>(n));
    sweeps = 0;
    int since_square = 0;
    while (sweeps < 10000) {
        SmallVec w = b * v;
        const double norm = w.norm();
        if (!(norm > 0.0) || !std::isfinite(norm))
            fail(ErrorKind::convergence, "monodromy power iteration lost the iterate");
        w /= norm;
        ++sweeps;
        const double change = (w - v).cwiseAbs().maxCoeff();
        v = w;
        if (change <= 1e-15) return v;
        if (++since_square == 20) {
            b = b * b;
            b /= b.cwiseAbs().maxCoeff();
            since_square = 0;
        }
    }
    std::ostringstream msg;
    msg << "monodromy power iteration did not converge, residual "
        << (phi * v - v.dot(phi * v) * v).norm();
    fail(ErrorKind::convergence, msg.str());
}

}  // namespace

MonodromyResult ode_eigenvalue(const TimeMatrixFn& A_t, double omega, int steps) {
    if (!(omega > 0.0)) fail(ErrorKind::range, "omega must be positive");
    if (steps < 1) fail(ErrorKind::dimension, "ODE needs at least one step");
    MonodromyResult r;
    const SmallMat a0 = A_t(0.0);
    const int n = static_cast<int>(a0.rows());
    const double dt = 1.0 / steps;
    const double c = dt / omega;

    SmallMat phi = SmallMat::Identity(n, n);
    SmallMat a_start = a0;
    double log_scale = 0.0;
    for (int s = 0; s < steps; ++s) {
        const double t = s * dt;
        const SmallMat a_mid = A_t(t + 0.5 * dt);
        const SmallMat a_end = A_t(t + dt);
        const SmallMat k1 = a_start * phi;
        const SmallMat k2 = a_mid * (phi + 0.5 * c * k1);
        const SmallMat k3 = a_mid * (phi + 0.5 * c * k2);
        const SmallMat k4 = a_end * (phi + c * k3);
        phi += (c / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        const double m = phi.cwiseAbs().maxCoeff();
        if (!(m > 0.0) || !std::isfinite(m)) fail(ErrorKind::step_size, "RK4 monodromy blew up; use more steps");
        phi /= m;
        log_scale += std::log(m);
        a_start = a_end;
    }

    r.fundamental = phi;
    r.log_scale = log_scale;
    r.steps = steps;
    r.eigenvector = perron_power(phi, r.sweeps);
    const SmallVec pv = phi * r.eigenvector;
    const double mu = r.eigenvector.dot(pv);
    if (!(mu > 0.0)) fail(ErrorKind::positivity, "principal multiplier is not positive");
    r.residual = (pv - mu * r.eigenvector).norm();
    r.log_multiplier = std::log(mu) + log_scale;
    r.h = -omega * r.log_multiplier;
    return r;
}

double field_norm_bound(const MatrixField& A, const TimeGrid& time) {
    double bound = 0.0;
    for (int j = 0; j < A.grid().nodes; ++j)
        for (int m = 0; m < time.steps; ++m)
            bound = std::max(bound, A.eval(j, time.t(m)).cwiseAbs().rowwise().sum().maxCoeff());
    return bound;
}

int ode_steps_for(double norm, double omega, const OdeOptions& opt) {
    if (!opt.auto_steps) return opt.steps;
    const double need = std::ceil(16.0 * norm / omega);
    const double capped = std::min(need, 4.0e6);
    return std::max(opt.steps, static_cast<int>(capped));
}

HUnderResult h_under(const MatrixField& A, double omega, const OdeOptions& opt) {
    const int nodes = A.grid().nodes;
    const int steps = ode_steps_for(field_norm_bound(A, TimeGrid{64}), omega, opt);
    HUnderResult r;
    r.per_node.assign(nodes, 0.0);
    for_each_index(nodes, opt.execution, [&](int j) {
        r.per_node[j] = ode_eigenvalue([&](double t) { return A.eval(j, t); }, omega, steps).h;
    });
    r.value = *std::min_element(r.per_node.begin(), r.per_node.end());
    for (int j = 0; j < nodes; ++j)
        if (r.per_node[j] <= r.value + 1e-9) r.argmin.push_back(j);
    return r;
}

double h_bar(const MatrixField& A, double omega, const OdeOptions& opt) {
    const int steps = ode_steps_for(field_norm_bound(A, TimeGrid{64}), omega, opt);
    // Tabulate the spatial mean at the RK4 stage times once; it is the costly part.
    std::vector<SmallMat> table(2 * steps + 1);
    for_each_index(2 * steps + 1, opt.execution,
                   [&](int s) { table[s] = spatial_average(A, 0.5 * s / steps); });
    auto lookup = [&](double t) {
        const long s = std::lround(t * 2.0 * steps);
        return table[static_cast<size_t>(std::clamp(s, 0L, 2L * steps))];
    };
    return ode_eigenvalue(lookup, omega, steps).h;
}

}  // namespace perieig
