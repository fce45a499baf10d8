#include "perieig/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "perieig/error.hpp"

namespace perieig {

void SpatialGrid::validate() const {
    if (!(length > 0.0) || !std::isfinite(length))
        fail(ErrorKind::dimension, "domain length must be positive");
    if (nodes < 3) fail(ErrorKind::dimension, "spatial grid needs at least 3 nodes");
}

void TimeGrid::validate() const {
    if (steps < 2) fail(ErrorKind::dimension, "time grid needs at least 2 steps");
}

GridFunction::GridFunction(int components, int nodes, double fill)
    : components_(components), nodes_(nodes),
      data_(static_cast<size_t>(components) * nodes, fill) {
    if (components < 1 || nodes < 1) fail(ErrorKind::dimension, "empty grid function");
}

double GridFunction::max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
}

std::vector<double> trapezoid_weights(const SpatialGrid& grid) {
    std::vector<double> w(grid.nodes, grid.h());
    w.front() *= 0.5;
    w.back() *= 0.5;
    return w;
}

static void check_nodes(int have, const SpatialGrid& grid) {
    grid.validate();
    if (have != grid.nodes)
        fail(ErrorKind::dimension, "grid function has " + std::to_string(have) +
                                       " nodes, grid has " + std::to_string(grid.nodes));
}

GridFunction neumann_laplacian(const GridFunction& f, const SpatialGrid& grid) {
    check_nodes(f.nodes(), grid);
    const int n = grid.nodes;
    const double inv_h2 = 1.0 / (grid.h() * grid.h());
    GridFunction out(f.components(), n);
    for (int i = 0; i < f.components(); ++i) {
        out(i, 0) = 2.0 * (f(i, 1) - f(i, 0)) * inv_h2;
        out(i, n - 1) = 2.0 * (f(i, n - 2) - f(i, n - 1)) * inv_h2;
        for (int j = 1; j < n - 1; ++j)
            out(i, j) = (f(i, j + 1) - 2.0 * f(i, j) + f(i, j - 1)) * inv_h2;
    }
    return out;
}

std::vector<double> gradient_central(std::span<const double> f, const SpatialGrid& grid) {
    check_nodes(static_cast<int>(f.size()), grid);
    const int n = grid.nodes;
    const double inv_2h = 0.5 / grid.h();
    std::vector<double> g(n, 0.0);
    for (int j = 1; j < n - 1; ++j) g[j] = (f[j + 1] - f[j - 1]) * inv_2h;
    return g;
}

GridFunction gradient_central(const GridFunction& f, const SpatialGrid& grid) {
    GridFunction out(f.components(), f.nodes());
    for (int i = 0; i < f.components(); ++i) {
        auto g = gradient_central(f.component(i), grid);
        std::copy(g.begin(), g.end(), out.component(i).begin());
    }
    return out;
}

double integrate_space(std::span<const double> f, const SpatialGrid& grid) {
    check_nodes(static_cast<int>(f.size()), grid);
    double s = 0.5 * (f.front() + f.back());
    for (size_t j = 1; j + 1 < f.size(); ++j) s += f[j];
    return s * grid.h();
}

std::vector<double> integrate_space(const GridFunction& f, const SpatialGrid& grid) {
    std::vector<double> out(f.components());
    for (int i = 0; i < f.components(); ++i) out[i] = integrate_space(f.component(i), grid);
    return out;
}

TimeIntegral integrate_time(std::span<const double> samples, double tol) {
    if (samples.size() < 3) fail(ErrorKind::dimension, "time integral needs at least 3 samples");
    const size_t m = samples.size() - 1;
    double s = 0.5 * (samples.front() + samples.back());
    double scale = 0.0;
    for (size_t k = 1; k < m; ++k) s += samples[k];
    for (double v : samples) scale = std::max(scale, std::abs(v));
    TimeIntegral r;
    r.value = s / static_cast<double>(m);
    r.endpoint_mismatch = std::abs(samples.back() - samples.front());
    r.periodicity_warning = r.endpoint_mismatch > tol * std::max(1.0, scale);
    return r;
}

}  // namespace perieig
