#pragma once

#include <span>
#include <vector>

namespace perieig {

/// Uniform node-centred grid on [0, L]; node j sits at x = j*h.
struct SpatialGrid {
    double length = 1.0;
    int nodes = 201;

    double h() const { return length / (nodes - 1); }
    double x(int j) const { return j * h(); }
    void validate() const;
};

/// Uniform grid on one period [0, 1); M steps, M + 1 nodes with t_M = 1.
struct TimeGrid {
    int steps = 512;

    double dt() const { return 1.0 / steps; }
    double t(int m) const { return static_cast<double>(m) / steps; }
    void validate() const;
};

/// Vector valued samples on a spatial grid, stored component-major.
class GridFunction {
public:
    GridFunction() = default;
    GridFunction(int components, int nodes, double fill = 0.0);

    int components() const { return components_; }
    int nodes() const { return nodes_; }

    double& operator()(int i, int j) { return data_[static_cast<size_t>(i) * nodes_ + j]; }
    double operator()(int i, int j) const { return data_[static_cast<size_t>(i) * nodes_ + j]; }

    std::span<double> component(int i) {
        return {data_.data() + static_cast<size_t>(i) * nodes_, static_cast<size_t>(nodes_)};
    }
    std::span<const double> component(int i) const {
        return {data_.data() + static_cast<size_t>(i) * nodes_, static_cast<size_t>(nodes_)};
    }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    double max_abs() const;

private:
    int components_ = 0;
    int nodes_ = 0;
    std::vector<double> data_;
};

/// Space-time samples: one GridFunction per time node t_0 .. t_M.
struct SpaceTimeField {
    std::vector<GridFunction> slices;

    int time_nodes() const { return static_cast<int>(slices.size()); }
};

/// Trapezoid quadrature weights on the spatial grid.
std::vector<double> trapezoid_weights(const SpatialGrid& grid);

/// Second difference with mirror (homogeneous Neumann) boundary rows.
GridFunction neumann_laplacian(const GridFunction& f, const SpatialGrid& grid);

/// Centred first difference; zero at the boundary nodes by symmetry.
GridFunction gradient_central(const GridFunction& f, const SpatialGrid& grid);
std::vector<double> gradient_central(std::span<const double> f, const SpatialGrid& grid);

double integrate_space(std::span<const double> f, const SpatialGrid& grid);
std::vector<double> integrate_space(const GridFunction& f, const SpatialGrid& grid);

struct TimeIntegral {
    double value = 0.0;
    double endpoint_mismatch = 0.0;
    bool periodicity_warning = false;
};

/// Trapezoid rule over one period from the M + 1 samples at t_0 .. t_M.
/// The endpoints should agree; a mismatch beyond `tol` (relative) is flagged.
TimeIntegral integrate_time(std::span<const double> samples, double tol = 1e-9);

}  // namespace perieig
