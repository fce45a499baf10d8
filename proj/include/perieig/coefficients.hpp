#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "perieig/grid.hpp"
#include "perieig/small_linalg.hpp"

namespace perieig {

enum class TimeMode { constant, cosine, sine };

/// c * cos(k pi x / L) * {1, cos(2 pi m t), sin(2 pi m t)}
struct FourierTerm {
    double c = 0.0;
    int k = 0;
    int m = 0;
    TimeMode mode = TimeMode::constant;

    bool operator==(const FourierTerm&) const = default;
};

/// Node-by-time table; column m holds t_m = m / steps, column `steps` repeats column 0.
struct Table {
    int nodes = 0;
    int steps = 0;
    std::vector<double> values;  // row-major, nodes x (steps + 1)

    double at(int j, int m) const { return values[static_cast<size_t>(j) * (steps + 1) + m]; }
    bool operator==(const Table&) const = default;
};

class CoefficientEntry {
public:
    CoefficientEntry() = default;

    static CoefficientEntry constant(double c);
    static CoefficientEntry fourier(std::vector<FourierTerm> terms);
    static CoefficientEntry tabulated(Table table);

    bool is_tabulated() const { return table_.has_value(); }
    const std::vector<FourierTerm>& terms() const { return terms_; }
    const Table& table() const { return *table_; }

    /// True when the entry is structurally zero (no term carries weight).
    bool structurally_zero() const;
    bool time_independent() const;
    bool space_independent() const;

    double eval_fourier(double x, double t, double length) const;

    bool operator==(const CoefficientEntry&) const = default;

private:
    std::vector<FourierTerm> terms_;
    std::optional<Table> table_;
};

/// Symmetric n x n coefficient field A(x, t) tied to a spatial grid.
class MatrixField {
public:
    MatrixField() = default;
    MatrixField(int n, SpatialGrid grid);

    int size() const { return n_; }
    const SpatialGrid& grid() const { return grid_; }

    /// Zero-based indices; (i, j) and (j, i) refer to the same stored entry.
    void set(int i, int j, CoefficientEntry entry);
    const CoefficientEntry& entry(int i, int j) const;

    SmallMat eval(int node, double t) const;
    double eval_entry(int i, int j, int node, double t) const;

    /// Same coefficients on another grid of equal length; tables are interpolated
    /// linearly in x.
    MatrixField regrid(const SpatialGrid& grid) const;
    /// A(x, -t): drives the adjoint (backward) problem forward in time.
    MatrixField time_reversed() const;
    bool reversed() const { return reversed_; }

    bool time_independent() const;
    bool space_independent() const;

private:
    int index(int i, int j) const;
    void cache_spatial_factors();

    int n_ = 0;
    SpatialGrid grid_{};
    bool reversed_ = false;
    std::vector<CoefficientEntry> entries_;  // packed upper triangle
    // cos(k pi x_j / L) for every term of every entry, node-major per term.
    std::vector<std::vector<double>> spatial_factors_;
};

struct DiffusionMatrix {
    std::vector<double> d;

    int size() const { return static_cast<int>(d.size()); }
    double min() const;
    double max() const;
    void validate(int n) const;
};

struct Problem {
    MatrixField A;
    DiffusionMatrix D;
    TimeGrid time{};

    const SpatialGrid& space() const { return A.grid(); }
    int components() const { return A.size(); }
    void validate() const;
};

struct PerronPair {
    double value = 0.0;
    SmallVec vector;
    double residual = 0.0;
};

/// Largest eigenvalue and nonnegative unit eigenvector; validates its input.
PerronPair perron(const SmallMat& s);

/// H(p, x_j, t) = largest eigenvalue of diag(d_i p^2) + A(x_j, t).
double hamiltonian(double p, int node, double t, const MatrixField& A, const DiffusionMatrix& D);
double hamiltonian(double p, const SmallMat& a, const DiffusionMatrix& D);

using StaticField = std::vector<SmallMat>;  // one matrix per node
using TimeMatrixFn = std::function<SmallMat(double)>;

StaticField temporal_average(const MatrixField& A, const TimeGrid& time);
SmallMat spatial_average(const MatrixField& A, double t);
TimeMatrixFn spatial_average(const MatrixField& A);
SmallMat full_average(const MatrixField& A, const TimeGrid& time);

/// A(x_j, .) as a function of time.
TimeMatrixFn at_node(const MatrixField& A, int node);

struct LimitConstants {
    double C_under = 0.0;       // -int max_x mu(A) dt
    double C_star = 0.0;        // -max_x int mu(A) dt
    double C_star_plus = 0.0;   // -max_x mu(A hat)
    double C_under_plus = 0.0;  // -int mu(A bar) dt
    double C_bar = 0.0;         // -mu(A hat bar)
    int argmax_node_star = 0;
    int argmax_node_star_plus = 0;

    /// Largest violation of the ordering chain, 0 when it holds.
    double ordering_violation() const;
};

LimitConstants limit_constants(const MatrixField& A, const TimeGrid& time);

struct Witness {
    int i = 0, j = 0, node = 0;
    double t = 0.0;
    double value = 0.0;
};

struct ValidationReport {
    bool ok = true;
    std::string message;
    std::optional<Witness> witness;
    std::vector<std::vector<int>> components;  // connected components of the support graph
};

ValidationReport validate(const MatrixField& A, const TimeGrid& time);

}  // namespace perieig
