#pragma once

#include <vector>

#include "perieig/coefficients.hpp"
#include "perieig/parallel.hpp"
#include "perieig/roots.hpp"

namespace perieig {

struct MonodromyResult {
    SmallMat fundamental;         // Phi(1) divided by exp(log_scale)
    double log_scale = 0.0;       // log of the factor stripped from Phi(1)
    double log_multiplier = 0.0;  // log of the principal Floquet multiplier
    SmallVec eigenvector;         // positive, unit 2-norm
    double h = 0.0;               // -omega * log_multiplier
    double residual = 0.0;        // |Phi v - mu v| on the rescaled fundamental matrix
    int steps = 0;
    int sweeps = 0;
};

/// Principal eigenvalue h of  omega phi' - A(t) phi = h phi  (period 1) from the
/// RK4 fundamental matrix and power iteration on Phi(1).
MonodromyResult ode_eigenvalue(const TimeMatrixFn& A_t, double omega, int steps);

struct OdeOptions {
    int steps = 4096;
    /// Raise the step count so that dt * |A| / omega stays below 1/16.
    bool auto_steps = true;
    Execution execution = Execution::parallel;
};

/// Steps used for a field whose entries are bounded by `norm`.
int ode_steps_for(double norm, double omega, const OdeOptions& opt);

/// Bound on the spectral radius of A over the sample grid.
double field_norm_bound(const MatrixField& A, const TimeGrid& time);

struct HUnderResult {
    double value = 0.0;
    std::vector<int> argmin;     // all nodes within 1e-9 of the minimum
    std::vector<double> per_node;
};

HUnderResult h_under(const MatrixField& A, double omega, const OdeOptions& opt = {});
double h_bar(const MatrixField& A, double omega, const OdeOptions& opt = {});

}  // namespace perieig
