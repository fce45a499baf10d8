#pragma once

#include <memory>
#include <vector>

#include "perieig/coefficients.hpp"
#include "perieig/parallel.hpp"

namespace perieig {

/// H(p, x_j, t) tabulated on |p| <= p_max (H is even in p) and a uniform time
/// lattice, read back by bilinear interpolation in (|p|, t).
class HamiltonianLattice {
public:
    HamiltonianLattice(const Problem& problem, double p_max, int p_points = 257, int time_nodes = 256,
                       Execution mode = Execution::parallel);
    /// Time-averaged lattice: a single time slice holding int_0^1 H dt.
    static HamiltonianLattice averaged(const HamiltonianLattice& source);

    double p_max() const { return p_max_; }
    int time_nodes() const { return time_nodes_; }
    /// Lipschitz bound of H in p, from finite differences over the lattice.
    double alpha() const { return alpha_; }

    double operator()(double p, int node, double t) const;

private:
    HamiltonianLattice() = default;
    double exact(double p, int node, double t) const;

    const Problem* problem_ = nullptr;
    int nodes_ = 0, half_ = 0, time_nodes_ = 0;
    double p_max_ = 0.0, dp_ = 0.0, alpha_ = 0.0;
    std::vector<float> values_;  // [time][node][k], p = k * dp
};

/// A priori gradient window 1 + 2 sqrt((C_bar - C_under + 1) / min d).
double gradient_bound(const LimitConstants& c, const DiffusionMatrix& D);

enum class ErgodicStatus { converged, oscillating, budget_exhausted, regime_limit };
const char* to_string(ErgodicStatus s);

struct ErgodicOptions {
    int min_periods = 8;
    long max_steps = 4'000'000;    // total time steps before giving up
    int window = 5;                // drifts that must agree
    double drift_tol = 1e-4;       // agreement, scaled by 1 + |C|
    int record_steps = 0;          // > 0: store U on that many time intervals of the last period
    Execution execution = Execution::serial;
};

struct ErgodicResult {
    double theta = 0.0;
    double C = 0.0;
    double C_coarse = 0.0, C_fine = 0.0;  // raw drifts when extrapolated
    bool extrapolated = false;
    GridFunction U;                // final profile, one component
    SpaceTimeField U_period;       // last period on record_steps + 1 time nodes, if requested
    std::vector<double> drifts;    // theta * per-period mean increments
    ErgodicStatus status = ErgodicStatus::budget_exhausted;
    double alpha = 0.0;
    double dt = 0.0;
    int periods = 0;
};

/// Long-time evolution of W_t = -(1/theta) H(W_x, x, t) by Lax-Friedrichs. W
/// drifts like (C / theta) t; the slope over the last half of the run gives C.
/// Throws a regime error when the CFL step would fall below 1e-8.
ErgodicResult ergodic_constant(double theta, const Problem& problem, const HamiltonianLattice& H,
                               const ErgodicOptions& opt = {});

/// As above, but a theta too small for direct evolution returns the theta -> 0
/// limit C_under with status regime_limit.
ErgodicResult ergodic_constant_or_limit(double theta, const Problem& problem, const HamiltonianLattice& H,
                                        const LimitConstants& constants, const ErgodicOptions& opt = {});

/// Runs the scheme on the problem grid and on a grid with h halved and
/// removes the first-order viscosity error: C = 2 C(h/2) - C(h). U and the
/// recorded period come from the problem grid.
class ErgodicSolver {
public:
    explicit ErgodicSolver(const Problem& problem, bool extrapolate = true, Execution mode = Execution::parallel);
    ErgodicSolver(const ErgodicSolver&) = delete;
    ErgodicSolver& operator=(const ErgodicSolver&) = delete;

    const HamiltonianLattice& lattice() const { return *coarse_; }
    const LimitConstants& constants() const { return constants_; }
    bool extrapolates() const { return fine_lattice_ != nullptr; }

    ErgodicResult solve(double theta, const ErgodicOptions& opt = {}) const;
    /// Regime errors become the theta -> 0 limit, as ergodic_constant_or_limit.
    ErgodicResult solve_or_limit(double theta, const ErgodicOptions& opt = {}) const;
    /// Drift of the autonomous scheme with the time-averaged Hamiltonian.
    ErgodicResult solve_averaged(const ErgodicOptions& opt = {}) const;

private:
    ErgodicResult combine(ErgodicResult coarse, const ErgodicResult& fine) const;

    const Problem* problem_;
    LimitConstants constants_;
    std::unique_ptr<Problem> fine_;
    std::unique_ptr<HamiltonianLattice> coarse_, fine_lattice_;
};

/// -max_j mu(A(x_j, t)).
double stationary_critical_value(const MatrixField& A, double t);

struct AveragedCritical {
    double C_star = 0.0;
    double evolved = 0.0;  // drift of the autonomous time-averaged scheme, if requested
    ErgodicStatus status = ErgodicStatus::converged;
};

/// C* from the closed form; with a solver, also the autonomous-scheme drift.
AveragedCritical averaged_critical_value(const Problem& problem, const ErgodicSolver* solver = nullptr,
                                         const ErgodicOptions& opt = {});

/// One Lax-Friedrichs step (exposed for the monotonicity test).
void lax_friedrichs_step(const std::vector<double>& w, std::vector<double>& out, double t, double dt,
                         double theta, double h, const HamiltonianLattice& H, Execution mode);

}  // namespace perieig
