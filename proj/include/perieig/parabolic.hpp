#pragma once

#include <memory>
#include <string>
#include <vector>

#include "perieig/coefficients.hpp"
#include "perieig/dct.hpp"

namespace perieig {

/// States visited during one application of the period map. States are stored
/// sup-normalized; log_scale[m] is the log of the factor removed up to step m.
struct Trajectory {
    int components = 0;
    int nodes = 0;
    std::vector<double> states;  // (M + 1) blocks of components * nodes
    std::vector<double> log_scale;

    const double* state(int m) const {
        return states.data() + static_cast<size_t>(m) * components * nodes;
    }
};

/// exp(s Lap) for the mirror-Neumann second difference on `nodes` points with
/// unit spacing, row-major. Built from the modified Bessel walk kernel folded
/// onto the interval, so every entry is positive and relatively accurate, even
/// far in the tails where a transform would leave only round-off.
std::vector<double> neumann_heat_kernel(int nodes, double s);

/// Period map of  omega u_t = rho D u_xx + A(x, t) u  over one unit of t.
///
/// Each of the M steps is the Strang composition E K E where E multiplies node
/// by node with exp(tau/2 A(x_j, t_m + dt/2)) and K is the exact discrete heat
/// semigroup exp(tau rho d_i Lap_h); tau = dt / omega. K is a dense positive
/// kernel on grids up to 1025 nodes (exponentially small tails survive, which
/// matters at small omega) and a DCT-I otherwise.
/// Every factor is entrywise nonnegative, so the map preserves positivity, and
/// the map built on A(x, -t) is exactly its adjoint in the trapezoid inner product.
class PeriodMap {
public:
    PeriodMap(const Problem& problem, double omega, double rho, int steps, bool time_reversed = false);

    int steps() const { return steps_; }
    int components() const { return n_; }
    int nodes() const { return nodes_; }
    int size() const { return n_ * nodes_; }
    double omega() const { return omega_; }
    double rho() const { return rho_; }

    /// u <- P u, returning log(|P u|_sup / |u|_sup). u is left sup-normalized.
    /// Component-major layout (component i, node j) at i * nodes + j.
    double apply(std::vector<double>& u, Trajectory* trajectory = nullptr) const;
    /// Same linear map on a vector of any sign, normalized by max |u|.
    double apply_signed(std::vector<double>& u) const;

private:
    struct Kernel {
        std::vector<double> values;    // row-major nodes x nodes
        std::vector<int> first, count;  // nonzero band of each row
    };

    double advance(std::vector<double>& u, Trajectory* trajectory, bool is_signed) const;
    void coupling_factors(int m, double* out) const;
    void couple(const double* g, double* u) const;

    MatrixField field_;
    int n_ = 0, nodes_ = 0, steps_ = 0;
    double omega_ = 0.0, rho_ = 0.0, tau_ = 0.0;
    std::shared_ptr<const Dct1> dct_;
    std::vector<double> heat_;      // per component, per DCT mode (normalization folded in)
    std::vector<Kernel> kernels_;   // direct heat kernels, empty on the DCT path
    std::vector<int> kernel_of_;                // component -> kernel index
    std::vector<double> cached_;    // steps * nodes * n * n, empty when too large
};

/// Adaptive step policy. Starting from `base`, M is doubled (up to 2^14) until
/// tau |A| <= 1 and the splitting-error estimate
///   tau * V * min(1, pi^2 rho tau) / 4 <= step_tol,
/// with tau = 1 / (M omega) and V the largest spatial variance of A over a period.
/// When diffusion equilibrates within a step the E K E composition sees the
/// spatial mean of exp(tau a / 2) instead of exp(tau mean a); V measures that gap.
int effective_steps(const Problem& problem, double omega, double rho, int base, double step_tol);

/// Steps for one point of an omega sweep starting at omega_min: M omega is held
/// at its value there (M not restricted to powers of two), so tau never grows
/// along the sweep. The splitting error behaves like -c tau^2, and doubling
/// jumps of the adaptive rule would otherwise show up as spurious decreases.
int sweep_steps(const Problem& problem, double omega, double omega_min, double rho, int base, double step_tol);

struct SolveOptions {
    double tol = 1e-10;        // on |d mu| / mu
    int max_cycles = 10000;
    int steps = 0;             // 0: problem.time.steps, then adaptive policy
    bool adaptive_steps = true;
    double step_tol = 1e-4;    // splitting-error target for the adaptive policy
    bool eigenfunction = true;
    int krylov_dim = 20;
};

struct SpectralResult {
    double omega = 0.0, rho = 0.0;
    double lambda = 0.0;
    double log_multiplier = 0.0;  // log mu = -lambda / omega
    double multiplier = 0.0;      // exp(log mu); may overflow to inf for tiny omega
    SpaceTimeField phi;           // sup-norm 1
    SpaceTimeField psi;           // adjoint, empty until adjoint_eigenpair
    double pairing = 0.0;
    int cycles = 0;               // period-map applications
    double increment = 0.0;       // last relative multiplier change
    double periodicity_defect = 0.0;
    bool low_confidence = false;
    int steps = 0;                // M actually used
    std::string method;           // "power" or "krylov"
};

SpectralResult principal_eigenvalue(const Problem& problem, double omega, double rho,
                                    const SolveOptions& opt = {});

/// Solves the time-reversed problem with the same M, attaches psi and rescales
/// it so the space-time pairing with phi is 1. Throws on eigenvalue mismatch > 1e-7.
void adjoint_eigenpair(const Problem& problem, SpectralResult& result, const SolveOptions& opt = {});

struct IdentityCheck {
    double lhs = 0.0, rhs = 0.0, relative = 0.0;
};

/// Both sides of the energy identity relating the time derivative pairing
/// 2 omega int psi^T phi_t to the diffusion and coupling entropy terms.
IdentityCheck energy_identity_residual(const Problem& problem, const SpectralResult& result);

struct GapCheck {
    double gap = 0.0, bound = 0.0, slack = 0.0;
};

/// lambda - C against the eigenfunction lower bound built from U (samples on the
/// same space-time grid as phi, M + 1 slices of one component).
GapCheck eigenfunction_gap(const Problem& problem, const SpectralResult& result, const SpaceTimeField& U, double C);

}  // namespace perieig
