#pragma once

#include <vector>

#include "perieig/banded.hpp"
#include "perieig/coefficients.hpp"
#include "perieig/parallel.hpp"

namespace perieig {

struct EllipticResult {
    double lambda = 0.0;
    GridFunction eigenfunction;  // positive, sup-norm 1
    double residual = 0.0;       // sup-norm of L phi - lambda phi
    int iterations = 0;
    int factorizations = 0;
};

/// Smallest eigenvalue of L = -rho D Laplacian - B(x) with Neumann rows, as the
/// symmetric band matrix W^{1/2} L W^{-1/2} (W: trapezoid weights), unknowns
/// interleaved node by node so the bandwidth equals n.
BandedSymmetric assemble_elliptic(const StaticField& B, double rho, const DiffusionMatrix& D,
                                  const SpatialGrid& grid);

/// Principal eigenpair by safeguarded shifted inverse iteration. The shift
/// -(max_j mu(B_j) + 1) is always admissible; later shifts track the Rayleigh
/// quotient and are accepted only when the Cholesky factorization succeeds.
EllipticResult elliptic_principal(const StaticField& B, double rho, const DiffusionMatrix& D,
                                  const SpatialGrid& grid, const GridFunction* warm_start = nullptr);

/// Elliptic problem with the time-averaged field.
EllipticResult lambda_bar(const Problem& p, double rho);

struct LambdaUnderResult {
    double value = 0.0;
    std::vector<double> frozen;  // lambda_0(t_m, rho), m = 0..M
};

/// Time average of the frozen-time eigenvalues lambda_0(t_m, rho).
/// Serial mode warm-starts each node from the previous one.
LambdaUnderResult lambda_under(const Problem& p, double rho, Execution mode = Execution::serial);

/// Smallest admissible rho for elliptic solves.
inline constexpr double kMinRho = 1e-8;

}  // namespace perieig
