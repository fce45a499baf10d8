#include "perieig/elliptic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "perieig/error.hpp"

namespace perieig {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
}

void normalize(std::vector<double>& v) {
    const double norm = std::sqrt(dot(v, v));
    for (double& x : v) x /= norm;
}

struct Rayleigh {
    double theta = 0.0;
    double residual = 0.0;
};

Rayleigh rayleigh(const BandedSymmetric& s, const std::vector<double>& v, std::vector<double>& work) {
    s.multiply(v, work);
    Rayleigh r;
    r.theta = dot(v, work);
    double res = 0.0;
    for (size_t k = 0; k < v.size(); ++k) res += (work[k] - r.theta * v[k]) * (work[k] - r.theta * v[k]);
    r.residual = std::sqrt(res);
    return r;
}

}  // namespace

BandedSymmetric assemble_elliptic(const StaticField& B, double rho, const DiffusionMatrix& D,
                                  const SpatialGrid& grid) {
    grid.validate();
    const int nodes = grid.nodes;
    if (static_cast<int>(B.size()) != nodes) fail(ErrorKind::dimension, "coupling field does not match grid");
    const int n = static_cast<int>(B.front().rows());
    D.validate(n);
    const double inv_h2 = 1.0 / (grid.h() * grid.h());

    BandedSymmetric s(n * nodes, n);
    for (int j = 0; j < nodes; ++j) {
        for (int i = 0; i < n; ++i) {
            const int I = j * n + i;
            s.lower(I, I) = 2.0 * rho * D.d[i] * inv_h2 - B[j](i, i);
            for (int k = 0; k < i; ++k) {
                if (B[j](i, k) < -1e-13 * (1.0 + std::abs(B[j](i, k))))
                    fail(ErrorKind::validation, "coupling is not essentially positive");
                s.lower(I, j * n + k) = -B[j](i, k);
            }
            if (j > 0) {
                const bool edge = (j == 1) || (j == nodes - 1);
                s.lower(I, I - n) = -rho * D.d[i] * inv_h2 * (edge ? std::numbers::sqrt2 : 1.0);
            }
        }
    }
    return s;
}

EllipticResult elliptic_principal(const StaticField& B, double rho, const DiffusionMatrix& D,
                                  const SpatialGrid& grid, const GridFunction* warm_start) {
    if (!(rho >= kMinRho)) {
        std::ostringstream msg;
        msg << "rho = " << rho << " is below the elliptic floor " << kMinRho << "; use the limit constants";
        fail(ErrorKind::regime, msg.str());
    }
    const BandedSymmetric s = assemble_elliptic(B, rho, D, grid);
    const int nodes = grid.nodes;
    const int n = static_cast<int>(B.front().rows());
    const int size = s.size();
    const auto w = trapezoid_weights(grid);

    double max_mu = -INFINITY;
    for (const auto& b : B) max_mu = std::max(max_mu, largest_eigenvalue(b));
    const double scale = std::max(1.0, s.infinity_norm());
    const double res_tol = 1e-12 * scale;

    EllipticResult out;
    std::vector<double> v(size), work(size);
    for (int j = 0; j < nodes; ++j)
        for (int i = 0; i < n; ++i)
            // The floor keeps weight on every well: at small rho the ground state
            // can jump between separated maxima from one time node to the next.
            v[j * n + i] = std::sqrt(w[j]) * (warm_start ? std::max((*warm_start)(i, j), 1e-2) : 1.0);
    normalize(v);

    auto inverse_step = [&](const BandedSymmetric& factor) {
        cholesky_solve(factor, v);
        normalize(v);
        ++out.iterations;
    };

    // Safe shift: L - sigma0 I >= I.
    double lo = -(max_mu + 1.0);
    BandedSymmetric safe;
    for (int attempt = 0;; ++attempt) {
        safe = s;
        safe.shift_diagonal(-lo);
        ++out.factorizations;
        if (cholesky_banded(safe)) break;
        if (attempt == 1) fail(ErrorKind::convergence, "elliptic factorization failed at the safe shift");
        lo -= std::abs(lo) + 1.0;
    }
    if (!warm_start) {
        inverse_step(safe);
        inverse_step(safe);
    }

    Rayleigh rq = rayleigh(s, v, work);
    double previous = INFINITY;
    int stalls = 0;
    for (int it = 0; it < 200 && rq.residual > res_tol; ++it) {
        double sigma = std::max(rq.theta - 2.0 * rq.residual, 0.5 * (lo + rq.theta));
        bool factored = false;
        BandedSymmetric f;
        for (int tries = 0; tries < 60; ++tries) {
            f = s;
            f.shift_diagonal(-sigma);
            ++out.factorizations;
            if (cholesky_banded(f)) {
                factored = true;
                break;
            }
            sigma = 0.5 * (lo + sigma);
        }
        if (!factored) {
            f = safe;
            sigma = lo;
        }
        lo = std::max(lo, sigma);
        inverse_step(f);
        rq = rayleigh(s, v, work);
        if (rq.residual > 0.5 * previous && ++stalls > 4) break;
        previous = rq.residual;
    }
    if (rq.residual > 1e-8 * scale && warm_start) return elliptic_principal(B, rho, D, grid, nullptr);
    if (rq.residual > 1e-8 * scale) {
        std::ostringstream msg;
        msg << "elliptic inverse iteration stagnated with residual " << rq.residual;
        fail(ErrorKind::convergence, msg.str());
    }

    out.lambda = rq.theta;
    out.eigenfunction = GridFunction(n, nodes);
    double sup = 0.0;
    for (int j = 0; j < nodes; ++j)
        for (int i = 0; i < n; ++i) {
            const double phi = v[j * n + i] / std::sqrt(w[j]);
            out.eigenfunction(i, j) = phi;
            sup = std::max(sup, std::abs(phi));
        }
    if (out.eigenfunction.data()[0] < 0.0) sup = -sup;
    for (double& x : out.eigenfunction.data()) x /= sup;

    // Residual of the unsymmetrized operator on the sup-normalized eigenfunction.
    const GridFunction lap = neumann_laplacian(out.eigenfunction, grid);
    double res = 0.0;
    for (int j = 0; j < nodes; ++j)
        for (int i = 0; i < n; ++i) {
            double r = -rho * D.d[i] * lap(i, j) - out.lambda * out.eigenfunction(i, j);
            for (int k = 0; k < n; ++k) r -= B[j](i, k) * out.eigenfunction(k, j);
            res = std::max(res, std::abs(r));
        }
    out.residual = res;
    return out;
}

EllipticResult lambda_bar(const Problem& p, double rho) {
    return elliptic_principal(temporal_average(p.A, p.time), rho, p.D, p.space());
}

LambdaUnderResult lambda_under(const Problem& p, double rho, Execution mode) {
    const int M = p.time.steps;
    const int nodes = p.space().nodes;
    LambdaUnderResult r;
    r.frozen.assign(M + 1, 0.0);
    auto frozen_field = [&](int m) {
        StaticField b(nodes);
        for (int j = 0; j < nodes; ++j) b[j] = p.A.eval(j, p.time.t(m));
        return b;
    };
    if (mode == Execution::serial) {
        GridFunction previous;
        for (int m = 0; m < M; ++m) {
            auto res = elliptic_principal(frozen_field(m), rho, p.D, p.space(), m ? &previous : nullptr);
            r.frozen[m] = res.lambda;
            previous = std::move(res.eigenfunction);
        }
    } else {
        for_each_index(M, mode, [&](int m) {
            r.frozen[m] = elliptic_principal(frozen_field(m), rho, p.D, p.space()).lambda;
        });
    }
    r.frozen[M] = r.frozen[0];
    r.value = integrate_time(r.frozen).value;
    return r;
}

}  // namespace perieig
