#include "perieig/parabolic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "perieig/error.hpp"
#include "perieig/floquet_ode.hpp"

namespace perieig {

namespace {

constexpr size_t kCacheLimit = size_t{1} << 22;  // doubles kept for coupling factors
constexpr int kMaxSteps = 1 << 14;
constexpr int kMaxKernelNodes = 1025;

// exp(s * S) for a symmetric 2x2 S, written out to avoid the general path.
void exp_sym2(double a, double b, double c, double s, double* out) {
    const double mean = 0.5 * (a + c);
    const double half = 0.5 * (a - c);
    const double q = std::hypot(half, b);
    const double em = std::exp(s * mean);
    const double ch = std::cosh(s * q);
    const double sh_q = q > 0.0 ? std::sinh(s * q) / q : s;
    out[0] = em * (ch + sh_q * half);
    out[1] = em * sh_q * b;
    out[2] = out[1];
    out[3] = em * (ch - sh_q * half);
}

}  // namespace

// ---------------------------------------------------------------- heat kernel

std::vector<double> neumann_heat_kernel(int nodes, double s) {
    if (nodes < 2) fail(ErrorKind::dimension, "heat kernel needs at least 2 nodes");
    if (!(s >= 0.0) || !std::isfinite(s)) fail(ErrorKind::range, "heat kernel time must be nonnegative");
    const int L = nodes - 1;
    std::vector<double> K(static_cast<size_t>(nodes) * nodes, 0.0);
    if (s == 0.0) {
        for (int j = 0; j < nodes; ++j) K[static_cast<size_t>(j) * nodes + j] = 1.0;
        return K;
    }
    // G(n) = exp(-2s) I_n(2s): the walk on Z with unit jump rates, by Miller's
    // backward recurrence I_{n-1} = I_{n+1} + (n / s) I_n, normalized to mass 1.
    const int nmax = std::max(100, static_cast<int>(std::ceil(55.0 * std::sqrt(s))) + 10);
    std::vector<double> g(nmax + 2, 0.0);
    g[nmax] = 1e-300;
    for (int n = nmax; n >= 1; --n) {
        g[n - 1] = g[n + 1] + (n / s) * g[n];
        if (g[n - 1] > 1e250)
            for (int q = n - 1; q <= nmax; ++q) g[q] *= 1e-250;
    }
    double total = g[0];
    for (int n = 1; n <= nmax; ++n) total += 2.0 * g[n];
    for (double& v : g) v /= total;
    auto G = [&](long n) { n = n < 0 ? -n : n; return n <= nmax ? g[n] : 0.0; };

    // Fold the even 2L-periodic extension back onto [0, L].
    const long period = 2L * L;
    const long images = nmax / period + 1;
    for (int j = 0; j < nodes; ++j)
        for (int k = 0; k < nodes; ++k) {
            double v = 0.0;
            for (long m = -images; m <= images; ++m) {
                v += G(j - k - m * period);
                if (k > 0 && k < L) v += G(j + k - m * period);
            }
            K[static_cast<size_t>(j) * nodes + k] = v;
        }
    return K;
}

// ---------------------------------------------------------------- period map

PeriodMap::PeriodMap(const Problem& problem, double omega, double rho, int steps, bool time_reversed)
    : field_(time_reversed ? problem.A.time_reversed() : problem.A),
      n_(problem.components()),
      nodes_(problem.space().nodes),
      steps_(steps),
      omega_(omega),
      rho_(rho) {
    problem.validate();
    if (!(omega > 0.0) || !std::isfinite(omega)) fail(ErrorKind::range, "omega must be positive");
    if (!(rho > 0.0) || !std::isfinite(rho)) fail(ErrorKind::range, "rho must be positive");
    if (steps < 2) fail(ErrorKind::dimension, "period map needs at least 2 steps");
    tau_ = 1.0 / (steps_ * omega_);
    dct_ = dct1_for(nodes_);

    const double h = problem.space().h();
    const int last = nodes_ - 1;
    // Direct kernel while it is affordable and not wider than the domain.
    double s_max = 0.0;
    for (double d : problem.D.d) s_max = std::max(s_max, tau_ * rho_ * d / (h * h));
    if (nodes_ <= kMaxKernelNodes && std::sqrt(2.0 * s_max) <= last) {
        kernels_.resize(n_);
        for (int i = 0; i < n_; ++i) {
            int same = -1;
            for (int q = 0; q < i; ++q)
                if (problem.D.d[q] == problem.D.d[i]) same = q;
            kernel_of_.push_back(same >= 0 ? kernel_of_[same] : i);
            if (same >= 0) continue;
            Kernel& k = kernels_[i];
            k.values = neumann_heat_kernel(nodes_, tau_ * rho_ * problem.D.d[i] / (h * h));
            // Entries below 1e-300 act on states bounded by 1; dropping them skips
            // subnormal arithmetic and leaves each row a contiguous band.
            k.first.resize(nodes_);
            k.count.resize(nodes_);
            for (int j = 0; j < nodes_; ++j) {
                double* row = k.values.data() + static_cast<size_t>(j) * nodes_;
                int a = 0, b = nodes_ - 1;
                while (a < j && row[a] < 1e-300) row[a++] = 0.0;
                while (b > j && row[b] < 1e-300) row[b--] = 0.0;
                k.first[j] = a;
                k.count[j] = b - a + 1;
            }
        }
    }
    heat_.resize(static_cast<size_t>(n_) * nodes_);
    for (int i = 0; i < n_; ++i)
        for (int k = 0; k < nodes_; ++k) {
            const double s = std::sin(std::numbers::pi * k / (2.0 * last));
            const double eig = -4.0 / (h * h) * s * s;
            heat_[static_cast<size_t>(i) * nodes_ + k] =
                std::exp(tau_ * rho_ * problem.D.d[i] * eig) / (2.0 * last);
        }

    const size_t per_step = static_cast<size_t>(nodes_) * n_ * n_;
    if (per_step * steps_ <= kCacheLimit) {
        cached_.resize(per_step * steps_);
        for (int m = 0; m < steps_; ++m) coupling_factors(m, cached_.data() + per_step * m);
    }
}

void PeriodMap::coupling_factors(int m, double* out) const {
    const double t = (m + 0.5) / steps_;
    const size_t nn = static_cast<size_t>(n_) * n_;
    for (int j = 0; j < nodes_; ++j) {
        double* g = out + nn * j;
        if (n_ == 1) {
            g[0] = std::exp(0.5 * tau_ * field_.eval_entry(0, 0, j, t));
        } else if (n_ == 2) {
            exp_sym2(field_.eval_entry(0, 0, j, t), field_.eval_entry(0, 1, j, t),
                     field_.eval_entry(1, 1, j, t), 0.5 * tau_, g);
        } else {
            const SmallMat e = sym_exp(field_.eval(j, t), 0.5 * tau_);
            for (int a = 0; a < n_; ++a)
                for (int b = 0; b < n_; ++b) g[a * n_ + b] = std::max(e(a, b), 0.0);
        }
    }
}

void PeriodMap::couple(const double* g, double* u) const {
    const size_t nn = static_cast<size_t>(n_) * n_;
    if (n_ == 1) {
        for (int j = 0; j < nodes_; ++j) u[j] *= g[j];
        return;
    }
    double x[kMaxComponents];
    for (int j = 0; j < nodes_; ++j) {
        const double* gj = g + nn * j;
        for (int a = 0; a < n_; ++a) x[a] = u[a * nodes_ + j];
        for (int a = 0; a < n_; ++a) {
            double s = 0.0;
            for (int b = 0; b < n_; ++b) s += gj[a * n_ + b] * x[b];
            u[a * nodes_ + j] = s;
        }
    }
}

double PeriodMap::apply(std::vector<double>& u, Trajectory* traj) const {
    if (u.size() != static_cast<size_t>(size())) fail(ErrorKind::dimension, "period map state has the wrong size");
    for (double& v : u)
        if (v < 0.0) {
            if (v < -1e-10) fail(ErrorKind::positivity, "period map input has negative entries");
            v = 0.0;
        }
    return advance(u, traj, false);
}

double PeriodMap::apply_signed(std::vector<double>& u) const {
    if (u.size() != static_cast<size_t>(size())) fail(ErrorKind::dimension, "period map state has the wrong size");
    return advance(u, nullptr, true);
}

double PeriodMap::advance(std::vector<double>& u, Trajectory* traj, bool is_signed) const {
    const size_t total = static_cast<size_t>(n_) * nodes_;
    double sup = 0.0;
    for (double v : u) sup = std::max(sup, std::abs(v));
    if (!(sup > 0.0) || !std::isfinite(sup)) fail(ErrorKind::positivity, "period map input is zero");
    for (double& v : u) v /= sup;

    if (traj) {
        traj->components = n_;
        traj->nodes = nodes_;
        traj->states.assign(total * (steps_ + 1), 0.0);
        traj->log_scale.assign(steps_ + 1, 0.0);
        std::copy(u.begin(), u.end(), traj->states.begin());
    }

    std::vector<double> local;
    Eigen::VectorXd scratch(nodes_);
    if (cached_.empty()) local.resize(static_cast<size_t>(nodes_) * n_ * n_);
    double log_growth = 0.0;
    for (int m = 0; m < steps_; ++m) {
        const double* g;
        if (cached_.empty()) {
            coupling_factors(m, local.data());
            g = local.data();
        } else {
            g = cached_.data() + static_cast<size_t>(nodes_) * n_ * n_ * m;
        }
        couple(g, u.data());
        for (int i = 0; i < n_; ++i) {
            double* ui = u.data() + static_cast<size_t>(i) * nodes_;
            if (!kernels_.empty()) {
                const Kernel& k = kernels_[kernel_of_[i]];
                const Eigen::Map<const Eigen::VectorXd> v(ui, nodes_);
                for (int j = 0; j < nodes_; ++j) {
                    const int a = k.first[j], c = k.count[j];
                    const Eigen::Map<const Eigen::VectorXd> row(k.values.data() + static_cast<size_t>(j) * nodes_ + a, c);
                    scratch[j] = row.dot(v.segment(a, c));
                }
                std::copy(scratch.data(), scratch.data() + nodes_, ui);
                continue;
            }
            const double* hi = heat_.data() + static_cast<size_t>(i) * nodes_;
            dct_->apply(ui);
            for (int k = 0; k < nodes_; ++k) ui[k] *= hi[k];
            dct_->apply(ui);
        }
        couple(g, u.data());

        double s = 0.0;
        for (double& v : u) {
            if (!is_signed) v = std::max(v, 0.0);  // clears DCT round-off below the positive cone
            s = std::max(s, std::abs(v));
        }
        if (!std::isfinite(s) || s > 1e10)
            fail(ErrorKind::step_size, "period map growth exceeds 1e10 per step; increase M");
        if (!(s > 0.0)) fail(ErrorKind::positivity, "period map annihilated the state");
        for (double& v : u) {
            v /= s;
            if (std::abs(v) < 1e-300) v = 0.0;
        }
        log_growth += std::log(s);
        if (traj) {
            std::copy(u.begin(), u.end(), traj->states.begin() + static_cast<ptrdiff_t>(total) * (m + 1));
            traj->log_scale[m + 1] = log_growth;
        }
    }
    return log_growth;
}

int effective_steps(const Problem& problem, double omega, double rho, int base, double step_tol) {
    const TimeGrid probe{32};
    const double norm = field_norm_bound(problem.A, probe);
    const auto w = trapezoid_weights(problem.space());
    double variance = 0.0;
    for (int m = 0; m < probe.steps; ++m) {
        const SmallMat mean = spatial_average(problem.A, probe.t(m));
        double v = 0.0;
        for (int j = 0; j < problem.space().nodes; ++j)
            v += w[j] * (problem.A.eval(j, probe.t(m)) - mean).squaredNorm();
        variance = std::max(variance, v / problem.space().length);
    }
    int m = std::max(base, 2);
    auto estimate = [&](int steps) {
        const double tau = 1.0 / (steps * omega);
        return tau * variance * std::min(1.0, std::numbers::pi * std::numbers::pi * rho * tau) / 4.0;
    };
    while (m < kMaxSteps && (norm / (m * omega) > 1.0 || estimate(m) > step_tol)) m *= 2;
    return m;
}

int sweep_steps(const Problem& problem, double omega, double omega_min, double rho, int base, double step_tol) {
    if (!(omega_min > 0.0) || omega < omega_min) fail(ErrorKind::range, "sweep needs 0 < omega_min <= omega");
    const double anchor = static_cast<double>(effective_steps(problem, omega_min, rho, base, step_tol)) * omega_min;
    return std::max(base, static_cast<int>(std::ceil(anchor / omega - 1e-9)));
}

// ---------------------------------------------------------------- eigen-solve

namespace {

struct Dominant {
    double log_mu = 0.0;
    std::vector<double> vector;
    int cycles = 0;
    double increment = 0.0;
    std::string method;
};

// Restarted Arnoldi for the dominant (Perron) eigenpair of the period map,
// scaled by exp(-log_mu) so the wanted Ritz value is near 1. The residual is
// checked every few steps; a restart that fails to converge doubles the
// subspace (clustered multipliers at tiny rho need more than 20 vectors).
void krylov(const PeriodMap& map, Dominant& d, const SolveOptions& opt) {
    const int size = map.size();
    int m = std::min(opt.krylov_dim, size);
    const int m_cap = std::min(std::max(opt.krylov_dim, 80), size);
    Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(d.vector.data(), size);
    double previous = d.log_mu;
    std::vector<double> u(size);

    auto apply_linear = [&](const Eigen::VectorXd& in) {
        std::copy(in.data(), in.data() + size, u.begin());
        const double scale = in.cwiseAbs().maxCoeff();
        const double g = map.apply_signed(u);
        ++d.cycles;
        return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(u.data(), size) * (scale * std::exp(g - d.log_mu)));
    };

    for (;;) {
        Eigen::MatrixXd V(size, m + 1);
        Eigen::MatrixXd H = Eigen::MatrixXd::Zero(m + 1, m);
        x.normalize();
        V.col(0) = x;
        int k_used = 0;
        bool done = false;
        double theta = 0.0;
        Eigen::VectorXd y;
        for (int k = 0; k < m; ++k) {
            Eigen::VectorXd w = apply_linear(V.col(k));
            for (int pass = 0; pass < 2; ++pass)
                for (int q = 0; q <= k; ++q) {
                    const double c = V.col(q).dot(w);
                    H(q, k) += c;
                    w -= c * V.col(q);
                }
            H(k + 1, k) = w.norm();
            k_used = k + 1;
            const bool breakdown = H(k + 1, k) <= 1e-14 * H.col(k).head(k + 1).norm();
            if (!breakdown) V.col(k + 1) = w / H(k + 1, k);
            if (!breakdown && k_used < m && k_used % 4 != 0) continue;

            Eigen::EigenSolver<Eigen::MatrixXd> es(H.topLeftCorner(k_used, k_used));
            int best = 0;
            for (int q = 1; q < k_used; ++q)
                if (es.eigenvalues()[q].real() > es.eigenvalues()[best].real()) best = q;
            theta = es.eigenvalues()[best].real();
            if (!(theta > 0.0)) fail(ErrorKind::convergence, "Krylov solve found no positive dominant multiplier");
            y = es.eigenvectors().col(best).real();
            y /= y.norm();
            const double residual = breakdown ? 0.0 : std::abs(H(k + 1, k) * y[k_used - 1]) / theta;
            if (residual <= opt.tol) {
                done = true;
                break;
            }
        }
        x = V.leftCols(k_used) * y;
        if (x.sum() < 0.0) x = -x;
        const double log_mu = d.log_mu + std::log(theta);
        d.increment = std::abs(log_mu - previous);
        previous = log_mu;
        d.log_mu = log_mu;
        if (done) break;
        if (d.cycles >= opt.max_cycles) {
            std::ostringstream msg;
            msg << "Krylov solve did not converge in " << d.cycles << " period maps";
            fail(ErrorKind::convergence, msg.str());
        }
        m = std::min(2 * m, m_cap);
    }
    d.vector.assign(x.data(), x.data() + size);
    for (double& v : d.vector) v = std::max(v, 0.0);
    d.method = "krylov";
}

Dominant dominant_pair(const PeriodMap& map, const SolveOptions& opt) {
    Dominant d;
    d.vector.assign(map.size(), 1.0);
    d.method = "power";
    double previous = 0.0, last_delta = INFINITY;
    for (int c = 0; c < opt.max_cycles; ++c) {
        const double log_mu = map.apply(d.vector);
        ++d.cycles;
        if (c > 0) {
            const double delta = std::abs(log_mu - previous);
            const double q = std::isfinite(last_delta) && last_delta > 0.0 ? delta / last_delta : 1.0;
            d.increment = delta;
            d.log_mu = log_mu;
            const double remaining = q < 1.0 ? delta * q / (1.0 - q) : INFINITY;
            if (delta <= opt.tol && remaining <= opt.tol) return d;
            if (delta == 0.0) return d;
            // Slow contraction: hand the current iterate to the Krylov solver.
            if (c >= 3 && q > 0.25) {
                krylov(map, d, opt);
                return d;
            }
            last_delta = delta;
        }
        previous = log_mu;
        d.log_mu = log_mu;
    }
    std::ostringstream msg;
    msg << "power iteration did not converge; last increment " << d.increment;
    fail(ErrorKind::convergence, msg.str());
}

SpaceTimeField assemble(const Trajectory& traj, double lambda, double omega, int steps) {
    const int n = traj.components, nodes = traj.nodes;
    std::vector<double> logf(steps + 1);
    double top = -INFINITY;
    for (int m = 0; m <= steps; ++m) {
        logf[m] = traj.log_scale[m] + lambda * (static_cast<double>(m) / steps) / omega;
        top = std::max(top, logf[m]);
    }
    SpaceTimeField f;
    f.slices.resize(steps + 1);
    double sup = 0.0;
    for (int m = 0; m <= steps; ++m) {
        GridFunction g(n, nodes);
        const double scale = std::exp(logf[m] - top);
        const double* s = traj.state(m);
        for (size_t k = 0; k < g.data().size(); ++k) {
            g.data()[k] = s[k] * scale;
            sup = std::max(sup, g.data()[k]);
        }
        f.slices[m] = std::move(g);
    }
    for (auto& g : f.slices)
        for (double& v : g.data()) v /= sup;
    return f;
}

double periodicity_defect(const SpaceTimeField& f) {
    double d = 0.0;
    const auto& a = f.slices.front().data();
    const auto& b = f.slices.back().data();
    for (size_t k = 0; k < a.size(); ++k) d = std::max(d, std::abs(a[k] - b[k]));
    return d;
}

SpectralResult solve(const Problem& problem, double omega, double rho, int steps, bool reversed,
                     const SolveOptions& opt) {
    const PeriodMap map(problem, omega, rho, steps, reversed);
    Dominant d = dominant_pair(map, opt);
    SpectralResult r;
    r.omega = omega;
    r.rho = rho;
    r.steps = steps;
    r.cycles = d.cycles;
    r.method = d.method;
    r.increment = d.increment;

    if (d.method == "krylov" || opt.eigenfunction) {
        // One plain application fixes the multiplier and, if wanted, the trajectory.
        Trajectory traj;
        std::vector<double> u = d.vector;
        const double before = *std::max_element(u.begin(), u.end());
        double num = 0.0, den = 0.0;
        std::vector<double> start = u;
        for (double& v : start) v /= before;
        const double g = map.apply(u, opt.eigenfunction ? &traj : nullptr);
        ++r.cycles;
        for (size_t k = 0; k < u.size(); ++k) {
            num += start[k] * u[k];
            den += start[k] * start[k];
        }
        d.log_mu = g + std::log(num / den);
        if (opt.eigenfunction) {
            r.lambda = -omega * d.log_mu;
            r.phi = assemble(traj, r.lambda, omega, steps);
            r.periodicity_defect = periodicity_defect(r.phi);
            r.low_confidence = r.periodicity_defect > 1e-7;
        }
    }
    r.log_multiplier = d.log_mu;
    r.lambda = -omega * d.log_mu;
    r.multiplier = std::exp(d.log_mu);
    return r;
}

double pair(const SpaceTimeField& phi, const SpaceTimeField& psi, const SpatialGrid& grid) {
    const int M = phi.time_nodes() - 1;
    const auto w = trapezoid_weights(grid);
    double total = 0.0;
    for (int m = 0; m < M; ++m) {
        const auto& a = phi.slices[m];
        const auto& b = psi.slices[m];
        for (int i = 0; i < a.components(); ++i)
            for (int j = 0; j < a.nodes(); ++j) total += w[j] * a(i, j) * b(i, j);
    }
    return total / M;
}

}  // namespace

SpectralResult principal_eigenvalue(const Problem& problem, double omega, double rho, const SolveOptions& opt) {
    const int base = opt.steps > 0 ? opt.steps : problem.time.steps;
    const int steps = opt.adaptive_steps ? effective_steps(problem, omega, rho, base, opt.step_tol) : base;
    return solve(problem, omega, rho, steps, false, opt);
}

void adjoint_eigenpair(const Problem& problem, SpectralResult& result, const SolveOptions& opt) {
    if (result.phi.slices.empty()) fail(ErrorKind::dimension, "adjoint needs the primal eigenfunction");
    SolveOptions o = opt;
    o.eigenfunction = true;
    SpectralResult adj = solve(problem, result.omega, result.rho, result.steps, true, o);
    if (std::abs(adj.lambda - result.lambda) > 1e-7 * std::max(1.0, std::abs(result.lambda))) {
        std::ostringstream msg;
        msg.precision(12);
        msg << "adjoint eigenvalue " << adj.lambda << " differs from primal " << result.lambda;
        fail(ErrorKind::convergence, msg.str());
    }
    const int M = result.steps;
    result.psi.slices.resize(M + 1);
    for (int m = 0; m <= M; ++m) result.psi.slices[m] = adj.phi.slices[M - m];
    const double p = pair(result.phi, result.psi, problem.space());
    for (auto& g : result.psi.slices)
        for (double& v : g.data()) v /= p;
    result.pairing = pair(result.phi, result.psi, problem.space());
}

// ---------------------------------------------------------------- diagnostics

IdentityCheck energy_identity_residual(const Problem& problem, const SpectralResult& r) {
    if (r.psi.slices.empty()) fail(ErrorKind::dimension, "identity check needs the adjoint eigenfunction");
    const auto& grid = problem.space();
    const int M = r.steps, n = problem.components(), nodes = grid.nodes;
    const auto w = trapezoid_weights(grid);
    const double dt = 1.0 / M;
    double lhs = 0.0, diffusion = 0.0, coupling = 0.0;

    for (int m = 0; m < M; ++m) {
        const auto& phi = r.phi.slices[m];
        const auto& psi = r.psi.slices[m];
        const auto& next = r.phi.slices[m + 1];
        const auto& prev = r.phi.slices[m == 0 ? M - 1 : m - 1];
        const double t = m * dt;
        for (int i = 0; i < n; ++i) {
            std::vector<double> logratio(nodes);
            for (int j = 0; j < nodes; ++j) {
                lhs += w[j] * psi(i, j) * (next(i, j) - prev(i, j)) / (2.0 * dt);
                logratio[j] = std::log(psi(i, j) / phi(i, j));
            }
            const auto grad = gradient_central(logratio, grid);
            for (int j = 0; j < nodes; ++j)
                diffusion += problem.D.d[i] * w[j] * phi(i, j) * psi(i, j) * grad[j] * grad[j];
        }
        for (int j = 0; j < nodes; ++j) {
            const SmallMat a = problem.A.eval(j, t);
            for (int i = 0; i < n; ++i)
                for (int k = 0; k < n; ++k) {
                    if (i == k || a(i, k) == 0.0) continue;
                    const double x = phi(k, j) * psi(i, j), y = psi(k, j) * phi(i, j);
                    coupling += w[j] * a(i, k) * (x - y) * std::log(x / y);
                }
        }
    }
    IdentityCheck c;
    c.lhs = 2.0 * r.omega * lhs * dt;
    c.rhs = r.rho * diffusion * dt + 0.5 * coupling * dt;
    const double scale = std::max(std::abs(c.lhs), std::abs(c.rhs));
    c.relative = scale > 0.0 ? std::abs(c.lhs - c.rhs) / scale : 0.0;
    return c;
}

GapCheck eigenfunction_gap(const Problem& problem, const SpectralResult& r, const SpaceTimeField& U, double C) {
    if (r.psi.slices.empty()) fail(ErrorKind::dimension, "gap check needs the adjoint eigenfunction");
    const int M = r.steps;
    if (U.time_nodes() != M + 1) fail(ErrorKind::dimension, "U must be sampled on the eigenfunction time grid");
    const auto& grid = problem.space();
    const int n = problem.components(), nodes = grid.nodes;
    const auto w = trapezoid_weights(grid);
    const double root_rho = std::sqrt(r.rho);
    double first = 0.0, second = 0.0;
    for (int m = 0; m < M; ++m) {
        const auto& phi = r.phi.slices[m];
        const auto& psi = r.psi.slices[m];
        const auto gu = gradient_central(U.slices[m].component(0), grid);
        for (int i = 0; i < n; ++i) {
            std::vector<double> root(nodes), logratio(nodes);
            for (int j = 0; j < nodes; ++j) {
                root[j] = std::sqrt(phi(i, j) * psi(i, j));
                logratio[j] = std::log(phi(i, j) / psi(i, j));
            }
            const auto gr = gradient_central(root, grid);
            const auto gl = gradient_central(logratio, grid);
            for (int j = 0; j < nodes; ++j) {
                first += problem.D.d[i] * w[j] * gr[j] * gr[j];
                const double v = 0.5 * root_rho * gl[j] + gu[j];
                second += w[j] * phi(i, j) * psi(i, j) * v * v;
            }
        }
    }
    GapCheck g;
    g.gap = r.lambda - C;
    g.bound = (r.rho * first + second) / M;
    g.slack = g.gap - g.bound;
    return g;
}

}  // namespace perieig
