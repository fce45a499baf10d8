#include "perieig/hj.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "perieig/error.hpp"

namespace perieig {

namespace {

double wrap_unit(double t) {
    double s = t - std::floor(t);
    return s >= 1.0 ? 0.0 : s;
}

}  // namespace

const char* to_string(ErgodicStatus s) {
    switch (s) {
        case ErgodicStatus::converged: return "converged";
        case ErgodicStatus::oscillating: return "oscillating";
        case ErgodicStatus::budget_exhausted: return "budget-exhausted";
        case ErgodicStatus::regime_limit: return "regime-limit";
    }
    return "unknown";
}

// ---------------------------------------------------------------- lattice

HamiltonianLattice::HamiltonianLattice(const Problem& problem, double p_max, int p_points, int time_nodes,
                                       Execution mode)
    : problem_(&problem),
      nodes_(problem.space().nodes),
      half_((p_points - 1) / 2 + 1),
      time_nodes_(time_nodes),
      p_max_(p_max) {
    if (!(p_max > 0.0)) fail(ErrorKind::range, "gradient window must be positive");
    if (p_points < 5 || time_nodes < 1) fail(ErrorKind::dimension, "Hamiltonian lattice too small");
    dp_ = p_max_ / (half_ - 1);
    values_.resize(static_cast<size_t>(time_nodes_) * nodes_ * half_);
    for_each_index(time_nodes_, mode, [&](int m) {
        const double t = static_cast<double>(m) / time_nodes_;
        for (int j = 0; j < nodes_; ++j) {
            const SmallMat a = problem.A.eval(j, t);
            float* row = values_.data() + (static_cast<size_t>(m) * nodes_ + j) * half_;
            for (int k = 0; k < half_; ++k) row[k] = static_cast<float>(hamiltonian(k * dp_, a, problem.D));
        }
    });
    for (size_t r = 0; r < values_.size() / half_; ++r) {
        const float* row = values_.data() + r * half_;
        for (int k = 0; k + 1 < half_; ++k)
            alpha_ = std::max(alpha_, std::abs(static_cast<double>(row[k + 1]) - row[k]) / dp_);
    }
}

HamiltonianLattice HamiltonianLattice::averaged(const HamiltonianLattice& src) {
    HamiltonianLattice out;
    out.problem_ = src.problem_;
    out.nodes_ = src.nodes_;
    out.half_ = src.half_;
    out.time_nodes_ = 1;
    out.p_max_ = src.p_max_;
    out.dp_ = src.dp_;
    out.alpha_ = src.alpha_;
    out.values_.assign(static_cast<size_t>(src.nodes_) * src.half_, 0.0f);
    // Periodic trapezoid rule over the time lattice.
    for (int j = 0; j < src.nodes_; ++j)
        for (int k = 0; k < src.half_; ++k) {
            double s = 0.0;
            for (int m = 0; m < src.time_nodes_; ++m)
                s += src.values_[(static_cast<size_t>(m) * src.nodes_ + j) * src.half_ + k];
            out.values_[static_cast<size_t>(j) * src.half_ + k] = static_cast<float>(s / src.time_nodes_);
        }
    return out;
}

double HamiltonianLattice::exact(double p, int node, double t) const {
    if (time_nodes_ > 1) return hamiltonian(p, node, t, problem_->A, problem_->D);
    // Averaged lattice: integrate over the same time nodes.
    const int samples = 256;
    double s = 0.0;
    for (int m = 0; m < samples; ++m)
        s += hamiltonian(p, node, static_cast<double>(m) / samples, problem_->A, problem_->D);
    return s / samples;
}

double HamiltonianLattice::operator()(double p, int node, double t) const {
    const double q = std::abs(p);
    if (q > p_max_) return exact(q, node, t);
    const double s = q / dp_;
    int k = std::min(static_cast<int>(s), half_ - 2);
    const double f = s - k;
    const double tt = wrap_unit(t) * time_nodes_;
    int m0 = std::min(static_cast<int>(tt), time_nodes_ - 1);
    const double g = tt - m0;
    const int m1 = (m0 + 1) % time_nodes_;
    const float* r0 = values_.data() + (static_cast<size_t>(m0) * nodes_ + node) * half_ + k;
    const float* r1 = values_.data() + (static_cast<size_t>(m1) * nodes_ + node) * half_ + k;
    const double h0 = r0[0] + f * (r0[1] - r0[0]);
    const double h1 = r1[0] + f * (r1[1] - r1[0]);
    return h0 + g * (h1 - h0);
}

double gradient_bound(const LimitConstants& c, const DiffusionMatrix& D) {
    return 1.0 + 2.0 * std::sqrt((c.C_bar - c.C_under + 1.0) / D.min());
}

// ---------------------------------------------------------------- evolution

void lax_friedrichs_step(const std::vector<double>& w, std::vector<double>& out, double t, double dt,
                         double theta, double h, const HamiltonianLattice& H, Execution mode) {
    const int n = static_cast<int>(w.size());
    out.resize(n);
    const double visc = H.alpha() * dt / (2.0 * theta * h);
    const double inv_2h = 0.5 / h;
    auto update = [&](int j) {
        const double left = j > 0 ? w[j - 1] : w[1];
        const double right = j < n - 1 ? w[j + 1] : w[n - 2];
        const double p = (right - left) * inv_2h;
        out[j] = w[j] - dt / theta * H(p, j, t) + visc * (right - 2.0 * w[j] + left);
    };
    if (mode == Execution::parallel) {
#pragma omp parallel for schedule(static) if (n > 2048)
        for (int j = 0; j < n; ++j) update(j);
    } else {
        for (int j = 0; j < n; ++j) update(j);
    }
}

namespace {

double mean_of(const std::vector<double>& w, const std::vector<double>& weights, double length) {
    double s = 0.0;
    for (size_t j = 0; j < w.size(); ++j) s += weights[j] * w[j];
    return s / length;
}

double ls_slope(const std::vector<double>& y, size_t from) {
    const size_t n = y.size() - from;
    if (n < 2) return y.size() >= 2 ? y.back() - y[y.size() - 2] : 0.0;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t k = from; k < y.size(); ++k) {
        const double x = static_cast<double>(k);
        sx += x;
        sy += y[k];
        sxx += x * x;
        sxy += x * y[k];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

ErgodicResult ergodic_constant(double theta, const Problem& problem, const HamiltonianLattice& H,
                               const ErgodicOptions& opt) {
    if (!(theta > 0.0) || !std::isfinite(theta)) fail(ErrorKind::range, "theta must be positive");
    const auto& grid = problem.space();
    const double h = grid.h();
    const double dt_cfl = 0.4 * theta * h / H.alpha();
    if (dt_cfl < 1e-8) {
        std::ostringstream msg;
        msg << "theta = " << theta << " needs a time step below 1e-8; use the theta -> 0 limit";
        fail(ErrorKind::regime, msg.str());
    }
    const int intervals = std::max(opt.record_steps, 1);
    const long sub = static_cast<long>(std::ceil(1.0 / (intervals * dt_cfl)));
    const long per_period = sub * intervals;
    const double dt = 1.0 / static_cast<double>(per_period);
    const int max_periods = static_cast<int>(std::max<long>(opt.max_steps / per_period, opt.min_periods + opt.window));

    ErgodicResult r;
    r.theta = theta;
    r.alpha = H.alpha();
    r.dt = dt;
    const auto weights = trapezoid_weights(grid);
    std::vector<double> w(grid.nodes, 0.0), next;
    std::vector<double> means{0.0};

    auto run_period = [&](SpaceTimeField* record, double C) {
        if (record) {
            record->slices.assign(intervals + 1, GridFunction(1, grid.nodes));
            std::copy(w.begin(), w.end(), record->slices[0].data().begin());
        }
        for (long s = 0; s < per_period; ++s) {
            lax_friedrichs_step(w, next, s * dt, dt, theta, h, H, opt.execution);
            w.swap(next);
            if (record && (s + 1) % sub == 0) {
                const long m = (s + 1) / sub;
                auto& slice = record->slices[m].data();
                const double shift = C / theta * static_cast<double>(m) / intervals;
                for (int j = 0; j < grid.nodes; ++j) slice[j] = w[j] - shift;
            }
        }
    };

    r.status = ErgodicStatus::budget_exhausted;
    for (int k = 1; k <= max_periods; ++k) {
        run_period(nullptr, 0.0);
        const double m = mean_of(w, weights, grid.length);
        r.drifts.push_back(theta * (m - means.back()));
        means.push_back(m);
        r.periods = k;
        if (!std::isfinite(m)) fail(ErrorKind::step_size, "Hamilton-Jacobi evolution became non-finite");
        if (k >= opt.min_periods && static_cast<int>(r.drifts.size()) >= opt.window) {
            const auto first = r.drifts.end() - opt.window;
            const auto [lo, hi] = std::minmax_element(first, r.drifts.end());
            if (*hi - *lo <= opt.drift_tol * (1.0 + std::abs(r.drifts.back()))) {
                r.status = ErgodicStatus::converged;
                break;
            }
        }
    }
    if (r.status != ErgodicStatus::converged && r.drifts.size() >= 3) {
        int flips = 0;
        for (size_t k = r.drifts.size() - std::min<size_t>(r.drifts.size(), opt.window + 1) + 2;
             k < r.drifts.size(); ++k)
            if ((r.drifts[k] - r.drifts[k - 1]) * (r.drifts[k - 1] - r.drifts[k - 2]) < 0) ++flips;
        if (flips >= 2) r.status = ErgodicStatus::oscillating;
    }

    r.C = theta * ls_slope(means, means.size() / 2);
    if (opt.record_steps > 0) {
        // Shift so the recorded period starts at zero mean.
        const double m0 = mean_of(w, weights, grid.length);
        for (double& v : w) v -= m0;
        run_period(&r.U_period, r.C);
    }
    r.U = GridFunction(1, grid.nodes);
    std::copy(w.begin(), w.end(), r.U.data().begin());
    return r;
}

ErgodicResult ergodic_constant_or_limit(double theta, const Problem& problem, const HamiltonianLattice& H,
                                        const LimitConstants& constants, const ErgodicOptions& opt) {
    try {
        return ergodic_constant(theta, problem, H, opt);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::regime) throw;
        ErgodicResult r;
        r.theta = theta;
        r.C = constants.C_under;
        r.status = ErgodicStatus::regime_limit;
        r.alpha = H.alpha();
        return r;
    }
}

// ---------------------------------------------------------------- extrapolation

ErgodicSolver::ErgodicSolver(const Problem& problem, bool extrapolate, Execution mode)
    : problem_(&problem), constants_(limit_constants(problem.A, problem.time)) {
    const double p_max = gradient_bound(constants_, problem.D);
    coarse_ = std::make_unique<HamiltonianLattice>(problem, p_max, 257, 256, mode);
    if (extrapolate) {
        SpatialGrid g = problem.space();
        g.nodes = 2 * g.nodes - 1;
        fine_ = std::make_unique<Problem>(Problem{problem.A.regrid(g), problem.D, problem.time});
        fine_lattice_ = std::make_unique<HamiltonianLattice>(*fine_, p_max, 257, 256, mode);
    }
}

ErgodicResult ErgodicSolver::combine(ErgodicResult coarse, const ErgodicResult& fine) const {
    coarse.C_coarse = coarse.C;
    coarse.C_fine = fine.C;
    coarse.C = 2.0 * fine.C - coarse.C;
    coarse.extrapolated = true;
    if (fine.status != ErgodicStatus::converged) coarse.status = fine.status;
    return coarse;
}

ErgodicResult ErgodicSolver::solve(double theta, const ErgodicOptions& opt) const {
    ErgodicResult coarse = ergodic_constant(theta, *problem_, *coarse_, opt);
    if (!fine_lattice_) return coarse;
    ErgodicOptions quiet = opt;
    quiet.record_steps = 0;
    return combine(std::move(coarse), ergodic_constant(theta, *fine_, *fine_lattice_, quiet));
}

ErgodicResult ErgodicSolver::solve_or_limit(double theta, const ErgodicOptions& opt) const {
    try {
        return solve(theta, opt);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::regime) throw;
        ErgodicResult r;
        r.theta = theta;
        r.C = constants_.C_under;
        r.status = ErgodicStatus::regime_limit;
        r.alpha = coarse_->alpha();
        return r;
    }
}

ErgodicResult ErgodicSolver::solve_averaged(const ErgodicOptions& opt) const {
    const HamiltonianLattice avg = HamiltonianLattice::averaged(*coarse_);
    ErgodicResult coarse = ergodic_constant(1.0, *problem_, avg, opt);
    if (!fine_lattice_) return coarse;
    const HamiltonianLattice avg_fine = HamiltonianLattice::averaged(*fine_lattice_);
    ErgodicOptions quiet = opt;
    quiet.record_steps = 0;
    return combine(std::move(coarse), ergodic_constant(1.0, *fine_, avg_fine, quiet));
}

double stationary_critical_value(const MatrixField& A, double t) {
    double best = -INFINITY;
    for (int j = 0; j < A.grid().nodes; ++j) best = std::max(best, largest_eigenvalue(A.eval(j, t)));
    return -best;
}

AveragedCritical averaged_critical_value(const Problem& problem, const ErgodicSolver* solver,
                                         const ErgodicOptions& opt) {
    AveragedCritical out;
    out.C_star = limit_constants(problem.A, problem.time).C_star;
    if (solver) {
        const ErgodicResult r = solver->solve_averaged(opt);
        out.evolved = r.C;
        out.status = r.status;
    }
    return out;
}

}  // namespace perieig
