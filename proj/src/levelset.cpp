#include "perieig/levelset.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "perieig/elliptic.hpp"
#include "perieig/error.hpp"
#include "perieig/roots.hpp"

namespace perieig {

// ---------------------------------------------------------------- oracle

SpectralOracle::SpectralOracle(const Problem& problem, SolveOptions solve, OdeOptions ode)
    : problem_(&problem), solve_(solve), ode_(ode), constants_(limit_constants(problem.A, problem.time)) {
    solve_.eigenfunction = false;
    // Callers parallelize across samples; keep the kernels serial.
    ode_.execution = Execution::serial;
}

double SpectralOracle::cached(std::map<std::pair<double, double>, double>& cache, double a, double b,
                              const std::function<double()>& compute) const {
    {
        std::lock_guard g(lock_);
        auto it = cache.find({a, b});
        if (it != cache.end()) return it->second;
    }
    const double v = compute();
    std::lock_guard g(lock_);
    ++evaluations_;
    cache.emplace(std::make_pair(a, b), v);
    return v;
}

double SpectralOracle::lambda(double omega, double rho) const {
    return cached(lambda_, omega, rho,
                  [&] { return principal_eigenvalue(*problem_, omega, rho, solve_).lambda; });
}

double SpectralOracle::lambda_under(double rho) const {
    return cached(under_, rho, 0.0, [&] { return perieig::lambda_under(*problem_, rho).value; });
}

double SpectralOracle::lambda_bar(double rho) const {
    return cached(bar_, rho, 0.0, [&] { return perieig::lambda_bar(*problem_, rho).lambda; });
}

double SpectralOracle::h_under(double omega) const {
    return cached(h_under_, omega, 0.0, [&] { return perieig::h_under(problem_->A, omega, ode_).value; });
}

double SpectralOracle::h_bar(double omega) const {
    return cached(h_bar_, omega, 0.0, [&] { return perieig::h_bar(problem_->A, omega, ode_); });
}

namespace {

std::optional<double> invert_on_window(const std::function<double(double)>& f, double ell) {
    const double lo = 1e-4, hi = 1e4;
    const double f_lo = f(lo), f_hi = f(hi);
    if (!(f_lo < ell && ell < f_hi)) return std::nullopt;
    return solve_monotone(f, ell, lo, hi, BracketScale::logarithmic, 1e-10, 1e-12, f_lo, f_hi).x;
}

}  // namespace

std::optional<double> SpectralOracle::h_under_inverse(double ell) const {
    return invert_on_window([this](double w) { return h_under(w); }, ell);
}

std::optional<double> SpectralOracle::h_bar_inverse(double ell) const {
    return invert_on_window([this](double w) { return h_bar(w); }, ell);
}

int SpectralOracle::evaluations() const {
    std::lock_guard g(lock_);
    return evaluations_;
}

// ---------------------------------------------------------------- endpoints

namespace {

// Root of a nondecreasing f(rho) = ell, expanding a log bracket outward.
Located<double> rho_root(const std::function<double(double)>& f, double ell) {
    Located<double> out;
    double lo = 1e-2, hi = 1.0;
    double f_lo = f(lo), f_hi = f(hi);
    while (f_lo > ell && lo > 10 * kMinRho) {
        hi = lo;
        f_hi = f_lo;
        lo /= 10;
        f_lo = f(lo);
    }
    while (f_hi < ell && hi < 1e8) {
        lo = hi;
        f_lo = f_hi;
        hi *= 10;
        f_hi = f(hi);
    }
    if (!(f_lo <= ell && ell <= f_hi)) {
        out.reason = "no bracket in rho over [1e-7, 1e8]";
        return out;
    }
    out.value = solve_monotone(f, ell, lo, hi, BracketScale::logarithmic, 1e-9 * (1 + std::abs(ell)), 1e-13,
                               f_lo, f_hi)
                    .x;
    return out;
}

}  // namespace

Located<double> rho_ell(const SpectralOracle& o, double ell) {
    const auto& c = o.constants();
    if (!(c.C_under < c.C_under_plus)) return {std::nullopt, "C_under = C_under_plus: empty interval"};
    if (!(c.C_under < ell && ell < c.C_under_plus)) return {std::nullopt, "level outside (C_under, C_under_plus)"};
    return rho_root([&](double r) { return o.lambda_under(r); }, ell);
}

Located<double> rho_under_ell(const SpectralOracle& o, double ell) {
    const auto& c = o.constants();
    if (!(c.C_star_plus < c.C_bar)) return {std::nullopt, "C_star_plus = C_bar: empty interval"};
    if (!(c.C_star_plus < ell && ell < c.C_bar)) return {std::nullopt, "level outside (C_star_plus, C_bar)"};
    return rho_root([&](double r) { return o.lambda_bar(r); }, ell);
}

OmegaCrossing omega_ell(const SpectralOracle& o, double ell, double rho, double tol, double guess) {
    OmegaCrossing out;
    const double under = o.lambda_under(rho), bar = o.lambda_bar(rho);
    if (bar - under <= 1e-8) {
        out.side = CrossingSide::degenerate;
        return out;
    }
    if (under >= ell) {
        out.side = CrossingSide::below;
        return out;
    }
    if (bar <= ell) {
        out.side = CrossingSide::above;
        return out;
    }
    const double ftol = tol > 0 ? tol : 5e-7 * (1 + std::abs(ell));
    auto f = [&](double w) { return o.lambda(w, rho); };
    const double grow = guess > 0 ? 2.0 : 8.0;
    double lo = guess > 0 ? guess / 1.3 : 0.1, hi = guess > 0 ? guess * 1.3 : 10.0;
    double f_lo = f(lo), f_hi = f(hi);
    // Below ~1e-4 the period map needs more steps than the policy allows.
    while (f_lo > ell && lo > 2e-4) {
        hi = lo;
        f_hi = f_lo;
        lo /= grow;
        f_lo = f(lo);
    }
    while (f_hi < ell && hi < 1e5) {
        lo = hi;
        f_lo = f_hi;
        hi *= grow;
        f_hi = f(hi);
    }
    if (f_lo > ell) {
        out.side = CrossingSide::below;
        return out;
    }
    if (f_hi < ell) {
        out.side = CrossingSide::above;
        return out;
    }
    const RootResult r = solve_monotone(f, ell, lo, hi, BracketScale::logarithmic, ftol, 1e-12, f_lo, f_hi);
    out.omega = r.x;
    out.lambda = r.fx;
    return out;
}

// ---------------------------------------------------------------- tracing

const char* to_string(CurveType t) {
    switch (t) {
        case CurveType::vertical_line: return "vertical-line";
        case CurveType::type1i: return "type1i";
        case CurveType::type1ii: return "type1ii";
        case CurveType::type2: return "type2";
        case CurveType::type3: return "type3";
        case CurveType::type4: return "type4";
    }
    return "unknown";
}

bool LevelCurve::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CurveCheck& c) { return c.pass; });
}

CurveType classify(const LimitConstants& c, double ell) {
    if (ell < std::min(c.C_star_plus, c.C_under_plus)) return ell <= c.C_star ? CurveType::type1i : CurveType::type1ii;
    if (ell >= std::max(c.C_star_plus, c.C_under_plus)) return CurveType::type4;
    return c.C_star_plus < c.C_under_plus ? CurveType::type2 : CurveType::type3;
}

double separability_residual(const Problem& problem, double rho) {
    const auto& grid = problem.space();
    const int n = problem.components();
    const StaticField hat = temporal_average(problem.A, problem.time);
    const GridFunction phi = elliptic_principal(hat, rho, problem.D, grid).eigenfunction;
    const auto w = trapezoid_weights(grid);
    double phi_sq = 0.0;
    for (int j = 0; j < grid.nodes; ++j)
        for (int i = 0; i < n; ++i) phi_sq += w[j] * phi(i, j) * phi(i, j);
    double res = 0.0, total = 0.0;
    std::vector<double> r(static_cast<size_t>(n) * grid.nodes);
    for (int m = 0; m < problem.time.steps; ++m) {
        const double t = problem.time.t(m);
        double proj = 0.0;
        for (int j = 0; j < grid.nodes; ++j) {
            const SmallMat diff = problem.A.eval(j, t) - hat[j];
            for (int i = 0; i < n; ++i) {
                double s = 0.0;
                for (int k = 0; k < n; ++k) s += diff(i, k) * phi(k, j);
                r[i * grid.nodes + j] = s;
                proj += w[j] * s * phi(i, j);
            }
        }
        const double g = proj / phi_sq;
        for (int j = 0; j < grid.nodes; ++j)
            for (int i = 0; i < n; ++i) {
                const double v = r[i * grid.nodes + j];
                total += w[j] * v * v;
                res += w[j] * (v - g * phi(i, j)) * (v - g * phi(i, j));
            }
    }
    return total > 0 ? std::sqrt(res / total) : 0.0;
}

namespace {

CurveCheck make_check(std::string name, double value, double target, double tol) {
    return {std::move(name), value, target, tol, std::abs(value - target) <= tol};
}

std::vector<double> log_space(double a, double b, int count) {
    std::vector<double> v;
    if (count <= 0 || !(b > a)) return v;
    if (count == 1) return {std::sqrt(a * b)};
    for (int k = 0; k < count; ++k) v.push_back(a * std::pow(b / a, static_cast<double>(k) / (count - 1)));
    return v;
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t k = 0; k < x.size(); ++k) {
        sx += x[k];
        sy += y[k];
        sxx += x[k] * x[k];
        sxy += x[k] * y[k];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

LevelCurve trace_level_set(const SpectralOracle& o, double ell, const TracePolicy& policy) {
    const auto& c = o.constants();
    if (!(c.C_under < ell && ell < c.C_bar)) {
        std::ostringstream msg;
        msg << "level " << ell << " outside (C_under, C_bar) = (" << c.C_under << ", " << c.C_bar << ")";
        fail(ErrorKind::range, msg.str());
    }
    if (!policy.allow_separatrix) {
        for (double k : {c.C_under, c.C_star, c.C_star_plus, c.C_under_plus, c.C_bar})
            if (std::abs(ell - k) <= policy.separatrix_gap) {
                std::ostringstream msg;
                msg << "level " << ell << " lies within " << policy.separatrix_gap << " of the constant " << k;
                fail(ErrorKind::range, msg.str());
            }
    }

    LevelCurve curve;
    curve.ell = ell;
    const double ftol = 1e-6 * (1 + std::abs(ell));
    if (c.C_under < ell && ell < c.C_under_plus) curve.rho_ell = rho_ell(o, ell).value;
    if (c.C_star_plus < ell && ell < c.C_bar) curve.rho_under_ell = rho_under_ell(o, ell).value;
    if (curve.rho_ell)
        curve.checks.push_back(make_check("lambda_under(rho_ell) = ell", o.lambda_under(*curve.rho_ell), ell, 1e-6));
    if (curve.rho_under_ell)
        curve.checks.push_back(
            make_check("lambda_bar(rho_under_ell) = ell", o.lambda_bar(*curve.rho_under_ell), ell, 1e-6));

    // Degenerate case: the level set is the vertical line rho = rho_ell.
    if (curve.rho_ell && curve.rho_under_ell &&
        std::abs(*curve.rho_ell - *curve.rho_under_ell) <= 1e-5 * *curve.rho_ell) {
        curve.type = CurveType::vertical_line;
        curve.left = curve.right = EndKind::finite;
        curve.ns_residual = separability_residual(o.problem(), *curve.rho_ell);
        curve.checks.push_back(make_check("separable time dependence", curve.ns_residual, 0.0, 1e-6));
        for (double w : {0.1, 1.0, 10.0})
            curve.samples.push_back({*curve.rho_ell, w, o.lambda(w, *curve.rho_ell)});
        double worst = 0.0;
        for (const auto& s : curve.samples) worst = std::max(worst, std::abs(s.lambda_check - ell));
        curve.checks.push_back(make_check("lambda = ell along the line", worst, 0.0, 1e-3));
        return curve;
    }

    curve.type = classify(c, ell);
    const bool left_zero = curve.type == CurveType::type1i || curve.type == CurveType::type1ii ||
                           curve.type == CurveType::type3;
    const bool right_finite = curve.type != CurveType::type3 && curve.type != CurveType::type4;
    curve.left = left_zero ? EndKind::zero : EndKind::finite;
    curve.right = right_finite ? EndKind::finite : EndKind::infinite;
    if (right_finite && !curve.rho_ell) fail(ErrorKind::convergence, "rho_ell could not be located");
    if (!left_zero && !curve.rho_under_ell) fail(ErrorKind::convergence, "rho_under_ell could not be located");

    // Sample positions.
    const double lo = !left_zero                          ? *curve.rho_under_ell * 1.25
                      : curve.type == CurveType::type1i ? policy.rho_min_1i
                                                        : policy.rho_min;
    const double hi = right_finite ? *curve.rho_ell / 1.25 : policy.rho_max;
    std::vector<double> rhos = log_space(lo, hi, policy.interior);
    if (right_finite)
        for (int k = 1; k <= policy.refine; ++k) rhos.push_back(*curve.rho_ell * (1 - 0.2 * std::pow(0.25, k)));
    if (curve.type == CurveType::type1i) {
        const double a = policy.fit_decade_low > 0 ? policy.fit_decade_low : lo;
        for (double r : {a, a * std::sqrt(10.0), 10 * a}) rhos.push_back(r);
    }
    std::sort(rhos.begin(), rhos.end());
    rhos.erase(std::unique(rhos.begin(), rhos.end()), rhos.end());

    // Sequential sweep from the well-posed end, each root warm-started from its
    // neighbour; independent brackets would cost about twice as many solves.
    std::vector<OmegaCrossing> found(rhos.size());
    double guess = 0.0;
    auto visit = [&](size_t k) {
        found[k] = omega_ell(o, ell, rhos[k], ftol / 2, guess);
        if (found[k].omega) guess = *found[k].omega;
    };
    if (left_zero)
        for (size_t k = 0; k < rhos.size(); ++k) visit(k);
    else
        for (size_t k = rhos.size(); k-- > 0;) visit(k);
    int missing = 0;
    for (size_t k = 0; k < rhos.size(); ++k) {
        if (found[k].omega) curve.samples.push_back({rhos[k], *found[k].omega, found[k].lambda});
        // Near rho_under_ell omega_ell may exceed the bracket; inverse sampling covers it.
        else if (left_zero || rhos[k] > 2 * *curve.rho_under_ell) ++missing;
    }
    curve.checks.push_back(make_check("interior samples without crossing", missing, 0, 0));

    // Inverse sampling toward rho_under_ell: fix omega, solve for rho.
    if (!left_zero && !curve.samples.empty()) {
        std::vector<CurveSample> extra(policy.inverse_omegas.size());
        std::vector<char> ok(extra.size(), 0);
        for_each_index(static_cast<int>(extra.size()), policy.execution, [&](int k) {
            const double w = policy.inverse_omegas[k];
            const auto it = std::find_if(curve.samples.begin(), curve.samples.end(),
                                         [&](const CurveSample& s) { return s.omega < w; });
            if (it == curve.samples.end()) return;
            auto f = [&](double r) { return o.lambda(w, r); };
            const double a = *curve.rho_under_ell, b = it->rho;
            const double fa = f(a), fb = f(b);
            if (!(fa <= ell && ell <= fb)) return;
            const RootResult r = solve_monotone(f, ell, a, b, BracketScale::logarithmic, ftol / 2, 1e-13, fa, fb);
            extra[k] = {r.x, w, r.fx};
            ok[k] = 1;
        });
        for (size_t k = 0; k < extra.size(); ++k)
            if (ok[k]) curve.samples.push_back(extra[k]);
        std::sort(curve.samples.begin(), curve.samples.end(),
                  [](const CurveSample& a, const CurveSample& b) { return a.rho < b.rho; });
    }
    if (curve.samples.size() < 3) fail(ErrorKind::convergence, "fewer than three level-set samples");

    double worst = 0.0, omega_max = 0.0;
    for (const auto& s : curve.samples) {
        worst = std::max(worst, std::abs(s.lambda_check - ell));
        omega_max = std::max(omega_max, s.omega);
    }
    curve.checks.push_back(make_check("max |lambda(omega_ell, rho) - ell|", worst, 0.0, ftol));
    const auto& S = curve.samples;
    const size_t last = S.size() - 1;

    if (right_finite) {
        const bool falling = S[last].omega < S[last - 1].omega && S[last - 1].omega < S[last - 2].omega;
        curve.checks.push_back({"omega -> 0 at rho_ell", S[last].omega / omega_max, 0.0, 0.1,
                                falling && S[last].omega <= 0.1 * omega_max});
    }
    if (!left_zero) {
        const bool rising = S[0].omega > S[1].omega && S[1].omega > S[2].omega;
        curve.checks.push_back({"omega -> infinity at rho_under_ell", S[0].omega, 100.0, 0.0,
                                rising && S[0].omega > 100.0});
    }
    if (curve.type == CurveType::type1i) {
        std::vector<double> lx, ly;
        curve.c_low = INFINITY;
        curve.c_high = 0.0;
        for (size_t k = 0; k < 3; ++k) {
            lx.push_back(std::log(S[k].rho));
            ly.push_back(std::log(S[k].omega));
            const double ratio = S[k].omega / std::sqrt(S[k].rho);
            curve.c_low = std::min(curve.c_low, ratio);
            curve.c_high = std::max(curve.c_high, ratio);
        }
        curve.exponent = fit_slope(lx, ly);
        curve.checks.push_back(make_check("small-rho exponent", *curve.exponent, 0.5, 0.1));
    }
    if (curve.type == CurveType::type1ii || curve.type == CurveType::type3) {
        curve.h_under_inverse = o.h_under_inverse(ell);
        if (curve.h_under_inverse)
            curve.checks.push_back(make_check("omega_ell(rho_min) vs h_under^-1", S[0].omega, *curve.h_under_inverse,
                                              2e-2 * (1 + std::abs(*curve.h_under_inverse))));
        else
            curve.checks.push_back({"h_under^-1 exists", 0, 0, 0, false});
    }
    if (curve.type == CurveType::type3 || curve.type == CurveType::type4) {
        curve.h_bar_inverse = o.h_bar_inverse(ell);
        if (curve.h_bar_inverse)
            curve.checks.push_back(make_check("omega_ell(rho_max) vs h_bar^-1", S[last].omega, *curve.h_bar_inverse,
                                              2e-2 * (1 + std::abs(*curve.h_bar_inverse))));
        else
            curve.checks.push_back({"h_bar^-1 exists", 0, 0, 0, false});
    }
    return curve;
}

// ---------------------------------------------------------------- non-monotonicity

double omega_star(const SpectralOracle& o, const TracePolicy& policy) {
    const auto& c = o.constants();
    const double ell = c.C_star;
    const auto top = rho_ell(o, ell);
    if (!top) fail(ErrorKind::range, "the C_star level curve has no finite rho endpoint: " + top.reason);
    // omega_{C*} vanishes at both ends of (0, rho_ell); search its maximum in log rho.
    auto omega_at = [&](double logr) {
        const auto x = omega_ell(o, ell, std::exp(logr));
        return x.omega ? *x.omega : 0.0;
    };
    const std::vector<double> grid = log_space(*top.value * 1e-3, *top.value / 1.1, 9);
    std::vector<double> vals(grid.size());
    for_each_index(static_cast<int>(grid.size()), policy.execution,
                   [&](int k) { vals[k] = omega_at(std::log(grid[k])); });
    const size_t best = std::max_element(vals.begin(), vals.end()) - vals.begin();
    double a = std::log(grid[best > 0 ? best - 1 : 0]);
    double b = std::log(grid[std::min(best + 1, grid.size() - 1)]);
    // Golden-section refinement.
    const double g = 0.5 * (std::sqrt(5.0) - 1);
    double x1 = b - g * (b - a), x2 = a + g * (b - a);
    double f1 = omega_at(x1), f2 = omega_at(x2);
    for (int it = 0; it < 8; ++it) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = omega_at(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = omega_at(x1);
        }
    }
    return std::max({vals[best], f1, f2});
}

DipReport nonmonotonicity_probe(const SpectralOracle& o, double omega, double omega_star_value,
                                const ProbePolicy& policy) {
    DipReport rep;
    rep.omega = omega;
    rep.omega_star = omega_star_value;
    const auto& c = o.constants();
    if (c.C_star - c.C_under <= 1e-6) {
        rep.applicable = false;
        rep.note = "inapplicable: C_star - C_under <= 1e-6";
        return rep;
    }
    const std::vector<double> rhos = log_space(policy.rho_min, policy.rho_max, policy.scan_points);
    std::vector<double> lam(rhos.size());
    for_each_index(static_cast<int>(rhos.size()), policy.execution,
                   [&](int k) { lam[k] = o.lambda(omega, rhos[k]); });
    for (size_t k = 0; k < rhos.size(); ++k) rep.scan.emplace_back(rhos[k], lam[k]);

    const double target = c.C_star;
    size_t down = 0, up = 0;
    for (size_t k = 1; k < lam.size() && !down; ++k)
        if (lam[k - 1] >= target && lam[k] < target) down = k;
    for (size_t k = down + 1; down && k < lam.size() && !up; ++k)
        if (lam[k - 1] < target && lam[k] >= target) up = k;
    if (!down || !up) {
        rep.note = omega >= omega_star_value ? "no dip below C_star (omega above omega_star)"
                                             : "no dip below C_star found on the scan";
        return rep;
    }
    const double ftol = 1e-7;
    auto neg = [&](double r) { return -o.lambda(omega, r); };
    auto pos = [&](double r) { return o.lambda(omega, r); };
    const RootResult r1 = solve_monotone(neg, -target, rhos[down - 1], rhos[down], BracketScale::logarithmic,
                                         ftol, 1e-13, -lam[down - 1], -lam[down]);
    const RootResult r2 = solve_monotone(pos, target, rhos[up - 1], rhos[up], BracketScale::logarithmic, ftol,
                                         1e-13, lam[up - 1], lam[up]);
    rep.rho_under = r1.x;
    rep.rho_over = r2.x;
    rep.crossing_error = std::max(std::abs(r1.fx + target), std::abs(r2.fx - target));
    const size_t dip = std::min_element(lam.begin() + down, lam.begin() + up) - lam.begin();
    rep.dip_rho = rhos[dip];
    rep.dip_lambda = lam[dip];
    rep.depth = target - lam[dip];

    const double h0 = o.h_under(omega);
    rep.eta_hat = INFINITY;
    for (double r : policy.eta_rhos) rep.eta_hat = std::min(rep.eta_hat, (o.lambda(omega, r) - h0) / std::sqrt(r));
    rep.note = "dip found";
    return rep;
}

}  // namespace perieig
