#include "perieig/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "perieig/config.hpp"
#include "perieig/hj.hpp"
#include "perieig/levelset.hpp"
#include "perieig/parabolic.hpp"
#include "perieig/persistence.hpp"

namespace perieig {

Check at_most(std::string label, double value, double bound) {
    return {std::move(label), value, bound, "<=", value <= bound};
}

Check at_least(std::string label, double value, double bound) {
    return {std::move(label), value, bound, ">=", value >= bound};
}

Check holds(std::string label, bool ok) { return {std::move(label), ok ? 1.0 : 0.0, 1.0, "is", ok}; }

bool CriterionReport::pass() const {
    if (!error.empty() || checks.empty()) return false;
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

const std::map<int, std::string>& criterion_titles() {
    static const std::map<int, std::string> titles{
        {1, "exactness on a constant matrix"},
        {2, "separable oracle and grid refinement"},
        {3, "monotone in omega"},
        {4, "ordering of the limit constants"},
        {5, "global bounds C_under <= lambda <= C_bar"},
        {6, "lambda >= C(omega / sqrt rho), C nondecreasing"},
        {7, "single-parameter limits"},
        {8, "regime transition along rho -> 0"},
        {9, "energy identity"},
        {10, "level-set classification"},
        {11, "non-monotone dependence on rho"},
        {12, "persistence region verdicts"},
    };
    return titles;
}

std::map<std::string, std::string> read_reference(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::io, "cannot read reference file " + path);
    std::map<std::string, std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        line = line.substr(0, line.find('#'));
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return out;
}

std::string format_report(const CriterionReport& r, bool details) {
    std::ostringstream out;
    out << (r.pass() ? "[PASS] " : "[FAIL] ") << std::setw(2) << r.id << " " << r.title << " ("
        << std::fixed << std::setprecision(1) << r.seconds << " s)\n";
    if (!details) return out.str();
    out << std::defaultfloat << std::setprecision(6);
    for (const auto& c : r.checks) {
        out << "       " << (c.pass ? "ok   " : "FAIL ") << c.label;
        if (c.relation == "is") out << "\n";
        else out << ": " << c.value << " " << c.relation << " " << c.bound << "\n";
    }
    if (!r.error.empty()) out << "       error: " << r.error << "\n";
    return out.str();
}

namespace {

struct Fixture {
    ProblemConfig cfg;
    Problem problem;
};

class Suite {
public:
    explicit Suite(std::string dir) : dir_(std::move(dir)) {}

    std::string path(const std::string& name) const { return dir_ + "/" + name; }
    Fixture fixture(const std::string& name) const {
        auto cfg = load_config(path(name + ".cfg"));
        return {cfg, build_problem(cfg)};
    }
    std::map<std::string, std::string> reference(const std::string& name) const {
        return read_reference(path(name + ".ref"));
    }

    void c1(CriterionReport& r) const;
    void c2(CriterionReport& r) const;
    void c3(CriterionReport& r) const;
    void c4(CriterionReport& r) const;
    void c5(CriterionReport& r) const;
    void c6(CriterionReport& r) const;
    void c7(CriterionReport& r) const;
    void c8(CriterionReport& r) const;
    void c9(CriterionReport& r) const;
    void c10(CriterionReport& r) const;
    void c11(CriterionReport& r) const;
    void c12(CriterionReport& r) const;

private:
    std::string dir_;
};

SolveOptions quiet(const ProblemConfig& cfg) {
    SolveOptions o = solve_options(cfg);
    o.eigenfunction = false;
    return o;
}

std::vector<double> logspace(double a, double b, int count) {
    std::vector<double> v(count);
    for (int i = 0; i < count; ++i) v[i] = std::pow(10.0, a + (b - a) * i / (count - 1));
    return v;
}

std::string point(double omega, double rho) {
    std::ostringstream s;
    s << "(omega " << omega << ", rho " << rho << ")";
    return s.str();
}

void Suite::c1(CriterionReport& r) const {
    const auto f = fixture("constant");
    const auto o = quiet(f.cfg);
    double worst = 0.0;
    std::string where;
    for (double w : {0.1, 1.0, 10.0})
        for (double rho : {0.1, 1.0, 10.0}) {
            const double e = std::abs(principal_eigenvalue(f.problem, w, rho, o).lambda + 1.0);
            if (e >= worst) worst = e, where = point(w, rho);
        }
    r.checks.push_back(at_most("max |lambda + 1| over 9 points, worst at " + where, worst, 1e-6));
}

void Suite::c2(CriterionReport& r) const {
    auto f = fixture("separable");
    const auto ref = reference("separable");
    const double w = std::stod(ref.at("omega")), rho = std::stod(ref.at("rho"));
    const double exact = std::stod(ref.at("lambda"));
    auto defect = [&](int refine) {
        ProblemConfig cfg = f.cfg;
        cfg.space.nodes = (f.cfg.space.nodes - 1) * refine + 1;
        cfg.time.steps = f.cfg.time.steps * refine;
        SolveOptions o = quiet(cfg);
        o.adaptive_steps = false;
        return std::abs(principal_eigenvalue(build_problem(cfg), w, rho, o).lambda - exact);
    };
    const double coarse = defect(1), fine = defect(2);
    r.checks.push_back(at_most("defect at N = 201, M = 512 " + point(w, rho), coarse, 5e-4));
    r.checks.push_back(at_least("defect ratio after halving h and dt", coarse / fine, 3.0));
}

void Suite::c3(CriterionReport& r) const {
    const auto f = fixture("generic");
    const auto omegas = logspace(-2.0, 2.0, 20);
    for (double rho : {0.05, 0.5, 5.0}) {
        double worst = 0.0, prev = -INFINITY;
        for (double w : omegas) {
            SolveOptions o = quiet(f.cfg);
            o.adaptive_steps = false;
            o.steps = sweep_steps(f.problem, w, omegas.front(), rho, f.problem.time.steps, o.step_tol);
            const double l = principal_eigenvalue(f.problem, w, rho, o).lambda;
            worst = std::max(worst, prev - l);
            prev = l;
        }
        std::ostringstream label;
        label << "largest decrease over 20 omega at rho " << rho;
        r.checks.push_back(at_most(label.str(), worst, 1e-8));
    }
}

void Suite::c4(CriterionReport& r) const {
    const char* names[] = {"constant",   "separable",      "x_independent",  "t_independent",   "generic",
                           "levelset_a", "levelset_b",     "mutation_empty", "mutation_full",   "mutation_bounded"};
    std::map<std::string, LimitConstants> all;
    double violation = 0.0, mismatch = 0.0;
    for (const char* name : names) {
        const auto f = fixture(name);
        const auto c = limit_constants(f.problem.A, f.problem.time);
        all[name] = c;
        violation = std::max(violation, c.ordering_violation());
        const auto ref = reference(name);
        const std::pair<const char*, double> values[] = {{"C_under", c.C_under},
                                                         {"C_star", c.C_star},
                                                         {"C_star_plus", c.C_star_plus},
                                                         {"C_under_plus", c.C_under_plus},
                                                         {"C_bar", c.C_bar}};
        for (const auto& [key, v] : values) mismatch = std::max(mismatch, std::abs(v - std::stod(ref.at(key))));
    }
    r.checks.push_back(at_most("ordering violation over 10 fixtures", violation, 1e-6));
    r.checks.push_back(at_most("max deviation from the reference constants", mismatch, 1e-6));
    const auto& a = all["levelset_a"];
    const auto& b = all["levelset_b"];
    r.checks.push_back(at_least("levelset_a: C_under_plus - C_star_plus", a.C_under_plus - a.C_star_plus, 1e-6));
    r.checks.push_back(at_least("levelset_b: C_star_plus - C_under_plus", b.C_star_plus - b.C_under_plus, 1e-6));
}

void Suite::c5(CriterionReport& r) const {
    const auto f = fixture("generic");
    const auto c = limit_constants(f.problem.A, f.problem.time);
    const auto o = quiet(f.cfg);
    double low = INFINITY, high = -INFINITY;
    for (double w : logspace(-2.0, 2.0, 8))
        for (double rho : logspace(-3.0, 2.0, 8)) {
            const double l = principal_eigenvalue(f.problem, w, rho, o).lambda;
            low = std::min(low, l - c.C_under);
            high = std::max(high, l - c.C_bar);
        }
    r.checks.push_back(at_least("min lambda - C_under on the 8x8 grid", low, -1e-3));
    r.checks.push_back(at_most("max lambda - C_bar on the 8x8 grid", high, 1e-3));
}

void Suite::c6(CriterionReport& r) const {
    const auto f = fixture("generic");
    const ErgodicSolver solver(f.problem);
    double worst_drop = 0.0, prev = -INFINITY;
    for (double theta : {0.1, 0.3, 1.0, 3.0, 10.0}) {
        const double C = solver.solve(theta).C;
        worst_drop = std::max(worst_drop, prev - C);
        prev = C;
    }
    r.checks.push_back(at_most("largest decrease of C over theta in {0.1, 0.3, 1, 3, 10}", worst_drop, 2e-3));
    const auto o = quiet(f.cfg);
    double slack = INFINITY;
    std::string where;
    for (double w : {0.3, 1.0, 3.0})
        for (double rho : {0.1, 1.0, 10.0}) {
            const double s = principal_eigenvalue(f.problem, w, rho, o).lambda -
                             solver.solve_or_limit(w / std::sqrt(rho)).C;
            if (s <= slack) slack = s, where = point(w, rho);
        }
    r.checks.push_back(at_least("min lambda - C(omega / sqrt rho), at " + where, slack, -5e-3));
}

void Suite::c7(CriterionReport& r) const {
    const auto f = fixture("generic");
    const SpectralOracle o(f.problem, quiet(f.cfg));
    for (double rho : {0.1, 1.0}) {
        std::ostringstream a, b;
        a << "|lambda(1e3, rho) - lambda_bar(rho)| at rho " << rho;
        b << "|lambda(1e-3, rho) - lambda_under(rho)| at rho " << rho;
        r.checks.push_back(at_most(a.str(), std::abs(o.lambda(1e3, rho) - o.lambda_bar(rho)), 2e-2));
        r.checks.push_back(at_most(b.str(), std::abs(o.lambda(1e-3, rho) - o.lambda_under(rho)), 2e-2));
    }
    for (double w : {0.5, 2.0}) {
        std::ostringstream a, b;
        a << "|lambda(omega, 1e-4) - h_under(omega)| at omega " << w;
        b << "|lambda(omega, 1e3) - h_bar(omega)| at omega " << w;
        r.checks.push_back(at_most(a.str(), std::abs(o.lambda(w, 1e-4) - o.h_under(w)), 2e-2));
        r.checks.push_back(at_most(b.str(), std::abs(o.lambda(w, 1e3) - o.h_bar(w)), 2e-2));
    }
}

void Suite::c8(CriterionReport& r) const {
    const auto f = fixture("generic");
    const ErgodicSolver solver(f.problem);
    const auto& c = solver.constants();
    const double C1 = solver.solve(1.0).C;
    const auto o = quiet(f.cfg);
    struct Path {
        const char* name;
        double exponent, target;
        std::vector<double> gaps;
    };
    std::vector<Path> paths{{"|lambda(rho, rho) - C_under|", 1.0, c.C_under, {}},
                            {"|lambda(rho^(1/4), rho) - C_star|", 0.25, c.C_star, {}},
                            {"|lambda(rho^(1/2), rho) - C(1)|", 0.5, C1, {}}};
    for (double rho : {1e-1, 1e-2, 1e-3})
        for (auto& p : paths)
            p.gaps.push_back(std::abs(principal_eigenvalue(f.problem, std::pow(rho, p.exponent), rho, o).lambda - p.target));
    for (const auto& p : paths) {
        const bool decreasing = p.gaps[1] < p.gaps[0] && p.gaps[2] < p.gaps[1];
        std::ostringstream seq;
        seq << p.name << " decreasing over rho = 1e-1, 1e-2, 1e-3 (" << p.gaps[0] << ", " << p.gaps[1] << ", "
            << p.gaps[2] << ")";
        r.checks.push_back(holds(seq.str(), decreasing));
        r.checks.push_back(at_most(std::string(p.name) + " at rho = 1e-3", p.gaps[2], 3e-2));
    }
}

void Suite::c9(CriterionReport& r) const {
    auto identity = [&](const std::string& name) {
        const auto f = fixture(name);
        SolveOptions o = solve_options(f.cfg);
        auto res = principal_eigenvalue(f.problem, 1.0, 0.5, o);
        adjoint_eigenpair(f.problem, res, o);
        return energy_identity_residual(f.problem, res);
    };
    const auto g = identity("generic");
    r.checks.push_back(at_most("generic: relative residual at (omega 1, rho 0.5)", g.relative, 1e-4));
    const auto t = identity("t_independent");
    r.checks.push_back(at_most("t_independent: |time-derivative side|", std::abs(t.lhs), 1e-8));
    r.checks.push_back(at_most("t_independent: |entropy side|", std::abs(t.rhs), 1e-8));
}

void curve_checks(CriterionReport& r, const std::string& prefix, const LevelCurve& curve) {
    int failed = 0;
    for (const auto& c : curve.checks)
        if (!c.pass) {
            ++failed;
            std::ostringstream s;
            s << prefix << c.name << " (value " << c.value << ", target " << c.target << ", tol " << c.tolerance << ")";
            r.checks.push_back(holds(s.str(), false));
        }
    std::ostringstream s;
    s << prefix << "type " << to_string(curve.type) << ", " << curve.checks.size() << " endpoint/asymptote checks";
    r.checks.push_back(holds(s.str(), failed == 0 && !curve.checks.empty()));
}

void Suite::c10(CriterionReport& r) const {
    const auto a = fixture("levelset_a");
    const auto c = limit_constants(a.problem.A, a.problem.time);
    r.checks.push_back(holds("levelset_a: C_under < C_star < C_star_plus < C_under_plus < C_bar",
                             c.C_under < c.C_star && c.C_star < c.C_star_plus && c.C_star_plus < c.C_under_plus &&
                                 c.C_under_plus < c.C_bar));
    const SpectralOracle oa(a.problem, quiet(a.cfg));
    std::set<std::string> tags;
    for (double ell : a.cfg.level.ell) {
        const auto curve = trace_level_set(oa, ell, trace_policy(a.cfg));
        tags.insert(to_string(curve.type));
        std::ostringstream prefix;
        prefix << "levelset_a, ell " << ell << ": ";
        curve_checks(r, prefix.str(), curve);
        if (curve.type == CurveType::type1i) {
            r.checks.push_back(at_least(prefix.str() + "small-rho exponent", curve.exponent.value_or(NAN), 0.4));
            r.checks.push_back(at_most(prefix.str() + "small-rho exponent", curve.exponent.value_or(NAN), 0.6));
        }
    }
    r.checks.push_back(holds("levelset_a: tags are exactly {1i, 1ii, 2, 4}",
                             tags == std::set<std::string>{to_string(CurveType::type1i), to_string(CurveType::type1ii),
                                                           to_string(CurveType::type2), to_string(CurveType::type4)}));

    const auto b = fixture("levelset_b");
    const auto cb = limit_constants(b.problem.A, b.problem.time);
    const SpectralOracle ob(b.problem, quiet(b.cfg));
    for (double ell : b.cfg.level.ell) {
        std::ostringstream prefix;
        prefix << "levelset_b, ell " << ell << ": ";
        r.checks.push_back(holds(prefix.str() + "ell in (C_under_plus, C_star_plus)",
                                 cb.C_under_plus < ell && ell < cb.C_star_plus));
        const auto curve = trace_level_set(ob, ell, trace_policy(b.cfg));
        curve_checks(r, prefix.str(), curve);
        r.checks.push_back(holds(prefix.str() + "type 3", curve.type == CurveType::type3));
    }
}

void Suite::c11(CriterionReport& r) const {
    const auto a = fixture("levelset_a");
    const SpectralOracle o(a.problem, quiet(a.cfg));
    const double star = omega_star(o, trace_policy(a.cfg));
    const auto probe = nonmonotonicity_probe(o, 0.5 * star, star);
    std::ostringstream head;
    head << "omega_* = " << star << "; both crossings with C_star found, rho_under < rho_over";
    r.checks.push_back(holds(head.str(), probe.applicable && probe.rho_under && probe.rho_over &&
                                             *probe.rho_under < *probe.rho_over));
    r.checks.push_back(at_most("max |lambda - C_star| at the crossings", probe.crossing_error, 1e-5));
    r.checks.push_back(at_least("dip depth between the crossings", probe.depth, 1e-3));
    r.checks.push_back(at_least("eta_hat", probe.eta_hat, 1e-12));
}

void Suite::c12(CriterionReport& r) const {
    for (const char* name : {"mutation_empty", "mutation_full", "mutation_bounded"}) {
        const auto cfg = load_config(path(std::string(name) + ".cfg"));
        const auto ref = reference(name);
        const auto model = build_mutation_model(cfg);
        const auto rep = persistence_region(model, trace_policy(cfg), quiet(cfg));
        const std::string prefix = std::string(name) + ": ";
        r.checks.push_back(holds(prefix + "verdict " + to_string(rep.verdict) + ", expected " + ref.at("verdict"),
                                 to_string(rep.verdict) == ref.at("verdict")));
        if (rep.verdict == RegionVerdict::bounded) {
            r.checks.push_back(holds(prefix + "case " + std::to_string(rep.case_index) + ", expected " + ref.at("case"),
                                     std::to_string(rep.case_index) == ref.at("case")));
            if (rep.curve) curve_checks(r, prefix + "boundary curve ", *rep.curve);
            else r.checks.push_back(holds(prefix + "boundary curve traced (" + rep.note + ")", false));
        }
    }
    bool rejected = false;
    std::string message = "accepted";
    try {
        (void)load_config(path("mutation_invalid.cfg"));
    } catch (const Error& e) {
        message = e.what();
        rejected = message.find("mutation structure violated") != std::string::npos;
        std::replace(message.begin(), message.end(), '\n', ' ');
    }
    r.checks.push_back(holds("mutation_invalid rejected by the row-balance check: " + message.substr(0, 120), rejected));
}

}  // namespace

std::vector<CriterionReport> run_verify(const VerifyOptions& options) {
    const Suite suite(options.fixture_dir);
    using Member = void (Suite::*)(CriterionReport&) const;
    const std::map<int, Member> members{{1, &Suite::c1}, {2, &Suite::c2},   {3, &Suite::c3},   {4, &Suite::c4},
                                        {5, &Suite::c5}, {6, &Suite::c6},   {7, &Suite::c7},   {8, &Suite::c8},
                                        {9, &Suite::c9}, {10, &Suite::c10}, {11, &Suite::c11}, {12, &Suite::c12}};
    for (int id : options.only)
        if (!members.count(id)) fail(ErrorKind::config, "no acceptance criterion " + std::to_string(id));
    std::vector<CriterionReport> out;
    for (const auto& [id, member] : members) {
        if (!options.only.empty() && !options.only.count(id)) continue;
        CriterionReport r;
        r.id = id;
        r.title = criterion_titles().at(id);
        const auto t0 = std::chrono::steady_clock::now();
        try {
            (suite.*member)(r);
        } catch (const std::exception& e) {
            r.error = e.what();
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (options.on_result) options.on_result(r);
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace perieig
