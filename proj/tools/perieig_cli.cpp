// perieig: principal eigenvalues of time-periodic cooperative systems.
//
//   perieig <subcommand> --config FILE [--out DIR] [--threads K] [overrides]
//
// Exit codes: 0 ok, 1 verification failure, 2 config error, 3 solver error.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "perieig/config.hpp"
#include "perieig/elliptic.hpp"
#include "perieig/floquet_ode.hpp"
#include "perieig/hj.hpp"
#include "perieig/levelset.hpp"
#include "perieig/output.hpp"
#include "perieig/parabolic.hpp"
#include "perieig/persistence.hpp"
#include "perieig/verify.hpp"

using namespace perieig;
using json = nlohmann::json;

namespace {

constexpr int kExitOk = 0, kExitVerify = 1, kExitConfig = 2, kExitSolver = 3;
constexpr const char* kOutEnv = "PERIEIG_OUT";

struct Flags {
    std::string config, out, omega, rho, theta, level, only, fixtures;
    int threads = 0;
    double tol = 0.0;
    bool quiet = false;
};

struct Context {
    ProblemConfig cfg;
    Problem problem;
    std::string out_dir;
    RunRecord record;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<double> values_or(const std::string& flag, const std::vector<double>& fallback, const char* what) {
    if (!flag.empty()) return parse_number_list(flag);
    if (fallback.empty()) fail(ErrorKind::config, std::string("no ") + what + " given (flag or config)");
    return fallback;
}

std::string output_dir(const Flags& f, const ProblemConfig& cfg) {
    if (!f.out.empty()) return f.out;
    if (const char* env = std::getenv(kOutEnv); env && *env) return env;
    if (!cfg.output_dir.empty()) return cfg.output_dir;
    return "out";
}

Context load(const Flags& f) {
    if (f.config.empty()) fail(ErrorKind::config, "--config is required");
    ProblemConfig cfg = load_config(f.config);
    if (f.tol > 0.0) cfg.solve.tol = f.tol;
    Problem p = build_problem(cfg);
    RunRecord record(fnv1a_hex(serialize_config(cfg)), kVersion);
    std::string out = output_dir(f, cfg);
    return {std::move(cfg), std::move(p), std::move(out), std::move(record)};
}

void finish(Context& c) {
    write_text(c.out_dir + "/run.json", c.record.dump() + "\n");
}

// ---------------------------------------------------------------- subcommands

int cmd_eigen(const Flags& f) {
    auto c = load(f);
    const auto t0 = std::chrono::steady_clock::now();
    SolveOptions o = solve_options(c.cfg);
    o.eigenfunction = false;
    CsvTable t{{"omega", "rho", "lambda", "steps", "cycles", "increment"}, {}};
    json results = json::array();
    for (double w : values_or(f.omega, c.cfg.sweep.omega, "omega"))
        for (double rho : values_or(f.rho, c.cfg.sweep.rho, "rho")) {
            const auto r = principal_eigenvalue(c.problem, w, rho, o);
            t.add({w, rho, r.lambda, double(r.steps), double(r.cycles), r.increment});
            results.push_back({{"omega", w}, {"rho", rho}, {"lambda", r.lambda}, {"method", r.method},
                               {"low_confidence", r.low_confidence}});
            std::cout << "lambda(" << format_number(w) << ", " << format_number(rho) << ") = " << format_number(r.lambda)
                      << "  [" << r.method << ", M = " << r.steps << ", cycles = " << r.cycles << "]\n";
        }
    write_csv(c.out_dir + "/eigen.csv", t);
    c.record.add("eigen", "ok", seconds_since(t0), results);
    finish(c);
    return kExitOk;
}

int cmd_ode(const Flags& f) {
    auto c = load(f);
    const auto t0 = std::chrono::steady_clock::now();
    OdeOptions opt;
    opt.steps = c.cfg.solve.ode_steps;
    const auto& grid = c.problem.space();
    CsvTable nodes{{"omega", "x", "h"}, {}}, summary{{"omega", "h_under", "h_bar"}, {}};
    json results = json::array();
    for (double w : values_or(f.omega, c.cfg.sweep.omega, "omega")) {
        const auto under = h_under(c.problem.A, w, opt);
        const double bar = h_bar(c.problem.A, w, opt);
        for (int j = 0; j < grid.nodes; ++j) nodes.add({w, grid.x(j), under.per_node[j]});
        summary.add({w, under.value, bar});
        results.push_back({{"omega", w}, {"h_under", under.value}, {"h_bar", bar}});
        std::cout << "omega " << format_number(w) << ": h_under = " << format_number(under.value)
                  << ", h_bar = " << format_number(bar) << "\n";
    }
    write_csv(c.out_dir + "/ode_nodes.csv", nodes);
    write_csv(c.out_dir + "/ode.csv", summary);
    c.record.add("ode", "ok", seconds_since(t0), results);
    finish(c);
    return kExitOk;
}

int cmd_elliptic(const Flags& f) {
    auto c = load(f);
    const auto t0 = std::chrono::steady_clock::now();
    CsvTable t{{"rho", "lambda_bar", "lambda_under"}, {}}, frozen{{"rho", "t", "lambda_0"}, {}};
    json results = json::array();
    for (double rho : values_or(f.rho, c.cfg.sweep.rho, "rho")) {
        const double bar = lambda_bar(c.problem, rho).lambda;
        const auto under = lambda_under(c.problem, rho);
        t.add({rho, bar, under.value});
        for (int m = 0; m < c.problem.time.steps; ++m) frozen.add({rho, c.problem.time.t(m), under.frozen[m]});
        results.push_back({{"rho", rho}, {"lambda_bar", bar}, {"lambda_under", under.value}});
        std::cout << "rho " << format_number(rho) << ": lambda_bar = " << format_number(bar)
                  << ", lambda_under = " << format_number(under.value) << "\n";
    }
    write_csv(c.out_dir + "/elliptic.csv", t);
    write_csv(c.out_dir + "/frozen.csv", frozen);
    c.record.add("elliptic", "ok", seconds_since(t0), results);
    finish(c);
    return kExitOk;
}

int cmd_hj(const Flags& f) {
    auto c = load(f);
    const auto t0 = std::chrono::steady_clock::now();
    ErgodicOptions opt;
    opt.max_steps = c.cfg.solve.hj_max_steps;
    opt.drift_tol = c.cfg.solve.hj_drift_tol;
    const ErgodicSolver solver(c.problem);
    CsvTable t{{"theta", "C", "C_coarse", "C_fine", "periods"}, {}};
    json results = json::array();
    std::string status = "ok";
    for (double theta : values_or(f.theta, c.cfg.sweep.theta, "theta")) {
        const auto r = solver.solve_or_limit(theta, opt);
        t.add({theta, r.C, r.C_coarse, r.C_fine, double(r.periods)});
        if (r.status == ErgodicStatus::oscillating || r.status == ErgodicStatus::budget_exhausted)
            status = "low-confidence";
        results.push_back({{"theta", theta}, {"C", r.C}, {"status", to_string(r.status)}});
        std::cout << "C(" << format_number(theta) << ") = " << format_number(r.C) << "  [" << to_string(r.status)
                  << "]\n";
    }
    write_csv(c.out_dir + "/hj.csv", t);
    c.record.add("hj", status, seconds_since(t0), results);
    finish(c);
    return kExitOk;
}

int cmd_constants(const Flags& f) {
    auto c = load(f);
    const auto t0 = std::chrono::steady_clock::now();
    const auto k = limit_constants(c.problem.A, c.problem.time);
    CsvTable t{{"C_under", "C_star", "C_star_plus", "C_under_plus", "C_bar"}, {}};
    t.add({k.C_under, k.C_star, k.C_star_plus, k.C_under_plus, k.C_bar});
    write_csv(c.out_dir + "/constants.csv", t);
    std::cout << "C_under      = " << format_number(k.C_under) << "\nC_star       = " << format_number(k.C_star)
              << "\nC_star_plus  = " << format_number(k.C_star_plus)
              << "\nC_under_plus = " << format_number(k.C_under_plus) << "\nC_bar        = " << format_number(k.C_bar)
              << "\n";
    c.record.add("constants", "ok", seconds_since(t0),
                 {{"C_under", k.C_under}, {"C_star", k.C_star}, {"C_star_plus", k.C_star_plus},
                  {"C_under_plus", k.C_under_plus}, {"C_bar", k.C_bar}});
    finish(c);
    return kExitOk;
}

json curve_json(const LevelCurve& curve) {
    json checks = json::array();
    for (const auto& k : curve.checks)
        checks.push_back({{"name", k.name}, {"value", k.value}, {"target", k.target}, {"pass", k.pass}});
    json j{{"ell", curve.ell}, {"type", to_string(curve.type)}, {"checks", checks}, {"passed", curve.passed()}};
    if (curve.exponent) j["exponent"] = *curve.exponent;
    return j;
}

void write_curve(const std::string& path, const LevelCurve& curve) {
    CsvTable t{{"rho", "omega", "lambda"}, {}};
    for (const auto& s : curve.samples) t.add({s.rho, s.omega, s.lambda_check});
    write_csv(path, t);
}

Polyline polyline(const LevelCurve& curve, const std::string& label) {
    Polyline p{label, {}};
    for (const auto& s : curve.samples) p.points.emplace_back(s.rho, s.omega);
    return p;
}

int cmd_levelset(const Flags& f) {
    auto c = load(f);
    const auto t0 = std::chrono::steady_clock::now();
    SolveOptions o = solve_options(c.cfg);
    o.eigenfunction = false;
    const SpectralOracle oracle(c.problem, o);
    std::vector<Polyline> lines;
    json results = json::array();
    bool all_passed = true;
    for (double ell : values_or(f.level, c.cfg.level.ell, "level")) {
        const auto curve = trace_level_set(oracle, ell, trace_policy(c.cfg));
        const std::string name = "level_" + format_number(ell);
        write_curve(c.out_dir + "/" + name + ".csv", curve);
        lines.push_back(polyline(curve, "ell = " + format_number(ell) + " (" + to_string(curve.type) + ")"));
        results.push_back(curve_json(curve));
        all_passed = all_passed && curve.passed();
        std::cout << "ell " << format_number(ell) << ": type " << to_string(curve.type) << ", " << curve.samples.size()
                  << " samples, checks " << (curve.passed() ? "passed" : "FAILED") << "\n";
        for (const auto& k : curve.checks)
            if (!k.pass)
                std::cout << "  failed: " << k.name << " (" << format_number(k.value) << " vs "
                          << format_number(k.target) << ")\n";
    }
    write_text(c.out_dir + "/levelsets.svg", plane_svg("level sets of lambda", nullptr, {}, lines));
    c.record.add("levelset", all_passed ? "ok" : "low-confidence", seconds_since(t0), results);
    finish(c);
    return kExitOk;
}

int cmd_sweep(const Flags& f) {
    auto c = load(f);
    const auto t0 = std::chrono::steady_clock::now();
    auto omegas = values_or(f.omega, c.cfg.sweep.omega, "omega");
    auto rhos = values_or(f.rho, c.cfg.sweep.rho, "rho");
    std::sort(omegas.begin(), omegas.end());
    std::sort(rhos.begin(), rhos.end());
    PlaneField field{rhos, omegas, std::vector<double>(omegas.size() * rhos.size())};
    // Each omega column shares the smallest omega's M * omega, so the
    // splitting error cannot make a column decrease.
    for (size_t io = 0; io < omegas.size(); ++io)
        for (size_t ir = 0; ir < rhos.size(); ++ir) {
            SolveOptions o = solve_options(c.cfg);
            o.eigenfunction = false;
            o.adaptive_steps = false;
            o.steps = sweep_steps(c.problem, omegas[io], omegas.front(), rhos[ir], c.problem.time.steps, o.step_tol);
            field.values[io * rhos.size() + ir] = principal_eigenvalue(c.problem, omegas[io], rhos[ir], o).lambda;
        }
    CsvTable t{{"omega", "rho", "lambda"}, {}};
    for (size_t io = 0; io < omegas.size(); ++io)
        for (size_t ir = 0; ir < rhos.size(); ++ir) t.add({omegas[io], rhos[ir], field.values[io * rhos.size() + ir]});
    write_csv(c.out_dir + "/sweep.csv", t);
    std::vector<double> levels = c.cfg.level.ell;
    if (levels.empty()) {
        const auto [lo, hi] = std::minmax_element(field.values.begin(), field.values.end());
        for (int k = 1; k <= 5; ++k) levels.push_back(*lo + (*hi - *lo) * k / 6.0);
    }
    write_text(c.out_dir + "/sweep.svg", plane_svg("lambda(omega, rho)", &field, levels, {}));
    std::cout << t.rows.size() << " points written to " << c.out_dir << "/sweep.csv\n";
    c.record.add("sweep", "ok", seconds_since(t0), {{"points", t.rows.size()}});
    finish(c);
    return kExitOk;
}

int cmd_persistence(const Flags& f) {
    auto c = load(f);
    const auto t0 = std::chrono::steady_clock::now();
    const auto model = build_mutation_model(c.cfg);
    SolveOptions o = solve_options(c.cfg);
    o.eigenfunction = false;
    const auto rep = persistence_region(model, trace_policy(c.cfg), o);
    json results{{"verdict", to_string(rep.verdict)}, {"case", rep.case_index}, {"note", rep.note}};
    std::cout << "verdict: " << to_string(rep.verdict);
    if (rep.verdict == RegionVerdict::bounded) std::cout << " (case " << rep.case_index << ")";
    std::cout << "\n" << rep.note << "\n";
    if (rep.curve) {
        write_curve(c.out_dir + "/persistence_boundary.csv", *rep.curve);
        write_text(c.out_dir + "/persistence.svg",
                   plane_svg("persistence boundary lambda = 0", nullptr, {}, {polyline(*rep.curve, "lambda = 0")}));
        results["curve"] = curve_json(*rep.curve);
    }
    c.record.add("persistence", "ok", seconds_since(t0), results);
    finish(c);
    return kExitOk;
}

int cmd_verify(const Flags& f) {
    VerifyOptions opt;
    opt.fixture_dir = f.fixtures.empty() ? std::string(PERIEIG_FIXTURE_DIR) : f.fixtures;
    if (!f.only.empty())
        for (double v : parse_number_list(f.only)) opt.only.insert(static_cast<int>(v));
    opt.on_result = [&](const CriterionReport& r) { std::cout << format_report(r, !f.quiet) << std::flush; };
    const auto t0 = std::chrono::steady_clock::now();
    const auto reports = run_verify(opt);
    int failed = 0;
    json results = json::array();
    CsvTable t{{"criterion", "pass", "seconds"}, {}};
    for (const auto& r : reports) {
        failed += !r.pass();
        t.add({double(r.id), r.pass() ? 1.0 : 0.0, r.seconds});
        json checks = json::array();
        for (const auto& k : r.checks)
            checks.push_back({{"label", k.label}, {"value", k.value}, {"bound", k.bound}, {"pass", k.pass}});
        results.push_back({{"criterion", r.id}, {"title", r.title}, {"pass", r.pass()}, {"checks", checks},
                           {"error", r.error}});
    }
    std::cout << reports.size() - failed << "/" << reports.size() << " criteria passed\n";
    const std::string out = !f.out.empty() ? f.out : (std::getenv(kOutEnv) ? std::getenv(kOutEnv) : "out");
    write_csv(out + "/verify.csv", t);
    RunRecord record(fnv1a_hex(opt.fixture_dir), kVersion);
    record.add("verify", failed ? "error(verification)" : "ok", seconds_since(t0), results);
    write_text(out + "/run.json", record.dump() + "\n");
    return failed ? kExitVerify : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Principal eigenvalues of time-periodic cooperative reaction-diffusion systems"};
    app.require_subcommand(1, 1);
    Flags f;
    auto common = [&](CLI::App* sub, bool needs_config = true) {
        auto* opt = sub->add_option("--config", f.config, "problem configuration file");
        if (needs_config) opt->required()->check(CLI::ExistingFile);
        sub->add_option("--out", f.out, std::string("output directory (default: $") + kOutEnv + ", config, ./out)");
        sub->add_option("--threads", f.threads, "OpenMP threads")->check(CLI::PositiveNumber);
        sub->add_option("--tol", f.tol, "eigen-solver tolerance override")->check(CLI::PositiveNumber);
    };
    struct Entry {
        const char* name;
        const char* help;
        int (*run)(const Flags&);
    };
    const Entry entries[] = {
        {"eigen", "lambda(omega, rho) with diagnostics", cmd_eigen},
        {"ode", "ODE limits h(x, omega), h_under, h_bar", cmd_ode},
        {"elliptic", "lambda_bar, lambda_under and frozen-time eigenvalues", cmd_elliptic},
        {"hj", "critical values C(theta)", cmd_hj},
        {"constants", "the five limit constants", cmd_constants},
        {"levelset", "trace level sets lambda = ell", cmd_levelset},
        {"sweep", "lambda on an (omega, rho) grid, CSV and SVG", cmd_sweep},
        {"persistence", "persistence region of a mutation model", cmd_persistence},
        {"verify", "acceptance suite on the shipped fixtures", cmd_verify},
    };
    std::map<CLI::App*, int (*)(const Flags&)> handlers;
    for (const auto& e : entries) {
        auto* sub = app.add_subcommand(e.name, e.help);
        const std::string name = e.name;
        common(sub, name != "verify");
        if (name == "eigen" || name == "ode" || name == "sweep")
            sub->add_option("--omega", f.omega, "omega values: list, logspace(a,b,n) or linspace(a,b,n)");
        if (name == "eigen" || name == "elliptic" || name == "sweep") sub->add_option("--rho", f.rho, "rho values");
        if (name == "hj") sub->add_option("--theta", f.theta, "theta values");
        if (name == "levelset") sub->add_option("--level", f.level, "level values ell");
        if (name == "verify") {
            sub->add_option("--only", f.only, "comma-separated criterion ids");
            sub->add_option("--fixtures", f.fixtures, "fixture directory")->check(CLI::ExistingDirectory);
            sub->add_flag("--quiet", f.quiet, "one line per criterion");
        }
        handlers[sub] = e.run;
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }
    if (f.threads > 0) set_thread_count(f.threads);
    try {
        for (const auto& [sub, run] : handlers)
            if (sub->parsed()) return run(f);
    } catch (const Error& e) {
        std::cerr << "perieig: " << e.what() << "\n";
        return e.kind() == ErrorKind::config ? kExitConfig : kExitSolver;
    } catch (const std::exception& e) {
        std::cerr << "perieig: " << e.what() << "\n";
        return kExitSolver;
    }
    return kExitConfig;
}
