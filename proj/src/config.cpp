#include "perieig/config.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace perieig {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) out.push_back(trim(cur));
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

double to_double(const std::string& s) {
    size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (trim(s.substr(pos)) != "") throw std::invalid_argument("trailing characters");
    return v;
}

long to_long(const std::string& s) {
    size_t pos = 0;
    const long v = std::stol(s, &pos);
    if (trim(s.substr(pos)) != "") throw std::invalid_argument("trailing characters");
    return v;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string join(const std::vector<double>& v) {
    std::string s;
    for (size_t k = 0; k < v.size(); ++k) s += (k ? ", " : "") + fmt(v[k]);
    return s;
}

const char* mode_name(TimeMode m) {
    switch (m) {
        case TimeMode::constant: return "const";
        case TimeMode::cosine: return "cos";
        case TimeMode::sine: return "sin";
    }
    return "const";
}

FourierTerm parse_term(const std::string& v) {
    const auto parts = split(v, ',');
    if (parts.size() != 4) throw std::invalid_argument("term needs 'c, k, m, kind'");
    FourierTerm t;
    t.c = to_double(parts[0]);
    t.k = static_cast<int>(to_long(parts[1]));
    t.m = static_cast<int>(to_long(parts[2]));
    if (parts[3] == "const") t.mode = TimeMode::constant;
    else if (parts[3] == "cos") t.mode = TimeMode::cosine;
    else if (parts[3] == "sin") t.mode = TimeMode::sine;
    else throw std::invalid_argument("term kind must be const, cos or sin");
    if (t.k < 0) throw std::invalid_argument("x-mode k must be >= 0");
    if (t.mode != TimeMode::constant && t.m < 1) throw std::invalid_argument("t-mode m must be >= 1");
    return t;
}

/// Rows are nodes. With a header `x,t0,...,tM` the first column holds x and is
/// dropped; without one every column is a time sample.
Table load_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open CSV '" + path + "'");
    Table t;
    std::string line;
    int cols = -1;
    bool x_column = false;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        const auto parts = split(line, ',');
        if (cols < 0) {
            cols = static_cast<int>(parts.size());
            if (trim(parts[0]) == "x") {
                x_column = true;
                continue;
            }
        }
        if (static_cast<int>(parts.size()) != cols) throw std::runtime_error("ragged CSV '" + path + "'");
        for (size_t k = x_column ? 1 : 0; k < parts.size(); ++k) t.values.push_back(to_double(parts[k]));
        ++t.nodes;
    }
    const int time_cols = cols - (x_column ? 1 : 0);
    if (time_cols < 3) throw std::runtime_error("CSV '" + path + "' needs at least 3 time columns");
    t.steps = time_cols - 1;
    return t;
}

struct Pending {
    int line;
    std::string section;
    EntrySpec* spec;
};

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : Error(ErrorKind::config,
            [&] {
                std::string s = "invalid configuration:";
                for (const auto& p : problems) s += "\n  " + p;
                return s;
            }()),
      problems_(std::move(problems)) {}

bool ProblemConfig::operator==(const ProblemConfig& o) const {
    return n == o.n && diffusion == o.diffusion && space.length == o.space.length && space.nodes == o.space.nodes &&
           time.steps == o.time.steps && entries == o.entries && mutation == o.mutation && rates == o.rates &&
           solve == o.solve && sweep == o.sweep && level == o.level && output_dir == o.output_dir;
}

std::vector<double> parse_number_list(const std::string& text) {
    const std::string s = trim(text);
    for (const char* fn : {"logspace", "linspace"}) {
        const std::string name = fn;
        if (s.rfind(name + "(", 0) == 0 && s.back() == ')') {
            const auto args = split(s.substr(name.size() + 1, s.size() - name.size() - 2), ',');
            if (args.size() != 3) throw std::invalid_argument(name + " needs (a, b, count)");
            const double a = to_double(args[0]), b = to_double(args[1]);
            const long count = to_long(args[2]);
            if (count < 1) throw std::invalid_argument("count must be >= 1");
            if (name == "logspace" && !(a > 0 && b > 0)) throw std::invalid_argument("logspace needs positive ends");
            std::vector<double> v;
            for (long k = 0; k < count; ++k) {
                const double f = count == 1 ? 0.0 : static_cast<double>(k) / (count - 1);
                v.push_back(name == "logspace" ? a * std::pow(b / a, f) : a + (b - a) * f);
            }
            return v;
        }
    }
    std::vector<double> v;
    for (const auto& p : split(s, ',')) v.push_back(to_double(p));
    return v;
}

ProblemConfig parse_config(const std::string& text, const std::string& base_dir) {
    ProblemConfig cfg;
    cfg.base_dir = base_dir;
    std::vector<std::string> errors;
    auto error = [&](int line, const std::string& msg) {
        errors.push_back("line " + std::to_string(line) + ": " + msg);
    };

    std::string section;
    EntrySpec* current = nullptr;
    std::set<std::string> seen_keys, seen_sections;
    std::vector<Pending> pending;
    bool have_n = false;

    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const auto hash = raw.find('#');
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                error(lineno, "unterminated section header");
                continue;
            }
            section = trim(line.substr(1, line.size() - 2));
            current = nullptr;
            if (!seen_sections.insert(section).second) error(lineno, "section [" + section + "] repeated");
            const auto parts = split(section, '.');
            try {
                if ((parts[0] == "entry" || parts[0] == "mutation") && parts.size() == 3) {
                    int i = static_cast<int>(to_long(parts[1])) - 1, j = static_cast<int>(to_long(parts[2])) - 1;
                    if (i < 0 || j < 0) throw std::invalid_argument("indices start at 1");
                    if (i > j) std::swap(i, j);
                    auto& map = parts[0] == "entry" ? cfg.entries : cfg.mutation;
                    if (map.count({i, j})) error(lineno, "entry (" + parts[1] + "," + parts[2] + ") given twice");
                    current = &map[{i, j}];
                    pending.push_back({lineno, section, current});
                } else if (parts[0] == "rate" && parts.size() == 2) {
                    const int i = static_cast<int>(to_long(parts[1])) - 1;
                    if (i < 0) throw std::invalid_argument("indices start at 1");
                    current = &cfg.rates[i];
                    pending.push_back({lineno, section, current});
                } else if (parts.size() != 1 || !std::set<std::string>{"problem", "grid", "solve", "sweep",
                                                                        "levelset", "output"}
                                                     .count(section)) {
                    error(lineno, "unknown section [" + section + "]");
                }
            } catch (const std::exception& e) {
                error(lineno, "bad section [" + section + "]: " + e.what());
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            error(lineno, "expected 'key = value'");
            continue;
        }
        const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
        if (section.empty()) {
            error(lineno, "key '" + key + "' outside any section");
            continue;
        }
        if (key != "term" && !seen_keys.insert(section + "." + key).second) {
            error(lineno, "key '" + key + "' repeated in [" + section + "]");
            continue;
        }
        try {
            if (current) {
                if (key == "term") current->terms.push_back(parse_term(value));
                else if (key == "csv") current->csv = value;
                else error(lineno, "unknown key '" + key + "' in [" + section + "]");
            } else if (section == "problem") {
                if (key == "n") {
                    cfg.n = static_cast<int>(to_long(value));
                    have_n = true;
                } else if (key == "diffusion") {
                    cfg.diffusion = parse_number_list(value);
                } else {
                    error(lineno, "unknown key '" + key + "' in [problem]");
                }
            } else if (section == "grid") {
                if (key == "length") cfg.space.length = to_double(value);
                else if (key == "nodes") cfg.space.nodes = static_cast<int>(to_long(value));
                else if (key == "steps") cfg.time.steps = static_cast<int>(to_long(value));
                else error(lineno, "unknown key '" + key + "' in [grid]");
            } else if (section == "solve") {
                auto& s = cfg.solve;
                if (key == "tol") s.tol = to_double(value);
                else if (key == "max_cycles") s.max_cycles = static_cast<int>(to_long(value));
                else if (key == "step_tol") s.step_tol = to_double(value);
                else if (key == "krylov_dim") s.krylov_dim = static_cast<int>(to_long(value));
                else if (key == "ode_steps") s.ode_steps = static_cast<int>(to_long(value));
                else if (key == "hj_max_steps") s.hj_max_steps = to_long(value);
                else if (key == "hj_drift_tol") s.hj_drift_tol = to_double(value);
                else error(lineno, "unknown key '" + key + "' in [solve]");
            } else if (section == "sweep") {
                if (key == "omega") cfg.sweep.omega = parse_number_list(value);
                else if (key == "rho") cfg.sweep.rho = parse_number_list(value);
                else if (key == "theta") cfg.sweep.theta = parse_number_list(value);
                else error(lineno, "unknown key '" + key + "' in [sweep]");
            } else if (section == "levelset") {
                auto& l = cfg.level;
                if (key == "ell") l.ell = parse_number_list(value);
                else if (key == "rho_min") l.rho_min = to_double(value);
                else if (key == "rho_min_1i") l.rho_min_1i = to_double(value);
                else if (key == "rho_max") l.rho_max = to_double(value);
                else if (key == "interior") l.interior = static_cast<int>(to_long(value));
                else if (key == "refine") l.refine = static_cast<int>(to_long(value));
                else if (key == "fit_decade_low") l.fit_decade_low = to_double(value);
                else error(lineno, "unknown key '" + key + "' in [levelset]");
            } else if (section == "output") {
                if (key == "dir") cfg.output_dir = value;
                else error(lineno, "unknown key '" + key + "' in [output]");
            } else {
                error(lineno, "key '" + key + "' in unknown section");
            }
        } catch (const std::exception& e) {
            error(lineno, "bad value for '" + key + "': " + e.what());
        }
    }

    // Structural checks that need the whole file.
    if (!have_n) error(lineno, "[problem] n is required");
    else if (cfg.n < 1 || cfg.n > kMaxComponents) error(lineno, "n must lie in [1, 16]");
    if (have_n && static_cast<int>(cfg.diffusion.size()) != cfg.n)
        error(lineno, "diffusion needs exactly n = " + std::to_string(cfg.n) + " values");
    for (double d : cfg.diffusion)
        if (!(d > 0)) {
            error(lineno, "diffusion must be positive");
            break;
        }
    if (!(cfg.space.length > 0)) error(lineno, "grid length must be positive");
    if (cfg.space.nodes < 3) error(lineno, "grid needs at least 3 nodes");
    if (cfg.time.steps < 2) error(lineno, "grid needs at least 2 time steps");
    if (!cfg.entries.empty() && !cfg.mutation.empty()) error(lineno, "give either [entry.*] or [mutation.*], not both");
    if (!cfg.rates.empty() && cfg.mutation.empty()) error(lineno, "[rate.*] sections need a mutation model");

    for (const auto& p : pending) {
        EntrySpec& e = *p.spec;
        const auto parts = split(p.section, '.');
        for (size_t q = 1; q < parts.size(); ++q) {
            try {
                if (have_n && to_long(parts[q]) > cfg.n) error(p.line, "[" + p.section + "] index exceeds n");
            } catch (...) {
            }
        }
        if (!e.csv.empty() && !e.terms.empty()) {
            error(p.line, "[" + p.section + "] mixes csv and term");
            continue;
        }
        try {
            if (!e.csv.empty()) {
                const auto path = std::filesystem::path(e.csv).is_absolute()
                                      ? std::filesystem::path(e.csv)
                                      : std::filesystem::path(base_dir) / e.csv;
                Table t = load_table(path.string());
                if (t.nodes != cfg.space.nodes)
                    error(p.line, "[" + p.section + "] CSV has " + std::to_string(t.nodes) + " rows, grid has " +
                                      std::to_string(cfg.space.nodes) + " nodes");
                else
                    e.entry = CoefficientEntry::tabulated(std::move(t));
            } else {
                e.entry = CoefficientEntry::fourier(e.terms);
            }
        } catch (const std::exception& ex) {
            error(p.line, "[" + p.section + "]: " + ex.what());
        }
    }

    // Physics checks, delegated to the coefficient and mutation validators.
    if (errors.empty()) {
        try {
            if (cfg.is_mutation_model()) {
                validate_mutation(build_mutation_model(cfg));
            } else {
                const Problem p = build_problem(cfg);
                const ValidationReport r = validate(p.A, p.time);
                if (!r.ok) error(lineno, r.message);
            }
        } catch (const Error& e) {
            error(lineno, e.what());
        }
    }
    if (!errors.empty()) throw ConfigError(std::move(errors));
    return cfg;
}

ProblemConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::io, "cannot read config '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    const auto dir = std::filesystem::path(path).parent_path();
    return parse_config(ss.str(), dir.empty() ? "." : dir.string());
}

std::string serialize_config(const ProblemConfig& cfg) {
    std::ostringstream out;
    out << "[problem]\nn = " << cfg.n << "\ndiffusion = " << join(cfg.diffusion) << "\n\n";
    out << "[grid]\nlength = " << fmt(cfg.space.length) << "\nnodes = " << cfg.space.nodes
        << "\nsteps = " << cfg.time.steps << "\n";
    auto write_entry = [&](const std::string& header, const EntrySpec& e) {
        out << "\n[" << header << "]\n";
        if (!e.csv.empty()) {
            out << "csv = " << e.csv << "\n";
            return;
        }
        for (const auto& t : e.terms)
            out << "term = " << fmt(t.c) << ", " << t.k << ", " << t.m << ", " << mode_name(t.mode) << "\n";
    };
    for (const auto& [ij, e] : cfg.entries)
        write_entry("entry." + std::to_string(ij.first + 1) + "." + std::to_string(ij.second + 1), e);
    for (const auto& [ij, e] : cfg.mutation)
        write_entry("mutation." + std::to_string(ij.first + 1) + "." + std::to_string(ij.second + 1), e);
    for (const auto& [i, e] : cfg.rates) write_entry("rate." + std::to_string(i + 1), e);
    const auto& c = cfg.solve;
    out << "\n[solve]\ntol = " << fmt(c.tol) << "\nmax_cycles = " << c.max_cycles << "\nstep_tol = " << fmt(c.step_tol)
        << "\nkrylov_dim = " << c.krylov_dim << "\node_steps = " << c.ode_steps << "\nhj_max_steps = " << c.hj_max_steps
        << "\nhj_drift_tol = " << fmt(c.hj_drift_tol) << "\n";
    if (!cfg.sweep.omega.empty() || !cfg.sweep.rho.empty() || !cfg.sweep.theta.empty()) {
        out << "\n[sweep]\n";
        if (!cfg.sweep.omega.empty()) out << "omega = " << join(cfg.sweep.omega) << "\n";
        if (!cfg.sweep.rho.empty()) out << "rho = " << join(cfg.sweep.rho) << "\n";
        if (!cfg.sweep.theta.empty()) out << "theta = " << join(cfg.sweep.theta) << "\n";
    }
    const auto& l = cfg.level;
    out << "\n[levelset]\n";
    if (!l.ell.empty()) out << "ell = " << join(l.ell) << "\n";
    out << "rho_min = " << fmt(l.rho_min) << "\nrho_min_1i = " << fmt(l.rho_min_1i) << "\nrho_max = " << fmt(l.rho_max)
        << "\ninterior = " << l.interior << "\nrefine = " << l.refine << "\nfit_decade_low = " << fmt(l.fit_decade_low) << "\n";
    if (!cfg.output_dir.empty()) out << "\n[output]\ndir = " << cfg.output_dir << "\n";
    return out.str();
}

Problem build_problem(const ProblemConfig& cfg) {
    if (cfg.is_mutation_model()) return assemble_problem(build_mutation_model(cfg));
    Problem p{MatrixField(cfg.n, cfg.space), DiffusionMatrix{cfg.diffusion}, cfg.time};
    for (const auto& [ij, e] : cfg.entries) p.A.set(ij.first, ij.second, e.entry);
    return p;
}

SolveOptions solve_options(const ProblemConfig& cfg) {
    SolveOptions o;
    o.tol = cfg.solve.tol;
    o.max_cycles = cfg.solve.max_cycles;
    o.step_tol = cfg.solve.step_tol;
    o.krylov_dim = cfg.solve.krylov_dim;
    return o;
}

TracePolicy trace_policy(const ProblemConfig& cfg) {
    TracePolicy t;
    t.interior = cfg.level.interior;
    t.refine = cfg.level.refine;
    t.rho_min = cfg.level.rho_min;
    t.rho_min_1i = cfg.level.rho_min_1i;
    t.rho_max = cfg.level.rho_max;
    t.fit_decade_low = cfg.level.fit_decade_low;
    return t;
}

MutationModel build_mutation_model(const ProblemConfig& cfg) {
    if (!cfg.is_mutation_model()) fail(ErrorKind::config, "config does not describe a mutation model");
    MutationModel m{MatrixField(cfg.n, cfg.space), {}, DiffusionMatrix{cfg.diffusion}, cfg.time};
    for (const auto& [ij, e] : cfg.mutation) m.M.set(ij.first, ij.second, e.entry);
    m.rates.assign(cfg.n, CoefficientEntry::constant(0.0));
    for (const auto& [i, e] : cfg.rates)
        if (i < cfg.n) m.rates[i] = e.entry;
    return m;
}

std::string fnv1a_hex(const std::string& text) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace perieig
