#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "perieig/coefficients.hpp"
#include "perieig/error.hpp"
#include "perieig/persistence.hpp"

namespace perieig {

/// One coefficient entry as written in the config: Fourier terms or a CSV table.
struct EntrySpec {
    std::vector<FourierTerm> terms;
    std::string csv;           // path as written; empty for Fourier entries
    CoefficientEntry entry;    // resolved (table loaded at parse time)

    bool operator==(const EntrySpec&) const = default;
};

struct SolveSettings {
    double tol = 1e-10;
    int max_cycles = 10000;
    double step_tol = 1e-4;
    int krylov_dim = 20;
    int ode_steps = 4096;
    long hj_max_steps = 4'000'000;
    double hj_drift_tol = 1e-4;

    bool operator==(const SolveSettings&) const = default;
};

struct SweepSettings {
    std::vector<double> omega, rho, theta;
    bool operator==(const SweepSettings&) const = default;
};

struct LevelSettings {
    std::vector<double> ell;
    double rho_min = 1e-7, rho_min_1i = 1e-5, rho_max = 1e3;
    int interior = 5, refine = 3;
    double fit_decade_low = 0.0;

    bool operator==(const LevelSettings&) const = default;
};

/// Parsed configuration. Entries are keyed by zero-based (i, j) with i <= j.
struct ProblemConfig {
    int n = 0;
    std::vector<double> diffusion;
    SpatialGrid space{};
    TimeGrid time{};
    std::map<std::pair<int, int>, EntrySpec> entries;
    std::map<std::pair<int, int>, EntrySpec> mutation;  // mutation-model form
    std::map<int, EntrySpec> rates;
    SolveSettings solve;
    SweepSettings sweep;
    LevelSettings level;
    std::string output_dir;
    std::string base_dir;  // directory CSV paths are resolved against; not serialized

    bool is_mutation_model() const { return !mutation.empty(); }
    bool operator==(const ProblemConfig& o) const;
};

/// Error carrying every problem found while parsing, each with its line number.
class ConfigError : public Error {
public:
    explicit ConfigError(std::vector<std::string> problems);
    const std::vector<std::string>& problems() const { return problems_; }

private:
    std::vector<std::string> problems_;
};

/// Sectioned key-value text: [problem], [grid], [entry.i.j], [mutation.i.j],
/// [rate.i], [solve], [sweep], [levelset], [output]. '#' starts a comment.
ProblemConfig parse_config(const std::string& text, const std::string& base_dir = ".");
ProblemConfig load_config(const std::string& path);
std::string serialize_config(const ProblemConfig& cfg);

/// Coefficient problem described by the config (assembled for mutation models).
Problem build_problem(const ProblemConfig& cfg);
MutationModel build_mutation_model(const ProblemConfig& cfg);
SolveOptions solve_options(const ProblemConfig& cfg);
TracePolicy trace_policy(const ProblemConfig& cfg);

/// "a, b, c" or "logspace(a, b, count)" or "linspace(a, b, count)".
std::vector<double> parse_number_list(const std::string& text);

/// FNV-1a 64-bit hash, hex encoded.
std::string fnv1a_hex(const std::string& text);

}  // namespace perieig
