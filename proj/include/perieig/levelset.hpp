#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "perieig/coefficients.hpp"
#include "perieig/floquet_ode.hpp"
#include "perieig/parabolic.hpp"

namespace perieig {

/// Memoized access to lambda(omega, rho) and its four boundary functions.
/// Thread-safe; values are deterministic so the cache never changes results.
class SpectralOracle {
public:
    SpectralOracle(const Problem& problem, SolveOptions solve = {}, OdeOptions ode = {});

    const Problem& problem() const { return *problem_; }
    const LimitConstants& constants() const { return constants_; }

    double lambda(double omega, double rho) const;
    double lambda_under(double rho) const;  // omega -> 0
    double lambda_bar(double rho) const;    // omega -> infinity
    double h_under(double omega) const;     // rho -> 0
    double h_bar(double omega) const;       // rho -> infinity

    /// Inverses of the nondecreasing maps omega -> h_under, h_bar. Absent when
    /// ell lies outside the range reached on [1e-4, 1e4].
    std::optional<double> h_under_inverse(double ell) const;
    std::optional<double> h_bar_inverse(double ell) const;

    int evaluations() const;

private:
    double cached(std::map<std::pair<double, double>, double>& cache, double a, double b,
                  const std::function<double()>& compute) const;

    const Problem* problem_;
    SolveOptions solve_;
    OdeOptions ode_;
    LimitConstants constants_;
    mutable std::mutex lock_;
    mutable std::map<std::pair<double, double>, double> lambda_, under_, bar_, h_under_, h_bar_;
    mutable int evaluations_ = 0;
};

/// Outcome of an endpoint or crossing search.
template <class T>
struct Located {
    std::optional<T> value;
    std::string reason;  // why the value is absent
    explicit operator bool() const { return value.has_value(); }
};

/// Unique root of lambda_under(rho) = ell for ell in (C_under, C_under_plus).
Located<double> rho_ell(const SpectralOracle& o, double ell);
/// Unique root of lambda_bar(rho) = ell for ell in (C_star_plus, C_bar).
Located<double> rho_under_ell(const SpectralOracle& o, double ell);

enum class CrossingSide { none, below, above, degenerate };

struct OmegaCrossing {
    std::optional<double> omega;
    double lambda = 0.0;  // lambda(omega, rho) at the returned root
    CrossingSide side = CrossingSide::none;  // set when absent
};

/// omega with lambda(omega, rho) = ell, by root finding in log omega.
/// below: lambda_under(rho) >= ell; above: lambda_bar(rho) <= ell.
/// A positive `guess` starts from a tight bracket around it.
OmegaCrossing omega_ell(const SpectralOracle& o, double ell, double rho, double tol = 0.0, double guess = 0.0);

enum class CurveType { vertical_line, type1i, type1ii, type2, type3, type4 };
const char* to_string(CurveType t);

enum class EndKind { zero, finite, infinite };

struct CurveSample {
    double rho = 0.0, omega = 0.0, lambda_check = 0.0;
};

struct CurveCheck {
    std::string name;
    double value = 0.0, target = 0.0, tolerance = 0.0;
    bool pass = false;
};

struct LevelCurve {
    double ell = 0.0;
    CurveType type = CurveType::type1i;
    std::vector<CurveSample> samples;  // ascending in rho
    EndKind left = EndKind::zero, right = EndKind::infinite;
    std::optional<double> rho_ell, rho_under_ell;
    std::optional<double> h_under_inverse, h_bar_inverse;
    std::optional<double> exponent;  // small-rho fit of omega ~ rho^e (type 1i)
    double c_low = 0.0, c_high = 0.0;  // omega / sqrt(rho) range over the fit window
    double ns_residual = -1.0;         // vertical-line cross-check, < 0 when not run
    std::vector<CurveCheck> checks;

    bool passed() const;
};

struct TracePolicy {
    int interior = 5;           // log-spaced samples inside the domain
    int refine = 3;             // geometric samples toward each finite endpoint
    double rho_min = 1e-7;      // smallest rho for types 1ii and 3 (the h_under^-1 end)
    double rho_min_1i = 1e-5;   // smallest rho for type 1i, where omega_ell ~ sqrt(rho)
    double rho_max = 1e3;       // largest rho for unbounded domains
    double fit_decade_low = 0;  // type 1i fit window [low, 10 low]; 0 means the smallest rho
    std::vector<double> inverse_omegas{31.622776601683793, 100.0, 316.22776601683796};
    double separatrix_gap = 1e-3;  // refuse ell this close to a constant
    bool allow_separatrix = false;
    Execution execution = Execution::parallel;
};

/// Type tag from the position of ell among the limit constants.
CurveType classify(const LimitConstants& c, double ell);

LevelCurve trace_level_set(const SpectralOracle& o, double ell, const TracePolicy& policy = {});

/// Relative residual of the best fit A(x,t) phi = A_hat(x) phi + g(t) phi over
/// the elliptic eigenfunction phi of the time-averaged problem at rho.
double separability_residual(const Problem& problem, double rho);

struct DipReport {
    bool applicable = true;
    std::string note;
    double omega = 0.0, omega_star = 0.0;
    std::optional<double> rho_under, rho_over;  // crossings with C_star
    double crossing_error = 0.0;                // max |lambda - C_star| at the crossings
    double dip_rho = 0.0, dip_lambda = 0.0, depth = 0.0;
    double eta_hat = 0.0;                       // min of (lambda - h_under) / sqrt(rho)
    std::vector<std::pair<double, double>> scan;  // (rho, lambda)
};

/// omega_* = max over rho of the ell = C_star level curve.
double omega_star(const SpectralOracle& o, const TracePolicy& policy = {});

struct ProbePolicy {
    double rho_min = 1e-4, rho_max = 1e3;
    int scan_points = 29;
    std::vector<double> eta_rhos{1e-4, 2e-4, 4e-4};
    Execution execution = Execution::parallel;
};

DipReport nonmonotonicity_probe(const SpectralOracle& o, double omega, double omega_star_value,
                                const ProbePolicy& policy = {});

}  // namespace perieig
