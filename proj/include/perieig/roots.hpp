#pragma once

#include <functional>

namespace perieig {

/// Coordinate in which a bracket is halved. Log brackets suit ω and ρ.
enum class BracketScale { linear, logarithmic };

struct RootResult {
    double x = 0.0;
    double fx = 0.0;
    int evaluations = 0;
};

/// Bisection for a nondecreasing f with f(lo) <= target <= f(hi).
/// Stops when |f(x) - target| <= ftol or the bracket width <= xtol_rel * x.
RootResult invert_monotone(const std::function<double(double)>& f, double target, double lo, double hi,
                           BracketScale scale = BracketScale::linear, double ftol = 1e-8,
                           double xtol_rel = 1e-10);

/// Same contract, but uses Illinois-modified regula falsi with a bisection
/// safeguard. Intended for expensive, smooth f (full eigen-solves).
/// Endpoint values may be supplied to save two evaluations.
RootResult solve_monotone(const std::function<double(double)>& f, double target, double lo, double hi,
                          BracketScale scale, double ftol, double xtol_rel, double f_lo, double f_hi);

}  // namespace perieig
