#include "perieig/roots.hpp"

#include <cmath>
#include <sstream>

#include "perieig/error.hpp"

namespace perieig {

namespace {

double to_coord(double x, BracketScale s) { return s == BracketScale::logarithmic ? std::log(x) : x; }
double from_coord(double u, BracketScale s) { return s == BracketScale::logarithmic ? std::exp(u) : u; }

void check_straddle(double f_lo, double f_hi, double target, double lo, double hi, double ftol) {
    if (f_lo > target + ftol || f_hi < target - ftol) {
        std::ostringstream msg;
        msg.precision(12);
        msg << "bracket [" << lo << ", " << hi << "] does not straddle " << target << " (f = " << f_lo
            << " .. " << f_hi << ")";
        fail(ErrorKind::bracket, msg.str());
    }
}

}  // namespace

RootResult invert_monotone(const std::function<double(double)>& f, double target, double lo, double hi,
                           BracketScale scale, double ftol, double xtol_rel) {
    if (!(lo < hi)) fail(ErrorKind::bracket, "bracket is empty");
    if (scale == BracketScale::logarithmic && !(lo > 0.0))
        fail(ErrorKind::bracket, "logarithmic bracket needs a positive lower end");
    RootResult r;
    check_straddle(f(lo), f(hi), target, lo, hi, ftol);
    r.evaluations = 2;
    double a = to_coord(lo, scale), b = to_coord(hi, scale);
    for (int it = 0; it < 200; ++it) {
        const double u = 0.5 * (a + b);
        r.x = from_coord(u, scale);
        r.fx = f(r.x);
        ++r.evaluations;
        if (std::abs(r.fx - target) <= ftol) return r;
        if (r.fx < target) a = u; else b = u;
        if (from_coord(b, scale) - from_coord(a, scale) <= xtol_rel * std::abs(r.x)) return r;
    }
    return r;
}

RootResult solve_monotone(const std::function<double(double)>& f, double target, double lo, double hi,
                          BracketScale scale, double ftol, double xtol_rel, double f_lo, double f_hi) {
    if (!(lo < hi)) fail(ErrorKind::bracket, "bracket is empty");
    check_straddle(f_lo, f_hi, target, lo, hi, ftol);
    RootResult r;
    if (std::abs(f_lo - target) <= ftol) return {lo, f_lo, 0};
    if (std::abs(f_hi - target) <= ftol) return {hi, f_hi, 0};

    double a = to_coord(lo, scale), b = to_coord(hi, scale);
    double ga = f_lo - target, gb = f_hi - target;
    int side = 0;
    for (int it = 0; it < 200; ++it) {
        double u = (ga * b - gb * a) / (ga - gb);
        // Fall back to bisection if the secant lands too close to an end.
        const double w = b - a;
        if (!(u > a + 0.01 * w && u < b - 0.01 * w) || it % 6 == 5) u = 0.5 * (a + b);
        r.x = from_coord(u, scale);
        r.fx = f(r.x);
        ++r.evaluations;
        const double g = r.fx - target;
        if (std::abs(g) <= ftol) return r;
        if (g < 0) {
            a = u;
            ga = g;
            if (side == -1) gb *= 0.5;
            side = -1;
        } else {
            b = u;
            gb = g;
            if (side == 1) ga *= 0.5;
            side = 1;
        }
        if (from_coord(b, scale) - from_coord(a, scale) <= xtol_rel * std::abs(r.x)) return r;
    }
    return r;
}

}  // namespace perieig
