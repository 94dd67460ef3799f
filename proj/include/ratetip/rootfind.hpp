// Bracketed scalar root finding: bisection with an optional Newton polish.

#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace ratetip {

struct RootOptions {
    double xtol = 1e-13;   // absolute bracket width target
    int max_iter = 200;
};

/// Plain bisection on [lo, hi]; f(lo) and f(hi) must have opposite signs.
template <class F>
double bisect(F&& f, double lo, double hi, const RootOptions& opt = {}) {
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) == (fhi > 0.0))
        throw std::invalid_argument("bisect: no sign change in bracket");
    for (int it = 0; it < opt.max_iter && hi - lo > opt.xtol; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fmid = f(mid);
        if (fmid == 0.0) return mid;
        if ((fmid > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

/// Newton iteration from x0 constrained to [lo, hi]; falls back to the
/// midpoint of the bracket if an iterate escapes. Stops at |f| <= ftol.
template <class F, class DF>
double newton_polish(F&& f, DF&& df, double x0, double lo, double hi, double ftol,
                     int max_iter = 60) {
    double x = x0;
    for (int it = 0; it < max_iter; ++it) {
        const double fx = f(x);
        if (std::abs(fx) <= ftol) return x;
        const double d = df(x);
        double xn = d != 0.0 ? x - fx / d : 0.5 * (lo + hi);
        if (!(xn > lo) || !(xn < hi)) xn = 0.5 * (lo + hi);
        if (xn == x) return x;
        x = xn;
    }
    return x;
}

/// Bisection to a coarse bracket followed by a Newton polish using a central
/// finite-difference derivative. Used where only |f(root)| matters.
template <class F>
double find_root(F&& f, double lo, double hi, double ftol = 1e-13) {
    RootOptions opt;
    opt.xtol = 1e-9 * std::max(1.0, std::abs(hi));
    double x = bisect(f, lo, hi, opt);
    const double step = 1e-7 * std::max(1.0, std::abs(x));
    auto df = [&](double v) { return (f(v + step) - f(v - step)) / (2.0 * step); };
    return newton_polish(f, df, x, lo, hi, ftol);
}

/// All sign-change brackets of f on a grid of n+1 points over [lo, hi].
template <class F>
std::vector<std::pair<double, double>> scan_brackets(F&& f, double lo, double hi, int n) {
    std::vector<std::pair<double, double>> out;
    double xprev = lo;
    double fprev = f(lo);
    for (int i = 1; i <= n; ++i) {
        const double x = lo + (hi - lo) * static_cast<double>(i) / n;
        const double fx = f(x);
        if (fprev == 0.0 || (fprev > 0.0) != (fx > 0.0)) out.emplace_back(xprev, x);
        xprev = x;
        fprev = fx;
    }
    return out;
}

} // namespace ratetip
