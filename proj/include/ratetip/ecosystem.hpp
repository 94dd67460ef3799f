// The plant-herbivore ecosystem model: vector field, functional response,
// herbivore growth, equilibria e1-e4 (numeric roots and the small-parameter
// expansions), and the Jacobian.
//
// State is (P, H): plant and herbivore biomass, both non-negative. The
// interior equilibria are roots of the net per-capita herbivore growth h(P),
// which depends on the nonlinearity parameter b + b_c but not on r. Their
// H-components follow from the plant equation.

#pragma once

#include <cmath>
#include <complex>
#include <optional>
#include <stdexcept>
#include <vector>

#include "ratetip/ode.hpp"
#include "ratetip/rootfind.hpp"
#include "ratetip/stability.hpp"

namespace ratetip {

using State = Vec<2>;

struct ModelParams {
    double r = 1.0;      // plant growth rate, 1/d
    double m = 0.1;      // herbivore mortality, 1/d
    double C = 0.02;     // plant competition, m^2 g^-1 d^-1
    double a = 10.0;     // half-saturation biomass, g m^-2
    double b = 0.0;      // food-quality exponent, m^2 g^-1
    double b_c = 0.0;    // predation-efficiency exponent, m^2 g^-1
    double E = 0.4;      // assimilation efficiency
    double c_max = 1.0;  // maximum intake, 1/d

    double nonlinearity() const { return b + b_c; }

    void validate() const {
        if (!(C > 0.0 && a > 0.0 && E > 0.0 && c_max > 0.0))
            throw std::invalid_argument("ModelParams: C, a, E, c_max must be positive");
        if (b < 0.0 || b_c < 0.0)
            throw std::invalid_argument("ModelParams: b and b_c must be non-negative");
        if (!(r > 0.0 && m > 0.0))
            throw std::invalid_argument("ModelParams: r and m must be positive");
    }
};

/// Grazing rate g(P) = c_max P^2/(P^2+a^2) e^(-b_c P); zero at P = 0.
inline double functional_response(double P, const ModelParams& p) {
    if (P <= 0.0) return 0.0;
    return p.c_max * P * P / (P * P + p.a * p.a) * std::exp(-p.b_c * P);
}

/// g'(P), with the removable singularity at P = 0 set to its limit 0.
inline double functional_response_deriv(double P, const ModelParams& p) {
    if (P <= 0.0) return 0.0;
    const double g = functional_response(P, p);
    return -g * (2.0 * P / (P * P + p.a * p.a) - 2.0 / P + p.b_c);
}

/// Net per-capita herbivore growth h(P); equals -m at P = 0 and depends on
/// b and b_c only through their sum.
inline double herbivore_growth(double P, const ModelParams& p) {
    if (P <= 0.0) return -p.m;
    const double s = p.nonlinearity();
    return p.E * p.c_max * P * P * std::exp(-s * P) / (P * P + p.a * p.a) - p.m;
}

inline double herbivore_growth_deriv(double P, const ModelParams& p) {
    // h(P) + m = E c_max P^2 e^(-sP)/(P^2+a^2); log-derivative 2/P - 2P/(P^2+a^2) - s.
    if (P <= 0.0) return 0.0;
    const double s = p.nonlinearity();
    const double val = herbivore_growth(P, p) + p.m;
    return val * (2.0 / P - 2.0 * P / (P * P + p.a * p.a) - s);
}

inline State vector_field(const State& y, const ModelParams& p) {
    const double P = y[0], H = y[1];
    const double g = functional_response(P, p);
    return {p.r * P - p.C * P * P - H * g,
            (p.E * std::exp(-p.b * P) * g - p.m) * H};
}

inline Mat2 jacobian(const State& y, const ModelParams& p) {
    const double P = y[0], H = y[1];
    const double g = functional_response(P, p);
    const double gp = functional_response_deriv(P, p);
    const double ebp = std::exp(-p.b * P);
    return {{{p.r - 2.0 * p.C * P - H * gp, -g},
             {p.E * ebp * (gp - p.b * g) * H, p.E * g * ebp - p.m}}};
}

/// H-component of an interior equilibrium with plant biomass P.
inline double equilibrium_herbivore(double P, const ModelParams& p) {
    return (p.r - p.C * P) * (P * P + p.a * p.a) / (p.c_max * P * std::exp(-p.b_c * P));
}

/// Three-term expansion of the optimal plant biomass (the positive root of
/// eps P^3 + eps a^2 P - a^2 with eps = (b+b_c)/2).
inline double p_opt_expansion(const ModelParams& p) {
    const double s = p.nonlinearity();
    if (!(s > 0.0)) throw std::invalid_argument("p_opt: no interior maximum when b + b_c = 0");
    const double eps = 0.5 * s;
    const double a23 = std::cbrt(p.a * p.a);
    return std::cbrt(1.0 / eps) * a23 - (1.0 / 3.0) * std::cbrt(eps) * a23 * a23 +
           (1.0 / 81.0) * std::cbrt(eps * eps * eps * eps * eps) * a23 * a23 * a23 * a23;
}

/// Plant biomass maximising h(P): exact positive root of the defining cubic,
/// Newton from the expansion seed.
inline double p_opt(const ModelParams& p) {
    const double s = p.nonlinearity();
    if (!(s > 0.0)) throw std::invalid_argument("p_opt: no interior maximum when b + b_c = 0");
    const double eps = 0.5 * s;
    const double a2 = p.a * p.a;
    auto cubic = [&](double P) { return eps * P * P * P + eps * a2 * P - a2; };
    auto dcubic = [&](double P) { return 3.0 * eps * P * P + eps * a2; };
    const double seed = p_opt_expansion(p);
    return newton_polish(cubic, dcubic, seed, 0.0, 10.0 * seed + 1.0, 1e-12 * a2);
}

/// First-order expansion of the P-component of the herbivore-dominating
/// equilibrium e3 about b + b_c = 0.
inline double asymptotic_p3(const ModelParams& p) {
    const double Ec = p.E * p.c_max;
    if (!(p.m > 0.0 && p.m < Ec))
        throw std::invalid_argument("asymptotic_p3: requires 0 < m < E c_max");
    const double a2 = p.a * p.a;
    return std::sqrt(a2 * p.m / (Ec - p.m)) +
           a2 * p.m * Ec * p.nonlinearity() / (2.0 * (Ec - p.m) * (Ec - p.m));
}

/// First-order expansion of the P-component of the plant-dominating
/// equilibrium e4 (singular perturbation; requires b + b_c > 0).
inline double asymptotic_p4(const ModelParams& p) {
    const double Ec = p.E * p.c_max;
    if (!(p.m > 0.0 && p.m < Ec))
        throw std::invalid_argument("asymptotic_p4: requires 0 < m < E c_max");
    const double s = p.nonlinearity();
    if (!(s > 0.0)) throw std::invalid_argument("asymptotic_p4: requires b + b_c > 0");
    const double L = std::log(Ec / p.m);
    return L / s - p.a * p.a * s / (L * L);
}

enum class EquilibriumKind { e1, e2, e3, e4 };

inline const char* equilibrium_name(EquilibriumKind k) {
    switch (k) {
    case EquilibriumKind::e1: return "e1";
    case EquilibriumKind::e2: return "e2";
    case EquilibriumKind::e3: return "e3";
    case EquilibriumKind::e4: return "e4";
    }
    return "?";
}

struct Equilibrium {
    EquilibriumKind kind;
    State state;
    Eig2 eigs;
    Stability stability;
};

namespace detail {

inline Equilibrium make_equilibrium(EquilibriumKind kind, const State& s, const ModelParams& p) {
    const Eig2 e = eigenvalues(jacobian(s, p));
    return {kind, s, e, classify_stability(e)};
}

/// Root of h(P) in (lo, hi), bisection + Newton polish to |h| < 1e-13.
inline std::optional<double> growth_root(const ModelParams& p, double lo, double hi) {
    auto h = [&](double P) { return herbivore_growth(P, p); };
    if ((h(lo) > 0.0) == (h(hi) > 0.0)) return std::nullopt;
    RootOptions opt;
    opt.xtol = 1e-9;
    double x = bisect(h, lo, hi, opt);
    x = newton_polish(h, [&](double P) { return herbivore_growth_deriv(P, p); }, x, lo, hi, 1e-13);
    return x;
}

} // namespace detail

/// P-component of e3: root of h on (0, P_opt). Empty if h never reaches zero
/// there. For b + b_c = 0 the single root of the monotone h is returned.
inline std::optional<double> p3_root(const ModelParams& p) {
    const double Ec = p.E * p.c_max;
    if (p.nonlinearity() <= 0.0) {
        if (p.m >= Ec) return std::nullopt;
        const double P = std::sqrt(p.a * p.a * p.m / (Ec - p.m));
        return P;
    }
    return detail::growth_root(p, 1e-12, p_opt(p));
}

/// P-component of e4: root of h on (P_opt, inf). Absent when b + b_c = 0
/// (singular limit) or when h has no second root.
inline std::optional<double> p4_root(const ModelParams& p) {
    const double Ec = p.E * p.c_max;
    if (p.nonlinearity() <= 0.0 || p.m >= Ec) return std::nullopt;
    const double hi = 10.0 * std::log(Ec / p.m) / p.nonlinearity();
    return detail::growth_root(p, p_opt(p), hi);
}

/// All equilibria with non-negative components: e1 and e2 always; e3/e4 when
/// their P-roots exist with H >= 0. Each carries eigenvalues and a stability
/// class.
inline std::vector<Equilibrium> equilibria(const ModelParams& p) {
    p.validate();
    std::vector<Equilibrium> out;
    out.push_back(detail::make_equilibrium(EquilibriumKind::e1, {0.0, 0.0}, p));
    out.push_back(detail::make_equilibrium(EquilibriumKind::e2, {p.r / p.C, 0.0}, p));
    if (auto P3 = p3_root(p)) {
        const double H = equilibrium_herbivore(*P3, p);
        if (H >= 0.0)
            out.push_back(detail::make_equilibrium(EquilibriumKind::e3, {*P3, H}, p));
    }
    if (auto P4 = p4_root(p)) {
        const double H = equilibrium_herbivore(*P4, p);
        if (H >= 0.0)
            out.push_back(detail::make_equilibrium(EquilibriumKind::e4, {*P4, H}, p));
    }
    return out;
}

inline std::optional<Equilibrium> find_equilibrium(const ModelParams& p, EquilibriumKind kind) {
    for (const auto& e : equilibria(p))
        if (e.kind == kind) return e;
    return std::nullopt;
}

} // namespace ratetip
