// Bifurcation structure of the ecosystem model in the (r, m) plane:
// transcritical curve T (closed form), saddle-node half-line S_e (cubic root
// plus closed form), the ST point joining them, the Hopf curve H_e by
// per-slice eigenvalue root finding, and the Bogdanov-Takens point on S_e.
//
// At an interior equilibrium the Jacobian's lower-right entry vanishes
// (it equals h(P) = 0), so trace(J) reduces to the upper-left entry and
// det(J) to -J12*J21. The Hopf and BT conditions below use that reduction.

#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "ratetip/ecosystem.hpp"
#include "ratetip/ode.hpp"
#include "ratetip/rootfind.hpp"

namespace ratetip {

enum class CurveLabel { T, S_e, H_e };
enum class Criticality { supercritical, subcritical };

struct CurvePoint {
    double r, m;
    Criticality crit;
};

struct BifurcationCurve {
    CurveLabel label;
    std::vector<CurvePoint> points;
};

/// Transcritical curve T: the m at which an interior equilibrium collides
/// with e2 = (r/C, 0).
inline double transcritical_m(double r, const ModelParams& p) {
    if (!(r > 0.0)) throw std::invalid_argument("transcritical_m: r must be positive");
    const double x = p.a * p.C / r;
    return p.E * p.c_max * std::exp(-p.nonlinearity() * r / p.C) / (x * x + 1.0);
}

struct SaddleNodeHalfLine {
    double P_sn;   // double root of h, equal to the optimal plant biomass
    double m_sn;   // constant m along the half-line
    double r_min;  // half-line is { (r, m_sn) : r >= r_min }
};

/// Saddle-node half-line S_e. Requires b + b_c > 0; the defining cubic
/// q(P) = (b+b_c)P^3 + a^2(b+b_c)P - 2a^2 has no positive root otherwise.
inline SaddleNodeHalfLine saddle_node_halfline(const ModelParams& p) {
    const double s = p.nonlinearity();
    if (!(s > 0.0)) throw std::invalid_argument("saddle_node_halfline: no saddle-node for b + b_c = 0");
    const double P = p_opt(p); // q(P) = 2 (eps P^3 + eps a^2 P - a^2), same root
    const double m = p.E * p.c_max * std::exp(-s * P) / ((p.a / P) * (p.a / P) + 1.0);
    return {P, m, p.C * P};
}

/// The saddle-node-transcritical point where S_e terminates on T.
struct CodimTwoPoint {
    enum class Label { ST, BT } label;
    double r, m;
    std::optional<int> bt_type; // 1 or 2, tagged from the Hopf-side criticality only
};

inline CodimTwoPoint st_point(const ModelParams& p) {
    const auto sn = saddle_node_halfline(p);
    return {CodimTwoPoint::Label::ST, sn.r_min, sn.m_sn, std::nullopt};
}

namespace detail {

/// trace of the Jacobian at e3 for the given (r, m); nullopt when e3 does
/// not exist there with H >= 0.
inline std::optional<double> trace_at_e3(const ModelParams& base, double r, double m) {
    ModelParams p = base;
    p.r = r;
    p.m = m;
    const auto P3 = p3_root(p);
    if (!P3) return std::nullopt;
    const double H = equilibrium_herbivore(*P3, p);
    if (H < 0.0) return std::nullopt;
    return r - 2.0 * p.C * *P3 - H * functional_response_deriv(*P3, p);
}

inline std::optional<double> det_at_e3(const ModelParams& base, double r, double m) {
    ModelParams p = base;
    p.r = r;
    p.m = m;
    const auto P3 = p3_root(p);
    if (!P3) return std::nullopt;
    const double H = equilibrium_herbivore(*P3, p);
    if (H < 0.0) return std::nullopt;
    const Mat2 J = jacobian({*P3, H}, p);
    return -J[0][1] * J[1][0];
}

} // namespace detail

/// m on the Hopf curve at fixed r: the zero of trace(J(e3)) in m, bracketed
/// inside the window where e3 exists. Empty when the trace does not change
/// sign there.
inline std::optional<double> hopf_m_at_r(const ModelParams& base, double r) {
    const double m_lo = 1e-4;
    const double m_hi = base.nonlinearity() > 0.0
                            ? saddle_node_halfline(base).m_sn - 1e-9
                            : base.E * base.c_max * (1.0 - 1e-9);
    auto tr = [&](double m) {
        const auto t = detail::trace_at_e3(base, r, m);
        return t ? *t : -1.0; // e3 absent counts as the stable side
    };
    const auto brackets = scan_brackets(tr, m_lo, m_hi, 400);
    if (brackets.empty()) return std::nullopt;
    RootOptions opt;
    opt.xtol = 1e-12;
    const double m = bisect(tr, brackets.front().first, brackets.front().second, opt);
    const auto t = detail::trace_at_e3(base, r, m);
    const auto d = detail::det_at_e3(base, r, m);
    if (!t || std::abs(*t) > 1e-9 || !d || *d <= 0.0) return std::nullopt;
    return m;
}

/// r on the Hopf curve at fixed m (the slice used when a parameter path
/// varies r). Empty when the trace has no zero in the scanned r-interval.
inline std::optional<double> hopf_r_at_m(const ModelParams& base, double m, double r_lo,
                                         double r_hi) {
    auto tr = [&](double r) {
        const auto t = detail::trace_at_e3(base, r, m);
        return t ? *t : -1.0;
    };
    const auto brackets = scan_brackets(tr, r_lo, r_hi, 400);
    if (brackets.empty()) return std::nullopt;
    RootOptions opt;
    opt.xtol = 1e-12;
    const double r = bisect(tr, brackets.front().first, brackets.front().second, opt);
    const auto t = detail::trace_at_e3(base, r, m);
    const auto d = detail::det_at_e3(base, r, m);
    if (!t || std::abs(*t) > 1e-9 || !d || *d <= 0.0) return std::nullopt;
    return r;
}

/// Empirical criticality of a Hopf point: start displaced 1e-3 from e3 just
/// on the unstable side of the crossing and test for bounded small
/// oscillation (supercritical cycle) versus escape (subcritical). The wait
/// horizon follows the slow spiral rate at the displaced parameter point.
inline Criticality hopf_criticality(const ModelParams& base, double r, double m_hopf,
                                    const IntegratorConfig& cfg = grid_integrator_config()) {
    const double dm = std::max(1e-3 * m_hopf, 1e-5);
    const auto t_above = detail::trace_at_e3(base, r, m_hopf + dm);
    const double m_unstable = (t_above && *t_above > 0.0) ? m_hopf + dm : m_hopf - dm;
    ModelParams p = base;
    p.r = r;
    p.m = m_unstable;
    const auto e3 = find_equilibrium(p, EquilibriumKind::e3);
    if (!e3) return Criticality::subcritical;
    State y0 = e3->state;
    y0[0] += 1e-3;
    y0[1] += 1e-3;
    const double bound = std::max(1.0, 0.1 * detail::norm2(e3->state));
    const double rate = std::abs(e3->eigs.l1.real());
    const double horizon = std::min(rate > 0.0 ? 30.0 / rate : 1e6, 1e7);
    double max_dist = 0.0;
    auto field = [&](double, const Vec<2>& y, Vec<2>& dy) {
        const State f = vector_field(y, p);
        dy[0] = f[0];
        dy[1] = f[1];
    };
    IntegratorConfig c = cfg;
    c.clamp_nonneg = true;
    integrate_observe(field, y0, 0.0, horizon, c, [&](double, const Vec<2>& y) {
        max_dist = std::max(max_dist, detail::dist2(y, e3->state));
        return max_dist <= bound;
    });
    return max_dist <= bound ? Criticality::supercritical : Criticality::subcritical;
}

/// Hopf curve H_e sampled at n equidistant r-slices over [r_lo, r_hi].
/// Slices where the bracketing fails are omitted.
inline BifurcationCurve hopf_curve(const ModelParams& base, double r_lo, double r_hi, int n) {
    if (!(p_opt(base) > 0.0)) throw std::invalid_argument("hopf_curve: requires b + b_c > 0");
    if (n < 2) throw std::invalid_argument("hopf_curve: need at least 2 samples");
    BifurcationCurve curve;
    curve.label = CurveLabel::H_e;
    for (int i = 0; i < n; ++i) {
        const double r = r_lo + (r_hi - r_lo) * static_cast<double>(i) / (n - 1);
        const auto m = hopf_m_at_r(base, r);
        if (!m) continue;
        curve.points.push_back({r, *m, hopf_criticality(base, r, *m)});
    }
    return curve;
}

/// Bogdanov-Takens point: the point of the S_e half-line where the trace at
/// the degenerate equilibrium (P_sn, H(r)) vanishes. Both eigenvalues are
/// zero there, since the equilibrium-row entries of J already vanish at a
/// double root of h.
inline CodimTwoPoint bt_point(const ModelParams& base, double r_hi = 10.0) {
    const auto sn = saddle_node_halfline(base);
    ModelParams p = base;
    p.m = sn.m_sn;
    auto tr = [&](double r) {
        p.r = r;
        const double H = equilibrium_herbivore(sn.P_sn, p);
        return r - 2.0 * p.C * sn.P_sn - H * functional_response_deriv(sn.P_sn, p);
    };
    if ((tr(sn.r_min) > 0.0) == (tr(r_hi) > 0.0))
        throw std::runtime_error("bt_point: no BT in range");
    RootOptions opt;
    opt.xtol = 1e-12;
    const double r_bt = bisect(tr, sn.r_min, r_hi, opt);
    CodimTwoPoint pt{CodimTwoPoint::Label::BT, r_bt, sn.m_sn, std::nullopt};
    // Partial type tag from the criticality of the emerging Hopf branch.
    const auto m_near = hopf_m_at_r(base, r_bt + 0.05 * (r_bt - sn.r_min + 0.1));
    if (m_near) {
        const auto crit = hopf_criticality(base, r_bt + 0.05 * (r_bt - sn.r_min + 0.1), *m_near);
        pt.bt_type = crit == Criticality::supercritical ? 1 : 2;
    }
    return pt;
}

/// Criticality of the transcritical curve at r: supercritical on the branch
/// where the bifurcating interior equilibrium is attracting (left of ST).
inline BifurcationCurve transcritical_curve(const ModelParams& base, double r_lo, double r_hi,
                                            int n) {
    BifurcationCurve curve;
    curve.label = CurveLabel::T;
    double r_st = std::numeric_limits<double>::infinity();
    if (base.nonlinearity() > 0.0) r_st = saddle_node_halfline(base).r_min;
    for (int i = 0; i < n; ++i) {
        const double r = r_lo + (r_hi - r_lo) * static_cast<double>(i) / (n - 1);
        curve.points.push_back({r, transcritical_m(r, base),
                                r <= r_st ? Criticality::supercritical : Criticality::subcritical});
    }
    return curve;
}

} // namespace ratetip
