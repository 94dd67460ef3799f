// Attractor classification by forward integration, basin-membership tests,
// and basin-instability regions BI(e3, p1) over the (r, m) plane.
//
// A start point is classified by integrating the frozen-parameter field with
// early exits: convergence into a small ball around a stable equilibrium with
// a near-zero velocity, escape beyond a divergence radius, or a recurrent
// sequence of Poincare maxima (a limit cycle). Near the Hopf curve the slow
// spiral rate |Re lambda(e3)| sets the integration horizon.

#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ratetip/ecosystem.hpp"
#include "ratetip/ode.hpp"

namespace ratetip {

enum class AttractorLabel { converged_e2, converged_e3, cycle, divergent, undecided };

inline const char* attractor_name(AttractorLabel l) {
    switch (l) {
    case AttractorLabel::converged_e2: return "converged_e2";
    case AttractorLabel::converged_e3: return "converged_e3";
    case AttractorLabel::cycle: return "cycle";
    case AttractorLabel::divergent: return "divergent";
    case AttractorLabel::undecided: return "undecided";
    }
    return "?";
}

struct ClassifyOptions {
    double horizon = 1e5;          // d
    double delta_attr = 1e-5;      // convergence ball radius
    double velocity_tol = 1e-7;    // |f(y)| at convergence
    double divergence_radius = 1e6;
    bool scale_horizon_near_hopf = true;
    double max_horizon = 1e8;
};

struct ClassifyResult {
    AttractorLabel label = AttractorLabel::undecided;
    double t_decided = 0.0;
    State final_state{};
    std::string diagnostic;
};

/// Classify the omega-limit of `start` under frozen parameters.
inline ClassifyResult classify(const State& start, const ModelParams& p,
                               const ClassifyOptions& opts = {},
                               const IntegratorConfig& cfg = grid_integrator_config()) {
    const auto e2 = find_equilibrium(p, EquilibriumKind::e2);
    const auto e3 = find_equilibrium(p, EquilibriumKind::e3);
    const bool e2_attracts = e2 && is_attracting(e2->stability);
    const bool e3_attracts = e3 && is_attracting(e3->stability);

    double horizon = opts.horizon;
    if (opts.scale_horizon_near_hopf && e3) {
        const double re = std::abs(e3->eigs.l1.real());
        if (re > 0.0) horizon = std::min(std::max(horizon, 25.0 / re), opts.max_horizon);
    }

    auto field = [&p](double, const Vec<2>& y, Vec<2>& dy) {
        const State f = vector_field(y, p);
        dy[0] = f[0];
        dy[1] = f[1];
    };
    IntegratorConfig c = cfg;
    c.clamp_nonneg = true;

    // The numeric state parks within O(abs_tol + rel_tol |e|) of an attractor,
    // where the true field is still of size |lambda| times that offset. The
    // velocity gate must sit above this floor or loose-tolerance runs never
    // converge.
    auto velocity_gate = [&](const Equilibrium& e) {
        const double lam = std::max(std::abs(e.eigs.l1), std::abs(e.eigs.l2));
        const double floor = 10.0 * lam * (c.abs_tol + c.rel_tol * detail::norm2(e.state));
        return std::max(opts.velocity_tol, floor);
    };
    const double gate_e2 = e2_attracts ? velocity_gate(*e2) : 0.0;
    const double gate_e3 = e3_attracts ? velocity_gate(*e3) : 0.0;

    ClassifyResult res;
    res.final_state = start;
    // Poincare maxima of P (zeros of dP/dt from above), localised on the
    // dense interpolant; three consecutive coincident maxima away from the
    // equilibria witness a limit cycle.
    State maxima[3];
    int n_maxima = 0;

    auto check = [&](double t, const Vec<2>& y) -> bool { // false = decided
        res.final_state = y;
        const State f = vector_field(y, p);
        const double speed = detail::norm2(f);
        if (e3_attracts && detail::dist2(y, e3->state) < opts.delta_attr && speed < gate_e3) {
            res.label = AttractorLabel::converged_e3;
            res.t_decided = t;
            return false;
        }
        if (e2_attracts && detail::dist2(y, e2->state) < opts.delta_attr && speed < gate_e2) {
            res.label = AttractorLabel::converged_e2;
            res.t_decided = t;
            return false;
        }
        if (detail::norm2(y) > opts.divergence_radius) {
            res.label = AttractorLabel::divergent;
            res.t_decided = t;
            return false;
        }
        return true;
    };

    try {
        Dopri5<2, decltype(field)> st(field, start, 0.0, horizon, c);
        if (!check(st.t(), st.y())) return res;
        double prev_dP = vector_field(start, p)[0];
        while (st.step()) {
            if (!check(st.t(), st.y())) return res;
            const double dP = vector_field(st.y(), p)[0];
            if (prev_dP > 0.0 && dP <= 0.0) {
                // localise the maximum of P inside the step
                double lo = st.t_prev(), hi = st.t();
                for (int it = 0; it < 60 && hi - lo > 1e-9 * (1.0 + std::abs(hi)); ++it) {
                    const double mid = 0.5 * (lo + hi);
                    if (vector_field(st.dense(mid), p)[0] > 0.0)
                        lo = mid;
                    else
                        hi = mid;
                }
                const State peak = st.dense(0.5 * (lo + hi));
                const bool near_eq = (e3 && detail::dist2(peak, e3->state) < 1e-2) ||
                                     (e2 && detail::dist2(peak, e2->state) < 1e-2);
                if (!near_eq) {
                    maxima[n_maxima % 3] = peak;
                    ++n_maxima;
                    if (n_maxima >= 3) {
                        const double d01 = detail::dist2(maxima[0], maxima[1]);
                        const double d12 = detail::dist2(maxima[1], maxima[2]);
                        const double d02 = detail::dist2(maxima[0], maxima[2]);
                        if (d01 < 1e-6 && d12 < 1e-6 && d02 < 1e-6) {
                            res.label = AttractorLabel::cycle;
                            res.t_decided = st.t();
                            return res;
                        }
                    }
                }
            }
            prev_dP = dP;
        }
        res.label = AttractorLabel::undecided;
        res.t_decided = st.t();
        res.diagnostic = st.budget_exhausted() ? "step budget exhausted"
                                               : "horizon reached without convergence";
    } catch (const IntegrationError& err) {
        res.label = AttractorLabel::undecided;
        res.diagnostic = err.what();
    }
    return res;
}

/// True iff `point` converges to e3 under the frozen parameters. e3 must
/// exist and be attracting.
inline bool in_basin_of_e3(const State& point, const ModelParams& p,
                           const ClassifyOptions& opts = {},
                           const IntegratorConfig& cfg = grid_integrator_config()) {
    const auto e3 = find_equilibrium(p, EquilibriumKind::e3);
    if (!e3 || !is_attracting(e3->stability))
        throw std::invalid_argument("in_basin_of_e3: basin undefined (e3 absent or not attracting)");
    return classify(point, p, opts, cfg).label == AttractorLabel::converged_e3;
}

/// An axis-aligned path in the (r, m) plane: one coordinate varies, the
/// other is held fixed.
struct AxisPath {
    enum class Vary { r, m } vary = Vary::r;
    double fixed = 0.0; // the held coordinate's value
};

inline ModelParams params_at(const ModelParams& base, const AxisPath& path, double x) {
    ModelParams p = base;
    if (path.vary == AxisPath::Vary::r) {
        p.r = x;
        p.m = path.fixed;
    } else {
        p.m = x;
        p.r = path.fixed;
    }
    return p;
}

/// Basin-instability boundary along an axis-aligned path: the path coordinate
/// at which e3(p1) leaves the basin of e3 at the path point. The membership
/// test must differ at the two bracket ends; bisected to a width of 1e-6.
inline double bi_boundary_on_path(const ModelParams& p1, const AxisPath& path, double lo,
                                  double hi, const ClassifyOptions& opts = {},
                                  const IntegratorConfig& cfg = grid_integrator_config()) {
    const auto e3_p1 = find_equilibrium(p1, EquilibriumKind::e3);
    if (!e3_p1 || !is_attracting(e3_p1->stability))
        throw std::invalid_argument("bi_boundary_on_path: e3 must exist and attract at p1");
    auto inside = [&](double x) {
        return in_basin_of_e3(e3_p1->state, params_at(p1, path, x), opts, cfg);
    };
    bool in_lo = inside(lo);
    const bool in_hi = inside(hi);
    if (in_lo == in_hi)
        throw std::invalid_argument("bi_boundary_on_path: no membership change in bracket");
    while (hi - lo > 1e-6) {
        const double mid = 0.5 * (lo + hi);
        if (inside(mid) == in_lo)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

/// Rectangular lattice over (r, m) with basin-instability membership relative
/// to a start point p1. `mask` marks cells where the membership question is
/// well-posed (e3 exists and attracts, and e2 attracts: the bistable regions).
struct BasinMap {
    double p1_r = 0.0, p1_m = 0.0;
    std::vector<double> rs, ms;
    std::vector<std::uint8_t> mask;   // row-major [i_r * ms.size() + i_m]
    std::vector<std::uint8_t> member; // false wherever mask is false

    std::size_t index(std::size_t ir, std::size_t im) const { return ir * ms.size() + im; }
};

struct GridAxis {
    double lo = 0.0, hi = 1.0;
    std::size_t n = 10;
    bool log = false;

    double at(std::size_t i) const {
        if (n == 1) return lo;
        const double f = static_cast<double>(i) / static_cast<double>(n - 1);
        return log ? lo * std::pow(hi / lo, f) : lo + (hi - lo) * f;
    }
    std::vector<double> values() const {
        std::vector<double> v(n);
        for (std::size_t i = 0; i < n; ++i) v[i] = at(i);
        return v;
    }
};

/// Membership of one cell: e3(p1) outside the closed basin of e3 at p2.
/// The closure is approximated with a probe 1e-4 along the segment from
/// e3(p1) toward e3(p2): boundary-grazing points do not count as members.
inline bool bi_member(const State& e3_p1, const ModelParams& p2, const ClassifyOptions& opts,
                      const IntegratorConfig& cfg) {
    if (classify(e3_p1, p2, opts, cfg).label == AttractorLabel::converged_e3) return false;
    const auto e3_p2 = find_equilibrium(p2, EquilibriumKind::e3);
    State probe = e3_p1;
    const double d = detail::dist2(e3_p1, e3_p2->state);
    if (d > 0.0) {
        for (int i = 0; i < 2; ++i)
            probe[i] += 1e-4 * (e3_p2->state[i] - e3_p1[i]) / d;
    }
    return classify(probe, p2, opts, cfg).label != AttractorLabel::converged_e3;
}

/// Is (r, m) in one of the bistable regions (e3 and e2 both attracting)?
inline bool bistable_mask(const ModelParams& p) {
    const auto e3 = find_equilibrium(p, EquilibriumKind::e3);
    if (!e3 || !is_attracting(e3->stability)) return false;
    const auto e2 = find_equilibrium(p, EquilibriumKind::e2);
    return e2 && is_attracting(e2->stability);
}

/// Basin-instability region BI(e3, p1) over a (r, m) grid. Cells outside the
/// bistable mask get member = false. Deterministic row-major cell order.
inline BasinMap bi_region(const ModelParams& p1, const GridAxis& r_axis, const GridAxis& m_axis,
                          const ClassifyOptions& opts = {},
                          const IntegratorConfig& cfg = grid_integrator_config()) {
    if (!bistable_mask(p1))
        throw std::invalid_argument("bi_region: p1 must lie in the bistable region");
    const auto e3_p1 = find_equilibrium(p1, EquilibriumKind::e3);
    BasinMap map;
    map.p1_r = p1.r;
    map.p1_m = p1.m;
    map.rs = r_axis.values();
    map.ms = m_axis.values();
    map.mask.assign(map.rs.size() * map.ms.size(), 0);
    map.member.assign(map.rs.size() * map.ms.size(), 0);
    for (std::size_t ir = 0; ir < map.rs.size(); ++ir) {
        for (std::size_t im = 0; im < map.ms.size(); ++im) {
            ModelParams p2 = p1;
            p2.r = map.rs[ir];
            p2.m = map.ms[im];
            const std::size_t k = map.index(ir, im);
            if (!bistable_mask(p2)) continue;
            map.mask[k] = 1;
            map.member[k] = bi_member(e3_p1->state, p2, opts, cfg) ? 1 : 0;
        }
    }
    return map;
}

} // namespace ratetip
