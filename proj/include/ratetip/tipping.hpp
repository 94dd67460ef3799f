// Non-autonomous simulation under a parameter shift, tracking-vs-tipping
// classification, critical-rate bisection, (magnitude, rate) tipping
// diagrams, return partitions, and canard witness extraction.
//
// The machinery is generic over a "model" adapter that provides the frozen
// field at a parameter value, the moving base equilibrium along the shift,
// an optional escape test, and the settled tracking/tipped decision under
// frozen end-of-shift parameters. Adapters exist for the ecosystem (shift in
// r or m) and for the two tilted normal forms.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ratetip/basins.hpp"
#include "ratetip/ecosystem.hpp"
#include "ratetip/normal_forms.hpp"
#include "ratetip/ode.hpp"
#include "ratetip/shifts.hpp"

namespace ratetip {

enum class TipClass : std::uint8_t { tracking, tipped, unclassifiable };

inline const char* tip_class_name(TipClass c) {
    switch (c) {
    case TipClass::tracking: return "track";
    case TipClass::tipped: return "tip";
    case TipClass::unclassifiable: return "unclassifiable";
    }
    return "?";
}

struct SettleOutcome {
    TipClass classification = TipClass::unclassifiable;
    double final_distance_base = 0.0; // to the moving attractor (e3 or its analogue)
    double final_distance_alt = 0.0;  // to the alternative attractor (e2; escape measure)
    std::string diagnostic;
};

template <std::size_t N>
struct RunOutcome {
    TipClass classification = TipClass::unclassifiable;
    double final_distance_base = 0.0;
    double final_distance_alt = 0.0;
    std::string diagnostic;
    std::optional<Trajectory<N>> trajectory; // shift phase, when requested
};

struct SimulateOptions {
    double delta_rel = 1e-3; // start when the shift is delta_rel-close to its base
    ClassifyOptions classify;
    bool keep_trajectory = false;
};

// ---------------------------------------------------------------------------
// Model adapters
// ---------------------------------------------------------------------------

/// Ecosystem under an axis-aligned shift of r or m from the base point p1.
struct EcosystemShiftModel {
    static constexpr std::size_t dim = 2;
    ModelParams p1;
    ShiftTarget target = ShiftTarget::r;

    ModelParams at(double mu) const {
        ModelParams p = p1;
        if (target == ShiftTarget::r)
            p.r = mu;
        else if (target == ShiftTarget::m)
            p.m = mu;
        else
            throw std::invalid_argument("EcosystemShiftModel: target must be r or m");
        return p;
    }

    double base_value() const { return target == ShiftTarget::r ? p1.r : p1.m; }

    ShiftSpec make_shift(ShiftShape shape, double delta, double eps, double c = 1.0,
                         double tau = 0.0) const {
        ShiftSpec s;
        s.shape = shape;
        s.base = base_value();
        s.magnitude = delta;
        s.rate = eps;
        s.c = c;
        s.tau = tau;
        s.target = target;
        return s;
    }

    Vec<2> rhs(double mu, const Vec<2>& y) const { return vector_field(y, at(mu)); }

    bool wants_nonneg_clamp() const { return true; }

    std::optional<Vec<2>> base_equilibrium(double mu) const {
        const auto e3 = find_equilibrium(at(mu), EquilibriumKind::e3);
        if (!e3) return std::nullopt;
        return e3->state;
    }

    bool base_attracting(double mu) const {
        const auto e3 = find_equilibrium(at(mu), EquilibriumKind::e3);
        return e3 && is_attracting(e3->stability);
    }

    bool escaped(const Vec<2>&, double) const { return false; }

    std::optional<Vec<2>> unstable_state(double mu) const {
        const auto e4 = find_equilibrium(at(mu), EquilibriumKind::e4);
        if (!e4) return std::nullopt;
        return e4->state;
    }

    std::pair<double, double> base_point(const ShiftSpec&) const { return {p1.r, p1.m}; }

    SettleOutcome settle(const Vec<2>& y, double mu_end, const ClassifyOptions& opts,
                         const IntegratorConfig& cfg) const {
        const ModelParams p = at(mu_end);
        const auto res = classify(y, p, opts, cfg);
        SettleOutcome out;
        const auto e3 = find_equilibrium(p, EquilibriumKind::e3);
        const auto e2 = find_equilibrium(p, EquilibriumKind::e2);
        out.final_distance_base = e3 ? detail::dist2(res.final_state, e3->state)
                                     : std::numeric_limits<double>::infinity();
        out.final_distance_alt = e2 ? detail::dist2(res.final_state, e2->state)
                                    : std::numeric_limits<double>::infinity();
        switch (res.label) {
        case AttractorLabel::converged_e3: out.classification = TipClass::tracking; break;
        case AttractorLabel::converged_e2: out.classification = TipClass::tipped; break;
        default:
            out.classification = TipClass::unclassifiable;
            out.diagnostic = res.diagnostic.empty() ? attractor_name(res.label) : res.diagnostic;
        }
        return out;
    }

    std::string name() const { return "ecosystem"; }
};

/// Tilted subcritical Hopf normal form under a shift of mu. Tipping means
/// escape past the cubic instability; there is no second attractor.
struct HopfNfShiftModel {
    static constexpr std::size_t dim = 2;
    double omega = 1.0;
    double alpha = 1.0;
    double s = 0.0;

    ShiftSpec make_shift(ShiftShape shape, double base, double delta, double eps, double c = 1.0,
                         double tau = 0.0) const {
        ShiftSpec sp;
        sp.shape = shape;
        sp.base = base;
        sp.magnitude = delta;
        sp.rate = eps;
        sp.c = c;
        sp.tau = tau;
        sp.target = ShiftTarget::mu;
        return sp;
    }

    Vec<2> rhs(double mu, const Vec<2>& z) const {
        return hopf_nf_field(z, {mu, omega, alpha, s});
    }

    bool wants_nonneg_clamp() const { return false; }

    std::optional<Vec<2>> base_equilibrium(double mu) const {
        return Vec<2>{mu * s, 0.0};
    }

    bool base_attracting(double mu) const { return mu < 0.0; }

    double escape_radius(double mu) const { return 10.0 * std::sqrt(std::max(1.0, std::abs(mu))); }

    bool escaped(const Vec<2>& z, double mu) const {
        const double u = z[0] - mu * s, v = z[1];
        return std::sqrt(u * u + v * v) > escape_radius(mu);
    }

    std::optional<Vec<2>> unstable_state(double) const { return std::nullopt; }

    std::pair<double, double> base_point(const ShiftSpec& s) const { return {s.base, 0.0}; }

    SettleOutcome settle(const Vec<2>& z, double mu_end, const ClassifyOptions& opts,
                         const IntegratorConfig& cfg) const {
        SettleOutcome out;
        const Vec<2> eq{mu_end * s, 0.0};
        out.final_distance_base = detail::dist2(z, eq);
        out.final_distance_alt = out.final_distance_base; // escape measured from the branch
        if (mu_end == 0.0) {
            // frozen exactly at the bifurcation: the cubic drives any nonzero
            // amplitude out (algebraically slowly near zero), so decide here
            out.classification =
                out.final_distance_base == 0.0 ? TipClass::tracking : TipClass::tipped;
            return out;
        }
        if (escaped(z, mu_end)) {
            out.classification = TipClass::tipped;
            return out;
        }
        auto field = [&](double, const Vec<2>& y, Vec<2>& dy) {
            const Vec<2> f = rhs(mu_end, y);
            dy = f;
        };
        TipClass decided = TipClass::unclassifiable;
        auto obs = [&](double, const Vec<2>& y) {
            if (escaped(y, mu_end)) {
                decided = TipClass::tipped;
                return false;
            }
            if (mu_end < 0.0 && detail::dist2(y, eq) < opts.delta_attr) {
                decided = TipClass::tracking;
                return false;
            }
            return true;
        };
        // Below the bifurcation the focus rate is |mu_end|; give slow foci time.
        double horizon = opts.horizon;
        const double rate = std::abs(mu_end);
        if (rate > 0.0) horizon = std::min(std::max(horizon, 25.0 / rate), opts.max_horizon);
        integrate_observe(field, z, 0.0, horizon, cfg, obs);
        out.classification = decided;
        if (decided == TipClass::unclassifiable) out.diagnostic = "horizon reached";
        return out;
    }

    std::string name() const { return "hopf_nf"; }
};

/// Tilted saddle-node normal form under a shift of mu. Past the escape
/// offset the field is strictly negative, so escape is monotone and final.
struct SnNfShiftModel {
    static constexpr std::size_t dim = 1;
    double s = 0.0;

    ShiftSpec make_shift(ShiftShape shape, double base, double delta, double eps, double c = 1.0,
                         double tau = 0.0) const {
        ShiftSpec sp;
        sp.shape = shape;
        sp.base = base;
        sp.magnitude = delta;
        sp.rate = eps;
        sp.c = c;
        sp.tau = tau;
        sp.target = ShiftTarget::mu;
        return sp;
    }

    Vec<1> rhs(double mu, const Vec<1>& x) const { return {sn_nf_field(x[0], {mu, s})}; }

    bool wants_nonneg_clamp() const { return false; }

    std::optional<Vec<1>> base_equilibrium(double mu) const {
        if (mu > 0.0) return std::nullopt;
        return Vec<1>{sn_nf_stable(mu, s)};
    }

    bool base_attracting(double mu) const { return mu < 0.0; }

    bool escaped(const Vec<1>& x, double mu) const { return std::abs(x[0] - mu * s) > 10.0; }

    std::optional<Vec<1>> unstable_state(double mu) const {
        if (mu > 0.0) return std::nullopt;
        return Vec<1>{sn_nf_unstable(mu, s)};
    }

    std::pair<double, double> base_point(const ShiftSpec& sp) const { return {sp.base, 0.0}; }

    SettleOutcome settle(const Vec<1>& x, double mu_end, const ClassifyOptions& opts,
                         const IntegratorConfig& cfg) const {
        SettleOutcome out;
        const bool eq_exists = mu_end <= 0.0;
        const double eq = eq_exists ? sn_nf_stable(mu_end, s) : 0.0;
        out.final_distance_base =
            eq_exists ? std::abs(x[0] - eq) : std::numeric_limits<double>::infinity();
        out.final_distance_alt = std::abs(x[0] - mu_end * s);
        if (mu_end == 0.0) {
            // frozen exactly at the fold: dx/dt = -(x - mu s)^2 decays to the
            // half-stable equilibrium algebraically from above, escapes below
            out.classification = x[0] >= 0.0 ? TipClass::tracking : TipClass::tipped;
            return out;
        }
        if (escaped(x, mu_end)) {
            out.classification = TipClass::tipped;
            return out;
        }
        auto field = [&](double, const Vec<1>& y, Vec<1>& dy) { dy = rhs(mu_end, y); };
        TipClass decided = TipClass::unclassifiable;
        auto obs = [&](double, const Vec<1>& y) {
            if (escaped(y, mu_end)) {
                decided = TipClass::tipped;
                return false;
            }
            if (eq_exists && std::abs(y[0] - eq) < opts.delta_attr) {
                decided = TipClass::tracking;
                return false;
            }
            return true;
        };
        double horizon = opts.horizon;
        if (eq_exists && mu_end < 0.0)
            horizon = std::min(std::max(horizon, 25.0 / (2.0 * std::sqrt(-mu_end))),
                               opts.max_horizon);
        integrate_observe(field, x, 0.0, horizon, cfg, obs);
        out.classification = decided;
        if (decided == TipClass::unclassifiable) out.diagnostic = "horizon reached";
        return out;
    }

    std::string name() const { return "sn_nf"; }
};

// ---------------------------------------------------------------------------
// Simulation driver
// ---------------------------------------------------------------------------

/// Integrate the non-autonomous system along the shift and classify the
/// long-term outcome against the end-of-shift parameters. The initial state
/// is the moving stable equilibrium at the delta_rel start time.
template <class Model>
RunOutcome<Model::dim> simulate_shift(const Model& model, const ShiftSpec& shift,
                                      const IntegratorConfig& cfg = bisection_integrator_config(),
                                      const SimulateOptions& opts = {}) {
    constexpr std::size_t N = Model::dim;
    shift.validate();
    const double t0 = start_time(shift, opts.delta_rel);
    const double t_end = settle_time(shift, opts.delta_rel);
    const double mu0 = evaluate(shift, t0);
    const auto y0 = model.base_equilibrium(mu0);
    if (!y0 || !model.base_attracting(mu0))
        throw std::invalid_argument(
            "simulate_shift: base equilibrium absent or not attracting at the start parameters");

    auto field = [&](double t, const Vec<N>& y, Vec<N>& dy) {
        dy = model.rhs(evaluate(shift, t), y);
    };
    IntegratorConfig c = cfg;
    c.clamp_nonneg = model.wants_nonneg_clamp();

    RunOutcome<N> out;
    if (opts.keep_trajectory) out.trajectory.emplace();
    bool escaped_mid_shift = false;
    Vec<N> y_final = *y0;
    auto obs = [&](double t, const Vec<N>& y) {
        y_final = y;
        if (out.trajectory) {
            out.trajectory->times.push_back(t);
            out.trajectory->states.push_back(y);
        }
        if (model.escaped(y, evaluate(shift, t))) {
            escaped_mid_shift = true;
            return false;
        }
        return true;
    };
    const StopReason flag = integrate_observe(field, *y0, t0, t_end, c, obs);
    if (escaped_mid_shift) {
        out.classification = TipClass::tipped;
        out.final_distance_base = std::numeric_limits<double>::infinity();
        out.final_distance_alt = 0.0;
        return out;
    }
    if (flag == StopReason::step_budget) {
        out.classification = TipClass::unclassifiable;
        out.diagnostic = "step budget exhausted during the shift";
        return out;
    }
    const SettleOutcome settled =
        model.settle(y_final, evaluate(shift, t_end), opts.classify, cfg);
    out.classification = settled.classification;
    out.final_distance_base = settled.final_distance_base;
    out.final_distance_alt = settled.final_distance_alt;
    out.diagnostic = settled.diagnostic;
    if (out.classification == TipClass::unclassifiable && out.diagnostic.empty())
        out.diagnostic = "unclassifiable";
    return out;
}

/// Classification only; throws on an unclassifiable run.
template <class Model>
TipClass classify_shift(const Model& model, ShiftSpec shift, double delta, double eps,
                        const IntegratorConfig& cfg, const SimulateOptions& opts) {
    shift.magnitude = delta;
    shift.rate = eps;
    const auto out = simulate_shift(model, shift, cfg, opts);
    if (out.classification == TipClass::unclassifiable)
        throw std::runtime_error("unclassifiable run at delta=" + std::to_string(delta) +
                                 ", eps=" + std::to_string(eps) + ": " + out.diagnostic);
    return out.classification;
}

// ---------------------------------------------------------------------------
// Critical rates
// ---------------------------------------------------------------------------

struct CriticalRateOptions {
    int points_per_decade = 40; // logarithmic pre-scan resolution
    double tol_rel = 1e-6;      // relative bracket width after bisection
    SimulateOptions sim;
};

namespace detail {

inline std::vector<double> log_grid(double lo, double hi, int points_per_decade) {
    const int n =
        std::max(2, static_cast<int>(std::ceil(std::log10(hi / lo) * points_per_decade)) + 1);
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i)
        g[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
    return g;
}

} // namespace detail

/// All rates in [eps_lo, eps_hi] at which the classification flips, located
/// by a logarithmic pre-scan and refined by bisection in log eps. The
/// pre-scan resolution is the smallest detectable crossing separation.
template <class Model>
std::vector<double> critical_rate(const Model& model, const ShiftSpec& shift_template,
                                  double delta, double eps_lo, double eps_hi,
                                  const IntegratorConfig& cfg = bisection_integrator_config(),
                                  const CriticalRateOptions& opts = {}) {
    if (!(eps_lo > 0.0 && eps_hi > eps_lo))
        throw std::invalid_argument("critical_rate: need 0 < eps_lo < eps_hi");
    const auto grid = detail::log_grid(eps_lo, eps_hi, opts.points_per_decade);
    std::vector<TipClass> cls(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        cls[i] = classify_shift(model, shift_template, delta, grid[i], cfg, opts.sim);

    std::vector<double> crossings;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        if (cls[i] == cls[i + 1]) continue;
        double lo = grid[i], hi = grid[i + 1];
        const TipClass side = cls[i];
        while (hi / lo - 1.0 > opts.tol_rel) {
            const double mid = std::sqrt(lo * hi);
            if (classify_shift(model, shift_template, delta, mid, cfg, opts.sim) == side)
                lo = mid;
            else
                hi = mid;
        }
        crossings.push_back(std::sqrt(lo * hi));
    }
    return crossings;
}

// ---------------------------------------------------------------------------
// Tipping diagrams
// ---------------------------------------------------------------------------

struct DiagramGrid {
    GridAxis delta; // linear magnitudes
    GridAxis eps;   // logarithmic rates
};

struct TippingDiagram {
    std::vector<double> deltas, epsilons;
    std::vector<TipClass> cells; // row-major [i_delta * epsilons.size() + i_eps]
    struct Transition {
        double delta;
        double eps;
        int index; // ordinal of the crossing within its delta row
    };
    std::vector<Transition> transitions;
    // provenance
    std::string model_name;
    ShiftShape shape = ShiftShape::tanh_mono;
    ShiftTarget target = ShiftTarget::r;
    double base = 0.0;
    double p1_r = 0.0, p1_m = 0.0;
    double delta_rel = 1e-3;
    double horizon = 0.0;
    double shift_c = 1.0, shift_tau = 0.0;

    std::size_t index(std::size_t id, std::size_t ie) const { return id * epsilons.size() + ie; }
    std::size_t cell_count() const { return deltas.size() * epsilons.size(); }
    std::size_t unclassifiable_count() const {
        return static_cast<std::size_t>(
            std::count(cells.begin(), cells.end(), TipClass::unclassifiable));
    }
};

/// Classification of a single diagram cell; unclassifiable is recorded, not
/// thrown, so sweeps can continue.
template <class Model>
TipClass diagram_cell(const Model& model, ShiftSpec shift, double delta, double eps,
                      const IntegratorConfig& cfg, const SimulateOptions& opts) {
    shift.magnitude = delta;
    shift.rate = eps;
    try {
        return simulate_shift(model, shift, cfg, opts).classification;
    } catch (const std::exception&) {
        return TipClass::unclassifiable;
    }
}

/// Per-row transition extraction from classified cells. A transition is the
/// geometric midpoint of the bracketing cells, optionally refined by
/// bisection. Unclassifiable cells are excluded from extraction.
template <class Model>
void extract_transitions(TippingDiagram& d, const Model& model, const ShiftSpec& shift_template,
                         bool refine, const IntegratorConfig& cfg, const SimulateOptions& opts) {
    d.transitions.clear();
    for (std::size_t id = 0; id < d.deltas.size(); ++id) {
        int ordinal = 0;
        for (std::size_t ie = 0; ie + 1 < d.epsilons.size(); ++ie) {
            const TipClass a = d.cells[d.index(id, ie)];
            const TipClass b = d.cells[d.index(id, ie + 1)];
            if (a == TipClass::unclassifiable || b == TipClass::unclassifiable || a == b) continue;
            double eps_cross = std::sqrt(d.epsilons[ie] * d.epsilons[ie + 1]);
            if (refine) {
                double lo = d.epsilons[ie], hi = d.epsilons[ie + 1];
                while (hi / lo - 1.0 > 1e-6) {
                    const double mid = std::sqrt(lo * hi);
                    if (classify_shift(model, shift_template, d.deltas[id], mid, cfg, opts) == a)
                        lo = mid;
                    else
                        hi = mid;
                }
                eps_cross = std::sqrt(lo * hi);
            }
            d.transitions.push_back({d.deltas[id], eps_cross, ordinal++});
        }
    }
}

/// Classify every (delta, eps) cell of the grid and extract the per-delta
/// transition lists. Serial reference implementation; the CLI runs the same
/// cells through its checkpointed work queue.
template <class Model>
TippingDiagram tipping_diagram(const Model& model, const ShiftSpec& shift_template,
                               const DiagramGrid& grid,
                               const IntegratorConfig& cfg = grid_integrator_config(),
                               const SimulateOptions& opts = {}, bool refine_transitions = false) {
    TippingDiagram d;
    d.deltas = grid.delta.values();
    d.epsilons = grid.eps.values();
    d.cells.assign(d.cell_count(), TipClass::unclassifiable);
    d.model_name = model.name();
    d.shape = shift_template.shape;
    d.target = shift_template.target;
    d.base = shift_template.base;
    std::tie(d.p1_r, d.p1_m) = model.base_point(shift_template);
    d.delta_rel = opts.delta_rel;
    d.horizon = opts.classify.horizon;
    d.shift_c = shift_template.c;
    d.shift_tau = shift_template.tau;
    for (std::size_t id = 0; id < d.deltas.size(); ++id)
        for (std::size_t ie = 0; ie < d.epsilons.size(); ++ie)
            d.cells[d.index(id, ie)] =
                diagram_cell(model, shift_template, d.deltas[id], d.epsilons[ie], cfg, opts);
    extract_transitions(d, model, shift_template, refine_transitions, cfg, opts);
    return d;
}

// ---------------------------------------------------------------------------
// Return partition
// ---------------------------------------------------------------------------

enum class ReturnRegion : std::uint8_t {
    track,          // neither shift tips
    ret,            // monotone tips, non-monotone tracks: reversal prevents tipping
    no_return,      // both tip
    return_tipping, // monotone tracks, non-monotone tips: reversal induces tipping
    undecided,      // either cell unclassifiable
};

inline const char* return_region_name(ReturnRegion r) {
    switch (r) {
    case ReturnRegion::track: return "track";
    case ReturnRegion::ret: return "return";
    case ReturnRegion::no_return: return "no_return";
    case ReturnRegion::return_tipping: return "return_tipping";
    case ReturnRegion::undecided: return "undecided";
    }
    return "?";
}

struct ReturnPartition {
    std::vector<double> deltas, epsilons;
    std::vector<ReturnRegion> cells;
    std::string model_name;

    std::size_t index(std::size_t id, std::size_t ie) const { return id * epsilons.size() + ie; }
    std::size_t count(ReturnRegion r) const {
        return static_cast<std::size_t>(std::count(cells.begin(), cells.end(), r));
    }
};

/// Four-way combination of a monotone and a non-monotone diagram computed on
/// identical grids from the same base point.
inline ReturnPartition return_partition(const TippingDiagram& mono,
                                        const TippingDiagram& nonmono) {
    if (mono.deltas != nonmono.deltas || mono.epsilons != nonmono.epsilons ||
        mono.base != nonmono.base)
        throw std::invalid_argument("return_partition: diagrams use different grids or base point");
    ReturnPartition part;
    part.deltas = mono.deltas;
    part.epsilons = mono.epsilons;
    part.model_name = mono.model_name;
    part.cells.resize(mono.cells.size());
    for (std::size_t k = 0; k < mono.cells.size(); ++k) {
        const TipClass a = mono.cells[k], b = nonmono.cells[k];
        if (a == TipClass::unclassifiable || b == TipClass::unclassifiable)
            part.cells[k] = ReturnRegion::undecided;
        else if (a == TipClass::tracking && b == TipClass::tracking)
            part.cells[k] = ReturnRegion::track;
        else if (a == TipClass::tipped && b == TipClass::tracking)
            part.cells[k] = ReturnRegion::ret;
        else if (a == TipClass::tipped && b == TipClass::tipped)
            part.cells[k] = ReturnRegion::no_return;
        else
            part.cells[k] = ReturnRegion::return_tipping;
    }
    return part;
}

// ---------------------------------------------------------------------------
// Canard witness
// ---------------------------------------------------------------------------

template <std::size_t N>
struct CanardWitness {
    double eps = 0.0;                     // bracket midpoint after bisection
    Trajectory<N> trajectory;             // shift phase of the midpoint run
    std::vector<double> dist_to_unstable; // distance to the moving unstable state per sample
};

/// Bisect the single tracking/tipping transition inside [eps_lo, eps_hi] to
/// the requested relative width and return the threshold trajectory together
/// with its distance to the moving unstable equilibrium.
template <class Model>
CanardWitness<Model::dim> canard_witness(const Model& model, const ShiftSpec& shift_template,
                                         double delta, double eps_lo, double eps_hi,
                                         double width_rel = 1e-10,
                                         const IntegratorConfig& cfg = bisection_integrator_config(),
                                         const CriticalRateOptions& opts = {}) {
    const auto grid = detail::log_grid(eps_lo, eps_hi, opts.points_per_decade);
    std::vector<TipClass> cls(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        cls[i] = classify_shift(model, shift_template, delta, grid[i], cfg, opts.sim);
    int n_cross = 0;
    std::size_t at = 0;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        if (cls[i] != cls[i + 1]) {
            ++n_cross;
            at = i;
        }
    }
    if (n_cross != 1)
        throw std::invalid_argument("canard_witness: bracket must contain exactly one crossing (found " +
                                    std::to_string(n_cross) + ")");
    double lo = grid[at], hi = grid[at + 1];
    const TipClass side = cls[at];
    while (hi / lo - 1.0 > width_rel) {
        const double mid = std::sqrt(lo * hi);
        if (classify_shift(model, shift_template, delta, mid, cfg, opts.sim) == side)
            lo = mid;
        else
            hi = mid;
    }
    CanardWitness<Model::dim> w;
    w.eps = std::sqrt(lo * hi);
    ShiftSpec shift = shift_template;
    shift.magnitude = delta;
    shift.rate = w.eps;
    SimulateOptions sim = opts.sim;
    sim.keep_trajectory = true;
    const auto run = simulate_shift(model, shift, cfg, sim);
    w.trajectory = *run.trajectory;
    w.dist_to_unstable.reserve(w.trajectory.times.size());
    for (std::size_t i = 0; i < w.trajectory.times.size(); ++i) {
        const double mu = evaluate(shift, w.trajectory.times[i]);
        const auto u = model.unstable_state(mu);
        w.dist_to_unstable.push_back(
            u ? detail::dist2(w.trajectory.states[i], *u)
              : std::numeric_limits<double>::infinity());
    }
    return w;
}

} // namespace ratetip
