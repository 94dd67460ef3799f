// Adaptive explicit Runge-Kutta integration for small smooth ODE systems.
//
// The stepper is the classic Dormand-Prince 5(4) embedded pair with the
// standard quartic dense-output interpolant (Hairer, Norsett & Wanner,
// "Solving Ordinary Differential Equations I", Sec. II.5). FSAL is used, so
// an accepted step costs six fresh derivative evaluations.

#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace ratetip {

template <std::size_t N>
using Vec = std::array<double, N>;

namespace detail {

template <std::size_t N>
inline bool all_finite(const Vec<N>& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

template <std::size_t N>
inline double norm2(const Vec<N>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

template <std::size_t N>
inline double dist2(const Vec<N>& a, const Vec<N>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < N; ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

} // namespace detail

/// Local error control and step policy for the embedded pair.
struct IntegratorConfig {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    double h_init = 1e-2;
    double h_max = std::numeric_limits<double>::infinity();
    long max_steps = 20'000'000;
    /// Clamp a state component in (-nonneg_tol, 0) back to 0 after a step;
    /// fail if it falls below -nonneg_tol. For fields where the coordinate
    /// axes are invariant (biomass models) the undershoot is integrator noise.
    /// nonneg_tol = 0 selects the automatic value 100 * abs_tol (floor 1e-9),
    /// keeping the guard above the local-error scale of an accepted step.
    bool clamp_nonneg = false;
    double nonneg_tol = 0.0;

    double effective_nonneg_tol() const {
        return nonneg_tol > 0.0 ? nonneg_tol : std::max(100.0 * abs_tol, 1e-9);
    }

    void validate() const {
        if (!(abs_tol > 0.0)) throw std::invalid_argument("IntegratorConfig: abs_tol must be > 0");
        if (!(rel_tol > 0.0)) throw std::invalid_argument("IntegratorConfig: rel_tol must be > 0");
        if (!(h_init > 0.0) || h_init > h_max)
            throw std::invalid_argument("IntegratorConfig: require 0 < h_init <= h_max");
        if (max_steps < 1) throw std::invalid_argument("IntegratorConfig: max_steps must be >= 1");
    }
};

/// Tight control for critical-rate bisections (the defaults).
inline IntegratorConfig bisection_integrator_config() { return {}; }

/// Looser control for large grid sweeps.
inline IntegratorConfig grid_integrator_config() {
    IntegratorConfig cfg;
    cfg.abs_tol = 1e-8;
    cfg.rel_tol = 1e-8;
    return cfg;
}

enum class StopReason {
    reached_end,
    event_fired,
    step_budget,
};

/// Thrown when a step produces a non-finite state or violates the
/// non-negativity guard. Carries the last valid time.
class IntegrationError : public std::runtime_error {
public:
    IntegrationError(const std::string& what, double last_valid_time)
        : std::runtime_error(what + " (last valid t = " + std::to_string(last_valid_time) + ")"),
          last_valid_time_(last_valid_time) {}
    double last_valid_time() const { return last_valid_time_; }

private:
    double last_valid_time_;
};

template <std::size_t N>
struct Trajectory {
    std::vector<double> times;
    std::vector<Vec<N>> states;
    StopReason flag = StopReason::reached_end;

    double final_time() const { return times.back(); }
    const Vec<N>& final_state() const { return states.back(); }
};

/// One-step Dormand-Prince 5(4) driver with dense output over the last
/// accepted step. Field signature: void(double t, const Vec<N>& y, Vec<N>& dydt).
template <std::size_t N, class Field>
class Dopri5 {
public:
    Dopri5(Field field, const Vec<N>& y0, double t0, double t_end, const IntegratorConfig& cfg)
        : f_(field), cfg_(cfg), t_(t0), t_end_(t_end), y_(y0) {
        cfg_.validate();
        if (!(t_end > t0)) throw std::invalid_argument("Dopri5: require t_end > t0");
        if (!detail::all_finite(y_)) throw std::invalid_argument("Dopri5: non-finite initial state");
        f_(t_, y_, k_[0]);
        h_ = std::min({cfg_.h_init, cfg_.h_max, t_end_ - t_});
    }

    double t() const { return t_; }
    const Vec<N>& y() const { return y_; }
    double t_prev() const { return t_prev_; }
    const Vec<N>& y_prev() const { return y_prev_; }
    const Vec<N>& dydt() const { return k_[0]; }
    double last_step() const { return h_last_; }
    bool done() const { return t_ >= t_end_; }
    bool budget_exhausted() const { return budget_exhausted_; }

    /// Advance by one accepted step. Returns false once t_end is reached or
    /// the step budget is spent. Throws IntegrationError on non-finite states.
    bool step() {
        if (done() || budget_exhausted_) return false;
        double h = std::min(h_, t_end_ - t_);
        bool rejected = false;
        for (;;) {
            if (n_attempts_++ >= cfg_.max_steps) {
                budget_exhausted_ = true;
                return false;
            }
            const double err = attempt(h);
            if (err <= 1.0) {
                accept(h, err, rejected);
                return true;
            }
            rejected = true;
            h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
            if (!(h > 0.0) || t_ + h == t_)
                throw IntegrationError("Dopri5: step size underflow", t_);
        }
    }

    /// Dense evaluation on the last accepted step [t_prev, t].
    Vec<N> dense(double ti) const {
        const double theta = (ti - t_prev_) / h_last_;
        const double theta1 = 1.0 - theta;
        Vec<N> out;
        for (std::size_t i = 0; i < N; ++i)
            out[i] = rc1_[i] +
                     theta * (rc2_[i] + theta1 * (rc3_[i] + theta * (rc4_[i] + theta1 * rc5_[i])));
        return out;
    }

private:
    // Butcher tableau, Dormand & Prince (1980).
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
    // Dense-output coefficients.
    static constexpr double d1 = -12715105075.0 / 11282082432.0;
    static constexpr double d3 = 87487479700.0 / 32700410799.0;
    static constexpr double d4 = -10690763975.0 / 1880347072.0;
    static constexpr double d5 = 701980252875.0 / 199316789632.0;
    static constexpr double d6 = -1453857185.0 / 822651844.0;
    static constexpr double d7 = 69997945.0 / 29380423.0;

    /// Run the six stages for trial step h; fills ynew_ and k_[1..6].
    /// Returns the scaled error norm.
    double attempt(double h) {
        Vec<N> w;
        for (std::size_t i = 0; i < N; ++i) w[i] = y_[i] + h * a21 * k_[0][i];
        f_(t_ + c2 * h, w, k_[1]);
        for (std::size_t i = 0; i < N; ++i)
            w[i] = y_[i] + h * (a31 * k_[0][i] + a32 * k_[1][i]);
        f_(t_ + c3 * h, w, k_[2]);
        for (std::size_t i = 0; i < N; ++i)
            w[i] = y_[i] + h * (a41 * k_[0][i] + a42 * k_[1][i] + a43 * k_[2][i]);
        f_(t_ + c4 * h, w, k_[3]);
        for (std::size_t i = 0; i < N; ++i)
            w[i] = y_[i] + h * (a51 * k_[0][i] + a52 * k_[1][i] + a53 * k_[2][i] + a54 * k_[3][i]);
        f_(t_ + c5 * h, w, k_[4]);
        for (std::size_t i = 0; i < N; ++i)
            w[i] = y_[i] + h * (a61 * k_[0][i] + a62 * k_[1][i] + a63 * k_[2][i] + a64 * k_[3][i] +
                                a65 * k_[4][i]);
        f_(t_ + h, w, k_[5]);
        for (std::size_t i = 0; i < N; ++i)
            ynew_[i] = y_[i] + h * (b1 * k_[0][i] + b3 * k_[2][i] + b4 * k_[3][i] + b5 * k_[4][i] +
                                    b6 * k_[5][i]);
        f_(t_ + h, ynew_, k_[6]);

        double err = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double ei = h * (e1 * k_[0][i] + e3 * k_[2][i] + e4 * k_[3][i] + e5 * k_[4][i] +
                                   e6 * k_[5][i] + e7 * k_[6][i]);
            const double sc =
                cfg_.abs_tol + cfg_.rel_tol * std::max(std::abs(y_[i]), std::abs(ynew_[i]));
            err += (ei / sc) * (ei / sc);
        }
        err = std::sqrt(err / static_cast<double>(N));
        return std::isfinite(err) ? err : std::numeric_limits<double>::infinity();
    }

    void accept(double h, double err, bool rejected) {
        for (std::size_t i = 0; i < N; ++i) {
            const double ydiff = ynew_[i] - y_[i];
            const double bspl = h * k_[0][i] - ydiff;
            rc1_[i] = y_[i];
            rc2_[i] = ydiff;
            rc3_[i] = bspl;
            rc4_[i] = ydiff - h * k_[6][i] - bspl;
            rc5_[i] = h * (d1 * k_[0][i] + d3 * k_[2][i] + d4 * k_[3][i] + d5 * k_[4][i] +
                           d6 * k_[5][i] + d7 * k_[6][i]);
        }
        t_prev_ = t_;
        y_prev_ = y_;
        h_last_ = h;
        t_ += h;
        y_ = ynew_;
        if (!detail::all_finite(y_)) throw IntegrationError("Dopri5: non-finite state", t_prev_);
        bool reeval = false;
        if (cfg_.clamp_nonneg) {
            const double guard = cfg_.effective_nonneg_tol();
            for (std::size_t i = 0; i < N; ++i) {
                if (y_[i] < 0.0) {
                    if (y_[i] <= -guard)
                        throw IntegrationError(
                            "Dopri5: state fell below the non-negativity guard", t_prev_);
                    y_[i] = 0.0;
                    reeval = true;
                }
            }
        }
        if (reeval)
            f_(t_, y_, k_[0]);
        else
            k_[0] = k_[6]; // FSAL

        const double facmax = rejected ? 1.0 : 10.0;
        const double fac = err > 0.0 ? 0.9 * std::pow(err, -0.2) : facmax;
        h_ = std::min(h * std::min(facmax, std::max(0.2, fac)), cfg_.h_max);
    }

    Field f_;
    IntegratorConfig cfg_;
    double t_;
    double t_end_;
    Vec<N> y_;
    Vec<N> ynew_{};
    std::array<Vec<N>, 7> k_{};
    double h_ = 0.0;
    double h_last_ = 0.0;
    double t_prev_ = 0.0;
    Vec<N> y_prev_{};
    Vec<N> rc1_{}, rc2_{}, rc3_{}, rc4_{}, rc5_{};
    long n_attempts_ = 0;
    bool budget_exhausted_ = false;
};

/// Integrate field from (t0, y0) to t1, recording every accepted step.
template <std::size_t N, class Field>
Trajectory<N> integrate(Field&& field, const Vec<N>& y0, double t0, double t1,
                        const IntegratorConfig& cfg = {}) {
    Dopri5<N, Field> st(std::forward<Field>(field), y0, t0, t1, cfg);
    Trajectory<N> traj;
    traj.times.push_back(t0);
    traj.states.push_back(y0);
    while (st.step()) {
        traj.times.push_back(st.t());
        traj.states.push_back(st.y());
    }
    traj.flag = st.budget_exhausted() ? StopReason::step_budget : StopReason::reached_end;
    return traj;
}

/// Drive the stepper and hand each accepted step to an observer; the observer
/// returns false to stop early. Returns the stop reason.
template <std::size_t N, class Field, class Observer>
StopReason integrate_observe(Field&& field, const Vec<N>& y0, double t0, double t1,
                             const IntegratorConfig& cfg, Observer&& obs) {
    Dopri5<N, Field> st(std::forward<Field>(field), y0, t0, t1, cfg);
    if (!obs(st.t(), st.y())) return StopReason::event_fired;
    while (st.step()) {
        if (!obs(st.t(), st.y())) return StopReason::event_fired;
    }
    return st.budget_exhausted() ? StopReason::step_budget : StopReason::reached_end;
}

template <std::size_t N>
struct EventResult {
    double t = 0.0;
    Vec<N> y{};
    bool fired = false;
    StopReason flag = StopReason::reached_end;
};

/// Integrate until the predicate first holds, bisecting the firing time on the
/// dense interpolant to a resolution of 1e-3 of the bracketing step size.
/// Predicate signature: bool(const Vec<N>& y, double t).
template <std::size_t N, class Field, class Pred>
EventResult<N> integrate_until(Field&& field, const Vec<N>& y0, double t0, Pred&& pred,
                               double t_max, const IntegratorConfig& cfg = {}) {
    EventResult<N> res;
    if (pred(y0, t0)) {
        res.t = t0;
        res.y = y0;
        res.fired = true;
        res.flag = StopReason::event_fired;
        return res;
    }
    Dopri5<N, Field> st(std::forward<Field>(field), y0, t0, t_max, cfg);
    while (st.step()) {
        if (pred(st.y(), st.t())) {
            double lo = st.t_prev(), hi = st.t();
            const double resolution =
                std::max(1e-12 * st.last_step(), 4e-15 * std::max(1.0, std::abs(st.t())));
            while (hi - lo > resolution) {
                const double mid = 0.5 * (lo + hi);
                if (pred(st.dense(mid), mid))
                    hi = mid;
                else
                    lo = mid;
            }
            res.t = hi;
            res.y = st.dense(hi);
            res.fired = true;
            res.flag = StopReason::event_fired;
            return res;
        }
    }
    res.t = st.t();
    res.y = st.y();
    res.fired = false;
    res.flag = st.budget_exhausted() ? StopReason::step_budget : StopReason::reached_end;
    return res;
}

} // namespace ratetip
