// Time profiles of the shifted input parameter: the monotone tanh shift, the
// non-monotone sech pulse, the sech-flank monotone shift that reaches its
// maximum in finite time, and the plateaued sech shift with an asymmetric
// return (rate ratio c, waiting time tau).
//
// All shapes are parameterised by the base value mu_-, the magnitude
// Delta >= 0 and the rate eps > 0. The maximal slope of the tanh and sech
// shapes is eps*Delta/2.

#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace ratetip {

enum class ShiftShape {
    tanh_mono,    // mu_- + (Delta/2)(tanh(eps t) + 1)
    sech_pulse,   // mu_- + Delta sech(eps t)
    sech_mono,    // rising sech flank, held at mu_- + Delta for t > 0
    sech_plateau, // sech flank up, plateau of length tau, sech flank down at rate c*eps
};

enum class ShiftTarget { r, m, mu };

inline const char* shift_shape_name(ShiftShape s) {
    switch (s) {
    case ShiftShape::tanh_mono: return "tanh_mono";
    case ShiftShape::sech_pulse: return "sech_pulse";
    case ShiftShape::sech_mono: return "sech_mono";
    case ShiftShape::sech_plateau: return "sech_plateau";
    }
    return "?";
}

inline ShiftShape shift_shape_from_name(const std::string& s) {
    if (s == "tanh_mono") return ShiftShape::tanh_mono;
    if (s == "sech_pulse") return ShiftShape::sech_pulse;
    if (s == "sech_mono") return ShiftShape::sech_mono;
    if (s == "sech_plateau") return ShiftShape::sech_plateau;
    throw std::invalid_argument("unknown shift shape '" + s + "'");
}

inline const char* shift_target_name(ShiftTarget t) {
    switch (t) {
    case ShiftTarget::r: return "r";
    case ShiftTarget::m: return "m";
    case ShiftTarget::mu: return "mu";
    }
    return "?";
}

inline ShiftTarget shift_target_from_name(const std::string& s) {
    if (s == "r") return ShiftTarget::r;
    if (s == "m") return ShiftTarget::m;
    if (s == "mu") return ShiftTarget::mu;
    throw std::invalid_argument("unknown shift target '" + s + "'");
}

inline double sech(double x) { return 1.0 / std::cosh(x); }

/// Inverse of sech on (0, 1]: asech(x) = ln((1 + sqrt(1-x^2))/x) >= 0.
inline double asech(double x) {
    if (!(x > 0.0 && x <= 1.0)) throw std::invalid_argument("asech: argument must be in (0, 1]");
    return std::log((1.0 + std::sqrt((1.0 - x) * (1.0 + x))) / x);
}

struct ShiftSpec {
    ShiftShape shape = ShiftShape::tanh_mono;
    double base = 0.0;      // mu_-
    double magnitude = 0.0; // Delta >= 0
    double rate = 1.0;      // eps > 0, 1/d
    double c = 1.0;         // return-rate ratio (sech_plateau)
    double tau = 0.0;       // plateau duration (sech_plateau), d
    ShiftTarget target = ShiftTarget::r;

    void validate() const {
        if (!(magnitude >= 0.0)) throw std::invalid_argument("ShiftSpec: magnitude must be >= 0");
        if (!(rate > 0.0)) throw std::invalid_argument("ShiftSpec: rate must be > 0");
        if (shape == ShiftShape::sech_plateau) {
            if (!(c > 0.0)) throw std::invalid_argument("ShiftSpec: c must be > 0");
            if (!(tau >= 0.0)) throw std::invalid_argument("ShiftSpec: tau must be >= 0");
        }
    }
};

/// mu(t).
inline double evaluate(const ShiftSpec& s, double t) {
    switch (s.shape) {
    case ShiftShape::tanh_mono:
        return s.base + 0.5 * s.magnitude * (std::tanh(s.rate * t) + 1.0);
    case ShiftShape::sech_pulse:
        return s.base + s.magnitude * sech(s.rate * t);
    case ShiftShape::sech_mono:
        return t <= 0.0 ? s.base + s.magnitude * sech(s.rate * t) : s.base + s.magnitude;
    case ShiftShape::sech_plateau:
        if (t <= 0.0) return s.base + s.magnitude * sech(s.rate * t);
        if (t < s.tau) return s.base + s.magnitude;
        return s.base + s.magnitude * sech(s.c * s.rate * (t - s.tau));
    }
    return s.base;
}

/// dmu/dt.
inline double derivative(const ShiftSpec& s, double t) {
    const double e = s.rate;
    switch (s.shape) {
    case ShiftShape::tanh_mono: {
        const double c0 = std::cosh(e * t);
        return 0.5 * s.magnitude * e / (c0 * c0);
    }
    case ShiftShape::sech_pulse:
        return -s.magnitude * e * sech(e * t) * std::tanh(e * t);
    case ShiftShape::sech_mono:
        return t <= 0.0 ? -s.magnitude * e * sech(e * t) * std::tanh(e * t) : 0.0;
    case ShiftShape::sech_plateau:
        if (t <= 0.0) return -s.magnitude * e * sech(e * t) * std::tanh(e * t);
        if (t < s.tau) return 0.0;
        return -s.magnitude * s.c * e * sech(s.c * e * (t - s.tau)) *
               std::tanh(s.c * e * (t - s.tau));
    }
    return 0.0;
}

/// Peak slope of the profile, eps*Delta/2 for the tanh and sech shapes.
inline double max_rate_of_change(const ShiftSpec& s) { return 0.5 * s.rate * s.magnitude; }

/// The (negative) time at which the shift is delta_rel-close to its base:
/// mu(t0) = mu_- + delta_rel * Delta.
inline double start_time(const ShiftSpec& s, double delta_rel = 1e-3) {
    if (!(delta_rel > 0.0 && delta_rel < 1.0))
        throw std::invalid_argument("start_time: delta_rel must be in (0, 1)");
    switch (s.shape) {
    case ShiftShape::tanh_mono:
        return std::atanh(2.0 * delta_rel - 1.0) / s.rate;
    case ShiftShape::sech_pulse:
    case ShiftShape::sech_mono:
    case ShiftShape::sech_plateau:
        return -asech(delta_rel) / s.rate;
    }
    return 0.0;
}

/// Time by which the profile has settled to within a negligible distance of
/// its final value: the mirror of the start time plus a 20/eps margin, with
/// the plateau and the return rate accounted for.
inline double settle_time(const ShiftSpec& s, double delta_rel = 1e-3) {
    switch (s.shape) {
    case ShiftShape::tanh_mono:
        return -start_time(s, delta_rel) + 20.0 / s.rate;
    case ShiftShape::sech_pulse:
        return -start_time(s, delta_rel) + 20.0 / s.rate;
    case ShiftShape::sech_mono:
        return 20.0 / s.rate;
    case ShiftShape::sech_plateau:
        return s.tau + (asech(delta_rel) + 20.0) / (s.c * s.rate);
    }
    return 0.0;
}

/// Time spent past the level mu_b by the plateaued shift (and its c=1, tau=0
/// pulse special case): t_e = ((c+1)/(c eps)) asech((mu_b - mu_-)/Delta) + tau.
inline double exceedance_time(const ShiftSpec& s, double mu_b) {
    if (s.shape != ShiftShape::sech_pulse && s.shape != ShiftShape::sech_plateau)
        throw std::invalid_argument("exceedance_time: defined for sech pulse/plateau shifts");
    const double x = (mu_b - s.base) / s.magnitude;
    if (!(x > 0.0 && x < 1.0))
        throw std::invalid_argument("exceedance_time: shift never crosses mu_b (no exceedance)");
    const double c = s.shape == ShiftShape::sech_pulse ? 1.0 : s.c;
    const double tau = s.shape == ShiftShape::sech_pulse ? 0.0 : s.tau;
    return (c + 1.0) / (c * s.rate) * asech(x) + tau;
}

} // namespace ratetip
