// Tilted canonical systems for the two generic dangerous bifurcations of
// equilibria: the subcritical Hopf normal form with a tilted equilibrium
// branch e(mu, s) = (mu s, 0), and the tilted saddle-node normal form with
// branches e^(+/-) = mu s +/- sqrt(-mu). Both bifurcate at mu_b = 0.
//
// The tilt s moves the equilibrium under parameter drift, which is what makes
// basin instability (and hence R-tipping) possible; s = 0 recovers the plain
// normal forms. Analytic basin-instability boundaries mu* and the
// inverse-square-law curve for the saddle-node case are included.

#pragma once

#include <cmath>
#include <stdexcept>

#include "ratetip/ode.hpp"

namespace ratetip {

struct HopfNfParams {
    double mu = -1.0;
    double omega = 1.0; // angular frequency of small oscillations
    double alpha = 1.0; // shear / amplitude-phase coupling
    double s = 0.0;     // tilt
};

/// Real-coordinate field of the tilted subcritical Hopf normal form: with
/// w = z - mu s, dz/dt = (mu + i(omega + alpha |w|^2)) w + |w|^2 w.
inline Vec<2> hopf_nf_field(const Vec<2>& z, const HopfNfParams& p) {
    const double u = z[0] - p.mu * p.s;
    const double v = z[1];
    const double rho2 = u * u + v * v;
    const double om = p.omega + p.alpha * rho2;
    return {(p.mu + rho2) * u - om * v, om * u + (p.mu + rho2) * v};
}

inline Vec<2> hopf_nf_equilibrium(double mu, const HopfNfParams& p) {
    return {mu * p.s, 0.0};
}

/// Radius of the unstable limit cycle around the equilibrium (mu < 0).
inline double hopf_nf_cycle_radius(double mu) {
    if (!(mu < 0.0)) throw std::invalid_argument("hopf_nf_cycle_radius: requires mu < 0");
    return std::sqrt(-mu);
}

/// Basin-instability boundaries of the tilted Hopf branch: the two mu* with
/// Re e(mu_-) on the cycle extremes l_x^-/+ (mu*). Returns (mu*^-, mu*^+),
/// with mu*^- < mu_- < mu*^+. Even in s.
inline std::pair<double, double> hopf_bi_boundaries(double mu_minus, double s) {
    if (s == 0.0) throw std::invalid_argument("hopf_bi_boundaries: no basin instability for s = 0");
    const double disc = 1.0 - 4.0 * s * s * mu_minus;
    if (disc < 0.0)
        throw std::invalid_argument("hopf_bi_boundaries: requires 1 - 4 s^2 mu_- >= 0");
    const double s2 = s * s;
    const double lo = mu_minus - (1.0 + std::sqrt(disc)) / (2.0 * s2);
    const double hi = mu_minus - (1.0 - std::sqrt(disc)) / (2.0 * s2);
    return {lo, hi};
}

struct SaddleNodeNfParams {
    double mu = -1.0;
    double s = 0.0; // tilt
};

/// dx/dt = -(x - mu s)^2 - mu.
inline double sn_nf_field(double x, const SaddleNodeNfParams& p) {
    const double w = x - p.mu * p.s;
    return -w * w - p.mu;
}

/// Stable branch e^+ (mu <= 0).
inline double sn_nf_stable(double mu, double s) {
    if (!(mu <= 0.0)) throw std::invalid_argument("sn_nf_stable: requires mu <= 0");
    return mu * s + std::sqrt(-mu);
}

/// Unstable branch e^- (mu <= 0); its graph is the basin boundary of e^+.
inline double sn_nf_unstable(double mu, double s) {
    if (!(mu <= 0.0)) throw std::invalid_argument("sn_nf_unstable: requires mu <= 0");
    return mu * s - std::sqrt(-mu);
}

/// Basin-instability boundary of the tilted saddle-node branch:
/// mu* = -(sqrt(-mu_-) - 1/s)^2, defined for s < 0 or s > 1/sqrt(-mu_-).
inline double sn_bi_boundary(double mu_minus, double s) {
    if (!(mu_minus < 0.0)) throw std::invalid_argument("sn_bi_boundary: requires mu_- < 0");
    const double root = std::sqrt(-mu_minus);
    if (!(s < 0.0 || s > 1.0 / root))
        throw std::invalid_argument("sn_bi_boundary: no basin instability for this tilt");
    const double d = root - 1.0 / s;
    return -d * d;
}

/// Inverse-square-law transition curve for a c=1, tau=0 pulse across the
/// saddle-node at mu_b = 0 (small s*eps): the rate at which the time spent
/// past the bifurcation equals the critical exceedance time, with the
/// system-dependent factor d^b = 4 for this normal form.
inline double ritchie_curve(double delta_mu, double mu_minus) {
    if (!(delta_mu > -mu_minus))
        throw std::invalid_argument("ritchie_curve: shift must cross mu_b = 0");
    const double x = -mu_minus / delta_mu;
    return std::sqrt(delta_mu + mu_minus) * std::log((1.0 + std::sqrt(1.0 - x * x)) / x);
}

} // namespace ratetip
