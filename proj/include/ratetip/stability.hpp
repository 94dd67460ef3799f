// Eigenvalues and stability classes of 2x2 Jacobians.

#pragma once

#include <array>
#include <cmath>
#include <complex>

namespace ratetip {

using Mat2 = std::array<std::array<double, 2>, 2>;

inline double trace(const Mat2& j) { return j[0][0] + j[1][1]; }
inline double determinant(const Mat2& j) { return j[0][0] * j[1][1] - j[0][1] * j[1][0]; }

struct Eig2 {
    std::complex<double> l1, l2;
};

inline Eig2 eigenvalues(const Mat2& j) {
    const double tr = trace(j);
    const double det = determinant(j);
    const double disc = tr * tr - 4.0 * det;
    if (disc >= 0.0) {
        const double s = std::sqrt(disc);
        return {std::complex<double>(0.5 * (tr - s), 0.0),
                std::complex<double>(0.5 * (tr + s), 0.0)};
    }
    const double im = 0.5 * std::sqrt(-disc);
    return {std::complex<double>(0.5 * tr, -im), std::complex<double>(0.5 * tr, im)};
}

enum class Stability {
    stable_node,
    stable_focus,
    saddle,
    unstable_node,
    unstable_focus,
    marginal, // a real part within tolerance of zero; deliberately not guessed
};

/// Classify from the two eigenvalues. Real parts within `tol` of zero are
/// flagged marginal rather than forced to a side.
inline Stability classify_stability(const Eig2& e, double tol = 1e-9) {
    const double r1 = e.l1.real(), r2 = e.l2.real();
    if (std::abs(r1) <= tol || std::abs(r2) <= tol) return Stability::marginal;
    const bool complex_pair = e.l1.imag() != 0.0;
    if (complex_pair) return r1 < 0.0 ? Stability::stable_focus : Stability::unstable_focus;
    if (r1 < 0.0 && r2 < 0.0) return Stability::stable_node;
    if (r1 > 0.0 && r2 > 0.0) return Stability::unstable_node;
    return Stability::saddle;
}

inline bool is_attracting(Stability s) {
    return s == Stability::stable_node || s == Stability::stable_focus;
}

inline const char* stability_name(Stability s) {
    switch (s) {
    case Stability::stable_node: return "stable_node";
    case Stability::stable_focus: return "stable_focus";
    case Stability::saddle: return "saddle";
    case Stability::unstable_node: return "unstable_node";
    case Stability::unstable_focus: return "unstable_focus";
    case Stability::marginal: return "marginal";
    }
    return "unknown";
}

} // namespace ratetip
