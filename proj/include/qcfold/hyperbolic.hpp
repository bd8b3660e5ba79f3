#pragma once

// Hyperbolic geometry of the unit disk.
//
// Convention: we use the metric |dz| / (1 - |z|^2), i.e. HALF the usual
// curvature -1 metric.  Distances from the origin are atanh(r), Harnack's
// inequality for positive harmonic functions reads u(z) <= e^{2 d(z,w)} u(w),
// and geodesics are the familiar circles orthogonal to the unit circle.
//
// Boundary arcs are stored as angle intervals [lo, hi] with hi > lo and
// hi - lo <= 2*pi; the arc is traversed counterclockwise from lo to hi.

#include "qcfold/numeric.hpp"

#include <algorithm>
#include <cassert>

namespace qcfold {

/// Disk automorphism sending a to 0:  z -> (z - a) / (1 - conj(a) z).
inline cplx mobius_to_zero(cplx z, cplx a) {
    return (z - a) / (1.0 - std::conj(a) * z);
}

/// Inverse of mobius_to_zero: 0 -> a.
inline cplx mobius_from_zero(cplx w, cplx a) {
    return (w + a) / (1.0 + std::conj(a) * w);
}

/// Distance in the |dz|/(1-|z|^2) metric.
inline double hyperbolic_distance(cplx z, cplx w) {
    const double r = std::abs(mobius_to_zero(z, w));
    // Clamp: roundoff can push |r| to 1 for far-apart near-boundary points.
    if (r >= 1.0) return std::numeric_limits<double>::infinity();
    return std::atanh(r);
}

// Counterclockwise boundary arc {e^{it} : lo <= t <= hi}.
struct CircArc {
    double lo = 0.0;
    double hi = 0.0;

    double length() const { return hi - lo; }
    double mid() const { return 0.5 * (lo + hi); }

    /// Membership of an angle, modulo 2*pi.
    bool contains_angle(double t) const {
        const double d = wrap_angle(t - lo);
        return d <= length() + 1e-15;
    }
};

/// "Top" point of the geodesic joining the endpoints of I: the point of the
/// geodesic closest to the origin.  For an arc of angular length 2h centred
/// at angle m this is e^{im} * tan(pi/4 - h/2); arcs longer than a
/// half-circle give a negative radius, i.e. the top sits on the far side of
/// the origin, which is exactly right.
inline cplx geodesic_top_point(const CircArc& I) {
    const double h = 0.5 * I.length();
    return unit(I.mid()) * std::tan(0.25 * PI - 0.5 * h);
}

/// Distance from z to the full geodesic with ideal endpoints e^{i lo}, e^{i hi}.
inline double distance_to_geodesic(cplx z, const CircArc& J) {
    const cplx a = geodesic_top_point(J);
    // Normalise: send the geodesic to a diameter, then rotate its endpoints
    // to +-1 so it becomes the real diameter.
    const cplx p = mobius_to_zero(unit(J.lo), a); // unimodular up to roundoff
    const cplx u = mobius_to_zero(z, a) * std::conj(p) / std::abs(p);
    // Cayley map taking the real diameter to the positive imaginary axis.
    const cplx c = cplx{0.0, 1.0} * (1.0 + u) / (1.0 - u);
    if (!(c.imag() > 0.0)) return std::numeric_limits<double>::infinity();
    // In the curvature -1 metric sinh(dist) = |Re| / Im; halve for ours.
    return 0.5 * std::asinh(std::fabs(c.real()) / c.imag());
}

// Closest-point data between two geodesics: the point on the first geodesic
// minimising the distance to the second, plus that distance.
struct ClosestPoint {
    cplx point;
    double distance = 0.0;
};

/// Point a_I^J on the geodesic of I closest to the geodesic of J.
/// Distance-to-geodesic is convex along a geodesic, so a golden-section
/// search in the arclength parameter is reliable; arcs sharing an endpoint
/// have their minimum at infinity and are clamped to the search window.
inline ClosestPoint closest_point_to_arc(const CircArc& I, const CircArc& J) {
    const cplx aI = geodesic_top_point(I);
    const cplx pI = mobius_to_zero(unit(I.lo), aI);
    const cplx dir = pI / std::abs(pI);

    const auto at = [&](double s) { return mobius_from_zero(std::tanh(s) * dir, aI); };
    const auto f = [&](double s) { return distance_to_geodesic(at(s), J); };

    double lo = -20.0, hi = 20.0;                 // +-20 units covers all uses
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < 160; ++it) {
        if (f1 < f2) {
            hi = x2; x2 = x1; f2 = f1;
            x1 = hi - gr * (hi - lo); f1 = f(x1);
        } else {
            lo = x1; x1 = x2; f1 = f2;
            x2 = lo + gr * (hi - lo); f2 = f(x2);
        }
    }
    const double s = 0.5 * (lo + hi);
    return {at(s), f(s)};
}

/// Poisson kernel of the disk at a, evaluated at boundary angle theta.
inline double poisson_kernel(cplx a, double theta) {
    const double num = 1.0 - std::norm(a);
    const double den = std::norm(unit(theta) - a);
    return num / den;
}

/// Harmonic measure of the arc I seen from a: the normalised angular length
/// of the image of I under the automorphism sending a to 0.
inline double harmonic_measure_arc(cplx a, const CircArc& I) {
    if (I.length() >= TWO_PI) return 1.0;
    const cplx w1 = mobius_to_zero(unit(I.lo), a);
    const cplx w2 = mobius_to_zero(unit(I.hi), a);
    return wrap_angle(std::arg(w2) - std::arg(w1)) / TWO_PI;
}

} // namespace qcfold
