#pragma once

// Model domains.
//
// A model is a finite union of disjoint unbounded simply connected tracts,
// each equipped with a conformal map tau onto the right half-plane, and the
// transcendental-style map F(z) = exp(tau_j(z)) on tract j.  The catalogue
// below covers the configurations used by the test-suites and the CLI:
//
//   half_plane(c)         one tract  {Re z > c},  tau(z) = z - c
//   sector(p)             one tract  {|arg z| < pi/(2p)},  tau(z) = z^p
//   paired_half_planes(c) two tracts {Re z > c} and {Re z < -c}
//
// Level sets are always taken in tau-coordinates: Omega_j(rho) is the
// preimage of {Re w > rho}, and the closed band Omega_j(delta, rho) the
// preimage of {delta <= Re w <= rho}.
//
// The rescaling maps at the end of the file transport constructions done at
// level 1 to an arbitrary level rho in (0, 1]: a piecewise-linear bijection
// L of the positive axis, its horizontal extension sigma, the tract-side
// conjugator psi (identity off the tracts), and the range-side radial map
// phi with exp . psi-action = phi . exp on the tracts.

#include "qcfold/numeric.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace qcfold {

struct Tract {
    std::string label;
    std::function<cplx(cplx)> tau;       // conformal map onto {Re w > 0}
    std::function<cplx(cplx)> tau_inv;   // inverse, right half-plane -> tract
    std::function<bool(cplx)> contains;  // open membership test
};

struct Model {
    std::string name;        // e.g. "half_plane(2)"
    std::string kind;        // catalogue id
    double param = 0.0;
    bool disjoint_type = false;  // closure of the tracts misses the closed unit disk
    std::vector<Tract> tracts;
};

// ---------------------------------------------------------------- catalogue

inline Model half_plane_model(double c) {
    if (!(c > 0.0)) throw ConfigError("half_plane: parameter must be positive");
    Model m;
    m.kind = "half_plane";
    m.param = c;
    m.name = "half_plane(" + std::to_string(c) + ")";
    m.disjoint_type = c > 1.0;
    Tract t;
    t.label = "plus";
    t.tau = [c](cplx z) { return z - c; };
    t.tau_inv = [c](cplx w) { return w + c; };
    t.contains = [c](cplx z) { return z.real() > c; };
    m.tracts.push_back(std::move(t));
    return m;
}

inline Model sector_model(double p) {
    if (!(p >= 1.0)) throw ConfigError("sector: exponent must be >= 1");
    Model m;
    m.kind = "sector";
    m.param = p;
    m.name = "sector(" + std::to_string(p) + ")";
    // The sector has the origin on its boundary, so it is not of disjoint
    // type; it still has 0 outside the level-1 closure, which is all the
    // uniformisation stage needs.
    m.disjoint_type = false;
    Tract t;
    t.label = "sector";
    t.tau = [p](cplx z) { return std::pow(z, p); };
    t.tau_inv = [p](cplx w) { return std::pow(w, 1.0 / p); };
    t.contains = [p](cplx z) {
        if (z == 0.0) return false;
        return std::fabs(std::arg(z)) < 0.5 * PI / p;
    };
    m.tracts.push_back(std::move(t));
    return m;
}

inline Model paired_half_planes_model(double c) {
    if (!(c > 0.0)) throw ConfigError("paired_half_planes: parameter must be positive");
    Model m;
    m.kind = "paired_half_planes";
    m.param = c;
    m.name = "paired_half_planes(" + std::to_string(c) + ")";
    m.disjoint_type = c > 1.0;
    Tract plus;
    plus.label = "plus";
    plus.tau = [c](cplx z) { return z - c; };
    plus.tau_inv = [c](cplx w) { return w + c; };
    plus.contains = [c](cplx z) { return z.real() > c; };
    Tract minus;
    minus.label = "minus";
    minus.tau = [c](cplx z) { return -z - c; };
    minus.tau_inv = [c](cplx w) { return -w - c; };
    minus.contains = [c](cplx z) { return z.real() < -c; };
    m.tracts.push_back(std::move(plus));
    m.tracts.push_back(std::move(minus));
    return m;
}

/// Build a catalogue model from its kind string and parameter.
inline Model make_model(const std::string& kind, double param) {
    if (kind == "half_plane") return half_plane_model(param);
    if (kind == "sector") return sector_model(param);
    if (kind == "paired_half_planes") return paired_half_planes_model(param);
    throw ConfigError("unknown model kind: " + kind);
}

// ---------------------------------------------------------------- queries

inline std::optional<std::size_t> tract_containing(const Model& m, cplx z) {
    for (std::size_t j = 0; j < m.tracts.size(); ++j)
        if (m.tracts[j].contains(z)) return j;
    return std::nullopt;
}

/// F(z) = exp(tau_j(z)) on tract j.  Throws outside the tracts and when the
/// exponent would overflow a double.
inline cplx model_eval(const Model& m, cplx z) {
    const auto j = tract_containing(m, z);
    if (!j) throw NumericalError("model_eval: point outside all tracts");
    const cplx w = m.tracts[*j].tau(z);
    if (w.real() > 700.0) throw NumericalError("model_eval: exponential overflow");
    return std::exp(w);
}

/// Membership in the open level set Omega_j(rho) = tau_j^{-1}{Re > rho}.
inline bool in_tract_level(const Tract& t, cplx z, double rho) {
    return t.contains(z) && t.tau(z).real() > rho;
}

/// Membership in the closed band Omega_j(delta, rho), delta <= Re tau <= rho.
inline bool in_tract_band(const Tract& t, cplx z, double delta, double rho) {
    if (!t.contains(z)) return false;
    const double x = t.tau(z).real();
    return x >= delta && x <= rho;
}

struct BoundaryPoint {
    long k = 0;   // grid index
    cplx z;       // tau^{-1}(1 + 2 pi i k)
};

/// The 2*pi grid on the level-1 curve of tract j, for |k| <= window.
inline std::vector<BoundaryPoint> boundary_partition(const Model& m, std::size_t j, long window) {
    if (j >= m.tracts.size()) throw ConfigError("boundary_partition: bad tract index");
    std::vector<BoundaryPoint> out;
    out.reserve(static_cast<std::size_t>(2 * window + 1));
    for (long k = -window; k <= window; ++k)
        out.push_back({k, m.tracts[j].tau_inv(cplx{1.0, TWO_PI * static_cast<double>(k)})});
    return out;
}

// ---------------------------------------------------------------- rescaling

/// Piecewise-linear bijection of (0, inf) used to move level 1 to level rho:
/// identity on (0, rho/2], maps [rho/2, rho] onto [rho/2, 1] and
/// [rho, 2 rho] onto [1, 2], and translates [2 rho, inf) by 2 - 2 rho.
inline double rescale_L(double x, double rho) {
    if (!(rho > 0.0 && rho <= 1.0)) throw ConfigError("rescale_L: rho must lie in (0, 1]");
    if (x <= 0.5 * rho) return x;
    if (x <= rho) return (2.0 - rho) / rho * (x - 0.5 * rho) + 0.5 * rho;
    if (x <= 2.0 * rho) return x / rho;
    return x + 2.0 - 2.0 * rho;
}

inline double rescale_L_inv(double x, double rho) {
    if (!(rho > 0.0 && rho <= 1.0)) throw ConfigError("rescale_L_inv: rho must lie in (0, 1]");
    if (x <= 0.5 * rho) return x;
    if (x <= 1.0) return rho / (2.0 - rho) * (x - 0.5 * rho) + 0.5 * rho;
    if (x <= 2.0) return x * rho;
    return x - 2.0 + 2.0 * rho;
}

/// Horizontal extension of L to the right half-plane.
inline cplx rescale_sigma(cplx z, double rho) {
    return {rescale_L(z.real(), rho), z.imag()};
}

/// Tract-side conjugator: tau^{-1} . sigma . tau on each tract, identity
/// elsewhere.  Continuous because sigma fixes {Re <= rho/2}.
inline cplx rescale_psi(const Model& m, cplx z, double rho) {
    const auto j = tract_containing(m, z);
    if (!j) return z;
    const Tract& t = m.tracts[*j];
    return t.tau_inv(rescale_sigma(t.tau(z), rho));
}

/// Range-side radial companion with exp(sigma(w)) = phi(exp(w)); identity on
/// the disk of radius e^{rho/2}.
inline cplx rescale_phi(cplx w, double rho) {
    const double r = std::abs(w);
    if (r <= std::exp(0.5 * rho) || r == 0.0) return w;
    const double x = std::log(r);
    return w * std::exp(rescale_L(x, rho) - x);
}

inline cplx rescale_phi_inv(cplx w, double rho) {
    const double r = std::abs(w);
    if (r <= std::exp(0.5 * rho) || r == 0.0) return w;
    const double x = std::log(r);
    return w * std::exp(rescale_L_inv(x, rho) - x);
}

} // namespace qcfold
