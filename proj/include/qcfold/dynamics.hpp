#pragma once

// Iteration and conjugation of catalogue models.
//
// A disjoint-type model expands on its tracts, so the set of points whose
// whole forward orbit stays inside the tracts is a Cantor bouquet, and two
// models with the same tract combinatorics are conjugate on it.  The
// conjugacy is the limit of maps Phi_n built by pulling an orbit tail back
// through the second model along the itinerary of the first: Phi_0 is the
// identity and
//
//     Phi_{n+1}(z) = inverse branch of F~ at tract j_0(z) of Phi_n(F z).
//
// Inverse branches contract, so successive Phi_n differences shrink
// geometrically and the semiconjugacy defect F~(Phi_n(z)) - Phi_n(F z)
// dies with them.  Everything here works on explicit orbit samples:
// forward iteration overflows double precision after two or three honest
// steps, so samples are produced by backward iteration, which keeps every
// point of the chain at moderate coordinates by construction.

#include "qcfold/model.hpp"
#include "qcfold/numeric.hpp"

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace qcfold {

// ---------------------------------------------------------------------------
// Forward iteration.
// ---------------------------------------------------------------------------

struct OrbitResult {
    std::vector<cplx> points;    // z, F z, ..., up to the stopping step
    bool overflowed = false;     // stopped because Re tau exceeded the cap
    std::size_t steps_inside = 0; // iterates produced while inside tracts
};

/// Iterate the model map while the orbit stays inside the tracts and the
/// exponential stays representable.
inline OrbitResult iterate_model(const Model& m, cplx z,
                                 std::size_t max_steps) {
    OrbitResult r;
    r.points.push_back(z);
    for (std::size_t k = 0; k < max_steps; ++k) {
        const auto j = tract_containing(m, z);
        if (!j) return r;
        const cplx w = m.tracts[*j].tau(z);
        if (w.real() > 700.0) {
            r.overflowed = true;
            return r;
        }
        z = std::exp(w);
        r.points.push_back(z);
        ++r.steps_inside;
    }
    return r;
}

/// Escape-time raster over a box: how many iterates stay inside the tracts,
/// capped at max_steps (overflow counts as staying, since the orbit left
/// through the wide end).
inline std::vector<int> julia_grid(const Model& m, double x0, double x1,
                                   double y0, double y1, int nx, int ny,
                                   int max_steps) {
    if (nx < 1 || ny < 1) throw ConfigError("julia_grid: empty raster");
    std::vector<int> counts(static_cast<std::size_t>(nx) * ny, 0);
    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            const cplx z{x0 + (x1 - x0) * (ix + 0.5) / nx,
                         y0 + (y1 - y0) * (iy + 0.5) / ny};
            const OrbitResult r =
                iterate_model(m, z, static_cast<std::size_t>(max_steps));
            counts[static_cast<std::size_t>(iy) * nx + ix] =
                r.overflowed ? max_steps
                             : static_cast<int>(r.steps_inside);
        }
    }
    return counts;
}

// ---------------------------------------------------------------------------
// Orbit samples by backward iteration.
// ---------------------------------------------------------------------------

/// A finite orbit z, F z, ..., F^n z kept explicitly, with the tract of
/// every point.  Built backward, so all points sit at moderate coordinates
/// and the chain is exact by construction: points[k+1] = exp(tau(points[k]))
/// up to rounding.
struct OrbitSample {
    std::vector<cplx> points;
    std::vector<std::size_t> tracts; // tract of points[k], k < points.size()
    std::vector<cplx> coords;        // tau coordinate of points[k], exact
};

struct ConjugacyOptions {
    int depth = 18;          // orbit length n
    int samples = 200;
    std::uint64_t seed = 29;
    double seed_re_lo = 0.7; // tract coordinate band for the deep seed
    double seed_re_hi = 2.5;
    int branch_range = 1;    // inverse branches drawn from [-range, range]
};

/// Draw orbit samples of the model by backward iteration with random
/// branches and tracts.  Requires disjoint type: the pullback must land
/// strictly inside a tract at every level, which the catalogue models only
/// guarantee when the level-1 closures are pairwise disjoint and miss the
/// fundamental disk.
inline std::vector<OrbitSample> build_orbit_samples(
    const Model& m, const ConjugacyOptions& opt = {}) {
    if (!m.disjoint_type)
        throw ConfigError("build_orbit_samples: model is not of disjoint type");
    if (opt.depth < 1 || opt.samples < 1)
        throw ConfigError("build_orbit_samples: empty request");
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> ux(opt.seed_re_lo, opt.seed_re_hi);
    std::uniform_real_distribution<double> uy(-PI, PI);
    std::uniform_int_distribution<int> ub(-opt.branch_range, opt.branch_range);
    std::uniform_int_distribution<std::size_t> ut(0, m.tracts.size() - 1);

    std::vector<OrbitSample> out;
    out.reserve(static_cast<std::size_t>(opt.samples));
    for (int s = 0; s < opt.samples; ++s) {
        const std::size_t n = static_cast<std::size_t>(opt.depth);
        OrbitSample smp;
        smp.points.assign(n + 1, cplx{});
        smp.tracts.assign(n + 1, 0);
        smp.coords.assign(n + 1, cplx{});

        std::size_t j = ut(rng);
        smp.coords[n] = cplx{ux(rng), uy(rng)};
        smp.points[n] = m.tracts[j].tau_inv(smp.coords[n]);
        smp.tracts[n] = j;
        for (std::size_t k = n; k-- > 0;) {
            const cplx next = smp.points[k + 1];
            const double re = std::log(std::abs(next));
            if (!(re > 0.0))
                throw NumericalError(
                    "build_orbit_samples: pullback left the tract");
            j = ut(rng);
            const double im =
                std::arg(next) + TWO_PI * static_cast<double>(ub(rng));
            smp.coords[k] = cplx{re, im};
            smp.points[k] = m.tracts[j].tau_inv(smp.coords[k]);
            smp.tracts[k] = j;
        }
        out.push_back(std::move(smp));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Itinerary transport between models.
// ---------------------------------------------------------------------------

/// Transport the orbit point at position start+n down to position start
/// through the target model: apply n inverse branches of the target map,
/// following the sample's tracts and choosing, at each level, the branch
/// of the logarithm nearest the source's own tau coordinate.  n = 0
/// returns the source point itself (the identity seed of the recursion).
inline cplx transport(const Model& target, const OrbitSample& s,
                      std::size_t start, std::size_t n) {
    if (start + n >= s.points.size())
        throw ConfigError("transport: orbit too short");
    cplx phi = s.points[start + n];
    for (std::size_t k = start + n; k-- > start;) {
        const double re = std::log(std::abs(phi));
        if (!(re > 0.0))
            throw NumericalError("transport: image left the target tract");
        double im = std::arg(phi);
        im += TWO_PI * std::round((s.coords[k].imag() - im) / TWO_PI);
        phi = target.tracts[s.tracts[k]].tau_inv(cplx{re, im});
    }
    return phi;
}

// ---------------------------------------------------------------------------
// Conjugacy audit.
// ---------------------------------------------------------------------------

struct ConjugacyReport {
    std::vector<double> successive; // sup |Phi_{n+1} - Phi_n|, n = 0..depth-1
    double final_successive = 0.0;
    double semiconjugacy = 0.0;     // sup |F~(Phi_{n}(z)) - Phi_{n}(F z)|
    double identity_residual = 0.0; // sup |Phi_depth(z) - z| when target==source
    bool targets_match_tracts = true; // every Phi_n value landed in tract j_0
    int samples = 0;
    int depth = 0;
};

/// Measure the conjugation recursion between two models with the same
/// tract structure.  The report carries the full decay profile of the
/// successive differences; the semiconjugacy defect is evaluated at the
/// deepest level both sides can reach.
inline ConjugacyReport audit_conjugacy(const Model& source,
                                       const Model& target,
                                       const ConjugacyOptions& opt = {}) {
    if (source.tracts.size() != target.tracts.size())
        throw ConfigError("audit_conjugacy: tract counts differ");
    if (!target.disjoint_type)
        throw ConfigError("audit_conjugacy: target is not of disjoint type");
    const auto samples = build_orbit_samples(source, opt);
    const std::size_t depth = static_cast<std::size_t>(opt.depth);

    ConjugacyReport r;
    r.samples = opt.samples;
    r.depth = opt.depth;
    r.successive.assign(depth, 0.0);
    const bool same =
        source.kind == target.kind && source.param == target.param;

    for (const OrbitSample& s : samples) {
        cplx prev = transport(target, s, 0, 0);
        for (std::size_t n = 1; n <= depth; ++n) {
            const cplx cur = transport(target, s, 0, n);
            r.successive[n - 1] =
                std::max(r.successive[n - 1], std::abs(cur - prev));
            prev = cur;
        }
        // prev now holds Phi_depth(z)
        const auto jt = tract_containing(target, prev);
        if (!jt || *jt != s.tracts[0]) r.targets_match_tracts = false;
        if (same)
            r.identity_residual =
                std::max(r.identity_residual, std::abs(prev - s.points[0]));

        // F~(Phi_{depth-1}(z)) against Phi_{depth-1}(F z): both reachable
        // from the same chain, one level apart.
        const cplx left = model_eval(target, transport(target, s, 0, depth - 1));
        const cplx right = transport(target, s, 1, depth - 1);
        r.semiconjugacy =
            std::max(r.semiconjugacy, std::abs(left - right));
    }
    r.final_successive = r.successive.back();
    return r;
}

} // namespace qcfold
