#pragma once

// Conformal uniformisation of the off-tract region W (the complement of the
// closed level-1 tracts) onto the unit disk, normalised so 0 maps to 0 with
// positive derivative.
//
// Method: geodesic zipper on boundary samples.  W is unbounded, so we first
// apply the inversion iota(z) = 1/(z - z0) with z0 a deep interior point of
// the first tract; iota(W) is then a bounded Jordan-ish domain whose
// boundary we sample tract by tract, ordered by the tau ordinate so that W
// stays on the left.  The zipper composes one sqrt-slit step per sample:
//
//   initial  f(w)  = i sqrt((w - p1)/(w - p0))            (half-plane)
//   step     g(w)  = sqrt(mu(w)^2 + h^2),  mu(w) = w / (1 - w/(2c))
//   closing  w -> +-w^2, then a Cayley map to the disk and a rotation.
//
// Each step is elementary, so the inverse map is evaluated in closed form by
// unwinding the chain; no iterative solver is involved.  Branches are fixed
// by the upper-half-plane location of interior points.
//
// The committed boundary parametrisation evaluates the map slightly inside W
// (at tau-abscissa 1 - nudge), which avoids tracking signs of flattened
// boundary points through the chain.

#include "qcfold/hyperbolic.hpp"
#include "qcfold/model.hpp"
#include "qcfold/numeric.hpp"

#include <algorithm>
#include <cstdint>
#include <vector>

namespace qcfold {

struct ZipperStep {
    cplx a;                  // sample image the step flattens
    double h = 0.0;          // tip height |a|^2 / Im a
    double c = 0.0;          // Moebius parameter |a|^2 / (2 Re a)
    double scale = 1.0;      // post-step renormalisation divisor
    bool use_mobius = true;  // false when Re a == 0 and mu is the identity
};

struct RiemannOptions {
    int resolution = 1024;   // boundary samples per tract after resampling
    long window = 16;        // 2*pi-grid window the parametrisation must cover
    int oversample = 8;      // dense pre-sampling factor
    double y_max = 0.0;      // tau-ordinate reach; 0 selects an automatic value
};

struct RiemannMap {
    // Chain data.
    cplx z0;                     // inversion centre tau_0^{-1}(2)
    cplx p0, p1;                 // first two samples in the inverted plane
    std::vector<ZipperStep> steps;
    double closing_a = 0.0;      // image of p0 after the chain (the Moebius
    bool closing_finite = false; //   sub-steps move infinity back in range)
    bool close_left = false;     // which quarter-plane the closing map sees
    cplx q;                      // pre-Cayley image of the normalisation point
    cplx rot{1.0, 0.0};          // final unimodular factor, makes Psi'(0) > 0

    // Provenance and sampling record.  The sample sequence is cyclically
    // rotated to open at the point farthest from iota(infinity), so the
    // thin necks near 0 are flattened mid-chain (see build notes below).
    std::vector<cplx> samples;              // z-plane boundary samples
    std::vector<double> sample_y;           // tau ordinate of each sample
    std::vector<std::uint32_t> sample_tract; // owning tract of each sample
    RiemannOptions options;
    std::uint64_t model_hash = 0;

    // Boundary correspondence: per tract, the sample ordinates (increasing)
    // and the disk angle of each sample's image, unwrapped monotonically.
    // These are exact chain images of the samples, tracked through the steps
    // on the real axis -- evaluating the forward map at near-boundary points
    // is unreliable (a point a hair inside can land across a slit), so all
    // boundary queries interpolate these tables instead.
    std::vector<std::vector<double>> table_y;
    std::vector<std::vector<double>> table_angle;

    // -- evaluation --------------------------------------------------------

    /// Map a point of the inverted plane through the zipper chain into the
    /// closed upper half-plane (pre-closing coordinates).
    cplx chain_forward(cplx w) const {
        cplx f = cplx{0, 1} * std::sqrt((w - p1) / (w - p0));
        for (const ZipperStep& s : steps) {
            if (s.use_mobius) f = f / (1.0 - f / (2.0 * s.c));
            cplx g = std::sqrt(f * f + s.h * s.h);
            if (g.imag() < 0.0) g = -g;
            // The half-plane construction is invariant under positive real
            // scalings, so each step renormalises to keep magnitudes tame.
            f = g / s.scale;
        }
        // Send the base sample's image back to infinity, so the remaining
        // unflattened cap approximates the vertical ray from the tip.
        if (closing_finite) f = f / (1.0 - f / closing_a);
        return f;
    }

    /// Psi(z) for z in W (or its closure approached from inside).
    cplx eval(cplx z) const {
        const cplx w = 1.0 / (z - z0);
        cplx f = chain_forward(w);
        f = close_left ? -(f * f) : f * f;
        return rot * (f - q) / (f - std::conj(q));
    }

    /// Closed-form inverse: disk -> W.
    cplx eval_inverse(cplx d) const {
        const cplx u = d / rot;
        cplx f = (q - std::conj(q) * u) / (1.0 - u);
        f = close_left ? cplx{0, 1} * std::sqrt(f) : std::sqrt(f);
        if (closing_finite) f = f / (1.0 + f / closing_a);
        for (auto it = steps.rbegin(); it != steps.rend(); ++it) {
            const cplx g = f * it->scale;
            cplx v = std::sqrt(g * g - it->h * it->h);
            if (v.imag() < 0.0) v = -v;
            if (it->use_mobius) v = v / (1.0 + v / (2.0 * it->c));
            f = v;
        }
        const cplx s = cplx{0, -1} * f;     // undo the initial i * sqrt(...)
        const cplx msq = s * s;
        const cplx w = (p1 - msq * p0) / (1.0 - msq);
        return z0 + 1.0 / w;
    }
};

namespace detail {

// A boundary sample's position once it has been flattened onto the real
// axis, advanced through the remaining steps alongside the complex images.
// The just-flattened tip (x == 0) becomes the base of the next slit and
// reappears on the domain side at -h/scale; the traversal keeps W on the
// left, so the flattened boundary accumulates on the negative axis.
struct RealPos {
    double x = 0.0;
    bool finite = false;  // false encodes the point at infinity
};

inline void advance_real(RealPos& p, const ZipperStep& s) {
    if (p.finite && p.x == 0.0) {
        p.x = -s.h / s.scale;
        return;
    }
    if (s.use_mobius) {
        if (!p.finite) {
            p.x = -2.0 * s.c;
            p.finite = true;
        } else {
            const double den = 1.0 - p.x / (2.0 * s.c);
            if (std::fabs(den) < 1e-300) p.finite = false;
            else p.x /= den;
        }
    }
    if (p.finite)
        p.x = (p.x >= 0.0 ? 1.0 : -1.0) * std::sqrt(p.x * p.x + s.h * s.h) / s.scale;
}

// Boundary samples of one tract's level-1 curve in the inverted plane,
// resampled to roughly equal chord length with a guaranteed minimum density
// across the partition window.  Returns tau ordinates, increasing.
inline std::vector<double> sample_tract_ordinates(const Tract& t, cplx z0, const RiemannOptions& opt) {
    // Reach of the parametrisation.  Multi-tract models can pinch near
    // iota(infinity) (parallel boundary ends are tangent there), and the
    // conformal modulus of the pinched neck grows linearly with the reach;
    // keep it small enough that intermediate zipper coordinates, which grow
    // like exp(pi * modulus), stay comfortably inside double range.
    const double y_max = opt.y_max > 0.0
                             ? opt.y_max
                             : std::max(150.0, 1.7 * TWO_PI * static_cast<double>(opt.window));
    const int n_dense = std::max(64, opt.oversample * opt.resolution);
    const double th_max = std::atan(y_max);

    std::vector<double> ys(n_dense);
    std::vector<cplx> ws(n_dense);
    for (int i = 0; i < n_dense; ++i) {
        const double th = -th_max + 2.0 * th_max * i / (n_dense - 1);
        ys[i] = std::tan(th);
        const cplx z = t.tau_inv(cplx{1.0, ys[i]});
        ws[i] = 1.0 / (z - z0);
    }

    // Cumulative chord length along the inverted-plane curve.
    std::vector<double> cum(n_dense, 0.0);
    for (int i = 1; i < n_dense; ++i) cum[i] = cum[i - 1] + std::abs(ws[i] - ws[i - 1]);
    const double total = cum.back();
    if (!(total > 0.0)) throw NumericalError("riemann: degenerate boundary curve");

    // Equal-chord quantiles...
    std::vector<double> picked;
    picked.reserve(static_cast<std::size_t>(opt.resolution) + 4 * static_cast<std::size_t>(opt.window) + 16);
    for (int j = 0; j < opt.resolution; ++j) {
        const double target = total * j / (opt.resolution - 1);
        const auto it = std::lower_bound(cum.begin(), cum.end(), target);
        const int hi = static_cast<int>(std::min<std::ptrdiff_t>(it - cum.begin(), n_dense - 1));
        if (hi == 0) { picked.push_back(ys[0]); continue; }
        const double seg = cum[hi] - cum[hi - 1];
        const double f = seg > 0.0 ? (target - cum[hi - 1]) / seg : 0.0;
        picked.push_back(ys[hi - 1] + f * (ys[hi] - ys[hi - 1]));
    }
    // ...plus a uniform safety net over the partition window, so the far
    // 2*pi cells keep enough samples even though their inverted-plane
    // footprint is tiny.
    const double y_win = TWO_PI * (static_cast<double>(opt.window) + 1.0);
    for (double y = -y_win; y <= y_win + 1e-9; y += 0.25 * PI) picked.push_back(y);

    std::sort(picked.begin(), picked.end());
    std::vector<double> out;
    out.reserve(picked.size());
    for (double y : picked) {
        if (!out.empty() && !(y > out.back() + 1e-9)) continue;
        out.push_back(y);
    }
    return out;
}

} // namespace detail

/// Build the uniformising map of W for a catalogue model.  Requires the
/// origin to lie in W (true for every catalogue entry); throws otherwise.
inline RiemannMap build_riemann_map(const Model& m, const RiemannOptions& opt = {}) {
    if (m.tracts.empty()) throw ConfigError("build_riemann_map: model has no tracts");
    for (const Tract& t : m.tracts)
        if (in_tract_level(t, cplx{0, 0}, 1.0))
            throw ConfigError("build_riemann_map: origin is not in W");
    if (opt.resolution < 16) throw ConfigError("build_riemann_map: resolution too small");

    RiemannMap map;
    map.options = opt;
    map.z0 = m.tracts[0].tau_inv(cplx{2.0, 0.0});

    // Sample every tract, ordered by tau ordinate; tau is conformal onto the
    // right half-plane, so increasing ordinate keeps W on the left and the
    // concatenation traverses the boundary of iota(W) positively.
    std::vector<cplx> wpts;
    for (std::size_t j = 0; j < m.tracts.size(); ++j) {
        const auto ys = detail::sample_tract_ordinates(m.tracts[j], map.z0, opt);
        for (double y : ys) {
            const cplx z = m.tracts[j].tau_inv(cplx{1.0, y});
            map.samples.push_back(z);
            map.sample_y.push_back(y);
            map.sample_tract.push_back(static_cast<std::uint32_t>(j));
            wpts.push_back(1.0 / (z - map.z0));
        }
    }
    const std::size_t n = wpts.size();
    if (n < 8) throw NumericalError("build_riemann_map: too few boundary samples");

    // Open the curve at the sample farthest from iota(infinity) = 0.  All
    // tract ends, junctions and tangency cusps cluster at 0; starting there
    // would flatten a thick region around a still-pinched remainder and
    // compress its samples below double precision.  Starting opposite the
    // necks, each pinch is entered and left again mid-chain, and far samples
    // sit at large (relatively precise) coordinates while it happens.
    std::size_t start = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (std::abs(wpts[i]) > std::abs(wpts[start])) start = i;
    std::rotate(wpts.begin(), wpts.begin() + static_cast<std::ptrdiff_t>(start), wpts.end());
    std::rotate(map.samples.begin(), map.samples.begin() + static_cast<std::ptrdiff_t>(start),
                map.samples.end());
    std::rotate(map.sample_y.begin(), map.sample_y.begin() + static_cast<std::ptrdiff_t>(start),
                map.sample_y.end());
    std::rotate(map.sample_tract.begin(),
                map.sample_tract.begin() + static_cast<std::ptrdiff_t>(start), map.sample_tract.end());

    map.p0 = wpts[0];
    map.p1 = wpts[1];

    // Images of the still-unflattened samples under the chain built so far.
    std::vector<cplx> img(n);
    for (std::size_t i = 2; i < n; ++i) {
        img[i] = cplx{0, 1} * std::sqrt((wpts[i] - map.p1) / (wpts[i] - map.p0));
        if (!finite(img[i])) throw NumericalError("build_riemann_map: initial map blew up");
    }

    map.steps.reserve(n - 2);
    // Flattened samples live on the real axis: pos[0] is p0 (starts at
    // infinity), pos[1] is p1 (the initial map sends it to 0), and each
    // sample joins at its own step.
    std::vector<detail::RealPos> pos(n);
    pos[1] = {0.0, true};
    for (std::size_t k = 2; k < n; ++k) {
        const cplx a = img[k];
        if (!(a.imag() > 0.0))
            throw NumericalError("build_riemann_map: sample crossed the real axis; raise resolution");
        ZipperStep s;
        s.a = a;
        s.use_mobius = std::fabs(a.real()) > 1e-14 * std::abs(a);
        s.c = s.use_mobius ? std::norm(a) / (2.0 * a.real()) : 0.0;
        s.h = s.use_mobius ? std::norm(a) / a.imag() : a.imag();
        s.scale = s.h;
        for (std::size_t i = k + 1; i < n; ++i) {
            cplx f = img[i];
            if (s.use_mobius) f = f / (1.0 - f / (2.0 * s.c));
            cplx g = std::sqrt(f * f + s.h * s.h);
            if (g.imag() < 0.0) g = -g;
            img[i] = g / s.scale;
            if (!finite(img[i]) || std::abs(img[i]) > 1e140)
                throw NumericalError(
                    "build_riemann_map: intermediate coordinates overflowed; "
                    "the domain is too pinched for this sampling window");
        }
        for (std::size_t i = 0; i < k; ++i) detail::advance_real(pos[i], s);
        pos[k] = {0.0, true};
        map.steps.push_back(s);
    }
    map.closing_finite = pos[0].finite;
    map.closing_a = pos[0].x;
    if (map.closing_finite && std::fabs(map.closing_a) < 1e-12)
        throw NumericalError("build_riemann_map: base image collapsed onto the tip");

    // Send the base back to infinity; every other flattened sample follows.
    if (map.closing_finite) {
        for (std::size_t i = 0; i < n; ++i) {
            if (!pos[i].finite) { pos[i] = {-map.closing_a, true}; continue; }
            const double den = 1.0 - pos[i].x / map.closing_a;
            if (std::fabs(den) < 1e-300) pos[i].finite = false;
            else pos[i].x /= den;
        }
    }

    // Closing and normalisation at the origin of the z-plane.
    const cplx probe = map.chain_forward(1.0 / (cplx{0, 0} - map.z0));
    if (!finite(probe) || probe.imag() <= 0.0)
        throw NumericalError("build_riemann_map: normalisation point escaped the half-plane");
    map.close_left = probe.real() < 0.0;
    map.q = map.close_left ? -(probe * probe) : probe * probe;
    if (!(map.q.imag() > 0.0))
        throw NumericalError("build_riemann_map: closing map failed");

    // Rotation from a finite-difference derivative at 0.
    map.rot = 1.0;
    const cplx u1 = map.eval(cplx{1e-6, 0.0});
    const double mag = std::abs(u1);
    if (!(mag > 0.0)) throw NumericalError("build_riemann_map: derivative normalisation failed");
    map.rot = std::conj(u1) / mag;

    // Push each flattened sample through the closing square and the Cayley
    // map to obtain its exact disk angle.
    std::vector<double> theta(n);
    for (std::size_t i = 0; i < n; ++i) {
        cplx c{1.0, 0.0};  // the point at infinity maps to rot * 1
        if (pos[i].finite) {
            const double sq = pos[i].x * pos[i].x;
            const double v = map.close_left ? -sq : sq;
            c = (cplx{v, 0.0} - map.q) / (cplx{v, 0.0} - std::conj(map.q));
        }
        theta[i] = std::arg(map.rot * c);
    }

    // Per-tract boundary tables, ordered by ordinate and unwrapped.  Genuine
    // increments are small and nonnegative; microscopic inversions are
    // roundoff at the far window, where consecutive angles agree to within
    // an ulp, and are clamped flat.
    map.table_y.resize(m.tracts.size());
    map.table_angle.resize(m.tracts.size());
    for (std::size_t j = 0; j < m.tracts.size(); ++j) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < n; ++i)
            if (map.sample_tract[i] == j) idx.push_back(i);
        std::sort(idx.begin(), idx.end(),
                  [&](std::size_t a, std::size_t b) { return map.sample_y[a] < map.sample_y[b]; });
        auto& ys = map.table_y[j];
        auto& an = map.table_angle[j];
        double prev_theta = 0.0;
        for (std::size_t i : idx) {
            ys.push_back(map.sample_y[i]);
            if (an.empty()) {
                an.push_back(theta[i]);
            } else {
                double d = wrap_pm(theta[i] - prev_theta);
                if (d < -1e-9)
                    throw NumericalError("build_riemann_map: boundary trace not monotone; "
                                         "raise resolution");
                if (d < 0.0) d = 0.0;
                an.push_back(an.back() + d);
            }
            prev_theta = theta[i];
        }
    }

    map.model_hash = fnv1a(m.name);
    return map;
}

// ---------------------------------------------------------------- boundary

/// Disk angle of the boundary point of tract j at ordinate y, interpolated
/// from the per-tract tables.  Unwrapped: monotone in y, equal to the true
/// angle mod 2*pi.
inline double boundary_angle(const RiemannMap& map, std::size_t j, double y) {
    if (j >= map.table_y.size() || map.table_y[j].size() < 2)
        throw NumericalError("boundary_angle: no boundary table for this tract");
    const auto& ys = map.table_y[j];
    const auto& an = map.table_angle[j];
    if (y < ys.front() || y > ys.back())
        throw ConfigError("boundary_angle: ordinate outside the sampled reach");
    const std::size_t hi = std::min<std::size_t>(
        ys.size() - 1,
        static_cast<std::size_t>(std::upper_bound(ys.begin(), ys.end(), y) - ys.begin()));
    const std::size_t lo = hi - 1;
    const double t = ys[hi] > ys[lo] ? (y - ys[lo]) / (ys[hi] - ys[lo]) : 0.0;
    return an[lo] + t * (an[hi] - an[lo]);
}

/// Slope of the interpolated boundary angle at ordinate y: the slope of the
/// same table segment boundary_angle reads, so the two stay consistent.  The
/// interpolant is piecewise linear, so this is its exact derivative away
/// from the nodes (and the matching one-sided value at them).
inline double boundary_angle_slope(const RiemannMap& map, std::size_t j,
                                   double y) {
    if (j >= map.table_y.size() || map.table_y[j].size() < 2)
        throw NumericalError("boundary_angle_slope: no boundary table for this tract");
    const auto& ys = map.table_y[j];
    const auto& an = map.table_angle[j];
    if (y < ys.front() || y > ys.back())
        throw ConfigError("boundary_angle_slope: ordinate outside the sampled reach");
    const std::size_t hi = std::min<std::size_t>(
        ys.size() - 1,
        static_cast<std::size_t>(std::upper_bound(ys.begin(), ys.end(), y) - ys.begin()));
    const std::size_t lo = hi - 1;
    if (!(ys[hi] > ys[lo]))
        throw NumericalError("boundary_angle_slope: degenerate table segment");
    return (an[hi] - an[lo]) / (ys[hi] - ys[lo]);
}

struct PushforwardArc {
    long k = 0;          // grid index: arc between ordinates 2 pi k and 2 pi (k+1)
    std::size_t tract = 0;
    double lo = 0.0;     // unwrapped angles, lo <= hi
    double hi = 0.0;

    CircArc arc() const { return {lo, hi}; }
};

/// Images under Psi of the 2*pi-grid cells on each tract's level-1 curve.
inline std::vector<PushforwardArc> pushforward_partition(const RiemannMap& map, long window) {
    std::vector<PushforwardArc> arcs;
    for (std::size_t j = 0; j < map.table_y.size(); ++j) {
        double prev = boundary_angle(map, j, -TWO_PI * static_cast<double>(window));
        for (long k = -window; k < window; ++k) {
            const double next = boundary_angle(map, j, TWO_PI * static_cast<double>(k + 1));
            PushforwardArc a;
            a.k = k;
            a.tract = j;
            a.lo = prev;
            a.hi = next;
            arcs.push_back(a);
            prev = next;
        }
    }
    return arcs;
}

/// Total angular extent of one tract's pushforward window; < 2*pi when the
/// parametrisation is consistent.
inline double pushforward_span(const std::vector<PushforwardArc>& arcs, std::size_t tract) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& a : arcs)
        if (a.tract == tract) { lo = std::min(lo, a.lo); hi = std::max(hi, a.hi); }
    return hi - lo;
}

/// Reflection extension across the level-1 curve: points of the open band
/// 1 < Re tau < 2 are sent to 1/conj(Psi(reflected point)); points of W
/// evaluate directly.  Defined on W union the open level-(0,2) bands.
inline cplx reflect_extend(const RiemannMap& map, const Model& m, cplx z) {
    const auto j = tract_containing(m, z);
    if (j) {
        const cplx w = m.tracts[*j].tau(z);
        if (w.real() >= 2.0)
            throw NumericalError("reflect_extend: point too deep in the tract");
        if (w.real() > 1.0) {
            const cplx zr = m.tracts[*j].tau_inv(cplx{2.0 - w.real(), w.imag()});
            return 1.0 / std::conj(map.eval(zr));
        }
    }
    return map.eval(z);
}

} // namespace qcfold
