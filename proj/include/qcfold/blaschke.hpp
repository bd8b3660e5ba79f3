#pragma once

// Finite Blaschke products driven by the boundary partition of the disk.
//
// The pushforward arcs of the 2*pi grid supply candidate zeros: the
// hyperbolic top point of an arc (apex of the geodesic over it) sees the arc
// with harmonic measure exactly 1/2, so placing zeros at top points couples
// the product's boundary rotation speed to the partition geometry.  The
// selection routine thins the candidates to a hyperbolically R-separated net
// and then re-anchors each survivor to the shortest arc within S steps,
// which keeps the per-arc rotation bounded away from both 0 and a full turn.
//
// The induced level partition cuts each tract's level-1 curve at the
// ordinates where B composed with the uniformisation returns to 1; on every
// such cell the boundary argument climbs by exactly one turn.

#include "qcfold/hyperbolic.hpp"
#include "qcfold/model.hpp"
#include "qcfold/numeric.hpp"
#include "qcfold/riemann.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

namespace qcfold {

// Arcs below this angular length are excluded from zero candidacy: their top
// points are within an ulp of the unit circle.  Such arcs occur legitimately
// at the far end of the sampling window, where boundary angles converge
// exponentially toward the cusp images.
inline constexpr double kMinZeroArc = 1e-12;

struct BlaschkeProduct {
    std::vector<cplx> zeros;          // all strictly inside the disk
    std::vector<cplx> normalizer;     // |a|/a per zero (1 for a zero at 0)
    std::vector<std::size_t> source_arc; // index of the arc each zero came from
    double tail_mass = 0.0;           // sum of 1 - |a|, recorded for tail bounds
};

/// B(z) = prod (|a|/a) (a - z)/(1 - conj(a) z); the factor for a zero at the
/// origin degenerates to z.
inline cplx blaschke_eval(const BlaschkeProduct& B, cplx z) {
    cplx out{1.0, 0.0};
    for (std::size_t i = 0; i < B.zeros.size(); ++i) {
        const cplx a = B.zeros[i];
        if (std::abs(a) == 0.0) out *= z;
        else out *= B.normalizer[i] * (a - z) / (1.0 - std::conj(a) * z);
    }
    return out;
}

/// d/dtheta arg B(e^{i theta}): the sum of the Poisson kernels of the zeros.
/// Strictly positive, so arg B is strictly increasing along the circle.
inline double boundary_arg_derivative(const BlaschkeProduct& B, double theta) {
    double s = 0.0;
    for (const cplx& a : B.zeros) s += poisson_kernel(a, theta);
    return s;
}

/// Continuous branch of arg B(e^{i theta}), up to a theta-independent
/// constant.  Each factor contributes theta - 2 Arg(1 - conj(a) e^{i theta});
/// the argument of 1 - conj(a) e^{i theta} stays in the open right half plane
/// because |a| < 1, so the principal branch never jumps and the sum is smooth
/// in theta with derivative boundary_arg_derivative.  Feed it an unwrapped
/// theta: the value grows by 2 pi per zero over each full turn.
inline double blaschke_boundary_phase(const BlaschkeProduct& B, double theta) {
    const cplx w = unit(theta);
    double s = 0.0;
    for (const cplx& a : B.zeros)
        s += theta - 2.0 * std::arg(1.0 - std::conj(a) * w);
    return s;
}

/// Adding (or dropping) the zero a changes the product by at most this much
/// anywhere in |z| <= r: |1 - factor| = (1-|a|) |a + |a| z| / (|a||1-conj(a)z|).
inline double tail_change_bound(cplx a, double r) {
    return (1.0 - std::abs(a)) * (1.0 + r) / (1.0 - r);
}

/// Largest hyperbolic gap between consecutive usable top points within one
/// tract's arc run; reported so callers can compare R against it.
inline double adjacent_top_diameter(const std::vector<PushforwardArc>& arcs) {
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < arcs.size(); ++i) {
        if (arcs[i].tract != arcs[i + 1].tract) continue;
        if (arcs[i].arc().length() < kMinZeroArc) continue;
        if (arcs[i + 1].arc().length() < kMinZeroArc) continue;
        worst = std::max(worst, hyperbolic_distance(geodesic_top_point(arcs[i].arc()),
                                                    geodesic_top_point(arcs[i + 1].arc())));
    }
    return worst;
}

/// Zero-set selection.  Scan the arcs in the given order and keep each top
/// point that is hyperbolically >= R from everything already kept (greedy
/// maximal net).  Each kept element is then replaced by the shortest usable
/// arc at most S index steps away within the same tract run, ties going to
/// the nearer step and then the lower angle; duplicates collapse.
inline BlaschkeProduct select_zero_set(const std::vector<PushforwardArc>& arcs, double R, long S) {
    if (R < 0.0 || S < 0) throw ConfigError("select_zero_set: R and S must be nonnegative");

    std::vector<std::size_t> usable;
    for (std::size_t i = 0; i < arcs.size(); ++i)
        if (arcs[i].arc().length() >= kMinZeroArc) usable.push_back(i);
    if (usable.empty()) throw ConfigError("select_zero_set: no usable arcs");

    // Scan in angular order around the circle, not in tract order: with several
    // tracts the walls interleave near the cusps, and a wall-by-wall scan would
    // let the first wall's picks shadow the other wall's candidates.
    std::sort(usable.begin(), usable.end(), [&](std::size_t a, std::size_t b) {
        const double wa = wrap_angle(0.5 * (arcs[a].lo + arcs[a].hi));
        const double wb = wrap_angle(0.5 * (arcs[b].lo + arcs[b].hi));
        if (wa != wb) return wa < wb;
        return a < b;
    });

    // Greedy R-separated net over the usable tops.
    std::vector<std::size_t> net;
    std::vector<cplx> net_tops;
    for (std::size_t i : usable) {
        const cplx top = geodesic_top_point(arcs[i].arc());
        bool ok = true;
        for (const cplx& kept : net_tops)
            if (hyperbolic_distance(top, kept) < R) { ok = false; break; }
        if (ok) { net.push_back(i); net_tops.push_back(top); }
    }

    // Re-anchor: shortest usable arc within S steps, same tract.
    std::vector<std::size_t> chosen;
    for (std::size_t i : net) {
        std::size_t best = i;
        double best_len = arcs[i].arc().length();
        long best_step = 0;
        const long lo = std::max<long>(0, static_cast<long>(i) - S);
        const long hi = std::min<long>(static_cast<long>(arcs.size()) - 1,
                                       static_cast<long>(i) + S);
        for (long j = lo; j <= hi; ++j) {
            const auto& cand = arcs[static_cast<std::size_t>(j)];
            if (cand.tract != arcs[i].tract) continue;
            if (cand.arc().length() < kMinZeroArc) continue;
            const double len = cand.arc().length();
            const long step = std::labs(j - static_cast<long>(i));
            const bool better =
                len < best_len ||
                (len == best_len && (step < best_step ||
                                     (step == best_step && cand.lo < arcs[best].lo)));
            if (better) { best = static_cast<std::size_t>(j); best_len = len; best_step = step; }
        }
        chosen.push_back(best);
    }
    std::sort(chosen.begin(), chosen.end());
    chosen.erase(std::unique(chosen.begin(), chosen.end()), chosen.end());

    BlaschkeProduct B;
    for (std::size_t i : chosen) {
        const cplx a = geodesic_top_point(arcs[i].arc());
        B.zeros.push_back(a);
        B.normalizer.push_back(std::abs(a) == 0.0 ? cplx{1.0, 0.0} : std::abs(a) / a);
        B.source_arc.push_back(i);
        B.tail_mass += 1.0 - std::abs(a);
    }
    return B;
}

struct MeasureBounds {
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    std::size_t arcs_checked = 0;
};

/// For each usable arc K, the total harmonic measure of K seen from the
/// selected zeros.  The selection is sound when every total lies strictly
/// between 0 and 1: the boundary argument then advances on every K but never
/// completes a full turn inside one K.
inline MeasureBounds zero_measure_bounds(const BlaschkeProduct& B,
                                         const std::vector<PushforwardArc>& arcs) {
    MeasureBounds mb;
    for (const auto& k : arcs) {
        if (k.arc().length() < kMinZeroArc) continue;
        double s = 0.0;
        for (const cplx& a : B.zeros) s += harmonic_measure_arc(a, k.arc());
        mb.lo = std::min(mb.lo, s);
        mb.hi = std::max(mb.hi, s);
        ++mb.arcs_checked;
    }
    if (mb.arcs_checked == 0) throw ConfigError("zero_measure_bounds: no usable arcs");
    return mb;
}

// ------------------------------------------------------------------- level

namespace detail {

// Continuous branch of arg(B(e^{i theta(y)})) along one tract's level-1
// curve, with theta(y) the interpolated boundary-angle table.  Substeps
// adapt so each raw increment stays below one radian, making the unwrap
// unambiguous; the function is nondecreasing because the boundary angle is
// and arg B has positive derivative on the circle.
struct PhaseWalker {
    const BlaschkeProduct* B = nullptr;
    const RiemannMap* map = nullptr;
    std::size_t tract = 0;
    double y = 0.0;
    double arg = 0.0;      // unwrapped
    double raw_cur = 0.0;  // principal value at y

    static PhaseWalker start(const BlaschkeProduct& B, const RiemannMap& map, std::size_t j,
                             double y0) {
        PhaseWalker w;
        w.B = &B; w.map = &map; w.tract = j; w.y = y0;
        w.raw_cur = w.raw(y0);
        w.arg = w.raw_cur;
        return w;
    }

    double raw(double yy) const {
        return std::arg(blaschke_eval(*B, unit(boundary_angle(*map, tract, yy))));
    }

    void advance(double y_to) {
        while (y != y_to) {
            double step = y_to - y;
            double nxt = 0.0, inc = 0.0;
            for (;;) {
                nxt = raw(y + step);
                inc = wrap_pm(nxt - raw_cur);
                if (std::fabs(inc) <= 1.0 || std::fabs(step) < 1e-9) break;
                step *= 0.5;
            }
            if (inc < -0.3)
                throw NumericalError("level_partition: phase ran backwards; "
                                     "raise the map resolution");
            if (std::fabs(inc) > 2.5)
                throw NumericalError("level_partition: phase continuation lost track; "
                                     "shrink the window or raise resolution");
            if (y + step == y) break;  // step underflowed at the target
            y += step;
            arg += inc;
            raw_cur = nxt;
        }
    }
};

} // namespace detail

struct LevelPartition {
    std::size_t tract = 0;
    std::vector<double> endpoints;  // ordinates on the level-1 curve, increasing
};

/// Cut tract j's level-1 curve where B . Psi returns to 1.  Between
/// consecutive endpoints the boundary argument of B climbs by exactly one
/// turn; that is the defining property, enforced here by monotone bisection
/// on the continuous phase.
inline LevelPartition level_partition(const BlaschkeProduct& B, const RiemannMap& map,
                                      std::size_t j, long window = -1) {
    if (j >= map.table_y.size()) throw ConfigError("level_partition: no such tract");
    if (B.zeros.empty()) throw ConfigError("level_partition: empty product");
    if (window < 0) window = map.options.window;
    const double y_lo = -TWO_PI * static_cast<double>(window);
    const double y_hi = TWO_PI * static_cast<double>(window);

    LevelPartition L;
    L.tract = j;

    auto w = detail::PhaseWalker::start(B, map, j, y_lo);
    double target = TWO_PI * std::ceil(w.arg / TWO_PI);
    if (target <= w.arg + 1e-12) target += TWO_PI;

    const double coarse = TWO_PI / 64.0;
    detail::PhaseWalker left = w;  // state at the left end of the current bracket
    for (double yn = std::min(y_lo + coarse, y_hi); ; yn = std::min(yn + coarse, y_hi)) {
        w.advance(yn);
        while (w.arg >= target) {
            // Bisect for the crossing inside (left.y, w.y].
            detail::PhaseWalker lo = left;
            double ylo = lo.y, yhi = w.y;
            for (int it = 0; it < 64 && yhi - ylo > 1e-13 * (1.0 + std::fabs(yhi)); ++it) {
                detail::PhaseWalker probe = lo;
                const double ymid = 0.5 * (ylo + yhi);
                probe.advance(ymid);
                if (probe.arg >= target) yhi = ymid;
                else { lo = probe; ylo = ymid; }
            }
            L.endpoints.push_back(0.5 * (ylo + yhi));
            left = lo;
            target += TWO_PI;
        }
        left = w;
        if (yn >= y_hi) break;
    }
    return L;
}

struct PartitionAudit {
    // Level cells counted against grid cells (the direction that must hold).
    int level_min_hits = 0;
    int level_max_hits = 0;
    // Grid cells counted against level cells (reported for context).
    int grid_min_hits = 0;
    int grid_max_hits = 0;
    bool no_grid_cell_swallows_level_cell = true;
    std::size_t level_cells_checked = 0;
    std::size_t grid_cells_checked = 0;
    std::vector<std::size_t> bad_level_cells;  // level cells meeting < 2 grid cells
    bool pass = false;
};

/// Cross-audit of the level partition against the 2*pi grid on the same
/// curve.  Every level cell spans one full turn of arg B while a grid cell
/// sees strictly less than a turn, so each level cell must meet at least two
/// grid cells and no grid cell may contain a whole level cell.  The reverse
/// counts (how many level cells each grid cell meets) have no a-priori lower
/// bound -- a short grid cell can sit inside one level cell -- and are
/// reported for context only.
inline PartitionAudit verify_partition_property(const LevelPartition& L, long window) {
    PartitionAudit a;
    if (L.endpoints.size() < 2) return a;

    const double y_lo = -TWO_PI * static_cast<double>(window);
    const double y_hi = TWO_PI * static_cast<double>(window);

    struct Cell { double lo, hi; };
    std::vector<Cell> level;
    for (std::size_t i = 0; i + 1 < L.endpoints.size(); ++i)
        if (L.endpoints[i] >= y_lo && L.endpoints[i + 1] <= y_hi)
            level.push_back({L.endpoints[i], L.endpoints[i + 1]});
    std::vector<Cell> grid;
    // Audit only grid cells inside the span the level partition covers,
    // so edge cells are not blamed for data lying outside the window.
    for (long k = -window; k < window; ++k) {
        const Cell c{TWO_PI * static_cast<double>(k), TWO_PI * static_cast<double>(k + 1)};
        if (c.lo >= L.endpoints.front() && c.hi <= L.endpoints.back()) grid.push_back(c);
    }
    if (level.empty() || grid.empty()) return a;

    auto meets = [](const Cell& x, const Cell& y) { return x.lo <= y.hi && y.lo <= x.hi; };

    a.level_min_hits = std::numeric_limits<int>::max();
    for (std::size_t i = 0; i < level.size(); ++i) {
        int hits = 0;
        for (const Cell& g : grid) {
            if (meets(level[i], g)) ++hits;
            if (g.lo <= level[i].lo && level[i].hi <= g.hi)
                a.no_grid_cell_swallows_level_cell = false;
        }
        a.level_min_hits = std::min(a.level_min_hits, hits);
        a.level_max_hits = std::max(a.level_max_hits, hits);
        if (hits < 2) a.bad_level_cells.push_back(i);
    }
    a.grid_min_hits = std::numeric_limits<int>::max();
    for (const Cell& g : grid) {
        int hits = 0;
        for (const Cell& l : level)
            if (meets(g, l)) ++hits;
        a.grid_min_hits = std::min(a.grid_min_hits, hits);
        a.grid_max_hits = std::max(a.grid_max_hits, hits);
    }
    a.level_cells_checked = level.size();
    a.grid_cells_checked = grid.size();
    a.pass = a.level_min_hits >= 2 && a.no_grid_cell_swallows_level_cell;
    return a;
}

} // namespace qcfold
