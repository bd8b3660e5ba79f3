#pragma once

// Piecewise quasiconformal interpolation between the exponential on the
// outer strip edge and the Blaschke boundary values on the inner one.
//
// Three building blocks, each a map of (part of) the strip S = {1<Re z<2}:
//
//   psi1  straightens the Blaschke phase along one level cell K of the inner
//         wall, so that the phase becomes a linear function of position;
//   psi2  realigns the wall partition, sliding each level cell onto the grid
//         interval chosen for it by the alignment plan;
//   psi3  folds a slit rectangle onto a full rectangle, pressing the two
//         sides of the slit onto the surplus ("block") grid cells.
//
// The composed interpolation evaluates sigma after a phase-straightening
// stage and a single global fold whose slots sit over the level cells (slit
// roots at level-cell top endpoints, where the Blaschke boundary value is
// 1).  On the wall this yields exactly e times the Blaschke boundary
// function; on the outer edge exactly e^z; across each slit the two sides
// agree because sigma's cosine profile is symmetric about grid endpoints.

#include "qcfold/blaschke.hpp"
#include "qcfold/numeric.hpp"
#include "qcfold/riemann.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace qcfold {

// ---------------------------------------------------------------------------
// Alignment of the level partition with the 2*pi grid.
// ---------------------------------------------------------------------------

/// One level cell of the inner wall together with its assigned grid interval.
/// Grid interval j means [2*pi*j, 2*pi*(j+1)].
struct AlignedCell {
    std::size_t level_index = 0; // position within the level partition
    double lo = 0.0;             // lower endpoint of the level cell K
    double hi = 0.0;             // upper endpoint of the level cell K
    long grid_index = 0;         // final assigned grid interval
    long initial_grid_index = 0; // before the parity sweep
    int n_block = 0;             // grid cells between this assignment and the
                                 // next one (even); -1 for the last cell,
                                 // whose successor is outside the window
};

/// Order-preserving injection of the level partition into the grid, with the
/// parity bookkeeping that makes every gap even.  The "block" of a cell is
/// the run of unassigned grid intervals immediately above its assignment.
struct AlignmentPlan {
    std::size_t tract = 0;
    std::vector<AlignedCell> cells;        // ascending in lo and grid_index
    std::vector<std::vector<long>> blocks; // per cell, the grid indices of its
                                           // block (empty when n_block <= 0)
    std::vector<long> assigned;            // sorted grid indices carrying cells
    std::vector<long> surplus;             // sorted block grid indices

    /// 1 if the grid interval carries a level cell, 2 if it belongs to a
    /// block, 0 if it is outside the planned window.
    int classify(long grid_index_query) const {
        if (std::binary_search(assigned.begin(), assigned.end(),
                               grid_index_query))
            return 1;
        if (std::binary_search(surplus.begin(), surplus.end(),
                               grid_index_query))
            return 2;
        return 0;
    }
};

/// Assign each level cell the grid interval containing its lower endpoint
/// (ties at a shared endpoint go to the upper interval), then sweep upward
/// from the lowest cell making every gap even; a cell moves at most one slot
/// and only toward the anchor.  Throws ConfigError when two cells would claim
/// the same interval or one interval contains an entire level cell, both of
/// which mean the upstream partition audit failed.
inline AlignmentPlan align_partitions(const LevelPartition& levels) {
    const std::vector<double>& e = levels.endpoints;
    if (e.size() < 2) throw ConfigError("align_partitions: need >= 1 cell");

    AlignmentPlan plan;
    plan.tract = levels.tract;
    const std::size_t n_cells = e.size() - 1;
    for (std::size_t i = 0; i < n_cells; ++i) {
        AlignedCell c;
        c.level_index = i;
        c.lo = e[i];
        c.hi = e[i + 1];
        // floor picks the interval containing the endpoint; an exact grid hit
        // yields the interval having it as lower endpoint, which is the upper
        // of the two candidates.
        c.initial_grid_index = static_cast<long>(std::floor(c.lo / TWO_PI));
        c.grid_index = c.initial_grid_index;
        const long hi_cell = static_cast<long>(std::floor(c.hi / TWO_PI));
        if (hi_cell == c.initial_grid_index)
            throw ConfigError(
                "align_partitions: a grid interval contains a whole level "
                "cell; the partition audit should have failed");
        plan.cells.push_back(c);
    }
    for (std::size_t i = 1; i < n_cells; ++i) {
        if (plan.cells[i].initial_grid_index <= plan.cells[i - 1].grid_index)
            throw ConfigError(
                "align_partitions: duplicate grid assignment; the partition "
                "audit should have failed");
        const long gap =
            plan.cells[i].initial_grid_index - plan.cells[i - 1].grid_index - 1;
        if (gap % 2 != 0) plan.cells[i].grid_index -= 1; // one slot downward
        if (plan.cells[i].grid_index <= plan.cells[i - 1].grid_index)
            throw ConfigError("align_partitions: parity move collided");
    }
    plan.blocks.resize(n_cells);
    for (std::size_t i = 0; i < n_cells; ++i) {
        AlignedCell& c = plan.cells[i];
        const double j_lo = TWO_PI * static_cast<double>(c.grid_index);
        const double j_hi = j_lo + TWO_PI;
        const double gap_dist = std::max({0.0, c.lo - j_hi, j_lo - c.hi});
        if (gap_dist > TWO_PI + 1e-9)
            throw NumericalError("align_partitions: an assignment drifted "
                                 "past one grid interval");
        if (i + 1 < n_cells) {
            c.n_block = static_cast<int>(plan.cells[i + 1].grid_index -
                                         c.grid_index - 1);
            for (long b = c.grid_index + 1; b < plan.cells[i + 1].grid_index;
                 ++b) {
                plan.blocks[i].push_back(b);
                plan.surplus.push_back(b);
            }
        } else {
            c.n_block = -1;
        }
        plan.assigned.push_back(c.grid_index);
    }
    return plan;
}

// ---------------------------------------------------------------------------
// Piecewise-affine maps.
// ---------------------------------------------------------------------------

/// Which side of a slit to take when a query point lies on it.  "below" is
/// the side toward the lower seam of the slot, "above" the side toward the
/// seam through the slit's root.
enum class SlitSide { automatic, below, above };

/// Extended-precision scalar for the affine coefficients.  A cell of
/// dilatation K amplifies coefficient rounding by a factor of order K when
/// inverted or when two adjacent cells are compared along a shared edge;
/// with K in the thousands, double coefficients would cap the slit-pairing
/// identity near 1e-11, an order above its target accuracy.
using lcplx = std::complex<long double>;

/// A triangle-to-triangle affine correspondence w = a z + b conj(z) + c.
struct AffineCell {
    std::array<cplx, 3> src{};
    std::array<cplx, 3> dst{};
    lcplx a{1.0L, 0.0L};
    lcplx b{0.0L, 0.0L};
    lcplx c{0.0L, 0.0L};
    int slot = -1;     // index of the slot (fold rectangle) this cell tiles
    int slit_role = 0; // 0 plain, 1 touches the slit from below, 2 from above

    cplx map(cplx z) const {
        const lcplx lz(z.real(), z.imag());
        const lcplx w = a * lz + b * std::conj(lz) + c;
        return cplx{static_cast<double>(w.real()),
                    static_cast<double>(w.imag())};
    }
    cplx unmap(cplx w) const {
        const lcplx r = lcplx(w.real(), w.imag()) - c;
        const long double det = std::norm(a) - std::norm(b);
        const lcplx z = (std::conj(a) * r - b * std::conj(r)) / det;
        return cplx{static_cast<double>(z.real()),
                    static_cast<double>(z.imag())};
    }
    /// Ratio of the singular values of the linear part.
    double dilatation() const {
        const long double p = std::abs(a), q = std::abs(b);
        if (p <= q) return std::numeric_limits<double>::infinity();
        return static_cast<double>((p + q) / (p - q));
    }
};

namespace detail {

inline double cross2(cplx o, cplx u, cplx v) {
    return (u.real() - o.real()) * (v.imag() - o.imag()) -
           (u.imag() - o.imag()) * (v.real() - o.real());
}

/// Solve for the affine map sending the source triangle to the target one.
inline void solve_affine(AffineCell& cell) {
    const auto lift = [](cplx z) { return lcplx(z.real(), z.imag()); };
    const lcplx d1 = lift(cell.src[1]) - lift(cell.src[0]);
    const lcplx d2 = lift(cell.src[2]) - lift(cell.src[0]);
    const lcplx e1 = lift(cell.dst[1]) - lift(cell.dst[0]);
    const lcplx e2 = lift(cell.dst[2]) - lift(cell.dst[0]);
    const lcplx den = d1 * std::conj(d2) - d2 * std::conj(d1);
    if (std::abs(den) == 0.0L)
        throw NumericalError("degenerate source triangle in piecewise map");
    cell.a = (e1 * std::conj(d2) - e2 * std::conj(d1)) / den;
    cell.b = (e2 * d1 - e1 * d2) / den;
    cell.c = lift(cell.dst[0]) - cell.a * lift(cell.src[0]) -
             cell.b * std::conj(lift(cell.src[0]));
}

inline bool triangle_contains(const std::array<cplx, 3>& t, cplx p,
                              double tol) {
    const double s0 = cross2(t[0], t[1], p);
    const double s1 = cross2(t[1], t[2], p);
    const double s2 = cross2(t[2], t[0], p);
    const double area = cross2(t[0], t[1], t[2]);
    const double m = tol * std::max(1.0, std::abs(area));
    if (area > 0.0) return s0 >= -m && s1 >= -m && s2 >= -m;
    return s0 <= m && s1 <= m && s2 <= m;
}

/// Find the cell containing z among cells[first..last).  A point on a slit
/// is contained in cells on both sides, whose images differ; the side flag
/// chooses the one-sided limit, and automatic mode refuses to guess.
inline const AffineCell* locate_cell(const std::vector<AffineCell>& cells,
                                     std::size_t first, std::size_t last,
                                     cplx z, SlitSide side, double tol) {
    const AffineCell* plain = nullptr;
    const AffineCell* below = nullptr;
    const AffineCell* above = nullptr;
    for (std::size_t k = first; k < last; ++k) {
        const AffineCell& c = cells[k];
        if (!triangle_contains(c.src, z, tol)) continue;
        if (c.slit_role == 1) {
            if (below == nullptr) below = &c;
        } else if (c.slit_role == 2) {
            if (above == nullptr) above = &c;
        } else if (plain == nullptr) {
            plain = &c;
        }
    }
    if (below != nullptr && above != nullptr) {
        if (side == SlitSide::below) return below;
        if (side == SlitSide::above) return above;
        throw ConfigError(
            "piecewise map: point lies on a slit; pass an explicit side");
    }
    if (below != nullptr) return below;
    if (above != nullptr) return above;
    return plain;
}

} // namespace detail

/// A finite collection of affine triangle cells forming a piecewise map.
/// Source interiors are disjoint; shared non-slit edges map consistently
/// because adjacent cells are built on shared vertices.
struct PiecewiseMap {
    std::vector<AffineCell> cells;
    std::string domain;
    std::string codomain;

    double max_dilatation() const {
        double m = 1.0;
        for (const AffineCell& c : cells) m = std::max(m, c.dilatation());
        return m;
    }

    const AffineCell* locate(cplx z, SlitSide side = SlitSide::automatic,
                             double tol = 1e-9) const {
        return detail::locate_cell(cells, 0, cells.size(), z, side, tol);
    }

    cplx eval(cplx z, SlitSide side = SlitSide::automatic) const {
        const AffineCell* c = locate(z, side);
        if (c == nullptr)
            throw ConfigError("piecewise map: point outside the domain");
        return c->map(z);
    }

    /// Evaluate the inverse correspondence.  On the image of a slit the two
    /// preimages coincide (that is the folding identity), so no flag is
    /// needed; the first containing target cell decides.
    cplx eval_inverse(cplx w, double tol = 1e-9) const {
        for (const AffineCell& c : cells)
            if (detail::triangle_contains(c.dst, w, tol)) return c.unmap(w);
        throw ConfigError("piecewise map: point outside the image");
    }

    /// Structural checks: every cell nondegenerate and orientation
    /// preserving with finite dilatation.
    void validate() const {
        for (const AffineCell& c : cells) {
            const double sa = detail::cross2(c.src[0], c.src[1], c.src[2]);
            const double da = detail::cross2(c.dst[0], c.dst[1], c.dst[2]);
            if (!(sa > 0.0) || !(da > 0.0))
                throw NumericalError("piecewise map: degenerate or "
                                     "orientation-reversing cell");
            if (!(c.dilatation() < std::numeric_limits<double>::infinity()))
                throw NumericalError("piecewise map: infinite dilatation");
        }
    }
};

namespace detail {

/// Kernel point of a star-shaped polygon: clip the polygon by the interior
/// half-plane of each of its edges (it must be positively oriented) and
/// return the vertex centroid of what survives.  Every surviving vertex lies
/// in all the half-planes, so the centroid lies in the (convex) kernel.
inline cplx star_kernel_point(const std::vector<cplx>& poly) {
    std::vector<cplx> region = poly;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n && region.size() >= 3; ++i) {
        const cplx a = poly[i];
        const cplx b = poly[(i + 1) % n];
        std::vector<cplx> next;
        const std::size_t m = region.size();
        for (std::size_t k = 0; k < m; ++k) {
            const cplx p = region[k];
            const cplx q = region[(k + 1) % m];
            const double sp = cross2(a, b, p);
            const double sq = cross2(a, b, q);
            if (sp >= 0.0) next.push_back(p);
            if ((sp > 0.0 && sq < 0.0) || (sp < 0.0 && sq > 0.0)) {
                const double t = sp / (sp - sq);
                next.push_back(p + t * (q - p));
            }
        }
        region.swap(next);
    }
    if (region.size() < 3)
        throw NumericalError(
            "fold triangulation: fan polygon is not star-shaped");
    cplx s{0.0, 0.0};
    for (const cplx& p : region) s += p;
    return s / static_cast<double>(region.size());
}

inline std::vector<cplx> positively_oriented(std::vector<cplx> poly) {
    double area = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const cplx p = poly[i];
        const cplx q = poly[(i + 1) % poly.size()];
        area += p.real() * q.imag() - q.real() * p.imag();
    }
    if (area < 0.0) std::reverse(poly.begin(), poly.end());
    return poly;
}

/// Ensure positive orientation of every cell (swapping one vertex pair in
/// both triangles preserves the correspondence) and solve the affine part.
inline void finish_cells(std::vector<AffineCell>& cells) {
    for (AffineCell& c : cells) {
        if (cross2(c.src[0], c.src[1], c.src[2]) < 0.0) {
            std::swap(c.src[1], c.src[2]);
            std::swap(c.dst[1], c.dst[2]);
        }
        solve_affine(c);
    }
}

/// Triangulate one fold slot.  Geometry is built in slot-local coordinates
/// (lower seam at height 0) so that congruent slots produce identical cells
/// up to translation.
///
/// Source: the rectangle [1,1+width] x [0,h] minus the slit from the
/// upper-left corner (1,h) to the center.  Target: the quadrilateral with
/// wall edge from (1,g0) to (1,g0+(1+n)*cell_h), right edge [0,h] pointwise
/// fixed, and straight seams between them.  The wall maps linearly onto the
/// bottom target interval, the slit sides map linearly cell-by-cell onto the
/// n surplus intervals (opposite sides paired about the block midpoint,
/// which is a grid endpoint), and the slit tip lands on that midpoint.
///
/// `width` models the strip between levels rho and 2 rho after a unit
/// translation: the boundary displacement is set by the grid and the slot
/// heights, not by the strip, so narrowing the strip drives the worst
/// distortion up like 1/width^2.
inline std::vector<AffineCell> fold_slot_cells_local(double h, double g0,
                                                     int n_block, int slot,
                                                     double cell_h,
                                                     double width = 1.0) {
    if (n_block < 0 || n_block % 2 != 0)
        throw ConfigError("fold: block size must be even and nonnegative");
    if (!(h > 0.0)) throw ConfigError("fold: empty slot");
    if (!(width > 0.0)) throw ConfigError("fold: strip width must be positive");
    const double g1 = g0 + (1.0 + n_block) * cell_h;
    const double xr = 1.0 + width;
    const cplx L0{1.0, 0.0}, L1{1.0, h}, TR{xr, h}, BR{xr, 0.0};
    const cplx L0d{1.0, g0}, L1d_top{1.0, g1};
    std::vector<AffineCell> cells;

    if (n_block == 0) {
        // No folding: rectangle onto quadrilateral in two triangles.
        AffineCell t1, t2;
        t1.src = {L0, TR, L1};
        t1.dst = {L0d, TR, L1d_top};
        t2.src = {L0, BR, TR};
        t2.dst = {L0d, BR, TR};
        t1.slot = t2.slot = slot;
        cells.push_back(t1);
        cells.push_back(t2);
        finish_cells(cells);
        return cells;
    }

    const int half = n_block / 2;
    const cplx M{1.0 + 0.5 * width, 0.5 * h}; // slit tip at the slot center
    std::vector<cplx> w(static_cast<std::size_t>(half) + 1);
    for (int m = 0; m <= half; ++m)
        w[static_cast<std::size_t>(m)] =
            L1 + (static_cast<double>(m) / half) * (M - L1);

    const double block_lo = g0 + cell_h;
    const double block_mid = block_lo + 0.5 * n_block * cell_h;
    const cplx L1d_low{1.0, block_lo}; // the root, approached from below
    auto wd_below = [&](int m) { return cplx{1.0, block_lo + m * cell_h}; };
    auto wd_above = [&](int m) { return cplx{1.0, g1 - m * cell_h}; };
    (void)block_mid; // the tip target: wd_below(half) == wd_above(half)

    // Interior anchor right of the tip, and its counterpart on the blended
    // mid-line of the target quadrilateral, both three quarters of the way
    // across the strip.
    const cplx D{1.0 + 0.75 * width, 0.5 * h};
    const double bot_75 = 0.25 * g0;            // seam (1,g0)-(xr,0)
    const double top_75 = 0.25 * g1 + 0.75 * h; // seam (1,g1)-(xr,h)
    const cplx Dd{1.0 + 0.75 * width, 0.5 * (bot_75 + top_75)};

    // Fan hubs at kernel points of the two star polygons, source and target
    // sides independently.
    std::vector<cplx> lower_src{L0, L1};
    std::vector<cplx> lower_dst{L0d, L1d_low};
    for (int m = 1; m <= half; ++m) {
        lower_src.push_back(w[static_cast<std::size_t>(m)]);
        lower_dst.push_back(wd_below(m));
    }
    lower_src.insert(lower_src.end(), {D, BR});
    lower_dst.insert(lower_dst.end(), {Dd, BR});

    std::vector<cplx> upper_src{L1};
    std::vector<cplx> upper_dst{L1d_top};
    for (int m = 1; m <= half; ++m) {
        upper_src.push_back(w[static_cast<std::size_t>(m)]);
        upper_dst.push_back(wd_above(m));
    }
    upper_src.insert(upper_src.end(), {D, TR});
    upper_dst.insert(upper_dst.end(), {Dd, TR});

    const cplx A = star_kernel_point(positively_oriented(lower_src));
    const cplx Ad = star_kernel_point(positively_oriented(lower_dst));
    const cplx C = star_kernel_point(positively_oriented(upper_src));
    const cplx Cd = star_kernel_point(positively_oriented(upper_dst));

    // Lower fan over the open chain L0, L1, w_1..w_half, D, BR plus the
    // closing bottom cell; slit edges sit at chain positions 1..half.
    for (std::size_t i = 0; i + 1 < lower_src.size(); ++i) {
        AffineCell cell;
        cell.src = {A, lower_src[i], lower_src[i + 1]};
        cell.dst = {Ad, lower_dst[i], lower_dst[i + 1]};
        cell.slot = slot;
        if (i >= 1 && i <= static_cast<std::size_t>(half)) cell.slit_role = 1;
        cells.push_back(cell);
    }
    {
        AffineCell cell;
        cell.src = {A, BR, L0};
        cell.dst = {Ad, BR, L0d};
        cell.slot = slot;
        cells.push_back(cell);
    }

    // Upper fan over the open chain L1, w_1..w_half, D, TR plus the closing
    // top cell; slit edges sit at chain positions 0..half-1.
    for (std::size_t i = 0; i + 1 < upper_src.size(); ++i) {
        AffineCell cell;
        cell.src = {C, upper_src[i], upper_src[i + 1]};
        cell.dst = {Cd, upper_dst[i], upper_dst[i + 1]};
        cell.slot = slot;
        if (i < static_cast<std::size_t>(half)) cell.slit_role = 2;
        cells.push_back(cell);
    }
    {
        AffineCell cell;
        cell.src = {C, TR, L1};
        cell.dst = {Cd, TR, L1d_top};
        cell.slot = slot;
        cells.push_back(cell);
    }

    {
        AffineCell cell;
        cell.src = {D, BR, TR};
        cell.dst = {Dd, BR, TR};
        cell.slot = slot;
        cells.push_back(cell);
    }

    finish_cells(cells);
    return cells;
}

/// Translate the local construction to absolute ordinates [s_lo, s_hi].
/// Only the constant term changes: congruent slots keep bit-identical
/// linear parts, so their cellwise dilatations agree exactly.
inline std::vector<AffineCell> fold_slot_cells(double s_lo, double s_hi,
                                               double g_lo, int n_block,
                                               int slot,
                                               double cell_h = TWO_PI,
                                               double width = 1.0) {
    std::vector<AffineCell> cells = fold_slot_cells_local(
        s_hi - s_lo, g_lo - s_lo, n_block, slot, cell_h, width);
    const cplx shift{0.0, s_lo};
    const lcplx ls(0.0L, static_cast<long double>(s_lo));
    for (AffineCell& c : cells) {
        for (cplx& v : c.src) v += shift;
        for (cplx& v : c.dst) v += shift;
        c.c += ls - c.a * ls - c.b * std::conj(ls);
    }
    return cells;
}

} // namespace detail

/// The folding map for one grid-aligned slot: the slit rectangle U = R \ X
/// over grid interval `grid_index` together with its `n_block` surplus cells,
/// mapped onto the full rectangle R.  Identity on the top, bottom and right
/// sides; the wall maps linearly onto the bottom grid interval; opposite slit
/// sides land on the block cells, paired about the block midpoint.  `width`
/// rebuilds the same slot over a narrower strip.
inline PiecewiseMap build_psi3(long grid_index, int n_block,
                               double width = 1.0) {
    if (n_block < 0 || n_block % 2 != 0)
        throw ConfigError("build_psi3: block size must be even and >= 0");
    const double g_lo = TWO_PI * static_cast<double>(grid_index);
    const double g_hi = g_lo + (1.0 + n_block) * TWO_PI;
    PiecewiseMap pm;
    pm.domain = "slit rectangle over a grid slot";
    pm.codomain = "rectangle over the same slot";
    pm.cells = detail::fold_slot_cells(g_lo, g_hi, g_lo, n_block, 0, TWO_PI,
                                       width);
    pm.validate();
    return pm;
}

/// The partition-aligning strip map: piecewise linear on the wall, sending
/// each slot J' (assigned grid interval plus its block) onto its level cell,
/// the identity on the outer edge, interpolated linearly across the strip.
inline PiecewiseMap build_psi2(const AlignmentPlan& plan) {
    PiecewiseMap pm;
    pm.domain = "strip, wall in grid coordinates";
    pm.codomain = "strip, wall in level coordinates";
    for (std::size_t i = 0; i < plan.cells.size(); ++i) {
        const AlignedCell& c = plan.cells[i];
        const int n = std::max(c.n_block, 0);
        const double t_lo = TWO_PI * static_cast<double>(c.grid_index);
        const double t_hi = t_lo + (1.0 + n) * TWO_PI;
        const cplx S0{1.0, t_lo}, S1{1.0, t_hi}, S2{2.0, t_hi}, S3{2.0, t_lo};
        const cplx T0{1.0, c.lo}, T1{1.0, c.hi};
        AffineCell t1, t2;
        t1.src = {S0, S2, S1};
        t1.dst = {T0, S2, T1};
        t2.src = {S0, S3, S2};
        t2.dst = {T0, S3, S2};
        t1.slot = t2.slot = static_cast<int>(i);
        pm.cells.push_back(t1);
        pm.cells.push_back(t2);
    }
    detail::finish_cells(pm.cells);
    pm.validate();
    return pm;
}

// ---------------------------------------------------------------------------
// Phase straightening.
// ---------------------------------------------------------------------------

/// The phase-linearizing map of one level cell K = [1+i*lo, 1+i*hi], extended
/// to the rectangle K x [1,2] by linear interpolation toward the identity on
/// the right side.  `alpha` is the normalized boundary phase: increasing,
/// alpha(lo) = 0, alpha(hi) = 1.  Evaluation uses the exact formula; the
/// piecewise cells are a sampled rendition for reporting and export.
struct Psi1Map {
    double lo = 0.0;
    double hi = 0.0;
    std::function<double(double)> alpha;
    std::function<double(double)> alpha_prime; // optional exact derivative
    PiecewiseMap cells;
    double min_wall_slope = 0.0; // extremes over samples of (hi-lo)*alpha'
    double max_wall_slope = 0.0;

    double wall(double y) const { return lo + (hi - lo) * alpha(y); }

    /// Exact slope of the wall trace.  Available when the map was built
    /// with a derivative of its phase; distortion audits need it because
    /// the slope can be too spiky for finite differences to see.
    double wall_slope(double y) const {
        if (!alpha_prime)
            throw ConfigError("Psi1Map: no phase derivative attached");
        return (hi - lo) * alpha_prime(y);
    }

    cplx eval(cplx z) const {
        const double x = z.real(), y = z.imag();
        return cplx{x, (2.0 - x) * wall(y) + (x - 1.0) * y};
    }

    /// Invert the wall trace by bisection (the trace is strictly increasing).
    double wall_inverse(double target) const {
        double a = lo, b = hi;
        for (int i = 0; i < 200; ++i) {
            const double m = 0.5 * (a + b);
            if (wall(m) < target) a = m;
            else b = m;
            if (b - a < 1e-15 * std::max(1.0, std::abs(target))) break;
        }
        return 0.5 * (a + b);
    }

    /// Invert the strip extension at fixed abscissa.  The ordinate trace
    /// (2-x) wall(y) + (x-1) y is strictly increasing in y, since both the
    /// wall trace and the identity are and the weights are convex.
    cplx eval_inverse(cplx zeta) const {
        const double x = zeta.real();
        double a = lo, b = hi;
        for (int i = 0; i < 200; ++i) {
            const double m = 0.5 * (a + b);
            const double v = (2.0 - x) * wall(m) + (x - 1.0) * m;
            (v < zeta.imag() ? a : b) = m;
            if (b - a < 1e-15 * std::max(1.0, std::abs(zeta.imag()))) break;
        }
        return cplx{x, 0.5 * (a + b)};
    }
};

/// Build the phase straightener for one level cell from its normalized phase
/// function.  Throws ConfigError when alpha fails its endpoint normalization
/// or is not strictly increasing on the sampling grid.
inline Psi1Map build_psi1(double lo, double hi,
                          std::function<double(double)> alpha,
                          std::size_t n_nodes = 128,
                          std::function<double(double)> alpha_prime = {}) {
    if (!(hi > lo)) throw ConfigError("build_psi1: empty cell");
    if (n_nodes < 2) n_nodes = 2;
    Psi1Map m;
    m.lo = lo;
    m.hi = hi;
    m.alpha = std::move(alpha);
    m.alpha_prime = std::move(alpha_prime);
    if (std::abs(m.alpha(lo)) > 1e-6 || std::abs(m.alpha(hi) - 1.0) > 1e-6)
        throw ConfigError("build_psi1: alpha must run from 0 to 1 across K");
    const double dy = (hi - lo) / static_cast<double>(n_nodes);
    double prev = m.alpha(lo);
    double min_slope = std::numeric_limits<double>::infinity();
    double max_slope = 0.0;
    std::vector<double> wall_nodes(n_nodes + 1);
    wall_nodes[0] = lo;
    wall_nodes[n_nodes] = hi;
    for (std::size_t k = 1; k <= n_nodes; ++k) {
        const double y =
            (k == n_nodes) ? hi : lo + dy * static_cast<double>(k);
        const double a = m.alpha(y);
        if (!(a > prev))
            throw ConfigError("build_psi1: alpha is not strictly increasing");
        const double slope = (hi - lo) * (a - prev) / dy;
        min_slope = std::min(min_slope, slope);
        max_slope = std::max(max_slope, slope);
        if (k < n_nodes) wall_nodes[k] = lo + (hi - lo) * a;
        prev = a;
    }
    m.min_wall_slope = min_slope;
    m.max_wall_slope = max_slope;
    m.cells.domain = "level rectangle";
    m.cells.codomain = "level rectangle";
    for (std::size_t k = 0; k < n_nodes; ++k) {
        const double y0 = lo + dy * static_cast<double>(k);
        const double y1 =
            (k + 1 == n_nodes) ? hi : lo + dy * static_cast<double>(k + 1);
        const cplx S0{1.0, y0}, S1{1.0, y1}, S2{2.0, y1}, S3{2.0, y0};
        const cplx T0{1.0, wall_nodes[k]}, T1{1.0, wall_nodes[k + 1]};
        AffineCell t1, t2;
        t1.src = {S0, S2, S1};
        t1.dst = {T0, S2, T1};
        t2.src = {S0, S3, S2};
        t2.dst = {T0, S3, S2};
        t1.slot = t2.slot = static_cast<int>(k);
        m.cells.cells.push_back(t1);
        m.cells.cells.push_back(t2);
    }
    detail::finish_cells(m.cells.cells);
    m.cells.validate();
    return m;
}

// ---------------------------------------------------------------------------
// The exponential-cosine boundary map.
// ---------------------------------------------------------------------------

/// sigma on the strip and beyond its right edge: exp(z) over assigned grid
/// rectangles and for Re z >= 2, and the radial Joukowsky blend
///     (1 - t/2) e^z + (t/2) e^{2x - z},   t = 2 - x,
/// over surplus rectangles.  The blend equals e*cosh(z-1) = e*cos(y) on the
/// wall, e^z on the outer edge, fixes the rays y in 2*pi*Z (so it matches
/// exp across grid corners), and satisfies |sigma| <= e^x.
inline cplx sigma_j(cplx z, const AlignmentPlan& plan) {
    const double x = z.real();
    if (x >= 2.0) return std::exp(z);
    if (x < 1.0 - 1e-9)
        throw ConfigError("sigma_j: point left of the strip");
    const long cell = static_cast<long>(std::floor(z.imag() / TWO_PI));
    if (plan.classify(cell) == 2) {
        const double t = 2.0 - x;
        return (1.0 - 0.5 * t) * std::exp(z) +
               0.5 * t * std::exp(cplx{2.0 * x, 0.0} - z);
    }
    return std::exp(z);
}

// ---------------------------------------------------------------------------
// The composed interpolation on one tract.
// ---------------------------------------------------------------------------

/// The interpolation between e^z on the outer strip edge and e times the
/// Blaschke boundary function on the wall.  Slots sit over the level cells;
/// each slot's slit runs from the wall point at the cell's upper endpoint to
/// the slot center, and the fold presses its sides onto the slot's surplus
/// grid cells.  Evaluation: phase straightening, then the fold, then sigma.
struct TractInterpolation {
    std::size_t tract = 0;
    AlignmentPlan plan;
    std::vector<Psi1Map> straighteners; // one per slot
    PiecewiseMap fold;                  // all slots, cells tagged by slot id
    std::vector<std::pair<std::size_t, std::size_t>> slot_cells;
    std::vector<double> slot_bounds;    // level endpoints, size slots+1

    double wall_lo() const { return slot_bounds.front(); }
    double wall_hi() const { return slot_bounds.back(); }

    int slot_of(double y) const {
        if (y < slot_bounds.front() - 1e-12 || y > slot_bounds.back() + 1e-12)
            throw ConfigError("interpolation: point outside the fold window");
        const auto it =
            std::upper_bound(slot_bounds.begin(), slot_bounds.end(), y);
        long i = static_cast<long>(it - slot_bounds.begin()) - 1;
        i = std::max(
            0l, std::min<long>(i, static_cast<long>(slot_bounds.size()) - 2));
        return static_cast<int>(i);
    }

    cplx eval(cplx z, SlitSide side = SlitSide::automatic) const {
        if (z.real() == 2.0) return std::exp(z); // every stage fixes the edge
        const std::size_t s = static_cast<std::size_t>(slot_of(z.imag()));
        const cplx zeta = straighteners[s].eval(z);
        const AffineCell* cell =
            detail::locate_cell(fold.cells, slot_cells[s].first,
                                slot_cells[s].second, zeta, side, 1e-9);
        if (cell == nullptr)
            throw ConfigError("interpolation: point not covered by the fold");
        return sigma_j(cell->map(zeta), plan);
    }
};

/// Assemble the interpolation for one tract from the conformal data: the
/// Blaschke product, the boundary tables of the uniformizing map, and the
/// level partition.  The straightening phase is evaluated in closed form
/// (blaschke_boundary_phase composed with the boundary angle), so no
/// resolution parameter is involved: zeros very close to the circle produce
/// arbitrarily sharp phase transitions along the wall, and any fixed-step
/// table would miss them.
inline TractInterpolation build_interpolation(const RiemannMap& map,
                                              const BlaschkeProduct& B,
                                              const LevelPartition& levels) {
    TractInterpolation ti;
    ti.tract = levels.tract;
    ti.plan = align_partitions(levels);
    if (ti.plan.cells.size() < 2)
        throw ConfigError("build_interpolation: need at least two level cells");
    const std::size_t n_slots = ti.plan.cells.size() - 1;
    ti.fold.domain = "strip minus slits over level cells";
    ti.fold.codomain = "strip, wall on the grid";

    // The straighteners share one copy of the conformal data, so the result
    // stays valid after the caller's map and product go away.
    const auto mp = std::make_shared<const RiemannMap>(map);
    const auto bp = std::make_shared<const BlaschkeProduct>(B);
    const std::size_t tract = levels.tract;

    for (std::size_t i = 0; i < n_slots; ++i) {
        const AlignedCell& c = ti.plan.cells[i];
        ti.slot_bounds.push_back(c.lo);

        // Normalized phase along the level cell.  The boundary angle is kept
        // on the branch through the cell's lower endpoint; a level cell
        // subtends less than a full circle, so the forward angular distance
        // identifies the branch uniquely.  Each cell spans one full turn of
        // the product's argument, a fact double-checked here.
        const double th_lo = boundary_angle(map, tract, c.lo);
        const double th_span =
            wrap_angle(boundary_angle(map, tract, c.hi) - th_lo);
        const double phi_lo = blaschke_boundary_phase(B, th_lo);
        const double total =
            blaschke_boundary_phase(B, th_lo + th_span) - phi_lo;
        if (!(total > 0.0))
            throw NumericalError("build_interpolation: phase did not advance");
        if (std::abs(total - TWO_PI) > 1e-6)
            throw NumericalError(
                "build_interpolation: level cell winding is not one turn");
        auto alpha = [mp, bp, tract, th_lo, th_span, phi_lo, total](double y) {
            const double delta = std::min(
                wrap_angle(boundary_angle(*mp, tract, y) - th_lo), th_span);
            return (blaschke_boundary_phase(*bp, th_lo + delta) - phi_lo) /
                   total;
        };
        // d alpha / dy by the chain rule: the phase density on the circle
        // times the slope of the interpolated boundary angle.
        auto alpha_prime = [mp, bp, tract, th_lo, th_span, total](double y) {
            const double delta = std::min(
                wrap_angle(boundary_angle(*mp, tract, y) - th_lo), th_span);
            return boundary_arg_derivative(*bp, th_lo + delta) *
                   boundary_angle_slope(*mp, tract, y) / total;
        };
        ti.straighteners.push_back(
            build_psi1(c.lo, c.hi, alpha, 256, alpha_prime));

        const double g_lo = TWO_PI * static_cast<double>(c.grid_index);
        const std::size_t first = ti.fold.cells.size();
        std::vector<AffineCell> cells = detail::fold_slot_cells(
            c.lo, c.hi, g_lo, c.n_block, static_cast<int>(i));
        ti.fold.cells.insert(ti.fold.cells.end(), cells.begin(), cells.end());
        ti.slot_cells.emplace_back(first, ti.fold.cells.size());
    }
    ti.slot_bounds.push_back(ti.plan.cells[n_slots - 1].hi);
    ti.fold.validate();
    return ti;
}

/// Evaluate the composed interpolation at a point of the slit strip.
inline cplx compose_gj(const TractInterpolation& ti, cplx z,
                       SlitSide side = SlitSide::automatic) {
    return ti.eval(z, side);
}

} // namespace qcfold
