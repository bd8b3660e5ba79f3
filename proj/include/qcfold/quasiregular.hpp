#pragma once

// Global quasiregular assembly.
//
// Starting from a catalogue model -- tracts with conformal coordinates tau
// and the map exp(tau) -- this module glues one map g defined on the whole
// plane:
//
//   deep      Re tau_j > 2   g = exp(tau_j),  untouched
//   band      1 < Re tau_j <= 2   g = the folded interpolation of the tract,
//                                 evaluated in tau coordinates
//   off       elsewhere      g = e * B(Psi), with Psi the uniformising map
//                            of the off-tract region and B the Blaschke
//                            product built over the pushed-forward grid
//
// The pieces agree along the separating curves: the band construction
// reproduces exp(tau) on its outer edge and e * B(Psi) on the wall, and the
// two sides of every interior slit receive equal values.  The audits below
// measure exactly these agreements, together with the distortion budget
// (conformal off the bands, bounded distortion inside) and the range bound
// e for the non-covering part of the map.

#include "qcfold/blaschke.hpp"
#include "qcfold/interpolation.hpp"
#include "qcfold/model.hpp"
#include "qcfold/numeric.hpp"
#include "qcfold/riemann.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <vector>

namespace qcfold {

struct GlobalMapOptions {
    long grid_window = 16;    // 2*pi-grid reach used for the zero net
    long level_window = 8;    // grid reach of the per-tract level partitions
    double separation = 1.2;  // hyperbolic separation of the zero net
    long spacing = 1;         // grid subsampling of the net
    RiemannOptions riemann{}; // sampling of the uniformising map
};

enum class Region { deep, band, off_tract };

struct RegionQuery {
    Region region = Region::off_tract;
    std::optional<std::size_t> tract; // set whenever z lies in a tract
    cplx tau{};                       // tau_j(z) when tract is set
};

/// The assembled map.  Owns copies of all conformal data, so it remains
/// valid independently of the inputs it was built from.
struct GlobalMap {
    Model model;
    std::shared_ptr<const RiemannMap> map;
    BlaschkeProduct product;
    std::vector<LevelPartition> levels;     // one per tract
    std::vector<TractInterpolation> bands;  // one per tract
    GlobalMapOptions options;

    RegionQuery classify(cplx z) const {
        RegionQuery q;
        const auto j = tract_containing(model, z);
        if (!j) return q;
        q.tract = j;
        q.tau = model.tracts[*j].tau(z);
        if (q.tau.real() > 2.0) q.region = Region::deep;
        else if (q.tau.real() > 1.0) q.region = Region::band;
        return q;
    }

    /// Evaluate g.  Band points on a slit need an explicit side; band points
    /// outside the constructed window throw ConfigError.
    cplx eval(cplx z, SlitSide side = SlitSide::automatic) const {
        const RegionQuery q = classify(z);
        if (q.region == Region::deep) return model_eval(model, z);
        if (q.region == Region::band)
            return compose_gj(bands[*q.tract], q.tau, side);
        return E_CONST * blaschke_eval(product, map->eval(z));
    }

    /// Evaluate directly in tau coordinates of one tract (band or deep).
    cplx eval_tau(std::size_t tract, cplx w,
                  SlitSide side = SlitSide::automatic) const {
        if (w.real() > 2.0) {
            if (w.real() > 700.0)
                throw NumericalError("eval_tau: exponential overflow");
            return std::exp(w);
        }
        return compose_gj(bands[tract], w, side);
    }
};

/// Assemble the map over a ready-made uniformisation (for instance one
/// loaded from a cache): push the grid forward, select the zero net, build
/// the per-tract level partitions and their interpolations.  The supplied
/// map must describe the same model and cover the requested grid window.
inline GlobalMap build_global_map(const Model& m,
                                  std::shared_ptr<const RiemannMap> map,
                                  const GlobalMapOptions& opt = {}) {
    if (!map) throw ConfigError("build_global_map: null uniformisation");
    if (map->table_y.size() != m.tracts.size())
        throw ConfigError("build_global_map: uniformisation tract count differs");
    if (map->options.window < opt.grid_window)
        throw ConfigError("build_global_map: uniformisation window too small");
    GlobalMap g;
    g.model = m;
    g.options = opt;
    g.map = std::move(map);
    const auto arcs = pushforward_partition(*g.map, opt.grid_window);
    g.product = select_zero_set(arcs, opt.separation, opt.spacing);
    for (std::size_t j = 0; j < m.tracts.size(); ++j) {
        g.levels.push_back(
            level_partition(g.product, *g.map, j, opt.level_window));
        g.bands.push_back(
            build_interpolation(*g.map, g.product, g.levels.back()));
    }
    return g;
}

/// Run the full pipeline from scratch, including the uniformisation.
inline GlobalMap build_global_map(const Model& m,
                                  const GlobalMapOptions& opt = {}) {
    RiemannOptions ro = opt.riemann;
    ro.window = opt.grid_window;
    return build_global_map(
        m, std::make_shared<const RiemannMap>(build_riemann_map(m, ro)), opt);
}

// ---------------------------------------------------------------------------
// Pointwise distortion.
// ---------------------------------------------------------------------------

/// Central-difference Beltrami coefficient of g at z.  The step must keep
/// the whole difference cross inside one smooth piece of the map.
inline cplx beltrami_fd(const GlobalMap& g, cplx z, double h = 1e-6,
                        SlitSide side = SlitSide::automatic) {
    const cplx fx =
        (g.eval(z + cplx{h, 0.0}, side) - g.eval(z - cplx{h, 0.0}, side)) /
        (2.0 * h);
    const cplx fy =
        (g.eval(z + cplx{0.0, h}, side) - g.eval(z - cplx{0.0, h}, side)) /
        (2.0 * h);
    const cplx fz = 0.5 * (fx - cplx{0.0, 1.0} * fy);
    const cplx fzb = 0.5 * (fx + cplx{0.0, 1.0} * fy);
    const double denom = std::abs(fz);
    if (!(denom > 0.0))
        throw NumericalError("beltrami_fd: vanishing derivative");
    return fzb / fz;
}

/// Fourth-order version for regions where the map is smooth on the scale of
/// the stencil.  The wider stencil admits a larger step, which keeps
/// evaluation noise from swamping the small derivatives of the uniformizing
/// map away from the tracts.
inline cplx beltrami_fd4(const GlobalMap& g, cplx z, double h = 5e-3) {
    const auto d = [&](cplx step) {
        return (-g.eval(z + 2.0 * step) + 8.0 * g.eval(z + step) -
                8.0 * g.eval(z - step) + g.eval(z - 2.0 * step)) /
               (12.0 * std::abs(step));
    };
    const cplx fx = d(cplx{h, 0.0});
    const cplx fy = d(cplx{0.0, h});
    const cplx fz = 0.5 * (fx - cplx{0.0, 1.0} * fy);
    const cplx fzb = 0.5 * (fx + cplx{0.0, 1.0} * fy);
    const double denom = std::abs(fz);
    if (!(denom > 0.0))
        throw NumericalError("beltrami_fd4: vanishing derivative");
    return fzb / fz;
}

/// Same in tau coordinates of one tract; tau is conformal, so the Beltrami
/// coefficient of the composition differs only by a unimodular factor and
/// the distortion not at all.
inline cplx beltrami_fd_tau(const GlobalMap& g, std::size_t tract, cplx w,
                            double h = 1e-6,
                            SlitSide side = SlitSide::automatic) {
    const cplx fx = (g.eval_tau(tract, w + cplx{h, 0.0}, side) -
                     g.eval_tau(tract, w - cplx{h, 0.0}, side)) /
                    (2.0 * h);
    const cplx fy = (g.eval_tau(tract, w + cplx{0.0, h}, side) -
                     g.eval_tau(tract, w - cplx{0.0, h}, side)) /
                    (2.0 * h);
    const cplx fz = 0.5 * (fx - cplx{0.0, 1.0} * fy);
    const cplx fzb = 0.5 * (fx + cplx{0.0, 1.0} * fy);
    const double denom = std::abs(fz);
    if (!(denom > 0.0))
        throw NumericalError("beltrami_fd_tau: vanishing derivative");
    return fzb / fz;
}

struct WirtingerPair {
    cplx fz{};
    cplx fzb{};

    cplx beltrami() const {
        if (!(std::abs(fz) > 0.0))
            throw NumericalError("WirtingerPair: vanishing derivative");
        return fzb / fz;
    }
    double jacobian() const { return std::norm(fz) - std::norm(fzb); }
};

/// Exact Wirtinger derivatives of the band map at an interior point of the
/// band, in tau coordinates.  The three stages all have closed-form
/// derivatives -- the straightener from the attached phase density, the
/// fold cell from its stored coefficients, the boundary blend from its
/// formula -- and the chain rule composes them.  Finite differences are no
/// substitute here: the wall phase can have features of width 1e-5 and
/// slopes of order 1e5, far below any workable step.
inline WirtingerPair band_derivative(const TractInterpolation& ti, cplx z,
                                     SlitSide side = SlitSide::automatic) {
    const double x = z.real(), y = z.imag();
    if (!(x > 1.0 && x < 2.0))
        throw ConfigError("band_derivative: point not inside the band");
    const std::size_t s = static_cast<std::size_t>(ti.slot_of(y));
    const Psi1Map& psi = ti.straighteners[s];

    // Straightener (x, y) -> (x, (2-x) w(y) + (x-1) y).
    const double w = psi.wall(y);
    const double wp = psi.wall_slope(y);
    const cplx fx{1.0, y - w};
    const cplx fy{0.0, (2.0 - x) * wp + (x - 1.0)};
    const cplx qz = 0.5 * (fx - cplx{0.0, 1.0} * fy);
    const cplx qzb = 0.5 * (fx + cplx{0.0, 1.0} * fy);

    // Fold cell, complex-affine.
    const cplx zeta = psi.eval(z);
    const AffineCell* cell =
        detail::locate_cell(ti.fold.cells, ti.slot_cells[s].first,
                            ti.slot_cells[s].second, zeta, side, 1e-9);
    if (cell == nullptr)
        throw ConfigError("band_derivative: point not covered by the fold");
    const cplx a{static_cast<double>(cell->a.real()),
                 static_cast<double>(cell->a.imag())};
    const cplx b{static_cast<double>(cell->b.real()),
                 static_cast<double>(cell->b.imag())};
    const cplx rz = a * qz + b * std::conj(qzb);
    const cplx rzb = a * qzb + b * std::conj(qz);

    // sigma at the fold image: exp on assigned ground, the blend
    //   sigma = (u/2) e^w + (1 - u/2) e^{conj w},  u = Re w,
    // on surplus ground, with derivatives
    //   d/dw    = (1/4 + u/2) e^w - (1/4) e^{conj w}
    //   d/dwbar = (1/4) e^w + (3/4 - u/2) e^{conj w}.
    const cplx img = cell->map(zeta);
    cplx sw, swb;
    const long ground = static_cast<long>(std::floor(img.imag() / TWO_PI));
    if (ti.plan.classify(ground) == 2) {
        const double u = img.real();
        const cplx ew = std::exp(img);
        const cplx ewb = std::exp(std::conj(img));
        sw = (0.25 + 0.5 * u) * ew - 0.25 * ewb;
        swb = 0.25 * ew + (0.75 - 0.5 * u) * ewb;
    } else {
        sw = std::exp(img);
        swb = cplx{0.0, 0.0};
    }

    WirtingerPair out;
    out.fz = sw * rz + swb * std::conj(rzb);
    out.fzb = sw * rzb + swb * std::conj(rz);
    return out;
}

namespace detail {

/// Ordinates (in multiples of 2*pi) where the boundary blend changes
/// formula: the grid lines separating an assigned interval from a surplus
/// one.  The blend is a single analytic expression across surplus-surplus
/// lines, and the exponential across assigned-assigned ones, so only the
/// mixed transitions are creases.
inline std::vector<double> blend_crease_lines(const AlignmentPlan& plan) {
    std::vector<double> lines;
    if (plan.assigned.empty()) return lines;
    const long lo = plan.assigned.front();
    const long hi = plan.assigned.back();
    for (long j = lo; j < hi; ++j)
        if (plan.classify(j) != plan.classify(j + 1))
            lines.push_back(TWO_PI * static_cast<double>(j + 1));
    return lines;
}

} // namespace detail

/// Probe points for the band of one tract, in tau coordinates: interior
/// points of every fold cell, pulled back through the straightener.  Probes
/// whose difference cross of radius `clearance` would leave the cell, or
/// whose image comes too close to a crease of the boundary blend, are
/// dropped -- a finite-difference estimate across either line would mix two
/// smooth pieces and measure nothing.
inline std::vector<cplx> band_probe_points(const TractInterpolation& ti,
                                           double clearance = 1e-4) {
    static const double weights[4][3] = {{0.4, 0.3, 0.3},
                                         {0.3, 0.4, 0.3},
                                         {0.3, 0.3, 0.4},
                                         {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}};
    const std::vector<double> creases =
        detail::blend_crease_lines(ti.plan);
    std::vector<cplx> probes;
    for (const AffineCell& cell : ti.fold.cells) {
        for (const double* wgt : weights) {
            const cplx zeta = wgt[0] * cell.src[0] + wgt[1] * cell.src[1] +
                              wgt[2] * cell.src[2];
            bool inside = true;
            for (int sx = -1; sx <= 1 && inside; sx += 2)
                for (int sy = -1; sy <= 1 && inside; sy += 2)
                    inside = detail::triangle_contains(
                        cell.src, zeta + cplx{sx * clearance, sy * clearance},
                        1e-12);
            if (!inside) continue;
            const double img = cell.map(zeta).imag();
            bool clear = true;
            for (double line : creases)
                clear = clear && std::abs(img - line) > 100.0 * clearance;
            if (!clear) continue;
            const std::size_t s = static_cast<std::size_t>(cell.slot);
            probes.push_back(ti.straighteners[s].eval_inverse(zeta));
        }
    }
    return probes;
}

// ---------------------------------------------------------------------------
// Audits.
// ---------------------------------------------------------------------------

struct DistortionReport {
    double off_mu_max = 0.0;   // sup |mu| over off-tract probes
    double deep_mu_max = 0.0;  // sup |mu| over deep probes
    double band_mu_max = 0.0;  // sup |mu| over band probes (the k bound)
    double band_K_max = 1.0;   // matching distortion quotient
    double fold_K_max = 1.0;   // exact cellwise distortion of the folds
    double band_jac_min = 0.0; // least Jacobian seen over band probes
    int off_probes = 0;
    int deep_probes = 0;
    int band_probes = 0;
};

/// Sample points of the off-tract region, clear of the walls so that a
/// difference cross stays inside.  Rejection sampling in a centred box;
/// the default reach keeps the probes where the uniformizing map still has
/// an appreciable derivative -- far out it flattens exponentially and any
/// difference quotient dissolves into evaluation noise.
inline std::vector<cplx> off_tract_probe_points(const GlobalMap& g, int n,
                                                std::uint64_t seed,
                                                double margin = 0.1,
                                                double reach = 12.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-reach, reach);
    const auto off = [&g](cplx z, double m) {
        for (const Tract& t : g.model.tracts)
            if (t.contains(z) && t.tau(z).real() >= 1.0 - m) return false;
        return true;
    };
    std::vector<cplx> out;
    int guard = 0;
    while (static_cast<int>(out.size()) < n && ++guard < 200 * n) {
        const cplx z{u(rng), u(rng)};
        bool ok = off(z, margin);
        // the widest stencil any caller uses must stay off the tracts too
        for (int s = 0; s < 4 && ok; ++s) {
            static const cplx arm[4] = {{1.0, 0.0}, {-1.0, 0.0},
                                        {0.0, 1.0}, {0.0, -1.0}};
            ok = off(z + 0.011 * arm[s], 0.02);
        }
        if (ok) out.push_back(z);
    }
    if (static_cast<int>(out.size()) < n)
        throw NumericalError("off_tract_probe_points: rejection stalled");
    return out;
}

inline DistortionReport audit_distortion(const GlobalMap& g,
                                         std::uint64_t seed = 11,
                                         int off_samples = 300) {
    DistortionReport r;

    for (const cplx z : off_tract_probe_points(g, off_samples, seed)) {
        r.off_mu_max = std::max(r.off_mu_max, std::abs(beltrami_fd4(g, z)));
        ++r.off_probes;
    }

    std::mt19937_64 rng(seed + 1);
    r.band_jac_min = std::numeric_limits<double>::infinity();
    static const double weights[4][3] = {{0.6, 0.2, 0.2},
                                         {0.2, 0.6, 0.2},
                                         {0.2, 0.2, 0.6},
                                         {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}};
    for (std::size_t j = 0; j < g.model.tracts.size(); ++j) {
        const TractInterpolation& ti = g.bands[j];
        std::uniform_real_distribution<double> uy(ti.wall_lo() + 1.0,
                                                  ti.wall_hi() - 1.0);
        for (double x : {2.5, 3.5, 6.0}) {
            for (int k = 0; k < 20; ++k) {
                const cplx w{x, uy(rng)};
                r.deep_mu_max = std::max(
                    r.deep_mu_max, std::abs(beltrami_fd_tau(g, j, w)));
                ++r.deep_probes;
            }
        }
        for (const AffineCell& cell : ti.fold.cells) {
            const SlitSide side = cell.slit_role == 1   ? SlitSide::below
                                  : cell.slit_role == 2 ? SlitSide::above
                                                        : SlitSide::automatic;
            const std::size_t s = static_cast<std::size_t>(cell.slot);
            for (const double* wgt : weights) {
                const cplx zeta = wgt[0] * cell.src[0] +
                                  wgt[1] * cell.src[1] + wgt[2] * cell.src[2];
                const cplx z = ti.straighteners[s].eval_inverse(zeta);
                const WirtingerPair d = band_derivative(ti, z, side);
                r.band_mu_max =
                    std::max(r.band_mu_max, std::abs(d.beltrami()));
                r.band_jac_min = std::min(r.band_jac_min, d.jacobian());
                ++r.band_probes;
            }
        }
        r.fold_K_max = std::max(r.fold_K_max, ti.fold.max_dilatation());
    }
    r.band_K_max = (1.0 + r.band_mu_max) /
                   std::max(1e-300, 1.0 - r.band_mu_max);
    return r;
}

struct SeamReport {
    double wall_residual = 0.0;  // band wall trace vs e B on the boundary
    double outer_residual = 0.0; // straddle across Re tau = 2
    double slit_residual = 0.0;  // two-sided values along the slits
    double seam_residual = 0.0;  // straddle across inter-slot seams
    double deep_mismatch = 0.0;  // g vs exp tau in the deep region
    double slit_modulus_max = 0.0;
};

inline SeamReport audit_seams(const GlobalMap& g, int samples = 64) {
    SeamReport r;
    const double eps = 1e-9;
    for (std::size_t j = 0; j < g.model.tracts.size(); ++j) {
        const TractInterpolation& ti = g.bands[j];
        const double lo = ti.wall_lo(), hi = ti.wall_hi();

        for (int k = 1; k < samples; ++k) {
            const double y = lo + (hi - lo) * (k + 0.29) / (samples + 0.5);
            const cplx wall = compose_gj(ti, cplx{1.0, y});
            const cplx limit =
                E_CONST *
                blaschke_eval(g.product, unit(boundary_angle(*g.map, j, y)));
            r.wall_residual =
                std::max(r.wall_residual, std::abs(wall - limit));

            const cplx inner = compose_gj(ti, cplx{2.0 - eps, y});
            const cplx outer = std::exp(cplx{2.0 + eps, y});
            r.outer_residual =
                std::max(r.outer_residual, std::abs(inner - outer));
        }

        for (std::size_t i = 0; i + 1 < ti.plan.cells.size(); ++i) {
            const AlignedCell& c = ti.plan.cells[i];
            if (c.n_block < 2) continue;
            const cplx root{1.0, c.hi};
            const cplx tip{1.5, 0.5 * (c.lo + c.hi)};
            for (int k = 1; k < samples; ++k) {
                const cplx zeta = root + (static_cast<double>(k) / samples) *
                                             (tip - root);
                const cplx below =
                    sigma_j(ti.fold.eval(zeta, SlitSide::below), ti.plan);
                const cplx above =
                    sigma_j(ti.fold.eval(zeta, SlitSide::above), ti.plan);
                r.slit_residual =
                    std::max(r.slit_residual, std::abs(below - above));
                r.slit_modulus_max = std::max(
                    {r.slit_modulus_max, std::abs(below), std::abs(above)});
            }
        }

        // Straddles across the interior slot boundaries (the top of the
        // last slot is the window edge, not a seam).
        for (std::size_t i = 0; i + 2 < ti.plan.cells.size(); ++i) {
            const double seam = ti.plan.cells[i].hi;
            for (double x : {1.05, 1.3, 1.6, 1.95}) {
                const cplx a = compose_gj(ti, cplx{x, seam - eps});
                const cplx b = compose_gj(ti, cplx{x, seam + eps});
                r.seam_residual =
                    std::max(r.seam_residual, std::abs(a - b));
            }
        }

        std::mt19937_64 rng(17 + j);
        std::uniform_real_distribution<double> uy(lo, hi);
        std::uniform_real_distribution<double> ux(2.0 + 1e-6, 8.0);
        for (int k = 0; k < samples; ++k) {
            const cplx w{ux(rng), uy(rng)};
            const cplx z = g.model.tracts[j].tau_inv(w);
            r.deep_mismatch = std::max(
                r.deep_mismatch, std::abs(g.eval(z) - model_eval(g.model, z)));
        }
    }
    return r;
}

struct RangeReport {
    double off_modulus_max = 0.0;  // sup |g|/e over off-tract probes, < 1
    double wall_modulus_max = 0.0; // sup |g| along the walls
    double slit_modulus_max = 0.0; // sup |g| over the folded slit values
    bool pass = false;
};

/// The non-covering part of the construction -- off-tract values, wall
/// values and slit values -- must stay in the closed disk of radius e; the
/// off-tract interior stays strictly inside.
inline RangeReport audit_range(const GlobalMap& g, std::uint64_t seed = 13,
                               int off_samples = 400, int samples = 96) {
    RangeReport r;
    for (const cplx z : off_tract_probe_points(g, off_samples, seed))
        r.off_modulus_max =
            std::max(r.off_modulus_max, std::abs(g.eval(z)) / E_CONST);
    for (std::size_t j = 0; j < g.model.tracts.size(); ++j) {
        const TractInterpolation& ti = g.bands[j];
        for (int k = 1; k < samples; ++k) {
            const double y = ti.wall_lo() + (ti.wall_hi() - ti.wall_lo()) *
                                                (k + 0.41) / (samples + 0.5);
            r.wall_modulus_max = std::max(
                r.wall_modulus_max, std::abs(compose_gj(ti, cplx{1.0, y})));
        }
        for (std::size_t i = 0; i + 1 < ti.plan.cells.size(); ++i) {
            const AlignedCell& c = ti.plan.cells[i];
            if (c.n_block < 2) continue;
            const cplx root{1.0, c.hi};
            const cplx tip{1.5, 0.5 * (c.lo + c.hi)};
            for (int k = 1; k <= samples; ++k) {
                const cplx zeta =
                    root +
                    (static_cast<double>(k) / samples) * (tip - root);
                for (SlitSide side : {SlitSide::below, SlitSide::above})
                    r.slit_modulus_max = std::max(
                        r.slit_modulus_max,
                        std::abs(sigma_j(ti.fold.eval(zeta, side), ti.plan)));
            }
        }
    }
    r.pass = r.off_modulus_max < 1.0 &&
             r.wall_modulus_max <= E_CONST + 1e-9 &&
             r.slit_modulus_max <= E_CONST + 1e-9;
    return r;
}

// ---------------------------------------------------------------------------
// Strip-narrowing profile.
// ---------------------------------------------------------------------------

/// Worst cellwise distortion of a tract's fold rebuilt over a strip of the
/// given width, keeping the slot heights, the grid and the surplus counts.
/// The boundary displacements absorbed by the fold are set by those data
/// alone, so the distortion grows like 1/width^2 as the strip narrows.
inline double fold_distortion_at_width(const AlignmentPlan& plan,
                                       double width) {
    double worst = 1.0;
    for (std::size_t i = 0; i + 1 < plan.cells.size(); ++i) {
        const AlignedCell& c = plan.cells[i];
        const std::vector<AffineCell> cells = detail::fold_slot_cells(
            c.lo, c.hi, TWO_PI * static_cast<double>(c.grid_index),
            c.n_block, static_cast<int>(i), TWO_PI, width);
        for (const AffineCell& cell : cells)
            worst = std::max(worst, cell.dilatation());
    }
    return worst;
}

} // namespace qcfold
