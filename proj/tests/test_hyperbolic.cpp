#include <catch2/catch_amalgamated.hpp>

#include "qcfold/hyperbolic.hpp"

#include <random>

using namespace qcfold;
using Catch::Matchers::WithinAbs;

namespace {

// Independent quadrature oracle for harmonic measure: composite Simpson on
// the Poisson integral.  Deliberately knows nothing about the closed form.
double harmonic_measure_by_quadrature(cplx a, const CircArc& I, int n = 20000) {
    if (n % 2) ++n;
    const double h = I.length() / n;
    double s = poisson_kernel(a, I.lo) + poisson_kernel(a, I.hi);
    for (int i = 1; i < n; ++i)
        s += poisson_kernel(a, I.lo + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0 / TWO_PI;
}

std::mt19937_64 rng(20240814);

double urand(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

cplx random_disk_point(double rmax) {
    const double r = std::sqrt(urand(0.0, 1.0)) * rmax;
    return unit(urand(0.0, TWO_PI)) * r;
}

} // namespace

TEST_CASE("hyperbolic distance basics", "[hyperbolic]") {
    // atanh(1/2), radial distance from the origin in the half-metric.
    CHECK_THAT(hyperbolic_distance(cplx{0, 0}, cplx{0.5, 0}), WithinAbs(0.5493061443340548, 1e-15));
    CHECK_THAT(hyperbolic_distance(cplx{0.5, 0}, cplx{0, 0}), WithinAbs(0.5493061443340548, 1e-15));
    CHECK(hyperbolic_distance(cplx{0.3, 0.1}, cplx{0.3, 0.1}) == 0.0);

    // Triangle inequality and Moebius invariance on random triples.
    for (int i = 0; i < 200; ++i) {
        const cplx a = random_disk_point(0.95), b = random_disk_point(0.95), c = random_disk_point(0.95);
        const double dab = hyperbolic_distance(a, b);
        CHECK(dab <= hyperbolic_distance(a, c) + hyperbolic_distance(c, b) + 1e-12);
        const cplx m = random_disk_point(0.9);
        const double rot = urand(0.0, TWO_PI);
        const auto mob = [&](cplx z) { return unit(rot) * mobius_to_zero(z, m); };
        CHECK_THAT(hyperbolic_distance(mob(a), mob(b)), WithinAbs(dab, 1e-11));
    }
}

TEST_CASE("geodesic top point", "[hyperbolic]") {
    // Quarter-circle arc: top at e^{i pi/4} tan(pi/8).
    const CircArc quarter{0.0, 0.5 * PI};
    const cplx top = geodesic_top_point(quarter);
    CHECK_THAT(std::abs(top), WithinAbs(0.41421356237309503, 1e-15));
    CHECK_THAT(std::arg(top), WithinAbs(0.25 * PI, 1e-15));

    // Arc of length pi/3: |top| = tan(pi/6) = 1/sqrt(3).
    CHECK_THAT(std::abs(geodesic_top_point(CircArc{0.0, PI / 3.0})), WithinAbs(0.5773502691896257, 1e-15));

    // Half-circle arc: geodesic is a diameter, top is the origin.
    CHECK_THAT(std::abs(geodesic_top_point(CircArc{0.3, 0.3 + PI})), WithinAbs(0.0, 1e-15));

    // The top lies on the geodesic and minimises |z| along it, including for
    // arcs longer than a half-circle where it sits across the origin.
    for (double len : {0.2, 1.0, 2.5, PI, 4.0, 5.5}) {
        const CircArc I{1.1, 1.1 + len};
        const cplx a = geodesic_top_point(I);
        CHECK_THAT(distance_to_geodesic(a, I), WithinAbs(0.0, 1e-9));
        const cplx p = mobius_to_zero(unit(I.lo), a);
        const cplx dir = p / std::abs(p);
        for (int k = -10; k <= 10; ++k)
            CHECK(std::abs(a) <= std::abs(mobius_from_zero(std::tanh(0.37 * k) * dir, a)) + 1e-12);
    }
}

TEST_CASE("poisson kernel and harmonic measure", "[hyperbolic]") {
    // P_{1/2}(1) = (1 - 1/4) / (1/2)^2 = 3, and the kernel averages to 1.
    CHECK_THAT(poisson_kernel(cplx{0.5, 0.0}, 0.0), WithinAbs(3.0, 1e-15));
    CHECK_THAT(harmonic_measure_arc(cplx{0.4, -0.3}, CircArc{0.0, TWO_PI}), WithinAbs(1.0, 1e-15));

    // From the origin, harmonic measure is normalised arc length.
    CHECK_THAT(harmonic_measure_arc(cplx{0, 0}, CircArc{0.25, 1.25}), WithinAbs(1.0 / TWO_PI, 1e-14));

    // Frozen cross-check of the closed form against quadrature.
    const cplx a{0.3, 0.2};
    const CircArc I{0.5, 1.7};
    CHECK_THAT(harmonic_measure_arc(a, I), WithinAbs(0.32361076405404055, 1e-10));

    // Closed form against the quadrature oracle at random positions.
    for (int i = 0; i < 40; ++i) {
        const cplx b = random_disk_point(0.9);
        const double lo = urand(0.0, TWO_PI), len = urand(0.05, 4.0);
        const CircArc J{lo, lo + len};
        CHECK_THAT(harmonic_measure_arc(b, J), WithinAbs(harmonic_measure_by_quadrature(b, J), 1e-9));
    }

    // Additivity over adjacent arcs.
    for (int i = 0; i < 40; ++i) {
        const cplx b = random_disk_point(0.9);
        const double t0 = urand(0.0, 2.0), t1 = t0 + urand(0.1, 2.0), t2 = t1 + urand(0.1, 2.0);
        const double lhs = harmonic_measure_arc(b, {t0, t1}) + harmonic_measure_arc(b, {t1, t2});
        CHECK_THAT(lhs, WithinAbs(harmonic_measure_arc(b, {t0, t2}), 1e-12));
    }

    // The kernel is the density of harmonic measure.
    const cplx b{-0.2, 0.55};
    const double h = 1e-6;
    const double fd = (harmonic_measure_arc(b, {1.0, 2.0 + h}) - harmonic_measure_arc(b, {1.0, 2.0})) / h;
    CHECK_THAT(fd * TWO_PI, WithinAbs(poisson_kernel(b, 2.0), 1e-5));
}

TEST_CASE("top point bisects its own arc", "[hyperbolic]") {
    for (double len : {0.3, 1.0, 2.0, PI, 4.5, 6.0}) {
        for (double lo : {0.0, 0.9, 3.0}) {
            const CircArc I{lo, lo + len};
            CHECK_THAT(harmonic_measure_arc(geodesic_top_point(I), I), WithinAbs(0.5, 1e-13));
        }
    }
}

TEST_CASE("closest points between geodesics", "[hyperbolic]") {
    // Antipodal congruent arcs: by symmetry the closest point of each
    // geodesic to the other is its own top point.
    const CircArc I{-0.4, 0.4}, J{PI - 0.4, PI + 0.4};
    const ClosestPoint cp = closest_point_to_arc(I, J);
    const cplx aI = geodesic_top_point(I);
    CHECK_THAT(std::abs(cp.point - aI), WithinAbs(0.0, 1e-8));
    // The feet are the two top points, so the gap is the distance between them.
    CHECK_THAT(cp.distance, WithinAbs(hyperbolic_distance(aI, geodesic_top_point(J)), 1e-8));

    // Brute-force the foot point on a dense grid and compare.
    for (int i = 0; i < 12; ++i) {
        const double lo1 = urand(0.0, 1.5), len1 = urand(0.2, 1.0);
        const double lo2 = lo1 + len1 + urand(0.3, 1.5), len2 = urand(0.2, 1.0);
        const CircArc A{lo1, lo1 + len1}, B{lo2, lo2 + len2};
        const ClosestPoint got = closest_point_to_arc(A, B);

        const cplx aA = geodesic_top_point(A);
        const cplx p = mobius_to_zero(unit(A.lo), aA);
        const cplx dir = p / std::abs(p);
        double best = std::numeric_limits<double>::infinity();
        cplx bestz;
        for (int k = -40000; k <= 40000; ++k) {
            const cplx z = mobius_from_zero(std::tanh(5e-4 * k) * dir, aA);
            const double d = distance_to_geodesic(z, B);
            if (d < best) { best = d; bestz = z; }
        }
        CHECK_THAT(got.distance, WithinAbs(best, 1e-7));
        CHECK_THAT(std::abs(got.point - bestz), WithinAbs(0.0, 2e-3));
    }
}

TEST_CASE("harmonic measure symmetry at closest points", "[hyperbolic]") {
    // For disjoint arcs I, J the reflection across the bisector of the
    // common perpendicular swaps the configurations, so the measure of I
    // from the foot on J's geodesic equals the measure of J from the foot
    // on I's geodesic.
    for (int i = 0; i < 20; ++i) {
        const double lo1 = urand(0.0, 2.0), len1 = urand(0.2, 1.2);
        const double gap = urand(0.3, 1.2);
        const double lo2 = lo1 + len1 + gap, len2 = urand(0.2, 1.2);
        const CircArc I{lo1, lo1 + len1}, J{lo2, lo2 + len2};
        const cplx aJI = closest_point_to_arc(J, I).point; // on J's geodesic
        const cplx aIJ = closest_point_to_arc(I, J).point; // on I's geodesic
        CHECK_THAT(harmonic_measure_arc(aJI, I), WithinAbs(harmonic_measure_arc(aIJ, J), 1e-8));
    }
}

TEST_CASE("harnack ratio bound is sharp in the half-metric", "[hyperbolic]") {
    for (int i = 0; i < 25; ++i) {
        const cplx z = random_disk_point(0.85), w = random_disk_point(0.85);
        if (std::abs(z - w) < 1e-3) continue;
        const double bound = std::exp(2.0 * hyperbolic_distance(z, w));
        double worst = 0.0;
        for (int k = 0; k < 4000; ++k) {
            const double th = TWO_PI * k / 4000.0;
            worst = std::max(worst, poisson_kernel(z, th) / poisson_kernel(w, th));
        }
        CHECK(worst <= bound * (1.0 + 1e-10));
        CHECK(worst >= bound * (1.0 - 1e-3)); // grid maximum approaches the bound
    }
}

TEST_CASE("harmonic measure decays like exp(-2 distance)", "[hyperbolic]") {
    // Walk away from a fixed arc along a geodesic ray and regress
    // log(omega) against the distance to the arc's geodesic.
    const CircArc J{-0.25, 0.25};
    std::vector<double> xs, ys;
    for (double t = 1.0; t <= 5.0; t += 0.5) {
        const cplx z = -std::tanh(t) * cplx{1.0, 0.0};
        const double d = distance_to_geodesic(z, J);
        const double om = harmonic_measure_arc(z, J);
        REQUIRE(om > 0.0);
        xs.push_back(d);
        ys.push_back(std::log(om));
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i]; sy += ys[i]; sxx += xs[i] * xs[i]; sxy += xs[i] * ys[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    CHECK_THAT(slope, WithinAbs(-2.0, 0.05));
}
