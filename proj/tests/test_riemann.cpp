// Tests for the zipper uniformisation of the off-tract region W.
//
// Two catalogue models admit closed-form disk maps, and both are used as
// oracles here:
//
//   half_plane(2):   W = {Re z < 3},   Psi*(z) = z / (6 - z)
//   paired(2):       W = {|Re z| < 3}, Psi*(z) = tan(pi z / 12)
//
// Both fix 0 and have positive derivative there (1/6 and pi/12), matching
// the normalisation the builder enforces.  Everything else is property
// testing: inverse roundtrips, boundary monotonicity, reflection across the
// level-1 interface, and input validation.

#include "qcfold/model.hpp"
#include "qcfold/riemann.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

using namespace qcfold;

namespace {

cplx half_plane_oracle(cplx z) { return z / (6.0 - z); }

cplx strip_oracle(cplx z) { return std::tan(PI * z / 12.0); }

} // namespace

TEST_CASE("half-plane uniformisation matches the closed-form map", "[riemann]") {
    const Model m = half_plane_model(2.0);
    const RiemannMap map = build_riemann_map(m);

    CHECK(std::abs(map.eval(cplx{0.0, 0.0})) == 0.0);

    // Positive real derivative at the origin (oracle slope 1/6).
    const cplx d = map.eval(cplx{1e-3, 0.0});
    CHECK(d.real() > 1.5e-4);
    CHECK(std::abs(d - half_plane_oracle(cplx{1e-3, 0.0})) < 1e-8);

    double sup = 0.0, round = 0.0;
    for (double x = -20.0; x <= 2.5; x += 1.5) {
        for (double y = -20.0; y <= 20.0; y += 1.6) {
            const cplx z{x, y};
            const cplx w = map.eval(z);
            sup = std::max(sup, std::abs(w - half_plane_oracle(z)));
            round = std::max(round, std::abs(map.eval_inverse(w) - z));
        }
    }
    CHECK(sup < 1e-3);   // accuracy budget for downstream consumers
    CHECK(sup < 2e-5);   // current behaviour, with margin
    CHECK(round < 1e-8);
}

TEST_CASE("paired strip matches the tangent oracle", "[riemann]") {
    const Model m = paired_half_planes_model(2.0);
    const RiemannMap map = build_riemann_map(m);

    CHECK(std::abs(map.eval(cplx{0.0, 0.0})) == 0.0);
    CHECK(std::abs(map.eval(cplx{2.0, 0.0}) - std::tan(PI / 6.0)) < 5e-5);
    CHECK(std::abs(map.eval(cplx{0.0, 1.0}) - cplx{0.0, std::tanh(PI / 12.0)}) < 5e-5);

    double sup = 0.0, round = 0.0, odd = 0.0;
    for (double x = -2.5; x <= 2.5; x += 0.5) {
        for (double y = -12.0; y <= 12.0; y += 1.0) {
            const cplx z{x, y};
            const cplx w = map.eval(z);
            sup = std::max(sup, std::abs(w - strip_oracle(z)));
            round = std::max(round, std::abs(map.eval_inverse(w) - z));
            odd = std::max(odd, std::abs(map.eval(-z) + w));
        }
    }
    CHECK(sup < 1e-3);
    CHECK(sup < 1e-4);
    CHECK(round < 1e-8);
    CHECK(odd < 1e-5);   // the strip and the normalisation are both odd
}

TEST_CASE("zipper inverse unwinds the chain exactly", "[riemann]") {
    std::mt19937_64 rng(20240815);
    std::uniform_real_distribution<double> uni(0.0, 1.0);

    for (const char* kind : {"half_plane", "sector", "paired_half_planes"}) {
        const Model m = make_model(kind, 2.0);
        const RiemannMap map = build_riemann_map(m);
        INFO("model " << m.name);

        // Disk -> W -> disk.
        double worst = 0.0;
        for (int i = 0; i < 200; ++i) {
            const double r = 0.9 * std::sqrt(uni(rng));
            const double t = TWO_PI * uni(rng);
            const cplx d = r * unit(t);
            const cplx z = map.eval_inverse(d);
            worst = std::max(worst, std::abs(map.eval(z) - d));
        }
        CHECK(worst < 1e-9);
    }
}

TEST_CASE("boundary parametrisation is monotone and tract-contiguous", "[riemann]") {
    const Model m = half_plane_model(2.0);
    const RiemannMap map = build_riemann_map(m);
    const auto arcs = pushforward_partition(map, 8);

    REQUIRE(arcs.size() == 16);
    for (std::size_t i = 0; i < arcs.size(); ++i) {
        CHECK(arcs[i].hi >= arcs[i].lo);
        if (i > 0) CHECK(arcs[i].lo == Catch::Approx(arcs[i - 1].hi));
    }
    // One boundary line cannot wrap the whole circle: the neighbourhood of
    // infinity occupies the remaining angular gap.
    CHECK(pushforward_span(arcs, 0) < TWO_PI - 0.1);

    // Spot-check angles against the oracle's boundary values.
    for (double y : {0.0, TWO_PI, 50.0}) {
        const double got = boundary_angle(map, 0, y);
        const double want = std::arg(half_plane_oracle(cplx{3.0, y}));
        CHECK(std::fabs(wrap_pm(got - want)) < 1e-4);
    }
}

TEST_CASE("both strip walls appear in the pushforward", "[riemann]") {
    const Model m = paired_half_planes_model(2.0);
    const RiemannMap map = build_riemann_map(m);
    const auto arcs = pushforward_partition(map, 8);

    REQUIRE(arcs.size() == 32);
    double total = 0.0;
    for (std::size_t j = 0; j < 2; ++j) {
        const double span = pushforward_span(arcs, j);
        CHECK(span > 1.0);
        CHECK(span < TWO_PI);
        total += span;
    }
    // The two walls jointly surround W, so their spans nearly tile the
    // circle; the leftover is the exponentially thin pair of cusp gaps.
    CHECK(total < TWO_PI + 1e-9);
    CHECK(total > TWO_PI - 1e-3);
}

TEST_CASE("reflection extension is continuous across the interface", "[riemann]") {
    for (const char* kind : {"half_plane", "paired_half_planes"}) {
        const Model m = make_model(kind, 2.0);
        const RiemannMap map = build_riemann_map(m);
        INFO("model " << m.name);

        const double delta = 1e-5;
        for (double y : {-7.0, 0.0, 1.3, 9.0}) {
            const cplx inner = m.tracts[0].tau_inv(cplx{1.0 - delta, y});
            const cplx outer = m.tracts[0].tau_inv(cplx{1.0 + delta, y});
            const cplx a = reflect_extend(map, m, inner);
            const cplx b = reflect_extend(map, m, outer);
            CHECK(std::abs(a - b) < 1e-3);
            CHECK(std::abs(a) < 1.0);
            CHECK(std::abs(b) > 1.0);
        }
        CHECK_THROWS_AS(reflect_extend(map, m, m.tracts[0].tau_inv(cplx{2.5, 0.0})),
                        NumericalError);
    }
}

TEST_CASE("construction rejects unusable input", "[riemann]") {
    RiemannOptions coarse;
    coarse.resolution = 8;
    CHECK_THROWS_AS(build_riemann_map(half_plane_model(2.0), coarse), ConfigError);

    // A tract whose level-1 part covers the origin leaves no basepoint for
    // the normalisation.
    Model bad;
    bad.name = "bad";
    bad.kind = "half_plane";
    bad.param = -3.0;
    bad.disjoint_type = false;
    Tract t;
    t.label = "plus";
    t.tau = [](cplx z) { return z + 3.0; };
    t.tau_inv = [](cplx w) { return w - 3.0; };
    t.contains = [](cplx z) { return z.real() > -3.0; };
    bad.tracts.push_back(t);
    CHECK_THROWS_AS(build_riemann_map(bad), ConfigError);
}

TEST_CASE("sector complement maps into the disk", "[riemann]") {
    const Model m = sector_model(2.0);
    const RiemannMap map = build_riemann_map(m);

    CHECK(std::abs(map.eval(cplx{0.0, 0.0})) == 0.0);

    double round = 0.0;
    for (cplx z : {cplx{-1.0, 0.0}, cplx{0.0, 2.0}, cplx{-3.0, 0.5}, cplx{0.2, 0.0},
                   cplx{0.0, -4.0}, cplx{-10.0, -10.0}}) {
        const cplx w = map.eval(z);
        CHECK(std::abs(w) < 1.0);
        round = std::max(round, std::abs(map.eval_inverse(w) - z));
    }
    CHECK(round < 1e-8);

    const auto arcs = pushforward_partition(map, 8);
    CHECK(pushforward_span(arcs, 0) < TWO_PI);
}

TEST_CASE("rebuilding from the same input is bit-identical", "[riemann]") {
    const Model m = half_plane_model(2.0);
    const RiemannMap a = build_riemann_map(m);
    const RiemannMap b = build_riemann_map(m);
    REQUIRE(a.steps.size() == b.steps.size());
    CHECK(a.q == b.q);
    CHECK(a.rot == b.rot);
    for (cplx z : {cplx{1.0, 1.0}, cplx{-5.0, 2.0}, cplx{2.9, -40.0}})
        CHECK(a.eval(z) == b.eval(z));
}
