#include <catch2/catch_amalgamated.hpp>

#include "qcfold/model.hpp"

#include <random>

using namespace qcfold;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

std::mt19937_64 rng(20240815);

double urand(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

} // namespace

TEST_CASE("half-plane model basics", "[model]") {
    const Model m = half_plane_model(2.0);
    CHECK(m.disjoint_type);
    CHECK(m.tracts.size() == 1);
    CHECK_THAT(std::abs(m.tracts[0].tau(cplx{3, 0}) - cplx{1, 0}), WithinAbs(0.0, 1e-15));
    CHECK(m.tracts[0].contains(cplx{2.001, 50.0}));
    CHECK_FALSE(m.tracts[0].contains(cplx{1.999, 0.0}));

    // F(3) = e, F(3 + i pi) = -e.
    CHECK_THAT(std::abs(model_eval(m, cplx{3, 0}) - cplx{E_CONST, 0}), WithinAbs(0.0, 1e-15));
    CHECK_THAT(std::abs(model_eval(m, cplx{3, PI}) - cplx{-E_CONST, 0}), WithinAbs(0.0, 1e-12));

    // Frozen forward orbit of z = 3: exits the tract at step 3.
    cplx z{3, 0};
    z = model_eval(m, z);
    CHECK_THAT(z.real(), WithinAbs(2.718281828459045, 1e-14));
    z = model_eval(m, z);
    CHECK_THAT(z.real(), WithinAbs(2.050906372692501, 1e-13));
    z = model_eval(m, z);
    CHECK_THAT(z.real(), WithinAbs(1.052224371736312, 1e-13));
    CHECK_FALSE(m.tracts[0].contains(z));
    CHECK_THROWS_AS(model_eval(m, z), NumericalError);
}

TEST_CASE("model eval guards", "[model]") {
    const Model m = half_plane_model(2.0);
    CHECK_THROWS_AS(model_eval(m, cplx{0, 0}), NumericalError);
    CHECK_THROWS_AS(model_eval(m, cplx{800, 0}), NumericalError); // overflow cap
    CHECK_THROWS_AS(make_model("spiral", 1.0), ConfigError);
    CHECK_THROWS_AS(half_plane_model(-1.0), ConfigError);
}

TEST_CASE("sector model", "[model]") {
    const Model m = sector_model(2.0);
    CHECK_FALSE(m.disjoint_type); // origin sits on the tract boundary
    const Tract& t = m.tracts[0];
    CHECK_THAT(std::abs(t.tau(cplx{1, 0}) - cplx{1, 0}), WithinAbs(0.0, 1e-15));
    CHECK(t.contains(cplx{1.0, 0.3}));
    CHECK_FALSE(t.contains(cplx{0.0, 1.0}));
    CHECK_FALSE(t.contains(cplx{-1.0, 0.0}));

    // tau and its inverse are mutually inverse on the tract.
    for (int i = 0; i < 100; ++i) {
        const double r = urand(0.05, 8.0), a = urand(-0.24 * PI, 0.24 * PI);
        const cplx z = r * unit(a);
        REQUIRE(t.contains(z));
        CHECK_THAT(std::abs(t.tau_inv(t.tau(z)) - z), WithinAbs(0.0, 1e-12 * (1.0 + std::abs(z))));
        CHECK(t.tau(z).real() >= -1e-12); // image in the closed right half-plane
    }

    // Level sets: Re z^2 > 1 excludes the closed unit disk.
    CHECK(in_tract_level(t, cplx{1.2, 0.1}, 1.0));
    CHECK_FALSE(in_tract_level(t, cplx{0.9, 0.1}, 1.0));
}

TEST_CASE("paired half-planes model", "[model]") {
    const Model m = paired_half_planes_model(2.0);
    CHECK(m.disjoint_type);
    REQUIRE(m.tracts.size() == 2);
    CHECK_THAT(std::abs(m.tracts[1].tau(cplx{-3, 0}) - cplx{1, 0}), WithinAbs(0.0, 1e-15));
    CHECK(tract_containing(m, cplx{3, 1}).value() == 0);
    CHECK(tract_containing(m, cplx{-3, 1}).value() == 1);
    CHECK_FALSE(tract_containing(m, cplx{0, 0}).has_value());

    // The minus tract evaluates through its own chart.
    CHECK_THAT(std::abs(model_eval(m, cplx{-3, 0}) - cplx{E_CONST, 0}), WithinAbs(0.0, 1e-15));
}

TEST_CASE("boundary partition grid", "[model]") {
    const Model m = half_plane_model(2.0);
    const auto pts = boundary_partition(m, 0, 4);
    REQUIRE(pts.size() == 9);
    CHECK(pts.front().k == -4);
    CHECK(pts.back().k == 4);
    for (const auto& p : pts) {
        CHECK_THAT(p.z.real(), WithinAbs(3.0, 1e-15));
        CHECK_THAT(p.z.imag(), WithinAbs(TWO_PI * static_cast<double>(p.k), 1e-12));
    }
    CHECK_THROWS_AS(boundary_partition(m, 5, 4), ConfigError);
}

TEST_CASE("rescaling map L", "[model][rescale]") {
    // Frozen values at rho = 1/2.
    CHECK_THAT(rescale_L(0.2, 0.5), WithinAbs(0.2, 1e-15));
    CHECK_THAT(rescale_L(0.5, 0.5), WithinAbs(1.0, 1e-15));
    CHECK_THAT(rescale_L(1.0, 0.5), WithinAbs(2.0, 1e-15));
    CHECK_THAT(rescale_L(3.0, 0.5), WithinAbs(4.0, 1e-15));

    // rho = 1 is the identity.
    for (double x : {0.1, 0.5, 0.9, 1.0, 1.7, 2.0, 5.0})
        CHECK_THAT(rescale_L(x, 1.0), WithinAbs(x, 1e-15));

    for (double rho : {1.0, 0.7, 0.5, 0.25}) {
        // Continuity at the knots.
        for (double knot : {0.5 * rho, rho, 2.0 * rho}) {
            CHECK_THAT(rescale_L(knot - 1e-10, rho), WithinAbs(rescale_L(knot + 1e-10, rho), 1e-8));
        }
        // Monotone bijection with exact inverse.
        double prev = 0.0;
        for (int i = 1; i <= 500; ++i) {
            const double x = 0.02 * i;
            const double y = rescale_L(x, rho);
            CHECK(y > prev);
            prev = y;
            CHECK_THAT(rescale_L_inv(y, rho), WithinAbs(x, 1e-12));
        }
        // Level landmarks: rho/2 -> rho/2, rho -> 1, 2 rho -> 2.
        CHECK_THAT(rescale_L(0.5 * rho, rho), WithinAbs(0.5 * rho, 1e-15));
        CHECK_THAT(rescale_L(rho, rho), WithinAbs(1.0, 1e-14));
        CHECK_THAT(rescale_L(2.0 * rho, rho), WithinAbs(2.0, 1e-14));
    }

    CHECK_THROWS_AS(rescale_L(1.0, 1.5), ConfigError);
}

TEST_CASE("rescaling conjugation", "[model][rescale]") {
    // sigma at rho = 1/2 moves 3 + i to 4 + i.
    CHECK_THAT(std::abs(rescale_sigma(cplx{3, 1}, 0.5) - cplx{4, 1}), WithinAbs(0.0, 1e-15));

    // exp(sigma(w)) = phi(exp(w)) on the right half-plane.
    for (double rho : {1.0, 0.7, 0.5, 0.25}) {
        for (int i = 0; i < 200; ++i) {
            const cplx w{urand(0.01, 6.0), urand(-20.0, 20.0)};
            const cplx lhs = std::exp(rescale_sigma(w, rho));
            const cplx rhs = rescale_phi(std::exp(w), rho);
            CHECK_THAT(std::abs(lhs - rhs), WithinAbs(0.0, 1e-10 * (1.0 + std::abs(lhs))));
        }
    }

    // Hence F(psi(z)) = phi(F(z)) on every catalogue tract.
    for (const Model& m : {half_plane_model(2.0), sector_model(2.0), paired_half_planes_model(2.5)}) {
        for (double rho : {1.0, 0.5, 0.25}) {
            for (int i = 0; i < 100; ++i) {
                const std::size_t j = i % m.tracts.size();
                const cplx w{urand(0.02, 5.0), urand(-15.0, 15.0)};
                const cplx z = m.tracts[j].tau_inv(w);
                REQUIRE(m.tracts[j].contains(z));
                const cplx lhs = model_eval(m, rescale_psi(m, z, rho));
                const cplx rhs = rescale_phi(model_eval(m, z), rho);
                CHECK_THAT(std::abs(lhs - rhs), WithinAbs(0.0, 1e-9 * (1.0 + std::abs(lhs))));
            }
        }
    }
}

TEST_CASE("rescaling fixes the small levels", "[model][rescale]") {
    const Model m = half_plane_model(2.0);
    for (double rho : {0.7, 0.5, 0.25}) {
        // Identity off Omega(rho/2) and off the tracts entirely.
        const cplx inside_low = m.tracts[0].tau_inv(cplx{0.4 * rho, 3.0});
        CHECK_THAT(std::abs(rescale_psi(m, inside_low, rho) - inside_low), WithinAbs(0.0, 1e-15));
        const cplx outside{0.0, 1.0};
        CHECK_THAT(std::abs(rescale_psi(m, outside, rho) - outside), WithinAbs(0.0, 1e-15));

        // phi is the identity on the disk of radius e^{rho/2}.
        const cplx small_w = 0.9 * std::exp(0.5 * rho) * unit(1.3);
        CHECK_THAT(std::abs(rescale_phi(small_w, rho) - small_w), WithinAbs(0.0, 1e-15));

        // phi . phi^{-1} = id.
        for (int i = 0; i < 100; ++i) {
            const cplx w = urand(0.1, 40.0) * unit(urand(0.0, TWO_PI));
            CHECK_THAT(std::abs(rescale_phi_inv(rescale_phi(w, rho), rho) - w),
                       WithinAbs(0.0, 1e-12 * (1.0 + std::abs(w))));
        }
    }
}
