#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "sslr/cavity.hpp"
#include "sslr/rng.hpp"

using namespace sslr;

namespace {

const CavityGeometry geom_a{0.05027, 0.05, 0.05041, 0.05, 4.32};
const CavityGeometry geom_b{0.0452, 0.045, 0.05535, 0.055, 3.0};

double max_abs(const Mat2& m) {
    return std::max({std::fabs(m.a), std::fabs(m.b), std::fabs(m.c), std::fabs(m.d)});
}

} // namespace

TEST_CASE("layout accessors derive the axial positions", "[cavity]") {
    CHECK(geom_a.z_l1() == Catch::Approx(0.05027).epsilon(1e-15));
    CHECK(geom_a.z_g() == Catch::Approx(0.10027).epsilon(1e-15));
    CHECK(geom_a.z_l2() == Catch::Approx(0.05027 + 0.05 + 4.32 + 0.05).epsilon(1e-15));
    CHECK(geom_a.z_m2() == Catch::Approx(geom_a.z_l2() + 0.05041).epsilon(1e-15));

    const CavityGeometry moved = geom_a.at_distance(2.0);
    CHECK(moved.d == 2.0);
    CHECK(moved.l1 == geom_a.l1);
}

TEST_CASE("validity requires positive lengths", "[cavity]") {
    CHECK(geom_a.valid());
    CHECK(!CavityGeometry{0.0, 0.05, 0.05, 0.05, 1.0}.valid());
    CHECK(!CavityGeometry{0.05, -0.05, 0.05, 0.05, 1.0}.valid());
    CHECK(CavityGeometry{0.05, 0.05, 0.05, 0.05, 0.0}.valid());
    CHECK_THROWS_AS(require_valid(CavityGeometry{}), std::invalid_argument);
    CHECK_THROWS_AS(sslr_single_pass(CavityGeometry{}), std::invalid_argument);
}

TEST_CASE("closed-form single-pass elements match frozen references", "[cavity]") {
    const Mat2 m = sslr_single_pass_closed(geom_a);
    CHECK(m.a == Catch::Approx(-0.29152000000000555).epsilon(1e-12));
    CHECK(m.b == Catch::Approx(-0.0004887103999990927).epsilon(1e-9));
    CHECK(m.c == Catch::Approx(1727.9999999999998).epsilon(1e-12));
    CHECK(m.d == Catch::Approx(-0.533440000000013).epsilon(1e-12));

    const Mat2 mb = sslr_single_pass_closed(geom_b);
    CHECK(mb.a == Catch::Approx(-0.7979797979798064).epsilon(1e-12));
    CHECK(mb.b == Catch::Approx(-0.0004459595959587226).epsilon(1e-9));
    CHECK(mb.c == Catch::Approx(1212.1212121212122).epsilon(1e-12));
    CHECK(mb.d == Catch::Approx(-0.5757575757575779).epsilon(1e-12));
}

TEST_CASE("matrix product agrees with the closed form", "[cavity]") {
    for (std::uint64_t t = 0; t < 500; ++t) {
        const CavityGeometry g{rng::uniform_in(11, 1, t, 0, 0.02, 0.08),
                               rng::uniform_in(11, 1, t, 1, 0.02, 0.08),
                               rng::uniform_in(11, 1, t, 2, 0.02, 0.08),
                               rng::uniform_in(11, 1, t, 3, 0.02, 0.08),
                               rng::uniform_in(11, 1, t, 4, 0.0, 6.0)};
        const Mat2 prod = sslr_single_pass(g);
        const Mat2 closed = sslr_single_pass_closed(g);
        const double scale = std::max(1.0, max_abs(closed));
        CHECK(std::fabs(prod.a - closed.a) <= 1e-12 * scale);
        CHECK(std::fabs(prod.b - closed.b) <= 1e-12 * scale);
        CHECK(std::fabs(prod.c - closed.c) <= 1e-12 * scale);
        CHECK(std::fabs(prod.d - closed.d) <= 1e-12 * scale);
        CHECK(std::fabs(prod.det() - 1.0) <= 1e-9);
    }
}

TEST_CASE("stability product factorization", "[cavity]") {
    CHECK(stability_product(geom_a) == Catch::Approx(0.15550842879999918).epsilon(1e-12));
    CHECK(stability_product(geom_b) == Catch::Approx(0.4594429139883727).epsilon(1e-12));

    // The factored product is g1*.g2* of the single-pass matrix.
    for (const CavityGeometry& g : {geom_a, geom_b}) {
        const Mat2 m = sslr_single_pass_closed(g);
        CHECK(stability_product(g) == Catch::Approx(m.a * m.d).margin(1e-12));
    }

    // Zero separation is marginal for every geometry (up to rounding in the
    // factored quotient).
    CHECK(stability_product(geom_a.at_distance(0.0)) == Catch::Approx(1.0).margin(1e-12));
    CHECK(stability_product(geom_b.at_distance(0.0)) == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("stability classification", "[cavity]") {
    const StabilityReport rep = stability(geom_a);
    CHECK(rep.stable);
    CHECK(rep.g1_star == Catch::Approx(-0.29152000000000555).epsilon(1e-12));
    CHECK(rep.g2_star == Catch::Approx(-0.533440000000013).epsilon(1e-12));
    CHECK(rep.l_star == Catch::Approx(-0.0004887103999990927).epsilon(1e-9));
    CHECK(rep.product == Catch::Approx(0.15550842879999918).epsilon(1e-12));

    CHECK(!stability(geom_a.at_distance(0.0)).stable);
    // Between the two zeros of the product the resonator is unstable.
    CHECK(!stability(geom_a.at_distance(7.0)).stable);
}

TEST_CASE("range stability holds for the reference design", "[cavity]") {
    CHECK(stable_over_range(geom_a, 0.0, 6.0));
    CHECK(stable_over_range(geom_a, 0.001, 6.0));
    CHECK(stable_over_range(geom_b, 0.0, 6.0));
    CHECK(stable_over_range(geom_a, 4.32, 4.32));
}

TEST_CASE("range stability rejects marginal interiors and bad ranges", "[cavity]") {
    // l = f on both sides keeps the product at 1 for every distance, so any
    // range wider than the zero point must fail.
    const CavityGeometry marginal{0.05, 0.05, 0.05, 0.05, 0.0};
    CHECK(!stable_over_range(marginal, 0.0, 6.0));
    // The marginal allowance applies to d = 0 only as the open end of a wider
    // range; the degenerate range at zero is judged by the strict condition.
    CHECK(!stable_over_range(geom_a, 0.0, 0.0));

    CHECK_THROWS_AS(stable_over_range(geom_a, -0.1, 6.0), std::invalid_argument);
    CHECK_THROWS_AS(stable_over_range(geom_a, 3.0, 2.0), std::invalid_argument);
}

TEST_CASE("vertex check catches excursions narrower than the probe grid", "[cavity]") {
    // Offsets placed so the product dips below zero only for
    // d in (3.0005, 3.0095), a window lying strictly between two probe points
    // of the 601-point scan over [0, 6].
    const double f = 0.05;
    const CavityGeometry sliver{f + f * f / 3.0005, f, f + f * f / 3.0095, f, 6.0};
    const double p_lo = stability_product(sliver.at_distance(3.00));
    const double p_hi = stability_product(sliver.at_distance(3.01));
    REQUIRE(p_lo > 0.0);
    REQUIRE(p_hi > 0.0);
    REQUIRE(stability_product(sliver.at_distance(3.005)) < 0.0);

    CHECK(!stable_over_range(sliver, 0.0, 6.0));
}

TEST_CASE("range stability finds wide unstable windows", "[cavity]") {
    // A long first spacing drives the product negative well inside the range.
    const CavityGeometry unstable{0.052, 0.05, 0.05041, 0.05, 6.0};
    CHECK(!stable_over_range(unstable, 0.0, 6.0));
}
