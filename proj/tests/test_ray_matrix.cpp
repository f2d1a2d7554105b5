#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "sslr/ray_matrix.hpp"
#include "sslr/rng.hpp"

using namespace sslr;

namespace {

double max_abs(const Mat2& m) {
    return std::max({std::fabs(m.a), std::fabs(m.b), std::fabs(m.c), std::fabs(m.d)});
}

} // namespace

TEST_CASE("primitive matrices have the standard forms", "[ray_matrix]") {
    const Mat2 fs = free_space(0.25);
    CHECK(fs.a == 1.0);
    CHECK(fs.b == 0.25);
    CHECK(fs.c == 0.0);
    CHECK(fs.d == 1.0);

    const Mat2 tl = thin_lens(0.05);
    CHECK(tl.a == 1.0);
    CHECK(tl.b == 0.0);
    CHECK(tl.c == Catch::Approx(-20.0).epsilon(1e-15));
    CHECK(tl.d == 1.0);

    const Mat2 pm = plane_mirror();
    CHECK(pm.a == 1.0);
    CHECK(pm.b == 0.0);
    CHECK(pm.c == 0.0);
    CHECK(pm.d == 1.0);

    const Mat2 tcr = tcr_matrix();
    CHECK(tcr.a == -1.0);
    CHECK(tcr.b == 0.0);
    CHECK(tcr.c == 0.0);
    CHECK(tcr.d == -1.0);
}

TEST_CASE("primitives reject non-physical arguments", "[ray_matrix]") {
    CHECK_THROWS_AS(free_space(-0.01), std::invalid_argument);
    CHECK_THROWS_AS(thin_lens(0.0), std::invalid_argument);
    CHECK_THROWS_AS(compose({}), std::invalid_argument);
    CHECK_NOTHROW(free_space(0.0));
    CHECK_NOTHROW(thin_lens(-0.05));
}

TEST_CASE("compose applies elements in traversal order", "[ray_matrix]") {
    // A ray through free space then a lens: the lens must act on the
    // displaced ray, which distinguishes the two multiplication orders.
    const Mat2 path = compose({free_space(0.1), thin_lens(0.05)});
    const Ray in{1e-3, 0.0};
    const Ray out = trace_ray(path, in);
    CHECK(out.r == Catch::Approx(1e-3).epsilon(1e-12));
    CHECK(out.alpha == Catch::Approx(-1e-3 / 0.05).epsilon(1e-12));

    const Mat2 manual = thin_lens(0.05) * free_space(0.1);
    CHECK(path.a == Catch::Approx(manual.a).margin(1e-15));
    CHECK(path.b == Catch::Approx(manual.b).margin(1e-15));
    CHECK(path.c == Catch::Approx(manual.c).margin(1e-15));
    CHECK(path.d == Catch::Approx(manual.d).margin(1e-15));
}

TEST_CASE("determinant stays unit across random compositions", "[ray_matrix]") {
    for (std::uint64_t trial = 0; trial < 200; ++trial) {
        std::vector<Mat2> elems;
        const int n = 2 + static_cast<int>(rng::uniform(7, 1, trial, 0) * 6);
        for (int k = 0; k < n; ++k) {
            const double pick = rng::uniform(7, 2, trial, static_cast<std::uint64_t>(k));
            const double len = rng::uniform_in(7, 3, trial, static_cast<std::uint64_t>(k),
                                               0.0, 2.0);
            const double foc = rng::uniform_in(7, 4, trial, static_cast<std::uint64_t>(k),
                                               0.02, 0.4);
            if (pick < 0.5)
                elems.push_back(free_space(len));
            else if (pick < 0.8)
                elems.push_back(thin_lens(foc));
            else
                elems.push_back(plane_mirror());
        }
        const Mat2 m = compose(elems);
        CHECK(std::fabs(m.det() - 1.0) <= 1e-9);
    }
}

TEST_CASE("focusing retroreflector reduces to its closed form", "[ray_matrix]") {
    const double f = 0.05, l = 0.0503;
    const Mat2 m = ftcr_matrix(f, l);
    const double scale = std::max(1.0, max_abs(m));
    CHECK(std::fabs(m.a - (-1.0)) <= 1e-12 * scale);
    CHECK(std::fabs(m.b) <= 1e-12 * scale);
    CHECK(std::fabs(m.c - 2.0 * (l - f) / (f * f)) <= 1e-9 * scale);
    CHECK(std::fabs(m.d - (-1.0)) <= 1e-12 * scale);
    CHECK(std::fabs(m.det() - 1.0) <= 1e-12);

    // Frozen reference for the c element at these arguments.
    CHECK(m.c == Catch::Approx(0.23999999999999572).margin(1e-12));
}

TEST_CASE("FTCR equals a thin lens followed by an ideal retroreflector", "[ray_matrix]") {
    const double f = 0.05;
    for (double l : {0.0495, 0.05, 0.0503, 0.052}) {
        const Mat2 full = ftcr_matrix(f, l);
        const Mat2 eq = ftcr_equivalent(f, l);
        const double scale = std::max(1.0, max_abs(full));
        CHECK(std::fabs(full.a - eq.a) <= 1e-9 * scale);
        CHECK(std::fabs(full.b - eq.b) <= 1e-9 * scale);
        CHECK(std::fabs(full.c - eq.c) <= 1e-9 * scale);
        CHECK(std::fabs(full.d - eq.d) <= 1e-9 * scale);
    }
}

TEST_CASE("FTCR equivalent focal length", "[ray_matrix]") {
    CHECK(ftcr_equivalent_focal(0.05, 0.0503) ==
          Catch::Approx(4.166666666666741).epsilon(1e-12));
    CHECK(ftcr_equivalent_focal(0.05, 0.0497) < 0.0);
    CHECK_THROWS_AS(ftcr_equivalent_focal(0.05, 0.05), std::domain_error);

    // At l = f the device degenerates to the ideal corner reflector.
    const Mat2 at_focus = ftcr_matrix(0.05, 0.05);
    CHECK(std::fabs(at_focus.a + 1.0) <= 1e-12);
    CHECK(std::fabs(at_focus.b) <= 1e-12);
    CHECK(std::fabs(at_focus.c) <= 1e-9);
    CHECK(std::fabs(at_focus.d + 1.0) <= 1e-12);
}

TEST_CASE("ray tracing applies displacement and slope", "[ray_matrix]") {
    const Ray in{2e-3, -1e-3};
    const Ray through = trace_ray(free_space(1.5), in);
    CHECK(through.r == Catch::Approx(2e-3 - 1.5e-3).epsilon(1e-12));
    CHECK(through.alpha == Catch::Approx(-1e-3).epsilon(1e-12));

    const Ray inverted = trace_ray(tcr_matrix(), in);
    CHECK(inverted.r == Catch::Approx(-2e-3).epsilon(1e-12));
    CHECK(inverted.alpha == Catch::Approx(1e-3).epsilon(1e-12));
}
