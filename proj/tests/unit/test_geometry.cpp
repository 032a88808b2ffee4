#include <doctest.h>

#include <vector>

#include "gazescreen/error.hpp"
#include "gazescreen/geometry.hpp"
#include "gazescreen/rng.hpp"
#include "oracles.hpp"

using namespace gazescreen;

TEST_CASE("default geometry") {
    const ViewingGeometry g;
    CHECK(g.pixel_pitch_mm() == doctest::Approx(0.282).epsilon(1e-12));
    CHECK_NOTHROW(validate(g));
}

TEST_CASE("degrees to pixels against the series oracle") {
    const ViewingGeometry g;
    CHECK(degrees_to_pixels(0.0, g) == 0.0);

    const double one = degrees_to_pixels(1.0, g);
    CHECK(one == doctest::Approx(oracle::deg_to_px(1.0, 600.0, 0.282)).epsilon(1e-12));
    CHECK(one == doctest::Approx(37.14).epsilon(1e-3));

    const double ten = degrees_to_pixels(10.0, g);
    CHECK(ten == doctest::Approx(oracle::deg_to_px(10.0, 600.0, 0.282)).epsilon(1e-12));
    CHECK(ten == doctest::Approx(372.3).epsilon(1e-3));
    // Ten times the one-degree size is off by a fraction of a percent.
    CHECK(std::abs(ten - 10.0 * one) / ten < 0.01);
}

TEST_CASE("pixels to degrees against the series oracle") {
    const ViewingGeometry g;
    CHECK(pixels_to_degrees(0.0, g) == 0.0);
    CHECK(pixels_to_degrees(37.14, g) == doctest::Approx(1.0).epsilon(1e-3));
    const double full = pixels_to_degrees(1680.0, g);
    CHECK(full == doctest::Approx(oracle::px_to_deg(1680.0, 600.0, 0.282)).epsilon(1e-12));
    CHECK(full == doctest::Approx(43.1).epsilon(1e-3));
    CHECK(pixels_to_degrees(400.0, g) == doctest::Approx(10.75).epsilon(1e-3));
}

TEST_CASE("conversions are mutual inverses on [0, 45] degrees") {
    const ViewingGeometry g;
    for (int i = 0; i <= 450; ++i) {
        const double deg = i * 0.1;
        const double back = pixels_to_degrees(degrees_to_pixels(deg, g), g);
        if (deg == 0.0) {
            CHECK(back == 0.0);
        } else {
            REQUIRE(std::abs(back - deg) / deg < 1e-9);
        }
    }
}

TEST_CASE("degrees to pixels is increasing") {
    const ViewingGeometry g;
    double prev = -1.0;
    for (int i = 0; i <= 100; ++i) {
        const double px = degrees_to_pixels(i * 0.45, g);
        REQUIRE(px > prev);
        prev = px;
    }
}

TEST_CASE("invalid geometry") {
    ViewingGeometry g;
    g.viewing_distance_mm = 0.0;
    CHECK_THROWS_AS(degrees_to_pixels(1.0, g), Error);
    ViewingGeometry stretched;
    stretched.screen_height_mm = 320.0;  // 8% off square pixels
    try {
        validate(stretched);
        FAIL("expected InvalidGeometry");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidGeometry);
    }
}

TEST_CASE("dispersion") {
    const std::vector<Point> single{{3.0, 4.0}};
    CHECK(dispersion(single) == 0.0);
    const std::vector<Point> pair{{0.0, 0.0}, {10.0, 5.0}};
    CHECK(dispersion(pair) == 15.0);
    CHECK_THROWS_AS(dispersion(std::vector<Point>{}), Error);
}

TEST_CASE("dispersion of a boxed cloud, translation and inclusion") {
    Pcg64 rng(17);
    std::vector<Point> pts{{100.0, 200.0}, {130.0, 220.0}, {100.0, 220.0}, {130.0, 200.0}};
    while (pts.size() < 100) pts.push_back({rng.uniform(100.0, 130.0), rng.uniform(200.0, 220.0)});

    // Brute-force scan.
    double x0 = 1e9, x1 = -1e9, y0 = 1e9, y1 = -1e9;
    for (const auto& p : pts) {
        x0 = std::min(x0, p.x);
        x1 = std::max(x1, p.x);
        y0 = std::min(y0, p.y);
        y1 = std::max(y1, p.y);
    }
    CHECK(dispersion(pts) == (x1 - x0) + (y1 - y0));
    CHECK(dispersion(pts) == 50.0);

    auto shifted = pts;
    for (auto& p : shifted) {
        p.x += 256.0;
        p.y -= 64.0;
    }
    CHECK(dispersion(shifted) == dispersion(pts));

    std::vector<Point> growing;
    double prev = 0.0;
    for (int i = 0; i < 200; ++i) {
        growing.push_back({rng.uniform(0.0, 500.0), rng.uniform(0.0, 500.0)});
        const double d = dispersion(growing);
        REQUIRE(d >= prev);
        prev = d;
    }
}
