// test_pattern.cpp - rotation, translation and cross construction.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "crosslocate/errors.hpp"
#include "crosslocate/pattern.hpp"
#include "test_util.hpp"

using namespace crosslocate;

namespace {

PointPattern random_pattern(unsigned seed, int n) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-50.0, 50.0);
    PointPattern p;
    for (int i = 0; i < n; ++i)
        p.points.push_back(Point3{u(rng), u(rng), u(rng)});
    return p;
}

} // namespace

TEST_CASE("rotate: zero angle is the identity") {
    const PointPattern p = random_pattern(1, 12);
    const PointPattern q = rotate(p, 0.0);
    for (std::size_t i = 0; i < p.size(); ++i) {
        CHECK(q.points[i].x == p.points[i].x);
        CHECK(q.points[i].y == p.points[i].y);
        CHECK(q.points[i].z == p.points[i].z);
    }
}

TEST_CASE("rotate: quarter turn about the center") {
    PointPattern p;
    p.points = {Point3{0, 0, 0}, Point3{1, 0, 5}};
    const PointPattern q = rotate(p, M_PI / 2);
    CHECK(q.points[1].x == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(q.points[1].y == doctest::Approx(1.0));
    CHECK(q.points[1].z == 5.0);
    CHECK(q.points[0].x == 0.0);
    CHECK(q.points[0].y == 0.0);
}

TEST_CASE("rotate: inverse rotation restores the pattern") {
    const PointPattern p = random_pattern(2, 41);
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> a(-6.0, 6.0);
    for (int t = 0; t < 20; ++t) {
        const double theta = a(rng);
        const PointPattern q = rotate(rotate(p, theta), -theta);
        for (std::size_t i = 0; i < p.size(); ++i) {
            CHECK(std::fabs(q.points[i].x - p.points[i].x) <= 1e-12);
            CHECK(std::fabs(q.points[i].y - p.points[i].y) <= 1e-12);
            CHECK(q.points[i].z == p.points[i].z);
        }
    }
}

TEST_CASE("rotate: preserves pairwise xy distances and all z exactly") {
    const PointPattern p = random_pattern(4, 25);
    const PointPattern q = rotate(p, 1.2345);
    for (std::size_t i = 0; i < p.size(); ++i) {
        CHECK(q.points[i].z == p.points[i].z);
        for (std::size_t j = i + 1; j < p.size(); ++j) {
            const double dp = dist_xy(p.points[i], p.points[j]);
            const double dq = dist_xy(q.points[i], q.points[j]);
            CHECK(dq == doctest::Approx(dp).epsilon(1e-9));
        }
    }
    CHECK_THROWS_AS(rotate(PointPattern{}, 0.1), std::invalid_argument);
}

TEST_CASE("translate_xy: identity, inverse, centroid shift") {
    const PointPattern p = random_pattern(5, 17);
    const PointPattern same = translate_xy(p, 0.0, 0.0);
    for (std::size_t i = 0; i < p.size(); ++i) {
        CHECK(same.points[i].x == p.points[i].x);
        CHECK(same.points[i].y == p.points[i].y);
    }
    const PointPattern back = translate_xy(translate_xy(p, 400.0, -400.0), -400.0, 400.0);
    for (std::size_t i = 0; i < p.size(); ++i) {
        CHECK(std::fabs(back.points[i].x - p.points[i].x) <= 1e-12);
        CHECK(std::fabs(back.points[i].y - p.points[i].y) <= 1e-12);
        CHECK(back.points[i].z == p.points[i].z);
    }
    double cx0 = 0, cy0 = 0, cx1 = 0, cy1 = 0;
    const PointPattern moved = translate_xy(p, 3.5, -2.25);
    for (std::size_t i = 0; i < p.size(); ++i) {
        cx0 += p.points[i].x;
        cy0 += p.points[i].y;
        cx1 += moved.points[i].x;
        cy1 += moved.points[i].y;
    }
    const double n = static_cast<double>(p.size());
    CHECK((cx1 - cx0) / n == doctest::Approx(3.5).epsilon(1e-12));
    CHECK((cy1 - cy0) / n == doctest::Approx(-2.25).epsilon(1e-12));
}

TEST_CASE("bearing_direction: anti-clockwise from North, +90 deg steps") {
    double ux, uy;
    bearing_direction(0.0, ux, uy); // North
    CHECK(ux == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(uy == doctest::Approx(1.0));
    bearing_direction(90.0, ux, uy); // West
    CHECK(ux == doctest::Approx(-1.0));
    CHECK(uy == doctest::Approx(0.0).epsilon(1e-15));
    bearing_direction(270.0, ux, uy); // East
    CHECK(ux == doctest::Approx(1.0));

    // Consecutive arms differ by an exact +90 anti-clockwise turn:
    // dir(a+90) = (-dir_y(a), dir_x(a)).
    std::mt19937 rng(6);
    std::uniform_real_distribution<double> a(0.0, 360.0);
    for (int t = 0; t < 50; ++t) {
        const double alpha = a(rng);
        double x0, y0, x1, y1;
        bearing_direction(alpha, x0, y0);
        bearing_direction(alpha + 90.0, x1, y1);
        CHECK(x1 == doctest::Approx(-y0).epsilon(1e-12));
        CHECK(y1 == doctest::Approx(x0).epsilon(1e-12));
    }
}

TEST_CASE("build_cross: axis-aligned arms land exactly on nodes") {
    const DemCloud dem = testutil::make_grid(31, 31, 1.0, 0, 0, [](double x, double y) {
        return 2.0 * x + 0.5 * y;
    });
    CrossSpec spec;
    spec.center = Point3{15.0, 15.0, 0.0};
    spec.arm_length_points = 5;
    spec.spacing = 1.0;
    spec.first_arm_angle_deg = 0.0;
    spec.n_arms = 4;
    const PointPattern cross = build_cross(dem, spec);
    REQUIRE(cross.points.size() == 21);
    REQUIRE(cross.arms.size() == 4);
    CHECK(cross.points[0].x == 15.0);
    CHECK(cross.points[0].y == 15.0);
    CHECK(cross.points[0].z == dem.val_z(15.0, 15.0));
    // Arm 1 heads North: (15, 15+k).
    for (int k = 1; k <= 5; ++k) {
        CHECK(cross.points[k].x == 15.0);
        CHECK(cross.points[k].y == 15.0 + k);
    }
    // Arm 2 heads West, arm 3 South, arm 4 East.
    CHECK(cross.points[6].x == 14.0);
    CHECK(cross.points[6].y == 15.0);
    CHECK(cross.points[11].y == 14.0);
    CHECK(cross.points[16].x == 16.0);
    // Arm layout covers 1..20 in order.
    for (int a = 0; a < 4; ++a)
        for (int k = 0; k < 5; ++k)
            CHECK(cross.arms[a][k] == 1 + a * 5 + k);
}

TEST_CASE("build_cross: heights follow an analytic plane for any bearing") {
    const double pa = 0.75, pb = -0.3;
    const DemCloud dem = testutil::make_grid(64, 64, 1.0, 0, 0, [&](double x, double y) {
        return pa * x + pb * y;
    });
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> a(0.0, 360.0);
    for (int t = 0; t < 5; ++t) {
        CrossSpec spec;
        spec.center = Point3{31.3, 32.7, 0.0};
        spec.arm_length_points = 20;
        spec.first_arm_angle_deg = a(rng);
        const PointPattern cross = build_cross(dem, spec);
        for (const auto& p : cross.points)
            CHECK(p.z == doctest::Approx(pa * p.x + pb * p.y).epsilon(1e-12));
    }
}

TEST_CASE("build_cross: out-of-bounds and nodata holes are construction errors") {
    const DemCloud dem = testutil::make_grid(20, 20, 1.0, 0, 0, [](double, double) {
        return 1.0;
    });
    CrossSpec spec;
    spec.center = Point3{1.0, 10.0, 0.0}; // 1 m from the west edge
    spec.arm_length_points = 10;
    try {
        build_cross(dem, spec);
        FAIL("expected infeasible_error");
    } catch (const infeasible_error& e) {
        CHECK(std::string(e.what()).find("arm") != std::string::npos);
    }

    // A nodata hole under one arm point.
    std::vector<double> z(400, 1.0);
    std::vector<std::uint8_t> mask(400, 0);
    mask[14 * 20 + 10] = 1; // cell (i=14, j=10): 4 m north of the center
    const DemCloud holed(0, 0, 1.0, 20, 20, std::move(z), std::move(mask));
    CrossSpec spec2;
    spec2.center = Point3{10.0, 10.0, 0.0};
    spec2.arm_length_points = 6;
    try {
        build_cross(holed, spec2);
        FAIL("expected infeasible_error");
    } catch (const infeasible_error& e) {
        CHECK(std::string(e.what()).find("arm 1 point 4") != std::string::npos);
    }

    // Center itself outside the grid.
    CrossSpec spec3;
    spec3.center = Point3{-40.0, -40.0, 0.0};
    spec3.arm_length_points = 3;
    CHECK_THROWS_AS(build_cross(dem, spec3), infeasible_error);
}

TEST_CASE("build_cross: point count invariant for other arm counts") {
    const DemCloud dem = testutil::make_grid(41, 41, 1.0, 0, 0, [](double x, double y) {
        return 0.1 * x + 0.2 * y;
    });
    CrossSpec spec;
    spec.center = Point3{20.0, 20.0, 0.0};
    spec.arm_length_points = 7;
    spec.n_arms = 8;
    spec.first_arm_angle_deg = 13.0;
    const PointPattern cross = build_cross(dem, spec);
    CHECK(cross.points.size() == 8u * 7u + 1u);
    CHECK(cross.arms.size() == 8);
}

TEST_CASE("pattern json: round-trip preserves coordinates bit-for-bit") {
    testutil::TempDir tmp("pattern_json");
    PointPattern p = random_pattern(11, 9);
    p.arms = {{1, 2}, {3, 4}, {5, 6}, {7, 8}};
    write_pattern_json(p, tmp.file("p.json"));
    const PointPattern q = read_pattern_json(tmp.file("p.json"));
    REQUIRE(q.size() == p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        CHECK(q.points[i].x == p.points[i].x);
        CHECK(q.points[i].y == p.points[i].y);
        CHECK(q.points[i].z == p.points[i].z);
    }
    REQUIRE(q.arms == p.arms);

    testutil::spit(tmp.file("bad.json"), "{\"points\": \"nope\"}");
    CHECK_THROWS_AS(read_pattern_json(tmp.file("bad.json")), format_error);
    CHECK_THROWS_AS(read_pattern_json(tmp.file("missing.json")), format_error);
}
