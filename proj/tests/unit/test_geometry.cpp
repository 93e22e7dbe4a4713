#include "doctest.h"

#include <random>

#include "rotolab/geometry.hpp"
#include "rotolab/spatial_hash.hpp"

using namespace rotolab;

TEST_CASE("orient2d signs and exact collinearity")
{
    CHECK(orient2d({0, 0}, {1, 0}, {0, 1}) == 1);
    CHECK(orient2d({0, 0}, {0, 1}, {1, 0}) == -1);
    CHECK(orient2d({0, 0}, {1, 1}, {2, 2}) == 0);
    // nearly collinear points where the naive determinant rounds to the wrong sign
    const PlanePoint a{0.5, 0.5};
    const PlanePoint b{12.0, 12.0};
    const PlanePoint c{24.0, 24.0};
    CHECK(orient2d(a, b, c) == 0);
    CHECK(orient2d(a, b, {24.0, std::nextafter(24.0, 25.0)}) == 1);
    CHECK(orient2d(a, b, {24.0, std::nextafter(24.0, 23.0)}) == -1);
}

TEST_CASE("convex hull drops interior, duplicate and collinear points")
{
    std::vector<PlanePoint> pts{{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0.5}, {0.5, 0}, {1, 1}, {0, 0}};
    const auto h = convex_hull(pts);
    REQUIRE(h.size() == 4);
    CHECK(polygon_area(h) == doctest::Approx(1.0));
    CHECK(convex_hull({{2, 3}}).size() == 1);
    CHECK(convex_hull({{2, 3}, {2, 3}}).size() == 1);
    CHECK(convex_hull({{0, 0}, {1, 1}, {2, 2}}).size() == 2);
}

TEST_CASE("signed depth and closest point")
{
    const std::vector<PlanePoint> sq{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    CHECK(signed_depth(sq, {0.5, 0.5}) == doctest::Approx(0.5));
    CHECK(signed_depth(sq, {0.5, 0.1}) == doctest::Approx(0.1));
    CHECK(signed_depth(sq, {2.0, 0.5}) == doctest::Approx(-1.0));
    CHECK(signed_depth(sq, {2.0, 2.0}) == doctest::Approx(-std::sqrt(2.0)));
    const PlanePoint c = closest_point(sq, {2.0, 0.5});
    CHECK(c.x == doctest::Approx(1.0));
    CHECK(c.y == doctest::Approx(0.5));
    const std::vector<PlanePoint> pt{{0.25, 0.25}};
    CHECK(signed_depth(pt, {0.25, 0.25}) <= 0.0);
}

TEST_CASE("diameter matches brute force")
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<PlanePoint> pts(300);
    for (auto& p : pts) p = {u(rng), u(rng)};
    double brute = 0.0;
    for (const auto& p : pts)
        for (const auto& q : pts) brute = std::max(brute, distance(p, q));
    CHECK(diameter(pts) == doctest::Approx(brute).epsilon(1e-12));
}

TEST_CASE("segment distances")
{
    CHECK(segment_distance({0, 0}, {1, 0}, {0, 1}, {1, 1}) == doctest::Approx(1.0));
    CHECK(segment_distance({0, 0}, {1, 1}, {0, 1}, {1, 0}) == 0.0);
    CHECK(segment_distance({0, 0}, {1, 0}, {2, 0}, {3, 0}) == doctest::Approx(1.0));
    double t = -1.0;
    CHECK(point_segment_distance({0.5, 2.0}, {0, 0}, {1, 0}, &t) == doctest::Approx(2.0));
    CHECK(t == doctest::Approx(0.5));
}

TEST_CASE("reduce_mod1 lands in the unit square")
{
    const PlanePoint r = reduce_mod1({-0.25, 3.5});
    CHECK(r.x == doctest::Approx(0.75));
    CHECK(r.y == doctest::Approx(0.5));
    const PlanePoint e = reduce_mod1({-1e-18, 0.0});
    CHECK(e.x >= 0.0);
    CHECK(e.x < 1.0);
}

TEST_CASE("segment index nearest agrees with a linear scan")
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::vector<PlanePoint> pts(400);
    PlanePoint z{0, 0};
    for (auto& p : pts) {
        z += PlanePoint{0.05 * u(rng), 0.05 * u(rng)};
        p = z;
    }
    const SegmentIndex idx(pts, 0.05);
    for (int k = 0; k < 50; ++k) {
        const PlanePoint q{u(rng), u(rng)};
        double best = INFINITY;
        for (std::size_t i = 0; i + 1 < pts.size(); ++i)
            best = std::min(best, point_segment_distance(q, pts[i], pts[i + 1]));
        CHECK(idx.nearest(q).dist == doctest::Approx(best).epsilon(1e-12));
    }
}
