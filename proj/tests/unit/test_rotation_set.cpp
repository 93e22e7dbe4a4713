#include "doctest.h"

#include <numbers>

#include "rotolab/error.hpp"
#include "rotolab/rotation_set.hpp"

using namespace rotolab;

namespace {

OuterHullConfig small_outer()
{
    OuterHullConfig c;
    c.grid = 8;
    c.n_min = 100;
    c.n_max = 400;
    return c;
}

RotationSetApprox polygon(std::vector<PlanePoint> v, HullKind k = HullKind::Outer)
{
    RotationSetApprox r;
    r.vertices = convex_hull(std::move(v));
    r.kind = k;
    return r;
}

std::vector<PlanePoint> disk(double r, int n = 64)
{
    std::vector<PlanePoint> pts;
    if (r <= 0.0) return {{0.0, 0.0}};
    for (int i = 0; i < n; ++i) {
        const double a = 2.0 * std::numbers::pi * i / n;
        pts.push_back({r * std::cos(a), r * std::sin(a)});
    }
    return pts;
}

bool contains(const RotationSetApprox& big, const RotationSetApprox& small, double tol)
{
    for (const auto& p : small.vertices)
        if (signed_depth(big.vertices, p) < -tol) return false;
    return true;
}

} // namespace

TEST_CASE("identity and translation hulls are singletons")
{
    const auto id = mz_outer_hull(builtin_family("identity"), {}, small_outer());
    REQUIRE(id.vertices.size() == 1);
    CHECK(std::abs(id.vertices[0].x) <= 1e-12);
    CHECK(std::abs(id.vertices[0].y) <= 1e-12);

    const auto tr = mz_outer_hull(builtin_family("translation"), {{"alpha", 0.5}, {"beta", 0.25}}, small_outer());
    REQUIRE_FALSE(tr.vertices.empty());
    for (const auto& v : tr.vertices) {
        CHECK(std::abs(v.x - 0.5) <= 1e-12);
        CHECK(std::abs(v.y - 0.25) <= 1e-12);
    }
    CHECK(tr.n_min == 100);
    CHECK(tr.n_max == 400);
    CHECK(tr.ladder.front() == 100);
    CHECK(tr.ladder.back() == 400);
}

TEST_CASE("outer hull config errors")
{
    OuterHullConfig c = small_outer();
    c.n_min = 10;
    CHECK_THROWS_AS(mz_outer_hull(builtin_family("identity"), {}, c), Error);
}

TEST_CASE("outer hull grows under sampling refinement")
{
    const BoundLift lift = builtin_family("two-shear").bind({{"k", 0.8}});
    const auto coarse = seed_grid(8, 1);
    auto fine = coarse;
    for (const auto& p : seed_grid(12, 2)) fine.push_back(p);
    const auto ladder = iterate_ladder(100, 400);
    const auto a = outer_hull_from_seeds(lift, coarse, ladder);
    const auto b = outer_hull_from_seeds(lift, fine, ladder);
    CHECK(contains(b, a, 1e-14));
    auto deeper = ladder;
    deeper.push_back(800);
    const auto c = outer_hull_from_seeds(lift, coarse, deeper);
    CHECK(contains(c, a, 1e-14));
}

TEST_CASE("two-shear k=0.8: hull with interior, containing (0,0) and a long orbit")
{
    const LiftFamily fam = builtin_family("two-shear");
    const FamilyParams p{{"k", 0.8}};
    const auto outer = mz_outer_hull(fam, p, {});
    REQUIRE(outer.vertices.size() >= 3);
    CHECK(polygon_area(outer.vertices) > 0.0);
    CHECK(signed_depth(outer.vertices, {0, 0}) > 0.0);
    const auto orbit = iterate_lift(fam, p, {0.1, 0.2}, 10000);
    CHECK(signed_depth(outer.vertices, orbit.displacement) > -2.0 / outer.n_max);

    InnerCensusConfig ic;
    ic.q_max = 2;
    ic.use_window = true;
    ic.window = {{-0.5, -0.5}, {0.5, 0.5}};
    const auto inner = inner_hull(fam, p, outer, ic);
    CHECK(membership(outer, inner, {0, 0}) == Membership::Interior);
}

TEST_CASE("rotation_vector")
{
    const BoundLift tr = builtin_family("translation").bind({{"alpha", 0.0}, {"beta", -1.0 / 3.0}});
    const PlanePoint r = rotation_vector(tr, {0.2, 0.2}, 3, {0, -1});
    CHECK(r.x == 0.0);
    CHECK(r.y == doctest::Approx(-1.0 / 3.0).epsilon(1e-15));
    const BoundLift id = builtin_family("identity").bind({});
    const PlanePoint z = rotation_vector(id, {0.4, 0.6}, 1, {0, 0});
    CHECK(z.x == 0.0);
    CHECK(z.y == 0.0);
    try {
        rotation_vector(tr, {0.2, 0.2}, 3, {0, 0});
        FAIL("expected NotPeriodic");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NotPeriodic);
    }
}

TEST_CASE("membership rules")
{
    const auto pt = polygon({{0, 0}});
    CHECK(membership(pt, pt, {0, 0}, 1e-3) == Membership::BoundaryBand);
    const auto sq = polygon({{-1, -1}, {1, -1}, {1, 1}, {-1, 1}});
    const auto small = polygon({{-0.5, -0.5}, {0.5, -0.5}, {0.5, 0.5}, {-0.5, 0.5}}, HullKind::Inner);
    CHECK(membership(sq, small, {5, 5}) == Membership::Exterior);
    CHECK(membership(sq, small, {0, 0}) == Membership::Interior);
    CHECK(membership(sq, small, {0.8, 0}) == Membership::BoundaryBand);
    CHECK(membership(sq, RotationSetApprox{}, {0, 0}) == Membership::BoundaryBand);
    // a certified inner hull overrides an outer hull that misses it
    const auto off = polygon({{2, 2}, {3, 2}, {3, 3}});
    CHECK(membership(off, small, {0.5, 0}) == Membership::BoundaryBand);
    CHECK(membership(off, small, {0.7, 0}) == Membership::Exterior);
}

TEST_CASE("supporting line on the unit square")
{
    const auto sq = polygon({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
    const SupportData e = supporting_line(sq, {0.5, 0});
    CHECK(e.v.x == doctest::Approx(0.0));
    CHECK(e.v.y == doctest::Approx(-1.0));
    CHECK(dot(e.v, e.r_dir) == doctest::Approx(0.0));
    CHECK_FALSE(e.at_vertex);
    const SupportData c = supporting_line(sq, {0, 0});
    CHECK(c.at_vertex);
    CHECK(c.v.x == doctest::Approx(-std::sqrt(0.5)));
    CHECK(c.v.y == doctest::Approx(-std::sqrt(0.5)));
    for (const auto& p : sq.vertices) CHECK(dot(p - c.point, c.v) <= 1e-12);
    try {
        supporting_line(sq, {0.5, 0.5});
        FAIL("expected NoSupport");
    } catch (const Error& err) {
        CHECK(err.kind() == ErrorKind::NoSupport);
    }
}

TEST_CASE("critical parameter of a growing disk")
{
    const double margin = 1e-5;
    const MembershipProbe probe = [margin](double t) {
        const auto hull = polygon(disk(t - 1.0));
        MembershipCertificate c;
        c.t = t;
        c.state = membership(hull, hull, {0, 0}, margin);
        c.outer_depth = signed_depth(hull.vertices, {0, 0});
        c.inner_depth = c.outer_depth;
        return c;
    };
    const CriticalResult r = critical_parameter(probe, 0.5, 1.5, 1e-6);
    CHECK(std::abs(r.t_bar - 1.0) < 1e-4);
    CHECK(std::abs(r.t_hi - r.t_lo) <= 1e-6);
    CHECK(r.cert_hi.state == Membership::Interior);
    CHECK(r.cert_lo.state != Membership::Interior);

    const CriticalResult s = critical_parameter(probe, 1.5, 0.5, 1e-6);
    CHECK(s.t_bar == doctest::Approx(r.t_bar));

    try {
        critical_parameter(probe, 1.5, 2.0);
        FAIL("expected InvalidBracket");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::InvalidBracket);
    }
}

TEST_CASE("inner hull records rotation vectors of certified orbits")
{
    SaddleRecord a;
    a.q = 2;
    a.trans = {1, 0};
    SaddleRecord b;
    b.q = 3;
    b.trans = {0, -1};
    SaddleRecord c;
    c.q = 1;
    c.trans = {0, 1};
    const auto h = inner_hull_from_records({a, b, c});
    CHECK(h.kind == HullKind::Inner);
    CHECK(h.vertices.size() == 3);
    CHECK(h.source_periods.size() == 3);
    CHECK(polygon_area(h.vertices) > 0.0);
}
