#include "doctest.h"

#include <numbers>
#include <random>

#include "rotolab/error.hpp"
#include "rotolab/intersections.hpp"

using namespace rotolab;

namespace {

std::vector<PlanePoint> line(PlanePoint a, PlanePoint b, int n)
{
    std::vector<PlanePoint> pts;
    for (int i = 0; i <= n; ++i) pts.push_back(a + (static_cast<double>(i) / n) * (b - a));
    return pts;
}

std::vector<PlanePoint> parabola(double g, int n = 200)
{
    std::vector<PlanePoint> pts;
    for (int i = -n; i <= n; ++i) {
        const double x = static_cast<double>(i) / n;
        pts.push_back({x, x * x + g});
    }
    return pts;
}

SaddleRecord origin_saddle(double k)
{
    return classify_point(builtin_family("two-shear").bind({{"k", k}}), {0, 0}, 1, {0, 0}, {{"k", k}});
}

IntersectionEvent transverse_event(IntVec t)
{
    IntersectionEvent e;
    e.translate = t;
    e.kind = EventKind::Transverse;
    e.sign = 1;
    return e;
}

} // namespace

TEST_CASE("axis crossing")
{
    const auto ev = find_intersections(line({-1, 0}, {1, 0}, 7), line({0, -1}, {0, 1}, 5));
    REQUIRE(ev.size() == 1);
    CHECK(ev[0].kind == EventKind::Transverse);
    CHECK(norm(ev[0].point) < 1e-15);
    CHECK(ev[0].angle == doctest::Approx(std::numbers::pi / 2.0));
    CHECK(ev[0].sign == 1);
    CHECK(ev[0].s_u == doctest::Approx(1.0));
    CHECK(ev[0].s_s == doctest::Approx(1.0));
    const auto rev = find_intersections(line({0, -1}, {0, 1}, 5), line({-1, 0}, {1, 0}, 7));
    REQUIRE(rev.size() == 1);
    CHECK(rev[0].sign == -1);
}

TEST_CASE("parabola touching a line is a tangency candidate")
{
    const auto ev = find_intersections(parabola(0.0), line({-1, 0}, {1, 0}, 3));
    REQUIRE(ev.size() == 1);
    CHECK(ev[0].kind == EventKind::TangencyCandidate);
    CHECK(ev[0].touch);
    CHECK(norm(ev[0].point) < 1e-12);
    const auto two = find_intersections(parabola(-0.25), line({-1, 0}, {1, 0}, 3));
    REQUIRE(two.size() == 2);
    CHECK(two[0].kind == EventKind::Transverse);
    CHECK(two[0].sign == -two[1].sign);
    CHECK(std::abs(two[0].point.x) == doctest::Approx(0.5).epsilon(1e-4));
}

TEST_CASE("collinear overlap is refused")
{
    try {
        find_intersections(line({0, 0}, {2, 0}, 2), line({1, 0}, {3, 0}, 2));
        FAIL("expected DegenerateOverlap");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::DegenerateOverlap);
    }
}

TEST_CASE("min_gap examples and brute force")
{
    CHECK(min_gap(line({0, 0}, {1, 0}, 1), line({0, 1}, {1, 1}, 1)).distance == doctest::Approx(1.0));
    CHECK(min_gap(line({0, 0}, {1, 1}, 1), line({0, 1}, {1, 0}, 1)).distance == 0.0);
    for (double g : {1e-3, 1e-2, 0.1})
        CHECK(min_gap(parabola(g), line({-1, 0}, {1, 0}, 4)).distance == doctest::Approx(g).epsilon(1e-9));

    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<PlanePoint> a, b;
        PlanePoint za{u(rng), u(rng)}, zb{u(rng) + 3.0, u(rng)};
        for (int i = 0; i < 150; ++i) {
            za += PlanePoint{0.03 * u(rng), 0.03 * u(rng)};
            zb += PlanePoint{0.03 * u(rng), 0.03 * u(rng)};
            a.push_back(za);
            b.push_back(zb);
        }
        double brute = INFINITY;
        for (std::size_t i = 0; i + 1 < a.size(); ++i)
            for (std::size_t j = 0; j + 1 < b.size(); ++j)
                brute = std::min(brute, segment_distance(a[i], a[i + 1], b[j], b[j + 1]));
        const GapResult g = min_gap(a, b);
        CHECK(g.distance == doctest::Approx(brute).epsilon(1e-12));
        CHECK(distance(g.on_a, g.on_b) == doctest::Approx(g.distance).epsilon(1e-9));
        if (brute > 0.0) CHECK(min_gap_disjoint(a, b).distance == doctest::Approx(brute).epsilon(1e-12));
    }
}

TEST_CASE("linear saddle has an empty spectrum")
{
    const LiftFamily fam = chart_family("linear-saddle");
    const FamilyParams p{{"lambda", 2.0}};
    const SaddleRecord s = classify_point(fam.bind(p), {0, 0}, 1, {0, 0}, p);
    SpectrumConfig cfg;
    cfg.window = 1;
    cfg.growth.budget = 5.0;
    const TranslateSpectrum sp = translate_spectrum(fam, p, s, cfg);
    CHECK(sp.hits.empty());
    REQUIRE(sp.scanned.size() == 1);
    CHECK(sp.scanned[0] == IntVec{0, 0});
}

TEST_CASE("two-shear k=0.8 spectrum is nonempty and reflection symmetric")
{
    const double k = 0.8;
    const BoundLift lift = builtin_family("two-shear").bind({{"k", k}});
    SpectrumConfig cfg;
    cfg.window = 2;
    cfg.growth.budget = 30.0;
    const TranslateSpectrum sp = translate_spectrum(lift, origin_saddle(k), cfg);
    CHECK_FALSE(sp.hits.empty());
    CHECK(sp.has_transverse({0, -1}));
    for (const auto& [t, evs] : sp.hits) {
        CHECK(std::max(std::abs(t.a), std::abs(t.b)) <= 2);
        CHECK_FALSE(evs.empty());
    }
    CHECK(sp.unmatched_reflections.size() <= sp.hits.size() / 4);
}

TEST_CASE("lemma0 check")
{
    RotationSetApprox outer;
    outer.vertices = convex_hull({{-0.2, -0.3}, {0.2, -0.3}, {0.2, 0.0}, {-0.2, 0.0}});
    SupportData sd;
    sd.point = {0, 0};
    sd.v = {0, 1};
    sd.r_dir = {-1, 0};

    TranslateSpectrum ok;
    ok.hits[{0, -1}] = {transverse_event({0, -1})};
    const Lemma0Report a = lemma0_check(ok, outer, sd);
    CHECK(a.pass);
    REQUIRE(a.entries.size() == 1);
    CHECK(a.entries[0].dot == doctest::Approx(-1.0));
    CHECK(a.entries[0].cone_ok);

    TranslateSpectrum bad;
    bad.hits[{0, 1}] = {transverse_event({0, 1})};
    const Lemma0Report b = lemma0_check(bad, outer, sd);
    CHECK_FALSE(b.pass);
    CHECK_FALSE(b.diagnostic.empty());
}

TEST_CASE("ray to polygon distance")
{
    const std::vector<PlanePoint> sq = convex_hull({{1, -1}, {2, -1}, {2, 1}, {1, 1}});
    CHECK(ray_polygon_distance({1, 0}, sq, 0.0) == doctest::Approx(0.0));
    CHECK(ray_polygon_distance({-1, 0}, sq, 0.0) == doctest::Approx(1.0));
    CHECK(ray_polygon_distance({0, 1}, sq, 0.0) == doctest::Approx(1.0));
}
