#include "doctest.h"

#include <numbers>
#include <random>

#include "rotolab/error.hpp"
#include "rotolab/manifolds.hpp"

using namespace rotolab;

namespace {

SaddleRecord linear_saddle(const BoundLift& lift)
{
    return classify_point(lift, {0, 0}, 1, {0, 0}, {{"lambda", 2.0}});
}

SaddleRecord origin_saddle(double k)
{
    const BoundLift lift = builtin_family("two-shear").bind({{"k", k}});
    return classify_point(lift, {0, 0}, 1, {0, 0}, {{"k", k}});
}

} // namespace

TEST_CASE("linear saddle branches lie on the axes")
{
    const LiftFamily fam = chart_family("linear-saddle");
    const BoundLift lift = fam.bind({{"lambda", 2.0}});
    const SaddleRecord s = linear_saddle(lift);
    GrowthConfig g;
    g.budget = 30.0;
    for (Branch b : {Branch::UnstablePlus, Branch::UnstableMinus, Branch::StablePlus, Branch::StableMinus}) {
        const ManifoldArc arc = grow_branch(lift, s, b, g);
        REQUIRE(arc.points.size() > 2);
        double off = 0.0, reach = 0.0;
        for (const auto& p : arc.points) {
            off = std::max(off, is_unstable(b) ? std::abs(p.y) : std::abs(p.x));
            reach = std::max(reach, norm(p));
        }
        CHECK(off < 1e-8);
        CHECK(reach >= 29.0);
        CHECK(invariance_residual(lift, arc) < 1e-10);
        CHECK(check_arc_bounds(arc, g));
        const BoundednessResult br = boundedness_probe(arc, 10.0, 30.0);
        CHECK(br.unbounded);
    }
}

TEST_CASE("two-shear origin saddle: invariance and unboundedness")
{
    const double k = 0.8;
    const BoundLift lift = builtin_family("two-shear").bind({{"k", k}});
    const SaddleRecord s = origin_saddle(k);
    GrowthConfig g;
    g.budget = 60.0;
    const auto arcs = grow_all_branches(lift, s, g);
    REQUIRE(arcs.size() == 4);
    for (const auto& arc : arcs) {
        CAPTURE(std::string(to_string(arc.branch)));
        CHECK_FALSE(arc.truncated);
        CHECK(arc.arclength >= 60.0);
        CHECK(invariance_residual(lift, arc) < 1e-5);
        std::string why;
        CHECK_MESSAGE(check_arc_bounds(arc, g, &why), why);
        // the branches spread slowly: max distance is about 2 at this budget
        const BoundednessResult br = boundedness_probe(arc, 1.5, 60.0);
        CHECK_MESSAGE(br.unbounded, br.evidence);
    }
}

TEST_CASE("perturbed polyline is detected as non-invariant")
{
    const BoundLift lift = builtin_family("two-shear").bind({{"k", 0.8}});
    GrowthConfig g;
    g.budget = 5.0;
    ManifoldArc arc = grow_branch(lift, origin_saddle(0.8), Branch::UnstablePlus, g);
    std::mt19937_64 rng(21);
    std::normal_distribution<double> n(0.0, 1e-2);
    for (std::size_t i = 1; i < arc.points.size(); ++i) arc.points[i] += PlanePoint{n(rng), n(rng)};
    CHECK(invariance_residual(lift, arc) >= 1e-3);
}

TEST_CASE("translate_arc")
{
    const BoundLift lift = builtin_family("two-shear").bind({{"k", 0.8}});
    GrowthConfig g;
    g.budget = 3.0;
    const SaddleRecord s = origin_saddle(0.8);
    const ManifoldArc arc = grow_branch(lift, s, Branch::StableMinus, g);
    const ManifoldArc same = translate_arc(arc, {0, 0});
    CHECK(same.points == arc.points);
    const ManifoldArc back = translate_arc(translate_arc(arc, {0, -1}), {0, 1});
    REQUIRE(back.points.size() == arc.points.size());
    for (std::size_t i = 0; i < arc.points.size(); ++i) CHECK(distance(back.points[i], arc.points[i]) < 1e-12);
    CHECK(back.translate == IntVec{0, 0});

    SaddleRecord shifted = s;
    shifted.z += PlanePoint{1.0, 0.0};
    const ManifoldArc direct = grow_branch(lift, shifted, Branch::StableMinus, g);
    const ManifoldArc moved = translate_arc(arc, {1, 0});
    REQUIRE(direct.points.size() == moved.points.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < direct.points.size(); ++i) worst = std::max(worst, distance(direct.points[i], moved.points[i]));
    CHECK(worst < 1e-9);
}

TEST_CASE("circle polyline is not called unbounded")
{
    ManifoldArc arc;
    for (int i = 0; i <= 2000; ++i) {
        const double a = 2.0 * std::numbers::pi * i / 200.0;
        arc.points.push_back({0.5 * std::cos(a) - 0.5, 0.5 * std::sin(a)});
    }
    arc.arclength = cumulative_length(arc.points).back();
    const BoundednessResult r = boundedness_probe(arc, 5.0, 30.0);
    CHECK_FALSE(r.unbounded);
    CHECK_FALSE(r.evidence.empty());
}

TEST_CASE("sub_polyline and branch names")
{
    const std::vector<PlanePoint> pts{{0, 0}, {1, 0}, {1, 1}};
    const auto sub = sub_polyline(pts, 0.5, 1.5);
    REQUIRE(sub.size() == 3);
    CHECK(sub.front().x == doctest::Approx(0.5));
    CHECK(sub.back().y == doctest::Approx(0.5));
    for (Branch b : {Branch::UnstablePlus, Branch::UnstableMinus, Branch::StablePlus, Branch::StableMinus})
        CHECK(branch_from_string(to_string(b)) == b);
    CHECK_THROWS_AS(branch_from_string("sideways"), Error);
}

TEST_CASE("branch_point reproduces the grown vertices")
{
    const BoundLift lift = builtin_family("two-shear").bind({{"k", 0.8}});
    GrowthConfig g;
    g.budget = 4.0;
    const ManifoldArc arc = grow_branch(lift, origin_saddle(0.8), Branch::UnstableMinus, g);
    for (std::size_t i = 0; i < arc.points.size(); i += 97)
        CHECK(distance(branch_point(lift, arc, arc.sigma[i]), arc.points[i]) < 1e-12);
}
