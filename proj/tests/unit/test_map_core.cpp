#include "doctest.h"

#include <numbers>
#include <random>

#include "rotolab/error.hpp"
#include "rotolab/expression.hpp"
#include "rotolab/map_core.hpp"

using namespace rotolab;

namespace {

FamilyParams params_for(const std::string& name)
{
    if (name == "translation") return {{"alpha", 0.5}, {"beta", 0.25}};
    if (name == "two-shear") return {{"k", 0.8}};
    if (name == "two-shear-drift") return {{"k", 0.8}, {"d", 0.05}};
    return {};
}

} // namespace

TEST_CASE("closed-form examples")
{
    const FamilyParams none;
    const PlanePoint id = eval_lift(builtin_family("identity"), none, {0.3, 0.7});
    CHECK(id.x == 0.3);
    CHECK(id.y == 0.7);

    const PlanePoint tr = eval_lift(builtin_family("translation"), params_for("translation"), {0, 0});
    CHECK(tr.x == 0.5);
    CHECK(tr.y == 0.25);

    // vertical shear first, then horizontal
    const double y1 = 0.2 * std::sin(std::numbers::pi / 2.0);
    const double x1 = 0.25 + 0.2 * std::sin(2.0 * std::numbers::pi * y1);
    const PlanePoint ts = eval_lift(builtin_family("two-shear"), {{"k", 0.2}}, {0.25, 0.0});
    CHECK(ts.x == doctest::Approx(x1).epsilon(1e-15));
    CHECK(ts.y == doctest::Approx(0.2).epsilon(1e-15));

    const PlanePoint dr = eval_lift(builtin_family("two-shear-drift"), {{"k", 0.2}, {"d", 0.1}}, {0.25, 0.0});
    CHECK(dr.y == doctest::Approx(0.1).epsilon(1e-15));
}

TEST_CASE("iterate displacement")
{
    const auto r0 = iterate_lift(builtin_family("identity"), {}, {0.1, 0.9}, 1000);
    CHECK(r0.displacement.x == 0.0);
    CHECK(r0.displacement.y == 0.0);
    const auto r1 = iterate_lift(builtin_family("translation"), params_for("translation"), {0.3, 0.3}, 4);
    CHECK(r1.displacement.x == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(r1.displacement.y == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("non-finite iterate names its step")
{
    const FamilyParams p{{"alpha", INFINITY}, {"beta", 0.0}};
    try {
        iterate_lift(builtin_family("translation"), p, {0, 0}, 10);
        FAIL("expected NumericBlowup");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NumericBlowup);
        CHECK(std::string(e.what()).find("step 1") != std::string::npos);
    }
}

TEST_CASE("jacobian: identity, trace at the origin, finite differences")
{
    const Mat2 j = jacobian(builtin_family("identity"), {}, {0.4, 0.1});
    CHECK(j.a == 1.0);
    CHECK(j.b == 0.0);
    CHECK(j.c == 0.0);
    CHECK(j.d == 1.0);

    for (double k : {0.1, 0.45, 0.8}) {
        const Mat2 m = jacobian(builtin_family("two-shear"), {{"k", k}}, {0, 0});
        const double expect = 2.0 + 4.0 * std::numbers::pi * std::numbers::pi * k * k;
        CHECK(m.trace() == doctest::Approx(expect).epsilon(1e-14));
    }

    const BoundLift lift = builtin_family("two-shear-drift").bind({{"k", 0.8}, {"d", 0.05}});
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int i = 0; i < 100; ++i) {
        const PlanePoint z{u(rng), u(rng)};
        const Mat2 diff = lift.jacobian(z) - finite_difference_jacobian(lift, z);
        CHECK(diff.max_abs() < 1e-6);
    }
}

TEST_CASE("area preservation and equivariance of builtin families")
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (const char* name : {"identity", "translation", "two-shear", "two-shear-drift"}) {
        const LiftFamily fam = builtin_family(name);
        REQUIRE(fam.equivariant);
        const BoundLift lift = fam.bind(params_for(name));
        CHECK(equivariance_residual(lift, 100, 17) < 1e-12);
        double worst = 0.0;
        for (int i = 0; i < 1000; ++i) worst = std::max(worst, std::abs(lift.jacobian({u(rng), u(rng)}).det() - 1.0));
        CHECK(worst < 1e-9);
    }
}

TEST_CASE("closed-form inverse and newton inverse")
{
    const BoundLift lift = builtin_family("two-shear-drift").bind({{"k", 0.8}, {"d", 0.05}});
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 50; ++i) {
        const PlanePoint z{u(rng), u(rng)};
        CHECK(distance(lift.inverse(lift(z)), z) < 1e-12);
        const PlanePoint w = newton_inverse(lift, lift(z), lift.inverse(lift(z)) + PlanePoint{1e-3, -1e-3});
        CHECK(distance(w, z) < 1e-10);
    }
    const PlanePoint p = power_map(lift, {0.2, 0.3}, 3, {1, -1});
    CHECK(distance(power_inverse(lift, p, 3, {1, -1}), {0.2, 0.3}) < 1e-11);
}

TEST_CASE("degenerate parameter and defaults")
{
    const BoundLift lift = builtin_family("two-shear").bind({{"k", 0.0}});
    const PlanePoint z = lift({0.37, -0.21});
    CHECK(z.x == 0.37);
    CHECK(z.y == -0.21);
    CHECK(builtin_family("two-shear-drift").default_params().get("d") == 0.0);
}

TEST_CASE("config errors")
{
    CHECK_THROWS_AS(builtin_family("standard-map"), Error);
    try {
        builtin_family("two-shear").bind({{"q", 1.0}});
        FAIL("expected Config");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Config);
    }
    try {
        family_by_name("nope");
        FAIL("expected Config");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Config);
    }
    CHECK(exit_code(ErrorKind::Config) == 2);
    CHECK(exit_code(ErrorKind::NumericBlowup) == 3);
    CHECK(exit_code(ErrorKind::Hypothesis) == 4);
}

TEST_CASE("chart families are flagged non-equivariant")
{
    CHECK_FALSE(chart_family("linear-saddle").equivariant);
    CHECK_FALSE(chart_family("saddle-node").equivariant);
    const PlanePoint z = eval_lift(chart_family("linear-saddle"), {{"lambda", 2.0}}, {1.0, 1.0});
    CHECK(z.x == 2.0);
    CHECK(z.y == 0.5);
}

TEST_CASE("JSON descriptor family matches the builtin")
{
    const nlohmann::json desc = {
        {"name", "custom"},
        {"params", {{"k", 0.45}, {"d", 0.09}}},
        {"steps",
         {{{"x", "x"}, {"y", "y + k*sin(2*pi*x)"}}, {{"x", "x + k*sin(2*pi*y)"}, {"y", "y"}}, {{"x", "x"}, {"y", "y - d"}}}}};
    const LiftFamily custom = family_from_json(desc);
    const BoundLift a = custom.bind(custom.default_params());
    const BoundLift b = builtin_family("two-shear-drift").bind({{"k", 0.45}, {"d", 0.09}});
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 50; ++i) {
        const PlanePoint z{u(rng), u(rng)};
        CHECK(distance(a(z), b(z)) < 1e-14);
        CHECK((a.jacobian(z) - b.jacobian(z)).max_abs() < 1e-12);
        CHECK(distance(a.inverse(a(z)), z) < 1e-10);
    }
    CHECK_THROWS_AS(family_from_json({{"name", "bad"}, {"steps", {{{"x", "x +"}, {"y", "y"}}}}}), Error);
}
