#include "doctest.h"

#include <cmath>

#include "rotolab/error.hpp"
#include "rotolab/io.hpp"
#include "rotolab/svg.hpp"

using namespace rotolab;

TEST_CASE("dump is deterministic and exact")
{
    Json j;
    j["a"] = 0.1;
    j["b"] = 2.0;
    j["c"] = NAN;
    j["d"] = Json::array({1, 2});
    j["e"] = "x";
    const std::string s = dump(j);
    CHECK(s.find("0.10000000000000001") != std::string::npos);
    CHECK(s.find("\"b\": 2.0") != std::string::npos);
    CHECK(s.find("\"c\": null") != std::string::npos);
    CHECK(s.find("[1, 2]") != std::string::npos);
    CHECK(s.back() == '\n');
    CHECK(dump(j) == s);
    const Json back = Json::parse(s);
    CHECK(back["a"].get<double>() == 0.1);
}

TEST_CASE("round trips")
{
    const double third = 1.0 / 3.0;
    const PlanePoint p{third, -std::sqrt(2.0)};
    CHECK(point_from_json(Json::parse(dump(to_json(p)))) == p);
    CHECK(intvec_from_json(to_json(IntVec{3, -7})) == IntVec{3, -7});

    RotationSetApprox rs;
    rs.vertices = convex_hull({{0, 0}, {third, 0}, {0, third}});
    rs.kind = HullKind::Inner;
    rs.n_min = 500;
    rs.n_max = 4000;
    rs.family = "two-shear";
    rs.params = {{"k", 0.45}};
    rs.sources = {{1, 0}};
    rs.source_periods = {3};
    const RotationSetApprox rs2 = hull_from_json(Json::parse(dump(to_json(rs))));
    CHECK(rs2.vertices == rs.vertices);
    CHECK(rs2.kind == HullKind::Inner);
    CHECK(rs2.n_max == 4000);
    CHECK(rs2.params == rs.params);

    const BoundLift lift = builtin_family("two-shear").bind({{"k", 0.8}});
    const SaddleRecord s = classify_point(lift, {0, 0}, 1, {0, 0}, {{"k", 0.8}});
    const SaddleRecord s2 = saddle_from_json(Json::parse(dump(to_json(s))));
    CHECK(s2.z == s.z);
    CHECK(s2.lambda_u == s.lambda_u);
    CHECK(s2.eig_s == s.eig_s);
    CHECK(s2.cls == s.cls);

    GrowthConfig g;
    g.budget = 2.0;
    const ManifoldArc a = grow_branch(lift, s, Branch::StablePlus, g);
    const ManifoldArc a2 = arc_from_json(Json::parse(dump(to_json(a))));
    CHECK(a2.points == a.points);
    CHECK(a2.sigma == a.sigma);
    CHECK(a2.branch == Branch::StablePlus);

    IntersectionEvent e;
    e.point = {0.25, third};
    e.translate = {0, -1};
    e.sign = -1;
    e.s_u = 1.5;
    const IntersectionEvent e2 = event_from_json(Json::parse(dump(to_json(e))));
    CHECK(e2.point == e.point);
    CHECK(e2.translate == e.translate);
    CHECK(e2.sign == -1);
    CHECK(e2.s_u == 1.5);
}

TEST_CASE("malformed inputs")
{
    CHECK(parse_intvec("0,-1") == IntVec{0, -1});
    CHECK(parse_point("0.5,0.25") == PlanePoint{0.5, 0.25});
    for (const char* bad : {"", "1", "1,2,3", "a,b", "1.5,2"}) {
        CAPTURE(bad);
        CHECK_THROWS_AS(parse_intvec(bad), Error);
    }
    CHECK_THROWS_AS(point_from_json(Json::parse("[1]")), Error);
    CHECK_THROWS_AS(hull_from_json(Json::parse("{\"schema\": \"chain\"}")), Error);
}

TEST_CASE("fnv1a reference values")
{
    CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(hex64(0xabcULL) == "0000000000000abc");
}

TEST_CASE("svg rendering")
{
    RotationSetApprox rs;
    rs.vertices = convex_hull({{0, 0}, {1, 0}, {0, 1}});
    const Json j = to_json(rs);
    const std::string a = render_svg(j);
    CHECK(a.rfind("<?xml", 0) == 0);
    CHECK(a.find("<svg") != std::string::npos);
    CHECK(a.find("<path") != std::string::npos);
    CHECK(render_svg(j) == a);
    SvgStyle st;
    st.size = 300;
    CHECK(render_svg(j, st).find("width=\"300\"") != std::string::npos);
    try {
        render_svg(Json{{"schema", "teapot"}});
        FAIL("expected Schema");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Schema);
    }
}

TEST_CASE("overlay svg marks events")
{
    const BoundLift lift = builtin_family("two-shear").bind({{"k", 0.8}});
    const SaddleRecord s = classify_point(lift, {0, 0}, 1, {0, 0}, {{"k", 0.8}});
    GrowthConfig g;
    g.budget = 3.0;
    const ManifoldArc u = grow_branch(lift, s, Branch::UnstablePlus, g);
    const ManifoldArc t = grow_branch(lift, s, Branch::StablePlus, g);
    IntersectionEvent e;
    e.point = {0.1, 0.1};
    const std::string svg = render_svg(overlay_json(u, t, {0, -1}, {e}));
    CHECK(svg.find("<circle") != std::string::npos);
    CHECK(svg.find("<path") != std::string::npos);
}
