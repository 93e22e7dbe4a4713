#include "doctest.h"

#include <cmath>

#include "rotolab/error.hpp"
#include "rotolab/tangency_finder.hpp"

using namespace rotolab;

namespace {

// y = x^2 + (t - t') against y = 0 after a sign flip, with the parabola moving down in t
class LinearGap : public ContactProblem {
public:
    explicit LinearGap(double at) : at_(at) {}
    void curves(double t, std::vector<PlanePoint>& moving, std::vector<PlanePoint>& target, std::vector<Provenance>*,
                std::vector<Provenance>*) const override
    {
        moving.clear();
        target = {{-2, 0}, {2, 0}};
        for (int i = -400; i <= 400; ++i) {
            const double x = i / 200.0;
            moving.push_back({x, x * x + (at_ - t)});
        }
    }

private:
    double at_;
};

class Broken : public ContactProblem {
public:
    void curves(double, std::vector<PlanePoint>&, std::vector<PlanePoint>&, std::vector<Provenance>*,
                std::vector<Provenance>*) const override
    {
        throw Error(ErrorKind::ScanAborted, "cannot rebuild");
    }
};

} // namespace

TEST_CASE("separation classes on the harness")
{
    const ParabolaHarness h(0.3);
    const Separation before = separation_test(h, 0.2);
    CHECK(before.kind == SeparationKind::Disjoint);
    CHECK(before.gap == doctest::Approx(0.1).epsilon(1e-9));
    CHECK(before.signed_gap == doctest::Approx(-0.1).epsilon(1e-9));
    const Separation after = separation_test(h, 0.4);
    CHECK(after.kind == SeparationKind::Transverse);
    CHECK(after.events.size() == 2);
    CHECK(after.half_width == doctest::Approx(std::sqrt(0.1)).epsilon(1e-3));
    CHECK(after.signed_gap > 0.0);
}

TEST_CASE("bisection recovers t' on the harness")
{
    for (double tp : {0.3, 0.123456789}) {
        const ParabolaHarness h(tp);
        BisectConfig cfg;
        cfg.width = 1e-9;
        const TangencyRecord r = bisect_tangency(h, 0.0, 1.0, cfg);
        CHECK(std::abs(r.t_prime - tp) < 1e-8);
        CHECK(r.steps <= 60);
        CHECK(std::abs(r.t_hi - r.t_lo) <= 1e-9);
        CHECK_FALSE(r.trail.empty());
    }
}

TEST_CASE("linear gap 1.05 - t")
{
    const LinearGap g(1.05);
    BisectConfig cfg;
    cfg.width = 1e-8;
    const TangencyRecord r = bisect_tangency(g, 0.5, 1.5, cfg);
    CHECK(std::abs(r.t_prime - 1.05) < 1e-8);
    CHECK(r.steps <= 40);
}

TEST_CASE("bisection contracts")
{
    const ParabolaHarness h(0.3);
    CHECK_THROWS_AS(bisect_tangency(h, 0.0, 0.1), Error);
    try {
        bisect_tangency(Broken{}, 0.0, 1.0);
        FAIL("expected ScanAborted");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ScanAborted);
    }
}

TEST_CASE("unfolding fit recovers slope and square-root splitting")
{
    for (double a : {1.0, 2.0}) {
        CAPTURE(a);
        const ParabolaHarness h(0.5, a, 1.0);
        const UnfoldingFit f = unfolding_fit(h, 0.5, 0.01, 9);
        CHECK(f.ts.size() >= 9);
        CHECK(std::abs(f.slope - a) <= 0.01 * a);
        CHECK(f.r2 > 0.99);
        CHECK(f.halfwidth_r2 > 0.999);
        CHECK(f.halfwidth_coeff == doctest::Approx(std::sqrt(a)).epsilon(0.01));
        CHECK_FALSE(f.degenerate);
    }
    const TangencyRecord rec = scan_tangency(ParabolaHarness(0.5, 2.0), 0.0, 0.8, {}, 0.01);
    CHECK(rec.gap_slope == doctest::Approx(2.0).epsilon(0.01));
    CHECK(rec.halfwidth_r2 > 0.999);
}

TEST_CASE("persistence past t'")
{
    const ParabolaHarness h(0.3);
    const TangencyRecord r = bisect_tangency(h, 0.0, 1.0);
    const PersistenceReport p = persistence_check(h, r, 0.9, 4);
    CHECK(p.pass);
    CHECK(p.ts.size() == 4);
    for (double t : p.ts) CHECK(t > r.t_prime);
}

TEST_CASE("translate bound checks")
{
    const BoundCheck same = translate_bound_check({0, 31}, {0, 31}, {0, 1}, 1.0, 30.0);
    CHECK(same.deviation == 0.0);
    CHECK(same.proof_bound == 5.0);
    CHECK(same.theorem_bound == 7.5);
    CHECK(same.proof_ok);
    CHECK(same.theorem_ok);
    CHECK(same.pass);
    const BoundCheck mid = translate_bound_check({0, 25}, {0, 31}, {0, 1}, 1.0, 30.0);
    CHECK(mid.deviation == doctest::Approx(6.0));
    CHECK_FALSE(mid.proof_ok);
    CHECK(mid.theorem_ok);
    CHECK_FALSE(mid.pass);
    const BoundCheck bad = translate_bound_check({0, 20}, {0, 31}, {0, 1}, 1.0, 30.0);
    CHECK_FALSE(bad.theorem_ok);
    CHECK_FALSE(bad.pass);
}

TEST_CASE("map_polyline refines and keeps provenance")
{
    const BoundLift lin = chart_family("linear-saddle").bind({{"lambda", 2.0}});
    std::vector<PlanePoint> seg{{0, 0.5}, {1, 0.5}};
    std::vector<Provenance> prov{{{0, 0}, false}, {{1, 0}, true}};
    const auto out = map_polyline(lin, seg, 3, 0.1, 0.3, 1000, &prov);
    CHECK(out.front() == PlanePoint{0, 0.0625});
    CHECK(out.back() == PlanePoint{8, 0.0625});
    CHECK(prov.size() == out.size());
    for (std::size_t i = 0; i + 1 < out.size(); ++i) {
        CHECK(distance(out[i], out[i + 1]) <= 0.1 + 1e-12);
        CHECK(out[i].y == doctest::Approx(0.0625));
    }
    try {
        map_polyline(lin, seg, 3, 0.1, 0.3, 20);
        FAIL("expected ScanAborted");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ScanAborted);
    }
}

TEST_CASE("map_polyline follows a curved image")
{
    const BoundLift lift = builtin_family("two-shear").bind({{"k", 0.3}});
    std::vector<PlanePoint> seg;
    for (int i = 0; i <= 4; ++i) seg.push_back({0.25 * i, 0.1});
    const auto out = map_polyline(lift, seg, 1, 0.01, 0.1, 100000);
    // every vertex lies on the exact image of the horizontal segment y = 0.1
    for (const auto& p : out) {
        const PlanePoint pre = lift.inverse(p);
        CHECK(pre.y == doctest::Approx(0.1).epsilon(1e-6));
    }
}
