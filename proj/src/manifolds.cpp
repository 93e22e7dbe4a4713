#include "rotolab/manifolds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "rotolab/error.hpp"
#include "rotolab/parallel.hpp"
#include "rotolab/spatial_hash.hpp"

namespace rotolab {

namespace {

PlanePoint growth_step(const BoundLift& lift, const ManifoldArc& arc, PlanePoint z)
{
    for (int i = 0; i < arc.steps_per_domain; ++i)
        z = is_unstable(arc.branch) ? power_map(lift, z, arc.saddle.q, arc.saddle.trans)
                                    : power_inverse(lift, z, arc.saddle.q, arc.saddle.trans);
    return z;
}

double turning(const PlanePoint& a, const PlanePoint& b, const PlanePoint& c)
{
    const PlanePoint u = b - a, v = c - b;
    return std::abs(std::atan2(cross(u, v), dot(u, v)));
}

struct Vertex {
    double sigma;
    PlanePoint p;
};

} // namespace

const char* to_string(Branch b)
{
    switch (b) {
    case Branch::UnstablePlus: return "unstable+";
    case Branch::UnstableMinus: return "unstable-";
    case Branch::StablePlus: return "stable+";
    case Branch::StableMinus: return "stable-";
    }
    return "?";
}

Branch branch_from_string(const std::string& s)
{
    if (s == "unstable+" || s == "u+") return Branch::UnstablePlus;
    if (s == "unstable-" || s == "u-") return Branch::UnstableMinus;
    if (s == "stable+" || s == "s+") return Branch::StablePlus;
    if (s == "stable-" || s == "s-") return Branch::StableMinus;
    throw Error(ErrorKind::Config, "unknown branch '" + s + "'");
}

PlanePoint branch_point(const BoundLift& lift, const ManifoldArc& arc, double sigma)
{
    if (sigma < 0.0) return arc.saddle.z + arc.translate.as_point();
    long k = static_cast<long>(std::floor(sigma));
    double u = sigma - static_cast<double>(k);
    if (u == 0.0 && k > 0) {
        k -= 1;
        u = 1.0;
    }
    // seeds are evaluated at the untranslated saddle; translate_arc shifts are added at the end
    PlanePoint z = arc.saddle.z + (arc.delta0 * std::pow(arc.ratio, u)) * arc.direction;
    for (long i = 0; i < k; ++i) z = growth_step(lift, arc, z);
    return z + arc.translate.as_point();
}

ManifoldArc grow_branch(const BoundLift& lift, const SaddleRecord& s, Branch branch, const GrowthConfig& cfg)
{
    if (!s.hyperbolic()) throw Error(ErrorKind::Config, std::string("manifold growth needs a saddle, got ") + to_string(s.cls));
    ManifoldArc arc;
    arc.saddle = s;
    arc.branch = branch;
    const bool unstable = is_unstable(branch);
    const bool plus = branch == Branch::UnstablePlus || branch == Branch::StablePlus;
    arc.direction = (plus ? 1.0 : -1.0) * (unstable ? s.eig_u : s.eig_s);
    arc.steps_per_domain = s.cls == PointClass::FlipSaddle ? 2 : 1;
    const double mult = unstable ? std::abs(s.lambda_u) : 1.0 / std::abs(s.lambda_s);
    arc.ratio = std::pow(mult, arc.steps_per_domain);
    arc.delta0 = cfg.delta0 > 0.0 ? cfg.delta0 : 1e-7 * std::max(1.0, std::abs(s.lambda_u));

    auto eval = [&](double sigma) { return branch_point(lift, arc, sigma); };

    std::vector<Vertex> verts;
    verts.push_back({-1.0, s.z});
    const int m = std::max(2, cfg.initial_points);
    for (int i = 0; i <= m; ++i) {
        const double sg = static_cast<double>(i) / m;
        verts.push_back({sg, eval(sg)});
    }

    auto needs = [&](const std::vector<Vertex>& v, std::size_t i) {
        // segment i joins v[i], v[i+1]
        const double len = distance(v[i].p, v[i + 1].p);
        if (len > cfg.h_max) return true;
        const double ta = i >= 1 ? turning(v[i - 1].p, v[i].p, v[i + 1].p) : 0.0;
        const double tb = i + 2 < v.size() ? turning(v[i].p, v[i + 1].p, v[i + 2].p) : 0.0;
        if (std::max(ta, tb) > cfg.theta_max) return true;
        return len * std::max(ta, tb) / 8.0 > cfg.sag_max;
    };

    // refines segments with index >= from; returns index of the first unresolvable segment or npos
    auto refine = [&](std::size_t from) -> std::size_t {
        for (int pass = 0; pass < 200; ++pass) {
            std::vector<Vertex> out;
            out.reserve(verts.size() + verts.size() / 4);
            for (std::size_t i = 0; i < from && i < verts.size(); ++i) out.push_back(verts[i]);
            bool inserted = false;
            for (std::size_t i = from; i < verts.size(); ++i) {
                out.push_back(verts[i]);
                if (i + 1 >= verts.size()) break;
                if (verts[i].sigma < 0.0) continue; // the linear seed segment is exact to first order
                if (!needs(verts, i)) continue;
                const double gap = verts[i + 1].sigma - verts[i].sigma;
                if (gap < cfg.min_param_gap) return i;
                const double mid = verts[i].sigma + 0.5 * gap;
                out.push_back({mid, eval(mid)});
                inserted = true;
            }
            verts.swap(out);
            if (!inserted) return std::string::npos;
            if (verts.size() > cfg.max_points) return verts.size() - 2;
        }
        return verts.size() - 2;
    };

    auto finish = [&](std::size_t cut, const std::string& why) {
        if (cut != std::string::npos) {
            verts.resize(cut + 1);
            arc.truncated = true;
            arc.diagnostic = why;
        }
        double total = 0.0;
        std::size_t end = verts.size();
        for (std::size_t i = 1; i < verts.size(); ++i) {
            total += distance(verts[i - 1].p, verts[i].p);
            if (total >= cfg.budget) {
                end = i + 1;
                break;
            }
        }
        verts.resize(end);
        arc.points.clear();
        arc.sigma.clear();
        for (const auto& v : verts) {
            arc.points.push_back(v.p);
            arc.sigma.push_back(v.sigma);
        }
        arc.arclength = 0.0;
        for (std::size_t i = 1; i < arc.points.size(); ++i) arc.arclength += distance(arc.points[i - 1], arc.points[i]);
        arc.domains = static_cast<int>(std::floor(std::max(0.0, arc.sigma.back() - 1e-12))) + 1;
        return arc;
    };

    std::size_t bad = refine(1);
    if (bad != std::string::npos) return finish(bad, "curvature blowup in the seed domain");

    double length = 0.0;
    for (std::size_t i = 1; i < verts.size(); ++i) length += distance(verts[i - 1].p, verts[i].p);

    for (int k = 1; k < cfg.max_domains && length < cfg.budget; ++k) {
        // image of domain k-1 (sigma in (k-1, k]) becomes the initial sampling of domain k
        const std::size_t start = verts.size() - 1;
        std::vector<Vertex> next;
        for (std::size_t i = 0; i < verts.size(); ++i) {
            const double sg = verts[i].sigma;
            if (sg > static_cast<double>(k - 1) && sg <= static_cast<double>(k))
                next.push_back({sg + 1.0, growth_step(lift, arc, verts[i].p - arc.translate.as_point())});
        }
        for (const auto& v : next) {
            if (!is_finite(v.p)) return finish(start, "non-finite manifold point");
            verts.push_back(v);
        }
        // refinement only lengthens the polyline, so vertices past the budget point are never needed
        double acc = 0.0;
        for (std::size_t i = 1; i < verts.size(); ++i) {
            acc += distance(verts[i - 1].p, verts[i].p);
            if (acc >= cfg.budget) {
                verts.resize(std::min(verts.size(), i + 2));
                break;
            }
        }
        bad = refine(start);
        if (bad != std::string::npos) {
            std::ostringstream os;
            os << "turning/spacing bounds unresolvable at sigma " << verts[bad].sigma << " after maximal refinement";
            return finish(bad, os.str());
        }
        length = 0.0;
        for (std::size_t i = 1; i < verts.size(); ++i) length += distance(verts[i - 1].p, verts[i].p);
    }
    return finish(std::string::npos, "");
}

ManifoldArc grow_branch(const LiftFamily& fam, const FamilyParams& params, const SaddleRecord& s, Branch branch,
                        const GrowthConfig& cfg)
{
    return grow_branch(fam.bind(params), s, branch, cfg);
}

std::vector<ManifoldArc> grow_all_branches(const BoundLift& lift, const SaddleRecord& s, const GrowthConfig& cfg,
                                           int threads)
{
    const Branch order[] = {Branch::UnstablePlus, Branch::UnstableMinus, Branch::StablePlus, Branch::StableMinus};
    std::vector<ManifoldArc> arcs(4);
    parallel_for(4, threads, [&](std::size_t i) { arcs[i] = grow_branch(lift, s, order[i], cfg); });
    return arcs;
}

double invariance_residual(const BoundLift& lift, const ManifoldArc& arc)
{
    if (arc.points.empty()) throw Error(ErrorKind::Config, "empty arc");
    if (arc.points.size() < 2) return 0.0;
    double span = 0.0;
    for (std::size_t i = 1; i < arc.points.size(); ++i) span = std::max(span, distance(arc.points[i - 1], arc.points[i]));
    const SegmentIndex index(arc.points, std::max(span, 1e-9));
    const double sigma_max = arc.sigma.back();
    double worst = 0.0;
    for (std::size_t i = 0; i < arc.points.size(); ++i) {
        if (arc.sigma[i] >= 0.0 && arc.sigma[i] + 1.0 > sigma_max) continue;
        const PlanePoint img = growth_step(lift, arc, arc.points[i] - arc.translate.as_point()) + arc.translate.as_point();
        worst = std::max(worst, index.nearest(img).dist);
    }
    return worst;
}

double invariance_residual(const LiftFamily& fam, const FamilyParams& params, const ManifoldArc& arc)
{
    return invariance_residual(fam.bind(params), arc);
}

ManifoldArc translate_arc(const ManifoldArc& arc, IntVec v)
{
    ManifoldArc out = arc;
    const PlanePoint d = v.as_point();
    for (auto& p : out.points) p += d;
    out.translate = arc.translate + v;
    return out;
}

std::vector<PlanePoint> sub_polyline(const std::vector<PlanePoint>& pts, double s0, double s1)
{
    std::vector<PlanePoint> out;
    if (pts.empty()) return out;
    if (s1 < s0) std::swap(s0, s1);
    double acc = 0.0;
    auto lerp = [](PlanePoint a, PlanePoint b, double t) { return a + t * (b - a); };
    if (s0 <= 0.0) out.push_back(pts[0]);
    for (std::size_t i = 1; i < pts.size(); ++i) {
        const double len = distance(pts[i - 1], pts[i]);
        const double a = acc, b = acc + len;
        if (len > 0.0) {
            if (s0 > a && s0 < b) out.push_back(lerp(pts[i - 1], pts[i], (s0 - a) / len));
            if (b >= s0 && b <= s1) out.push_back(pts[i]);
            if (s1 > a && s1 < b) {
                out.push_back(lerp(pts[i - 1], pts[i], (s1 - a) / len));
                break;
            }
        }
        acc = b;
        if (acc > s1) break;
    }
    return out;
}

BoundednessResult boundedness_probe(const ManifoldArc& arc, double R, double budget)
{
    BoundednessResult res;
    if (arc.points.size() < 2) {
        res.evidence = "arc too short";
        return res;
    }
    const PlanePoint c = arc.points.front();
    const auto cum = cumulative_length(arc.points);
    const double total = std::min(cum.back(), budget);
    double max_early = 0.0, max_late = 0.0;
    for (std::size_t i = 0; i < arc.points.size() && cum[i] <= total; ++i) {
        const double d = distance(arc.points[i], c);
        (cum[i] <= 0.75 * total ? max_early : max_late) = std::max(cum[i] <= 0.75 * total ? max_early : max_late, d);
    }
    res.max_distance = std::max(max_early, max_late);
    std::ostringstream os;
    os << "max distance " << res.max_distance << " (first 3/4: " << max_early << ", last 1/4: " << max_late << ")";
    res.evidence = os.str();
    res.unbounded = res.max_distance > R && max_late > max_early;
    return res;
}

bool check_arc_bounds(const ManifoldArc& arc, const GrowthConfig& cfg, std::string* why)
{
    const auto& p = arc.points;
    auto fail = [&](std::size_t i, const char* what) {
        if (why) *why = std::string(what) + " at vertex " + std::to_string(i);
        return false;
    };
    for (std::size_t i = 0; i + 1 < p.size(); ++i) {
        const double len = distance(p[i], p[i + 1]);
        if (i > 0 && len > cfg.h_max * (1 + 1e-12)) return fail(i, "spacing");
        if (i >= 1 && i + 1 < p.size()) {
            const double t = turning(p[i - 1], p[i], p[i + 1]);
            if (i >= 2 && t > cfg.theta_max * (1 + 1e-12)) return fail(i, "turning");
        }
    }
    return true;
}

} // namespace rotolab
