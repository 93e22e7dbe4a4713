#include "rotolab/chains.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rotolab/error.hpp"

namespace rotolab {

namespace {

constexpr double kJoinTol = 1e-5;

PlanePoint point_at_length(const std::vector<PlanePoint>& pts, double s)
{
    const auto sub = sub_polyline(pts, 0.0, s);
    return sub.empty() ? pts.front() : sub.back();
}

void append(ChainCurve& c, const std::vector<PlanePoint>& piece, ChainPiece meta)
{
    meta.vertices = piece.size();
    if (piece.empty()) return;
    std::size_t from = 0;
    if (!c.points.empty()) {
        c.max_joint_gap = std::max(c.max_joint_gap, distance(c.points.back(), piece.front()));
        from = 1;
    }
    for (std::size_t i = from; i < piece.size(); ++i) c.points.push_back(piece[i]);
    c.composition.push_back(std::move(meta));
}

std::vector<PlanePoint> reversed(std::vector<PlanePoint> v)
{
    std::reverse(v.begin(), v.end());
    return v;
}

std::vector<PlanePoint> shifted(const std::vector<PlanePoint>& v, IntVec t)
{
    std::vector<PlanePoint> out = v;
    for (auto& p : out) p += t.as_point();
    return out;
}

// unstable piece P -> x and reversed stable piece x -> P + t, joined exactly at the event point
void manifold_legs(ChainCurve& c, const ManifoldArc& wu, const ManifoldArc& ws, const IntersectionEvent& ev)
{
    if (wu.points.empty() || ws.points.empty()) throw Error(ErrorKind::Mismatch, "empty arc");
    const IntVec t = ev.translate;
    const std::vector<PlanePoint> ws_t = shifted(ws.points, t - ws.translate);
    const PlanePoint xu = point_at_length(wu.points, ev.s_u);
    const PlanePoint xs = point_at_length(ws_t, ev.s_s);
    if (distance(xu, ev.point) > kJoinTol || distance(xs, ev.point) > kJoinTol) {
        std::ostringstream os;
        os << "event at (" << ev.point.x << ", " << ev.point.y << ") is not on the given arcs (offsets "
           << distance(xu, ev.point) << ", " << distance(xs, ev.point) << ")";
        throw Error(ErrorKind::Mismatch, os.str());
    }
    auto leg_u = sub_polyline(wu.points, 0.0, ev.s_u);
    leg_u.back() = ev.point;
    leg_u.front() = wu.saddle.z;
    auto leg_s = sub_polyline(ws_t, 0.0, ev.s_s);
    leg_s.back() = ev.point;
    leg_s.front() = ws.saddle.z + t.as_point();
    append(c, leg_u, {to_string(wu.branch), {0, 0}, false, 0});
    append(c, reversed(leg_s), {to_string(ws.branch), t, true, 0});
}

void finalize(ChainCurve& c)
{
    c.diameter = diameter(c.points);
}

} // namespace

const char* to_string(ChainRole r)
{
    return r == ChainRole::GammaV ? "gamma_v" : "gamma_h";
}

ChainCurve build_gamma_v(const ManifoldArc& lambda_u, const ManifoldArc& lambda_s, const IntersectionEvent& event)
{
    if (!(event.translate == IntVec{0, -1}))
        throw Error(ErrorKind::Mismatch, "gamma_v needs an event with translate (0,-1)");
    if (event.kind != EventKind::Transverse) throw Error(ErrorKind::Mismatch, "gamma_v needs a transverse event");
    ChainCurve c;
    c.role = ChainRole::GammaV;
    c.base = lambda_u.saddle.z;
    c.start_cell = {0, 0};
    c.end_cell = {0, -1};
    manifold_legs(c, lambda_u, lambda_s, event);
    finalize(c);
    return c;
}

ChainCurve build_gamma_h(const ManifoldArc& w_u, const ManifoldArc& lambda_s, const ChainCurve& gamma_v,
                         const IntersectionEvent& event)
{
    if (event.translate.a != 1) throw Error(ErrorKind::NotFound, "gamma_h needs an event with translate (1,b)");
    if (event.kind != EventKind::Transverse) throw Error(ErrorKind::Mismatch, "gamma_h needs a transverse event");
    const long b = event.translate.b;
    ChainCurve c;
    c.role = ChainRole::GammaH;
    c.base = w_u.saddle.z;
    c.start_cell = {0, 0};
    c.end_cell = {1, 0};
    manifold_legs(c, w_u, lambda_s, event);
    if (b < 0) {
        // from P+(1,b) up to P+(1,0): gamma_v+(1,j) joins P+(1,j) to P+(1,j-1), walked backwards
        for (long j = b + 1; j <= 0; ++j)
            append(c, reversed(placed(gamma_v, {1, j})), {"gamma_v", {1, j}, true, 0});
    } else {
        for (long j = b; j >= 1; --j) append(c, placed(gamma_v, {1, j}), {"gamma_v", {1, j}, false, 0});
    }
    finalize(c);
    return c;
}

std::vector<PlanePoint> placed(const ChainCurve& c, IntVec offset)
{
    return shifted(c.points, offset);
}

double compute_Kf(double diam_v, double diam_h)
{
    return 4.0 * (3.0 + 2.0 * std::max(diam_v, diam_h)) + 10.0;
}

double compute_Kf(const ChainCurve& gamma_v, const ChainCurve& gamma_h)
{
    return compute_Kf(gamma_v.diameter, gamma_h.diameter);
}

double width_bound(double diam_v, double diam_h)
{
    return 3.0 + 2.0 * std::max(diam_v, diam_h);
}

ThetaBand build_theta(const ChainCurve& gamma_h, const ChainCurve& gamma_v, PlanePoint w, PlanePoint v, double span)
{
    if (std::abs(norm(w) - 1.0) > 1e-9 || std::abs(norm(v) - 1.0) > 1e-9 || std::abs(dot(w, v)) > 1e-9)
        throw Error(ErrorKind::Config, "theta needs orthonormal direction w and normal v");
    ThetaBand th;
    th.w = w;
    th.v = v;
    th.bound = width_bound(gamma_v.diameter, gamma_h.diameter);
    th.Kf = compute_Kf(gamma_v, gamma_h);

    struct Step {
        IntVec e;
    };
    const IntVec moves[] = {{1, 0}, {0, -1}, {-1, 0}, {0, 1}};

    // walks from the origin along dir until the lattice projection passes span
    auto walk = [&](PlanePoint dir) {
        std::vector<IntVec> path{{0, 0}};
        IntVec c{0, 0};
        int guard = 0;
        while (dot(c.as_point(), dir) < span && guard++ < 100000) {
            IntVec best{0, 0};
            double best_off = INFINITY;
            for (const IntVec e : moves) {
                const double adv = dot(e.as_point(), dir);
                if (adv <= 1e-12) continue;
                const double off = std::abs(dot((c + e).as_point(), v));
                if (off < best_off - 1e-12) {
                    best_off = off;
                    best = e;
                }
            }
            c = c + best;
            path.push_back(c);
        }
        return path;
    };
    const auto fwd = walk(w);
    const auto bwd = walk(-w);
    for (std::size_t i = bwd.size(); i-- > 1;) th.lattice.push_back(bwd[i]);
    for (const IntVec& p : fwd) th.lattice.push_back(p);

    for (std::size_t i = 0; i + 1 < th.lattice.size(); ++i) {
        const IntVec a = th.lattice[i], d = th.lattice[i + 1] - a;
        Placement pl{};
        std::vector<PlanePoint> piece;
        if (d == IntVec{1, 0}) pl = {a, ChainRole::GammaH, false};
        else if (d == IntVec{-1, 0}) pl = {a + IntVec{-1, 0}, ChainRole::GammaH, true};
        else if (d == IntVec{0, -1}) pl = {a, ChainRole::GammaV, false};
        else pl = {a + IntVec{0, 1}, ChainRole::GammaV, true};
        piece = placed(pl.role == ChainRole::GammaH ? gamma_h : gamma_v, pl.offset);
        if (pl.reversed) std::reverse(piece.begin(), piece.end());
        th.placements.push_back(pl);
        const std::size_t from = th.points.empty() ? 0 : 1;
        for (std::size_t k = from; k < piece.size(); ++k) th.points.push_back(piece[k]);
    }
    if (th.points.empty()) th.points.push_back(gamma_h.base);
    th.l_minus = INFINITY;
    th.l_plus = -INFINITY;
    th.w_min = INFINITY;
    th.w_max = -INFINITY;
    for (const auto& p : th.points) {
        const double pv = dot(p, v), pw = dot(p, w);
        th.l_minus = std::min(th.l_minus, pv);
        th.l_plus = std::max(th.l_plus, pv);
        th.w_min = std::min(th.w_min, pw);
        th.w_max = std::max(th.w_max, pw);
    }
    th.width = th.l_plus - th.l_minus;
    return th;
}

ThetaBand translate_theta(const ThetaBand& th, IntVec cd)
{
    ThetaBand out = th;
    const PlanePoint d = cd.as_point();
    for (auto& p : out.points) p += d;
    for (auto& l : out.lattice) l = l + cd;
    for (auto& pl : out.placements) pl.offset = pl.offset + cd;
    out.l_minus += dot(d, th.v);
    out.l_plus += dot(d, th.v);
    out.w_min += dot(d, th.w);
    out.w_max += dot(d, th.w);
    return out;
}

WidthCheck width_check(const ThetaBand& th)
{
    return {th.width <= th.bound, th.width, th.bound};
}

LineHitReport line_hit_check(const ThetaBand& th, int lines, double inset)
{
    LineHitReport rep;
    rep.lines = lines;
    const double lo = th.w_min + inset, hi = th.w_max - inset;
    if (!(hi > lo) || th.points.size() < 2) return rep;
    std::vector<double> proj(th.points.size());
    for (std::size_t i = 0; i < th.points.size(); ++i) proj[i] = dot(th.points[i], th.w);
    for (int k = 0; k < lines; ++k) {
        const double c = lines == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * k / (lines - 1);
        bool hit = false;
        for (std::size_t i = 0; i + 1 < proj.size() && !hit; ++i)
            hit = (proj[i] - c) * (proj[i + 1] - c) <= 0.0;
        rep.hit += hit ? 1 : 0;
    }
    rep.pass = rep.hit == rep.lines;
    return rep;
}

ChainValidation validate_chain(const ChainCurve& c, double tol)
{
    ChainValidation v;
    v.lattice_exact = (c.end_cell - c.start_cell) == c.nominal();
    if (c.points.empty()) return v;
    const PlanePoint s = c.base + c.start_cell.as_point();
    const PlanePoint e = c.base + c.end_cell.as_point();
    v.endpoint_error = std::max(distance(c.points.front(), s), distance(c.points.back(), e));
    v.connected = c.max_joint_gap <= tol && v.endpoint_error <= tol;
    return v;
}

DisjointReport disjoint_check(const ThetaBand& th, IntVec cd)
{
    DisjointReport rep;
    const ThetaBand moved = translate_theta(th, cd);
    rep.projection = dot(cd.as_point(), th.v);
    rep.gap = min_gap(th.points, moved.points).distance;
    rep.disjoint = rep.gap > 0.0;
    rep.above = true;
    for (const auto& p : moved.points)
        if (!(dot(p, th.v) > th.l_plus)) {
            rep.above = false;
            break;
        }
    return rep;
}

} // namespace rotolab
