#include "rotolab/intersections.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "rotolab/error.hpp"
#include "rotolab/parallel.hpp"
#include "rotolab/spatial_hash.hpp"

namespace rotolab {

namespace {

double line_angle(PlanePoint t1, PlanePoint t2)
{
    const double a = std::abs(std::atan2(cross(t1, t2), dot(t1, t2)));
    return a > std::numbers::pi / 2 ? std::numbers::pi - a : a;
}

double pick_cell(const std::vector<PlanePoint>& pts)
{
    double mx = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) mx = std::max(mx, distance(pts[i], pts[i + 1]));
    const Box b = bounding_box(pts);
    const double extent = std::max(b.hi.x - b.lo.x, b.hi.y - b.lo.y);
    double cell = std::max(mx, extent / 4096.0);
    if (!(cell > 0.0)) cell = 1.0;
    return cell;
}

// a ray from the origin-point c toward r lies strictly inside the CCW sweep from r1 to r2
bool in_sweep(PlanePoint c, PlanePoint r1, PlanePoint r2, PlanePoint r)
{
    const int o12 = orient2d(c, r1, r2);
    const int o1r = orient2d(c, r1, r);
    const int or2 = orient2d(c, r, r2);
    if (o12 > 0) return o1r > 0 && or2 > 0;
    if (o12 < 0) return o1r > 0 || or2 > 0;
    // r1 and r2 collinear through c
    if (dot(r1 - c, r2 - c) < 0) return o1r > 0; // straight angle: left of r1 -> r2 line
    return !(o1r == 0 && dot(r - c, r1 - c) > 0);  // zero sweep: everything else
}

struct Local {
    PlanePoint in, out;
    bool has_in = false, has_out = false;
};

// neighbours of contact c on polyline p, where c lies on segment i
Local local_rays(const std::vector<PlanePoint>& p, std::size_t i, PlanePoint c)
{
    Local l;
    if (c == p[i]) {
        if (i > 0) {
            l.in = p[i - 1];
            l.has_in = true;
        }
        l.out = p[i + 1];
        l.has_out = true;
    } else if (c == p[i + 1]) {
        l.in = p[i];
        l.has_in = true;
        if (i + 2 < p.size()) {
            l.out = p[i + 2];
            l.has_out = true;
        }
    } else {
        l.in = p[i];
        l.out = p[i + 1];
        l.has_in = l.has_out = true;
    }
    return l;
}

struct Contact {
    PlanePoint c;
    std::size_t i, j;
};

// closed-segment contact for a pair with at least one zero orientation
bool degenerate_contact(PlanePoint p0, PlanePoint p1, PlanePoint q0, PlanePoint q1, int o1, int o2, int o3, int o4,
                        PlanePoint& c)
{
    auto on_seg = [](PlanePoint a, PlanePoint b, PlanePoint p) {
        return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
               p.y <= std::max(a.y, b.y);
    };
    if (o1 == 0 && o2 == 0) {
        // collinear
        const PlanePoint d = p1 - p0;
        auto proj = [&](PlanePoint x) { return dot(x - p0, d); };
        const double a0 = 0.0, a1 = dot(d, d);
        const double b0 = std::min(proj(q0), proj(q1)), b1 = std::max(proj(q0), proj(q1));
        const double lo = std::max(a0, b0), hi = std::min(a1, b1);
        if (lo > hi) return false;
        if (lo < hi) throw Error(ErrorKind::DegenerateOverlap, "polylines share a collinear sub-segment");
        for (PlanePoint x : {q0, q1})
            if (proj(x) == lo) {
                c = x;
                return true;
            }
        c = p0;
        return true;
    }
    if (o1 == 0 && on_seg(p0, p1, q0)) { c = q0; return true; }
    if (o2 == 0 && on_seg(p0, p1, q1)) { c = q1; return true; }
    if (o3 == 0 && on_seg(q0, q1, p0)) { c = p0; return true; }
    if (o4 == 0 && on_seg(q0, q1, p1)) { c = p1; return true; }
    return false;
}

struct PolyData {
    const std::vector<PlanePoint>* pts;
    std::vector<double> cum;
};

std::vector<IntersectionEvent> intersect_core(const PolyData& A, const SegmentIndex& index_a, const PolyData& B,
                                              const IntersectConfig& cfg, const Box& box_a)
{
    const auto& a = *A.pts;
    const auto& b = *B.pts;
    std::vector<IntersectionEvent> events;
    std::vector<Contact> contacts;
    if (a.size() < 2 || b.size() < 2) return events;
    if (!box_a.overlaps(bounding_box(b))) return events;
    for (std::size_t j = 0; j + 1 < b.size(); ++j) {
        const PlanePoint q0 = b[j], q1 = b[j + 1];
        Box sb;
        sb.add(q0);
        sb.add(q1);
        if (!sb.overlaps(box_a)) continue;
        for (std::uint32_t i : index_a.candidates(sb)) {
            const PlanePoint p0 = a[i], p1 = a[i + 1];
            if (std::max(p0.x, p1.x) < sb.lo.x || std::min(p0.x, p1.x) > sb.hi.x || std::max(p0.y, p1.y) < sb.lo.y ||
                std::min(p0.y, p1.y) > sb.hi.y)
                continue;
            const int o1 = orient2d(p0, p1, q0), o2 = orient2d(p0, p1, q1);
            if (o1 * o2 > 0) continue;
            const int o3 = orient2d(q0, q1, p0), o4 = orient2d(q0, q1, p1);
            if (o3 * o4 > 0) continue;
            if (o1 * o2 < 0 && o3 * o4 < 0) {
                const PlanePoint da = p1 - p0, db = q1 - q0;
                const double den = cross(da, db);
                const double ta = std::clamp(cross(q0 - p0, db) / den, 0.0, 1.0);
                const double tb = std::clamp(cross(q0 - p0, da) / den, 0.0, 1.0);
                IntersectionEvent e;
                e.point = 0.5 * ((p0 + ta * da) + (q0 + tb * db));
                e.seg_u = i;
                e.seg_s = j;
                e.s_u = A.cum[i] + ta * (A.cum[i + 1] - A.cum[i]);
                e.s_s = B.cum[j] + tb * (B.cum[j + 1] - B.cum[j]);
                e.sign = den > 0 ? 1 : -1;
                e.angle = line_angle(da, db);
                e.kind = e.angle < cfg.angle_min ? EventKind::TangencyCandidate : EventKind::Transverse;
                events.push_back(e);
                continue;
            }
            PlanePoint c;
            if (degenerate_contact(p0, p1, q0, q1, o1, o2, o3, o4, c)) contacts.push_back({c, i, j});
        }
    }

    // exact contacts: group by point, classify by the local sectors
    std::sort(contacts.begin(), contacts.end(), [](const Contact& x, const Contact& y) {
        if (x.c.x != y.c.x) return x.c.x < y.c.x;
        if (x.c.y != y.c.y) return x.c.y < y.c.y;
        return x.i != y.i ? x.i < y.i : x.j < y.j;
    });
    for (std::size_t k = 0; k < contacts.size();) {
        std::size_t e = k;
        while (e < contacts.size() && contacts[e].c == contacts[k].c) ++e;
        const Contact& ct = contacts[k];
        const Local la = local_rays(a, ct.i, ct.c);
        const Local lb = local_rays(b, ct.j, ct.c);
        IntersectionEvent ev;
        ev.point = ct.c;
        ev.seg_u = ct.i;
        ev.seg_s = ct.j;
        const double la_len = distance(a[ct.i], a[ct.i + 1]);
        const double lb_len = distance(b[ct.j], b[ct.j + 1]);
        ev.s_u = A.cum[ct.i] + (la_len > 0 ? distance(a[ct.i], ct.c) : 0.0);
        ev.s_s = B.cum[ct.j] + (lb_len > 0 ? distance(b[ct.j], ct.c) : 0.0);
        const PlanePoint ta = (la.has_out ? la.out : ct.c) - (la.has_in ? la.in : ct.c);
        const PlanePoint tb = (lb.has_out ? lb.out : ct.c) - (lb.has_in ? lb.in : ct.c);
        ev.angle = line_angle(ta, tb);
        bool crossing = false;
        if (la.has_in && la.has_out && lb.has_in && lb.has_out) {
            const bool s_in = in_sweep(ct.c, lb.in, lb.out, la.in);
            const bool s_out = in_sweep(ct.c, lb.in, lb.out, la.out);
            crossing = s_in != s_out;
        }
        if (crossing) {
            ev.sign = cross(ta, tb) > 0 ? 1 : (cross(ta, tb) < 0 ? -1 : 0);
            ev.kind = ev.angle < cfg.angle_min || ev.sign == 0 ? EventKind::TangencyCandidate : EventKind::Transverse;
        } else {
            ev.touch = true;
            ev.sign = 0;
            ev.kind = EventKind::TangencyCandidate;
        }
        events.push_back(ev);
        k = e;
    }
    std::sort(events.begin(), events.end(), [](const IntersectionEvent& x, const IntersectionEvent& y) {
        return x.s_u != y.s_u ? x.s_u < y.s_u : x.s_s < y.s_s;
    });
    return events;
}

int side_of(PlanePoint a, PlanePoint b, PlanePoint p)
{
    return orient2d(a, b, p);
}

// bisection on the arcs' own parameterizations around a crossing
void refine_event(const BoundLift& lift, const ManifoldArc& au, const ManifoldArc& as, IntersectionEvent& ev, double tol)
{
    const std::size_t i = ev.seg_u, j = ev.seg_s;
    if (au.sigma.size() != au.points.size() || as.sigma.size() != as.points.size()) return;
    if (au.sigma[i] < 0.0 || as.sigma[j] < 0.0 || ev.touch) return;
    double ua_s = au.sigma[i], ub_s = au.sigma[i + 1], sa_s = as.sigma[j], sb_s = as.sigma[j + 1];
    PlanePoint ua = au.points[i], ub = au.points[i + 1], sa = as.points[j], sb = as.points[j + 1];
    for (int it = 0; it < 200; ++it) {
        const bool u_done = distance(ua, ub) < tol || ub_s - ua_s < 1e-15;
        const bool s_done = distance(sa, sb) < tol || sb_s - sa_s < 1e-15;
        if (u_done && s_done) break;
        if (!u_done) {
            const double m = 0.5 * (ua_s + ub_s);
            const PlanePoint um = branch_point(lift, au, m);
            const int s0 = side_of(sa, sb, ua), sm = side_of(sa, sb, um), s1 = side_of(sa, sb, ub);
            if (s0 * sm < 0 || sm == 0) { ub = um; ub_s = m; }
            else if (sm * s1 < 0) { ua = um; ua_s = m; }
            else return;
        }
        if (!s_done) {
            const double m = 0.5 * (sa_s + sb_s);
            const PlanePoint smid = branch_point(lift, as, m);
            const int s0 = side_of(ua, ub, sa), sm = side_of(ua, ub, smid), s1 = side_of(ua, ub, sb);
            if (s0 * sm < 0 || sm == 0) { sb = smid; sb_s = m; }
            else if (sm * s1 < 0) { sa = smid; sa_s = m; }
            else return;
        }
    }
    const PlanePoint da = ub - ua, db = sb - sa;
    const double den = cross(da, db);
    if (den == 0.0) return;
    const double t = std::clamp(cross(sa - ua, db) / den, 0.0, 1.0);
    ev.point = ua + t * da;
    const double ang = line_angle(da, db);
    if (std::isfinite(ang)) {
        ev.angle = ang;
        ev.kind = ev.angle < 1e-3 && ev.kind == EventKind::Transverse ? EventKind::TangencyCandidate : ev.kind;
    }
}

} // namespace

const char* to_string(EventKind k)
{
    return k == EventKind::Transverse ? "transverse" : "tangency-candidate";
}

std::vector<IntersectionEvent> find_intersections(const std::vector<PlanePoint>& a, const std::vector<PlanePoint>& b,
                                                  const IntersectConfig& cfg)
{
    const SegmentIndex ia(a, pick_cell(a));
    PolyData A{&a, cumulative_length(a)};
    PolyData B{&b, cumulative_length(b)};
    return intersect_core(A, ia, B, cfg, bounding_box(a));
}

std::vector<IntersectionEvent> find_intersections(const ManifoldArc& arc_u, const ManifoldArc& arc_s,
                                                  const IntersectConfig& cfg, const BoundLift* lift)
{
    auto ev = find_intersections(arc_u.points, arc_s.points, cfg);
    const IntVec tr = arc_s.translate - arc_u.translate;
    for (auto& e : ev) {
        e.translate = tr;
        e.branch_u = arc_u.branch;
        e.branch_s = arc_s.branch;
        if (lift) {
            refine_event(*lift, arc_u, arc_s, e, cfg.refine_tol);
            if (e.kind == EventKind::Transverse && e.angle < cfg.angle_min) e.kind = EventKind::TangencyCandidate;
        }
    }
    return ev;
}

bool TranslateSpectrum::has_transverse(IntVec v) const
{
    auto it = hits.find(v);
    if (it == hits.end()) return false;
    return std::any_of(it->second.begin(), it->second.end(),
                       [](const IntersectionEvent& e) { return e.kind == EventKind::Transverse; });
}

std::vector<IntVec> TranslateSpectrum::transverse_translates() const
{
    std::vector<IntVec> out;
    for (const auto& [v, evs] : hits)
        if (has_transverse(v)) out.push_back(v);
    return out;
}

TranslateSpectrum spectrum_from_arcs(const std::vector<ManifoldArc>& unstable, const std::vector<ManifoldArc>& stable,
                                     int window, const IntersectConfig& cfg, const BoundLift* lift)
{
    TranslateSpectrum spec;
    spec.window = window;
    for (long a = -window; a <= window; ++a)
        for (long b = -window; b <= window; ++b) spec.scanned.push_back({a, b});

    std::vector<SegmentIndex> idx;
    std::vector<PolyData> ud;
    std::vector<Box> ubox;
    for (const auto& u : unstable) {
        idx.emplace_back(u.points, pick_cell(u.points));
        ud.push_back({&u.points, cumulative_length(u.points)});
        ubox.push_back(bounding_box(u.points));
    }
    std::vector<std::vector<IntersectionEvent>> per(spec.scanned.size());
    parallel_for(spec.scanned.size(), cfg.threads, [&](std::size_t k) {
        const IntVec v = spec.scanned[k];
        for (std::size_t si = 0; si < stable.size(); ++si) {
            const ManifoldArc st = translate_arc(stable[si], v);
            const PolyData sd{&st.points, cumulative_length(st.points)};
            for (std::size_t ui = 0; ui < unstable.size(); ++ui) {
                auto evs = intersect_core(ud[ui], idx[ui], sd, cfg, ubox[ui]);
                for (auto& e : evs) {
                    if (v.a == 0 && v.b == 0 && e.s_u <= 1e-12 && e.s_s <= 1e-12) continue; // the saddle itself
                    e.translate = v;
                    e.branch_u = unstable[ui].branch;
                    e.branch_s = stable[si].branch;
                    if (lift) refine_event(*lift, unstable[ui], st, e, cfg.refine_tol);
                    per[k].push_back(e);
                }
            }
        }
    });
    for (std::size_t k = 0; k < per.size(); ++k)
        if (!per[k].empty()) spec.hits[spec.scanned[k]] = std::move(per[k]);
    for (const auto& [v, evs] : spec.hits) {
        auto it = spec.hits.find(-v);
        if (it == spec.hits.end()) {
            spec.unmatched_reflections.push_back(v);
            continue;
        }
        double ma = 0.0, mb = 0.0;
        for (const auto& e : evs) ma = std::max(ma, e.angle);
        for (const auto& e : it->second) mb = std::max(mb, e.angle);
        spec.max_angle_asymmetry = std::max(spec.max_angle_asymmetry, std::abs(ma - mb));
    }
    return spec;
}

TranslateSpectrum translate_spectrum(const BoundLift& lift, const SaddleRecord& s, const SpectrumConfig& cfg)
{
    auto arcs = grow_all_branches(lift, s, cfg.growth, cfg.intersect.threads);
    std::vector<ManifoldArc> unstable{arcs[0], arcs[1]}, stable{arcs[2], arcs[3]};
    return spectrum_from_arcs(unstable, stable, cfg.window, cfg.intersect, cfg.refine ? &lift : nullptr);
}

TranslateSpectrum translate_spectrum(const LiftFamily& fam, const FamilyParams& params, const SaddleRecord& s,
                                     const SpectrumConfig& cfg)
{
    if (fam.equivariant) return translate_spectrum(fam.bind(params), s, cfg);
    // chart families have no deck group: only the untranslated pair is meaningful
    SpectrumConfig local = cfg;
    local.window = 0;
    return translate_spectrum(fam.bind(params), s, local);
}

double ray_polygon_distance(PlanePoint u, const std::vector<PlanePoint>& poly, double s_min)
{
    if (poly.empty()) return INFINITY;
    u = normalized(u);
    auto dist_at = [&](double s) {
        const PlanePoint p = s * u;
        const double d = signed_depth(poly, p);
        return std::max(0.0, -d);
    };
    // distance to a convex set is convex along the ray; golden-section on [s_min, s_max]
    double s_max = s_min + 1.0;
    for (const auto& v : poly) s_max = std::max(s_max, dot(v, u) + 1.0);
    double lo = s_min, hi = s_max;
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
    double f1 = dist_at(x1), f2 = dist_at(x2);
    for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
        if (f1 <= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = dist_at(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = dist_at(x2);
        }
    }
    return std::min({f1, f2, dist_at(s_min)});
}

Lemma0Report lemma0_check(const TranslateSpectrum& spec, const RotationSetApprox& outer, const SupportData& v, double tol)
{
    Lemma0Report rep;
    std::ostringstream os;
    for (const IntVec t : spec.transverse_translates()) {
        Lemma0Entry e;
        e.translate = t;
        e.dot = dot(t.as_point(), v.v);
        e.dot_ok = e.dot <= tol;
        if (t.a == 0 && t.b == 0) {
            e.cone_ok = signed_depth(outer.vertices, {0.0, 0.0}) >= -tol;
        } else {
            e.cone_ok = ray_polygon_distance(t.as_point(), outer.vertices, tol) <= tol;
        }
        if (!e.dot_ok) os << "(" << t.a << "," << t.b << ").v = " << e.dot << " > " << tol << "; ";
        if (!e.cone_ok) os << "no outer point along (" << t.a << "," << t.b << "); ";
        rep.pass = rep.pass && e.dot_ok && e.cone_ok;
        rep.entries.push_back(e);
    }
    rep.diagnostic = os.str();
    return rep;
}

GapResult min_gap(const std::vector<PlanePoint>& a, const std::vector<PlanePoint>& b)
{
    if (a.size() >= 2 && b.size() >= 2) {
        const auto ev = find_intersections(a, b);
        if (!ev.empty()) {
            GapResult g;
            g.distance = 0.0;
            g.on_a = g.on_b = ev.front().point;
            g.seg_a = ev.front().seg_u;
            g.seg_b = ev.front().seg_s;
            return g;
        }
    }
    return min_gap_disjoint(a, b);
}

GapResult min_gap_disjoint(const std::vector<PlanePoint>& a, const std::vector<PlanePoint>& b)
{
    GapResult g;
    if (a.empty() || b.empty()) return g;
    // segments as index pairs; a single vertex is a degenerate segment
    const std::size_t sa = std::max<std::size_t>(1, a.size() - 1), sb = std::max<std::size_t>(1, b.size() - 1);
    auto seg = [](const std::vector<PlanePoint>& p, std::size_t i) {
        return std::pair{p[i], p[std::min(i + 1, p.size() - 1)]};
    };
    constexpr std::size_t kChunk = 32;
    auto chunks = [&](const std::vector<PlanePoint>& p, std::size_t ns) {
        std::vector<Box> out;
        for (std::size_t c = 0; c < ns; c += kChunk) {
            Box bx;
            const std::size_t hi = std::min(ns, c + kChunk);
            for (std::size_t i = c; i <= hi && i < p.size(); ++i) bx.add(p[i]);
            out.push_back(bx);
        }
        return out;
    };
    const auto ca = chunks(a, sa), cb = chunks(b, sb);
    auto box_gap = [](const Box& x, const Box& y) {
        const double dx = std::max({0.0, x.lo.x - y.hi.x, y.lo.x - x.hi.x});
        const double dy = std::max({0.0, x.lo.y - y.hi.y, y.lo.y - x.hi.y});
        return std::hypot(dx, dy);
    };
    auto eval_pair = [&](std::size_t i, std::size_t j) {
        for (std::size_t u = i * kChunk; u < std::min(sa, (i + 1) * kChunk); ++u) {
            const auto [p0, p1] = seg(a, u);
            for (std::size_t v = j * kChunk; v < std::min(sb, (j + 1) * kChunk); ++v) {
                const auto [q0, q1] = seg(b, v);
                PlanePoint op, oq;
                const double d = segment_distance(p0, p1, q0, q1, &op, &oq);
                if (d < g.distance) {
                    g.distance = d;
                    g.on_a = op;
                    g.on_b = oq;
                    g.seg_a = u;
                    g.seg_b = v;
                }
            }
        }
    };
    double best_lb = INFINITY;
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < ca.size(); ++i)
        for (std::size_t j = 0; j < cb.size(); ++j) {
            const double lb = box_gap(ca[i], cb[j]);
            if (lb < best_lb) {
                best_lb = lb;
                bi = i;
                bj = j;
            }
        }
    eval_pair(bi, bj);
    std::vector<std::pair<double, std::pair<std::size_t, std::size_t>>> todo;
    for (std::size_t i = 0; i < ca.size(); ++i)
        for (std::size_t j = 0; j < cb.size(); ++j) {
            const double lb = box_gap(ca[i], cb[j]);
            if (lb < g.distance && !(i == bi && j == bj)) todo.push_back({lb, {i, j}});
        }
    std::sort(todo.begin(), todo.end());
    for (const auto& [lb, ij] : todo) {
        if (lb >= g.distance) break;
        eval_pair(ij.first, ij.second);
    }
    return g;
}

} // namespace rotolab
