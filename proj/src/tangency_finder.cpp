#include "rotolab/tangency_finder.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rotolab/error.hpp"
#include "rotolab/spatial_hash.hpp"

namespace rotolab {

namespace {

struct Fit {
    double slope = 0.0, intercept = 0.0, r2 = 0.0;
};

Fit linear_fit(const std::vector<double>& x, const std::vector<double>& y)
{
    Fit f;
    const double n = static_cast<double>(x.size());
    if (x.size() < 2) return f;
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx <= 0.0) return f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double res = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double e = y[i] - (f.slope * x[i] + f.intercept);
        res += e * e;
    }
    f.r2 = syy > 0.0 ? 1.0 - res / syy : (res == 0.0 ? 1.0 : 0.0);
    return f;
}

// realized translate of a contact between a moving and a target vertex
bool realized_from(const std::vector<Provenance>& pa, std::size_t ia, const std::vector<Provenance>& pb,
                   std::size_t ib, IntVec& out)
{
    if (ia >= pa.size() || ib >= pb.size()) return false;
    const Provenance& a = pa[ia];
    const Provenance& b = pb[ib];
    if (a.stable == b.stable) return false;
    out = a.stable ? a.copy - b.copy : b.copy - a.copy;
    return true;
}

PlanePoint cubic_at(const PlanePoint* p, const double* s, double u)
{
    // Lagrange cubic through (s[k], p[k]), k = 0..3, evaluated at u
    PlanePoint r{0.0, 0.0};
    for (int k = 0; k < 4; ++k) {
        double l = 1.0;
        for (int j = 0; j < 4; ++j)
            if (j != k) l *= (u - s[j]) / (s[k] - s[j]);
        r += l * p[k];
    }
    return r;
}

double turn(PlanePoint a, PlanePoint b, PlanePoint c)
{
    const PlanePoint d1 = b - a, d2 = c - b;
    if (norm(d1) == 0.0 || norm(d2) == 0.0) return 0.0;
    return std::abs(std::atan2(cross(d1, d2), dot(d1, d2)));
}

} // namespace

const char* to_string(SeparationKind k)
{
    switch (k) {
    case SeparationKind::Disjoint: return "Disjoint";
    case SeparationKind::Contact: return "Contact";
    case SeparationKind::Transverse: return "Transverse";
    }
    return "?";
}

ParabolaHarness::ParabolaHarness(double t_prime, double slope, double curvature)
    : t_prime_(t_prime), slope_(slope), curvature_(curvature)
{
    if (!(slope > 0.0) || !(curvature > 0.0)) throw Error(ErrorKind::Config, "harness needs positive slope and curvature");
    // geometric spacing from 1e-7 at the apex keeps the chord error far below the offsets probed
    std::vector<double> pos;
    for (double x = 1e-7; x < 1.0; x *= 1.01) pos.push_back(x);
    pos.push_back(1.0);
    for (std::size_t i = pos.size(); i-- > 0;) xs_.push_back(-pos[i]);
    xs_.push_back(0.0);
    for (double x : pos) xs_.push_back(x);
}

void ParabolaHarness::curves(double t, std::vector<PlanePoint>& moving, std::vector<PlanePoint>& target,
                             std::vector<Provenance>*, std::vector<Provenance>*) const
{
    const double g = slope_ * (t_prime_ - t);
    moving.clear();
    moving.reserve(xs_.size());
    for (double x : xs_) moving.push_back({x, curvature_ * x * x + g});
    target = {{-2.0, 0.0}, {2.0, 0.0}};
}

Separation separation_test(const ContactProblem& prob, double t, const SeparationConfig& cfg)
{
    std::vector<PlanePoint> a, b;
    std::vector<Provenance> pa, pb;
    prob.curves(t, a, b, &pa, &pb);
    Separation s;
    s.t = t;
    if (a.size() < 2 || b.size() < 2) throw Error(ErrorKind::ScanAborted, "contact curves have fewer than two vertices");

    IntersectConfig ic;
    ic.angle_min = cfg.angle_min;
    auto evs = find_intersections(a, b, ic);
    std::vector<IntersectionEvent> cross;
    bool touch = false;
    for (const auto& e : evs) {
        if (e.touch) touch = true;
        else cross.push_back(e);
    }
    s.events = evs;

    if (!cross.empty()) {
        s.kind = SeparationKind::Transverse;
        s.gap = 0.0;
        std::sort(cross.begin(), cross.end(), [](const auto& x, const auto& y) { return x.s_u < y.s_u; });
        if (cross.size() < 2) {
            s.signed_gap = 0.0;
            s.witness = cross.front().point;
            s.realized_known = realized_from(pa, cross.front().seg_u, pb, cross.front().seg_s, s.realized);
            return s;
        }
        // the newest lens: consecutive crossings along A with the shortest arcs on both curves
        std::size_t bi = 0;
        double best_size = INFINITY;
        for (std::size_t i = 0; i + 1 < cross.size(); ++i) {
            const double size = (cross[i + 1].s_u - cross[i].s_u) + std::abs(cross[i + 1].s_s - cross[i].s_s);
            if (size < best_size) {
                best_size = size;
                bi = i;
            }
        }
        const auto& c0 = cross[bi];
        const auto& c1 = cross[bi + 1];
        double pen = 0.0;
        s.witness = 0.5 * (c0.point + c1.point);
        const std::size_t j0 = std::min(c0.seg_s, c1.seg_s), j1 = std::max(c0.seg_s, c1.seg_s);
        for (std::size_t v = c0.seg_u + 1; v <= c1.seg_u && v < a.size(); ++v) {
            double d = INFINITY;
            for (std::size_t j = j0; j <= j1 && j + 1 < b.size(); ++j)
                d = std::min(d, point_segment_distance(a[v], b[j], b[j + 1]));
            if (d > pen) {
                pen = d;
                s.witness = a[v];
            }
        }
        s.signed_gap = pen;
        s.half_width = 0.5 * distance(c0.point, c1.point);
        s.realized_known = realized_from(pa, c0.seg_u, pb, c0.seg_s, s.realized);
        return s;
    }
    const GapResult g = min_gap_disjoint(a, b);
    s.gap = g.distance;
    s.signed_gap = -g.distance;
    s.witness = 0.5 * (g.on_a + g.on_b);
    s.realized_known = realized_from(pa, g.seg_a, pb, g.seg_b, s.realized);
    s.kind = (touch || g.distance <= cfg.gap_tol) ? SeparationKind::Contact : SeparationKind::Disjoint;
    return s;
}

TangencyRecord bisect_tangency(const ContactProblem& prob, double t_lo, double t_hi, const BisectConfig& cfg)
{
    if (!(t_lo != t_hi)) throw Error(ErrorKind::InvalidBracket, "tangency bracket has zero width");
    TangencyRecord rec;
    Separation lo = separation_test(prob, t_lo, cfg.sep);
    Separation hi = separation_test(prob, t_hi, cfg.sep);
    rec.trail = {lo, hi};
    if (lo.kind == SeparationKind::Transverse || hi.kind != SeparationKind::Transverse) {
        std::ostringstream os;
        os << "tangency bracket [" << t_lo << ", " << t_hi << "] classifies as " << to_string(lo.kind) << " / "
           << to_string(hi.kind) << "; need non-transverse / Transverse";
        throw Error(ErrorKind::InvalidBracket, os.str());
    }
    if (cfg.presample > 0) {
        std::vector<Separation> grid{lo};
        for (int i = 1; i <= cfg.presample; ++i) {
            const double t = t_lo + (t_hi - t_lo) * i / (cfg.presample + 1);
            grid.push_back(separation_test(prob, t, cfg.sep));
            rec.trail.push_back(grid.back());
        }
        grid.push_back(hi);
        bool found = false;
        for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
            const bool birth = grid[i].kind != SeparationKind::Transverse && grid[i + 1].kind == SeparationKind::Transverse;
            if (!birth) continue;
            if (!found) {
                lo = grid[i];
                hi = grid[i + 1];
                found = true;
            } else {
                rec.other_births.push_back({grid[i].t, grid[i + 1].t});
            }
        }
    }
    int steps = 0;
    while (std::abs(hi.t - lo.t) > cfg.width && steps < cfg.max_steps) {
        const double mid = 0.5 * (lo.t + hi.t);
        Separation m = separation_test(prob, mid, cfg.sep);
        rec.trail.push_back(m);
        if (m.kind == SeparationKind::Transverse) hi = std::move(m);
        else lo = std::move(m);
        ++steps;
    }
    if (std::abs(hi.t - lo.t) > cfg.width) {
        std::ostringstream os;
        os << "bisection stopped after " << steps << " steps at width " << std::abs(hi.t - lo.t);
        throw Error(ErrorKind::ScanAborted, os.str());
    }
    rec.steps = steps;
    rec.t_lo = lo.t;
    rec.t_hi = hi.t;
    rec.t_prime = 0.5 * (lo.t + hi.t);
    rec.witness = hi.witness;
    rec.realized_known = hi.realized_known || lo.realized_known;
    rec.realized = hi.realized_known ? hi.realized : lo.realized;
    return rec;
}

UnfoldingFit unfolding_fit(const ContactProblem& prob, double t_prime, double window, int samples,
                           const SeparationConfig& cfg)
{
    if (samples < 9) throw Error(ErrorKind::Config, "unfolding fit needs at least 9 samples");
    if (!(window > 0.0)) throw Error(ErrorKind::Config, "unfolding window must be positive");
    UnfoldingFit f;
    std::vector<double> xs, hw2;
    for (int i = 0; i < samples; ++i) {
        const double t = t_prime - window + 2.0 * window * i / (samples - 1);
        const Separation s = separation_test(prob, t, cfg);
        f.ts.push_back(t);
        f.gaps.push_back(s.signed_gap);
        f.halfwidths.push_back(s.half_width);
        if (s.kind == SeparationKind::Transverse && s.half_width > 0.0) {
            xs.push_back(t);
            hw2.push_back(s.half_width * s.half_width);
        }
    }
    const Fit g = linear_fit(f.ts, f.gaps);
    f.slope = g.slope;
    f.intercept = g.intercept;
    f.r2 = g.r2;
    if (!(g.r2 > 0.99)) {
        f.degenerate = true;
        f.diagnostic = "linear gap fit R2 " + std::to_string(g.r2) + " <= 0.99; possible contact of order >= 3";
    }
    if (xs.size() >= 3) {
        // half-width ~ C sqrt(t - t0)  <=>  half-width^2 linear in t
        const Fit h = linear_fit(xs, hw2);
        f.halfwidth_coeff = std::sqrt(std::abs(h.slope));
        f.halfwidth_r2 = h.r2;
    } else {
        f.degenerate = true;
        f.diagnostic += std::string(f.diagnostic.empty() ? "" : "; ") + "fewer than three transverse samples with two crossings";
    }
    return f;
}

TangencyRecord scan_tangency(const ContactProblem& prob, double t_lo, double t_hi, const BisectConfig& cfg,
                             double window, int samples)
{
    TangencyRecord rec = bisect_tangency(prob, t_lo, t_hi, cfg);
    const UnfoldingFit f = unfolding_fit(prob, rec.t_prime, window, samples, cfg.sep);
    // slope measured in the direction from the disjoint side to the transverse side
    rec.gap_slope = t_hi > t_lo ? f.slope : -f.slope;
    rec.unfold_r2 = f.r2;
    rec.halfwidth_r2 = f.halfwidth_r2;
    rec.halfwidth_coeff = f.halfwidth_coeff;
    return rec;
}

BoundCheck translate_bound_check(IntVec realized, IntVec target, PlanePoint v, double max_diam, double Kf)
{
    BoundCheck b;
    b.deviation = std::abs(dot((realized - target).as_point(), v));
    b.proof_bound = 3.0 + 2.0 * max_diam;
    b.theorem_bound = Kf / 4.0;
    b.proof_ok = b.deviation <= b.proof_bound;
    b.theorem_ok = b.deviation <= b.theorem_bound;
    b.pass = b.proof_ok && b.theorem_ok;
    return b;
}

std::vector<PlanePoint> map_polyline(const BoundLift& lift, std::vector<PlanePoint> pts, int N, double h_max,
                                     double theta_max, std::size_t max_vertices, std::vector<Provenance>* prov)
{
    std::vector<Provenance> pv;
    if (prov) {
        pv = *prov;
        if (pv.size() != pts.size()) throw Error(ErrorKind::Config, "provenance size does not match the polyline");
    }
    for (int stage = 0; stage < N; ++stage) {
        const std::size_t n = pts.size();
        if (n < 2) {
            for (auto& p : pts) p = lift(p);
            continue;
        }
        std::vector<double> s(n, 0.0);
        for (std::size_t i = 1; i < n; ++i) s[i] = s[i - 1] + distance(pts[i - 1], pts[i]);
        std::vector<PlanePoint> img(n);
        for (std::size_t i = 0; i < n; ++i) img[i] = lift(pts[i]);

        std::vector<PlanePoint> out;
        std::vector<Provenance> outp;
        out.reserve(n);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            out.push_back(img[i]);
            if (prov) outp.push_back(pv[i]);
            std::size_t k0 = i == 0 ? 0 : i - 1;
            std::size_t k3 = std::min(n - 1, i + 2);
            if (k3 - k0 < 3) {
                if (k0 > 0) --k0;
                else if (k3 + 1 < n) ++k3;
            }
            const bool cubic = k3 - k0 == 3 && s[k0 + 1] > s[k0] && s[k0 + 2] > s[k0 + 1] && s[k0 + 3] > s[k0 + 2];
            PlanePoint nodes[4];
            double params[4];
            if (cubic)
                for (int k = 0; k < 4; ++k) {
                    nodes[k] = pts[k0 + k];
                    params[k] = s[k0 + k];
                }
            auto pre = [&](double u) {
                if (cubic) return cubic_at(nodes, params, u);
                const double l = s[i + 1] - s[i];
                const double w = l > 0.0 ? (u - s[i]) / l : 0.5;
                return (1.0 - w) * pts[i] + w * pts[i + 1];
            };
            // depth-first subdivision, left half first, so insertions come out in order
            struct Item {
                double u0, u1;
                PlanePoint f0, f1;
                int depth;
            };
            std::vector<Item> stack{{s[i], s[i + 1], img[i], img[i + 1], 0}};
            bool emitted = false;
            while (!stack.empty()) {
                const Item it = stack.back();
                stack.pop_back();
                if (it.depth >= 48 || !(it.u1 > it.u0)) {
                    if (it.depth > 0) {
                        out.push_back(it.f1);
                        if (prov) outp.push_back(pv[i]);
                        emitted = true;
                    }
                    continue;
                }
                const double um = 0.5 * (it.u0 + it.u1);
                const PlanePoint fm = lift(pre(um));
                const bool split = distance(it.f0, it.f1) > h_max || turn(it.f0, fm, it.f1) > theta_max;
                if (!split) {
                    if (it.depth > 0) {
                        out.push_back(it.f1);
                        if (prov) outp.push_back(pv[i]);
                        emitted = true;
                    }
                    continue;
                }
                stack.push_back({um, it.u1, fm, it.f1, it.depth + 1});
                stack.push_back({it.u0, um, it.f0, fm, it.depth + 1});
            }
            // the last emitted point of a split segment is img[i+1]; it is pushed again below
            if (emitted) {
                out.pop_back();
                if (prov) outp.pop_back();
            }
            if (out.size() > max_vertices) {
                std::ostringstream os;
                os << "f^N image exceeds " << max_vertices << " vertices at stage " << (stage + 1) << " of " << N;
                throw Error(ErrorKind::ScanAborted, os.str());
            }
        }
        out.push_back(img[n - 1]);
        if (prov) outp.push_back(pv[n - 1]);
        pts = std::move(out);
        if (prov) pv = std::move(outp);
    }
    if (prov) *prov = std::move(pv);
    return pts;
}

std::vector<Provenance> chain_provenance(const ChainCurve& c, const ChainCurve* gamma_v)
{
    std::vector<Provenance> out;
    for (const ChainPiece& piece : c.composition) {
        std::vector<Provenance> pp;
        if (piece.source == "gamma_v") {
            if (!gamma_v) throw Error(ErrorKind::Config, "gamma_h provenance needs gamma_v");
            pp = chain_provenance(*gamma_v);
            for (auto& p : pp) p.copy = p.copy + piece.translate;
        } else {
            const bool st = piece.source.rfind("stable", 0) == 0;
            pp.assign(piece.vertices, Provenance{piece.translate, st});
        }
        if (piece.reversed && piece.source == "gamma_v") std::reverse(pp.begin(), pp.end());
        const std::size_t from = out.empty() ? 0 : 1;
        for (std::size_t i = from; i < pp.size(); ++i) out.push_back(pp[i]);
    }
    return out;
}

namespace {

const ManifoldArc& arc_for(const std::vector<ManifoldArc>& arcs, Branch b)
{
    for (const auto& a : arcs)
        if (a.branch == b) return a;
    throw Error(ErrorKind::NotFound, std::string("no arc for branch ") + to_string(b));
}

} // namespace

ChainBuild build_chains(const BoundLift& lift, const SaddleRecord& s, const GrowthConfig& growth, int window)
{
    ChainBuild cb;
    cb.arcs = grow_all_branches(lift, s, growth);
    std::vector<ManifoldArc> un, st;
    for (const auto& a : cb.arcs) (is_unstable(a.branch) ? un : st).push_back(a);
    const TranslateSpectrum spec = spectrum_from_arcs(un, st, window, IntersectConfig{}, &lift);

    auto shortest = [](const std::vector<IntersectionEvent>& evs, const IntersectionEvent*& best) {
        for (const auto& e : evs) {
            if (e.kind != EventKind::Transverse) continue;
            if (!best || e.s_u + e.s_s < best->s_u + best->s_s) best = &e;
        }
    };
    const IntersectionEvent* ev_v = nullptr;
    if (auto it = spec.hits.find({0, -1}); it != spec.hits.end()) shortest(it->second, ev_v);
    if (!ev_v) throw Error(ErrorKind::NotFound, "no transverse (0,-1) event within the growth budget");
    cb.ev_v = *ev_v;
    cb.gamma_v = build_gamma_v(arc_for(cb.arcs, ev_v->branch_u), arc_for(cb.arcs, ev_v->branch_s), *ev_v);

    const IntersectionEvent* ev_h = nullptr;
    long best_b = -1;
    for (const auto& [tr, evs] : spec.hits) {
        if (tr.a != 1) continue;
        const IntersectionEvent* cand = nullptr;
        shortest(evs, cand);
        if (!cand) continue;
        const long ab = std::abs(tr.b);
        if (!ev_h || ab < best_b || (ab == best_b && cand->s_u + cand->s_s < ev_h->s_u + ev_h->s_s)) {
            ev_h = cand;
            best_b = ab;
        }
    }
    if (!ev_h) throw Error(ErrorKind::NotFound, "no transverse (1,b) event within the growth budget");
    cb.ev_h = *ev_h;
    cb.gamma_h =
        build_gamma_h(arc_for(cb.arcs, ev_h->branch_u), arc_for(cb.arcs, ev_h->branch_s), cb.gamma_v, *ev_h);
    return cb;
}

ThetaContactProblem::ThetaContactProblem(ThetaScanConfig cfg) : cfg_(std::move(cfg))
{
    if (cfg_.saddle.q != 1) throw Error(ErrorKind::Config, "theta scan needs a fixed point of the lift class (q = 1)");
    if (cfg_.N < 1) throw Error(ErrorKind::Config, "theta scan needs N >= 1");
    const double proj = dot(cfg_.target.as_point(), cfg_.v);
    if (cfg_.enforce_precondition && !(proj > cfg_.Kf)) {
        std::ostringstream os;
        os << "target (" << cfg_.target.a << "," << cfg_.target.b << ") has (c,d).v = " << proj
           << ", not above K_f = " << cfg_.Kf;
        throw Error(ErrorKind::Config, os.str());
    }
}

ThetaContactProblem::Built ThetaContactProblem::build(double t) const
{
    Built b;
    b.saddle = saddle_at(cfg_.family, cfg_.saddle, cfg_.axis, t);
    const BoundLift lift = cfg_.family.bind(cfg_.base.with(cfg_.axis, t));
    ChainBuild cb = build_chains(lift, b.saddle, cfg_.growth, cfg_.window);
    b.gamma_v = std::move(cb.gamma_v);
    b.gamma_h = std::move(cb.gamma_h);
    const PlanePoint w{cfg_.v.y, -cfg_.v.x};
    b.theta = build_theta(b.gamma_h, b.gamma_v, w, cfg_.v, cfg_.span);

    const auto ph = chain_provenance(b.gamma_h, &b.gamma_v);
    const auto pvv = chain_provenance(b.gamma_v);
    for (const Placement& pl : b.theta.placements) {
        std::vector<Provenance> pp = pl.role == ChainRole::GammaH ? ph : pvv;
        for (auto& p : pp) p.copy = p.copy + pl.offset;
        if (pl.reversed) std::reverse(pp.begin(), pp.end());
        const std::size_t from = b.prov.empty() ? 0 : 1;
        for (std::size_t i = from; i < pp.size(); ++i) b.prov.push_back(pp[i]);
    }
    if (b.prov.size() != b.theta.points.size()) b.prov.assign(b.theta.points.size(), Provenance{});
    return b;
}

void ThetaContactProblem::curves(double t, std::vector<PlanePoint>& moving, std::vector<PlanePoint>& target,
                                 std::vector<Provenance>* moving_prov, std::vector<Provenance>* target_prov) const
{
    Built b = build(t);
    const BoundLift lift = cfg_.family.bind(cfg_.base.with(cfg_.axis, t));
    std::vector<Provenance> mp = b.prov;
    moving = map_polyline(lift, b.theta.points, cfg_.N, cfg_.h_max, cfg_.theta_max, cfg_.max_vertices, &mp);
    // f maps the copy P + o to P + o + trans
    for (auto& p : mp) p.copy = p.copy + IntVec{b.saddle.trans.a * cfg_.N, b.saddle.trans.b * cfg_.N};
    target = b.theta.points;
    const PlanePoint d = cfg_.target.as_point();
    for (auto& p : target) p += d;
    if (moving_prov) *moving_prov = std::move(mp);
    if (target_prov) {
        *target_prov = b.prov;
        for (auto& p : *target_prov) p.copy = p.copy + cfg_.target;
    }
}

SaddleRecord saddle_at(const LiftFamily& fam, const SaddleRecord& s, const std::string& axis, double t)
{
    const double t0 = s.params.has(axis) ? s.params.get(axis) : fam.default_params().get(axis);
    if (t == t0) return s;
    const auto curve = continue_in_parameter(fam, s, axis, t, std::max(std::abs(t - t0) / 4.0, 1e-9));
    if (!curve.complete) throw Error(ErrorKind::ScanAborted, "saddle continuation to t failed: " + curve.diagnostic);
    SaddleRecord out = curve.points.back().rec;
    if (!out.hyperbolic()) throw Error(ErrorKind::ScanAborted, "continued saddle is not hyperbolic");
    return out;
}

ManifoldContactProblem::ManifoldContactProblem(ManifoldScanConfig cfg) : cfg_(std::move(cfg))
{
    if (!cfg_.saddle.hyperbolic()) throw Error(ErrorKind::Config, "manifold scan needs a hyperbolic saddle");
}

void ManifoldContactProblem::set_zoom(PlanePoint center, double radius, double spacing)
{
    if (!(radius > 0.0) || !(spacing > 0.0)) throw Error(ErrorKind::Config, "zoom needs positive radius and spacing");
    zoom_ = true;
    zoom_center_ = center;
    zoom_radius_ = radius;
    zoom_spacing_ = spacing;
}

namespace {

// run of vertices inside the disk that contains the vertex nearest to c, densified on sigma
std::vector<PlanePoint> zoomed_run(const BoundLift& lift, const ManifoldArc& arc, PlanePoint c, double r,
                                   double spacing, double& nearest)
{
    const auto& P = arc.points;
    nearest = INFINITY;
    std::size_t k = 0;
    for (std::size_t i = 0; i < P.size(); ++i) {
        const double d = distance(P[i], c);
        if (d < nearest) {
            nearest = d;
            k = i;
        }
    }
    if (P.size() < 2 || nearest > r) return {};
    std::size_t lo = k, hi = k;
    while (lo > 0 && distance(P[lo - 1], c) <= r) --lo;
    while (hi + 1 < P.size() && distance(P[hi + 1], c) <= r) ++hi;
    if (lo > 0) --lo;
    if (hi + 1 < P.size()) ++hi;
    std::vector<PlanePoint> out{P[lo]};
    for (std::size_t i = lo; i < hi; ++i) {
        const int m = std::max(1, static_cast<int>(std::ceil(distance(P[i], P[i + 1]) / spacing)));
        for (int j = 1; j < m; ++j) {
            const double sg = arc.sigma[i] + (arc.sigma[i + 1] - arc.sigma[i]) * j / m;
            out.push_back(branch_point(lift, arc, sg));
        }
        out.push_back(P[i + 1]);
    }
    return out;
}

} // namespace

void ManifoldContactProblem::curves(double t, std::vector<PlanePoint>& moving, std::vector<PlanePoint>& target,
                                    std::vector<Provenance>* moving_prov, std::vector<Provenance>* target_prov) const
{
    const SaddleRecord s = saddle_at(cfg_.family, cfg_.saddle, cfg_.axis, t);
    const BoundLift lift = cfg_.family.bind(cfg_.base.with(cfg_.axis, t));
    auto arcs = grow_all_branches(lift, s, cfg_.growth);
    const PlanePoint d = cfg_.target.as_point();
    if (zoom_) {
        auto best = [&](Branch b1, Branch b2, PlanePoint c) {
            double n1, n2;
            auto r1 = zoomed_run(lift, arc_for(arcs, b1), c, zoom_radius_, zoom_spacing_, n1);
            auto r2 = zoomed_run(lift, arc_for(arcs, b2), c, zoom_radius_, zoom_spacing_, n2);
            return n1 <= n2 ? r1 : r2;
        };
        moving = best(Branch::UnstableMinus, Branch::UnstablePlus, zoom_center_);
        target = best(Branch::StableMinus, Branch::StablePlus, zoom_center_ - d);
        if (moving.empty() || target.empty())
            throw Error(ErrorKind::ScanAborted, "no manifold run inside the zoom disk");
    } else {
        auto joined = [&](Branch minus, Branch plus) {
            const auto& m = arc_for(arcs, minus).points;
            const auto& p = arc_for(arcs, plus).points;
            std::vector<PlanePoint> out(m.rbegin(), m.rend());
            for (std::size_t i = 1; i < p.size(); ++i) out.push_back(p[i]);
            return out;
        };
        moving = joined(Branch::UnstableMinus, Branch::UnstablePlus);
        target = joined(Branch::StableMinus, Branch::StablePlus);
    }
    for (auto& p : target) p += d;
    if (moving_prov) moving_prov->assign(moving.size(), Provenance{{0, 0}, false});
    if (target_prov) target_prov->assign(target.size(), Provenance{cfg_.target, true});
}

PersistenceReport persistence_check(const ContactProblem& prob, const TangencyRecord& rec, double t_star, int samples,
                                    const SeparationConfig& cfg)
{
    PersistenceReport rep;
    rep.pass = samples > 0;
    for (int i = 1; i <= samples; ++i) {
        const double t = rec.t_hi + (t_star - rec.t_hi) * i / samples;
        const Separation s = separation_test(prob, t, cfg);
        const bool tr = s.kind == SeparationKind::Transverse;
        const bool same = tr && (!rec.realized_known || (s.realized_known && s.realized == rec.realized));
        rep.ts.push_back(t);
        rep.transverse.push_back(tr);
        rep.same_translate.push_back(same);
        rep.pass = rep.pass && tr && same;
    }
    return rep;
}

} // namespace rotolab
