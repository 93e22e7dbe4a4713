#include "rotolab/rotation_set.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "rotolab/error.hpp"
#include "rotolab/parallel.hpp"

namespace rotolab {

const char* to_string(HullKind k)
{
    return k == HullKind::Outer ? "outer" : "inner";
}

const char* to_string(Membership m)
{
    switch (m) {
    case Membership::Interior: return "interior";
    case Membership::BoundaryBand: return "boundary-band";
    case Membership::Exterior: return "exterior";
    }
    return "?";
}

std::vector<long> iterate_ladder(long n_min, long n_max)
{
    if (n_min < 1 || n_max < n_min) throw Error(ErrorKind::Config, "iterate ladder needs 1 <= n_min <= n_max");
    std::vector<long> ladder;
    for (long n = n_min; n < n_max; n *= 2) ladder.push_back(n);
    ladder.push_back(n_max);
    return ladder;
}

std::vector<PlanePoint> seed_grid(int g, unsigned long long seed)
{
    std::mt19937_64 rng(seed);
    auto unit = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    std::vector<PlanePoint> pts;
    pts.reserve(static_cast<std::size_t>(g) * static_cast<std::size_t>(g));
    for (int i = 0; i < g; ++i)
        for (int j = 0; j < g; ++j) {
            const double u = unit(), v = unit();
            pts.push_back({(i + u) / g, (j + v) / g});
        }
    return pts;
}

RotationSetApprox outer_hull_from_seeds(const BoundLift& lift, const std::vector<PlanePoint>& seeds,
                                        const std::vector<long>& ladder, int threads)
{
    const std::size_t L = ladder.size();
    std::vector<PlanePoint> disp(seeds.size() * L);
    parallel_for(seeds.size(), threads, [&](std::size_t s) {
        const PlanePoint z0 = seeds[s];
        PlanePoint w = z0;
        long done = 0;
        for (std::size_t k = 0; k < L; ++k) {
            for (; done < ladder[k]; ++done) {
                w = lift(w);
                if (!is_finite(w)) {
                    std::ostringstream os;
                    os << "non-finite iterate at step " << done + 1 << " from seed " << s << " (" << z0.x << ", " << z0.y
                       << ")";
                    throw Error(ErrorKind::NumericBlowup, os.str());
                }
            }
            disp[s * L + k] = (w - z0) / static_cast<double>(ladder[k]);
        }
    });
    RotationSetApprox rs;
    rs.kind = HullKind::Outer;
    rs.ladder = ladder;
    rs.n_min = ladder.front();
    rs.n_max = ladder.back();
    rs.vertices = convex_hull(disp);
    for (std::size_t k = 0; k < L; ++k) {
        std::vector<PlanePoint> layer;
        layer.reserve(seeds.size());
        for (std::size_t s = 0; s < seeds.size(); ++s) layer.push_back(disp[s * L + k]);
        rs.ladder_diameter.push_back(diameter(layer));
    }
    return rs;
}

RotationSetApprox mz_outer_hull(const LiftFamily& fam, const FamilyParams& params, const OuterHullConfig& cfg)
{
    if (cfg.n_min < 100) throw Error(ErrorKind::Config, "n_min must be >= 100");
    if (cfg.grid < 1) throw Error(ErrorKind::Config, "grid must be positive");
    const auto ladder = iterate_ladder(cfg.n_min, cfg.n_max);
    RotationSetApprox rs = outer_hull_from_seeds(fam.bind(params), seed_grid(cfg.grid, cfg.seed), ladder, cfg.threads);
    rs.grid = cfg.grid;
    rs.seed = cfg.seed;
    rs.family = fam.name;
    rs.params = params;
    return rs;
}

PlanePoint rotation_vector(const BoundLift& lift, PlanePoint z, int q, IntVec trans, double tol)
{
    if (q < 1) throw Error(ErrorKind::Config, "period must be >= 1");
    const double res = norm(power_map(lift, z, q, trans) - z);
    if (!(res <= tol)) {
        std::ostringstream os;
        os << "residual " << res << " exceeds " << tol << " for q=" << q << " trans=(" << trans.a << "," << trans.b << ")";
        throw Error(ErrorKind::NotPeriodic, os.str());
    }
    return {static_cast<double>(trans.a) / q, static_cast<double>(trans.b) / q};
}

RotationSetApprox inner_hull_from_records(const std::vector<SaddleRecord>& orbits)
{
    RotationSetApprox rs;
    rs.kind = HullKind::Inner;
    std::vector<PlanePoint> pts;
    for (const auto& r : orbits) {
        pts.push_back({static_cast<double>(r.trans.a) / r.q, static_cast<double>(r.trans.b) / r.q});
        rs.sources.push_back(r.trans);
        rs.source_periods.push_back(r.q);
        if (rs.params.values().empty()) rs.params = r.params;
    }
    rs.vertices = convex_hull(pts);
    return rs;
}

RotationSetApprox inner_hull(const LiftFamily& fam, const FamilyParams& params, const RotationSetApprox& outer,
                             const InnerCensusConfig& cfg, std::vector<SaddleRecord>* orbits)
{
    Box box = bounding_box(outer.vertices);
    double pad = cfg.outer_inflate;
    if (cfg.use_window) {
        if (cfg.window.empty()) throw Error(ErrorKind::Config, "inner census window is empty");
        box = cfg.window;
        pad = 0.0;
    }
    struct Candidate {
        int q;
        IntVec trans;
    };
    std::vector<Candidate> cands;
    for (int q = 1; q <= cfg.q_max; ++q) {
        const long a0 = static_cast<long>(std::ceil((box.lo.x - pad) * q));
        const long a1 = static_cast<long>(std::floor((box.hi.x + pad) * q));
        const long b0 = static_cast<long>(std::ceil((box.lo.y - pad) * q));
        const long b1 = static_cast<long>(std::floor((box.hi.y + pad) * q));
        for (long a = a0; a <= a1; ++a)
            for (long b = b0; b <= b1; ++b) {
                if (std::gcd(std::gcd(std::abs(a), std::abs(b)), static_cast<long>(q)) != 1) continue;
                const PlanePoint w{static_cast<double>(a) / q, static_cast<double>(b) / q};
                if (!cfg.use_window && signed_depth(outer.vertices, w) < -cfg.outer_inflate) continue;
                cands.push_back({q, {a, b}});
            }
    }
    std::vector<std::vector<SaddleRecord>> found(cands.size());
    PeriodicConfig pc = cfg.newton;
    const int threads = pc.threads;
    pc.threads = 1;
    parallel_for(cands.size(), threads, [&](std::size_t i) {
        try {
            found[i] = find_periodic(fam, params, cands[i].q, cands[i].trans, pc);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::NonIsolated) throw;
        }
    });
    std::vector<SaddleRecord> all;
    for (auto& f : found)
        for (auto& r : f)
            if (r.residual <= cfg.newton.accept_tol) all.push_back(r);
    RotationSetApprox rs = inner_hull_from_records(all);
    rs.family = fam.name;
    rs.params = params;
    rs.n_min = 1;
    rs.n_max = cfg.q_max;
    rs.grid = cfg.newton.grid;
    if (orbits) *orbits = std::move(all);
    return rs;
}

Membership membership(const RotationSetApprox& outer, const RotationSetApprox& inner, PlanePoint w, double margin)
{
    if (!inner.vertices.empty()) {
        const double d = signed_depth(inner.vertices, w);
        if (d >= margin) return Membership::Interior;
        // within margin of the certified set: never Exterior, whatever the sampled hull says
        if (d > -margin) return Membership::BoundaryBand;
    }
    if (outer.vertices.empty() || signed_depth(outer.vertices, w) <= -margin) return Membership::Exterior;
    return Membership::BoundaryBand;
}

SupportData supporting_line(const RotationSetApprox& outer, PlanePoint w, double margin)
{
    const auto& P = outer.vertices;
    if (P.size() < 2) throw Error(ErrorKind::NoSupport, "hull is a single point; the supporting line is ambiguous");
    const double depth = signed_depth(P, w);
    if (depth > margin) {
        std::ostringstream os;
        os << "point lies " << depth << " inside the hull (margin " << margin << ")";
        throw Error(ErrorKind::NoSupport, os.str());
    }
    const std::size_t n = P.size();
    auto edge_normal = [&](std::size_t i) {
        const PlanePoint e = P[(i + 1) % n] - P[i];
        return normalized(PlanePoint{e.y, -e.x}); // outward for CCW
    };
    SupportData sd;
    if (n == 2) {
        // segment hull: normal on the side of w, or the left normal when w is on it
        PlanePoint nrm = edge_normal(0);
        double t = 0.0;
        point_segment_distance(w, P[0], P[1], &t);
        if (dot(w - P[0], nrm) < 0) nrm = -nrm;
        sd.point = P[0] + t * (P[1] - P[0]);
        sd.v = nrm;
        sd.at_vertex = t <= 0.0 || t >= 1.0;
        sd.r_dir = perp(sd.v);
        return sd;
    }
    double best = INFINITY;
    std::size_t best_i = 0;
    double best_t = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double t = 0.0;
        const double d = point_segment_distance(w, P[i], P[(i + 1) % n], &t);
        if (d < best) {
            best = d;
            best_i = i;
            best_t = t;
        }
    }
    const double scale = std::max(1.0, norm(w));
    const double len = distance(P[best_i], P[(best_i + 1) % n]);
    const double vtol = 1e-9 * scale;
    std::size_t vert = n;
    if (best_t * len <= vtol) vert = best_i;
    else if ((1.0 - best_t) * len <= vtol) vert = (best_i + 1) % n;
    if (vert < n) {
        const PlanePoint n_in = edge_normal((vert + n - 1) % n);
        const PlanePoint n_out = edge_normal(vert);
        PlanePoint mid = n_in + n_out;
        sd.v = norm(mid) > 1e-15 ? normalized(mid) : n_out;
        sd.point = P[vert];
        sd.at_vertex = true;
    } else {
        sd.v = edge_normal(best_i);
        sd.point = P[best_i] + best_t * (P[(best_i + 1) % n] - P[best_i]);
    }
    sd.r_dir = perp(sd.v);
    return sd;
}

CriticalResult critical_parameter(const MembershipProbe& probe, double t_lo, double t_hi, double width)
{
    if (!(width > 0.0)) throw Error(ErrorKind::Config, "bisection width must be positive");
    CriticalResult res;
    res.cert_lo = probe(t_lo);
    res.cert_hi = probe(t_hi);
    const bool lo_in = res.cert_lo.state == Membership::Interior;
    const bool hi_in = res.cert_hi.state == Membership::Interior;
    if (lo_in == hi_in) {
        std::ostringstream os;
        os << "bracket [" << t_lo << ", " << t_hi << "] has membership " << to_string(res.cert_lo.state) << " / "
           << to_string(res.cert_hi.state) << " at its ends";
        throw Error(ErrorKind::InvalidBracket, os.str());
    }
    if (lo_in) {
        std::swap(t_lo, t_hi);
        std::swap(res.cert_lo, res.cert_hi);
    }
    while (std::abs(t_hi - t_lo) > width) {
        const double mid = 0.5 * (t_lo + t_hi);
        const MembershipCertificate c = probe(mid);
        ++res.steps;
        if (c.state == Membership::Interior) {
            t_hi = mid;
            res.cert_hi = c;
        } else {
            t_lo = mid;
            res.cert_lo = c;
        }
    }
    res.t_lo = t_lo;
    res.t_hi = t_hi;
    res.t_bar = t_lo;
    return res;
}

MembershipProbe family_probe(const LiftFamily& fam, const FamilyParams& base, const std::string& axis, PlanePoint w,
                             const FamilyProbeConfig& cfg)
{
    return [fam, base, axis, w, cfg](double t) {
        const FamilyParams p = base.with(axis, t);
        const RotationSetApprox outer = mz_outer_hull(fam, p, cfg.outer);
        const RotationSetApprox inner = inner_hull(fam, p, outer, cfg.inner);
        MembershipCertificate c;
        c.t = t;
        c.state = membership(outer, inner, w, cfg.margin);
        c.outer_depth = signed_depth(outer.vertices, w);
        c.inner_depth = inner.vertices.empty() ? -INFINITY : signed_depth(inner.vertices, w);
        return c;
    };
}

} // namespace rotolab
