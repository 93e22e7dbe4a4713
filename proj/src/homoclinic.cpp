#include "rotolab/homoclinic.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "rotolab/error.hpp"

namespace rotolab {

namespace {

// sigma of the arc point nearest p on segment i
double sigma_on_segment(const ManifoldArc& arc, std::size_t i, PlanePoint p)
{
    double u = 0.0;
    point_segment_distance(p, arc.points[i], arc.points[i + 1], &u);
    const double s0 = std::max(arc.sigma[i], 0.0), s1 = arc.sigma[i + 1];
    return s0 + u * (s1 - s0);
}

} // namespace

double shooting_residual(const BoundLift& lift, const std::vector<PlanePoint>& z, IntVec trans)
{
    double r = 0.0;
    const std::size_t q = z.size();
    for (std::size_t i = 0; i < q; ++i) {
        const PlanePoint next = i + 1 < q ? z[i + 1] : z[0] + trans.as_point();
        const PlanePoint d = lift(z[i]) - next;
        if (!is_finite(d)) return INFINITY;
        r = std::max(r, norm(d));
    }
    return r;
}

ShootingOrbit shooting_periodic(const BoundLift& lift, std::vector<PlanePoint> seed, IntVec trans,
                                const ShootingConfig& cfg)
{
    ShootingOrbit orb;
    orb.trans = trans;
    const std::size_t q = seed.size();
    if (q == 0) throw Error(ErrorKind::Config, "empty shooting seed");
    const Eigen::Index n = static_cast<Eigen::Index>(2 * q);
    orb.z = std::move(seed);
    for (int it = 0; it < cfg.max_iter; ++it) {
        Eigen::VectorXd rhs(n);
        Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
        double res = 0.0;
        for (std::size_t i = 0; i < q; ++i) {
            const std::size_t j = (i + 1) % q;
            const PlanePoint next = i + 1 < q ? orb.z[j] : orb.z[0] + trans.as_point();
            const PlanePoint d = lift(orb.z[i]) - next;
            if (!is_finite(d)) return orb;
            res = std::max(res, norm(d));
            const Mat2 m = lift.jacobian(orb.z[i]);
            const Eigen::Index r = static_cast<Eigen::Index>(2 * i), c = static_cast<Eigen::Index>(2 * j);
            rhs(r) = -d.x;
            rhs(r + 1) = -d.y;
            J(r, r) += m.a;
            J(r, r + 1) += m.b;
            J(r + 1, r) += m.c;
            J(r + 1, r + 1) += m.d;
            J(r, c) -= 1.0;
            J(r + 1, c + 1) -= 1.0;
        }
        orb.residual = res;
        orb.iterations = it;
        if (res <= cfg.tol) break;
        const Eigen::VectorXd step = J.fullPivLu().solve(rhs);
        if (!step.allFinite()) return orb;
        for (std::size_t i = 0; i < q; ++i) orb.z[i] += PlanePoint{step(2 * i), step(2 * i + 1)};
    }
    orb.residual = shooting_residual(lift, orb.z, trans);
    orb.converged = orb.residual <= cfg.accept_tol;
    return orb;
}

std::vector<PlanePoint> homoclinic_pseudo_orbit(const BoundLift& lift, const ManifoldArc& unstable,
                                                const ManifoldArc& stable, const IntersectionEvent& ev)
{
    if (unstable.saddle.q != 1 || unstable.steps_per_domain != 1 || stable.steps_per_domain != 1)
        throw Error(ErrorKind::Config, "pseudo-orbits need q = 1 arcs with one step per domain");
    const IntVec t = ev.translate - stable.translate;
    ManifoldArc st = translate_arc(stable, t);
    if (ev.seg_u + 1 >= unstable.points.size() || ev.seg_s + 1 >= st.points.size())
        throw Error(ErrorKind::Mismatch, "event segment outside the arcs");
    const double su = sigma_on_segment(unstable, ev.seg_u, ev.point);
    const double ss = sigma_on_segment(st, ev.seg_s, ev.point);
    const long nu = static_cast<long>(std::floor(su)), ns = static_cast<long>(std::floor(ss));
    const double fu = su - nu, fs = ss - ns;
    std::vector<PlanePoint> z;
    for (long i = 0; i <= nu; ++i) z.push_back(branch_point(lift, unstable, fu + i));
    for (long j = ns - 1; j >= 0; --j) z.push_back(branch_point(lift, st, fs + j));
    // the last point sits by P + T and is identified with z_0 + T
    if (z.size() >= 2) z.pop_back();
    return z;
}

std::vector<ShootingOrbit> homoclinic_orbits(const LiftFamily& fam, const FamilyParams& params,
                                             const HomoclinicCensusConfig& cfg)
{
    const BoundLift lift = fam.bind(params);
    std::vector<ShootingOrbit> out;
    for (const auto& s : find_periodic(fam, params, 1, {0, 0}, cfg.saddles)) {
        if (s.cls != PointClass::Saddle) continue;
        const auto arcs = grow_all_branches(lift, s, cfg.growth);
        const std::vector<ManifoldArc> unstable{arcs[0], arcs[1]}, stable{arcs[2], arcs[3]};
        const auto spec = spectrum_from_arcs(unstable, stable, cfg.window, {}, &lift);
        for (const auto& [tr, evs] : spec.hits) {
            if (tr == IntVec{0, 0}) continue;
            std::vector<const IntersectionEvent*> order;
            for (const auto& e : evs)
                if (e.kind == EventKind::Transverse) order.push_back(&e);
            std::stable_sort(order.begin(), order.end(),
                             [](auto a, auto b) { return a->s_u + a->s_s < b->s_u + b->s_s; });
            int tried = 0;
            for (const auto* e : order) {
                if (tried >= cfg.per_translate) break;
                const ManifoldArc& au = arcs[e->branch_u == Branch::UnstablePlus ? 0 : 1];
                const ManifoldArc& as = arcs[e->branch_s == Branch::StablePlus ? 2 : 3];
                const auto seed = homoclinic_pseudo_orbit(lift, au, as, *e);
                if (seed.empty() || static_cast<int>(seed.size()) > cfg.max_period) continue;
                ++tried;
                auto orb = shooting_periodic(lift, seed, tr, cfg.shooting);
                if (orb.converged) out.push_back(std::move(orb));
            }
        }
    }
    return out;
}

void add_orbit_vectors(RotationSetApprox& inner, const std::vector<ShootingOrbit>& orbits)
{
    std::vector<PlanePoint> pts = inner.vertices;
    for (const auto& o : orbits) {
        pts.push_back(o.rotation());
        inner.sources.push_back(o.trans);
        inner.source_periods.push_back(o.q());
    }
    inner.vertices = convex_hull(pts);
}

} // namespace rotolab
