#include "rotolab/periodic_points.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <unordered_map>

#include "rotolab/error.hpp"
#include "rotolab/parallel.hpp"

namespace rotolab {

namespace {

PlanePoint residual_vec(const BoundLift& lift, PlanePoint z, int q, IntVec trans)
{
    return power_map(lift, z, q, trans) - z;
}

PlanePoint eigvec(const Mat2& A, double lambda)
{
    PlanePoint v1{A.b, lambda - A.a};
    PlanePoint v2{lambda - A.d, A.c};
    PlanePoint v = norm(v1) >= norm(v2) ? v1 : v2;
    if (norm(v) == 0.0) v = std::abs(A.a - lambda) < std::abs(A.d - lambda) ? PlanePoint{1.0, 0.0} : PlanePoint{0.0, 1.0};
    v = normalized(v);
    if (v.x < 0.0 || (v.x == 0.0 && v.y < 0.0)) v = -v;
    return v;
}

bool solve2(const Mat2& M, PlanePoint r, PlanePoint& out)
{
    const double det = M.det();
    if (det == 0.0 || !std::isfinite(det)) return false;
    out = {(M.d * r.x - M.b * r.y) / det, (-M.c * r.x + M.a * r.y) / det};
    return is_finite(out);
}

double wrap_delta(double a)
{
    return a - std::round(a);
}

} // namespace

const char* to_string(PointClass c)
{
    switch (c) {
    case PointClass::Saddle: return "saddle";
    case PointClass::FlipSaddle: return "flip-saddle";
    case PointClass::Elliptic: return "elliptic";
    case PointClass::ParabolicDegenerate: return "parabolic";
    }
    return "?";
}

std::optional<PlanePoint> newton_periodic(const BoundLift& lift, PlanePoint seed, int q, IntVec trans,
                                          const PeriodicConfig& cfg)
{
    PlanePoint z = seed;
    PlanePoint F;
    double fn = 0.0;
    try {
        F = residual_vec(lift, z, q, trans);
        fn = norm(F);
        for (int it = 0; it < cfg.max_iter && fn > cfg.newton_tol; ++it) {
            const Mat2 DF = power_jacobian(lift, z, q) - Mat2::identity();
            PlanePoint step;
            if (!solve2(DF, F, step)) break;
            const double sn = norm(step);
            if (sn > cfg.max_step) step = step * (cfg.max_step / sn);
            double lam = 1.0;
            bool improved = false;
            for (int k = 0; k < 12; ++k) {
                const PlanePoint cand = z - lam * step;
                const PlanePoint Fc = residual_vec(lift, cand, q, trans);
                const double fc = norm(Fc);
                if (std::isfinite(fc) && fc < fn) {
                    z = cand;
                    F = Fc;
                    fn = fc;
                    improved = true;
                    break;
                }
                lam *= 0.5;
            }
            if (!improved) break;
        }
    } catch (const Error&) {
        return std::nullopt;
    }
    if (!(fn <= cfg.accept_tol) || !is_finite(z)) return std::nullopt;
    return z;
}

SaddleRecord classify_point(const BoundLift& lift, PlanePoint z, int q, IntVec trans, const FamilyParams& params,
                            double parabolic_tol)
{
    SaddleRecord r;
    r.z = z;
    r.q = q;
    r.trans = trans;
    r.params = params;
    r.residual = norm(residual_vec(lift, z, q, trans));
    const Mat2 A = power_jacobian(lift, z, q);
    r.trace = A.trace();
    r.det = A.det();
    const double tr = r.trace;
    const double disc = tr * tr - 4.0 * r.det;
    const double idx_det = (Mat2::identity() - A).det();
    r.index = idx_det > 0 ? 1 : (idx_det < 0 ? -1 : 0);
    if (std::abs(tr - 2.0) < parabolic_tol || std::abs(tr + 2.0) < parabolic_tol) {
        r.cls = PointClass::ParabolicDegenerate;
        r.lambda_u = r.lambda_s = tr / 2.0;
        r.eig_u = eigvec(A, r.lambda_u);
        r.eig_s = r.eig_u;
        if (std::abs(idx_det) < parabolic_tol) r.index = 0;
        return r;
    }
    if (disc > 0.0) {
        const double s = std::sqrt(disc);
        const double big = tr > 0 ? (tr + s) / 2.0 : (tr - s) / 2.0;
        r.lambda_u = big;
        r.lambda_s = r.det / big;
        r.eig_u = eigvec(A, r.lambda_u);
        r.eig_s = eigvec(A, r.lambda_s);
        r.cls = tr > 0 ? PointClass::Saddle : PointClass::FlipSaddle;
    } else {
        r.cls = PointClass::Elliptic;
        r.lambda_u = r.lambda_s = tr / 2.0;
        r.eig_u = {1.0, 0.0};
        r.eig_s = {0.0, 1.0};
    }
    return r;
}

std::vector<SaddleRecord> find_periodic(const LiftFamily& fam, const FamilyParams& params, int q, IntVec trans,
                                        const PeriodicConfig& cfg)
{
    if (q < 1) throw Error(ErrorKind::Config, "period q must be >= 1");
    if (cfg.grid < 8) throw Error(ErrorKind::Config, "seed grid must be at least 8");
    const BoundLift lift = fam.bind(params);
    const int g = cfg.grid;
    const std::size_t n = static_cast<std::size_t>(g) * static_cast<std::size_t>(g);
    std::vector<std::optional<PlanePoint>> roots(n);
    parallel_for(n, cfg.threads, [&](std::size_t idx) {
        const long i = static_cast<long>(idx) / g, j = static_cast<long>(idx) % g;
        const PlanePoint seed{(static_cast<double>(i) + 0.5) / g, (static_cast<double>(j) + 0.5) / g};
        roots[idx] = newton_periodic(lift, seed, q, trans, cfg);
    });

    std::vector<PlanePoint> uniq;
    std::unordered_map<long long, std::vector<std::size_t>> cells;
    const long ncell = static_cast<long>(std::ceil(1.0 / cfg.dedup_cell));
    auto key = [ncell](long cx, long cy) {
        cx = ((cx % ncell) + ncell) % ncell;
        cy = ((cy % ncell) + ncell) % ncell;
        return static_cast<long long>(cx) * ncell + cy;
    };
    std::size_t converged = 0;
    for (const auto& r : roots) {
        if (!r) continue;
        ++converged;
        const PlanePoint z = reduce_mod1(*r);
        const long cx = static_cast<long>(std::floor(z.x / cfg.dedup_cell));
        const long cy = static_cast<long>(std::floor(z.y / cfg.dedup_cell));
        bool dup = false;
        for (long dx = -1; dx <= 1 && !dup; ++dx)
            for (long dy = -1; dy <= 1 && !dup; ++dy) {
                auto it = cells.find(key(cx + dx, cy + dy));
                if (it == cells.end()) continue;
                for (std::size_t u : it->second) {
                    const PlanePoint w = uniq[u];
                    if (std::hypot(wrap_delta(w.x - z.x), wrap_delta(w.y - z.y)) < cfg.dedup_dist) {
                        dup = true;
                        break;
                    }
                }
            }
        if (dup) continue;
        cells[key(cx, cy)].push_back(uniq.size());
        uniq.push_back(z);
    }

    if (uniq.size() > n / 4 && uniq.size() > 16) {
        std::ostringstream os;
        os << "roots of f^" << q << " - (" << trans.a << "," << trans.b << ") are not isolated: " << uniq.size()
           << " distinct roots from " << converged << " converged seeds";
        throw Error(ErrorKind::NonIsolated, os.str());
    }

    std::sort(uniq.begin(), uniq.end(), [](PlanePoint a, PlanePoint b) { return a.x != b.x ? a.x < b.x : a.y < b.y; });
    std::vector<SaddleRecord> out;
    out.reserve(uniq.size());
    for (const auto& z : uniq) {
        const Mat2 DF = power_jacobian(lift, z, q) - Mat2::identity();
        if (DF.max_abs() < 1e-12)
            throw Error(ErrorKind::NonIsolated, "D(f^q) equals the identity at a root; roots are not isolated");
        out.push_back(classify_point(lift, z, q, trans, params, cfg.parabolic_tol));
    }
    return out;
}

int topological_index(const BoundLift& lift, PlanePoint z, int q, IntVec trans, double r, int min_samples)
{
    if (r <= 0.0) throw Error(ErrorKind::Config, "index radius must be positive");
    auto Fat = [&](double phi) {
        const PlanePoint w = z + r * PlanePoint{std::cos(phi), std::sin(phi)};
        const PlanePoint F = residual_vec(lift, w, q, trans);
        if (norm(F) < 1e-12) throw Error(ErrorKind::RadiusTooSmall, "|F| < 1e-12 on the index circle; radius too small");
        return F;
    };
    auto turning = [&](int samples) {
        const double step = 2.0 * std::numbers::pi / samples;
        double total = 0.0;
        PlanePoint prev = Fat(0.0);
        for (int i = 1; i <= samples; ++i) {
            const double phi1 = step * i;
            PlanePoint cur = Fat(phi1);
            double da = std::atan2(cross(prev, cur), dot(prev, cur));
            if (std::abs(da) > std::numbers::pi / 4) {
                // refine this arc until each sub-step turns by less than pi/4
                const double phi0 = phi1 - step;
                int sub = 2;
                for (; sub <= 1 << 16; sub *= 2) {
                    double acc = 0.0;
                    bool ok = true;
                    PlanePoint p = prev;
                    for (int s = 1; s <= sub; ++s) {
                        const PlanePoint c = Fat(phi0 + step * s / sub);
                        const double d = std::atan2(cross(p, c), dot(p, c));
                        if (std::abs(d) > std::numbers::pi / 4) ok = false;
                        acc += d;
                        p = c;
                    }
                    da = acc;
                    if (ok) break;
                }
            }
            total += da;
            prev = cur;
        }
        return total;
    };
    int samples = std::max(512, min_samples);
    double w0 = turning(samples);
    for (int rep = 0; rep < 6; ++rep) {
        samples *= 2;
        const double w1 = turning(samples);
        if (std::abs(w1 - w0) < 1e-6) break;
        w0 = w1;
    }
    return static_cast<int>(std::lround(w0 / (2.0 * std::numbers::pi)));
}

ContinuationCurve continue_in_parameter(const LiftFamily& fam, const SaddleRecord& start, const std::string& axis,
                                        double t_end, double h, const ContinuationConfig& cfg)
{
    if (!start.params.has(axis) && std::find(fam.param_names.begin(), fam.param_names.end(), axis) == fam.param_names.end())
        throw Error(ErrorKind::Config, "unknown continuation axis '" + axis + "'");
    if (start.cls == PointClass::ParabolicDegenerate)
        throw Error(ErrorKind::Config, "continuation must start from a non-degenerate point");
    FamilyParams base = start.params;
    if (!base.has(axis)) base.set(axis, fam.default_params().get(axis));
    ContinuationCurve curve;
    curve.axis = axis;
    double t = base.get(axis);
    const double dir = t_end >= t ? 1.0 : -1.0;
    h = std::abs(h);
    curve.points.push_back({t, start});
    PlanePoint z = start.z;
    PlanePoint vel{0.0, 0.0};
    while (dir * (t_end - t) > 1e-15) {
        const double step = std::min(h, std::abs(t_end - t));
        const double tn = t + dir * step;
        const FamilyParams pn = base.with(axis, tn);
        const BoundLift lift = fam.bind(pn);
        const PlanePoint guess = z + step * vel;
        auto root = newton_periodic(lift, guess, start.q, start.trans, cfg.newton);
        if (root && distance(*root, z) <= cfg.max_jump) {
            const SaddleRecord rec = classify_point(lift, *root, start.q, start.trans, pn, cfg.newton.parabolic_tol);
            curve.max_step_displacement = std::max(curve.max_step_displacement, distance(*root, z));
            vel = (*root - z) / step;
            z = *root;
            t = tn;
            curve.points.push_back({t, rec});
            const double detDF = std::abs((power_jacobian(lift, z, start.q) - Mat2::identity()).det());
            if (detDF < cfg.fold_tol) {
                curve.fold_end = true;
                curve.diagnostic = "fold: D F singular at t=" + std::to_string(t);
                return curve;
            }
            continue;
        }
        h *= 0.5;
        ++curve.halvings;
        if (h < cfg.h_min) {
            const FamilyParams pl = base.with(axis, t);
            const double detDF = std::abs((power_jacobian(fam.bind(pl), z, start.q) - Mat2::identity()).det());
            curve.fold_end = detDF < cfg.fold_tol;
            std::ostringstream os;
            os << (curve.fold_end ? "fold" : "lost branch") << " near t=" << t << " (|det DF|=" << detDF << ")";
            curve.diagnostic = os.str();
            return curve;
        }
    }
    curve.complete = true;
    return curve;
}

LefschetzReport lefschetz_sum(const std::vector<SaddleRecord>& records)
{
    LefschetzReport rep;
    rep.count = records.size();
    for (const auto& r : records) rep.sum += r.index;
    rep.pass = rep.sum == 0;
    if (!rep.pass) {
        std::ostringstream os;
        os << "index sum " << rep.sum << " over " << rep.count << " points; census incomplete or degenerate";
        rep.diagnostic = os.str();
    }
    return rep;
}

LefschetzReport lefschetz_check(const LiftFamily& fam, const FamilyParams& params, const PeriodicConfig& cfg)
{
    const auto coarse = find_periodic(fam, params, 1, {0, 0}, cfg);
    PeriodicConfig fine = cfg;
    fine.grid = cfg.grid * 2;
    const auto refined = find_periodic(fam, params, 1, {0, 0}, fine);
    if (coarse.size() != refined.size()) {
        std::ostringstream os;
        os << "census count changed under grid refinement: " << coarse.size() << " at grid " << cfg.grid << ", "
           << refined.size() << " at grid " << fine.grid;
        throw Error(ErrorKind::IncompleteCensus, os.str());
    }
    return lefschetz_sum(refined);
}

} // namespace rotolab
