#include "rotolab/geometry.hpp"

#include <algorithm>
#include <limits>

namespace rotolab {

double Mat2::max_abs() const
{
    return std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(d)});
}

PlanePoint normalized(const PlanePoint& u)
{
    const double n = norm(u);
    return n > 0.0 ? u / n : PlanePoint{};
}

PlanePoint reduce_mod1(const PlanePoint& p)
{
    auto r = [](double v) {
        double f = v - std::floor(v);
        return f >= 1.0 ? 0.0 : f;
    };
    return {r(p.x), r(p.y)};
}

namespace {

inline void two_sum(double a, double b, double& s, double& err)
{
    s = a + b;
    const double bv = s - a;
    const double av = s - bv;
    err = (a - av) + (b - bv);
}

inline void two_product(double a, double b, double& p, double& err)
{
    p = a * b;
    err = std::fma(a, b, -p);
}

// Shewchuk grow-expansion; e holds a nonoverlapping expansion in increasing magnitude.
void grow_expansion(std::vector<double>& e, double b)
{
    double q = b;
    std::vector<double> h;
    h.reserve(e.size() + 1);
    for (double ei : e) {
        double s, err;
        two_sum(q, ei, s, err);
        h.push_back(err);
        q = s;
    }
    h.push_back(q);
    e.swap(h);
}

int orient2d_exact(const PlanePoint& a, const PlanePoint& b, const PlanePoint& c)
{
    const double terms[6][2] = {{a.x, b.y}, {-a.x, c.y}, {-c.x, b.y}, {-a.y, b.x}, {a.y, c.x}, {c.y, b.x}};
    std::vector<double> e;
    e.reserve(16);
    for (const auto& t : terms) {
        double p, err;
        two_product(t[0], t[1], p, err);
        grow_expansion(e, err);
        grow_expansion(e, p);
    }
    for (auto it = e.rbegin(); it != e.rend(); ++it) {
        if (*it > 0.0) return 1;
        if (*it < 0.0) return -1;
    }
    return 0;
}

} // namespace

int orient2d(const PlanePoint& a, const PlanePoint& b, const PlanePoint& c)
{
    const double left = (a.x - c.x) * (b.y - c.y);
    const double right = (a.y - c.y) * (b.x - c.x);
    const double det = left - right;
    constexpr double kErrBound = (3.0 + 16.0 * std::numeric_limits<double>::epsilon() / 2.0)
                                 * std::numeric_limits<double>::epsilon() / 2.0;
    const double bound = kErrBound * (std::abs(left) + std::abs(right));
    if (det > bound) return 1;
    if (-det > bound) return -1;
    return orient2d_exact(a, b, c);
}

std::vector<PlanePoint> convex_hull(std::vector<PlanePoint> pts)
{
    std::sort(pts.begin(), pts.end(), [](const PlanePoint& p, const PlanePoint& q) {
        return p.x < q.x || (p.x == q.x && p.y < q.y);
    });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() <= 1) return pts;

    std::vector<PlanePoint> hull(2 * pts.size());
    std::size_t k = 0;
    for (const auto& p : pts) {
        while (k >= 2 && orient2d(hull[k - 2], hull[k - 1], p) <= 0) --k;
        hull[k++] = p;
    }
    const std::size_t lower = k + 1;
    for (auto it = pts.rbegin() + 1; it != pts.rend(); ++it) {
        while (k >= lower && orient2d(hull[k - 2], hull[k - 1], *it) <= 0) --k;
        hull[k++] = *it;
    }
    hull.resize(k - 1);
    return hull;
}

double point_segment_distance(const PlanePoint& p, const PlanePoint& a, const PlanePoint& b, double* param)
{
    const PlanePoint ab = b - a;
    const double len2 = dot(ab, ab);
    double t = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    if (param) *param = t;
    return distance(p, a + t * ab);
}

double signed_depth(std::span<const PlanePoint> poly, const PlanePoint& w)
{
    const std::size_t n = poly.size();
    if (n == 0) return -INFINITY;
    if (n == 1) return -distance(poly[0], w);
    if (n == 2) return -point_segment_distance(w, poly[0], poly[1]);

    bool inside = true;
    for (std::size_t i = 0; i < n && inside; ++i)
        if (orient2d(poly[i], poly[(i + 1) % n], w) < 0) inside = false;

    if (inside) {
        double depth = INFINITY;
        for (std::size_t i = 0; i < n; ++i) {
            const PlanePoint e = poly[(i + 1) % n] - poly[i];
            depth = std::min(depth, cross(e, w - poly[i]) / norm(e));
        }
        return std::max(depth, 0.0);
    }
    double dist = INFINITY;
    for (std::size_t i = 0; i < n; ++i)
        dist = std::min(dist, point_segment_distance(w, poly[i], poly[(i + 1) % n]));
    return -dist;
}

PlanePoint closest_point(std::span<const PlanePoint> poly, const PlanePoint& w)
{
    if (poly.empty()) return w;
    if (poly.size() >= 3 && signed_depth(poly, w) >= 0.0) return w;
    PlanePoint best = poly[0];
    double best_d = INFINITY;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const PlanePoint& a = poly[i];
        const PlanePoint& b = poly[(i + 1) % poly.size()];
        double t;
        const double d = point_segment_distance(w, a, b, &t);
        if (d < best_d) {
            best_d = d;
            best = a + t * (b - a);
        }
    }
    return best;
}

double polygon_area(std::span<const PlanePoint> poly)
{
    double s = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) s += cross(poly[i], poly[(i + 1) % poly.size()]);
    return 0.5 * s;
}

double diameter(std::span<const PlanePoint> pts)
{
    const auto hull = convex_hull(std::vector<PlanePoint>(pts.begin(), pts.end()));
    const std::size_t n = hull.size();
    if (n < 2) return 0.0;
    if (n == 2) return distance(hull[0], hull[1]);

    // Rotating calipers over antipodal pairs.
    double best = 0.0;
    std::size_t j = 1;
    for (std::size_t i = 0; i < n; ++i) {
        const PlanePoint& a = hull[i];
        const PlanePoint& b = hull[(i + 1) % n];
        const PlanePoint e = b - a;
        while (std::abs(cross(e, hull[(j + 1) % n] - a)) > std::abs(cross(e, hull[j] - a))) j = (j + 1) % n;
        best = std::max({best, distance(a, hull[j]), distance(b, hull[j])});
    }
    return best;
}

double segment_distance(const PlanePoint& p0, const PlanePoint& p1, const PlanePoint& q0, const PlanePoint& q1,
                        PlanePoint* on_p, PlanePoint* on_q)
{
    const int o1 = orient2d(p0, p1, q0);
    const int o2 = orient2d(p0, p1, q1);
    const int o3 = orient2d(q0, q1, p0);
    const int o4 = orient2d(q0, q1, p1);
    if (o1 * o2 < 0 && o3 * o4 < 0) {
        const PlanePoint r = p1 - p0, s = q1 - q0;
        const double t = cross(q0 - p0, s) / cross(r, s);
        const PlanePoint x = p0 + t * r;
        if (on_p) *on_p = x;
        if (on_q) *on_q = x;
        return 0.0;
    }
    double best = INFINITY;
    auto consider = [&](const PlanePoint& pt, const PlanePoint& a, const PlanePoint& b, bool pt_on_p) {
        double t;
        const double d = point_segment_distance(pt, a, b, &t);
        if (d < best) {
            best = d;
            const PlanePoint foot = a + t * (b - a);
            if (on_p) *on_p = pt_on_p ? pt : foot;
            if (on_q) *on_q = pt_on_p ? foot : pt;
        }
    };
    consider(p0, q0, q1, true);
    consider(p1, q0, q1, true);
    consider(q0, p0, p1, false);
    consider(q1, p0, p1, false);
    return best;
}

std::vector<double> cumulative_length(std::span<const PlanePoint> pts)
{
    std::vector<double> s(pts.size(), 0.0);
    for (std::size_t i = 1; i < pts.size(); ++i) s[i] = s[i - 1] + distance(pts[i - 1], pts[i]);
    return s;
}

void Box::add(const PlanePoint& p)
{
    lo.x = std::min(lo.x, p.x);
    lo.y = std::min(lo.y, p.y);
    hi.x = std::max(hi.x, p.x);
    hi.y = std::max(hi.y, p.y);
}

bool Box::overlaps(const Box& o, double pad) const
{
    return !(lo.x > o.hi.x + pad || o.lo.x > hi.x + pad || lo.y > o.hi.y + pad || o.lo.y > hi.y + pad);
}

Box bounding_box(std::span<const PlanePoint> pts)
{
    Box b;
    for (const auto& p : pts) b.add(p);
    return b;
}

} // namespace rotolab
