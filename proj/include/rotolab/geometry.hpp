#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <span>
#include <vector>

namespace rotolab {

/// A point (or vector) of the covering plane, in torus-cover units.
struct PlanePoint {
    double x = 0.0;
    double y = 0.0;

    constexpr PlanePoint& operator+=(const PlanePoint& o) { x += o.x; y += o.y; return *this; }
    constexpr PlanePoint& operator-=(const PlanePoint& o) { x -= o.x; y -= o.y; return *this; }
    friend constexpr PlanePoint operator+(PlanePoint a, const PlanePoint& b) { return a += b; }
    friend constexpr PlanePoint operator-(PlanePoint a, const PlanePoint& b) { return a -= b; }
    friend constexpr PlanePoint operator-(const PlanePoint& a) { return {-a.x, -a.y}; }
    friend constexpr PlanePoint operator*(double s, const PlanePoint& a) { return {s * a.x, s * a.y}; }
    friend constexpr PlanePoint operator*(const PlanePoint& a, double s) { return {s * a.x, s * a.y}; }
    friend constexpr PlanePoint operator/(const PlanePoint& a, double s) { return {a.x / s, a.y / s}; }
    friend constexpr bool operator==(const PlanePoint&, const PlanePoint&) = default;
};

/// Integer deck translation (a, b).
struct IntVec {
    long a = 0;
    long b = 0;

    friend constexpr IntVec operator+(IntVec u, IntVec v) { return {u.a + v.a, u.b + v.b}; }
    friend constexpr IntVec operator-(IntVec u, IntVec v) { return {u.a - v.a, u.b - v.b}; }
    friend constexpr IntVec operator-(IntVec u) { return {-u.a, -u.b}; }
    friend constexpr auto operator<=>(const IntVec&, const IntVec&) = default;

    constexpr PlanePoint as_point() const { return {static_cast<double>(a), static_cast<double>(b)}; }
};

/// Row-major 2x2 matrix [[a, b], [c, d]].
struct Mat2 {
    double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

    static constexpr Mat2 identity() { return {}; }
    constexpr double trace() const { return a + d; }
    constexpr double det() const { return a * d - b * c; }
    constexpr PlanePoint operator*(const PlanePoint& p) const { return {a * p.x + b * p.y, c * p.x + d * p.y}; }
    friend constexpr Mat2 operator*(const Mat2& m, const Mat2& n)
    {
        return {m.a * n.a + m.b * n.c, m.a * n.b + m.b * n.d,
                m.c * n.a + m.d * n.c, m.c * n.b + m.d * n.d};
    }
    friend constexpr Mat2 operator-(const Mat2& m, const Mat2& n) { return {m.a - n.a, m.b - n.b, m.c - n.c, m.d - n.d}; }
    double max_abs() const;
};

inline constexpr double dot(const PlanePoint& u, const PlanePoint& v) { return u.x * v.x + u.y * v.y; }
inline constexpr double cross(const PlanePoint& u, const PlanePoint& v) { return u.x * v.y - u.y * v.x; }
inline double norm(const PlanePoint& u) { return std::hypot(u.x, u.y); }
inline double distance(const PlanePoint& u, const PlanePoint& v) { return norm(u - v); }
inline constexpr PlanePoint perp(const PlanePoint& u) { return {-u.y, u.x}; }
PlanePoint normalized(const PlanePoint& u);
inline bool is_finite(const PlanePoint& p) { return std::isfinite(p.x) && std::isfinite(p.y); }

/// Reduce into the fundamental domain [0,1)^2.
PlanePoint reduce_mod1(const PlanePoint& p);

/// Sign of the orientation determinant of (a, b, c): +1 left turn, -1 right turn, 0 collinear.
/// Exact for all finite double inputs (filtered, with an expansion-arithmetic fallback).
int orient2d(const PlanePoint& a, const PlanePoint& b, const PlanePoint& c);

/// Counter-clockwise convex hull with collinear and duplicate points removed.
std::vector<PlanePoint> convex_hull(std::vector<PlanePoint> pts);

/// Signed distance from w to the boundary of a CCW convex polygon: positive inside,
/// negative outside. Degenerate polygons (point, segment) have no inside.
double signed_depth(std::span<const PlanePoint> poly, const PlanePoint& w);

/// Polygon point closest to w (boundary point, or w itself when inside).
PlanePoint closest_point(std::span<const PlanePoint> poly, const PlanePoint& w);

double polygon_area(std::span<const PlanePoint> poly);

/// Maximal pairwise distance of a point set (hull + rotating calipers).
double diameter(std::span<const PlanePoint> pts);

/// Closest distance between segments [p0,p1] and [q0,q1]; zero when they meet.
double segment_distance(const PlanePoint& p0, const PlanePoint& p1,
                        const PlanePoint& q0, const PlanePoint& q1,
                        PlanePoint* on_p = nullptr, PlanePoint* on_q = nullptr);

double point_segment_distance(const PlanePoint& p, const PlanePoint& a, const PlanePoint& b,
                              double* param = nullptr);

/// Cumulative arclength of a polyline, same length as pts.
std::vector<double> cumulative_length(std::span<const PlanePoint> pts);

/// Axis-aligned bounding box.
struct Box {
    PlanePoint lo{INFINITY, INFINITY};
    PlanePoint hi{-INFINITY, -INFINITY};

    void add(const PlanePoint& p);
    bool empty() const { return lo.x > hi.x; }
    bool overlaps(const Box& o, double pad = 0.0) const;
    Box shifted(const PlanePoint& v) const { return {lo + v, hi + v}; }
};

Box bounding_box(std::span<const PlanePoint> pts);

} // namespace rotolab
