#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "rotolab/geometry.hpp"

namespace rotolab {

/// Uniform-grid index over the segments of a polyline (segment i joins pts[i], pts[i+1]).
class SegmentIndex {
public:
    SegmentIndex() = default;
    SegmentIndex(std::span<const PlanePoint> pts, double cell);

    std::size_t segments() const { return pts_.size() < 2 ? 0 : pts_.size() - 1; }
    std::span<const PlanePoint> points() const { return pts_; }
    double cell() const { return cell_; }

    /// Indices of segments whose cells overlap box (may contain false positives), sorted, unique.
    std::vector<std::uint32_t> candidates(const Box& box) const;

    struct Nearest {
        double dist = INFINITY;
        std::size_t segment = 0;
        double param = 0.0;
        PlanePoint point;
    };
    /// Closest point on the polyline to p (exact; searches outward ring by ring).
    Nearest nearest(const PlanePoint& p) const;

private:
    std::int64_t key(std::int64_t cx, std::int64_t cy) const { return cx * 0x9E3779B1LL ^ (cy + (cx << 32)); }
    std::int64_t coord(double v) const;

    std::vector<PlanePoint> pts_;
    double cell_ = 1.0;
    Box bounds_;
    std::unordered_map<std::int64_t, std::vector<std::uint32_t>> cells_;
};

} // namespace rotolab
