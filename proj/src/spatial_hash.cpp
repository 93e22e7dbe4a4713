#include "rotolab/spatial_hash.hpp"

#include <algorithm>
#include <cmath>

namespace rotolab {

std::int64_t SegmentIndex::coord(double v) const
{
    return static_cast<std::int64_t>(std::floor(v / cell_));
}

SegmentIndex::SegmentIndex(std::span<const PlanePoint> pts, double cell) : pts_(pts.begin(), pts.end()), cell_(cell)
{
    bounds_ = bounding_box(pts_);
    for (std::size_t i = 0; i + 1 < pts_.size(); ++i) {
        const PlanePoint a = pts_[i], b = pts_[i + 1];
        const std::int64_t x0 = coord(std::min(a.x, b.x)), x1 = coord(std::max(a.x, b.x));
        const std::int64_t y0 = coord(std::min(a.y, b.y)), y1 = coord(std::max(a.y, b.y));
        for (std::int64_t cx = x0; cx <= x1; ++cx)
            for (std::int64_t cy = y0; cy <= y1; ++cy) cells_[key(cx, cy)].push_back(static_cast<std::uint32_t>(i));
    }
}

std::vector<std::uint32_t> SegmentIndex::candidates(const Box& box) const
{
    std::vector<std::uint32_t> out;
    if (box.empty() || cells_.empty() || !box.overlaps(bounds_)) return out;
    const Box clip{{std::max(box.lo.x, bounds_.lo.x), std::max(box.lo.y, bounds_.lo.y)},
                   {std::min(box.hi.x, bounds_.hi.x), std::min(box.hi.y, bounds_.hi.y)}};
    const std::int64_t x0 = coord(clip.lo.x), x1 = coord(clip.hi.x);
    const std::int64_t y0 = coord(clip.lo.y), y1 = coord(clip.hi.y);
    const double ncells = static_cast<double>(x1 - x0 + 1) * static_cast<double>(y1 - y0 + 1);
    if (ncells > 4.0 * static_cast<double>(cells_.size())) {
        for (const auto& [k, segs] : cells_) out.insert(out.end(), segs.begin(), segs.end());
    } else {
        for (std::int64_t cx = x0; cx <= x1; ++cx)
            for (std::int64_t cy = y0; cy <= y1; ++cy) {
                auto it = cells_.find(key(cx, cy));
                if (it != cells_.end()) out.insert(out.end(), it->second.begin(), it->second.end());
            }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

SegmentIndex::Nearest SegmentIndex::nearest(const PlanePoint& p) const
{
    Nearest best;
    if (pts_.size() == 1) {
        best.dist = distance(p, pts_[0]);
        best.point = pts_[0];
        return best;
    }
    if (segments() == 0) return best;
    auto scan = [&](const std::vector<std::uint32_t>& segs) {
        for (std::uint32_t s : segs) {
            double t = 0.0;
            const double d = point_segment_distance(p, pts_[s], pts_[s + 1], &t);
            if (d < best.dist || (d == best.dist && s < best.segment)) {
                best.dist = d;
                best.segment = s;
                best.param = t;
            }
        }
    };
    // distance from p to the bounding box bounds the search radius from below
    const double dx = std::max({bounds_.lo.x - p.x, 0.0, p.x - bounds_.hi.x});
    const double dy = std::max({bounds_.lo.y - p.y, 0.0, p.y - bounds_.hi.y});
    double r = std::max(cell_, std::hypot(dx, dy) + cell_);
    const double span = std::max(bounds_.hi.x - bounds_.lo.x, bounds_.hi.y - bounds_.lo.y) + std::hypot(dx, dy) + cell_;
    for (;;) {
        scan(candidates({{p.x - r, p.y - r}, {p.x + r, p.y + r}}));
        if (best.dist <= r || r > 2.0 * span) break;
        r *= 2.0;
    }
    best.point = pts_[best.segment] + best.param * (pts_[best.segment + 1] - pts_[best.segment]);
    return best;
}

} // namespace rotolab
