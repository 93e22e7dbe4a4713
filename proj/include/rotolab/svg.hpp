#pragma once

#include <string>
#include <vector>

#include "rotolab/io.hpp"

namespace rotolab {

struct SvgStyle {
    int size = 800;       // square canvas, pixels
    double margin = 40.0; // pixels
    double stroke = 1.2;
    int max_points = 20000; // per curve; longer polylines are decimated evenly
};

/// Deterministic SVG for an artifact: hull, hulls, manifold, overlay, chain, theta or
/// unfolding. Unknown schemas raise a Schema error.
std::string render_svg(const Json& artifact, const SvgStyle& style = {});

/// Overlay artifact: the unstable arc, the stable arc shifted by translate, and event markers.
Json overlay_json(const ManifoldArc& unstable, const ManifoldArc& stable, IntVec translate,
                  const std::vector<IntersectionEvent>& events);

/// Both hulls in one artifact.
Json hulls_json(const RotationSetApprox& outer, const RotationSetApprox& inner);

} // namespace rotolab
