#pragma once

#include <map>
#include <string>
#include <vector>

#include "rotolab/manifolds.hpp"
#include "rotolab/rotation_set.hpp"

namespace rotolab {

enum class EventKind { Transverse, TangencyCandidate };

const char* to_string(EventKind k);

struct IntersectionEvent {
    PlanePoint point;
    IntVec translate;
    EventKind kind = EventKind::Transverse;
    int sign = 0;        // sign of cross(t_u, t_s); 0 for touch contacts
    double angle = 0.0;  // acute angle between the tangent lines
    double s_u = 0.0;    // arclength along the first arc
    double s_s = 0.0;    // arclength along the second arc
    std::size_t seg_u = 0;
    std::size_t seg_s = 0;
    bool touch = false;  // contact without side change
    Branch branch_u = Branch::UnstablePlus;
    Branch branch_s = Branch::StablePlus;
};

struct IntersectConfig {
    double angle_min = 1e-3;
    double refine_tol = 1e-10;
    int threads = 0;
};

/// Crossings and touch contacts between two polylines. Crossings use exact orientation
/// predicates; collinear overlap raises DegenerateOverlap.
std::vector<IntersectionEvent> find_intersections(const std::vector<PlanePoint>& a, const std::vector<PlanePoint>& b,
                                                  const IntersectConfig& cfg = {});

/// Same on manifold arcs; with a lift the events are refined on the arcs' parameterizations.
std::vector<IntersectionEvent> find_intersections(const ManifoldArc& arc_u, const ManifoldArc& arc_s,
                                                  const IntersectConfig& cfg = {}, const BoundLift* lift = nullptr);

struct TranslateSpectrum {
    int window = 0;
    std::vector<IntVec> scanned;
    std::map<IntVec, std::vector<IntersectionEvent>> hits; // translates with at least one event
    double max_angle_asymmetry = 0.0;
    std::vector<IntVec> unmatched_reflections; // hits whose reflection (-a,-b) is not a hit

    bool has_transverse(IntVec v) const;
    std::vector<IntVec> transverse_translates() const;
};

struct SpectrumConfig {
    int window = 2;
    GrowthConfig growth;
    IntersectConfig intersect;
    bool refine = false;
};

/// Unstable branches against integer translates of stable branches for |a|,|b| <= W.
/// The trivial contact at the saddle itself (translate 0) is excluded.
TranslateSpectrum translate_spectrum(const BoundLift& lift, const SaddleRecord& s, const SpectrumConfig& cfg);
TranslateSpectrum translate_spectrum(const LiftFamily& fam, const FamilyParams& params, const SaddleRecord& s,
                                     const SpectrumConfig& cfg);
/// Chart families (not equivariant) scan only the translate (0,0).
/// Spectrum from pre-grown arcs.
TranslateSpectrum spectrum_from_arcs(const std::vector<ManifoldArc>& unstable, const std::vector<ManifoldArc>& stable,
                                     int window, const IntersectConfig& cfg, const BoundLift* lift = nullptr);

struct Lemma0Entry {
    IntVec translate;
    double dot = 0.0;
    bool dot_ok = false;
    bool cone_ok = false;
};

struct Lemma0Report {
    bool pass = true;
    std::vector<Lemma0Entry> entries;
    std::string diagnostic;
};

/// Every transverse translate (a,b) must satisfy (a,b).v <= tol and the outer hull must come
/// within tol of the open ray through (a,b).
Lemma0Report lemma0_check(const TranslateSpectrum& spec, const RotationSetApprox& outer, const SupportData& v,
                          double tol = 1e-6);
/// Distance from the ray {s u : s >= s_min} to a convex polygon.
double ray_polygon_distance(PlanePoint u, const std::vector<PlanePoint>& poly, double s_min);

struct GapResult {
    double distance = INFINITY;
    PlanePoint on_a;
    PlanePoint on_b;
    std::size_t seg_a = 0, seg_b = 0;
};

/// Minimal distance between two polylines (0 when they meet).
GapResult min_gap(const std::vector<PlanePoint>& a, const std::vector<PlanePoint>& b);
/// Same, for polylines already known not to meet.
GapResult min_gap_disjoint(const std::vector<PlanePoint>& a, const std::vector<PlanePoint>& b);

} // namespace rotolab
