#pragma once

#include <string>
#include <vector>

#include "rotolab/map_core.hpp"
#include "rotolab/periodic_points.hpp"

namespace rotolab {

enum class Branch { UnstablePlus, UnstableMinus, StablePlus, StableMinus };

const char* to_string(Branch b);
Branch branch_from_string(const std::string& s);
inline bool is_unstable(Branch b) { return b == Branch::UnstablePlus || b == Branch::UnstableMinus; }

struct GrowthConfig {
    double budget = 30.0;     // arclength L
    double h_max = 1e-3;
    double theta_max = 0.2;   // radians
    double sag_max = 2e-6;    // chord-to-curve deviation bound
    double delta0 = 0.0;      // 0: 1e-7 * max(1, |lambda_u|)
    int initial_points = 16;  // per fundamental domain before refinement
    int max_domains = 400;
    double min_param_gap = 1e-13;
    std::size_t max_points = 20'000'000;
};

/// Polyline approximation of one branch, ordered from the saddle outward. Vertex i is the
/// image of the seed segment point exp-parameterized by sigma[i]: domain floor(sigma).
struct ManifoldArc {
    SaddleRecord saddle;
    Branch branch = Branch::UnstablePlus;
    std::vector<PlanePoint> points;
    std::vector<double> sigma;
    double arclength = 0.0;
    int domains = 0;          // fundamental domains iterated
    IntVec translate;         // accumulated translate_arc shifts
    PlanePoint direction;     // seed direction (+-eigvec)
    double ratio = 0.0;       // multiplier of the growth map along the branch
    double delta0 = 0.0;
    int steps_per_domain = 1; // applications of f^{+-q} -+ trans per domain (2 for flip saddles)
    bool truncated = false;
    std::string diagnostic;

    int domain_of(std::size_t i) const { return static_cast<int>(sigma[i]); }
};

/// Growth of one branch of a hyperbolic point by fundamental-domain iteration with
/// parameter-midpoint insertion. Spacing, turning and sagitta bounds hold at every vertex,
/// otherwise the arc is truncated with a diagnostic.
ManifoldArc grow_branch(const LiftFamily& fam, const FamilyParams& params, const SaddleRecord& s, Branch branch,
                        const GrowthConfig& cfg = {});
ManifoldArc grow_branch(const BoundLift& lift, const SaddleRecord& s, Branch branch, const GrowthConfig& cfg = {});

/// All four branches (grown in parallel).
std::vector<ManifoldArc> grow_all_branches(const BoundLift& lift, const SaddleRecord& s, const GrowthConfig& cfg,
                                           int threads = 0);

/// Point of the branch at parameter sigma (direct evaluation, used for refinement).
PlanePoint branch_point(const BoundLift& lift, const ManifoldArc& arc, double sigma);

/// max over vertices in domains <= K-2 of dist(G(p), arc), G the growth map of the branch.
double invariance_residual(const BoundLift& lift, const ManifoldArc& arc);
double invariance_residual(const LiftFamily& fam, const FamilyParams& params, const ManifoldArc& arc);

ManifoldArc translate_arc(const ManifoldArc& arc, IntVec v);

/// Sub-arc with arclength in [s0, s1] (endpoints interpolated).
std::vector<PlanePoint> sub_polyline(const std::vector<PlanePoint>& pts, double s0, double s1);

struct BoundednessResult {
    bool unbounded = false;
    double max_distance = 0.0;
    std::string evidence;
};

/// Unbounded when the arc leaves the disk of radius R about its saddle and its maximal
/// distance still increases over the last quartile of arclength. Never claims bounded.
BoundednessResult boundedness_probe(const ManifoldArc& arc, double R, double budget);

/// Whether vertex spacing, turning and sagitta bounds hold; reports the first violation.
bool check_arc_bounds(const ManifoldArc& arc, const GrowthConfig& cfg, std::string* why = nullptr);

} // namespace rotolab
