#pragma once

#include <functional>
#include <string>
#include <vector>

#include "rotolab/map_core.hpp"
#include "rotolab/periodic_points.hpp"

namespace rotolab {

enum class HullKind { Outer, Inner };
enum class Membership { Interior, BoundaryBand, Exterior };

const char* to_string(HullKind k);
const char* to_string(Membership m);

struct RotationSetApprox {
    std::vector<PlanePoint> vertices; // CCW
    HullKind kind = HullKind::Outer;
    long n_min = 0;
    long n_max = 0;
    int grid = 0;
    std::string family;
    FamilyParams params;
    unsigned long long seed = 0;
    std::vector<long> ladder;
    std::vector<double> ladder_diameter; // hull diameter at each ladder depth alone
    std::vector<IntVec> sources;         // Inner: (p, l) numerators per orbit, paired with periods
    std::vector<int> source_periods;
};

struct OuterHullConfig {
    int grid = 64;
    long n_min = 500;
    long n_max = 4000;
    unsigned long long seed = 1;
    int threads = 0;
};

std::vector<long> iterate_ladder(long n_min, long n_max);

/// Jittered g x g seed grid on [0,1)^2, derived from seed.
std::vector<PlanePoint> seed_grid(int g, unsigned long long seed);

RotationSetApprox mz_outer_hull(const LiftFamily& fam, const FamilyParams& params, const OuterHullConfig& cfg = {});

/// Outer hull from an explicit seed list (used for refinement tests).
RotationSetApprox outer_hull_from_seeds(const BoundLift& lift, const std::vector<PlanePoint>& seeds,
                                        const std::vector<long>& ladder, int threads = 0);

/// (p_t/q, l_t/q) after verifying the residual; NotPeriodic above tol.
PlanePoint rotation_vector(const BoundLift& lift, PlanePoint z, int q, IntVec trans, double tol = 1e-9);

struct InnerCensusConfig {
    int q_max = 4;
    double outer_inflate = 0.0; // candidates must lie in Outer inflated by this
    bool use_window = false;    // candidates from window instead of the outer hull
    Box window;
    PeriodicConfig newton{.grid = 16};
};

/// Inner hull from certified periodic orbits whose rational rotation vectors lie in outer
/// (or in cfg.window).
RotationSetApprox inner_hull(const LiftFamily& fam, const FamilyParams& params, const RotationSetApprox& outer,
                             const InnerCensusConfig& cfg, std::vector<SaddleRecord>* orbits = nullptr);

/// Hull of the given orbits' rotation vectors.
RotationSetApprox inner_hull_from_records(const std::vector<SaddleRecord>& orbits);

Membership membership(const RotationSetApprox& outer, const RotationSetApprox& inner, PlanePoint w, double margin = 1e-3);

struct SupportData {
    PlanePoint point;
    PlanePoint v;
    PlanePoint r_dir;
    bool at_vertex = false;
};

/// Outward normal at the boundary point nearest w; vertices use the angular midpoint of
/// the adjacent edge normals. NoSupport when w is more than margin inside.
SupportData supporting_line(const RotationSetApprox& outer, PlanePoint w, double margin = 1e-3);

struct MembershipCertificate {
    double t = 0.0;
    Membership state = Membership::Exterior;
    double outer_depth = 0.0;
    double inner_depth = 0.0;
};

struct CriticalResult {
    double t_bar = 0.0; // last non-Interior parameter
    double t_lo = 0.0;
    double t_hi = 0.0;
    MembershipCertificate cert_lo;
    MembershipCertificate cert_hi;
    int steps = 0;
};

using MembershipProbe = std::function<MembershipCertificate(double t)>;

/// Bisection on the probe between a non-Interior end t_lo and an Interior end t_hi
/// (t_lo may exceed t_hi). InvalidBracket when both ends agree.
CriticalResult critical_parameter(const MembershipProbe& probe, double t_lo, double t_hi, double width = 1e-4);

struct FamilyProbeConfig {
    OuterHullConfig outer;
    InnerCensusConfig inner;
    double margin = 1e-3;
};

/// Membership probe that recomputes both hulls of fam at axis = t.
MembershipProbe family_probe(const LiftFamily& fam, const FamilyParams& base, const std::string& axis, PlanePoint w,
                             const FamilyProbeConfig& cfg);

} // namespace rotolab
