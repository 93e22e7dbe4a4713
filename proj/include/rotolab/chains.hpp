#pragma once

#include <string>
#include <vector>

#include "rotolab/intersections.hpp"
#include "rotolab/manifolds.hpp"

namespace rotolab {

enum class ChainRole { GammaV, GammaH };

const char* to_string(ChainRole r);

struct ChainPiece {
    std::string source;  // "unstable+", "stable-", "gamma_v", ...
    IntVec translate;
    bool reversed = false;
    std::size_t vertices = 0;
};

/// Curve from the saddle P to P + e, e = (0,-1) for GammaV and (1,0) for GammaH.
struct ChainCurve {
    ChainRole role = ChainRole::GammaV;
    PlanePoint base;     // P
    IntVec start_cell;   // lattice offset of the first endpoint
    IntVec end_cell;     // lattice offset of the last endpoint
    std::vector<PlanePoint> points;
    std::vector<ChainPiece> composition;
    double diameter = 0.0;
    double max_joint_gap = 0.0;

    IntVec nominal() const { return role == ChainRole::GammaV ? IntVec{0, -1} : IntVec{1, 0}; }
};

/// lambda_u from P to the event, then the (0,-1) translate of lambda_s back to P - (0,1).
ChainCurve build_gamma_v(const ManifoldArc& lambda_u, const ManifoldArc& lambda_s, const IntersectionEvent& event);

/// Unstable branch from P to an event with lambda_s + (1,b), then the stable piece to P + (1,b),
/// then |b| translates of gamma_v to P + (1,0).
ChainCurve build_gamma_h(const ManifoldArc& w_u, const ManifoldArc& lambda_s, const ChainCurve& gamma_v,
                         const IntersectionEvent& event);

/// Chain translated by an integer vector.
std::vector<PlanePoint> placed(const ChainCurve& c, IntVec offset);

struct Placement {
    IntVec offset;
    ChainRole role;
    bool reversed;
};

struct ThetaBand {
    PlanePoint w;        // unit direction of the band
    PlanePoint v;        // unit normal (w = v rotated by -90 degrees... w = perp(v) up to sign)
    std::vector<Placement> placements;
    std::vector<IntVec> lattice; // lattice points visited, in order along w
    std::vector<PlanePoint> points; // concatenated polyline
    double width = 0.0;
    double l_minus = 0.0;  // min over vertices of x.v
    double l_plus = 0.0;   // max over vertices of x.v
    double w_min = 0.0;    // extent along w
    double w_max = 0.0;
    double bound = 0.0;    // 3 + 2 max diam
    double Kf = 0.0;
};

/// Greedy staircase of gamma_H / gamma_V translates spanning [-span, span] along w.
/// v is the unit normal used for the offset window; it must be orthogonal to w.
ThetaBand build_theta(const ChainCurve& gamma_h, const ChainCurve& gamma_v, PlanePoint w, PlanePoint v, double span);
ThetaBand translate_theta(const ThetaBand& th, IntVec cd);

double compute_Kf(double diam_v, double diam_h);
double compute_Kf(const ChainCurve& gamma_v, const ChainCurve& gamma_h);
double width_bound(double diam_v, double diam_h);

struct WidthCheck {
    bool pass = false;
    double width = 0.0;
    double bound = 0.0;
};
WidthCheck width_check(const ThetaBand& th);

struct LineHitReport {
    int lines = 0;
    int hit = 0;
    bool pass = false;
};
/// Lines orthogonal to w at evenly spaced offsets inside the band's span.
LineHitReport line_hit_check(const ThetaBand& th, int lines = 100, double inset = 0.5);

struct ChainValidation {
    bool lattice_exact = false;
    bool connected = false;
    double endpoint_error = 0.0;
};
ChainValidation validate_chain(const ChainCurve& c, double tol = 1e-9);

/// min_gap between theta and theta + (c,d), plus the side classification of the translate.
struct DisjointReport {
    double gap = 0.0;
    bool disjoint = false;
    bool above = false; // all vertices of theta + (c,d) strictly beyond l_plus
    double projection = 0.0;
};
DisjointReport disjoint_check(const ThetaBand& th, IntVec cd);

} // namespace rotolab
