#pragma once

#include <memory>
#include <string>
#include <vector>

#include "rotolab/chains.hpp"
#include "rotolab/intersections.hpp"
#include "rotolab/periodic_points.hpp"

namespace rotolab {

enum class SeparationKind { Disjoint, Contact, Transverse };

const char* to_string(SeparationKind k);

/// Result of comparing the moving curve A_t with the fixed target B_t at one parameter.
struct Separation {
    double t = 0.0;
    SeparationKind kind = SeparationKind::Disjoint;
    double gap = INFINITY;         // min distance (0 when crossing)
    double signed_gap = 0.0;       // -gap when disjoint, +penetration depth when crossing
    double half_width = 0.0;       // half distance between the crossings of the newest lens
    std::vector<IntersectionEvent> events;
    bool realized_known = false;
    IntVec realized;               // translate of the stable copy relative to the unstable copy
    PlanePoint witness;
};

/// Saddle copy a vertex belongs to: W^u or W^s of P + copy.
struct Provenance {
    IntVec copy;
    bool stable = false;
};

/// A one-parameter contact problem between two families of polylines.
class ContactProblem {
public:
    virtual ~ContactProblem() = default;
    /// Both curves at parameter t, optionally with per-vertex provenance.
    /// Throws ScanAborted when they cannot be built.
    virtual void curves(double t, std::vector<PlanePoint>& moving, std::vector<PlanePoint>& target,
                        std::vector<Provenance>* moving_prov, std::vector<Provenance>* target_prov) const = 0;
};

/// y = c x^2 + a (t' - t) against y = 0: disjoint for t < t', two crossings for t > t'.
class ParabolaHarness : public ContactProblem {
public:
    ParabolaHarness(double t_prime, double slope = 1.0, double curvature = 1.0);
    void curves(double t, std::vector<PlanePoint>& moving, std::vector<PlanePoint>& target, std::vector<Provenance>*,
                std::vector<Provenance>*) const override;

private:
    double t_prime_, slope_, curvature_;
    std::vector<double> xs_;
};

struct SeparationConfig {
    double gap_tol = 1e-9;
    double angle_min = 1e-3;
};

Separation separation_test(const ContactProblem& prob, double t, const SeparationConfig& cfg = {});

struct TangencyRecord {
    double t_prime = 0.0;
    PlanePoint witness;
    bool realized_known = false;
    IntVec realized;          // (c*, d*)
    double gap_slope = 0.0;
    double t_lo = 0.0, t_hi = 0.0;
    double unfold_r2 = 0.0;
    double halfwidth_r2 = 0.0;
    double halfwidth_coeff = 0.0;
    int steps = 0;
    std::vector<Separation> trail; // classifications at every probed parameter
    std::vector<std::pair<double, double>> other_births;
};

struct BisectConfig {
    double width = 1e-8;
    int max_steps = 60;
    int presample = 0; // >0: scan the bracket at this many interior points for multiple births
    SeparationConfig sep;
};

/// Bisection between a non-transverse t_lo and a transverse t_hi (either order).
TangencyRecord bisect_tangency(const ContactProblem& prob, double t_lo, double t_hi, const BisectConfig& cfg = {});

struct UnfoldingFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    double halfwidth_coeff = 0.0;
    double halfwidth_r2 = 0.0;
    std::vector<double> ts, gaps, halfwidths;
    bool degenerate = false;
    std::string diagnostic;
};

/// Signed gap sampled at >= 9 parameters in [t' - window, t' + window], fitted linearly;
/// crossing half-width fitted against sqrt(t - t') on the transverse side.
UnfoldingFit unfolding_fit(const ContactProblem& prob, double t_prime, double window, int samples = 9,
                           const SeparationConfig& cfg = {});

struct BoundCheck {
    double deviation = 0.0;  // |(c* - c, d* - d).v|
    double proof_bound = 0.0;   // 3 + 2 max diam
    double theorem_bound = 0.0; // K_f / 4
    bool proof_ok = false;
    bool theorem_ok = false;
    bool pass = false;
};

BoundCheck translate_bound_check(IntVec realized, IntVec target, PlanePoint v, double max_diam, double Kf);

/// Scenario contact problem: f^N(theta_t) against theta_t + (c,d), theta rebuilt at each t.
struct ThetaScanConfig {
    LiftFamily family;
    FamilyParams base;
    std::string axis;
    double t_bar = 0.0;
    double t_star = 0.0;
    SaddleRecord saddle;      // at t_bar
    PlanePoint v;             // support normal at t_bar
    IntVec target;            // (c, d)
    int N = 1;
    double Kf = 0.0;
    double max_diam = 0.0;
    double span = 4.0;
    int window = 2;
    GrowthConfig growth;
    std::size_t max_vertices = 4'000'000;
    double h_max = 1e-2;
    double theta_max = 0.3;
    bool enforce_precondition = true;
};

class ThetaContactProblem : public ContactProblem {
public:
    explicit ThetaContactProblem(ThetaScanConfig cfg);
    void curves(double t, std::vector<PlanePoint>& moving, std::vector<PlanePoint>& target,
                std::vector<Provenance>* moving_prov, std::vector<Provenance>* target_prov) const override;
    const ThetaScanConfig& config() const { return cfg_; }

    struct Built {
        SaddleRecord saddle;
        ChainCurve gamma_v, gamma_h;
        ThetaBand theta;
        std::vector<Provenance> prov; // per theta vertex
    };
    /// theta_t from a saddle continued to t.
    Built build(double t) const;

private:
    ThetaScanConfig cfg_;
};

/// W^u(P_t) against W^s(P_t) + (c,d), both branches joined through the saddle.
struct ManifoldScanConfig {
    LiftFamily family;
    FamilyParams base;
    std::string axis;
    double t_bar = 0.0;
    SaddleRecord saddle; // at t_bar
    IntVec target;
    GrowthConfig growth;
};

class ManifoldContactProblem : public ContactProblem {
public:
    explicit ManifoldContactProblem(ManifoldScanConfig cfg);
    void curves(double t, std::vector<PlanePoint>& moving, std::vector<PlanePoint>& target,
                std::vector<Provenance>* moving_prov, std::vector<Provenance>* target_prov) const override;

    /// Restricts both curves to the arc runs through the disk about center, re-evaluated on
    /// the arcs' parameterization with chords of at most spacing.
    void set_zoom(PlanePoint center, double radius, double spacing);
    void clear_zoom() { zoom_ = false; }

private:
    ManifoldScanConfig cfg_;
    bool zoom_ = false;
    PlanePoint zoom_center_;
    double zoom_radius_ = 0.0;
    double zoom_spacing_ = 0.0;
};

/// Saddle continued from its parameter value to axis = t.
SaddleRecord saddle_at(const LiftFamily& fam, const SaddleRecord& s, const std::string& axis, double t);

struct PersistenceReport {
    std::vector<double> ts;
    std::vector<bool> transverse;     // Transverse at ts[i]
    std::vector<bool> same_translate; // realized translate equals the record's
    bool pass = false;
};

/// Samples past t' (towards t_star) must stay Transverse with the record's realized translate.
PersistenceReport persistence_check(const ContactProblem& prob, const TangencyRecord& rec, double t_star,
                                    int samples = 4, const SeparationConfig& cfg = {});

/// f^N of a polyline; points inserted during refinement come from the cubic through the four
/// neighbouring vertices of the previous stage. prov follows the vertices.
/// Throws ScanAborted when max_vertices is exceeded.
std::vector<PlanePoint> map_polyline(const BoundLift& lift, std::vector<PlanePoint> pts, int N, double h_max,
                                     double theta_max, std::size_t max_vertices, std::vector<Provenance>* prov = nullptr);

/// Per-vertex provenance of a chain; gamma_v is needed to expand the copies inside gamma_h.
std::vector<Provenance> chain_provenance(const ChainCurve& c, const ChainCurve* gamma_v = nullptr);

/// Tangency bisection followed by the unfolding fit over window.
TangencyRecord scan_tangency(const ContactProblem& prob, double t_lo, double t_hi, const BisectConfig& cfg,
                             double window, int samples = 9);

/// Chains at t from the saddle's manifolds: gamma_v from the shortest transverse (0,-1) event,
/// gamma_h from the shortest transverse (1,b) event with the smallest |b|.
struct ChainBuild {
    ChainCurve gamma_v, gamma_h;
    IntersectionEvent ev_v, ev_h;
    std::vector<ManifoldArc> arcs;
};
ChainBuild build_chains(const BoundLift& lift, const SaddleRecord& s, const GrowthConfig& growth, int window);

} // namespace rotolab
