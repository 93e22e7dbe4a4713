#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rotolab/map_core.hpp"

namespace rotolab {

/// FlipSaddle: real eigenvalues of negative sign (trace < -2); its fixed-point index is +1.
enum class PointClass { Saddle, FlipSaddle, Elliptic, ParabolicDegenerate };

const char* to_string(PointClass c);

struct SaddleRecord {
    PlanePoint z;
    int q = 1;
    IntVec trans;
    double trace = 0.0;
    double det = 1.0;
    double lambda_u = 0.0; // |lambda_u| >= |lambda_s|; for elliptic points the real part
    double lambda_s = 0.0;
    PlanePoint eig_u;      // unit, first nonzero component positive
    PlanePoint eig_s;
    PointClass cls = PointClass::Elliptic;
    int index = 0;         // sign det(I - D f^q)
    double residual = 0.0; // |f^q(z) - z - trans|
    FamilyParams params;

    bool hyperbolic() const { return cls == PointClass::Saddle || cls == PointClass::FlipSaddle; }
};

struct PeriodicConfig {
    int grid = 32;
    int max_iter = 60;
    double newton_tol = 1e-11;
    double accept_tol = 1e-9;
    double dedup_cell = 1e-4;
    double dedup_dist = 1e-6;
    double parabolic_tol = 1e-6;
    double max_step = 0.25;
    int threads = 0;
};

/// Damped Newton on F(z) = f^q(z) - z - trans. Returns the root when |F| <= accept_tol.
std::optional<PlanePoint> newton_periodic(const BoundLift& lift, PlanePoint seed, int q, IntVec trans,
                                          const PeriodicConfig& cfg = {});

/// Classifies a root of F (eigen-data, class, index).
SaddleRecord classify_point(const BoundLift& lift, PlanePoint z, int q, IntVec trans, const FamilyParams& params,
                            double parabolic_tol = 1e-6);

/// Grid-seeded census of roots of F in [0,1)^2, deduplicated modulo Z^2 and sorted by (x, y).
/// Throws NonIsolated when the roots form a continuum.
std::vector<SaddleRecord> find_periodic(const LiftFamily& fam, const FamilyParams& params, int q, IntVec trans,
                                        const PeriodicConfig& cfg = {});

/// Winding number of F on the circle of radius r about z.
int topological_index(const BoundLift& lift, PlanePoint z, int q, IntVec trans, double r, int min_samples = 512);

struct ContinuationPoint {
    double t;
    SaddleRecord rec;
};

struct ContinuationCurve {
    std::string axis;
    std::vector<ContinuationPoint> points;
    double max_step_displacement = 0.0;
    int halvings = 0;
    bool fold_end = false;
    bool complete = false;
    std::string diagnostic;
};

struct ContinuationConfig {
    double h_min = 1e-7;
    double max_jump = 0.05;
    double fold_tol = 1e-2; // |det(D F)| below this means the branch is folding
    PeriodicConfig newton;
};

/// Predictor-corrector continuation of start along axis from start.params[axis] to t_end.
ContinuationCurve continue_in_parameter(const LiftFamily& fam, const SaddleRecord& start, const std::string& axis,
                                        double t_end, double h, const ContinuationConfig& cfg = {});

struct LefschetzReport {
    int sum = 0;
    bool pass = false;
    std::size_t count = 0;
    std::string diagnostic;
};

/// Sum of indices over a q = 1, trans = 0 census.
LefschetzReport lefschetz_sum(const std::vector<SaddleRecord>& records);

/// Census at grid g and 2g; count mismatch raises IncompleteCensus.
LefschetzReport lefschetz_check(const LiftFamily& fam, const FamilyParams& params, const PeriodicConfig& cfg = {});

} // namespace rotolab
