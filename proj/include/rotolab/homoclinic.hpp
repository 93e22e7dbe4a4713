#pragma once

#include <vector>

#include "rotolab/intersections.hpp"
#include "rotolab/manifolds.hpp"
#include "rotolab/rotation_set.hpp"

namespace rotolab {

struct ShootingConfig {
    int max_iter = 30;
    double tol = 1e-12;
    double accept_tol = 1e-9;
};

/// Periodic orbit z_0..z_{q-1} with f(z_i) = z_{i+1} and f(z_{q-1}) = z_0 + trans.
struct ShootingOrbit {
    std::vector<PlanePoint> z;
    IntVec trans;
    double residual = INFINITY; // max_i |f(z_i) - z_{i+1}|
    int iterations = 0;
    bool converged = false;
    int q() const { return static_cast<int>(z.size()); }
    PlanePoint rotation() const { return trans.as_point() / static_cast<double>(z.size()); }
};

double shooting_residual(const BoundLift& lift, const std::vector<PlanePoint>& z, IntVec trans);

/// Multiple-shooting Newton from a pseudo-orbit seed.
ShootingOrbit shooting_periodic(const BoundLift& lift, std::vector<PlanePoint> seed, IntVec trans,
                                const ShootingConfig& cfg = {});

/// Pseudo-orbit through a transverse event of W^u with W^s + T: the unstable arc from its seed
/// domain to the event, then the translated stable arc back to its seed domain. Closes with
/// trans T up to the seed offsets. Needs q = 1 arcs with one step per domain.
std::vector<PlanePoint> homoclinic_pseudo_orbit(const BoundLift& lift, const ManifoldArc& unstable,
                                                const ManifoldArc& stable, const IntersectionEvent& ev);

struct HomoclinicCensusConfig {
    GrowthConfig growth;
    int window = 2;
    int per_translate = 2; // events tried per translate, shortest excursions first
    int max_period = 60;
    ShootingConfig shooting;
    PeriodicConfig saddles{.grid = 16};
};

/// Periodic orbits shadowing homoclinic excursions of the q = 1, trans 0 saddles.
std::vector<ShootingOrbit> homoclinic_orbits(const LiftFamily& fam, const FamilyParams& params,
                                             const HomoclinicCensusConfig& cfg = {});

/// Adds the orbits' rotation vectors to an inner hull (vertices recomputed, sources appended).
void add_orbit_vectors(RotationSetApprox& inner, const std::vector<ShootingOrbit>& orbits);

} // namespace rotolab
