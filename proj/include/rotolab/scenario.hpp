#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "rotolab/homoclinic.hpp"
#include "rotolab/io.hpp"
#include "rotolab/rotation_set.hpp"
#include "rotolab/tangency_finder.hpp"

namespace rotolab {

struct Scenario {
    std::string name = "scenario";
    std::string family;
    FamilyParams params;          // fixed parameters (the axis is set per probe)
    std::string axis;
    bool decreasing = false;      // Interior lies at smaller axis values
    std::vector<double> probes;   // strictly increasing
    PlanePoint w{0.0, 0.0};       // rotation vector whose membership is tracked
    unsigned long long seed = 1;
    int threads = 0;

    OuterHullConfig outer;
    int q_max = 8;
    int census_grid = 24;
    Box window{{-0.35, -0.35}, {0.35, 0.35}};
    bool homoclinic = true;       // add shooting orbits from homoclinic events
    double margin = 1e-3;
    double critical_width = 1e-4;

    int saddle_grid = 32;
    int saddle_id = 0;            // index among the t-bar census saddles
    GrowthConfig growth;
    int spectrum_window = 2;
    std::vector<double> beyond{0.01, 0.02, 0.03}; // offsets past t-bar, towards Interior

    double span = 4.0;
    int lines = 100;

    int max_power = 3;            // N searched in 1..max_power
    std::size_t max_vertices = 4'000'000;
    double bracket_width = 1e-8;
    double gap_tol = 1e-9;
    int unfold_samples = 9;
    int persistence_samples = 4;
    bool diagnostic = true;       // labelled W^u / W^s + target scan with the precondition waived
    IntVec diagnostic_target{0, 1};
    double zoom_radius = 3e-3;
    double zoom_spacing = 2e-7;

    Json source;                  // descriptor as loaded, used for stage hashes

    /// Parameters at axis value t (an axis that is not a family parameter is inert).
    FamilyParams at(double t) const;
    LiftFamily lift_family() const;
    /// +1 when Interior lies at larger axis values.
    double toward_interior() const { return decreasing ? -1.0 : 1.0; }
};

Scenario scenario_from_json(const Json& j);
Scenario load_scenario(const std::string& path);

struct ProbeHulls {
    RotationSetApprox outer, inner;
    std::vector<SaddleRecord> census;   // single-shooting orbits of the inner census
    std::vector<ShootingOrbit> shooting;
    MembershipCertificate cert;
    std::string diagnostic;
};

/// Outer hull, inner census and (optionally) homoclinic shooting orbits at axis = t.
ProbeHulls probe_hulls(const Scenario& sc, double t);

struct StageReport {
    std::string name;
    bool ran = false;
    std::string status; // "ok", "skipped" or the error
};

struct RunResult {
    int exit_code = 0;
    std::string failed_stage;
    std::string diagnostic;
    std::vector<StageReport> stages;
};

/// Runs the stage pipeline into run_dir. A stage is skipped when its inputs hash to the value
/// recorded in run_dir/manifest.json, its outputs are intact and no upstream stage ran.
RunResult run_scenario(const Scenario& sc, const std::string& run_dir, std::ostream* log = nullptr);
RunResult run_scenario(const std::string& path, const std::string& run_dir, std::ostream* log = nullptr);

const std::vector<std::string>& stage_names();

/// Lattice vector of smallest norm with (c,d).v > bound (ties: smaller projection, then lexicographic).
IntVec smallest_admissible(PlanePoint v, double bound);

} // namespace rotolab
