#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "rotolab/geometry.hpp"

namespace rotolab {

/// Named real parameters of a family (k = shear strength, d = drift, ...).
class FamilyParams {
public:
    FamilyParams() = default;
    FamilyParams(std::initializer_list<std::pair<const std::string, double>> init) : values_(init) {}

    void set(const std::string& name, double value) { values_[name] = value; }
    bool has(const std::string& name) const { return values_.count(name) != 0; }
    double get(const std::string& name) const;
    FamilyParams with(const std::string& name, double value) const;
    const std::map<std::string, double>& values() const { return values_; }

    friend bool operator==(const FamilyParams&, const FamilyParams&) = default;

private:
    std::map<std::string, double> values_;
};

/// A lift evaluated at fixed parameter values. Cheap to copy; safe to share across threads.
struct BoundLift {
    std::function<PlanePoint(PlanePoint)> map;
    std::function<PlanePoint(PlanePoint)> inverse;
    std::function<Mat2(PlanePoint)> jacobian;

    PlanePoint operator()(PlanePoint z) const { return map(z); }
};

/// One-parameter-family (in general multi-parameter) lift of a torus diffeomorphism
/// homotopic to the identity. Chart families (equivariant == false) are local models
/// used for testing; they do not commute with deck translations.
struct LiftFamily {
    std::string name;
    std::vector<std::string> param_names;
    std::vector<double> defaults;
    bool equivariant = true;
    std::function<BoundLift(const std::vector<double>&)> binder;

    /// Resolves params against param_names (missing names take defaults).
    /// Unknown names raise a config error.
    BoundLift bind(const FamilyParams& params) const;
    FamilyParams default_params() const;
};

struct IterateResult {
    PlanePoint end;
    PlanePoint displacement; // (f^n(z) - z) / n
};

PlanePoint eval_lift(const LiftFamily& fam, const FamilyParams& params, PlanePoint z);

/// f^n(z) and the mean displacement. Throws NumericBlowup naming the first bad step.
IterateResult iterate_lift(const BoundLift& lift, PlanePoint z, long n);
IterateResult iterate_lift(const LiftFamily& fam, const FamilyParams& params, PlanePoint z, long n);

Mat2 jacobian(const LiftFamily& fam, const FamilyParams& params, PlanePoint z);

/// One of identity, translation, two-shear, two-shear-drift.
LiftFamily builtin_family(const std::string& name);

/// Non-equivariant local models: linear-saddle (diag(lambda, 1/lambda)) and
/// saddle-node (conservative fold at t = 2).
LiftFamily chart_family(const std::string& name);

/// builtin_family, then chart_family.
LiftFamily family_by_name(const std::string& name);

/// Newton inversion of an arbitrary bound map; used when no closed-form inverse exists.
PlanePoint newton_inverse(const BoundLift& lift, PlanePoint target, PlanePoint guess);

/// G(z) = f^q(z) - trans together with its differential.
PlanePoint power_map(const BoundLift& lift, PlanePoint z, int q, IntVec trans = {});
Mat2 power_jacobian(const BoundLift& lift, PlanePoint z, int q);
/// G^{-1}(z) = f^{-q}(z + trans).
PlanePoint power_inverse(const BoundLift& lift, PlanePoint z, int q, IntVec trans = {});

/// Central finite-difference differential, used as an oracle.
Mat2 finite_difference_jacobian(const BoundLift& lift, PlanePoint z, double h = 1e-6);

/// Max over samples of |f(z + (m,n)) - f(z) - (m,n)|.
double equivariance_residual(const BoundLift& lift, int samples, unsigned long long seed, int max_shift = 3);

} // namespace rotolab
