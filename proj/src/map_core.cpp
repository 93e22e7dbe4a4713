#include "rotolab/map_core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "rotolab/error.hpp"

namespace rotolab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

BoundLift make_bound(std::function<PlanePoint(PlanePoint)> f, std::function<Mat2(PlanePoint)> jac,
                     std::function<PlanePoint(PlanePoint)> inv)
{
    BoundLift lift{std::move(f), {}, std::move(jac)};
    if (inv) {
        lift.inverse = std::move(inv);
    } else {
        auto fwd = lift;
        lift.inverse = [fwd](PlanePoint z) { return newton_inverse(fwd, z, z - (fwd(z) - z)); };
    }
    return lift;
}

LiftFamily identity_family()
{
    LiftFamily fam{"identity", {}, {}, true, {}};
    fam.binder = [](const std::vector<double>&) {
        return make_bound([](PlanePoint z) { return z; }, [](PlanePoint) { return Mat2::identity(); },
                          [](PlanePoint z) { return z; });
    };
    return fam;
}

LiftFamily translation_family()
{
    LiftFamily fam{"translation", {"alpha", "beta"}, {0.0, 0.0}, true, {}};
    fam.binder = [](const std::vector<double>& v) {
        const PlanePoint shift{v[0], v[1]};
        return make_bound([shift](PlanePoint z) { return z + shift; }, [](PlanePoint) { return Mat2::identity(); },
                          [shift](PlanePoint z) { return z - shift; });
    };
    return fam;
}

// f = T_(0,-d) o H_k o V_k with V_k(x,y) = (x, y + k sin 2 pi x), H_k(x,y) = (x + k sin 2 pi y, y).
BoundLift bind_two_shear(double k, double d)
{
    auto f = [k, d](PlanePoint z) {
        const double y1 = z.y + k * std::sin(kTwoPi * z.x);
        const double x1 = z.x + k * std::sin(kTwoPi * y1);
        return PlanePoint{x1, y1 - d};
    };
    auto jac = [k](PlanePoint z) {
        const double y1 = z.y + k * std::sin(kTwoPi * z.x);
        const double b = kTwoPi * k * std::cos(kTwoPi * z.x);
        const double a = kTwoPi * k * std::cos(kTwoPi * y1);
        return Mat2{1.0 + a * b, a, b, 1.0};
    };
    auto inv = [k, d](PlanePoint z) {
        const double y1 = z.y + d;
        const double x0 = z.x - k * std::sin(kTwoPi * y1);
        return PlanePoint{x0, y1 - k * std::sin(kTwoPi * x0)};
    };
    return make_bound(f, jac, inv);
}

LiftFamily two_shear_family()
{
    LiftFamily fam{"two-shear", {"k"}, {0.0}, true, {}};
    fam.binder = [](const std::vector<double>& v) { return bind_two_shear(v[0], 0.0); };
    return fam;
}

LiftFamily two_shear_drift_family()
{
    LiftFamily fam{"two-shear-drift", {"k", "d"}, {0.0, 0.0}, true, {}};
    fam.binder = [](const std::vector<double>& v) { return bind_two_shear(v[0], v[1]); };
    return fam;
}

LiftFamily linear_saddle_family()
{
    LiftFamily fam{"linear-saddle", {"lambda"}, {2.0}, false, {}};
    fam.binder = [](const std::vector<double>& v) {
        const double l = v[0];
        return make_bound([l](PlanePoint z) { return PlanePoint{l * z.x, z.y / l}; },
                          [l](PlanePoint) { return Mat2{l, 0.0, 0.0, 1.0 / l}; },
                          [l](PlanePoint z) { return PlanePoint{z.x / l, l * z.y}; });
    };
    return fam;
}

// y' = y + x^2 + t - 2, x' = x + y'. Fixed points (+-sqrt(2 - t), 0) merge at t = 2.
LiftFamily saddle_node_family()
{
    LiftFamily fam{"saddle-node", {"t"}, {1.0}, false, {}};
    fam.binder = [](const std::vector<double>& v) {
        const double t = v[0];
        return make_bound(
            [t](PlanePoint z) {
                const double y1 = z.y + z.x * z.x + t - 2.0;
                return PlanePoint{z.x + y1, y1};
            },
            [](PlanePoint z) { return Mat2{1.0 + 2.0 * z.x, 1.0, 2.0 * z.x, 1.0}; },
            [t](PlanePoint z) {
                const double x0 = z.x - z.y;
                return PlanePoint{x0, z.y - x0 * x0 - t + 2.0};
            });
    };
    return fam;
}

} // namespace

double FamilyParams::get(const std::string& name) const
{
    auto it = values_.find(name);
    if (it == values_.end()) throw Error(ErrorKind::Config, "missing parameter '" + name + "'");
    return it->second;
}

FamilyParams FamilyParams::with(const std::string& name, double value) const
{
    FamilyParams p = *this;
    p.set(name, value);
    return p;
}

BoundLift LiftFamily::bind(const FamilyParams& params) const
{
    std::vector<double> values = defaults;
    for (const auto& [key, value] : params.values()) {
        auto it = std::find(param_names.begin(), param_names.end(), key);
        if (it == param_names.end())
            throw Error(ErrorKind::Config, "unknown parameter '" + key + "' for family " + name);
        values[static_cast<std::size_t>(it - param_names.begin())] = value;
    }
    return binder(values);
}

FamilyParams LiftFamily::default_params() const
{
    FamilyParams p;
    for (std::size_t i = 0; i < param_names.size(); ++i) p.set(param_names[i], defaults[i]);
    return p;
}

PlanePoint eval_lift(const LiftFamily& fam, const FamilyParams& params, PlanePoint z)
{
    return fam.bind(params)(z);
}

IterateResult iterate_lift(const BoundLift& lift, PlanePoint z, long n)
{
    if (n < 1) throw Error(ErrorKind::Config, "iterate_lift requires n >= 1");
    PlanePoint w = z;
    for (long i = 1; i <= n; ++i) {
        w = lift(w);
        if (!is_finite(w)) {
            std::ostringstream os;
            os << "non-finite iterate at step " << i << " from (" << z.x << ", " << z.y << ")";
            throw Error(ErrorKind::NumericBlowup, os.str());
        }
    }
    return {w, (w - z) / static_cast<double>(n)};
}

IterateResult iterate_lift(const LiftFamily& fam, const FamilyParams& params, PlanePoint z, long n)
{
    return iterate_lift(fam.bind(params), z, n);
}

Mat2 jacobian(const LiftFamily& fam, const FamilyParams& params, PlanePoint z)
{
    return fam.bind(params).jacobian(z);
}

LiftFamily builtin_family(const std::string& name)
{
    if (name == "identity") return identity_family();
    if (name == "translation") return translation_family();
    if (name == "two-shear") return two_shear_family();
    if (name == "two-shear-drift") return two_shear_drift_family();
    throw Error(ErrorKind::Config, "unknown family '" + name + "'");
}

LiftFamily chart_family(const std::string& name)
{
    if (name == "linear-saddle") return linear_saddle_family();
    if (name == "saddle-node") return saddle_node_family();
    throw Error(ErrorKind::Config, "unknown chart family '" + name + "'");
}

LiftFamily family_by_name(const std::string& name)
{
    if (name == "linear-saddle" || name == "saddle-node") return chart_family(name);
    return builtin_family(name);
}

PlanePoint newton_inverse(const BoundLift& lift, PlanePoint target, PlanePoint guess)
{
    PlanePoint w = guess;
    PlanePoint r = lift(w) - target;
    for (int it = 0; it < 80; ++it) {
        if (!(norm(r) >= 1e-15 * std::max(1.0, norm(target)))) break;
        const Mat2 J = lift.jacobian(w);
        const double det = J.det();
        if (det == 0.0 || !std::isfinite(det)) break;
        const PlanePoint step{(J.d * r.x - J.b * r.y) / det, (-J.c * r.x + J.a * r.y) / det};
        // backtrack until the residual decreases
        double s = 1.0;
        PlanePoint next = w - step;
        PlanePoint rn = lift(next) - target;
        for (int h = 0; h < 30 && !(norm(rn) < norm(r)); ++h) {
            s *= 0.5;
            next = w - s * step;
            rn = lift(next) - target;
        }
        if (!(norm(rn) < norm(r))) break;
        const double moved = s * norm(step);
        w = next;
        r = rn;
        if (moved < 1e-17 * std::max(1.0, norm(w))) break;
    }
    return w;
}

PlanePoint power_map(const BoundLift& lift, PlanePoint z, int q, IntVec trans)
{
    for (int i = 0; i < q; ++i) z = lift(z);
    return z - trans.as_point();
}

Mat2 power_jacobian(const BoundLift& lift, PlanePoint z, int q)
{
    Mat2 J = Mat2::identity();
    for (int i = 0; i < q; ++i) {
        J = lift.jacobian(z) * J;
        z = lift(z);
    }
    return J;
}

PlanePoint power_inverse(const BoundLift& lift, PlanePoint z, int q, IntVec trans)
{
    z += trans.as_point();
    for (int i = 0; i < q; ++i) z = lift.inverse(z);
    return z;
}

Mat2 finite_difference_jacobian(const BoundLift& lift, PlanePoint z, double h)
{
    const PlanePoint fxp = lift(z + PlanePoint{h, 0.0}), fxm = lift(z - PlanePoint{h, 0.0});
    const PlanePoint fyp = lift(z + PlanePoint{0.0, h}), fym = lift(z - PlanePoint{0.0, h});
    const PlanePoint dx = (fxp - fxm) / (2.0 * h), dy = (fyp - fym) / (2.0 * h);
    return {dx.x, dy.x, dx.y, dy.y};
}

double equivariance_residual(const BoundLift& lift, int samples, unsigned long long seed, int max_shift)
{
    std::mt19937_64 rng(seed);
    auto unit = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    const auto span = static_cast<unsigned long long>(2 * max_shift + 1);
    double worst = 0.0;
    for (int i = 0; i < samples; ++i) {
        const PlanePoint z{unit(), unit()};
        const IntVec s{static_cast<long>(rng() % span) - max_shift, static_cast<long>(rng() % span) - max_shift};
        const PlanePoint lhs = lift(z + s.as_point());
        const PlanePoint rhs = lift(z) + s.as_point();
        worst = std::max(worst, distance(lhs, rhs));
    }
    return worst;
}

} // namespace rotolab
