#include "rotolab/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

#include "rotolab/error.hpp"
#include "rotolab/svg.hpp"

namespace rotolab {

namespace fs = std::filesystem;

namespace {

const Json& section(const Json& j, const char* key)
{
    static const Json empty = Json::object();
    if (!j.contains(key)) return empty;
    const Json& s = j.at(key);
    if (!s.is_object()) throw Error(ErrorKind::Config, std::string("scenario section '") + key + "' must be an object");
    return s;
}

void check_keys(const Json& j, std::initializer_list<const char*> allowed, const std::string& where)
{
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || it.key() == a;
        if (!ok) throw Error(ErrorKind::Config, "unknown key '" + it.key() + "' in " + where);
    }
}

template <class T>
void opt(const Json& j, const char* key, T& out)
{
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::Config, std::string("scenario key '") + key + "': " + e.what());
    }
}

PlanePoint opt_point(const Json& j, const char* key, PlanePoint def)
{
    if (!j.contains(key)) return def;
    try {
        return point_from_json(j.at(key));
    } catch (const Error& e) {
        throw Error(ErrorKind::Config, std::string("scenario key '") + key + "': " + e.what());
    }
}

Json stamp(const Scenario& sc, const char* schema)
{
    Json j;
    j["schema"] = schema;
    j["scenario"] = sc.name;
    j["family"] = sc.family;
    j["params"] = to_json(sc.params);
    j["axis"] = sc.axis;
    j["seed"] = sc.seed;
    return j;
}

std::vector<ManifoldArc> arcs_from(const Json& j)
{
    std::vector<ManifoldArc> out;
    for (const auto& a : j.at("arcs")) out.push_back(arc_from_json(a));
    if (out.size() != 4) throw Error(ErrorKind::Schema, "manifolds artifact must hold four branches");
    return out;
}

struct Ctx {
    const Scenario& sc;
    fs::path dir;
    std::ostream* log;

    Json load(const std::string& name) const { return read_json((dir / name).string()); }
    void save(const std::string& name, const Json& j) const { write_json((dir / name).string(), j); }
    void note(const std::string& s) const
    {
        if (log) *log << "  " << s << "\n" << std::flush;
    }
};

// stage bodies

void stage_rotset(const Ctx& c)
{
    const Scenario& sc = c.sc;
    Json out = stamp(sc, "rotset");
    out["w"] = to_json(sc.w);
    out["margin"] = sc.margin;
    Json probes = Json::array();
    for (double t : sc.probes) {
        const ProbeHulls ph = probe_hulls(sc, t);
        Json p;
        p["t"] = t;
        p["membership"] = to_json(ph.cert);
        p["outer"] = to_json(ph.outer);
        p["inner"] = to_json(ph.inner);
        Json orbits = Json::array();
        for (const auto& r : ph.census) {
            Json o;
            o["q"] = r.q;
            o["trans"] = to_json(r.trans);
            o["z"] = to_json(r.z);
            o["residual"] = r.residual;
            o["method"] = "newton";
            orbits.push_back(o);
        }
        for (const auto& r : ph.shooting) {
            Json o;
            o["q"] = r.q();
            o["trans"] = to_json(r.trans);
            o["z"] = to_json(r.z.front());
            o["residual"] = r.residual;
            o["method"] = "shooting";
            orbits.push_back(o);
        }
        p["orbits"] = orbits;
        p["diagnostic"] = ph.diagnostic;
        probes.push_back(p);
        c.note("t=" + std::to_string(t) + " " + to_string(ph.cert.state));
    }
    out["probes"] = probes;
    c.save("rotset.json", out);
}

void stage_saddles(const Ctx& c)
{
    const Scenario& sc = c.sc;
    const LiftFamily fam = sc.lift_family();
    PeriodicConfig pc;
    pc.grid = sc.saddle_grid;
    pc.threads = sc.threads;
    Json out = stamp(sc, "saddles");
    Json probes = Json::array();
    for (double t : sc.probes) {
        const FamilyParams p = sc.at(t);
        const auto recs = find_periodic(fam, p, 1, {0, 0}, pc);
        const LefschetzReport lr = lefschetz_check(fam, p, pc);
        if (!lr.pass) {
            std::ostringstream os;
            os << "Lefschetz sum " << lr.sum << " at " << sc.axis << " = " << t;
            throw Error(ErrorKind::Hypothesis, os.str());
        }
        Json e;
        e["t"] = t;
        Json rs = Json::array();
        for (const auto& r : recs) rs.push_back(to_json(r));
        e["census"] = rs;
        e["lefschetz"] = to_json(lr);
        probes.push_back(e);
    }
    out["probes"] = probes;
    c.save("saddles.json", out);
}

void stage_critical(const Ctx& c)
{
    const Scenario& sc = c.sc;
    const Json rot = c.load("rotset.json");
    std::vector<std::pair<double, std::string>> states;
    for (const auto& p : rot.at("probes")) states.push_back({p.at("t").get<double>(), p.at("membership").at("state")});
    if (sc.decreasing) std::reverse(states.begin(), states.end());
    const std::string interior = to_string(Membership::Interior);
    std::size_t k = states.size();
    for (std::size_t i = 0; i + 1 < states.size(); ++i)
        if (states[i].second != interior && states[i + 1].second == interior) {
            k = i;
            break;
        }
    if (k == states.size())
        throw Error(ErrorKind::InvalidBracket, "no adjacent probes change from non-Interior to Interior along the axis");
    const double t_lo = states[k].first, t_hi = states[k + 1].first;
    const CriticalResult cr =
        critical_parameter([&](double t) { return probe_hulls(sc, t).cert; }, t_lo, t_hi, sc.critical_width);
    const ProbeHulls at = probe_hulls(sc, cr.t_bar);

    Json out = stamp(sc, "critical");
    out["w"] = to_json(sc.w);
    out["result"] = to_json(cr);
    out["t_star"] = t_hi;
    out["direction"] = sc.decreasing ? "decreasing" : "increasing";
    out["outer"] = to_json(at.outer);
    out["inner"] = to_json(at.inner);
    out["membership"] = to_json(at.cert);
    // support of the certified (inner) hull; the sampled outer hull is reported alongside
    out["support"] = to_json(supporting_line(at.inner, sc.w, sc.margin));
    try {
        out["support_outer"] = to_json(supporting_line(at.outer, sc.w, sc.margin));
        out["support_outer_diagnostic"] = "";
    } catch (const Error& e) {
        out["support_outer"] = nullptr;
        out["support_outer_diagnostic"] = e.what();
    }
    c.save("critical.json", out);
    c.note("t_bar=" + std::to_string(cr.t_bar));
}

void stage_manifolds(const Ctx& c)
{
    const Scenario& sc = c.sc;
    const Json crit = c.load("critical.json");
    const double t_bar = crit.at("result").at("t_bar").get<double>();
    const LiftFamily fam = sc.lift_family();
    const FamilyParams p = sc.at(t_bar);
    PeriodicConfig pc;
    pc.grid = sc.saddle_grid;
    pc.threads = sc.threads;
    std::vector<SaddleRecord> hyp;
    for (const auto& r : find_periodic(fam, p, 1, {0, 0}, pc))
        if (r.hyperbolic()) hyp.push_back(r);
    if (sc.saddle_id < 0 || sc.saddle_id >= static_cast<int>(hyp.size()))
        throw Error(ErrorKind::NotFound, "saddle_id " + std::to_string(sc.saddle_id) + " not in the census of " +
                                             std::to_string(hyp.size()) + " hyperbolic fixed points");
    const SaddleRecord s = hyp[static_cast<std::size_t>(sc.saddle_id)];
    const BoundLift lift = fam.bind(p);
    const auto arcs = grow_all_branches(lift, s, sc.growth, sc.threads);
    Json out = stamp(sc, "manifolds");
    out["t"] = t_bar;
    out["saddle_id"] = sc.saddle_id;
    out["saddle"] = to_json(s);
    Json checks = Json::array();
    Json aj = Json::array();
    for (const auto& a : arcs) {
        Json ch;
        ch["branch"] = to_string(a.branch);
        ch["residual"] = invariance_residual(lift, a);
        ch["points"] = a.points.size();
        std::string why;
        ch["bounds_ok"] = check_arc_bounds(a, sc.growth, &why);
        ch["bounds_diagnostic"] = why;
        const BoundednessResult b = boundedness_probe(a, 2.0, sc.growth.budget);
        ch["unbounded"] = b.unbounded;
        ch["evidence"] = b.evidence;
        checks.push_back(ch);
        aj.push_back(to_json(a));
    }
    out["checks"] = checks;
    out["arcs"] = aj;
    c.save("manifolds.json", out);
}

Json hit_summary(const TranslateSpectrum& s)
{
    Json a = Json::array();
    for (const auto& [t, evs] : s.hits) {
        Json h;
        h["translate"] = to_json(t);
        h["count"] = evs.size();
        h["transverse"] = s.has_transverse(t);
        a.push_back(h);
    }
    return a;
}

void stage_intersect(const Ctx& c)
{
    const Scenario& sc = c.sc;
    const Json crit = c.load("critical.json");
    const Json man = c.load("manifolds.json");
    const double t_bar = crit.at("result").at("t_bar").get<double>();
    const LiftFamily fam = sc.lift_family();
    const BoundLift lift = fam.bind(sc.at(t_bar));
    const auto arcs = arcs_from(man);
    const SaddleRecord s = saddle_from_json(man.at("saddle"));
    IntersectConfig ic;
    ic.threads = sc.threads;
    const TranslateSpectrum spec = spectrum_from_arcs({arcs[0], arcs[1]}, {arcs[2], arcs[3]}, sc.spectrum_window, ic, &lift);
    const RotationSetApprox inner = hull_from_json(crit.at("inner"));
    const SupportData sup = support_from_json(crit.at("support"));
    const Lemma0Report l0 = lemma0_check(spec, inner, sup, 1e-6);

    std::vector<IntVec> base = spec.transverse_translates();
    Json beyond = Json::array();
    std::vector<IntVec> prev = base;
    SpectrumConfig cfg;
    cfg.window = sc.spectrum_window;
    cfg.growth = sc.growth;
    cfg.intersect = ic;
    cfg.refine = true;
    for (double off : sc.beyond) {
        const double t = t_bar + sc.toward_interior() * off;
        const SaddleRecord st = saddle_at(fam, s, sc.axis, t);
        const TranslateSpectrum sp = translate_spectrum(fam.bind(sc.at(t)), st, cfg);
        const auto tr = sp.transverse_translates();
        auto contains = [&](const std::vector<IntVec>& big, const std::vector<IntVec>& small) {
            return std::all_of(small.begin(), small.end(),
                               [&](IntVec v) { return std::find(big.begin(), big.end(), v) != big.end(); });
        };
        bool positive = false;
        std::vector<PlanePoint> pts{{0.0, 0.0}};
        for (IntVec v : tr) {
            positive = positive || dot(v.as_point(), sup.v) > 1e-6;
            pts.push_back(v.as_point());
        }
        const auto hull = convex_hull(pts);
        Json b;
        b["t"] = t;
        b["offset"] = off;
        b["saddle"] = to_json(st);
        b["hits"] = hit_summary(sp);
        b["positive_translate"] = positive;
        b["contains_t_bar_hits"] = contains(tr, base);
        b["strictly_larger_than_t_bar"] = contains(tr, base) && tr.size() > base.size();
        b["contains_previous"] = contains(tr, prev);
        b["zero_depth"] = hull.size() >= 3 ? signed_depth(hull, {0.0, 0.0}) : 0.0;
        beyond.push_back(b);
        prev = tr;
        c.note("beyond t=" + std::to_string(t) + " hits " + std::to_string(sp.hits.size()));
    }
    Json out = stamp(sc, "intersect");
    out["t_bar"] = t_bar;
    out["support"] = to_json(sup);
    out["spectrum"] = to_json(spec);
    out["lemma0"] = to_json(l0);
    out["beyond"] = beyond;
    c.save("intersect.json", out);
}

void stage_chain(const Ctx& c)
{
    const Scenario& sc = c.sc;
    const Json crit = c.load("critical.json");
    const Json man = c.load("manifolds.json");
    const double t_bar = crit.at("result").at("t_bar").get<double>();
    const BoundLift lift = sc.lift_family().bind(sc.at(t_bar));
    const SaddleRecord s = saddle_from_json(man.at("saddle"));
    const PlanePoint v = support_from_json(crit.at("support")).v;
    const ChainBuild cb = build_chains(lift, s, sc.growth, sc.spectrum_window);
    const PlanePoint w{v.y, -v.x};
    const ThetaBand th = build_theta(cb.gamma_h, cb.gamma_v, w, v, sc.span);
    const WidthCheck wc = width_check(th);
    const LineHitReport lh = line_hit_check(th, sc.lines);
    const ChainValidation vv = validate_chain(cb.gamma_v, 1e-9), vh = validate_chain(cb.gamma_h, 1e-9);

    c.save("gamma_v.json", to_json(cb.gamma_v));
    c.save("gamma_h.json", to_json(cb.gamma_h));
    c.save("theta.json", to_json(th));
    Json out = stamp(sc, "chain-report");
    out["t"] = t_bar;
    out["event_v"] = to_json(cb.ev_v);
    out["event_h"] = to_json(cb.ev_h);
    out["diam_v"] = cb.gamma_v.diameter;
    out["diam_h"] = cb.gamma_h.diameter;
    out["max_diam"] = std::max(cb.gamma_v.diameter, cb.gamma_h.diameter);
    out["Kf"] = compute_Kf(cb.gamma_v, cb.gamma_h);
    out["v"] = to_json(v);
    out["w"] = to_json(w);
    auto val = [](const ChainValidation& x) {
        Json j;
        j["lattice_exact"] = x.lattice_exact;
        j["connected"] = x.connected;
        j["endpoint_error"] = x.endpoint_error;
        return j;
    };
    out["gamma_v"] = val(vv);
    out["gamma_h"] = val(vh);
    Json wj;
    wj["pass"] = wc.pass;
    wj["width"] = wc.width;
    wj["bound"] = wc.bound;
    out["width_check"] = wj;
    Json lj;
    lj["lines"] = lh.lines;
    lj["hit"] = lh.hit;
    lj["pass"] = lh.pass;
    out["line_hits"] = lj;
    c.save("chain.json", out);
}

Json record_block(const TangencyRecord& rec, const UnfoldingFit& fit, const BoundCheck& bc, const PersistenceReport& pr)
{
    Json j;
    j["record"] = to_json(rec);
    j["unfolding"] = to_json(fit);
    j["bounds"] = to_json(bc);
    j["persistence"] = to_json(pr);
    return j;
}

void stage_tangency(const Ctx& c)
{
    const Scenario& sc = c.sc;
    const Json crit = c.load("critical.json");
    const Json man = c.load("manifolds.json");
    const Json chain = c.load("chain.json");
    const double t_bar = crit.at("result").at("t_bar").get<double>();
    const double t_star = crit.at("t_star").get<double>();
    const SaddleRecord s = saddle_from_json(man.at("saddle"));
    const PlanePoint v = support_from_json(crit.at("support")).v;
    const double Kf = chain.at("Kf").get<double>();
    const double max_diam = chain.at("max_diam").get<double>();
    const LiftFamily fam = sc.lift_family();
    const IntVec target = smallest_admissible(v, Kf);

    BisectConfig bc;
    bc.width = sc.bracket_width;
    bc.sep.gap_tol = sc.gap_tol;
    const double window = 10.0 * sc.bracket_width;

    Json bundle = stamp(sc, "scan");
    bundle["t_bar"] = t_bar;
    bundle["t_star"] = t_star;
    bundle["certificate"] = crit.at("result");
    bundle["saddle_id"] = man.at("saddle_id");
    bundle["saddle"] = man.at("saddle");
    bundle["v"] = to_json(v);
    bundle["Kf"] = Kf;
    bundle["max_diam"] = max_diam;
    bundle["span"] = sc.span;
    c.save("scan.json", bundle);

    Json out = stamp(sc, "tangency-report");
    out["t_bar"] = t_bar;
    out["t_star"] = t_star;
    out["v"] = to_json(v);
    out["Kf"] = Kf;

    // admissible translate: (c,d).v > K_f
    Json adm;
    adm["target"] = to_json(target);
    adm["projection"] = dot(target.as_point(), v);
    Json attempts = Json::array();
    int chosen = 0;
    for (int N = 1; N <= sc.max_power && chosen == 0; ++N) {
        Json a;
        a["N"] = N;
        try {
            ThetaScanConfig tc{fam, sc.at(t_bar), sc.axis, t_bar, t_star, s, v, target, N, Kf, max_diam, sc.span,
                               sc.spectrum_window, sc.growth, sc.max_vertices};
            ThetaContactProblem prob(tc);
            const Separation sep = separation_test(prob, t_star, bc.sep);
            a["status"] = to_string(sep.kind);
            a["gap"] = sep.gap;
            if (sep.kind == SeparationKind::Transverse) chosen = N;
            attempts.push_back(a);
        } catch (const Error& e) {
            a["status"] = to_string(e.kind());
            a["diagnostic"] = e.what();
            attempts.push_back(a);
            if (e.kind() == ErrorKind::ScanAborted) break;
            throw;
        }
    }
    adm["attempts"] = attempts;
    adm["N"] = chosen;
    if (chosen > 0) {
        ThetaScanConfig tc{fam, sc.at(t_bar), sc.axis, t_bar, t_star, s, v, target, chosen, Kf, max_diam, sc.span,
                           sc.spectrum_window, sc.growth, sc.max_vertices};
        ThetaContactProblem prob(tc);
        try {
            TangencyRecord rec = bisect_tangency(prob, t_bar, t_star, bc);
            const UnfoldingFit fit = unfolding_fit(prob, rec.t_prime, window, sc.unfold_samples, bc.sep);
            rec.gap_slope = t_star > t_bar ? fit.slope : -fit.slope;
            rec.unfold_r2 = fit.r2;
            rec.halfwidth_r2 = fit.halfwidth_r2;
            rec.halfwidth_coeff = fit.halfwidth_coeff;
            const BoundCheck b = translate_bound_check(rec.realized, target, v, max_diam, Kf);
            const PersistenceReport pr = persistence_check(prob, rec, t_star, sc.persistence_samples, bc.sep);
            adm["status"] = "record";
            adm["result"] = record_block(rec, fit, b, pr);
            if (rec.realized_known && !b.theorem_ok)
                throw Error(ErrorKind::Hypothesis, "realized translate violates the K_f/4 bound");
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::Hypothesis) throw;
            adm["status"] = to_string(e.kind());
            adm["diagnostic"] = e.what();
        }
    } else {
        adm["status"] = attempts.empty() ? "not-run" : attempts.back().at("status");
        adm["diagnostic"] = "no N <= " + std::to_string(sc.max_power) + " made f^N(theta) cross theta + target at t_star";
    }
    out["admissible"] = adm;

    Json diag = nullptr;
    if (sc.diagnostic) {
        diag = Json::object();
        diag["label"] = "manifold scan, admissibility precondition waived";
        diag["target"] = to_json(sc.diagnostic_target);
        diag["projection"] = dot(sc.diagnostic_target.as_point(), v);
        ManifoldScanConfig mc{fam, sc.at(t_bar), sc.axis, t_bar, s, sc.diagnostic_target, sc.growth};
        ManifoldContactProblem mp(mc);
        try {
            TangencyRecord rec = bisect_tangency(mp, t_bar, t_star, bc);
            mp.set_zoom(rec.witness, sc.zoom_radius, sc.zoom_spacing);
            const UnfoldingFit fit = unfolding_fit(mp, rec.t_prime, window, sc.unfold_samples, bc.sep);
            mp.clear_zoom();
            rec.gap_slope = t_star > t_bar ? fit.slope : -fit.slope;
            rec.unfold_r2 = fit.r2;
            rec.halfwidth_r2 = fit.halfwidth_r2;
            rec.halfwidth_coeff = fit.halfwidth_coeff;
            const BoundCheck b = translate_bound_check(rec.realized, sc.diagnostic_target, v, max_diam, Kf);
            const PersistenceReport pr = persistence_check(mp, rec, t_star, sc.persistence_samples, bc.sep);
            diag["status"] = "record";
            diag["result"] = record_block(rec, fit, b, pr);
            Json unf = to_json(fit);
            unf["t_prime"] = rec.t_prime;
            c.save("unfolding.json", unf);
            std::ostringstream csv;
            csv.precision(17);
            csv << "t,signed_gap,half_width\n";
            for (std::size_t i = 0; i < fit.ts.size(); ++i)
                csv << fit.ts[i] << "," << fit.gaps[i] << "," << fit.halfwidths[i] << "\n";
            write_file((c.dir / "gap.csv").string(), csv.str());
            c.note("diagnostic t'=" + std::to_string(rec.t_prime));
        } catch (const Error& e) {
            diag["status"] = to_string(e.kind());
            diag["diagnostic"] = e.what();
        }
    }
    out["diagnostic_scan"] = diag;
    c.save("tangency.json", out);
}

void stage_render(const Ctx& c)
{
    const Json crit = c.load("critical.json");
    Json hulls;
    hulls["schema"] = "hulls";
    hulls["outer"] = crit.at("outer");
    hulls["inner"] = crit.at("inner");
    write_file((c.dir / "hulls.svg").string(), render_svg(hulls));

    const Json man = c.load("manifolds.json");
    const Json chain = c.load("chain.json");
    const auto arcs = arcs_from(man);
    const IntersectionEvent ev = event_from_json(chain.at("event_v"));
    const ManifoldArc& u = arcs[ev.branch_u == Branch::UnstablePlus ? 0 : 1];
    const ManifoldArc& st = arcs[ev.branch_s == Branch::StablePlus ? 2 : 3];
    const Json inter = c.load("intersect.json");
    std::vector<IntersectionEvent> evs;
    for (const auto& h : inter.at("spectrum").at("hits"))
        if (intvec_from_json(h.at("translate")) == ev.translate)
            for (const auto& e : h.at("events")) {
                IntersectionEvent x = event_from_json(e);
                if (x.branch_u == u.branch && x.branch_s == st.branch) evs.push_back(x);
            }
    write_file((c.dir / "overlay.svg").string(), render_svg(overlay_json(u, st, ev.translate, evs)));
    for (const char* n : {"gamma_v", "gamma_h", "theta"})
        write_file((c.dir / (std::string(n) + ".svg")).string(), render_svg(c.load(std::string(n) + ".json")));
    if (fs::exists(c.dir / "unfolding.json"))
        write_file((c.dir / "unfolding.svg").string(), render_svg(c.load("unfolding.json")));
}

struct StageDef {
    std::string name;
    std::vector<std::string> deps;
    std::vector<std::string> sections;
    std::vector<std::string> outputs;
    std::function<void(const Ctx&)> run;
};

const std::vector<StageDef>& stages()
{
    static const std::vector<StageDef> defs = {
        {"rotset", {}, {"rotset"}, {"rotset.json"}, stage_rotset},
        {"saddles", {}, {"saddles"}, {"saddles.json"}, stage_saddles},
        {"critical", {"rotset"}, {"rotset", "critical"}, {"critical.json"}, stage_critical},
        {"manifolds", {"critical", "saddles"}, {"saddles", "manifolds"}, {"manifolds.json"}, stage_manifolds},
        {"intersect", {"critical", "manifolds"}, {"rotset", "manifolds", "intersect"}, {"intersect.json"}, stage_intersect},
        {"chain",
         {"critical", "manifolds"},
         {"manifolds", "intersect", "chain"},
         {"gamma_v.json", "gamma_h.json", "theta.json", "chain.json"},
         stage_chain},
        {"tangency",
         {"critical", "manifolds", "chain"},
         {"manifolds", "intersect", "chain", "tangency"},
         {"scan.json", "tangency.json"},
         stage_tangency},
        {"render",
         {"critical", "manifolds", "intersect", "chain", "tangency"},
         {},
         {"hulls.svg", "overlay.svg", "gamma_v.svg", "gamma_h.svg", "theta.svg"},
         stage_render},
    };
    return defs;
}

std::string file_hash(const fs::path& p)
{
    return hex64(fnv1a(read_file(p.string())));
}

} // namespace

FamilyParams Scenario::at(double t) const
{
    const LiftFamily fam = lift_family();
    if (std::find(fam.param_names.begin(), fam.param_names.end(), axis) == fam.param_names.end()) return params;
    return params.with(axis, t);
}

LiftFamily Scenario::lift_family() const
{
    return family_by_name(family);
}

Scenario scenario_from_json(const Json& j)
{
    if (!j.is_object()) throw Error(ErrorKind::Config, "scenario must be a JSON object");
    check_keys(j,
               {"name", "family", "params", "axis", "direction", "probes", "w", "seed", "threads", "rotset", "critical",
                "saddles", "manifolds", "intersect", "chain", "tangency"},
               "scenario");
    Scenario sc;
    sc.source = j;
    opt(j, "name", sc.name);
    opt(j, "family", sc.family);
    if (sc.family.empty()) throw Error(ErrorKind::Config, "scenario needs a family");
    const LiftFamily fam = family_by_name(sc.family);
    if (j.contains("params")) {
        try {
            sc.params = params_from_json(j.at("params"));
        } catch (const Error& e) {
            throw Error(ErrorKind::Config, std::string("scenario params: ") + e.what());
        }
    }
    opt(j, "axis", sc.axis);
    if (sc.axis.empty()) throw Error(ErrorKind::Config, "scenario needs an axis");
    std::string dir = "increasing";
    opt(j, "direction", dir);
    if (dir != "increasing" && dir != "decreasing")
        throw Error(ErrorKind::Config, "direction must be 'increasing' or 'decreasing'");
    sc.decreasing = dir == "decreasing";
    opt(j, "probes", sc.probes);
    if (sc.probes.size() < 2) throw Error(ErrorKind::Config, "scenario needs at least two probes");
    for (std::size_t i = 1; i < sc.probes.size(); ++i)
        if (!(sc.probes[i] > sc.probes[i - 1])) throw Error(ErrorKind::Config, "probes must be strictly increasing");
    sc.w = opt_point(j, "w", sc.w);
    opt(j, "seed", sc.seed);
    opt(j, "threads", sc.threads);
    fam.bind(sc.at(sc.probes.front())); // unknown parameter names fail here

    const Json& r = section(j, "rotset");
    check_keys(r, {"grid", "n_min", "n_max", "q_max", "census_grid", "window", "homoclinic", "margin"}, "rotset");
    opt(r, "grid", sc.outer.grid);
    opt(r, "n_min", sc.outer.n_min);
    opt(r, "n_max", sc.outer.n_max);
    opt(r, "q_max", sc.q_max);
    opt(r, "census_grid", sc.census_grid);
    if (r.contains("window")) {
        const Json& w = r.at("window");
        if (!w.is_array() || w.size() != 2) throw Error(ErrorKind::Config, "rotset.window must be [[x0,y0],[x1,y1]]");
        sc.window = {point_from_json(w[0]), point_from_json(w[1])};
    }
    opt(r, "homoclinic", sc.homoclinic);
    opt(r, "margin", sc.margin);
    sc.outer.seed = sc.seed;
    sc.outer.threads = sc.threads;

    const Json& cr = section(j, "critical");
    check_keys(cr, {"width"}, "critical");
    opt(cr, "width", sc.critical_width);

    const Json& sd = section(j, "saddles");
    check_keys(sd, {"grid", "saddle_id"}, "saddles");
    opt(sd, "grid", sc.saddle_grid);
    opt(sd, "saddle_id", sc.saddle_id);

    const Json& m = section(j, "manifolds");
    check_keys(m, {"budget", "h_max", "theta_max", "sag_max", "delta0"}, "manifolds");
    opt(m, "budget", sc.growth.budget);
    opt(m, "h_max", sc.growth.h_max);
    opt(m, "theta_max", sc.growth.theta_max);
    opt(m, "sag_max", sc.growth.sag_max);
    opt(m, "delta0", sc.growth.delta0);

    const Json& in = section(j, "intersect");
    check_keys(in, {"window", "beyond"}, "intersect");
    opt(in, "window", sc.spectrum_window);
    opt(in, "beyond", sc.beyond);

    const Json& ch = section(j, "chain");
    check_keys(ch, {"span", "lines"}, "chain");
    opt(ch, "span", sc.span);
    opt(ch, "lines", sc.lines);

    const Json& tg = section(j, "tangency");
    check_keys(tg,
               {"max_power", "max_vertices", "bracket_width", "gap_tol", "samples", "persistence_samples", "diagnostic",
                "diagnostic_target", "zoom_radius", "zoom_spacing"},
               "tangency");
    opt(tg, "max_power", sc.max_power);
    opt(tg, "max_vertices", sc.max_vertices);
    opt(tg, "bracket_width", sc.bracket_width);
    opt(tg, "gap_tol", sc.gap_tol);
    opt(tg, "samples", sc.unfold_samples);
    opt(tg, "persistence_samples", sc.persistence_samples);
    opt(tg, "diagnostic", sc.diagnostic);
    if (tg.contains("diagnostic_target")) sc.diagnostic_target = intvec_from_json(tg.at("diagnostic_target"));
    opt(tg, "zoom_radius", sc.zoom_radius);
    opt(tg, "zoom_spacing", sc.zoom_spacing);
    return sc;
}

Scenario load_scenario(const std::string& path)
{
    Json j;
    try {
        j = Json::parse(read_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorKind::Config, "'" + path + "' is not valid JSON: " + e.what());
    }
    return scenario_from_json(j);
}

ProbeHulls probe_hulls(const Scenario& sc, double t)
{
    const LiftFamily fam = sc.lift_family();
    const FamilyParams p = sc.at(t);
    ProbeHulls ph;
    ph.outer = mz_outer_hull(fam, p, sc.outer);
    InnerCensusConfig ic;
    ic.q_max = sc.q_max;
    ic.use_window = true;
    ic.window = sc.window;
    ic.newton.grid = sc.census_grid;
    ic.newton.threads = sc.threads;
    ph.inner = inner_hull(fam, p, ph.outer, ic, &ph.census);
    if (sc.homoclinic) {
        HomoclinicCensusConfig hc;
        hc.growth = sc.growth;
        hc.window = sc.spectrum_window;
        try {
            ph.shooting = homoclinic_orbits(fam, p, hc);
            add_orbit_vectors(ph.inner, ph.shooting);
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::Config) throw;
            ph.diagnostic = std::string("homoclinic orbits skipped: ") + e.what();
        }
    }
    ph.inner.seed = sc.seed;
    ph.cert.t = t;
    ph.cert.state = membership(ph.outer, ph.inner, sc.w, sc.margin);
    ph.cert.outer_depth = signed_depth(ph.outer.vertices, sc.w);
    ph.cert.inner_depth = ph.inner.vertices.empty() ? -INFINITY : signed_depth(ph.inner.vertices, sc.w);
    return ph;
}

const std::vector<std::string>& stage_names()
{
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n;
        for (const auto& s : stages()) n.push_back(s.name);
        return n;
    }();
    return names;
}

IntVec smallest_admissible(PlanePoint v, double bound)
{
    const long r = static_cast<long>(std::ceil(std::abs(bound))) + 2;
    IntVec best{0, 0};
    double best_n = INFINITY, best_p = INFINITY;
    for (long a = -r; a <= r; ++a)
        for (long b = -r; b <= r; ++b) {
            const IntVec cand{a, b};
            const double p = dot(cand.as_point(), v);
            if (!(p > bound)) continue;
            const double n = norm(cand.as_point());
            if (n < best_n - 1e-12 || (std::abs(n - best_n) <= 1e-12 && (p < best_p - 1e-12 ||
                                                                         (std::abs(p - best_p) <= 1e-12 && cand < best)))) {
                best = cand;
                best_n = n;
                best_p = p;
            }
        }
    if (!std::isfinite(best_n)) throw Error(ErrorKind::Config, "no lattice vector beyond the bound");
    return best;
}

RunResult run_scenario(const Scenario& sc, const std::string& run_dir, std::ostream* log)
{
    RunResult res;
    fs::create_directories(run_dir);
    const fs::path dir(run_dir);
    const fs::path manifest_path = dir / "manifest.json";
    Json manifest = Json::object();
    if (fs::exists(manifest_path)) {
        try {
            manifest = read_json(manifest_path.string());
        } catch (const Error&) {
            manifest = Json::object();
        }
    }
    if (!manifest.contains("stages") || !manifest.at("stages").is_object()) manifest["stages"] = Json::object();
    manifest["scenario"] = sc.name;

    Json common;
    for (const char* k : {"family", "params", "axis", "direction", "probes", "w", "seed"})
        common[k] = sc.source.contains(k) ? sc.source.at(k) : Json(nullptr);

    std::map<std::string, bool> ran;
    const Ctx ctx{sc, dir, log};
    for (const auto& st : stages()) {
        std::string h = st.name + "\n" + dump(common);
        for (const auto& s : st.sections) h += s + "\n" + dump(sc.source.contains(s) ? sc.source.at(s) : Json(nullptr));
        bool forced = false;
        for (const auto& d : st.deps) {
            forced = forced || ran[d];
            const Json& e = manifest["stages"][d];
            h += d + "\n" + (e.contains("outputs") ? dump(e.at("outputs")) : std::string("none"));
        }
        const std::string input_hash = hex64(fnv1a(h));
        Json& entry = manifest["stages"][st.name];
        bool fresh = !forced && entry.is_object() && entry.value("input_hash", "") == input_hash;
        if (fresh)
            for (const auto& o : st.outputs) {
                const fs::path p = dir / o;
                fresh = fresh && fs::exists(p) && entry["outputs"].value(o, "") == file_hash(p);
            }
        if (fresh) {
            ran[st.name] = false;
            res.stages.push_back({st.name, false, "skipped"});
            if (log) *log << "[" << st.name << "] skipped\n" << std::flush;
            continue;
        }
        if (log) *log << "[" << st.name << "] running\n" << std::flush;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            st.run(ctx);
        } catch (const Error& e) {
            manifest["stages"].erase(st.name);
            write_json(manifest_path.string(), manifest);
            res.exit_code = exit_code(e.kind());
            res.failed_stage = st.name;
            res.diagnostic = std::string(to_string(e.kind())) + ": " + e.what();
            res.stages.push_back({st.name, true, res.diagnostic});
            if (log) *log << "[" << st.name << "] failed: " << res.diagnostic << "\n" << std::flush;
            return res;
        } catch (const std::exception& e) {
            manifest["stages"].erase(st.name);
            write_json(manifest_path.string(), manifest);
            res.exit_code = 3;
            res.failed_stage = st.name;
            res.diagnostic = e.what();
            res.stages.push_back({st.name, true, res.diagnostic});
            if (log) *log << "[" << st.name << "] failed: " << res.diagnostic << "\n" << std::flush;
            return res;
        }
        Json outs = Json::object();
        for (const auto& o : st.outputs) outs[o] = file_hash(dir / o);
        entry = Json::object();
        entry["input_hash"] = input_hash;
        entry["outputs"] = outs;
        write_json(manifest_path.string(), manifest);
        ran[st.name] = true;
        res.stages.push_back({st.name, true, "ok"});
        if (log) {
            const double el = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            *log << "[" << st.name << "] done in " << el << " s\n" << std::flush;
        }
    }
    return res;
}

RunResult run_scenario(const std::string& path, const std::string& run_dir, std::ostream* log)
{
    return run_scenario(load_scenario(path), run_dir, log);
}

} // namespace rotolab
