#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rotolab/error.hpp"
#include "rotolab/homoclinic.hpp"
#include "rotolab/io.hpp"
#include "rotolab/scenario.hpp"
#include "rotolab/svg.hpp"

using namespace rotolab;
namespace fs = std::filesystem;

namespace {

struct Global {
    std::string out_dir = ".";
    std::optional<unsigned long long> seed;
    int threads = 0;
    std::optional<double> tol_newton, tol_margin, tol_bracket, tol_gap, tol_critical, tol_residual;
};

struct FamilyArgs {
    std::string family = "two-shear-drift";
    std::vector<std::string> params;

    // name, or a JSON descriptor {"family": ..., "params": {...}}
    std::pair<LiftFamily, FamilyParams> resolve() const
    {
        std::string name = family;
        FamilyParams p;
        if (fs::exists(family) && fs::is_regular_file(family)) {
            const Json j = read_json(family);
            if (!j.contains("family")) throw Error(ErrorKind::Config, "family descriptor needs a 'family' key");
            name = j.at("family").get<std::string>();
            if (j.contains("params")) p = params_from_json(j.at("params"));
        }
        const LiftFamily fam = family_by_name(name);
        for (const auto& kv : params) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) throw Error(ErrorKind::Config, "--param expects name=value, got '" + kv + "'");
            try {
                p.set(kv.substr(0, eq), std::stod(kv.substr(eq + 1)));
            } catch (const std::logic_error&) {
                throw Error(ErrorKind::Config, "bad number in --param '" + kv + "'");
            }
        }
        fam.bind(p);
        return {fam, p};
    }
};

void add_family(CLI::App* app, FamilyArgs& f)
{
    app->add_option("--family", f.family, "family name or JSON descriptor file");
    app->add_option("--param", f.params, "parameter override name=value (repeatable)");
}

std::string out_path(const Global& g, const std::string& file)
{
    const fs::path p(file);
    if (p.is_absolute() || p.has_parent_path()) return file;
    fs::create_directories(g.out_dir);
    return (fs::path(g.out_dir) / p).string();
}

void emit(const Global& g, const std::string& file, const Json& j)
{
    const std::string path = out_path(g, file);
    write_json(path, j);
    std::cout << "wrote " << path << "\n";
}

void emit_svg(const Global& g, const std::string& file, const std::string& svg)
{
    const std::string path = out_path(g, file);
    write_file(path, svg);
    std::cout << "wrote " << path << "\n";
}

Branch parse_branch(const std::string& s)
{
    return branch_from_string(s);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"rotolab: rotation sets, saddle manifolds and tangency scans for torus maps"};
    app.require_subcommand(1);
    Global g;
    app.add_option("--out-dir", g.out_dir, "directory for artifacts");
    app.add_option("--seed", g.seed, "seed for jittered seed grids");
    app.add_option("--threads", g.threads, "worker threads (0 = hardware)");
    app.add_option("--tol-newton", g.tol_newton, "Newton acceptance residual");
    app.add_option("--tol-margin", g.tol_margin, "membership margin");
    app.add_option("--tol-critical", g.tol_critical, "critical-parameter bracket width");
    app.add_option("--tol-bracket", g.tol_bracket, "tangency bracket width");
    app.add_option("--tol-gap", g.tol_gap, "contact gap tolerance");
    app.add_option("--tol-residual", g.tol_residual, "shooting acceptance residual");

    // rotset
    auto* rot = app.add_subcommand("rotset", "outer and inner rotation-set hulls");
    FamilyArgs rot_f;
    add_family(rot, rot_f);
    OuterHullConfig oc;
    int q_max = 4, census_grid = 16;
    std::string window_s, rot_out = "hull.json", rot_inner = "inner.json", rot_svg;
    bool rot_homoclinic = false;
    rot->add_option("--grid", oc.grid, "seed grid size");
    rot->add_option("--nmin", oc.n_min, "shortest iterate depth");
    rot->add_option("--nmax", oc.n_max, "longest iterate depth");
    rot->add_option("--qmax", q_max, "largest period in the inner census");
    rot->add_option("--census-grid", census_grid, "Newton seed grid of the inner census");
    rot->add_option("--window", window_s, "candidate window x0,y0,x1,y1 (default: outer hull box)");
    rot->add_flag("--homoclinic", rot_homoclinic, "add shooting orbits from homoclinic events");
    rot->add_option("--out", rot_out, "outer hull artifact");
    rot->add_option("--inner", rot_inner, "inner hull artifact");
    rot->add_option("--svg", rot_svg, "render both hulls");

    // saddles
    auto* sad = app.add_subcommand("saddles", "periodic-point census with classification");
    FamilyArgs sad_f;
    add_family(sad, sad_f);
    int sad_q = 1, sad_grid = 32;
    std::string sad_trans = "0,0", sad_out = "saddles.json";
    sad->add_option("--q", sad_q, "period");
    sad->add_option("--trans", sad_trans, "translate a,b");
    sad->add_option("--grid", sad_grid, "Newton seed grid");
    sad->add_option("--out", sad_out, "census artifact");

    // manifolds
    auto* man = app.add_subcommand("manifolds", "stable and unstable branches of a saddle");
    FamilyArgs man_f;
    add_family(man, man_f);
    std::string man_saddles = "saddles.json", man_branch = "all", man_out, man_svg;
    int man_id = 0;
    GrowthConfig gc;
    man->add_option("--saddles", man_saddles, "census artifact from 'saddles'");
    man->add_option("--saddle-id", man_id, "index into the census (hyperbolic points only)");
    man->add_option("--branch", man_branch, "unstable+, unstable-, stable+, stable- or all");
    man->add_option("--budget", gc.budget, "arclength budget");
    man->add_option("--h-max", gc.h_max, "vertex spacing bound");
    man->add_option("--out", man_out, "artifact (default <branch>.json or manifolds.json)");
    man->add_option("--svg", man_svg, "render the branch");

    // intersect
    auto* inter = app.add_subcommand("intersect", "intersections of W^u with translates of W^s");
    FamilyArgs int_f;
    add_family(inter, int_f);
    std::string int_u, int_s, int_manifolds, int_translate, int_out = "intersect.json", int_svg;
    int int_window = 2;
    inter->add_option("--unstable", int_u, "unstable branch artifact");
    inter->add_option("--stable", int_s, "stable branch artifact");
    inter->add_option("--translate", int_translate, "translate a,b for a single pair");
    inter->add_option("--manifolds", int_manifolds, "four-branch artifact: scan the translate spectrum");
    inter->add_option("--window", int_window, "spectrum window W (|a|,|b| <= W)");
    inter->add_option("--out", int_out, "artifact");
    inter->add_option("--svg", int_svg, "overlay with event markers (single pair)");

    // chain
    auto* chn = app.add_subcommand("chain", "connecting chains and the theta band");
    FamilyArgs chn_f;
    add_family(chn, chn_f);
    std::string chn_v, chn_h, chn_dir = "0,1", chn_out = "theta.json", chn_saddles, chn_svg;
    int chn_id = 0, chn_window = 2, chn_lines = 100;
    double chn_span = 4.0, chn_budget = 30.0;
    chn->add_option("--gamma-v", chn_v, "gamma_v artifact (built when absent)");
    chn->add_option("--gamma-h", chn_h, "gamma_h artifact (built when absent)");
    chn->add_option("--saddles", chn_saddles, "census artifact, used to build the chains");
    chn->add_option("--saddle-id", chn_id, "index into the census (hyperbolic points only)");
    chn->add_option("--window", chn_window, "spectrum window used to find chain events");
    chn->add_option("--budget", chn_budget, "arclength budget");
    chn->add_option("--dir", chn_dir, "unit normal vx,vy of the band");
    chn->add_option("--span", chn_span, "half extent along the band");
    chn->add_option("--lines", chn_lines, "orthogonal test lines");
    chn->add_option("--out", chn_out, "theta artifact");
    chn->add_option("--svg", chn_svg, "render the band");

    // tangency-scan
    auto* tan = app.add_subcommand("tangency-scan", "bisection for the first contact and unfolding fit");
    std::string tan_scn, tan_cd, tan_out = "tangency.json";
    int tan_N = 1, tan_samples = 9, tan_persist = 4;
    bool tan_manifold = false, tan_waive = false;
    std::optional<double> tan_tstar;
    tan->add_option("--scenario", tan_scn, "scan bundle (scan.json from 'run')")->required();
    tan->add_option("--cd", tan_cd, "target translate c,d")->required();
    tan->add_option("--N", tan_N, "iterate count for f^N(theta)");
    tan->add_option("--t-star", tan_tstar, "transverse end of the bracket");
    tan->add_option("--samples", tan_samples, "unfolding samples");
    tan->add_option("--persistence", tan_persist, "persistence samples");
    tan->add_flag("--manifold", tan_manifold, "scan W^u against W^s + (c,d) instead of theta");
    tan->add_flag("--waive-precondition", tan_waive, "allow (c,d).v <= K_f (diagnostic)");
    tan->add_option("--out", tan_out, "artifact");

    // run
    auto* run = app.add_subcommand("run", "run a scenario pipeline");
    std::string run_path;
    run->add_option("scenario", run_path, "scenario descriptor")->required();

    // render
    auto* ren = app.add_subcommand("render", "SVG for an artifact");
    std::vector<std::string> ren_in;
    std::string ren_out, ren_translate = "0,0";
    int ren_size = 800;
    ren->add_option("artifacts", ren_in, "artifact file (two manifold files make an overlay)")->required();
    ren->add_option("--out", ren_out, "SVG file")->required();
    ren->add_option("--translate", ren_translate, "translate of the second (stable) branch");
    ren->add_option("--size", ren_size, "canvas size in pixels");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*rot) {
            auto [fam, p] = rot_f.resolve();
            if (g.seed) oc.seed = *g.seed;
            oc.threads = g.threads;
            const RotationSetApprox outer = mz_outer_hull(fam, p, oc);
            InnerCensusConfig ic;
            ic.q_max = q_max;
            ic.newton.grid = census_grid;
            ic.newton.threads = g.threads;
            if (g.tol_newton) ic.newton.accept_tol = *g.tol_newton;
            if (!window_s.empty()) {
                double x0, y0, x1, y1;
                char extra;
                if (std::sscanf(window_s.c_str(), "%lf,%lf,%lf,%lf%c", &x0, &y0, &x1, &y1, &extra) != 4)
                    throw Error(ErrorKind::Config, "--window expects x0,y0,x1,y1");
                ic.use_window = true;
                ic.window = {{x0, y0}, {x1, y1}};
            }
            RotationSetApprox inner = inner_hull(fam, p, outer, ic);
            if (rot_homoclinic) {
                HomoclinicCensusConfig hc;
                if (g.tol_residual) hc.shooting.accept_tol = *g.tol_residual;
                add_orbit_vectors(inner, homoclinic_orbits(fam, p, hc));
            }
            inner.seed = oc.seed;
            emit(g, rot_out, to_json(outer));
            emit(g, rot_inner, to_json(inner));
            if (!rot_svg.empty()) emit_svg(g, rot_svg, render_svg(hulls_json(outer, inner)));
            return 0;
        }
        if (*sad) {
            auto [fam, p] = sad_f.resolve();
            PeriodicConfig pc;
            pc.grid = sad_grid;
            pc.threads = g.threads;
            if (g.tol_newton) pc.accept_tol = *g.tol_newton;
            const IntVec tr = parse_intvec(sad_trans);
            const auto recs = find_periodic(fam, p, sad_q, tr, pc);
            Json out;
            out["schema"] = "saddles";
            out["family"] = fam.name;
            out["params"] = to_json(p);
            out["q"] = sad_q;
            out["trans"] = to_json(tr);
            Json rs = Json::array();
            for (const auto& r : recs) rs.push_back(to_json(r));
            out["census"] = rs;
            int rc = 0;
            if (sad_q == 1 && tr == IntVec{0, 0}) {
                const LefschetzReport lr = lefschetz_check(fam, p, pc);
                out["lefschetz"] = to_json(lr);
                if (!lr.pass) rc = 4;
            }
            emit(g, sad_out, out);
            for (const auto& r : recs)
                std::printf("(%.12f, %.12f) %s index %+d trace %.6f\n", r.z.x, r.z.y, to_string(r.cls), r.index, r.trace);
            return rc;
        }
        if (*man) {
            auto [fam, p] = man_f.resolve();
            const Json cj = read_json(man_saddles);
            std::vector<SaddleRecord> hyp;
            for (const auto& r : cj.at("census")) {
                SaddleRecord s = saddle_from_json(r);
                if (s.hyperbolic()) hyp.push_back(s);
            }
            if (man_id < 0 || man_id >= static_cast<int>(hyp.size()))
                throw Error(ErrorKind::NotFound, "saddle-id outside the census");
            const SaddleRecord s = hyp[static_cast<std::size_t>(man_id)];
            const BoundLift lift = fam.bind(p);
            if (man_branch == "all") {
                const auto arcs = grow_all_branches(lift, s, gc, g.threads);
                Json out;
                out["schema"] = "manifolds";
                out["saddle"] = to_json(s);
                Json aj = Json::array();
                for (const auto& a : arcs) {
                    aj.push_back(to_json(a));
                    std::printf("%s: %zu points, residual %.3e%s\n", to_string(a.branch), a.points.size(),
                                invariance_residual(lift, a), a.truncated ? " (truncated)" : "");
                }
                out["arcs"] = aj;
                emit(g, man_out.empty() ? "manifolds.json" : man_out, out);
            } else {
                const ManifoldArc a = grow_branch(lift, s, parse_branch(man_branch), gc);
                std::printf("%s: %zu points, residual %.3e\n", to_string(a.branch), a.points.size(),
                            invariance_residual(lift, a));
                const Json j = to_json(a);
                emit(g, man_out.empty() ? man_branch + ".json" : man_out, j);
                if (!man_svg.empty()) emit_svg(g, man_svg, render_svg(j));
            }
            return 0;
        }
        if (*inter) {
            IntersectConfig ic;
            ic.threads = g.threads;
            std::optional<BoundLift> lift;
            if (!int_f.params.empty() || inter->count("--family")) lift = int_f.resolve().first.bind(int_f.resolve().second);
            Json out;
            if (!int_manifolds.empty()) {
                const Json mj = read_json(int_manifolds);
                std::vector<ManifoldArc> arcs;
                for (const auto& a : mj.at("arcs")) arcs.push_back(arc_from_json(a));
                if (arcs.size() != 4) throw Error(ErrorKind::Schema, "expected four branches");
                const auto spec = spectrum_from_arcs({arcs[0], arcs[1]}, {arcs[2], arcs[3]}, int_window, ic,
                                                     lift ? &*lift : nullptr);
                out = to_json(spec);
                for (const auto& [t, evs] : spec.hits)
                    std::printf("(%ld,%ld): %zu events%s\n", t.a, t.b, evs.size(), spec.has_transverse(t) ? "" : " (no transverse)");
            } else {
                if (int_u.empty() || int_s.empty())
                    throw Error(ErrorKind::Config, "give --manifolds, or --unstable and --stable");
                const ManifoldArc u = arc_from_json(read_json(int_u));
                const ManifoldArc s = arc_from_json(read_json(int_s));
                const IntVec tr = int_translate.empty() ? IntVec{0, 0} : parse_intvec(int_translate);
                const ManifoldArc st = translate_arc(s, tr - s.translate);
                auto evs = find_intersections(u, st, ic, lift ? &*lift : nullptr);
                out["schema"] = "events";
                out["translate"] = to_json(tr);
                Json ea = Json::array();
                for (const auto& e : evs) ea.push_back(to_json(e));
                out["events"] = ea;
                std::printf("%zu events\n", evs.size());
                if (!int_svg.empty()) emit_svg(g, int_svg, render_svg(overlay_json(u, s, tr, evs)));
            }
            emit(g, int_out, out);
            return 0;
        }
        if (*chn) {
            ChainCurve gv, gh;
            if (!chn_v.empty() && !chn_h.empty()) {
                gv = chain_from_json(read_json(chn_v));
                gh = chain_from_json(read_json(chn_h));
            } else {
                if (chn_saddles.empty()) throw Error(ErrorKind::Config, "give --gamma-v and --gamma-h, or --saddles");
                auto [fam, p] = chn_f.resolve();
                const Json cj = read_json(chn_saddles);
                std::vector<SaddleRecord> hyp;
                for (const auto& r : cj.at("census")) {
                    SaddleRecord s = saddle_from_json(r);
                    if (s.hyperbolic()) hyp.push_back(s);
                }
                if (chn_id < 0 || chn_id >= static_cast<int>(hyp.size()))
                    throw Error(ErrorKind::NotFound, "saddle-id outside the census");
                GrowthConfig growth;
                growth.budget = chn_budget;
                const ChainBuild cb = build_chains(fam.bind(p), hyp[static_cast<std::size_t>(chn_id)], growth, chn_window);
                gv = cb.gamma_v;
                gh = cb.gamma_h;
                emit(g, "gamma_v.json", to_json(gv));
                emit(g, "gamma_h.json", to_json(gh));
            }
            const PlanePoint v = normalized(parse_point(chn_dir));
            const ThetaBand th = build_theta(gh, gv, {v.y, -v.x}, v, chn_span);
            const WidthCheck wc = width_check(th);
            const LineHitReport lh = line_hit_check(th, chn_lines);
            Json out = to_json(th);
            out["width_pass"] = wc.pass;
            out["lines_hit"] = lh.hit;
            out["lines"] = lh.lines;
            emit(g, chn_out, out);
            if (!chn_svg.empty()) emit_svg(g, chn_svg, render_svg(out));
            std::printf("diam gamma_v %.6f, gamma_h %.6f, K_f %.6f\n", gv.diameter, gh.diameter, compute_Kf(gv, gh));
            std::printf("width %.6f (bound %.6f) %s, lines %d/%d\n", wc.width, wc.bound, wc.pass ? "pass" : "FAIL",
                        lh.hit, lh.lines);
            return wc.pass && lh.pass ? 0 : 4;
        }
        if (*tan) {
            const Json sj = read_json(tan_scn);
            if (sj.value("schema", "") != "scan") throw Error(ErrorKind::Schema, "not a scan bundle");
            Scenario sc;
            sc.family = sj.at("family").get<std::string>();
            sc.params = params_from_json(sj.at("params"));
            sc.axis = sj.at("axis").get<std::string>();
            const LiftFamily fam = sc.lift_family();
            const double t_bar = sj.at("t_bar").get<double>();
            const double t_star = tan_tstar ? *tan_tstar : sj.at("t_star").get<double>();
            const SaddleRecord s = saddle_from_json(sj.at("saddle"));
            const PlanePoint v = point_from_json(sj.at("v"));
            const double Kf = sj.at("Kf").get<double>(), max_diam = sj.at("max_diam").get<double>();
            const IntVec cd = parse_intvec(tan_cd);
            BisectConfig bc;
            if (g.tol_bracket) bc.width = *g.tol_bracket;
            if (g.tol_gap) bc.sep.gap_tol = *g.tol_gap;
            std::unique_ptr<ContactProblem> prob;
            if (tan_manifold) {
                prob = std::make_unique<ManifoldContactProblem>(
                    ManifoldScanConfig{fam, sc.at(t_bar), sc.axis, t_bar, s, cd, GrowthConfig{}});
            } else {
                ThetaScanConfig tc{fam, sc.at(t_bar), sc.axis, t_bar, t_star, s, v, cd, tan_N, Kf, max_diam,
                                   sj.value("span", 4.0)};
                tc.enforce_precondition = !tan_waive;
                prob = std::make_unique<ThetaContactProblem>(tc);
            }
            TangencyRecord rec = scan_tangency(*prob, t_bar, t_star, bc, 10.0 * bc.width, tan_samples);
            const BoundCheck b = translate_bound_check(rec.realized, cd, v, max_diam, Kf);
            const PersistenceReport pr = persistence_check(*prob, rec, t_star, tan_persist, bc.sep);
            Json out = to_json(rec);
            out["bounds"] = to_json(b);
            out["persistence"] = to_json(pr);
            out["precondition_waived"] = tan_manifold || tan_waive;
            emit(g, tan_out, out);
            std::printf("t' = %.12g  slope %.6g  R2 %.6g  realized (%ld,%ld)\n", rec.t_prime, rec.gap_slope,
                        rec.unfold_r2, rec.realized.a, rec.realized.b);
            return rec.realized_known && !b.theorem_ok ? 4 : 0;
        }
        if (*run) {
            Scenario sc = load_scenario(run_path);
            if (g.seed) {
                sc.seed = *g.seed;
                sc.outer.seed = *g.seed;
                sc.source["seed"] = *g.seed;
            }
            sc.threads = g.threads;
            sc.outer.threads = g.threads;
            Json& tol = sc.source["tolerance_overrides"];
            if (g.tol_margin) sc.margin = *g.tol_margin, tol["margin"] = *g.tol_margin;
            if (g.tol_critical) sc.critical_width = *g.tol_critical, tol["critical"] = *g.tol_critical;
            if (g.tol_bracket) sc.bracket_width = *g.tol_bracket, tol["bracket"] = *g.tol_bracket;
            if (g.tol_gap) sc.gap_tol = *g.tol_gap, tol["gap"] = *g.tol_gap;
            if (tol.is_null()) sc.source.erase("tolerance_overrides");
            else {
                // overrides act like edits to every stage's configuration
                for (const char* s : {"rotset", "critical", "tangency"}) sc.source[s]["tolerance_overrides"] = tol;
                sc.source.erase("tolerance_overrides");
            }
            const RunResult r = run_scenario(sc, g.out_dir, &std::cout);
            if (r.exit_code != 0)
                std::cerr << "stage '" << r.failed_stage << "' failed: " << r.diagnostic << "\n";
            return r.exit_code;
        }
        if (*ren) {
            SvgStyle st;
            st.size = ren_size;
            std::string svg;
            if (ren_in.size() == 2) {
                const ManifoldArc u = arc_from_json(read_json(ren_in[0]));
                const ManifoldArc s = arc_from_json(read_json(ren_in[1]));
                const IntVec tr = parse_intvec(ren_translate);
                const auto evs = find_intersections(u, translate_arc(s, tr - s.translate));
                svg = render_svg(overlay_json(u, s, tr, evs), st);
            } else if (ren_in.size() == 1) {
                svg = render_svg(read_json(ren_in[0]), st);
            } else {
                throw Error(ErrorKind::Config, "render takes one artifact, or two manifold artifacts");
            }
            emit_svg(g, ren_out, svg);
            return 0;
        }
    } catch (const Error& e) {
        std::cerr << to_string(e.kind()) << ": " << e.what() << "\n";
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
