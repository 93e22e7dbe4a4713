#include "rotolab/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "rotolab/error.hpp"

namespace rotolab {

namespace {

void write_string(std::string& out, const std::string& s)
{
    out += Json(s).dump();
}

void write_number(std::string& out, double v)
{
    if (!std::isfinite(v)) {
        out += "null";
        return;
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
    // keep floats recognizable as floats on re-read
    if (std::string_view(buf).find_first_of(".eEn") == std::string_view::npos) out += ".0";
}

void write(std::string& out, const Json& j, int indent)
{
    const std::string pad(2 * (indent + 1), ' '), close(2 * indent, ' ');
    switch (j.type()) {
    case Json::value_t::object: {
        if (j.empty()) {
            out += "{}";
            return;
        }
        out += "{\n";
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first) out += ",\n";
            first = false;
            out += pad;
            write_string(out, it.key());
            out += ": ";
            write(out, it.value(), indent + 1);
        }
        out += "\n" + close + "}";
        return;
    }
    case Json::value_t::array: {
        if (j.empty()) {
            out += "[]";
            return;
        }
        // short numeric arrays (points, vectors) on one line
        bool flat = j.size() <= 4;
        for (const auto& e : j) flat = flat && e.is_primitive();
        if (flat) {
            out += "[";
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) out += ", ";
                write(out, j[i], indent + 1);
            }
            out += "]";
            return;
        }
        out += "[\n";
        for (std::size_t i = 0; i < j.size(); ++i) {
            if (i) out += ",\n";
            out += pad;
            write(out, j[i], indent + 1);
        }
        out += "\n" + close + "]";
        return;
    }
    case Json::value_t::number_float:
        write_number(out, j.get<double>());
        return;
    default:
        out += j.dump();
    }
}

const Json& field(const Json& j, const char* key)
{
    if (!j.is_object() || !j.contains(key)) throw Error(ErrorKind::Schema, std::string("missing field '") + key + "'");
    return j.at(key);
}

double num(const Json& j)
{
    if (j.is_null()) return NAN;
    if (!j.is_number()) throw Error(ErrorKind::Schema, "expected a number");
    return j.get<double>();
}

template <class T>
T get(const Json& j, const char* key)
{
    try {
        return field(j, key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::Schema, std::string("field '") + key + "': " + e.what());
    }
}

double getd(const Json& j, const char* key)
{
    return num(field(j, key));
}

PointClass class_from_string(const std::string& s)
{
    for (auto c : {PointClass::Saddle, PointClass::FlipSaddle, PointClass::Elliptic, PointClass::ParabolicDegenerate})
        if (s == to_string(c)) return c;
    throw Error(ErrorKind::Schema, "unknown point class '" + s + "'");
}

} // namespace

std::string dump(const Json& j)
{
    std::string out;
    write(out, j, 0);
    out += "\n";
    return out;
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Config, "cannot read '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::string& path, std::string_view text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Config, "cannot write '" + path + "'");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw Error(ErrorKind::Config, "write failed for '" + path + "'");
}

Json read_json(const std::string& path)
{
    const std::string text = read_file(path);
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorKind::Schema, "'" + path + "' is not valid JSON: " + e.what());
    }
}

void write_json(const std::string& path, const Json& j)
{
    write_file(path, dump(j));
}

std::uint64_t fnv1a(std::string_view data, std::uint64_t h)
{
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

Json to_json(PlanePoint p)
{
    return Json::array({p.x, p.y});
}

Json to_json(IntVec v)
{
    return Json::array({v.a, v.b});
}

Json to_json(const std::vector<PlanePoint>& pts)
{
    Json a = Json::array();
    for (const auto& p : pts) a.push_back(to_json(p));
    return a;
}

Json to_json(const FamilyParams& p)
{
    Json o = Json::object();
    for (const auto& [k, v] : p.values()) o[k] = v;
    return o;
}

Json to_json(const RotationSetApprox& rs)
{
    Json j;
    j["schema"] = "hull";
    j["kind"] = to_string(rs.kind);
    j["vertices"] = to_json(rs.vertices);
    Json prov;
    prov["family"] = rs.family;
    prov["params"] = to_json(rs.params);
    prov["seed"] = rs.seed;
    prov["grid"] = rs.grid;
    prov["n_min"] = rs.n_min;
    prov["n_max"] = rs.n_max;
    prov["ladder"] = rs.ladder;
    Json ld = Json::array();
    for (double d : rs.ladder_diameter) ld.push_back(d);
    prov["ladder_diameter"] = ld;
    Json src = Json::array();
    for (std::size_t i = 0; i < rs.sources.size(); ++i) {
        Json s;
        s["numerator"] = to_json(rs.sources[i]);
        s["period"] = i < rs.source_periods.size() ? rs.source_periods[i] : 0;
        src.push_back(s);
    }
    prov["sources"] = src;
    j["provenance"] = prov;
    return j;
}

Json to_json(const SaddleRecord& r)
{
    Json j;
    j["z"] = to_json(r.z);
    j["q"] = r.q;
    j["trans"] = to_json(r.trans);
    j["class"] = to_string(r.cls);
    j["index"] = r.index;
    j["trace"] = r.trace;
    j["det"] = r.det;
    j["lambda_u"] = r.lambda_u;
    j["lambda_s"] = r.lambda_s;
    j["eig_u"] = to_json(r.eig_u);
    j["eig_s"] = to_json(r.eig_s);
    j["residual"] = r.residual;
    j["params"] = to_json(r.params);
    return j;
}

Json to_json(const ManifoldArc& a)
{
    Json j;
    j["schema"] = "manifold";
    j["branch"] = to_string(a.branch);
    j["saddle"] = to_json(a.saddle);
    j["translate"] = to_json(a.translate);
    j["direction"] = to_json(a.direction);
    j["ratio"] = a.ratio;
    j["delta0"] = a.delta0;
    j["steps_per_domain"] = a.steps_per_domain;
    j["domains"] = a.domains;
    j["arclength"] = a.arclength;
    j["truncated"] = a.truncated;
    j["diagnostic"] = a.diagnostic;
    j["points"] = to_json(a.points);
    Json s = Json::array();
    for (double v : a.sigma) s.push_back(v);
    j["sigma"] = s;
    return j;
}

Json to_json(const IntersectionEvent& e)
{
    Json j;
    j["point"] = to_json(e.point);
    j["translate"] = to_json(e.translate);
    j["kind"] = to_string(e.kind);
    j["sign"] = e.sign;
    j["angle"] = e.angle;
    j["s_u"] = e.s_u;
    j["s_s"] = e.s_s;
    j["seg_u"] = e.seg_u;
    j["seg_s"] = e.seg_s;
    j["touch"] = e.touch;
    j["branch_u"] = to_string(e.branch_u);
    j["branch_s"] = to_string(e.branch_s);
    return j;
}

Json to_json(const TranslateSpectrum& s)
{
    Json j;
    j["schema"] = "spectrum";
    j["window"] = s.window;
    Json hits = Json::array();
    for (const auto& [t, evs] : s.hits) {
        Json h;
        h["translate"] = to_json(t);
        h["transverse"] = s.has_transverse(t);
        Json e = Json::array();
        for (const auto& ev : evs) e.push_back(to_json(ev));
        h["count"] = evs.size();
        h["events"] = e;
        hits.push_back(h);
    }
    j["hits"] = hits;
    j["max_angle_asymmetry"] = s.max_angle_asymmetry;
    Json un = Json::array();
    for (const auto& t : s.unmatched_reflections) un.push_back(to_json(t));
    j["unmatched_reflections"] = un;
    return j;
}

Json to_json(const Lemma0Report& r)
{
    Json j;
    j["pass"] = r.pass;
    Json e = Json::array();
    for (const auto& x : r.entries) {
        Json o;
        o["translate"] = to_json(x.translate);
        o["dot"] = x.dot;
        o["dot_ok"] = x.dot_ok;
        o["cone_ok"] = x.cone_ok;
        e.push_back(o);
    }
    j["entries"] = e;
    j["diagnostic"] = r.diagnostic;
    return j;
}

Json to_json(const SupportData& s)
{
    Json j;
    j["point"] = to_json(s.point);
    j["v"] = to_json(s.v);
    j["r_dir"] = to_json(s.r_dir);
    j["at_vertex"] = s.at_vertex;
    return j;
}

Json to_json(const MembershipCertificate& c)
{
    Json j;
    j["t"] = c.t;
    j["state"] = to_string(c.state);
    j["outer_depth"] = c.outer_depth;
    j["inner_depth"] = c.inner_depth;
    return j;
}

Json to_json(const CriticalResult& c)
{
    Json j;
    j["t_bar"] = c.t_bar;
    j["t_lo"] = c.t_lo;
    j["t_hi"] = c.t_hi;
    j["steps"] = c.steps;
    j["cert_lo"] = to_json(c.cert_lo);
    j["cert_hi"] = to_json(c.cert_hi);
    return j;
}

Json to_json(const ContinuationCurve& c)
{
    Json j;
    j["axis"] = c.axis;
    j["complete"] = c.complete;
    j["fold_end"] = c.fold_end;
    j["halvings"] = c.halvings;
    j["max_step_displacement"] = c.max_step_displacement;
    j["diagnostic"] = c.diagnostic;
    Json pts = Json::array();
    for (const auto& p : c.points) {
        Json o;
        o["t"] = p.t;
        o["z"] = to_json(p.rec.z);
        o["class"] = to_string(p.rec.cls);
        o["trace"] = p.rec.trace;
        pts.push_back(o);
    }
    j["points"] = pts;
    return j;
}

Json to_json(const LefschetzReport& r)
{
    Json j;
    j["sum"] = r.sum;
    j["pass"] = r.pass;
    j["count"] = r.count;
    j["diagnostic"] = r.diagnostic;
    return j;
}

Json to_json(const ChainCurve& c)
{
    Json j;
    j["schema"] = "chain";
    j["role"] = to_string(c.role);
    j["base"] = to_json(c.base);
    j["start_cell"] = to_json(c.start_cell);
    j["end_cell"] = to_json(c.end_cell);
    j["diameter"] = c.diameter;
    j["max_joint_gap"] = c.max_joint_gap;
    Json comp = Json::array();
    for (const auto& p : c.composition) {
        Json o;
        o["source"] = p.source;
        o["translate"] = to_json(p.translate);
        o["reversed"] = p.reversed;
        o["vertices"] = p.vertices;
        comp.push_back(o);
    }
    j["composition"] = comp;
    j["points"] = to_json(c.points);
    return j;
}

Json to_json(const ThetaBand& t)
{
    Json j;
    j["schema"] = "theta";
    j["w"] = to_json(t.w);
    j["v"] = to_json(t.v);
    j["width"] = t.width;
    j["bound"] = t.bound;
    j["Kf"] = t.Kf;
    j["l_minus"] = t.l_minus;
    j["l_plus"] = t.l_plus;
    j["w_min"] = t.w_min;
    j["w_max"] = t.w_max;
    Json lat = Json::array();
    for (const auto& l : t.lattice) lat.push_back(to_json(l));
    j["lattice"] = lat;
    Json pl = Json::array();
    for (const auto& p : t.placements) {
        Json o;
        o["offset"] = to_json(p.offset);
        o["role"] = to_string(p.role);
        o["reversed"] = p.reversed;
        pl.push_back(o);
    }
    j["placements"] = pl;
    j["points"] = to_json(t.points);
    return j;
}

Json to_json(const Separation& s)
{
    Json j;
    j["t"] = s.t;
    j["kind"] = to_string(s.kind);
    j["gap"] = s.gap;
    j["signed_gap"] = s.signed_gap;
    j["half_width"] = s.half_width;
    j["events"] = s.events.size();
    j["realized_known"] = s.realized_known;
    j["realized"] = to_json(s.realized);
    j["witness"] = to_json(s.witness);
    return j;
}

Json to_json(const TangencyRecord& r)
{
    Json j;
    j["schema"] = "tangency";
    j["t_prime"] = r.t_prime;
    j["witness"] = to_json(r.witness);
    j["realized_known"] = r.realized_known;
    j["realized_translate"] = to_json(r.realized);
    j["gap_slope"] = r.gap_slope;
    j["bracket"] = Json::array({r.t_lo, r.t_hi});
    j["unfold_quality"] = r.unfold_r2;
    j["halfwidth_r2"] = r.halfwidth_r2;
    j["halfwidth_coeff"] = r.halfwidth_coeff;
    j["steps"] = r.steps;
    Json births = Json::array();
    for (const auto& [lo, hi] : r.other_births) births.push_back(Json::array({lo, hi}));
    j["other_births"] = births;
    Json trail = Json::array();
    for (const auto& s : r.trail) trail.push_back(to_json(s));
    j["trail"] = trail;
    return j;
}

Json to_json(const UnfoldingFit& f)
{
    Json j;
    j["schema"] = "unfolding";
    j["slope"] = f.slope;
    j["intercept"] = f.intercept;
    j["r2"] = f.r2;
    j["halfwidth_coeff"] = f.halfwidth_coeff;
    j["halfwidth_r2"] = f.halfwidth_r2;
    j["degenerate"] = f.degenerate;
    j["diagnostic"] = f.diagnostic;
    Json s = Json::array();
    for (std::size_t i = 0; i < f.ts.size(); ++i) {
        Json o;
        o["t"] = f.ts[i];
        o["gap"] = i < f.gaps.size() ? f.gaps[i] : NAN;
        o["half_width"] = i < f.halfwidths.size() ? f.halfwidths[i] : NAN;
        s.push_back(o);
    }
    j["samples"] = s;
    return j;
}

Json to_json(const BoundCheck& b)
{
    Json j;
    j["deviation"] = b.deviation;
    j["proof_bound"] = b.proof_bound;
    j["theorem_bound"] = b.theorem_bound;
    j["proof_ok"] = b.proof_ok;
    j["theorem_ok"] = b.theorem_ok;
    j["pass"] = b.pass;
    return j;
}

Json to_json(const PersistenceReport& p)
{
    Json j;
    j["pass"] = p.pass;
    Json s = Json::array();
    for (std::size_t i = 0; i < p.ts.size(); ++i) {
        Json o;
        o["t"] = p.ts[i];
        o["transverse"] = static_cast<bool>(p.transverse[i]);
        o["same_translate"] = static_cast<bool>(p.same_translate[i]);
        s.push_back(o);
    }
    j["samples"] = s;
    return j;
}

PlanePoint point_from_json(const Json& j)
{
    if (!j.is_array() || j.size() != 2) throw Error(ErrorKind::Schema, "point must be [x, y]");
    return {num(j[0]), num(j[1])};
}

IntVec intvec_from_json(const Json& j)
{
    if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer())
        throw Error(ErrorKind::Schema, "translate must be [a, b] with integers");
    return {j[0].get<long>(), j[1].get<long>()};
}

std::vector<PlanePoint> points_from_json(const Json& j)
{
    if (!j.is_array()) throw Error(ErrorKind::Schema, "points must be an array");
    std::vector<PlanePoint> out;
    out.reserve(j.size());
    for (const auto& p : j) out.push_back(point_from_json(p));
    return out;
}

FamilyParams params_from_json(const Json& j)
{
    if (!j.is_object()) throw Error(ErrorKind::Schema, "params must be an object");
    FamilyParams p;
    for (auto it = j.begin(); it != j.end(); ++it) p.set(it.key(), num(it.value()));
    return p;
}

RotationSetApprox hull_from_json(const Json& j)
{
    if (!j.is_object() || j.value("schema", "") != "hull") throw Error(ErrorKind::Schema, "not a hull artifact");
    RotationSetApprox rs;
    const std::string kind = get<std::string>(j, "kind");
    if (kind == to_string(HullKind::Outer)) rs.kind = HullKind::Outer;
    else if (kind == to_string(HullKind::Inner)) rs.kind = HullKind::Inner;
    else throw Error(ErrorKind::Schema, "unknown hull kind '" + kind + "'");
    rs.vertices = points_from_json(field(j, "vertices"));
    const Json& prov = field(j, "provenance");
    rs.family = get<std::string>(prov, "family");
    rs.params = params_from_json(field(prov, "params"));
    rs.seed = get<unsigned long long>(prov, "seed");
    rs.grid = get<int>(prov, "grid");
    rs.n_min = get<long>(prov, "n_min");
    rs.n_max = get<long>(prov, "n_max");
    rs.ladder = get<std::vector<long>>(prov, "ladder");
    for (const auto& d : field(prov, "ladder_diameter")) rs.ladder_diameter.push_back(num(d));
    for (const auto& s : field(prov, "sources")) {
        rs.sources.push_back(intvec_from_json(field(s, "numerator")));
        rs.source_periods.push_back(get<int>(s, "period"));
    }
    return rs;
}

SaddleRecord saddle_from_json(const Json& j)
{
    SaddleRecord r;
    r.z = point_from_json(field(j, "z"));
    r.q = get<int>(j, "q");
    r.trans = intvec_from_json(field(j, "trans"));
    r.cls = class_from_string(get<std::string>(j, "class"));
    r.index = get<int>(j, "index");
    r.trace = getd(j, "trace");
    r.det = getd(j, "det");
    r.lambda_u = getd(j, "lambda_u");
    r.lambda_s = getd(j, "lambda_s");
    r.eig_u = point_from_json(field(j, "eig_u"));
    r.eig_s = point_from_json(field(j, "eig_s"));
    r.residual = getd(j, "residual");
    r.params = params_from_json(field(j, "params"));
    return r;
}

ManifoldArc arc_from_json(const Json& j)
{
    if (!j.is_object() || j.value("schema", "") != "manifold") throw Error(ErrorKind::Schema, "not a manifold artifact");
    ManifoldArc a;
    a.branch = branch_from_string(get<std::string>(j, "branch"));
    a.saddle = saddle_from_json(field(j, "saddle"));
    a.translate = intvec_from_json(field(j, "translate"));
    a.direction = point_from_json(field(j, "direction"));
    a.ratio = getd(j, "ratio");
    a.delta0 = getd(j, "delta0");
    a.steps_per_domain = get<int>(j, "steps_per_domain");
    a.domains = get<int>(j, "domains");
    a.arclength = getd(j, "arclength");
    a.truncated = get<bool>(j, "truncated");
    a.diagnostic = get<std::string>(j, "diagnostic");
    a.points = points_from_json(field(j, "points"));
    for (const auto& s : field(j, "sigma")) a.sigma.push_back(num(s));
    if (a.sigma.size() != a.points.size()) throw Error(ErrorKind::Schema, "sigma and points differ in length");
    return a;
}

IntersectionEvent event_from_json(const Json& j)
{
    IntersectionEvent e;
    e.point = point_from_json(field(j, "point"));
    e.translate = intvec_from_json(field(j, "translate"));
    const std::string kind = get<std::string>(j, "kind");
    e.kind = kind == to_string(EventKind::Transverse) ? EventKind::Transverse : EventKind::TangencyCandidate;
    e.sign = get<int>(j, "sign");
    e.angle = getd(j, "angle");
    e.s_u = getd(j, "s_u");
    e.s_s = getd(j, "s_s");
    e.seg_u = get<std::size_t>(j, "seg_u");
    e.seg_s = get<std::size_t>(j, "seg_s");
    e.touch = get<bool>(j, "touch");
    e.branch_u = branch_from_string(get<std::string>(j, "branch_u"));
    e.branch_s = branch_from_string(get<std::string>(j, "branch_s"));
    return e;
}

ChainCurve chain_from_json(const Json& j)
{
    if (!j.is_object() || j.value("schema", "") != "chain") throw Error(ErrorKind::Schema, "not a chain artifact");
    ChainCurve c;
    const std::string role = get<std::string>(j, "role");
    if (role == to_string(ChainRole::GammaV)) c.role = ChainRole::GammaV;
    else if (role == to_string(ChainRole::GammaH)) c.role = ChainRole::GammaH;
    else throw Error(ErrorKind::Schema, "unknown chain role '" + role + "'");
    c.base = point_from_json(field(j, "base"));
    c.start_cell = intvec_from_json(field(j, "start_cell"));
    c.end_cell = intvec_from_json(field(j, "end_cell"));
    c.diameter = getd(j, "diameter");
    c.max_joint_gap = getd(j, "max_joint_gap");
    for (const auto& p : field(j, "composition"))
        c.composition.push_back({get<std::string>(p, "source"), intvec_from_json(field(p, "translate")),
                                 get<bool>(p, "reversed"), get<std::size_t>(p, "vertices")});
    c.points = points_from_json(field(j, "points"));
    return c;
}

SupportData support_from_json(const Json& j)
{
    SupportData s;
    s.point = point_from_json(field(j, "point"));
    s.v = point_from_json(field(j, "v"));
    s.r_dir = point_from_json(field(j, "r_dir"));
    s.at_vertex = get<bool>(j, "at_vertex");
    return s;
}

IntVec parse_intvec(const std::string& s)
{
    long a = 0, b = 0;
    char comma = 0, extra = 0;
    if (std::sscanf(s.c_str(), " %ld %c %ld %c", &a, &comma, &b, &extra) != 3 || comma != ',')
        throw Error(ErrorKind::Config, "expected 'a,b' with integers, got '" + s + "'");
    return {a, b};
}

PlanePoint parse_point(const std::string& s)
{
    double x = 0, y = 0;
    char comma = 0, extra = 0;
    if (std::sscanf(s.c_str(), " %lf %c %lf %c", &x, &comma, &y, &extra) != 3 || comma != ',')
        throw Error(ErrorKind::Config, "expected 'x,y', got '" + s + "'");
    return {x, y};
}

} // namespace rotolab
