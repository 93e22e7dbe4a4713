#include "rotolab/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "rotolab/error.hpp"

namespace rotolab {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};

struct Curve {
    std::vector<PlanePoint> pts;
    std::string color;
    bool closed = false;
    bool fill = false;
    bool dashed = false;
};

struct Scene {
    std::vector<Curve> curves;
    std::vector<PlanePoint> markers;
    std::vector<std::string> labels;
    bool plot = false; // abstract (t, value) axes instead of the plane
    std::string x_label, y_label;
};

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

std::vector<PlanePoint> decimate(const std::vector<PlanePoint>& pts, int max_points)
{
    if (static_cast<int>(pts.size()) <= max_points) return pts;
    std::vector<PlanePoint> out;
    const double step = static_cast<double>(pts.size() - 1) / (max_points - 1);
    for (int i = 0; i < max_points; ++i) out.push_back(pts[static_cast<std::size_t>(std::llround(i * step))]);
    return out;
}

std::string emit(const Scene& sc, const SvgStyle& st)
{
    Box box;
    for (const auto& c : sc.curves)
        for (const auto& p : c.pts)
            if (is_finite(p)) box.add(p);
    for (const auto& p : sc.markers)
        if (is_finite(p)) box.add(p);
    if (box.empty()) box = {{-1, -1}, {1, 1}};
    double wx = box.hi.x - box.lo.x, wy = box.hi.y - box.lo.y;
    if (!sc.plot) wx = wy = std::max(wx, wy);
    if (wx <= 0) wx = 1.0;
    if (wy <= 0) wy = 1.0;
    const double cx = 0.5 * (box.lo.x + box.hi.x), cy = 0.5 * (box.lo.y + box.hi.y);
    const double inner = st.size - 2 * st.margin;
    auto X = [&](double x) { return st.margin + inner * ((x - cx) / wx + 0.5); };
    auto Y = [&](double y) { return st.size - st.margin - inner * ((y - cy) / wy + 0.5); };

    std::string s;
    s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(st.size) + "\" height=\"" +
         std::to_string(st.size) + "\" viewBox=\"0 0 " + std::to_string(st.size) + " " + std::to_string(st.size) +
         "\">\n";
    s += "<rect x=\"0\" y=\"0\" width=\"" + std::to_string(st.size) + "\" height=\"" + std::to_string(st.size) +
         "\" fill=\"white\"/>\n";
    // frame and zero lines
    s += "<rect x=\"" + fmt(st.margin) + "\" y=\"" + fmt(st.margin) + "\" width=\"" + fmt(inner) + "\" height=\"" +
         fmt(inner) + "\" fill=\"none\" stroke=\"#bbbbbb\"/>\n";
    const double x0 = cx - wx / 2, x1 = cx + wx / 2, y0 = cy - wy / 2, y1 = cy + wy / 2;
    if (y0 < 0 && y1 > 0)
        s += "<line x1=\"" + fmt(X(x0)) + "\" y1=\"" + fmt(Y(0)) + "\" x2=\"" + fmt(X(x1)) + "\" y2=\"" + fmt(Y(0)) +
             "\" stroke=\"#dddddd\"/>\n";
    if (x0 < 0 && x1 > 0)
        s += "<line x1=\"" + fmt(X(0)) + "\" y1=\"" + fmt(Y(y0)) + "\" x2=\"" + fmt(X(0)) + "\" y2=\"" + fmt(Y(y1)) +
             "\" stroke=\"#dddddd\"/>\n";
    for (const auto& c : sc.curves) {
        const auto pts = decimate(c.pts, st.max_points);
        if (pts.empty()) continue;
        std::string d;
        bool pen = false;
        for (const auto& p : pts) {
            if (!is_finite(p)) {
                pen = false;
                continue;
            }
            d += pen ? " L" : (d.empty() ? "M" : " M");
            d += fmt(X(p.x)) + " " + fmt(Y(p.y));
            pen = true;
        }
        if (c.closed) d += " Z";
        s += "<path d=\"" + d + "\" fill=\"" + (c.fill ? c.color : std::string("none")) + "\"" +
             (c.fill ? " fill-opacity=\"0.15\"" : "") + " stroke=\"" + c.color + "\" stroke-width=\"" +
             fmt(st.stroke) + "\"" + (c.dashed ? " stroke-dasharray=\"6 4\"" : "") + "/>\n";
    }
    for (const auto& p : sc.markers) {
        if (!is_finite(p)) continue;
        s += "<circle cx=\"" + fmt(X(p.x)) + "\" cy=\"" + fmt(Y(p.y)) + "\" r=\"3\" fill=\"black\"/>\n";
    }
    double ly = st.margin - 10;
    for (const auto& l : sc.labels) {
        s += "<text x=\"" + fmt(st.margin) + "\" y=\"" + fmt(ly) + "\" font-family=\"monospace\" font-size=\"12\">" + l +
             "</text>\n";
        ly -= 14;
    }
    if (sc.plot) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "%s [%.9g, %.9g]", sc.x_label.c_str(), x0, x1);
        s += "<text x=\"" + fmt(st.margin) + "\" y=\"" + fmt(st.size - st.margin + 16) +
             "\" font-family=\"monospace\" font-size=\"12\">" + buf + "</text>\n";
        std::snprintf(buf, sizeof buf, "%s [%.6g, %.6g]", sc.y_label.c_str(), y0, y1);
        s += "<text x=\"" + fmt(st.margin) + "\" y=\"" + fmt(st.size - st.margin + 30) +
             "\" font-family=\"monospace\" font-size=\"12\">" + buf + "</text>\n";
    }
    s += "</svg>\n";
    return s;
}

std::string escape(const std::string& in)
{
    std::string out;
    for (char c : in) {
        if (c == '<') out += "&lt;";
        else if (c == '>') out += "&gt;";
        else if (c == '&') out += "&amp;";
        else out += c;
    }
    return out;
}

void add_hull(Scene& sc, const Json& j, const char* color, bool dashed)
{
    Curve c{points_from_json(j.at("vertices")), color, true, !dashed, dashed};
    sc.curves.push_back(std::move(c));
    sc.labels.push_back(escape(j.value("kind", std::string("hull")) + " hull"));
}

// line {x : x.v = level} over the w-extent [a, b]
Curve band_line(PlanePoint w, PlanePoint v, double level, double a, double b)
{
    return {{level * v + a * w, level * v + b * w}, "#888888", false, false, true};
}

} // namespace

std::string render_svg(const Json& art, const SvgStyle& style)
{
    if (!art.is_object() || !art.contains("schema") || !art.at("schema").is_string())
        throw Error(ErrorKind::Schema, "artifact has no schema tag");
    const std::string schema = art.at("schema").get<std::string>();
    Scene sc;
    if (schema == "hull") {
        add_hull(sc, art, kPalette[0], false);
    } else if (schema == "hulls") {
        add_hull(sc, art.at("outer"), kPalette[0], false);
        add_hull(sc, art.at("inner"), kPalette[1], true);
    } else if (schema == "manifold") {
        const bool u = art.at("branch").get<std::string>().find("unstable") != std::string::npos;
        sc.curves.push_back({points_from_json(art.at("points")), u ? kPalette[1] : kPalette[0]});
        sc.markers.push_back(point_from_json(art.at("saddle").at("z")));
        sc.labels.push_back(escape(art.at("branch").get<std::string>()));
    } else if (schema == "overlay") {
        int i = 0;
        for (const auto& c : art.at("curves")) {
            sc.curves.push_back({points_from_json(c.at("points")), kPalette[i++ % 7]});
            sc.labels.push_back(escape(c.at("label").get<std::string>()));
        }
        sc.markers = points_from_json(art.at("markers"));
    } else if (schema == "chain") {
        sc.curves.push_back({points_from_json(art.at("points")), kPalette[2]});
        const PlanePoint b = point_from_json(art.at("base"));
        sc.markers.push_back(b + intvec_from_json(art.at("start_cell")).as_point());
        sc.markers.push_back(b + intvec_from_json(art.at("end_cell")).as_point());
        sc.labels.push_back(escape(art.at("role").get<std::string>()));
    } else if (schema == "theta") {
        const PlanePoint w = point_from_json(art.at("w")), v = point_from_json(art.at("v"));
        const double a = art.at("w_min").get<double>(), b = art.at("w_max").get<double>();
        sc.curves.push_back({points_from_json(art.at("points")), kPalette[3]});
        sc.curves.push_back(band_line(w, v, art.at("l_minus").get<double>(), a, b));
        sc.curves.push_back(band_line(w, v, art.at("l_plus").get<double>(), a, b));
        for (const auto& l : art.at("lattice")) sc.markers.push_back(intvec_from_json(l).as_point());
        char buf[96];
        std::snprintf(buf, sizeof buf, "theta: width %.6g, bound %.6g", art.at("width").get<double>(),
                      art.at("bound").get<double>());
        sc.labels.push_back(buf);
    } else if (schema == "unfolding") {
        sc.plot = true;
        sc.x_label = "t";
        sc.y_label = "signed gap";
        Curve c{{}, kPalette[0]};
        for (const auto& s : art.at("samples"))
            if (s.at("gap").is_number()) c.pts.push_back({s.at("t").get<double>(), s.at("gap").get<double>()});
        std::sort(c.pts.begin(), c.pts.end(), [](auto p, auto q) { return p.x < q.x; });
        sc.markers = c.pts;
        sc.curves.push_back(std::move(c));
        char buf[96];
        std::snprintf(buf, sizeof buf, "slope %.6g, R2 %.6g", art.at("slope").get<double>(), art.at("r2").get<double>());
        sc.labels.push_back(buf);
    } else {
        throw Error(ErrorKind::Schema, "no renderer for schema '" + schema + "'");
    }
    return emit(sc, style);
}

Json overlay_json(const ManifoldArc& unstable, const ManifoldArc& stable, IntVec translate,
                  const std::vector<IntersectionEvent>& events)
{
    Json j;
    j["schema"] = "overlay";
    j["translate"] = to_json(translate);
    Json curves = Json::array();
    Json cu;
    cu["label"] = std::string(to_string(unstable.branch));
    cu["points"] = to_json(unstable.points);
    curves.push_back(cu);
    Json cs;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s + (%ld,%ld)", to_string(stable.branch), translate.a, translate.b);
    cs["label"] = std::string(buf);
    std::vector<PlanePoint> shifted = stable.points;
    for (auto& p : shifted) p += (translate - stable.translate).as_point();
    cs["points"] = to_json(shifted);
    curves.push_back(cs);
    j["curves"] = curves;
    std::vector<PlanePoint> marks;
    for (const auto& e : events) marks.push_back(e.point);
    j["markers"] = to_json(marks);
    return j;
}

Json hulls_json(const RotationSetApprox& outer, const RotationSetApprox& inner)
{
    Json j;
    j["schema"] = "hulls";
    j["outer"] = to_json(outer);
    j["inner"] = to_json(inner);
    return j;
}

} // namespace rotolab
