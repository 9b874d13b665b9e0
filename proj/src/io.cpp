#include "mdm/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "mdm/errors.hpp"

namespace mdm {

namespace {

Json point_json(Point2 p) { return Json::array({p.x, p.y}); }

Point2 point_from(const Json& j, const char* what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ParseError(std::string(what) + " must be an [x, y] pair of numbers");
  return {j[0].get<double>(), j[1].get<double>()};
}

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ParseError(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

double number(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_number()) throw ParseError(std::string("field \"") + key + "\" must be a number");
  return v.get<double>();
}

int integer(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_number_integer()) throw ParseError(std::string("field \"") + key + "\" must be an integer");
  return v.get<int>();
}

CurveKind kind_from(const std::string& s) {
  for (CurveKind k : {CurveKind::Circle, CurveKind::Ellipse, CurveKind::Stadium, CurveKind::Rectangle,
                      CurveKind::Sampled, CurveKind::Offset})
    if (to_string(k) == s) return k;
  throw ParseError("unknown curve kind \"" + s + "\"");
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

Json network_to_json(const Network& net) {
  Json verts = Json::array();
  for (const Point2& p : net.vertices()) verts.push_back(point_json(p));
  Json edges = Json::array();
  for (const Edge& e : net.edges()) {
    Json je = {{"a", e.a}, {"b", e.b}};
    if (e.kind == EdgeKind::Segment) {
      je["type"] = "seg";
    } else {
      je["type"] = "arc";
      je["center"] = point_json(e.center);
      je["ccw"] = e.ccw;
    }
    if (e.all_energetic) je["all_energetic"] = true;
    edges.push_back(std::move(je));
  }
  return {{"vertices", verts}, {"edges", edges}};
}

Network network_from_json(const Json& j) {
  const Json& verts = field(j, "vertices");
  const Json& edges = field(j, "edges");
  if (!verts.is_array() || !edges.is_array()) throw ParseError("vertices and edges must be arrays");
  std::vector<Point2> vs;
  for (const Json& p : verts) vs.push_back(point_from(p, "vertex"));
  std::vector<Edge> es;
  for (const Json& je : edges) {
    Edge e;
    e.a = integer(je, "a");
    e.b = integer(je, "b");
    if (e.a < 0 || e.b < 0 || e.a >= static_cast<int>(vs.size()) || e.b >= static_cast<int>(vs.size()))
      throw ParseError("edge endpoint out of range");
    const Json& type = field(je, "type");
    if (!type.is_string()) throw ParseError("edge type must be a string");
    if (type == "seg") {
      e.kind = EdgeKind::Segment;
    } else if (type == "arc") {
      e.kind = EdgeKind::Arc;
      e.center = point_from(field(je, "center"), "arc center");
      const Json& ccw = field(je, "ccw");
      if (!ccw.is_boolean()) throw ParseError("arc ccw must be a boolean");
      e.ccw = ccw.get<bool>();
    } else {
      throw ParseError("edge type must be \"seg\" or \"arc\"");
    }
    if (je.contains("all_energetic")) e.all_energetic = je.at("all_energetic").get<bool>();
    es.push_back(e);
  }
  return Network(std::move(vs), std::move(es));
}

Json curve_to_json(const CurveSpec& s) {
  Json j = {{"kind", to_string(s.kind)}};
  switch (s.kind) {
    case CurveKind::Circle:
      j["center"] = point_json(s.center);
      j["radius"] = s.radius;
      break;
    case CurveKind::Ellipse:
      j["center"] = point_json(s.center);
      j["a"] = s.semi_a;
      j["b"] = s.semi_b;
      j["density"] = s.density;
      break;
    case CurveKind::Stadium:
      j["center"] = point_json(s.center);
      j["length"] = s.length;
      j["radius"] = s.radius;
      break;
    case CurveKind::Rectangle:
      j["corner"] = point_json(s.center);
      j["width"] = s.semi_a;
      j["height"] = s.semi_b;
      break;
    case CurveKind::Sampled: {
      Json pts = Json::array();
      for (const Point2& p : s.points) pts.push_back(point_json(p));
      j["points"] = pts;
      j["density"] = s.density;
      break;
    }
    case CurveKind::Offset:
      j["base"] = curve_to_json(*s.base);
      j["offset"] = s.offset;
      j["density"] = s.density;
      break;
  }
  return j;
}

CurveSpec curve_from_json(const Json& j) {
  const Json& k = field(j, "kind");
  if (!k.is_string()) throw ParseError("curve kind must be a string");
  CurveSpec s;
  s.kind = kind_from(k.get<std::string>());
  switch (s.kind) {
    case CurveKind::Circle:
      s.center = point_from(field(j, "center"), "center");
      s.radius = number(j, "radius");
      break;
    case CurveKind::Ellipse:
      s.center = point_from(field(j, "center"), "center");
      s.semi_a = number(j, "a");
      s.semi_b = number(j, "b");
      if (j.contains("density")) s.density = integer(j, "density");
      break;
    case CurveKind::Stadium:
      s.center = point_from(field(j, "center"), "center");
      s.length = number(j, "length");
      s.radius = number(j, "radius");
      break;
    case CurveKind::Rectangle:
      s.center = point_from(field(j, "corner"), "corner");
      s.semi_a = number(j, "width");
      s.semi_b = number(j, "height");
      break;
    case CurveKind::Sampled:
      for (const Json& p : field(j, "points")) s.points.push_back(point_from(p, "curve point"));
      if (j.contains("density")) s.density = integer(j, "density");
      break;
    case CurveKind::Offset:
      s.base = std::make_shared<const CurveSpec>(curve_from_json(field(j, "base")));
      s.offset = number(j, "offset");
      if (j.contains("density")) s.density = integer(j, "density");
      break;
  }
  return s;
}

Json scene_to_json(const Scene& sc) {
  Json j = {{"name", sc.name}, {"seed", sc.seed}, {"curve", curve_to_json(sc.curve)}, {"r", sc.r}};
  if (sc.net) j["network"] = network_to_json(*sc.net);
  return j;
}

Scene scene_from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("scene must be a JSON object");
  Scene sc;
  if (j.contains("name")) sc.name = j.at("name").get<std::string>();
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) throw ParseError("seed must be a nonnegative integer");
    sc.seed = j.at("seed").get<std::uint64_t>();
  }
  sc.curve = curve_from_json(field(j, "curve"));
  sc.r = number(j, "r");
  if (!(sc.r > 0.0)) throw ParseError("r must be positive");
  if (j.contains("network")) sc.net = network_from_json(j.at("network"));
  return sc;
}

Json parse_json_text(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(e.what());
  }
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json_text(ss.str());
}

Scene read_scene(const std::string& path) {
  try {
    return scene_from_json(read_json_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(e.what());
  }
}

Network read_network(const std::string& path) {
  const Json j = read_json_file(path);
  try {
    // Either a bare network or a scene carrying one.
    if (j.is_object() && j.contains("network")) return network_from_json(j.at("network"));
    return network_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << text;
  if (!out) throw Error("write failed for " + path);
}

std::string trace_csv(const OptimizationTrace& trace) {
  std::string s = "iter,length,violation,gradnorm\n";
  int k = 0;
  for (const TraceEntry& e : trace.entries) {
    // Iterations restart per stage; the CSV numbers them globally.
    s += std::to_string(k++) + "," + format_double(e.length) + "," + format_double(e.violation) + "," +
         format_double(e.gradnorm) + "\n";
  }
  return s;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string s = "R_over_r,cell_length,advance,c\n";
  for (const SweepRow& r : rows)
    s += format_double(r.R_over_r) + "," + format_double(r.cell_length) + "," + format_double(r.advance) + "," +
         format_double(r.c) + "\n";
  return s;
}

Json records_to_json(const std::vector<EnergeticRecord>& records) {
  Json out = Json::array();
  for (const auto& r : records) {
    Json ys = Json::array();
    for (const auto& y : r.corresponding) ys.push_back({{"y", point_json(y.y)}, {"s", y.s}, {"smooth", y.smooth}});
    Json j = {{"x", point_json(r.x)}, {"class", to_string(r.cls)}, {"degree", r.degree},
              {"on_offset", r.on_offset}, {"corresponding", ys}};
    if (r.vertex >= 0) j["vertex"] = r.vertex;
    if (r.edge >= 0) j["edge"] = r.edge;
    if (r.case_id) j["case"] = *r.case_id;
    out.push_back(std::move(j));
  }
  return out;
}

Json components_to_json(const std::vector<ComponentReport>& comps) {
  Json out = Json::array();
  for (const auto& c : comps) {
    Json hull = Json::array();
    for (const Point2& p : c.hull) hull.push_back(point_json(p));
    out.push_back({{"edges", c.edges},
                   {"entering", c.entering.size()},
                   {"energetic", c.energetic.size()},
                   {"hull", hull},
                   {"entering_hull_vertices", c.entering_hull_vertices},
                   {"violations", c.violations},
                   {"ok", c.ok()}});
  }
  return out;
}

Json stationarity_to_json(const StationarityReport& rep) {
  Json pts = Json::array();
  for (const auto& p : rep.points)
    pts.push_back({{"record", p.record},
                   {"moving", p.moving},
                   {"case", p.config.case_id},
                   {"alpha", p.config.alpha},
                   {"beta", p.config.beta},
                   {"gamma", p.config.gamma},
                   {"delta", p.config.delta},
                   {"derivative", p.value},
                   {"pass", p.nonnegative}});
  Json pairs = Json::array();
  for (const auto& p : rep.pairs)
    pairs.push_back({{"y", point_json(p.y)},
                     {"records", {p.record1, p.record2}},
                     {"d1", p.d1},
                     {"d2", p.d2},
                     {"equal", p.equal},
                     {"opposite_sides", p.opposite_sides}});
  return {{"tau", rep.tau}, {"points", pts}, {"pairs", pairs}, {"skipped", rep.skipped}, {"ok", rep.ok()}};
}

Json validation_to_json(const ValidationReport& rep) {
  return {{"acyclic", rep.acyclic},       {"segments_only", rep.segments_only},
          {"angles", rep.angles},         {"tripods", rep.tripods},
          {"straight", rep.straight},     {"terminals", rep.terminals},
          {"min_angle", rep.min_angle},   {"max_tripod_deviation", rep.max_tripod_deviation},
          {"failures", rep.failures},     {"ok", rep.ok()}};
}

Json structure_to_json(const StructureReport& rep) {
  return {{"nonempty", rep.nonempty}, {"incidence", rep.incidence}, {"connected", rep.connected},
          {"acyclic", rep.acyclic},   {"degree", rep.degree},       {"failures", rep.failures},
          {"ok", rep.ok()}};
}

namespace {

struct Frame {
  double minx, miny, scale, height;
  std::string x(double v) const { return format_double(std::round((v - minx) * scale * 100.0) / 100.0); }
  std::string y(double v) const { return format_double(std::round((height - (v - miny) * scale) * 100.0) / 100.0); }
  std::string len(double v) const { return format_double(std::round(v * scale * 100.0) / 100.0); }
};

std::string polyline(const Frame& f, const std::vector<Point2>& pts, const std::string& cls) {
  std::string s = "<polygon class=\"" + cls + "\" points=\"";
  for (std::size_t i = 0; i < pts.size(); ++i) s += (i ? " " : "") + f.x(pts[i].x) + "," + f.y(pts[i].y);
  return s + "\"/>\n";
}

std::vector<Point2> offset_outline(const ConvexCurve& curve, double r) {
  if (curve.kind() == CurveKind::Rectangle) {
    const CurveSpec& s = curve.spec();
    const Point2 a = s.center + Vec2{r, r};
    const double w = s.semi_a - 2.0 * r, h = s.semi_b - 2.0 * r;
    if (!(w > 0.0 && h > 0.0)) return {};
    return {a, a + Vec2{w, 0}, a + Vec2{w, h}, a + Vec2{0, h}};
  }
  try {
    return inner_offset(curve, r, 720).samples;
  } catch (const Error&) {
    return {};
  }
}

}  // namespace

std::string render_svg(const Scene& scene, const std::vector<EnergeticRecord>* records, double width_px) {
  const ConvexCurve curve = ConvexCurve::from_spec(scene.curve);
  const std::vector<Point2> outline = curve.samples(1440);
  double minx = std::numeric_limits<double>::infinity(), miny = minx, maxx = -minx, maxy = -minx;
  for (const Point2& p : outline) {
    minx = std::min(minx, p.x);
    maxx = std::max(maxx, p.x);
    miny = std::min(miny, p.y);
    maxy = std::max(maxy, p.y);
  }
  const double pad = 0.04 * std::max(maxx - minx, maxy - miny) + scene.r;
  minx -= pad;
  miny -= pad;
  maxx += pad;
  maxy += pad;
  const double scale = width_px / (maxx - minx);
  const Frame f{minx, miny, scale, (maxy - miny) * scale};

  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + f.len(maxx - minx) + "\" height=\"" +
                  f.len(maxy - miny) + "\" viewBox=\"0 0 " + f.len(maxx - minx) + " " + f.len(maxy - miny) + "\">\n";
  s += "<style>.M{fill:none;stroke:#000;stroke-width:3}.Mr{fill:none;stroke:#555;stroke-width:1;"
       "stroke-dasharray:2 3}.seg,.arc{fill:none;stroke:#c0392b;stroke-width:1.6}.en{fill:#1f6fb2}"
       ".ball{fill:none;stroke:#1f6fb2;stroke-width:0.8;stroke-dasharray:5 3}</style>\n";
  if (!scene.name.empty()) s += "<title>" + scene.name + "</title>\n";
  s += "<g id=\"M\">\n" + polyline(f, outline, "M") + "</g>\n";
  s += "<g id=\"Mr\">\n";
  if (const auto off = offset_outline(curve, scene.r); !off.empty()) s += polyline(f, off, "Mr");
  s += "</g>\n<g id=\"sigma\">\n";
  if (scene.net) {
    const Network& n = *scene.net;
    for (int e = 0; e < n.edge_count(); ++e) {
      const Edge& ed = n.edge(e);
      const Point2 a = n.vertex(ed.a), b = n.vertex(ed.b);
      if (ed.kind == EdgeKind::Segment) {
        s += "<line class=\"seg\" x1=\"" + f.x(a.x) + "\" y1=\"" + f.y(a.y) + "\" x2=\"" + f.x(b.x) + "\" y2=\"" +
             f.y(b.y) + "\"/>\n";
      } else {
        const ArcGeom g = n.arc_geom(e);
        // The y axis is flipped, so a counterclockwise arc is drawn with sweep flag 0.
        const int large = std::abs(g.sweep) > kPi ? 1 : 0;
        const int sweep = g.sweep > 0.0 ? 0 : 1;
        s += "<path class=\"arc\" d=\"M " + f.x(a.x) + " " + f.y(a.y) + " A " + f.len(g.radius) + " " +
             f.len(g.radius) + " 0 " + std::to_string(large) + " " + std::to_string(sweep) + " " + f.x(b.x) + " " +
             f.y(b.y) + "\"/>\n";
      }
    }
  }
  s += "</g>\n<g id=\"energetic\">\n";
  if (records)
    for (const auto& r : *records)
      if (r.cls == PointClass::Energetic && r.vertex >= 0)
        s += "<circle class=\"en\" cx=\"" + f.x(r.x.x) + "\" cy=\"" + f.y(r.x.y) + "\" r=\"3\"/>\n";
  s += "</g>\n<g id=\"balls\">\n";
  if (records)
    for (const auto& r : *records)
      if (r.cls == PointClass::Energetic && r.vertex >= 0)
        for (const auto& y : r.corresponding)
          s += "<circle class=\"ball\" cx=\"" + f.x(y.y.x) + "\" cy=\"" + f.y(y.y.y) + "\" r=\"" + f.len(scene.r) +
               "\"/>\n";
  s += "</g>\n</svg>\n";
  return s;
}

}  // namespace mdm
