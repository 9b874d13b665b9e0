#include <gtest/gtest.h>

#include <cstring>
#include <random>

#include "mdm/constructions.hpp"
#include "mdm/errors.hpp"
#include "mdm/io.hpp"

using namespace mdm;

namespace {

int count(const std::string& text, const std::string& needle) {
  int n = 0;
  for (std::size_t p = text.find(needle); p != std::string::npos; p = text.find(needle, p + 1)) ++n;
  return n;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

TEST(Io, FormatDoubleRoundTrips) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> U(-1e6, 1e6);
  for (int k = 0; k < 2000; ++k) {
    const double v = k % 3 == 0 ? U(rng) * 1e-12 : U(rng);
    EXPECT_TRUE(same_bits(std::stod(format_double(v)), v)) << format_double(v);
  }
}

TEST(Io, NetworkRoundTripIsBitExact) {
  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> U(-10.0, 10.0);
  std::vector<Point2> v;
  for (int i = 0; i < 6; ++i) v.push_back({U(rng), U(rng)});
  Edge arc = Edge::arc(4, 5, {U(rng), U(rng)}, false);
  arc.all_energetic = true;
  const Network n(v, {Edge::segment(0, 1), Edge::segment(1, 2), Edge::segment(2, 3), Edge::segment(3, 4), arc});
  const Network m = network_from_json(parse_json_text(network_to_json(n).dump()));
  ASSERT_EQ(m.vertex_count(), n.vertex_count());
  for (int i = 0; i < n.vertex_count(); ++i) {
    EXPECT_TRUE(same_bits(m.vertex(i).x, n.vertex(i).x));
    EXPECT_TRUE(same_bits(m.vertex(i).y, n.vertex(i).y));
  }
  ASSERT_EQ(m.edge_count(), n.edge_count());
  const Edge& e = m.edge(4);
  EXPECT_EQ(e.kind, EdgeKind::Arc);
  EXPECT_FALSE(e.ccw);
  EXPECT_TRUE(e.all_energetic);
  EXPECT_TRUE(same_bits(e.center.x, arc.center.x));
}

TEST(Io, SceneRoundTripForEveryCurveKind) {
  std::vector<CurveSpec> specs = {ConvexCurve::circle({1, 2}, 5.0).spec(), ConvexCurve::ellipse({0, 0}, 6.0, 4.0, 512).spec(),
                                  ConvexCurve::stadium({0, 0}, 40.0, 1.76).spec(),
                                  ConvexCurve::rectangle({0, 0}, 16.0, 9.0).spec()};
  std::vector<Point2> pts;
  for (int i = 0; i < 16; ++i) pts.push_back(from_polar(3.0 + 0.1 * std::cos(2.0 * kTwoPi * i / 16), kTwoPi * i / 16));
  specs.push_back(ConvexCurve::sampled(pts, 256).spec());
  for (const CurveSpec& s : specs) {
    Scene sc{"t", 42, s, 0.3, std::nullopt};
    const Scene back = scene_from_json(parse_json_text(scene_to_json(sc).dump()));
    EXPECT_TRUE(back.curve == s) << to_string(s.kind);
    EXPECT_EQ(back.seed, 42u);
    EXPECT_TRUE(same_bits(back.r, 0.3));
    EXPECT_FALSE(back.net.has_value());
  }
}

TEST(Io, MalformedInputIsParseError) {
  EXPECT_THROW(parse_json_text("{\"vertices\": [1, 2"), ParseError);
  EXPECT_THROW(network_from_json(parse_json_text("{\"vertices\": [[0, 0]], \"edges\": [{\"a\": 0, \"b\": 7, \"type\": \"seg\"}]}")), ParseError);
  EXPECT_THROW(network_from_json(parse_json_text("{\"vertices\": \"no\"}")), ParseError);
  EXPECT_THROW(curve_from_json(parse_json_text("{\"kind\": \"triangle\"}")), ParseError);
  EXPECT_THROW(curve_from_json(parse_json_text("{\"kind\": \"circle\", \"center\": [0, 0]}")), ParseError);
  EXPECT_THROW(read_json_file("/nonexistent/scene.json"), ParseError);
}

TEST(Io, TraceCsv) {
  OptimizationTrace t;
  t.entries.push_back({0, 0, 100.0, 3.5, 0.25, 1e-3, 7.0});
  t.entries.push_back({0, 1, 1000.0, 3.25, 0.125, 0.5, 6.0});
  const std::string csv = trace_csv(t);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "iter,length,violation,gradnorm");
  EXPECT_EQ(count(csv, "\n"), 3);
  EXPECT_NE(csv.find("1,3.25,0.125,0.5"), std::string::npos);
}

TEST(Io, SvgLayers) {
  const ConvexCurve c = ConvexCurve::circle({0, 0}, 5.0);
  const Horseshoe h = build_horseshoe(c, 1.0);
  const std::string svg = render_svg(Scene{"horseshoe", 0, c.spec(), 1.0, h.net});
  EXPECT_EQ(count(svg, "<path class=\"arc\""), 1);
  EXPECT_EQ(count(svg, "<line class=\"seg\""), 2);
  EXPECT_NE(svg.find("<svg"), std::string::npos);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);

  const RectangleNet R = build_rectangle_net(16.0, 9.0, 0.25, false);
  const std::string rs = render_svg(Scene{"rect", 0, ConvexCurve::rectangle({0, 0}, 16, 9).spec(), 0.25, R.net});
  EXPECT_EQ(count(rs, "<line class=\"seg\""), 21);
}
