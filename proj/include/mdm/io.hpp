#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mdm/classify.hpp"
#include "mdm/curve.hpp"
#include "mdm/derivative.hpp"
#include "mdm/network.hpp"
#include "mdm/optimizer.hpp"
#include "mdm/steiner.hpp"

namespace mdm {

using Json = nlohmann::json;

struct Scene {
  std::string name;
  std::uint64_t seed = 0;
  CurveSpec curve;
  double r = 1.0;
  std::optional<Network> net;
};

// Doubles are written as the shortest decimal that parses back to the same
// value, so parse(dump(x)) reproduces x bit for bit. Parsers throw ParseError.
Json network_to_json(const Network& net);
Network network_from_json(const Json& j);
Json curve_to_json(const CurveSpec& spec);
CurveSpec curve_from_json(const Json& j);
Json scene_to_json(const Scene& scene);
Scene scene_from_json(const Json& j);

Json parse_json_text(const std::string& text);
Json read_json_file(const std::string& path);
Scene read_scene(const std::string& path);
Network read_network(const std::string& path);
// Throws Error when the file cannot be written.
void write_text_file(const std::string& path, const std::string& text);

std::string format_double(double v);

std::string trace_csv(const OptimizationTrace& trace);

struct SweepRow {
  double R_over_r = 0.0;
  double cell_length = 0.0;
  double advance = 0.0;
  double c = 0.0;
};
std::string sweep_csv(const std::vector<SweepRow>& rows);

Json records_to_json(const std::vector<EnergeticRecord>& records);
Json components_to_json(const std::vector<ComponentReport>& comps);
Json stationarity_to_json(const StationarityReport& rep);
Json validation_to_json(const ValidationReport& rep);
Json structure_to_json(const StructureReport& rep);

// Layers: M (thick), M_r (dotted), the network, energetic-point markers and
// dashed balls of radius r around the corresponding points.
std::string render_svg(const Scene& scene, const std::vector<EnergeticRecord>* records = nullptr,
                       double width_px = 800.0);

}  // namespace mdm
