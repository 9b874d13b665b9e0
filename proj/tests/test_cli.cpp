#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include "mdm/constructions.hpp"
#include "mdm/io.hpp"

using namespace mdm;

namespace {

namespace fs = std::filesystem;

struct CliRun {
  int code = -1;
  std::string out;
};

CliRun run(const std::string& args) {
  const fs::path out = fs::temp_directory_path() / ("mdm_cli_" + std::to_string(::getpid()) + ".txt");
  const std::string cmd = std::string(MDM_CLI_PATH) + " " + args + " > " + out.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  CliRun r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(out);
  std::stringstream ss;
  ss << in.rdbuf();
  r.out = ss.str();
  fs::remove(out);
  return r;
}

fs::path scratch(const std::string& name, const std::string& text) {
  const fs::path p = fs::temp_directory_path() / ("mdm_cli_" + std::to_string(::getpid()) + "_" + name);
  std::ofstream(p) << text;
  return p;
}

}  // namespace

TEST(Cli, EvaluateHorseshoePasses) {
  const ConvexCurve c = ConvexCurve::circle({0, 0}, 5.0);
  const fs::path p = scratch("hs.json", scene_to_json(Scene{"hs", 0, c.spec(), 1.0, build_horseshoe(c, 1.0).net}).dump());
  const CliRun r = run("evaluate --scene " + p.string());
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("\"pass\": true"), std::string::npos);
  fs::remove(p);
}

TEST(Cli, EvaluateCyclicNetworkFails) {
  const ConvexCurve c = ConvexCurve::circle({0, 0}, 5.0);
  const Network tri({{4, 0}, {-2, 3.4}, {-2, -3.4}}, {Edge::segment(0, 1), Edge::segment(1, 2), Edge::segment(2, 0)});
  const fs::path p = scratch("cyc.json", scene_to_json(Scene{"cyc", 0, c.spec(), 1.0, tri}).dump());
  const CliRun r = run("evaluate --scene " + p.string());
  EXPECT_EQ(r.code, 1) << r.out;
  EXPECT_NE(r.out.find("acyclic"), std::string::npos);
  fs::remove(p);
}

TEST(Cli, MalformedSceneIsInputError) {
  const fs::path p = scratch("bad.json", "{\"curve\": {\"kind\": \"circle\"");
  EXPECT_EQ(run("evaluate --scene " + p.string()).code, 2);
  EXPECT_EQ(run("evaluate --scene /nonexistent.json").code, 2);
  EXPECT_EQ(run("evaluate").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
  fs::remove(p);
}

TEST(Cli, Derive) {
  const CliRun r = run("derive --case 2 --alpha 1.0471975511965976 --beta 1.0471975511965976");
  ASSERT_EQ(r.code, 0) << r.out;
  const Json j = parse_json_text(r.out);
  EXPECT_NEAR(j["derivative"].get<double>(), 0.5, 1e-15);
}

TEST(Cli, ConstructAndRender) {
  const fs::path scene = fs::temp_directory_path() / ("mdm_cli_" + std::to_string(::getpid()) + "_c.json");
  const fs::path svg = fs::temp_directory_path() / ("mdm_cli_" + std::to_string(::getpid()) + "_c.svg");
  ASSERT_EQ(run("construct horseshoe --R 5 --r 1 --out " + scene.string()).code, 0);
  const Scene sc = read_scene(scene.string());
  ASSERT_TRUE(sc.net.has_value());
  EXPECT_NEAR(total_length(*sc.net), 23.984732, 1e-6);
  ASSERT_EQ(run("render --scene " + scene.string() + " --out " + svg.string()).code, 0);
  EXPECT_GT(fs::file_size(svg), 100u);
  fs::remove(scene);
  fs::remove(svg);
}

TEST(Cli, ValidateSteinerTree) {
  const fs::path p = scratch(
      "st.json", "{\"vertices\": [[0,0],[1,0],[0.5,0.8660254037844386],[0.5,0.28867513459481287]], \"edges\": [{\"a\":0,\"b\":3,\"type\":\"seg\"},{\"a\":1,\"b\":3,\"type\":\"seg\"},{\"a\":2,\"b\":3,\"type\":\"seg\"}]}");
  const CliRun r = run("validate --scene " + p.string());
  EXPECT_EQ(r.code, 0) << r.out;
  fs::remove(p);
}

TEST(Cli, ReproduceDerivativeOracle) {
  const CliRun r = run("reproduce derivative-oracle --configs 20");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("PASS derivative-oracle"), std::string::npos);
}
