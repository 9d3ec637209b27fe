#include "ontime/config.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace ontime {
namespace {

const std::string kValid = R"({
  "schema": "ontime.config/1",
  "horizon": {"num_periods": 2, "period_length": 15.0},
  "fleet": {"fleet_size": 3, "capacity": 5},
  "demand": {"kind": "stationary", "locations": [4, 4], "max_quantity": 5},
  "simulation": {"paths": 7, "policies": ["ajrp"]},
  "paper_scale": {"fleet": {"fleet_size": 12}, "demand": {"locations": [16, 16]}}
})";

int error_line(const std::string& text, bool paper = false) {
  try {
    auto c = RunConfig::parse(text, "cfg.json", paper);
    c.setting();
    c.demand();
    c.simulation();
    c.oracle(1, 1);
  } catch (const ConfigError& e) {
    return e.line();
  }
  return 0;
}

std::string replace(std::string s, const std::string& from, const std::string& to) {
  s.replace(s.find(from), from.size(), to);
  return s;
}

TEST(JsonLines, PointersMapToLines) {
  auto lines = json_value_lines("{\n \"a\": [1,\n 2],\n \"b/c\": {\"d\": true}\n}");
  EXPECT_EQ(lines.at(""), 1);
  EXPECT_EQ(lines.at("/a"), 2);
  EXPECT_EQ(lines.at("/a/1"), 3);
  EXPECT_EQ(lines.at("/b~1c/d"), 4);
}

TEST(RunConfig, ReadsSections) {
  auto c = RunConfig::parse(kValid);
  EXPECT_EQ(c.setting().fleet.fleet_size, 3);
  EXPECT_EQ(c.demand().locations, (std::vector<int>{4, 4}));
  EXPECT_EQ(c.simulation().paths, 7);
  EXPECT_EQ(c.simulation().policies, (std::vector<PolicyKind>{PolicyKind::kAjrp}));
  EXPECT_EQ(c.oracle(9, 2).seed, 9u);
  auto paper = RunConfig::parse(kValid, "cfg.json", true);
  EXPECT_EQ(paper.setting().fleet.fleet_size, 12);
  EXPECT_EQ(paper.setting().fleet.capacity, 5);
  EXPECT_EQ(paper.demand().locations, (std::vector<int>{16, 16}));
}

TEST(RunConfig, ErrorsNameTheLine) {
  EXPECT_EQ(error_line(kValid), 0);
  EXPECT_EQ(error_line(replace(kValid, "\"capacity\": 5}", "\"capacity\": 0}")), 4);
  EXPECT_EQ(error_line(replace(kValid, "[4, 4]", "[4, -1]")), 5);
  EXPECT_EQ(error_line(replace(kValid, "[\"ajrp\"]", "[\"greedy\"]")), 6);
  EXPECT_EQ(error_line(replace(kValid, "\"paths\": 7", "\"paths\": \"7\"")), 6);
  EXPECT_EQ(error_line(replace(kValid, "[4, 4]", "[4, 4, 4]")), 5);  // horizon mismatch
  EXPECT_EQ(error_line(replace(kValid, "\"num_periods\": 2,", "\"num_periods\": 2,,")), 3);
  EXPECT_EQ(error_line(replace(kValid, "\"fleet_size\": 12", "\"fleet_size\": -1"), true), 7);
  EXPECT_EQ(error_line(replace(kValid, "ontime.config/1", "other/1")), 2);
}

TEST(RunConfig, MissingDemandPointsAtRoot) {
  auto c = RunConfig::parse("{\n\"schema\": \"ontime.config/1\"\n}");
  try {
    c.demand();
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), 1);
    EXPECT_NE(std::string(e.what()).find("/demand"), std::string::npos);
  }
}

TEST(RunConfig, PathsResolveNextToTheFile) {
  auto c = RunConfig::parse(R"({"schema": "ontime.config/1",
    "bench": {"instances": [{"file": "x.vrp", "class": "P", "vehicles": 8}]}})",
                            "/data/set/cfg.json");
  auto b = c.bench();
  ASSERT_EQ(b.size(), 1u);
  EXPECT_EQ(b[0].file, "/data/set/x.vrp");
  EXPECT_EQ(b[0].cls, MtrpClass::kP);
  EXPECT_EQ(b[0].vehicles, 8);
}

TEST(RunConfig, BundledConfigsLoad) {
  for (const auto& entry : std::filesystem::directory_iterator(ONTIME_DATA_DIR "/bench")) {
    if (entry.path().extension() != ".json") continue;
    SCOPED_TRACE(entry.path().string());
    for (bool paper : {false, true}) {
      auto c = RunConfig::load(entry.path().string(), false);
      if (paper && !c.json().contains("paper_scale")) continue;
      c = RunConfig::load(entry.path().string(), paper);
      EXPECT_NO_THROW(c.setting());
      EXPECT_NO_THROW(c.demand());
      EXPECT_NO_THROW(c.simulation());
    }
  }
}

}  // namespace
}  // namespace ontime
