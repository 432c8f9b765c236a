#include <gtest/gtest.h>

#include <filesystem>

#include "wsntrack/config.hpp"

using namespace wsntrack;

namespace {

int error_line(const std::string& text) {
  try {
    parse_config_string(text);
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}

}  // namespace

TEST(Config, ParsesKeysAndTargets) {
  const auto c = parse_config_string(
      "# scenario\n"
      "seed = 9\n"
      "horizon = 300   # ticks\n"
      "field.width = 200\n"
      "nodes.count = 50\n"
      "nodes.layout = grid\n"
      "noise_sigma = 0.25\n"
      "slaves_per_target = 3\n"
      "mode.piggyback = false\n"
      "failure.schedule = 10:3, 20:4\n"
      "target.1.model = gm\n"
      "target.1.alpha = 0.5\n"
      "target.0.model = rwp\n"
      "target.0.speed_max = 3\n");
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.horizon, 300);
  EXPECT_EQ(c.deployment.bounds.width, 200.0);
  EXPECT_EQ(c.deployment.layout, Layout::Grid);
  EXPECT_EQ(c.protocol.noise_sigma, 0.25);
  EXPECT_EQ(c.protocol.slaves_per_target, 3);
  EXPECT_FALSE(c.piggyback);
  ASSERT_EQ(c.failure_schedule.size(), 2u);
  EXPECT_EQ(c.failure_schedule[1].tick, 20);
  EXPECT_EQ(c.failure_schedule[1].node, 4);
  ASSERT_EQ(c.targets.size(), 2u);
  EXPECT_EQ(c.targets[0].model, MobilityModel::RandomWaypoint);
  EXPECT_EQ(c.targets[0].rwp.speed_max, 3.0);
  EXPECT_EQ(c.targets[1].gm.alpha, 0.5);
}

TEST(Config, SinkDefaultsToFieldCenter) {
  auto c = parse_config_string("field.width = 40\nfield.height = 60\ntx_range = 30\n");
  EXPECT_EQ(c.deployment.sink, (Point2{20, 30}));
  EXPECT_EQ(c.deployment.sink_range, 30.0);
  c = parse_config_string("sink.x = 1\nsink.range = 5\n");
  EXPECT_EQ(c.deployment.sink, (Point2{1, 50}));
  EXPECT_EQ(c.deployment.sink_range, 5.0);
}

TEST(Config, ErrorsNameTheLine) {
  EXPECT_EQ(error_line("seed = 1\nbogus = 2\n"), 2);
  EXPECT_EQ(error_line("seed = 1\n\n# c\nhorizon\n"), 4);
  EXPECT_EQ(error_line("seed = x\n"), 1);
  EXPECT_EQ(error_line("seed = 1\nbad key = 3\n"), 2);
  EXPECT_EQ(error_line("target.0.model = teleport\n"), 1);
  EXPECT_EQ(error_line("nodes.count = 10\nnoise_sigma =\n"), 2);
  EXPECT_EQ(error_line("seed = 1\n"), -1);
  try {
    parse_config_string("a\n");
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.code(), ErrorCode::ConfigParse);
    EXPECT_NE(std::string(e.what()).find("line 1"), std::string::npos);
  }
}

TEST(Config, Overrides) {
  auto c = default_config();
  apply_override(c, "noise_sigma=0.7");
  apply_override(c, " target.0.vx = 1.5 ");
  EXPECT_EQ(c.protocol.noise_sigma, 0.7);
  EXPECT_EQ(c.targets.at(0).velocity.vx, 1.5);
  EXPECT_THROW(apply_override(c, "noise_sigma"), ConfigError);
  EXPECT_THROW(apply_override(c, "nope=1"), ConfigError);
}

TEST(Config, LoadMissingFile) { EXPECT_THROW(load_config("/nonexistent/x.conf"), ConfigError); }

TEST(Config, BundledScenariosValidate) {
  for (const auto& e : std::filesystem::directory_iterator(WSNTRACK_SCENARIO_DIR)) {
    if (e.path().extension() != ".conf") continue;
    SCOPED_TRACE(e.path().string());
    EXPECT_NO_THROW(load_config(e.path().string()).validate());
  }
}
