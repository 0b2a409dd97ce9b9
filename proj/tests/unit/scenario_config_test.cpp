#include "rendezvous/scenario_config.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "rendezvous/errors.hpp"

namespace rdv {
namespace {

std::string field_of(const std::string& text) {
  try {
    parse_scenario_text(text);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "<accepted>";
}

TEST(ScenarioConfig, EmptyDocumentGivesDefaults) {
  const ScenarioConfig c = parse_scenario_text("{}");
  EXPECT_EQ(c.name, "scenario");
  EXPECT_DOUBLE_EQ(c.ocp.t_c, 2.0);
  EXPECT_EQ(c.path.mode, PathMode::PaperLiteral);
}

TEST(ScenarioConfig, ParsesNestedFields) {
  const ScenarioConfig c = parse_scenario_text(
      R"({"name":"x","seed":4,"driver":{"a":1.2,"schedule":[{"time":30,"a":1.5}]},
          "energy":{"mass":0.5,"alpha":5,"v_max":20,"initial_energy":3000},
          "ocp":{"t_max":80,"t_c":2,"lambda":0.02},"risk":{"gamma_max":2,"threshold":150}})");
  EXPECT_EQ(c.name, "x");
  EXPECT_EQ(c.seed, 4u);
  ASSERT_EQ(c.driver.schedule.size(), 1u);
  EXPECT_DOUBLE_EQ(c.driver.schedule[0].a, 1.5);
  EXPECT_DOUBLE_EQ(c.energy.mass, 0.5);
  EXPECT_DOUBLE_EQ(c.initial_energy, 3000.0);
  EXPECT_DOUBLE_EQ(c.ocp.lambda, 0.02);
  EXPECT_DOUBLE_EQ(c.risk.threshold.value, 150.0);
}

TEST(ScenarioConfig, UnknownKeysAreRejected) {
  EXPECT_EQ(field_of(R"({"bogus":1})"), "bogus");
  EXPECT_EQ(field_of(R"({"ocp":{"t_cc":2}})"), "ocp.t_cc");
}

TEST(ScenarioConfig, ZeroDwellNamesFieldAndConstraint) {
  try {
    parse_scenario_text(R"({"ocp":{"t_c":0}})");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "ocp.t_c");
    EXPECT_NE(std::string(e.what()).find("> 0"), std::string::npos) << e.what();
  }
}

TEST(ScenarioConfig, RangeChecksNameTheField) {
  EXPECT_EQ(field_of(R"({"energy":{"mass":-1}})"), "energy.mass");
  EXPECT_EQ(field_of(R"({"sensor":{"sigma":-1}})"), "sensor.sigma");
  EXPECT_EQ(field_of(R"({"ocp":{"t_max":3,"t_c":2}})"), "ocp.t_max");
}

TEST(ScenarioConfig, WrongTypeIsConfigError) { EXPECT_THROW(parse_scenario_text(R"({"ocp":{"t_c":"two"}})"), ConfigError); }

TEST(ScenarioConfig, MalformedJsonIsConfigError) { EXPECT_THROW(parse_scenario_text("{"), ConfigError); }

TEST(ScenarioConfig, JsonRoundTrip) {
  const ScenarioConfig c = parse_scenario_text(
      R"({"name":"rt","driver":{"a":1.3},"sensor":{"sigma":6},"ocp":{"t_max":80},"mission":{"epsilon":4}})");
  const ScenarioConfig back = parse_scenario(to_json(c));
  EXPECT_EQ(to_json(back), to_json(c));
}

TEST(ScenarioConfig, NoiseVarianceFallsBackToSensor) {
  ScenarioConfig c;
  c.sensor.sigma = 3.0;
  EXPECT_DOUBLE_EQ(c.regression_noise_variance(), 9.0);
  c.behavior.regression_sigma = 0.5;
  EXPECT_DOUBLE_EQ(c.regression_noise_variance(), 0.25);
}

}  // namespace
}  // namespace rdv
