#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "rendezvous/energy_model.hpp"
#include "rendezvous/path_model.hpp"
#include "rendezvous/risk_measures.hpp"

namespace rdv {

struct PathConfig {
  std::string kind = "paper-diagonal";  ///< "paper-diagonal" | "polynomial"
  PathMode mode = PathMode::PaperLiteral;
  std::vector<double> x, y;  ///< polynomial coefficients, ascending
  std::optional<Interval> theta_range;
};

struct ProfileConfig {
  std::string kind = "linear-decay";  ///< "linear-decay" | "polynomial"
  double initial_speed = 10.0;
  double zero_time = 200.0;
  std::vector<double> coefficients;
  Interval t_range{0.0, 200.0};
};

struct BehaviorConfig {
  unsigned basis_degree = 1;
  double prior_scale = 100.0;
  /// Regression noise standard deviation; defaults to the sensor sigma.
  std::optional<double> regression_sigma;
};

struct SensorConfig {
  double sigma = 3.0;
  /// Position noise standard deviation; defaults to sigma / 10.
  std::optional<double> sigma_pos;

  double position_sigma() const { return sigma_pos.value_or(sigma / 10.0); }
};

/// Piecewise-constant behaviour gain: from `time` onwards the driver runs at `a`.
struct GainChange {
  double time = 0.0;
  double a = 1.0;
};

struct DriverConfig {
  double a = 1.0;
  std::vector<GainChange> schedule;
};

struct GeometryConfig {
  Vec2 start{500.0, 0.0};
  Vec2 landing{500.0, 0.0};
  Vec2 abort_site{500.0, 0.0};
};

struct OcpConfig {
  double t_max = 60.0;  ///< mission horizon measured from t = 0, s
  double t_c = 2.0;
  double lambda = 0.01;
  double tolerance = 1e-6;
  int max_iterations = 200;
  int multistart = 3;
};

struct RiskConfig {
  double gamma_max = 2.0;
  RiskThreshold threshold;
  bool abort_trigger = false;
  double gamma_a = 500.0;
};

struct MissionConfig {
  double epsilon = 5.0;
  double sample_time = 1.0;
  double capture_radius = 5.0;
  bool reaim = true;
  double max_duration = 600.0;
};

/// Every knob of a simulated mission. Parsed strictly: unknown keys are errors.
struct ScenarioConfig {
  std::string name = "scenario";
  PathConfig path;
  ProfileConfig profile;
  BehaviorConfig behavior;
  SensorConfig sensor;
  DriverConfig driver;
  EnergyParams energy;
  double initial_energy = 30000.0;
  GeometryConfig geometry;
  OcpConfig ocp;
  RiskConfig risk;
  MissionConfig mission;
  std::uint64_t seed = 1;

  /// Range and consistency checks. Throws ConfigError naming the field path.
  void validate() const;

  PathModel build_path() const;
  BasisSpec build_basis() const;
  double regression_noise_variance() const;
};

ScenarioConfig parse_scenario(const nlohmann::json& doc);
ScenarioConfig parse_scenario_text(const std::string& text);
ScenarioConfig load_scenario(const std::filesystem::path& file);
nlohmann::json to_json(const ScenarioConfig& config);

}  // namespace rdv
