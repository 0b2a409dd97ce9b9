#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "rendezvous/path_model.hpp"
#include "rendezvous/rng.hpp"
#include "rendezvous/run_trace.hpp"
#include "rendezvous/scenario_config.hpp"
#include "rendezvous/telemetry.hpp"

namespace rdv {

/// Piecewise-constant behaviour gain a(t).
class GainSchedule {
 public:
  explicit GainSchedule(double initial = 1.0) : initial_(initial) {}
  /// Gain `a` from `time` onwards. Times must be added in increasing order.
  GainSchedule& then(double time, double a);
  static GainSchedule from_config(const DriverConfig& config);

  double at(double t) const noexcept;

 private:
  double initial_;
  std::vector<std::pair<double, double>> changes_;
};

/// The ground vehicle and its sensor.
///
/// The driver integrates theta += a(t) * profile(t) * dt with the left endpoint.
/// After the profile ends the driver stops and no further telemetry is produced.
class World {
 public:
  World(std::shared_ptr<const PathModel> path, GainSchedule gain, double velocity_sigma, double position_sigma,
        std::uint64_t seed, double theta0 = 0.0);

  /// Reading at the current clock; nullopt once the profile has ended.
  std::optional<TelemetrySample> observe();
  DriverTruth truth() const;
  void advance(double dt);

  double clock() const noexcept { return clock_; }
  const PathModel& path() const noexcept { return *path_; }

 private:
  double true_velocity(double t) const;

  std::shared_ptr<const PathModel> path_;
  GainSchedule gain_;
  double velocity_sigma_;
  double position_sigma_;
  Rng rng_;
  double clock_ = 0.0;
  double theta_;
};

struct RunResult {
  RunTrace trace;
  /// Wall-clock seconds per OCP solve; kept out of the trace so reruns stay byte-identical.
  std::vector<double> solve_seconds;
};

/// Runs a full mission: world and controller advance in lock-step ticks of
/// mission.sample_time until the controller reaches a terminal phase (one extra
/// row records the final state) or mission.max_duration elapses.
/// `seed` overrides config.seed.
RunResult run_scenario(const ScenarioConfig& config, std::optional<std::uint64_t> seed = std::nullopt);

}  // namespace rdv
