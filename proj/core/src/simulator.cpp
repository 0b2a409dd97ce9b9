#include "rendezvous/simulator.hpp"

#include "rendezvous/errors.hpp"
#include "rendezvous/scenario_config.hpp"

namespace rdv {

GainSchedule& GainSchedule::then(double time, double a) {
  if (!changes_.empty() && time <= changes_.back().first)
    throw ConfigError("gain changes must be strictly increasing in time", "driver.schedule");
  changes_.emplace_back(time, a);
  return *this;
}

GainSchedule GainSchedule::from_config(const DriverConfig& config) {
  GainSchedule g(config.a);
  for (const auto& c : config.schedule) g.then(c.time, c.a);
  return g;
}

double GainSchedule::at(double t) const noexcept {
  double a = initial_;
  for (const auto& [time, value] : changes_) {
    if (t < time) break;
    a = value;
  }
  return a;
}

World::World(std::shared_ptr<const PathModel> path, GainSchedule gain, double velocity_sigma,
             double position_sigma, std::uint64_t seed, double theta0)
    : path_(std::move(path)),
      gain_(std::move(gain)),
      velocity_sigma_(velocity_sigma),
      position_sigma_(position_sigma),
      rng_(seed),
      theta_(theta0) {
  if (!path_) throw ConfigError("path model missing", "path");
  if (!(velocity_sigma_ >= 0.0)) throw ConfigError("must be >= 0", "sensor.sigma");
  if (!(position_sigma_ >= 0.0)) throw ConfigError("must be >= 0", "sensor.sigma_pos");
}

double World::true_velocity(double t) const {
  if (!path_->time_domain().contains(t)) return 0.0;
  return gain_.at(t) * path_->profile().at(t);
}

std::optional<TelemetrySample> World::observe() {
  // Both variates are drawn unconditionally so the stream does not depend on sigma.
  const double nv = rng_.normal();
  const double np = rng_.normal();
  if (!path_->time_domain().contains(clock_)) return std::nullopt;
  TelemetrySample s;
  s.time = clock_;
  s.historical_velocity = path_->historical_velocity_at(clock_);
  s.driver_velocity = true_velocity(clock_) + velocity_sigma_ * nv;
  s.position = theta_ + position_sigma_ * np;
  return s;
}

DriverTruth World::truth() const { return DriverTruth{clock_, theta_, true_velocity(clock_)}; }

void World::advance(double dt) {
  if (!(dt > 0.0)) throw InputError("world step must be positive");
  theta_ += true_velocity(clock_) * dt;
  clock_ += dt;
}

RunResult run_scenario(const ScenarioConfig& input, std::optional<std::uint64_t> seed) {
  ScenarioConfig config = input;
  if (seed) config.seed = *seed;
  config.validate();

  auto path = std::make_shared<const PathModel>(config.build_path());
  auto integrals = std::make_shared<const BasisIntegralTable>(*path, config.build_basis());
  World world(path, GainSchedule::from_config(config.driver), config.sensor.sigma, config.sensor.position_sigma(),
              config.seed);
  MissionController controller(MissionSettings::from_config(config), path, integrals,
                               UasState{config.geometry.start, config.initial_energy, 0.0});

  RunResult result;
  RunTrace& trace = result.trace;
  trace.header = {{"format", "rdvsim-trace"},
                  {"format_version", 1},
                  {"version", library_version()},
                  {"seed", config.seed},
                  {"scenario", to_json(config)}};

  const double dt = config.mission.sample_time;
  bool timed_out = true;
  while (world.clock() < config.mission.max_duration) {
    const auto sample = world.observe();
    trace.rows.push_back(controller.tick(sample, world.truth()));
    world.advance(dt);
    if (is_terminal(trace.rows.back().phase) || is_terminal(controller.phase())) {
      const auto last = world.observe();
      trace.rows.push_back(controller.tick(last, world.truth()));
      timed_out = false;
      break;
    }
  }

  RunSummary& s = trace.summary;
  s.final_phase = controller.phase();
  s.decision_time = controller.decision_time();
  for (const auto& r : trace.rows) {
    if (r.event.find("commit_rendezvous") != std::string::npos) s.decision = "rendezvous";
    else if (r.event.find("commit_abort") != std::string::npos) s.decision = "abort";
  }
  s.ticks = trace.rows.size();
  s.mission_time = controller.uas().clock;
  s.initial_energy = config.initial_energy;
  s.final_energy = controller.uas().energy;
  s.capture_distance = controller.capture_distance();
  const SafetyAudit audit = persistent_safety_audit(trace.rows);
  s.safety_ok = audit.ok;
  s.first_violation = audit.first_violation;
  s.timed_out = timed_out;
  result.solve_seconds = controller.solve_seconds();
  return result;
}

}  // namespace rdv
