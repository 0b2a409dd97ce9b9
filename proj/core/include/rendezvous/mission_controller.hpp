#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rendezvous/behavior_learner.hpp"
#include "rendezvous/energy_model.hpp"
#include "rendezvous/ocp_solver.hpp"
#include "rendezvous/path_model.hpp"
#include "rendezvous/risk_measures.hpp"
#include "rendezvous/telemetry.hpp"

namespace rdv {

struct ScenarioConfig;

enum class Phase {
  Gathering,
  CommittedRendezvous,
  CommittedAbort,
  CompletedSuccess,
  /// Rendezvous attempted but the driver was outside the capture radius; the UAS landed anyway.
  CompletedMiss,
  CompletedAborted,
  FailedEnergy,
};

const char* to_string(Phase phase);
std::optional<Phase> parse_phase(const std::string& text);
bool is_terminal(Phase phase) noexcept;

/// Where the plan in force during a tick came from.
enum class PlanSource { None, Fresh, Held, Committed };
const char* to_string(PlanSource source);
std::optional<PlanSource> parse_plan_source(const std::string& text);

struct MissionSettings {
  EnergyParams energy;
  Vec2 landing = Vec2::Zero();
  Vec2 abort_site = Vec2::Zero();

  double mission_horizon = 60.0;  ///< t_max, counted from t = 0
  double dwell = 2.0;             ///< t_c
  double variance_weight = 0.01;  ///< lambda
  OcpSettings solver;

  BehaviorPrior prior;
  double gamma_max = 2.0;
  RiskThreshold threshold;
  bool abort_trigger = false;
  double gamma_a = 500.0;

  double epsilon = 5.0;
  double sample_time = 1.0;
  double capture_radius = 5.0;
  bool reaim = true;

  static MissionSettings from_config(const ScenarioConfig& config);
};

/// Everything that happened in one control tick, flattened for serialisation.
///
/// UAS state and distance are taken at the start of the tick; `phase` and
/// `event` reflect the decisions made during it.
struct TickRecord {
  std::size_t tick = 0;
  double time = 0.0;
  Phase phase = Phase::Gathering;
  std::string event;  ///< empty, or e.g. "commit_rendezvous", "capture", "landed"

  double x = 0.0, y = 0.0;
  double energy = 0.0;
  double theta_true = 0.0;
  std::optional<double> theta_measured;
  std::optional<double> velocity_measured;
  std::optional<double> historical_velocity;

  std::string solve_status;  ///< "optimal" | "infeasible" | "not_converged" | "skipped"
  int solver_iterations = 0;
  PlanSource plan_source = PlanSource::None;

  std::optional<double> t1, t2, t3, t4;
  std::optional<double> e1, e2, e3, e4;  ///< planned segment energies, J
  std::optional<double> rendezvous_time;
  std::optional<double> predicted_theta;
  std::optional<double> predicted_variance;
  std::optional<double> rho_downside;  ///< may be +inf
  double threshold = 0.0;
  std::optional<double> abort_energy;
  std::optional<double> abort_duration;
  double time_budget = 0.0;  ///< t_max - time

  double vx = 0.0, vy = 0.0;  ///< velocity commanded at the start of the tick
  double distance = 0.0;      ///< |UAS - p(theta_true)|

  bool operator==(const TickRecord&) const = default;
};

/// The gather / decide / execute loop for one UAS.
class MissionController {
 public:
  MissionController(MissionSettings settings, std::shared_ptr<const PathModel> path,
                    std::shared_ptr<const BasisIntegralTable> integrals, UasState initial);

  /// Runs one tick of length sample_time starting at the current clock.
  ///
  /// `sample` is the telemetry taken now (nullopt once the driver has stopped);
  /// `truth` is used only to decide whether a capture happened.
  TickRecord tick(const std::optional<TelemetrySample>& sample, const DriverTruth& truth);

  Phase phase() const noexcept { return phase_; }
  const UasState& uas() const noexcept { return uas_; }
  const std::optional<MissionPlan>& plan() const noexcept { return plan_; }
  const BehaviorPosterior& posterior() const noexcept { return posterior_; }
  const BehaviorDataset& dataset() const noexcept { return data_; }
  const MissionSettings& settings() const noexcept { return settings_; }

  std::optional<double> decision_time() const noexcept { return decision_time_; }
  std::optional<double> capture_distance() const noexcept { return capture_distance_; }
  /// Wall-clock seconds per OCP solve, in call order. Not part of any trace.
  const std::vector<double>& solve_seconds() const noexcept { return solve_seconds_; }

 private:
  struct Leg {
    enum Kind { ToPnr, Intercept, Home, ToAbort } kind;
    double end_time;
  };

  void learn(const TelemetrySample& sample);
  OcpInputs ocp_inputs() const;
  PositionPrediction predict(double tf) const;
  void commit(CommitDecision decision, TickRecord& rec);
  Vec2 leg_velocity(const Leg& leg, double now) const;
  void move(double duration, const DriverTruth& truth, TickRecord& rec);
  void emergency_abort(TickRecord& rec);

  MissionSettings settings_;
  std::shared_ptr<const PathModel> path_;
  std::shared_ptr<const BasisIntegralTable> integrals_;
  UasState uas_;
  Phase phase_ = Phase::Gathering;

  BehaviorDataset data_;
  BehaviorPosterior posterior_;
  PredictionAnchor anchor_;

  std::optional<MissionPlan> plan_;
  std::vector<Leg> legs_;
  std::optional<Vec2> aim_;
  std::size_t ticks_ = 0;
  std::optional<double> decision_time_;
  std::optional<double> capture_distance_;
  std::vector<double> solve_seconds_;
};

/// Shifts a plan's origin forward after the UAS flew its first segment for `elapsed` seconds.
MissionPlan rebase_plan(const MissionPlan& plan, double elapsed, const EnergyParams& params);

struct SafetyAudit {
  bool ok = true;
  std::optional<std::size_t> first_violation;
  std::string reason;
};

/// Checks that, on every tick still gathering, the plan in force kept an executable
/// abort branch: its energy fits in E_r and its duration in the remaining budget.
SafetyAudit persistent_safety_audit(std::span<const TickRecord> trace, double tolerance = 1e-6);

}  // namespace rdv
