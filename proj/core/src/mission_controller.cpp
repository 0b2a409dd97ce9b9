#include "rendezvous/mission_controller.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "rendezvous/errors.hpp"
#include "rendezvous/scenario_config.hpp"

namespace rdv {

namespace {

constexpr double kTimeEps = 1e-9;

Vec2 clip_speed(const Vec2& v, double v_max) {
  const double n = v.norm();
  return n > v_max ? Vec2(v * (v_max / n)) : v;
}

/// Shortest flight time over `dist` whose straight-line energy fits in `energy`.
std::optional<double> affordable_duration(double dist, double energy, const EnergyParams& params) {
  const double budget = energy * (1.0 - 1e-9) / params.mass;
  const double disc = budget * budget - 2.0 * params.hover_constant * dist * dist;
  if (!(budget > 0.0) || disc < 0.0) return std::nullopt;
  return dist * dist / (budget + std::sqrt(disc));
}

void add_event(TickRecord& rec, const char* event) {
  if (!rec.event.empty()) rec.event += ';';
  rec.event += event;
}

}  // namespace

const char* to_string(Phase phase) {
  switch (phase) {
    case Phase::Gathering: return "GATHERING";
    case Phase::CommittedRendezvous: return "COMMITTED_RENDEZVOUS";
    case Phase::CommittedAbort: return "COMMITTED_ABORT";
    case Phase::CompletedSuccess: return "COMPLETED_SUCCESS";
    case Phase::CompletedMiss: return "COMPLETED_MISS";
    case Phase::CompletedAborted: return "COMPLETED_ABORTED";
    case Phase::FailedEnergy: return "FAILED_ENERGY";
  }
  return "?";
}

std::optional<Phase> parse_phase(const std::string& text) {
  for (Phase p : {Phase::Gathering, Phase::CommittedRendezvous, Phase::CommittedAbort, Phase::CompletedSuccess,
                  Phase::CompletedMiss, Phase::CompletedAborted, Phase::FailedEnergy})
    if (text == to_string(p)) return p;
  return std::nullopt;
}

bool is_terminal(Phase phase) noexcept {
  return phase == Phase::CompletedSuccess || phase == Phase::CompletedMiss || phase == Phase::CompletedAborted ||
         phase == Phase::FailedEnergy;
}

const char* to_string(PlanSource source) {
  switch (source) {
    case PlanSource::None: return "none";
    case PlanSource::Fresh: return "fresh";
    case PlanSource::Held: return "held";
    case PlanSource::Committed: return "committed";
  }
  return "?";
}

std::optional<PlanSource> parse_plan_source(const std::string& text) {
  for (PlanSource s : {PlanSource::None, PlanSource::Fresh, PlanSource::Held, PlanSource::Committed})
    if (text == to_string(s)) return s;
  return std::nullopt;
}

MissionSettings MissionSettings::from_config(const ScenarioConfig& c) {
  MissionSettings s;
  s.energy = c.energy;
  s.landing = c.geometry.landing;
  s.abort_site = c.geometry.abort_site;
  s.mission_horizon = c.ocp.t_max;
  s.dwell = c.ocp.t_c;
  s.variance_weight = c.ocp.lambda;
  s.solver.tolerance = c.ocp.tolerance;
  s.solver.max_iterations = c.ocp.max_iterations;
  s.solver.multistart = c.ocp.multistart;
  s.prior = BehaviorPrior::isotropic(c.build_basis().size(), c.behavior.prior_scale, c.regression_noise_variance());
  s.gamma_max = c.risk.gamma_max;
  s.threshold = c.risk.threshold;
  s.abort_trigger = c.risk.abort_trigger;
  s.gamma_a = c.risk.gamma_a;
  s.epsilon = c.mission.epsilon;
  s.sample_time = c.mission.sample_time;
  s.capture_radius = c.mission.capture_radius;
  s.reaim = c.mission.reaim;
  return s;
}

MissionPlan rebase_plan(const MissionPlan& plan, double elapsed, const EnergyParams& params) {
  if (elapsed < 0.0 || elapsed > plan.durations[kToPnr] + kTimeEps)
    throw InputError("cannot rebase a plan past its point of no return");
  MissionPlan out = plan;
  out.origin = plan.origin + plan.velocities[kToPnr] * elapsed;
  out.origin_clock = plan.origin_clock + elapsed;
  out.durations[kToPnr] = std::max(0.0, plan.durations[kToPnr] - elapsed);
  out.energies[kToPnr] = segment_energy(plan.velocities[kToPnr], out.durations[kToPnr], params);
  return out;
}

MissionController::MissionController(MissionSettings settings, std::shared_ptr<const PathModel> path,
                                     std::shared_ptr<const BasisIntegralTable> integrals, UasState initial)
    : settings_(std::move(settings)), path_(std::move(path)), integrals_(std::move(integrals)), uas_(initial) {
  if (!path_) throw ConfigError("path model missing", "path");
  if (!integrals_) throw ConfigError("basis integral table missing", "behavior");
  settings_.energy.validate();
  if (!(settings_.sample_time > 0.0)) throw ConfigError("must be > 0", "mission.sample_time");
  posterior_ = regress(settings_.prior, data_, integrals_->basis());
  anchor_ = PredictionAnchor{uas_.clock, 0.0};
}

void MissionController::learn(const TelemetrySample& sample) {
  const BehaviorSample s{sample.driver_velocity, sample.historical_velocity};
  data_ = append(std::move(data_), s);
  posterior_ = update(posterior_, s, integrals_->basis());
  anchor_ = PredictionAnchor{sample.time, sample.position};
}

OcpInputs MissionController::ocp_inputs() const {
  OcpInputs in;
  in.start = uas_.position;
  in.energy = uas_.energy;
  in.clock = uas_.clock;
  in.posterior = posterior_;
  in.path = path_;
  in.integrals = integrals_;
  in.anchor = anchor_;
  in.landing = settings_.landing;
  in.abort_site = settings_.abort_site;
  in.t_max = settings_.mission_horizon - uas_.clock;
  in.dwell = settings_.dwell;
  in.energy_params = settings_.energy;
  in.variance_weight = settings_.variance_weight;
  return in;
}

PositionPrediction MissionController::predict(double tf) const {
  return predict_position(posterior_, *integrals_, anchor_, tf);
}

void MissionController::commit(CommitDecision decision, TickRecord& rec) {
  const MissionPlan& p = *plan_;
  const double pnr = uas_.clock + p.durations[kToPnr];
  decision_time_ = uas_.clock;
  legs_.clear();
  legs_.push_back({Leg::ToPnr, pnr});
  if (decision == CommitDecision::Proceed) {
    phase_ = Phase::CommittedRendezvous;
    legs_.push_back({Leg::Intercept, p.rendezvous_time});
    legs_.push_back({Leg::Home, p.rendezvous_time + p.durations[kToLanding]});
    aim_ = p.waypoints[kToRendezvous];
    add_event(rec, "commit_rendezvous");
  } else {
    phase_ = Phase::CommittedAbort;
    legs_.push_back({Leg::ToAbort, pnr + p.durations[kToAbort]});
    add_event(rec, "commit_abort");
  }
}

void MissionController::emergency_abort(TickRecord& rec) {
  const double dist = (settings_.abort_site - uas_.position).norm();
  decision_time_ = uas_.clock;
  phase_ = Phase::CommittedAbort;
  legs_.clear();
  legs_.push_back({Leg::ToAbort, uas_.clock + dist / settings_.energy.v_max});
  add_event(rec, "commit_abort_no_plan");
}

Vec2 MissionController::leg_velocity(const Leg& leg, double now) const {
  const double v_max = settings_.energy.v_max;
  const double remaining = leg.end_time - now;
  switch (leg.kind) {
    case Leg::ToPnr: return plan_->velocities[kToPnr];
    case Leg::Intercept: {
      if (remaining <= kTimeEps) return Vec2::Zero();
      return clip_speed((*aim_ - uas_.position) / remaining, v_max);
    }
    case Leg::Home:
    case Leg::ToAbort: {
      const Vec2 target = leg.kind == Leg::Home ? settings_.landing : settings_.abort_site;
      if (remaining <= kTimeEps) return Vec2::Zero();
      return clip_speed((target - uas_.position) / remaining, v_max);
    }
  }
  return Vec2::Zero();
}

void MissionController::move(double duration, const DriverTruth& truth, TickRecord& rec) {
  const double start = uas_.clock;
  const double end = start + duration;
  bool first = true;
  auto record_command = [&](const Vec2& v) {
    if (first) {
      rec.vx = v.x();
      rec.vy = v.y();
      first = false;
    }
  };

  while (!is_terminal(phase_) && uas_.clock < end - kTimeEps) {
    Vec2 v = Vec2::Zero();
    double dt = end - uas_.clock;
    Leg* leg = nullptr;
    if (phase_ == Phase::Gathering) {
      if (plan_) v = plan_->velocities[kToPnr];
    } else {
      leg = &legs_.front();
      if (leg->kind == Leg::Home || leg->kind == Leg::ToAbort) {
        // A clipped speed stretches the leg until the target is actually reached.
        const Vec2 target = leg->kind == Leg::Home ? settings_.landing : settings_.abort_site;
        const double dist = (target - uas_.position).norm();
        leg->end_time = std::max(leg->end_time, uas_.clock + dist / settings_.energy.v_max);
        // Fly slower when the remaining energy cannot cover the scheduled arrival.
        if (const auto t = affordable_duration(dist, uas_.energy, settings_.energy))
          leg->end_time = std::max(leg->end_time, uas_.clock + *t);
      }
      dt = std::min(dt, leg->end_time - uas_.clock);
      v = leg_velocity(*leg, uas_.clock);
    }
    record_command(v);

    if (dt > kTimeEps) {
      const StepResult r = step(uas_, v, settings_.energy, dt);
      uas_ = r.state;
      if (r.depleted) {
        phase_ = Phase::FailedEnergy;
        add_event(rec, "energy_depleted");
        break;
      }
    }
    if (!leg || uas_.clock < leg->end_time - kTimeEps) continue;

    switch (leg->kind) {
      case Leg::ToPnr: break;
      case Leg::Intercept: {
        const double theta = truth.theta + truth.velocity * (uas_.clock - truth.time);
        const double d = (uas_.position - path_->position_unchecked(theta)).norm();
        capture_distance_ = d;
        add_event(rec, d <= settings_.capture_radius ? "capture" : "miss");
        break;
      }
      case Leg::Home:
        uas_.position = settings_.landing;
        phase_ = capture_distance_ && *capture_distance_ <= settings_.capture_radius ? Phase::CompletedSuccess
                                                                                    : Phase::CompletedMiss;
        add_event(rec, "landed");
        break;
      case Leg::ToAbort:
        uas_.position = settings_.abort_site;
        phase_ = Phase::CompletedAborted;
        add_event(rec, "landed");
        break;
    }
    legs_.erase(legs_.begin());
  }
  record_command(Vec2::Zero());
  // Landed or depleted vehicles sit still until the tick ends.
  uas_.clock = end;
}

TickRecord MissionController::tick(const std::optional<TelemetrySample>& sample, const DriverTruth& truth) {
  TickRecord rec;
  rec.tick = ticks_++;
  rec.time = uas_.clock;
  rec.x = uas_.position.x();
  rec.y = uas_.position.y();
  rec.energy = uas_.energy;
  rec.theta_true = truth.theta;
  rec.distance = (uas_.position - path_->position_unchecked(truth.theta)).norm();
  rec.time_budget = settings_.mission_horizon - uas_.clock;
  rec.threshold = settings_.threshold.resolve(uas_.energy);
  rec.solve_status = "skipped";

  if (sample) {
    rec.theta_measured = sample->position;
    rec.velocity_measured = sample->driver_velocity;
    rec.historical_velocity = sample->historical_velocity;
    learn(*sample);
  }

  if (is_terminal(phase_)) {
    rec.phase = phase_;
    move(settings_.sample_time, truth, rec);
    return rec;
  }

  if (phase_ == Phase::Gathering) {
    std::optional<MissionPlan> fresh;
    // The solver needs room for two dwell periods; below that only the held plan remains.
    if (rec.time_budget > 2.0 * settings_.dwell) {
      const auto t0 = std::chrono::steady_clock::now();
      const OcpInputs inputs = ocp_inputs();
      const SolveResult result = solve(inputs, settings_.solver, plan_);
      solve_seconds_.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
      rec.solve_status = to_string(result.status);
      rec.solver_iterations = result.iterations;
      if (result.plan && (result.status == SolveStatus::Optimal || check_plan(*result.plan, inputs).empty()))
        fresh = result.plan;
    }
    if (fresh) {
      plan_ = std::move(fresh);
      rec.plan_source = PlanSource::Fresh;
    } else if (plan_) {
      rec.plan_source = PlanSource::Held;
    }
  } else {
    rec.plan_source = PlanSource::Committed;
  }

  if (plan_) {
    const MissionPlan& p = *plan_;
    rec.t1 = p.durations[kToPnr];
    rec.t2 = p.durations[kToRendezvous];
    rec.t3 = p.durations[kToLanding];
    rec.t4 = p.durations[kToAbort];
    rec.e1 = p.energies[kToPnr];
    rec.e2 = p.energies[kToRendezvous];
    rec.e3 = p.energies[kToLanding];
    rec.e4 = p.energies[kToAbort];
    rec.rendezvous_time = p.rendezvous_time;
    rec.abort_energy = p.abort_branch_energy();
    rec.abort_duration = p.abort_branch_duration();
    if (rec.time <= p.rendezvous_time + kTimeEps && phase_ != Phase::CommittedAbort) {
      const PositionPrediction pred = predict(p.rendezvous_time);
      rec.predicted_theta = pred.mean;
      rec.predicted_variance = rendezvous_variance(pred);
      if (phase_ == Phase::CommittedRendezvous && settings_.reaim) aim_ = path_->position_at(pred.mean);
      if (phase_ == Phase::Gathering) {
        const RiskReport report =
            assess_risk(p, pred, *path_, settings_.energy, settings_.gamma_max, rec.threshold);
        rec.rho_downside = report.rho_downside;
        const double t1 = p.durations[kToPnr];
        if (t1 <= settings_.epsilon || t1 < settings_.sample_time) {
          commit(commit_check(report, rec.threshold), rec);
        } else if (settings_.abort_trigger &&
                   abort_branch_risk(p, pred, *path_, settings_.energy, settings_.gamma_max) > settings_.gamma_a) {
          commit(CommitDecision::Abort, rec);
          add_event(rec, "early_abort");
        }
      }
    }
  } else if (phase_ == Phase::Gathering && rec.time_budget <= 2.0 * settings_.dwell) {
    emergency_abort(rec);
  }

  rec.phase = phase_;
  move(settings_.sample_time, truth, rec);
  if (phase_ == Phase::Gathering && plan_) plan_ = rebase_plan(*plan_, settings_.sample_time, settings_.energy);
  return rec;
}

SafetyAudit persistent_safety_audit(std::span<const TickRecord> trace, double tolerance) {
  SafetyAudit audit;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const TickRecord& r = trace[i];
    if (r.plan_source != PlanSource::Fresh && r.plan_source != PlanSource::Held) continue;
    std::string reason;
    if (!r.abort_energy || !r.abort_duration) reason = "plan in force without an abort branch";
    else if (*r.abort_energy > r.energy + tolerance) reason = "abort branch energy exceeds remaining energy";
    else if (*r.abort_duration > r.time_budget + tolerance) reason = "abort branch exceeds remaining time budget";
    if (!reason.empty()) {
      audit.ok = false;
      audit.first_violation = i;
      audit.reason = reason;
      return audit;
    }
  }
  return audit;
}

}  // namespace rdv
