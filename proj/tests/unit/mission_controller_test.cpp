#include "rendezvous/mission_controller.hpp"

#include <gtest/gtest.h>

#include <limits>

#include "rendezvous/scenario_config.hpp"
#include "rendezvous/simulator.hpp"

namespace rdv {
namespace {

ScenarioConfig calibrated(double a, double sigma) {
  ScenarioConfig c;
  c.sensor.sigma = sigma;
  c.driver.a = a;
  c.energy = {0.5, 5.0, 20.0};
  c.initial_energy = 3000.0;
  c.ocp.t_max = 80.0;
  c.risk.threshold = {RiskThreshold::Mode::Constant, 200.0};
  return c;
}

TEST(Phase, NamesRoundTrip) {
  for (Phase p : {Phase::Gathering, Phase::CommittedRendezvous, Phase::CommittedAbort, Phase::CompletedSuccess,
                  Phase::CompletedMiss, Phase::CompletedAborted, Phase::FailedEnergy})
    EXPECT_EQ(parse_phase(to_string(p)), p);
  EXPECT_STREQ(to_string(Phase::CommittedRendezvous), "COMMITTED_RENDEZVOUS");
  EXPECT_FALSE(parse_phase("committed").has_value());
}

TEST(Phase, TerminalStates) {
  EXPECT_FALSE(is_terminal(Phase::Gathering));
  EXPECT_FALSE(is_terminal(Phase::CommittedRendezvous));
  EXPECT_FALSE(is_terminal(Phase::CommittedAbort));
  EXPECT_TRUE(is_terminal(Phase::CompletedSuccess));
  EXPECT_TRUE(is_terminal(Phase::CompletedMiss));
  EXPECT_TRUE(is_terminal(Phase::CompletedAborted));
  EXPECT_TRUE(is_terminal(Phase::FailedEnergy));
}

TEST(SafetyAudit, AcceptsEmptyAndCommittedRows) {
  EXPECT_TRUE(persistent_safety_audit({}).ok);
  TickRecord r;
  r.plan_source = PlanSource::Committed;
  r.energy = 0.0;
  std::vector<TickRecord> trace{r};
  EXPECT_TRUE(persistent_safety_audit(trace).ok);
}

TEST(SafetyAudit, FlagsFirstViolatingRow) {
  std::vector<TickRecord> trace(4);
  for (auto& r : trace) {
    r.plan_source = PlanSource::Fresh;
    r.energy = 1000.0;
    r.time_budget = 50.0;
    r.abort_energy = 400.0;
    r.abort_duration = 30.0;
  }
  trace[2].abort_energy = 1000.5;
  trace[3].abort_duration = 60.0;
  const SafetyAudit audit = persistent_safety_audit(trace);
  EXPECT_FALSE(audit.ok);
  EXPECT_EQ(audit.first_violation, 2u);
  EXPECT_NE(audit.reason.find("energy"), std::string::npos);
}

TEST(SafetyAudit, FlagsTimeBudgetAndMissingBranch) {
  std::vector<TickRecord> trace(2);
  trace[0].plan_source = PlanSource::Held;
  trace[0].energy = 1000.0;
  trace[0].time_budget = 10.0;
  trace[0].abort_energy = 1.0;
  trace[0].abort_duration = 10.5;
  EXPECT_NE(persistent_safety_audit(trace).reason.find("time"), std::string::npos);
  trace[0].abort_duration = 5.0;
  trace[1].plan_source = PlanSource::Fresh;
  EXPECT_EQ(persistent_safety_audit(trace).first_violation, 1u);
}

TEST(RebasePlan, ShortensFirstLegOnly) {
  MissionPlan p;
  p.origin = Vec2::Zero();
  p.waypoints = {Vec2(100.0, 0.0), Vec2(200.0, 0.0), Vec2(0.0, 0.0), Vec2(0.0, 0.0)};
  p.durations = {10.0, 10.0, 20.0, 10.0};
  p.velocities = {Vec2(10.0, 0.0), Vec2(10.0, 0.0), Vec2(-10.0, 0.0), Vec2(-10.0, 0.0)};
  const EnergyParams e{1.0, 5.0, 15.0};
  for (std::size_t k = 0; k < 4; ++k) p.energies[k] = segment_energy(p.velocities[k], p.durations[k], e);
  const MissionPlan r = rebase_plan(p, 1.0, e);
  EXPECT_LE((r.origin - Vec2(10.0, 0.0)).norm(), 1e-12);
  EXPECT_DOUBLE_EQ(r.durations[kToPnr], 9.0);
  EXPECT_DOUBLE_EQ(r.durations[kToRendezvous], 10.0);
  EXPECT_NEAR(r.energies[kToPnr], segment_energy(Vec2(10.0, 0.0), 9.0, e), 1e-9);
  EXPECT_EQ(r.waypoints, p.waypoints);
}

TEST(Mission, InfiniteEpsilonCommitsOnFirstFeasibleTick) {
  ScenarioConfig c = calibrated(1.1, 3.0);
  c.mission.epsilon = std::numeric_limits<double>::infinity();
  const RunResult r = run_scenario(c, 1);
  const auto& rows = r.trace.rows;
  std::size_t first_plan = rows.size();
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (rows[i].plan_source == PlanSource::Fresh) {
      first_plan = i;
      break;
    }
  ASSERT_LT(first_plan, rows.size());
  EXPECT_NE(rows[first_plan].phase, Phase::Gathering);
  ASSERT_TRUE(r.trace.summary.decision_time.has_value());
  EXPECT_DOUBLE_EQ(*r.trace.summary.decision_time, rows[first_plan].time);
}

TEST(Mission, EveryGatheringRowKeepsAbortBranch) {
  for (double a : {1.1, 1.3}) {
    const RunResult r = run_scenario(calibrated(a, a > 1.2 ? 6.0 : 3.0), 2);
    EXPECT_TRUE(persistent_safety_audit(r.trace.rows).ok) << a;
    EXPECT_TRUE(r.trace.summary.safety_ok);
    EXPECT_NE(r.trace.summary.final_phase, Phase::FailedEnergy);
    EXPECT_TRUE(is_terminal(r.trace.summary.final_phase));
  }
}

TEST(Mission, PhaseSequenceIsMonotone) {
  const RunResult r = run_scenario(calibrated(1.1, 3.0), 4);
  bool left_gathering = false;
  for (const auto& row : r.trace.rows) {
    if (row.phase != Phase::Gathering) left_gathering = true;
    else EXPECT_FALSE(left_gathering) << row.tick;
  }
  EXPECT_TRUE(left_gathering);
}

TEST(Mission, EnergyNeverIncreases) {
  const RunResult r = run_scenario(calibrated(1.1, 3.0), 5);
  for (std::size_t i = 1; i < r.trace.rows.size(); ++i)
    EXPECT_LE(r.trace.rows[i].energy, r.trace.rows[i - 1].energy + 1e-9);
}

TEST(Mission, ClosingWindowForcesAbort) {
  // Tiny horizon: no plan fits two dwell periods, so the controller must head home.
  ScenarioConfig c = calibrated(1.1, 3.0);
  c.ocp.t_max = 30.0;
  c.ocp.t_c = 2.0;
  const RunResult r = run_scenario(c, 1);
  EXPECT_EQ(r.trace.summary.decision, "abort");
  EXPECT_EQ(r.trace.summary.final_phase, Phase::CompletedAborted);
}

}  // namespace
}  // namespace rdv
