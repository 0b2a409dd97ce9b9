#include "rendezvous/ocp_solver.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "generators.hpp"
#include "ocp_fixtures.hpp"
#include "rendezvous/errors.hpp"
#include "rendezvous/oracles.hpp"

namespace rdv {
namespace {

WaypointForm random_waypoints(Rng& rng, double dwell) {
  WaypointForm w;
  w.origin = Vec2(rng.uniform(-100.0, 100.0), rng.uniform(-100.0, 100.0));
  for (auto& x : w.waypoints) x = Vec2(rng.uniform(-500.0, 500.0), rng.uniform(-500.0, 500.0));
  for (auto& t : w.durations) t = rng.uniform(dwell, 60.0);
  return w;
}

TEST(EliminateVelocities, DifferenceQuotient) {
  WaypointForm w;
  w.origin = Vec2::Zero();
  w.waypoints = {Vec2(10.0, 0.0), Vec2(10.0, 0.0), Vec2(10.0, 0.0), Vec2(10.0, 0.0)};
  w.durations = {2.0, 1.0, 1.0, 1.0};
  const VelocityForm v = eliminate_velocities(w, 1.0);
  EXPECT_EQ(v.velocities[kToPnr], Vec2(5.0, 0.0));
  EXPECT_EQ(v.velocities[kToRendezvous], Vec2::Zero());
}

TEST(EliminateVelocities, AbortSegmentStartsAtPnr) {
  WaypointForm w;
  w.waypoints = {Vec2(10.0, 0.0), Vec2(20.0, 0.0), Vec2(30.0, 0.0), Vec2(10.0, 10.0)};
  w.durations = {1.0, 1.0, 1.0, 2.0};
  EXPECT_EQ(eliminate_velocities(w, 1.0).velocities[kToAbort], Vec2(0.0, 5.0));
}

TEST(EliminateVelocities, DurationBelowDwellIsInputError) {
  WaypointForm w;
  w.durations = {0.5, 1.0, 1.0, 1.0};
  EXPECT_THROW(eliminate_velocities(w, 1.0), InputError);
}

TEST(EliminateVelocities, RoundTripIsIdentity) {
  Rng rng(51);
  for (int i = 0; i < 100; ++i) {
    const WaypointForm w = random_waypoints(rng, 1.0);
    const VelocityForm v = eliminate_velocities(w, 1.0);
    const VelocityForm back = eliminate_velocities(integrate_velocities(v, 1.0), 1.0);
    for (std::size_t k = 0; k < 4; ++k) EXPECT_LE((back.velocities[k] - v.velocities[k]).norm(), 1e-9);
  }
}

TEST(Solve, StationaryDriverMatchesGridOracle) {
  const OcpInputs in = testing::stationary_inputs(150.0, Vec2(60.0, 20.0), 0.05);
  const SolveResult r = solve(in);
  ASSERT_EQ(r.status, SolveStatus::Optimal) << r.message;
  EXPECT_LE((r.plan->waypoints[kToRendezvous] - Vec2(150.0, 150.0)).norm(), 1e-6);
  const oracle::GridResult g = oracle::grid_search(in);
  ASSERT_TRUE(g.feasible);
  EXPECT_LE(r.plan->cost, g.cost + 1e-3);
}

TEST(Solve, DominatesGridOnRandomScenarios) {
  Rng rng(52);
  for (int c = 0; c < 5; ++c) {
    OcpInputs in = testing::stationary_inputs(rng.uniform(100.0, 250.0),
                                              Vec2(rng.uniform(0.0, 300.0), rng.uniform(0.0, 300.0)),
                                              rng.uniform(0.01, 0.3));
    in.t_max = rng.uniform(40.0, 60.0);
    in.dwell = rng.uniform(1.0, 2.0);
    const SolveResult r = solve(in);
    ASSERT_EQ(r.status, SolveStatus::Optimal) << c << ": " << r.message;
    const oracle::GridResult g = oracle::grid_search(in);
    ASSERT_TRUE(g.feasible);
    EXPECT_LE(r.plan->cost, g.cost + 1e-2) << c;
  }
}

TEST(Solve, ZeroVarianceRendezvousLiesOnPath) {
  const OcpInputs in = testing::diagonal_inputs(1.0, 0.0);
  const SolveResult r = solve(in);
  ASSERT_EQ(r.status, SolveStatus::Optimal) << r.message;
  const PositionPrediction p = predict_position(in.posterior, *in.integrals, in.anchor, r.plan->rendezvous_time);
  EXPECT_LE((r.plan->waypoints[kToRendezvous] - in.path->position_at(p.mean)).norm(), 1e-4);
}

TEST(Solve, PlansSatisfyEveryInvariant) {
  for (double gain : {0.9, 1.0, 1.1}) {
    for (double clock : {0.0, 10.0, 20.0}) {
      const OcpInputs in = testing::diagonal_inputs(gain, 1e-3, clock);
      const SolveResult r = solve(in);
      if (r.status == SolveStatus::Infeasible) {
        EXPECT_FALSE(oracle::grid_search(in, 16).feasible) << gain << " " << clock;
        continue;
      }
      ASSERT_EQ(r.status, SolveStatus::Optimal) << gain << " " << clock << ": " << r.message;
      EXPECT_TRUE(check_plan(*r.plan, in).empty());
      const MissionPlan& p = *r.plan;
      const Vec2 x0 = in.start;
      EXPECT_LE((p.waypoints[0] - (x0 + p.velocities[0] * p.durations[0])).norm(), 1e-6);
      EXPECT_LE((p.waypoints[1] - (p.waypoints[0] + p.velocities[1] * p.durations[1])).norm(), 1e-6);
      EXPECT_LE((p.waypoints[2] - (p.waypoints[1] + p.velocities[2] * p.durations[2])).norm(), 1e-6);
      EXPECT_LE((p.waypoints[3] - (p.waypoints[0] + p.velocities[3] * p.durations[3])).norm(), 1e-6);
      for (std::size_t k = 0; k < 4; ++k) {
        EXPECT_LE(p.velocities[k].norm(), in.energy_params.v_max + 1e-9);
        EXPECT_GE(p.durations[k], in.dwell);
      }
      EXPECT_LE(p.rendezvous_branch_energy(), in.energy + 1e-6);
      EXPECT_LE(p.abort_branch_energy(), in.energy + 1e-6);
      EXPECT_TRUE(abort_branch_admissible(p, in.energy, in.t_max, in.energy_params.v_max));
    }
  }
}

TEST(Solve, DecisionWindowShrinksOnceHorizonBinds) {
  OcpInputs in = testing::diagonal_inputs(1.1, 1e-4);
  in.energy = 1e5;
  std::optional<MissionPlan> previous;
  std::optional<double> last_t1;
  int active_steps = 0;
  for (int k = 0; k < 30; ++k) {
    const SolveResult r = solve(in, {}, previous);
    ASSERT_EQ(r.status, SolveStatus::Optimal) << k << ": " << r.message;
    const MissionPlan& p = *r.plan;
    const double t1 = p.durations[kToPnr];
    const bool active = p.rendezvous_branch_duration() >= in.t_max - 1e-4;
    if (active) {
      if (last_t1) {
        EXPECT_LE(t1, *last_t1 + 1e-6) << "clock " << in.clock;
      }
      last_t1 = t1;
      ++active_steps;
    } else {
      last_t1.reset();
    }
    if (t1 <= 1.0) break;
    // Fly one second of the first leg and re-anchor the driver.
    in.start += p.velocities[kToPnr];
    in.energy -= p.energies[kToPnr] / t1;
    in.clock += 1.0;
    in.t_max -= 1.0;
    in.anchor = {in.clock, 11.0 * (in.clock - in.clock * in.clock / 400.0)};
    previous = p;
    previous->origin = in.start;
    previous->origin_clock = in.clock;
    previous->durations[kToPnr] -= 1.0;
  }
  EXPECT_GT(active_steps, 3);
}

TEST(Solve, UnreachableDriverIsInfeasibleOutcome) {
  OcpInputs in = testing::diagonal_inputs(1.0, 0.0);
  in.energy_params.v_max = 1.0;
  const SolveResult r = solve(in);
  EXPECT_EQ(r.status, SolveStatus::Infeasible);
  EXPECT_FALSE(r.message.empty());
}

TEST(Solve, WarmStartReproducesOptimum) {
  const OcpInputs in = testing::diagonal_inputs(1.1, 1e-3, 5.0);
  const SolveResult cold = solve(in);
  ASSERT_EQ(cold.status, SolveStatus::Optimal);
  const SolveResult warm = solve(in, {}, cold.plan);
  ASSERT_EQ(warm.status, SolveStatus::Optimal);
  EXPECT_NEAR(warm.plan->cost, cold.plan->cost, 1e-4);
}

TEST(Solve, TraceCallbackSeesEveryIteration) {
  OcpSettings settings;
  int calls = 0;
  settings.trace = [&](const IterationLog& log) {
    ++calls;
    EXPECT_GE(log.iteration, 1);
    EXPECT_GE(log.max_violation, 0.0);
  };
  const SolveResult r = solve(testing::diagonal_inputs(1.0, 1e-3), settings);
  EXPECT_GT(calls, 0);
  EXPECT_EQ(r.status, SolveStatus::Optimal);
}

TEST(Solve, InvalidInputsNameTheField) {
  OcpInputs in = testing::diagonal_inputs(1.0, 1e-3);
  in.dwell = 0.0;
  try {
    solve(in);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("t_c"), std::string::npos) << e.what();
  }
}

TEST(RendezvousProblem, GradientsMatchFiniteDifferences) {
  Rng rng(53);
  const RendezvousProblem problem(testing::diagonal_inputs(1.1, 1e-2, 10.0));
  int checked = 0;
  while (checked < 20) {
    RendezvousProblem::Vector z;
    z << rng.uniform(200.0, 600.0), rng.uniform(0.0, 400.0), rng.uniform(2.0, 30.0), rng.uniform(2.0, 30.0),
        rng.uniform(2.0, 30.0), rng.uniform(2.0, 30.0);
    ++checked;
    RendezvousProblem::Vector grad;
    problem.cost(z, &grad);
    RendezvousProblem::Jacobian jac;
    problem.constraints(z, &jac);
    constexpr double h = 1e-6;
    for (int k = 0; k < RendezvousProblem::kDim; ++k) {
      RendezvousProblem::Vector up = z, down = z;
      up[k] += h;
      down[k] -= h;
      const double fd = (problem.cost(up) - problem.cost(down)) / (2 * h);
      EXPECT_NEAR(grad[k], fd, 1e-4 * std::max(1.0, std::abs(fd)));
      const Eigen::VectorXd gd = (problem.constraints(up) - problem.constraints(down)) / (2 * h);
      for (int i = 0; i < RendezvousProblem::kConstraintCount; ++i)
        EXPECT_NEAR(jac(i, k), gd[i], 1e-4 * std::max(1.0, std::abs(gd[i])))
            << RendezvousProblem::constraint_name(i) << " d/dz" << k;
    }
  }
}

TEST(RendezvousProblem, EncodeInvertsMakePlan) {
  const RendezvousProblem problem(testing::diagonal_inputs(1.0, 1e-3));
  RendezvousProblem::Vector z;
  z << 400.0, 120.0, 12.0, 6.0, 20.0, 15.0;
  EXPECT_LE((problem.encode(problem.make_plan(z)) - z).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(CheckPlan, FlagsBudgetViolations) {
  const OcpInputs in = testing::diagonal_inputs(1.0, 1e-3);
  const SolveResult r = solve(in);
  ASSERT_EQ(r.status, SolveStatus::Optimal);
  OcpInputs poorer = in;
  poorer.energy = r.plan->abort_branch_energy() - 1.0;
  EXPECT_FALSE(check_plan(*r.plan, poorer).empty());
  EXPECT_FALSE(abort_branch_admissible(*r.plan, poorer.energy, in.t_max, in.energy_params.v_max));
}

}  // namespace
}  // namespace rdv
