#include "rendezvous/energy_model.hpp"

#include <gtest/gtest.h>

#include "rendezvous/errors.hpp"
#include "rendezvous/rng.hpp"

namespace rdv {
namespace {

const EnergyParams kUnit{1.0, 5.0, 15.0};

TEST(Step, CruiseDrainsQuadraticPlusHover) {
  const StepResult r = step(UasState{Vec2::Zero(), 1000.0, 0.0}, Vec2(10.0, 0.0), kUnit, 10.0);
  EXPECT_DOUBLE_EQ(1000.0 - r.state.energy, 550.0);
  EXPECT_EQ(r.state.position, Vec2(100.0, 0.0));
  EXPECT_DOUBLE_EQ(r.state.clock, 10.0);
  EXPECT_FALSE(r.depleted);
}

TEST(Step, HoverCostsAlphaTimesMass) {
  const StepResult r = step(UasState{Vec2::Zero(), 100.0, 0.0}, Vec2::Zero(), kUnit, 1.0);
  EXPECT_DOUBLE_EQ(100.0 - r.state.energy, 5.0);
}

TEST(Step, ManySmallStepsEqualOneSegment) {
  UasState s{Vec2::Zero(), 1e5, 0.0};
  for (int i = 0; i < 100; ++i) s = step(s, Vec2(1.0, 1.0), kUnit, 1.0).state;
  EXPECT_NEAR(1e5 - s.energy, segment_energy(Vec2(1.0, 1.0), 100.0, kUnit), 1e-9);
  const UasState once = step(UasState{Vec2::Zero(), 1e5, 0.0}, Vec2(1.0, 1.0), kUnit, 100.0).state;
  EXPECT_NEAR(s.energy, once.energy, 1e-9);
  EXPECT_NEAR((s.position - once.position).norm(), 0.0, 1e-9);
}

TEST(Step, DepletionIsReportedAndClamped) {
  const StepResult r = step(UasState{Vec2::Zero(), 10.0, 0.0}, Vec2(10.0, 0.0), kUnit, 1.0);
  EXPECT_TRUE(r.depleted);
  EXPECT_EQ(r.state.energy, 0.0);
}

TEST(Step, RejectsBadInputs) {
  const UasState s{Vec2::Zero(), 100.0, 0.0};
  EXPECT_THROW(step(s, Vec2(16.0, 0.0), kUnit, 1.0), InputError);
  EXPECT_THROW(step(s, Vec2::Zero(), kUnit, 0.0), InputError);
}

TEST(Step, EnergyStrictlyDecreases) {
  Rng rng(41);
  UasState s{Vec2::Zero(), 1e6, 0.0};
  for (int i = 0; i < 200; ++i) {
    const double angle = rng.uniform(0.0, 6.283185307179586), speed = rng.uniform(0.0, 15.0);
    const UasState next = step(s, speed * Vec2(std::cos(angle), std::sin(angle)), kUnit, rng.uniform(0.01, 2.0)).state;
    EXPECT_LT(next.energy, s.energy);
    s = next;
  }
}

TEST(SegmentEnergy, Examples) {
  EXPECT_DOUBLE_EQ(segment_energy(Vec2::Zero(), 7.0, kUnit), 35.0);
  EXPECT_DOUBLE_EQ(segment_energy(Vec2(3.0, 4.0), 2.0, kUnit), 35.0);
  EXPECT_THROW(segment_energy(Vec2::Zero(), -1.0, kUnit), InputError);
}

TEST(SegmentEnergy, AtLeastHoverWithEqualityAtRest) {
  Rng rng(42);
  for (int i = 0; i < 200; ++i) {
    const Vec2 v(rng.uniform(-10.0, 10.0), rng.uniform(-10.0, 10.0));
    const double t = rng.uniform(0.1, 50.0);
    EXPECT_GT(segment_energy(v, t, kUnit), kUnit.hover_constant * kUnit.mass * t);
  }
  EXPECT_DOUBLE_EQ(segment_energy(Vec2::Zero(), 3.0, kUnit), kUnit.hover_constant * kUnit.mass * 3.0);
}

TEST(SegmentEnergy, StraightFlightBeatsAnyTwoLegPath) {
  Rng rng(43);
  const EnergyParams fast{1.0, 5.0, 1e9};
  for (int i = 0; i < 1000; ++i) {
    const Vec2 d(rng.uniform(-100.0, 100.0), rng.uniform(-100.0, 100.0));
    const double t = rng.uniform(1.0, 30.0), split = rng.uniform(0.05, 0.95) * t;
    const Vec2 mid(rng.uniform(-100.0, 100.0), rng.uniform(-100.0, 100.0));
    const double direct = segment_energy(d / t, t, fast);
    const double two_leg = segment_energy(mid / split, split, fast) + segment_energy((d - mid) / (t - split), t - split, fast);
    EXPECT_LE(direct, two_leg + 1e-9);
  }
}

TEST(MinEnergyToReach, Examples) {
  EXPECT_DOUBLE_EQ(*min_energy_to_reach(Vec2(3.0, 4.0), Vec2(3.0, 4.0), 10.0, kUnit), 50.0);
  EXPECT_DOUBLE_EQ(*min_energy_to_reach(Vec2::Zero(), Vec2(100.0, 0.0), 10.0, kUnit), 550.0);
  EXPECT_FALSE(min_energy_to_reach(Vec2::Zero(), Vec2(200.0, 0.0), 10.0, kUnit));
  EXPECT_THROW(min_energy_to_reach(Vec2::Zero(), Vec2::Zero(), 0.0, kUnit), InputError);
}

TEST(EnergyParams, ValidateNamesField) {
  EnergyParams p = kUnit;
  p.v_max = 0.0;
  try {
    p.validate();
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "energy.v_max");
  }
}

}  // namespace
}  // namespace rdv
