#include "rendezvous/run_trace.hpp"

#include <gtest/gtest.h>

#include <limits>
#include <sstream>

#include "rendezvous/rng.hpp"
#include "rendezvous/errors.hpp"

namespace rdv {
namespace {

std::optional<double> maybe(Rng& rng, double lo, double hi) {
  if (rng.uniform() < 0.3) return std::nullopt;
  return rng.uniform(lo, hi);
}

TickRecord random_record(Rng& rng, std::size_t tick) {
  TickRecord r;
  r.tick = tick;
  r.time = static_cast<double>(tick);
  r.phase = static_cast<Phase>(rng.next_u64() % 7);
  r.event = rng.uniform() < 0.2 ? "commit_rendezvous" : "";
  r.x = rng.uniform(-1000.0, 1000.0);
  r.y = rng.uniform(-1000.0, 1000.0);
  r.energy = rng.uniform(0.0, 3000.0);
  r.theta_true = rng.uniform(0.0, 500.0);
  r.theta_measured = maybe(rng, 0.0, 500.0);
  r.velocity_measured = maybe(rng, -5.0, 20.0);
  r.historical_velocity = maybe(rng, 0.0, 10.0);
  r.solve_status = "optimal";
  r.solver_iterations = static_cast<int>(rng.next_u64() % 100);
  r.plan_source = static_cast<PlanSource>(rng.next_u64() % 4);
  r.t1 = maybe(rng, 0.0, 60.0);
  r.t2 = maybe(rng, 0.0, 60.0);
  r.e1 = maybe(rng, 0.0, 1000.0);
  r.predicted_variance = maybe(rng, 0.0, 1e-3);
  r.rho_downside = rng.uniform() < 0.1 ? std::optional<double>(std::numeric_limits<double>::infinity())
                                       : maybe(rng, 0.0, 400.0);
  r.threshold = 200.0;
  r.abort_energy = maybe(rng, 0.0, 2000.0);
  r.abort_duration = maybe(rng, 0.0, 60.0);
  r.time_budget = rng.uniform(0.0, 80.0);
  r.vx = rng.uniform(-20.0, 20.0);
  r.vy = rng.uniform(-20.0, 20.0);
  r.distance = rng.uniform(0.0, 600.0);
  return r;
}

RunTrace random_trace(std::uint64_t seed) {
  Rng rng(seed);
  RunTrace t;
  t.header = {{"format", "rdvsim-trace"}, {"seed", seed}};
  for (std::size_t i = 0; i < 40; ++i) t.rows.push_back(random_record(rng, i));
  t.summary.final_phase = Phase::CompletedSuccess;
  t.summary.decision = "rendezvous";
  t.summary.decision_time = 23.0;
  t.summary.ticks = 40;
  t.summary.final_energy = 123.456789;
  t.summary.capture_distance = 0.123456;
  return t;
}

class TraceRoundTrip : public ::testing::TestWithParam<TraceFormat> {};

TEST_P(TraceRoundTrip, ReadOfWriteIsQuantize) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const RunTrace t = random_trace(seed);
    std::stringstream ss;
    write_trace(ss, t, GetParam());
    const RunTrace back = read_trace(ss);
    ASSERT_EQ(back.rows.size(), t.rows.size());
    for (std::size_t i = 0; i < t.rows.size(); ++i) EXPECT_EQ(back.rows[i], quantize(t.rows[i])) << i;
    EXPECT_EQ(back.summary, quantize(t.summary));
    EXPECT_EQ(back.header, t.header);
  }
}

TEST_P(TraceRoundTrip, WritingIsIdempotentAfterQuantize) {
  const RunTrace t = random_trace(11);
  std::stringstream first, second;
  write_trace(first, t, GetParam());
  write_trace(second, read_trace(first), GetParam());
  EXPECT_EQ(first.str().size(), second.str().size());
  std::stringstream again;
  write_trace(again, t, GetParam());
  EXPECT_EQ(again.str(), second.str());
}

INSTANTIATE_TEST_SUITE_P(Formats, TraceRoundTrip, ::testing::Values(TraceFormat::Csv, TraceFormat::Jsonl));

TEST(Trace, CsvAndJsonlDecodeIdentically) {
  const RunTrace t = random_trace(21);
  std::stringstream csv, jsonl;
  write_trace(csv, t, TraceFormat::Csv);
  write_trace(jsonl, t, TraceFormat::Jsonl);
  const RunTrace a = read_trace(csv), b = read_trace(jsonl);
  EXPECT_EQ(a.rows, b.rows);
  EXPECT_EQ(a.summary, b.summary);
}

TEST(Trace, FormatNames) {
  EXPECT_EQ(parse_trace_format("csv"), TraceFormat::Csv);
  EXPECT_EQ(parse_trace_format("jsonl"), TraceFormat::Jsonl);
  EXPECT_FALSE(parse_trace_format("xml").has_value());
}

TEST(Trace, QuantizeRoundsToThreeDecimals) {
  TickRecord r;
  r.energy = 1.23456;
  r.x = -0.0004;
  EXPECT_DOUBLE_EQ(quantize(r).energy, 1.235);
  EXPECT_EQ(quantize(quantize(r)), quantize(r));
}

TEST(Trace, GarbageInputThrows) {
  std::stringstream ss("not a trace\n");
  EXPECT_THROW(read_trace(ss), Error);
}

}  // namespace
}  // namespace rdv
