#include <benchmark/benchmark.h>

#include <memory>

#include "rendezvous/behavior_learner.hpp"
#include "rendezvous/mission_controller.hpp"
#include "rendezvous/ocp_solver.hpp"
#include "rendezvous/rng.hpp"
#include "rendezvous/scenario_config.hpp"
#include "rendezvous/simulator.hpp"

namespace {

rdv::BehaviorDataset dataset(std::size_t n) {
  rdv::Rng rng(1);
  rdv::BehaviorDataset data;
  for (std::size_t i = 0; i < n; ++i) {
    const double h = rng.uniform(0.0, 10.0);
    data = rdv::append(std::move(data), {1.1 * h + rng.normal(0.0, 3.0), h});
  }
  return data;
}

void BM_Regress(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto degree = static_cast<unsigned>(state.range(1));
  const rdv::BasisSpec basis = rdv::BasisSpec::polynomial(degree);
  const rdv::BehaviorPrior prior = rdv::BehaviorPrior::isotropic(basis.size(), 100.0, 9.0);
  const rdv::BehaviorDataset data = dataset(n);
  for (auto _ : state) benchmark::DoNotOptimize(rdv::regress(prior, data, basis));
}
BENCHMARK(BM_Regress)->Args({40, 1})->Args({500, 1})->Args({500, 4});

void BM_RankOneUpdate(benchmark::State& state) {
  const rdv::BasisSpec basis = rdv::BasisSpec::polynomial(static_cast<unsigned>(state.range(0)));
  const rdv::BehaviorPosterior post =
      rdv::regress(rdv::BehaviorPrior::isotropic(basis.size(), 100.0, 9.0), dataset(40), basis);
  for (auto _ : state) benchmark::DoNotOptimize(rdv::update(post, {8.0, 7.5}, basis));
}
BENCHMARK(BM_RankOneUpdate)->Arg(1)->Arg(4);

void BM_Predict(benchmark::State& state) {
  const rdv::PathModel path = rdv::PathModel::paper_diagonal();
  const rdv::BasisSpec basis = rdv::BasisSpec::polynomial(1);
  const rdv::BasisIntegralTable table(path, basis);
  const rdv::BehaviorPosterior post =
      rdv::regress(rdv::BehaviorPrior::isotropic(basis.size(), 100.0, 9.0), dataset(20), basis);
  for (auto _ : state) benchmark::DoNotOptimize(rdv::predict_position(post, table, {20.0, 209.0}, 45.0));
}
BENCHMARK(BM_Predict);

rdv::OcpInputs solve_inputs(double clock) {
  rdv::OcpInputs in;
  in.path = std::make_shared<const rdv::PathModel>(rdv::PathModel::paper_diagonal());
  in.integrals = std::make_shared<const rdv::BasisIntegralTable>(*in.path, rdv::BasisSpec::polynomial(1));
  in.posterior.mean = Eigen::Vector2d(0.0, 1.1);
  in.posterior.covariance = 1e-3 * Eigen::Matrix2d::Identity();
  in.clock = clock;
  in.anchor = {clock, 11.0 * (clock - clock * clock / 400.0)};
  in.start = in.landing = in.abort_site = rdv::Vec2(500.0, 0.0);
  in.energy = 3000.0;
  in.t_max = 80.0 - clock;
  in.dwell = 2.0;
  in.energy_params = {0.5, 5.0, 20.0};
  in.variance_weight = 0.01;
  return in;
}

void BM_SolveCold(benchmark::State& state) {
  const rdv::OcpInputs in = solve_inputs(static_cast<double>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(rdv::solve(in));
}
BENCHMARK(BM_SolveCold)->Arg(0)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_SolveWarm(benchmark::State& state) {
  const rdv::OcpInputs in = solve_inputs(10.0);
  const auto seed = rdv::solve(in).plan;
  for (auto _ : state) benchmark::DoNotOptimize(rdv::solve(in, {}, seed));
}
BENCHMARK(BM_SolveWarm)->Unit(benchmark::kMillisecond);

void BM_Mission(benchmark::State& state) {
  rdv::ScenarioConfig c;
  c.energy = {0.5, 5.0, 20.0};
  c.initial_energy = 3000.0;
  c.ocp.t_max = 80.0;
  c.driver.a = 1.1;
  for (auto _ : state) benchmark::DoNotOptimize(rdv::run_scenario(c, 1));
}
BENCHMARK(BM_Mission)->Unit(benchmark::kMillisecond)->Iterations(3);

}  // namespace

BENCHMARK_MAIN();
