#include "rendezvous/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>

#include "rendezvous/behavior_learner.hpp"
#include "rendezvous/mission_controller.hpp"
#include "rendezvous/ocp_solver.hpp"
#include "rendezvous/oracles.hpp"
#include "rendezvous/risk_measures.hpp"
#include "rendezvous/rng.hpp"
#include "rendezvous/run_trace.hpp"
#include "rendezvous/scenario_config.hpp"
#include "rendezvous/simulator.hpp"

namespace rdv::acceptance {

namespace {

using Clock = std::chrono::steady_clock;

struct Verdict {
  bool passed = false;
  std::string detail;
};

std::string format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

struct Batch {
  std::vector<RunResult> runs;
  double wall_seconds = 0.0;
};

class Context {
 public:
  explicit Context(Options options) : options_(std::move(options)) {}

  const Options& options() const { return options_; }

  const ScenarioConfig& scenario(const std::string& name) {
    auto it = scenarios_.find(name);
    if (it == scenarios_.end())
      it = scenarios_.emplace(name, load_scenario(options_.scenario_dir / (name + ".json"))).first;
    return it->second;
  }

  const Batch& batch(const std::string& name) {
    auto it = batches_.find(name);
    if (it != batches_.end()) return it->second;
    const ScenarioConfig& config = scenario(name);
    Batch b;
    const auto t0 = Clock::now();
    for (int seed = 1; seed <= options_.seeds; ++seed)
      b.runs.push_back(run_scenario(config, static_cast<std::uint64_t>(seed)));
    b.wall_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    return batches_.emplace(name, std::move(b)).first->second;
  }

 private:
  Options options_;
  std::map<std::string, ScenarioConfig> scenarios_;
  std::map<std::string, Batch> batches_;
};

double relative_gap(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).cwiseAbs().maxCoeff() / std::max(1.0, b.cwiseAbs().maxCoeff());
}

std::shared_ptr<const PathModel> diagonal_path() {
  return std::make_shared<const PathModel>(PathModel::paper_diagonal());
}

BehaviorPosterior random_posterior(Rng& rng, const BasisSpec& basis, double a) {
  BehaviorDataset data;
  const int n = 5 + static_cast<int>(rng.uniform() * 30.0);
  for (int i = 0; i < n; ++i) {
    const double h = rng.uniform(1.0, 10.0);
    data = append(std::move(data), {a * h + rng.normal(0.0, 3.0), h});
  }
  return regress(BehaviorPrior::isotropic(basis.size(), 100.0, 9.0), data, basis);
}

/// Inputs on the diagonal road with a learned posterior and generous limits.
OcpInputs random_inputs(Rng& rng) {
  OcpInputs in;
  in.path = diagonal_path();
  in.integrals = std::make_shared<const BasisIntegralTable>(*in.path, BasisSpec::polynomial(1));
  in.posterior = random_posterior(rng, in.integrals->basis(), rng.uniform(0.8, 1.4));
  in.clock = rng.uniform(0.0, 30.0);
  in.anchor = {in.clock, 10.0 * in.clock * (1.0 - in.clock / 400.0)};
  in.start = Vec2(rng.uniform(300.0, 600.0), rng.uniform(0.0, 200.0));
  in.landing = Vec2(500.0, 0.0);
  in.abort_site = Vec2(rng.uniform(400.0, 600.0), rng.uniform(0.0, 100.0));
  in.energy = 1e6;
  in.t_max = 200.0;
  in.dwell = 1.0;
  in.energy_params = {rng.uniform(0.5, 2.0), 5.0, 40.0};
  in.variance_weight = 0.01;
  return in;
}

/// A strictly feasible point of the reduced problem, or nullopt after too many tries.
std::optional<RendezvousProblem::Vector> random_feasible_point(const RendezvousProblem& problem, Rng& rng) {
  const OcpInputs& in = problem.inputs();
  const double v_max = in.energy_params.v_max;
  for (int attempt = 0; attempt < 200; ++attempt) {
    const double t1 = rng.uniform(2.0, 40.0), t2 = rng.uniform(2.0, 40.0);
    const double tr = in.clock + t1 + t2;
    const PositionPrediction p = predict_position(in.posterior, *in.integrals, in.anchor, tr);
    if (!in.path->theta_domain().contains(p.mean)) continue;
    const Vec2 target = in.path->position_at(p.mean);
    const Vec2 x1 = in.start + rng.uniform(0.2, 0.8) * (target - in.start) +
                    Vec2(rng.normal(0.0, 20.0), rng.normal(0.0, 20.0));
    const double t3 = std::max(2.0, (in.landing - target).norm() / v_max * rng.uniform(1.2, 3.0));
    const double t4 = std::max(2.0, (in.abort_site - x1).norm() / v_max * rng.uniform(1.2, 3.0));
    RendezvousProblem::Vector z;
    z << x1.x(), x1.y(), t1, t2, t3, t4;
    if (problem.constraints(z).maxCoeff() < 0.0) return z;
  }
  return std::nullopt;
}

Verdict criterion_scenarios(Context& ctx) {
  const Batch& low = ctx.batch("low_risk");
  const Batch& high = ctx.batch("high_risk");
  auto count = [](const Batch& b, Phase phase, const char* decision) {
    return std::count_if(b.runs.begin(), b.runs.end(), [&](const RunResult& r) {
      return r.trace.summary.final_phase == phase && r.trace.summary.decision == decision;
    });
  };
  const auto success = count(low, Phase::CompletedSuccess, "rendezvous");
  const auto aborted = count(high, Phase::CompletedAborted, "abort");
  double lo = 1e300, hi = -1e300;
  bool all_decided = true;
  for (const Batch* b : {&low, &high})
    for (const auto& r : b->runs) {
      if (!r.trace.summary.decision_time) {
        all_decided = false;
        continue;
      }
      lo = std::min(lo, *r.trace.summary.decision_time);
      hi = std::max(hi, *r.trace.summary.decision_time);
    }
  const int n = ctx.options().seeds;
  const int needed = (n * 18 + 19) / 20;
  const bool times_ok = all_decided && lo >= 10.0 && hi <= 40.0;
  const bool wall_ok = low.wall_seconds <= 60.0 && high.wall_seconds <= 60.0;
  return {success >= needed && aborted >= needed && times_ok && wall_ok,
          format("low_risk success %ld/%d, high_risk aborted %ld/%d, decision times %.1f..%.1f s, "
                 "batch wall %.1f s and %.1f s",
                 static_cast<long>(success), n, static_cast<long>(aborted), n, lo, hi, low.wall_seconds,
                 high.wall_seconds)};
}

Verdict criterion_solver_speed(Context& ctx) {
  std::vector<double> times;
  for (const auto& r : ctx.batch("low_risk").runs) times.insert(times.end(), r.solve_seconds.begin(), r.solve_seconds.end());
  if (times.empty()) return {false, "no solves recorded"};
  std::sort(times.begin(), times.end());
  const double median = times[times.size() / 2];
  return {median <= 0.5, format("median %.1f ms, max %.1f ms over %zu solves", 1e3 * median, 1e3 * times.back(),
                                times.size())};
}

Verdict criterion_regression() {
  Rng rng(301);
  double worst = 0.0;
  for (int c = 0; c < 100; ++c) {
    const unsigned m = 1 + static_cast<unsigned>(rng.uniform() * 5.0);
    const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform() * 500.0);
    const BasisSpec basis = BasisSpec::polynomial(m - 1);
    const double a = rng.uniform(0.5, 1.5), sigma = rng.uniform(0.5, 5.0);
    BehaviorDataset data;
    for (std::size_t i = 0; i < n; ++i) {
      const double h = rng.uniform(0.0, 10.0);
      data = append(std::move(data), {a * h + rng.normal(0.0, sigma), h});
    }
    Eigen::MatrixXd l = Eigen::MatrixXd::Zero(m, m);
    for (unsigned i = 0; i < m; ++i)
      for (unsigned j = 0; j <= i; ++j) l(i, j) = i == j ? rng.uniform(1.0, 10.0) : rng.normal(0.0, 1.0);
    const BehaviorPrior prior{l * l.transpose(), sigma * sigma};
    const BehaviorPosterior post = regress(prior, data, basis);
    const auto o = oracle::dense_regression(prior.covariance, prior.noise_variance, data.driver_velocity,
                                            data.historical_velocity, basis.powers());
    worst = std::max({worst, relative_gap(post.mean, o.mean), relative_gap(post.covariance, o.covariance)});
  }
  return {worst <= 1e-9, format("max relative gap %.2e over 100 datasets", worst)};
}

Verdict criterion_prediction() {
  Rng rng(401);
  double worst = 0.0;
  for (int c = 0; c < 50; ++c) {
    const double v0 = rng.uniform(5.0, 15.0), zero = rng.uniform(100.0, 300.0);
    const bool smooth = c % 5 == 4;
    const VelocityProfile profile =
        smooth ? VelocityProfile([v0, zero](double t) { return v0 * std::exp(-t / zero); }, {0.0, zero})
               : VelocityProfile::linear_decay(v0, zero);
    const PathModel path = PathModel::paper_diagonal(PathMode::PaperLiteral, profile, Interval{-1e5, 1e5});
    const unsigned degree = static_cast<unsigned>(rng.uniform() * 5.0);
    const BasisIntegralTable table(path, BasisSpec::polynomial(degree));
    const Eigen::Index m = degree + 1;
    BehaviorPosterior post;
    post.mean = Eigen::VectorXd::NullaryExpr(m, [&] { return rng.normal(0.0, 1.0) / std::pow(v0, 0.5); });
    Eigen::MatrixXd l = Eigen::MatrixXd::NullaryExpr(m, m, [&] { return rng.normal(0.0, 0.1); });
    post.covariance = l * l.transpose();
    const double t0 = rng.uniform(0.0, zero / 2.0), tf = rng.uniform(t0, zero);
    const PredictionAnchor anchor{t0, rng.uniform(0.0, 500.0)};
    const PositionPrediction p = predict_position(post, table, anchor, tf);
    const Eigen::VectorXd psi = oracle::quadrature_psi([&](double t) { return profile.at(t); },
                                                       table.basis().powers(), t0, tf, 256);
    const double mean = anchor.position + post.mean.dot(psi);
    const double var = psi.dot(post.covariance * psi);
    worst = std::max({worst, std::abs(p.mean - mean) / std::max(1.0, std::abs(mean)),
                      std::abs(p.variance - var) / std::max(1e-300, std::abs(var))});
  }

  const auto path = diagonal_path();
  const BasisIntegralTable table(*path, BasisSpec::polynomial(1));
  BehaviorDataset data;
  for (int t = 0; t < 20; ++t) {
    const double h = path->historical_velocity_at(t);
    data = append(std::move(data), {1.1 * h, h});
  }
  const BehaviorPosterior post = regress(BehaviorPrior::isotropic(2, 100.0, 1e-4), data, table.basis());
  const double mean = predict_position(post, table, {0.0, 0.0}, 20.0).mean;
  const double truth =
      oracle::integrate_position([&](double t) { return 1.1 * path->historical_velocity_at(t); }, 0.0, 0.0, 20.0);
  const bool noise_free_ok = std::abs(mean - 209.0) <= 0.5 && std::abs(mean - truth) <= 0.5;
  return {worst <= 1e-8 && noise_free_ok,
          format("max relative gap %.2e over 50 cases, a=1.1 noise-free mean %.4f (integrated %.4f)", worst, mean,
                 truth)};
}

Verdict criterion_gradients() {
  Rng rng(501);
  constexpr double h = 1e-6;
  double worst = 0.0;
  int points = 0;
  while (points < 50) {
    const RendezvousProblem problem(random_inputs(rng));
    const auto z = random_feasible_point(problem, rng);
    if (!z) continue;
    ++points;
    RendezvousProblem::Vector grad;
    problem.cost(*z, &grad);
    RendezvousProblem::Jacobian jac;
    problem.constraints(*z, &jac);
    for (int k = 0; k < RendezvousProblem::kDim; ++k) {
      RendezvousProblem::Vector up = *z, down = *z;
      up[k] += h;
      down[k] -= h;
      const double fd = (problem.cost(up) - problem.cost(down)) / (2.0 * h);
      worst = std::max(worst, std::abs(grad[k] - fd) / std::max({1.0, std::abs(fd), std::abs(grad[k])}));
      const Eigen::VectorXd gd = (problem.constraints(up) - problem.constraints(down)) / (2.0 * h);
      for (int i = 0; i < RendezvousProblem::kConstraintCount; ++i)
        worst = std::max(worst, std::abs(jac(i, k) - gd[i]) / std::max({1.0, std::abs(gd[i]), std::abs(jac(i, k))}));
    }
  }
  return {worst <= 1e-4, format("max relative error %.2e over 50 feasible points", worst)};
}

Verdict criterion_grid_dominance() {
  Rng rng(601);
  double worst = -1e300;
  std::string failures;
  for (int c = 0; c < 5; ++c) {
    OcpInputs in;
    const Polynomial line{0.0, 1.0};
    in.path = std::make_shared<const PathModel>(line, line, Interval{0.0, 1000.0},
                                                VelocityProfile(Polynomial{0.0}, Interval{0.0, 1000.0}));
    in.integrals = std::make_shared<const BasisIntegralTable>(*in.path, BasisSpec::polynomial(1));
    in.posterior.mean = Eigen::Vector2d::Zero();
    in.posterior.covariance = Eigen::Vector2d(rng.uniform(0.01, 0.3), rng.uniform(0.01, 0.3)).asDiagonal();
    in.anchor = {0.0, rng.uniform(100.0, 250.0)};
    in.start = Vec2(rng.uniform(0.0, 300.0), rng.uniform(0.0, 300.0));
    in.landing = in.abort_site = in.start;
    in.energy = 1e6;
    in.t_max = rng.uniform(40.0, 60.0);
    in.dwell = rng.uniform(1.0, 2.0);
    in.energy_params = {1.0, 5.0, 15.0};
    in.variance_weight = rng.uniform(0.01, 0.1);
    const SolveResult r = solve(in);
    const oracle::GridResult g = oracle::grid_search(in);
    if (r.status != SolveStatus::Optimal || !g.feasible) {
      failures += format(" case %d status %s grid %s;", c, to_string(r.status), g.feasible ? "feasible" : "empty");
      continue;
    }
    worst = std::max(worst, r.plan->cost - g.cost);
  }
  return {failures.empty() && worst <= 1e-2,
          format("max (solver - grid) cost %.4f over 5 scenarios%s", worst, failures.c_str())};
}

Verdict criterion_safety(Context& ctx) {
  std::size_t runs = 0, unsafe = 0, failed = 0;
  std::string first;
  for (const char* name : {"low_risk", "high_risk", "exact_model", "adversarial_switch"}) {
    for (const auto& r : ctx.batch(name).runs) {
      ++runs;
      const SafetyAudit audit = persistent_safety_audit(r.trace.rows);
      if (!audit.ok || !r.trace.summary.safety_ok) {
        ++unsafe;
        if (first.empty()) first = std::string(" first: ") + name + " " + audit.reason;
      }
      if (r.trace.summary.final_phase == Phase::FailedEnergy) ++failed;
    }
  }
  return {unsafe == 0 && failed == 0,
          format("%zu runs, %zu audit failures, %zu FAILED_ENERGY%s", runs, unsafe, failed, first.c_str())};
}

Verdict criterion_risk() {
  Rng rng(801);
  int zero_fail = 0, mono_fail = 0, finite = 0;
  for (int c = 0; c < 100; ++c) {
    OcpInputs in = random_inputs(rng);
    const RendezvousProblem problem(in);
    const auto z = random_feasible_point(problem, rng);
    if (!z) {
      --c;
      continue;
    }
    const MissionPlan plan = problem.make_plan(*z);
    BehaviorPosterior post = in.posterior;
    post.covariance.setZero();
    const PositionPrediction exact = predict_position(post, *in.integrals, in.anchor, plan.rendezvous_time);
    if (!(std::abs(downside_potential(plan, exact, *in.path, in.energy_params, 2.0)) <= 1e-9)) ++zero_fail;

    double previous = 0.0;
    for (double scale : {1.0, 1.5, 2.0, 4.0, 8.0, 16.0}) {
      post.covariance = scale * in.posterior.covariance;
      const PositionPrediction p = predict_position(post, *in.integrals, in.anchor, plan.rendezvous_time);
      const double rho = downside_potential(plan, p, *in.path, in.energy_params, 2.0);
      if (rho < previous - 1e-9) ++mono_fail;
      if (scale == 1.0 && std::isfinite(rho)) ++finite;
      previous = rho;
    }
  }

  double gap = -1e300;
  for (int c = 0; c < 20; ++c) {
    OcpInputs in = random_inputs(rng);
    const RendezvousProblem problem(in);
    const auto z = random_feasible_point(problem, rng);
    if (!z) {
      --c;
      continue;
    }
    const MissionPlan plan = problem.make_plan(*z);
    const PositionPrediction p = predict_position(in.posterior, *in.integrals, in.anchor, plan.rendezvous_time);
    const double rho = downside_potential(plan, p, *in.path, in.energy_params, 2.0);
    if (!std::isfinite(rho)) {
      --c;
      continue;
    }
    const auto& e = in.energy_params;
    const Vec2& x1 = plan.waypoints[kToPnr];
    const double nominal = plan.rendezvous_branch_energy();
    const double spread = 2.0 * p.stddev();
    double sweep = 0.0;
    for (int k = 0; k <= 100; ++k) {
      const Vec2 target = in.path->position_at(p.mean - spread + 2.0 * spread * k / 100.0);
      const double energy = plan.energies[kToPnr] +
                            oracle::straight_energy((target - x1).norm(), plan.durations[kToRendezvous], e.mass,
                                                    e.hover_constant) +
                            oracle::straight_energy((in.landing - target).norm(), plan.durations[kToLanding], e.mass,
                                                    e.hover_constant);
      sweep = std::max(sweep, energy - nominal);
    }
    gap = std::max(gap, sweep - rho);
  }
  return {zero_fail == 0 && mono_fail == 0 && gap <= 1e-9,
          format("zero-variance failures %d/100, monotonicity failures %d/100 (%d finite), sweep gap %.2e over 20",
                 zero_fail, mono_fail, finite, gap)};
}

Verdict criterion_determinism(Context& ctx) {
  int compared = 0, differing = 0;
  for (const char* name : {"low_risk", "adversarial_switch"}) {
    const ScenarioConfig& config = ctx.scenario(name);
    for (const TraceFormat fmt : {TraceFormat::Csv, TraceFormat::Jsonl}) {
      std::string first;
      for (int rep = 0; rep < 2; ++rep) {
        std::ostringstream out;
        write_trace(out, run_scenario(config, 3).trace, fmt);
        if (rep == 0) first = out.str();
        else if (out.str() != first) ++differing;
      }
      ++compared;
    }
  }
  return {differing == 0, format("%d repeated trace pairs, %d differ", compared, differing)};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Verdict(Context&)> check;
};

}  // namespace

std::vector<CriterionResult> run_all(const Options& options, std::ostream& log) {
  Context ctx(options);
  const std::vector<Criterion> criteria = {
      {1, "scenario reproduction", criterion_scenarios},
      {2, "solver speed", criterion_solver_speed},
      {3, "posterior exactness", [](Context&) { return criterion_regression(); }},
      {4, "prediction exactness", [](Context&) { return criterion_prediction(); }},
      {5, "gradient check", [](Context&) { return criterion_gradients(); }},
      {6, "oracle dominance", [](Context&) { return criterion_grid_dominance(); }},
      {7, "persistent safety", criterion_safety},
      {8, "risk properties", [](Context&) { return criterion_risk(); }},
      {9, "determinism", criterion_determinism},
  };
  std::vector<CriterionResult> results;
  for (const auto& c : criteria) {
    if (!options.only.empty() && std::find(options.only.begin(), options.only.end(), c.id) == options.only.end())
      continue;
    Verdict v;
    try {
      v = c.check(ctx);
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    results.push_back({c.id, c.name, v.passed, v.detail});
    log << (v.passed ? "PASS" : "FAIL") << " criterion " << c.id << " " << c.name << ": " << v.detail << std::endl;
  }
  return results;
}

}  // namespace rdv::acceptance
