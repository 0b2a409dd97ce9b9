#include "rendezvous/risk_measures.hpp"

#include <algorithm>
#include <cmath>

#include "rendezvous/errors.hpp"

namespace rdv {

namespace {

double replanned_energy(const MissionPlan& plan, const PathModel& path, const EnergyParams& params, double theta,
                        double t_rendezvous, double t_return) {
  if (!path.theta_domain().contains(theta)) return kUnreachable;
  const Vec2 target = path.position_unchecked(theta);
  const auto leg2 = min_energy_to_reach(plan.waypoints[kToPnr], target, t_rendezvous, params);
  const auto leg3 = min_energy_to_reach(target, plan.waypoints[kToLanding], t_return, params);
  if (!leg2 || !leg3) return kUnreachable;
  return plan.energies[kToPnr] + *leg2 + *leg3;
}

double downside_with_times(const MissionPlan& plan, const PositionPrediction& prediction, const PathModel& path,
                           const EnergyParams& params, double gamma_max, double t_rendezvous, double t_return,
                           EndpointEvaluation* endpoints) {
  if (!(t_rendezvous > 0.0) || !(t_return > 0.0)) throw InputError("downside potential needs positive t2 and t3");
  const double spread = gamma_max * prediction.stddev();
  const double nominal = plan.energies[kToPnr] + plan.energies[kToRendezvous] + plan.energies[kToLanding];
  double worst = 0.0;
  const double thetas[2] = {prediction.mean - spread, prediction.mean + spread};
  for (int k = 0; k < 2; ++k) {
    const double e = replanned_energy(plan, path, params, thetas[k], t_rendezvous, t_return);
    if (endpoints) endpoints[k] = EndpointEvaluation{thetas[k], e};
    worst = std::max(worst, e == kUnreachable ? kUnreachable : std::max(0.0, e - nominal));
  }
  return worst;
}

}  // namespace

double RiskThreshold::resolve(double remaining_energy) const {
  return mode == Mode::Constant ? value : value * remaining_energy;
}

const char* to_string(CommitDecision decision) {
  return decision == CommitDecision::Proceed ? "proceed" : "abort";
}

double rendezvous_variance(const PositionPrediction& prediction) { return prediction.variance; }

double downside_potential(const MissionPlan& plan, const PositionPrediction& prediction, const PathModel& path,
                          const EnergyParams& params, double gamma_max, EndpointEvaluation* endpoints) {
  return downside_with_times(plan, prediction, path, params, gamma_max, plan.durations[kToRendezvous],
                             plan.durations[kToLanding], endpoints);
}

RiskReport assess_risk(const MissionPlan& plan, const PositionPrediction& prediction, const PathModel& path,
                       const EnergyParams& params, double gamma_max, double threshold) {
  RiskReport report;
  report.rho_rendezvous = rendezvous_variance(prediction);
  report.rho_downside = downside_potential(plan, prediction, path, params, gamma_max, report.endpoints.data());
  report.threshold = threshold;
  report.threshold_check = report.rho_downside <= threshold;
  return report;
}

CommitDecision commit_check(const RiskReport& report, double threshold) {
  if (std::isinf(report.rho_downside) || std::isnan(report.rho_downside)) return CommitDecision::Abort;
  return report.rho_downside <= threshold ? CommitDecision::Proceed : CommitDecision::Abort;
}

double abort_branch_risk(const MissionPlan& plan, const PositionPrediction& prediction, const PathModel& path,
                         const EnergyParams& params, double gamma_max) {
  return downside_with_times(plan, prediction, path, params, gamma_max, plan.durations[kToRendezvous],
                             plan.durations[kToAbort], nullptr);
}

}  // namespace rdv
