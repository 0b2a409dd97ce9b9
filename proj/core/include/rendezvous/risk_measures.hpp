#pragma once

#include <array>
#include <limits>

#include "rendezvous/behavior_learner.hpp"
#include "rendezvous/energy_model.hpp"
#include "rendezvous/ocp_solver.hpp"
#include "rendezvous/path_model.hpp"

namespace rdv {

inline constexpr double kUnreachable = std::numeric_limits<double>::infinity();

/// Rendezvous-branch energy if the driver ends up at one confidence endpoint.
struct EndpointEvaluation {
  double theta = 0.0;
  /// E_1 + cheapest replanned legs with t_2, t_3 held; +inf when a leg needs more than v_max.
  double branch_energy = kUnreachable;
};

struct RiskReport {
  double rho_rendezvous = 0.0;  ///< Var[theta_d(T_R)], path units^2
  double rho_downside = 0.0;    ///< J; kUnreachable when the worst endpoint cannot be reached
  std::array<EndpointEvaluation, 2> endpoints{};  ///< lower, upper
  double threshold = 0.0;
  bool threshold_check = false;  ///< rho_downside <= threshold
};

/// How the commit threshold E_risk^max is obtained.
struct RiskThreshold {
  enum class Mode { Constant, FractionOfRemaining };
  Mode mode = Mode::Constant;
  double value = 200.0;  ///< J for Constant, dimensionless fraction otherwise

  double resolve(double remaining_energy) const;
};

enum class CommitDecision { Proceed, Abort };
const char* to_string(CommitDecision decision);

/// Var[theta_d(T_R)]; the single owner of rho_R.
double rendezvous_variance(const PositionPrediction& prediction);

/// Extra energy needed if the driver lands at the worse of theta_mean -/+ gamma_max * stddev.
///
/// Segment times t_2 and t_3 are held at their planned values; the UAS absorbs the
/// deviation with speed. Floored at zero; kUnreachable when either endpoint leg
/// would exceed v_max or the endpoint lies outside the path domain.
/// Throws InputError when t_2 or t_3 is not positive.
double downside_potential(const MissionPlan& plan, const PositionPrediction& prediction, const PathModel& path,
                          const EnergyParams& params, double gamma_max, EndpointEvaluation* endpoints = nullptr);

/// Full report for one plan. `threshold` is already resolved to joules.
RiskReport assess_risk(const MissionPlan& plan, const PositionPrediction& prediction, const PathModel& path,
                       const EnergyParams& params, double gamma_max, double threshold);

/// Proceed iff rho_downside <= E_risk^max (inclusive); an unreachable endpoint always aborts.
CommitDecision commit_check(const RiskReport& report, double threshold);

/// Early-abort stand-in: the downside measure with the return leg timed like the abort leg.
/// Not a normative definition; disabled unless the scenario enables it.
double abort_branch_risk(const MissionPlan& plan, const PositionPrediction& prediction, const PathModel& path,
                         const EnergyParams& params, double gamma_max);

}  // namespace rdv
