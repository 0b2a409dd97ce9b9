#pragma once

#include <Eigen/Core>

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rendezvous/behavior_learner.hpp"
#include "rendezvous/energy_model.hpp"
#include "rendezvous/path_model.hpp"

namespace rdv {

/// Segment indices. Segment i ends at waypoint i.
enum Segment : std::size_t { kToPnr = 0, kToRendezvous = 1, kToLanding = 2, kToAbort = 3 };

/// Everything the planner needs at one mission instant.
struct OcpInputs {
  Vec2 start = Vec2::Zero();  ///< x_0, current UAS position
  double energy = 0.0;        ///< E_r, J
  double clock = 0.0;         ///< mission time of the plan origin, s

  BehaviorPosterior posterior;
  std::shared_ptr<const PathModel> path;
  std::shared_ptr<const BasisIntegralTable> integrals;
  PredictionAnchor anchor;

  Vec2 landing = Vec2::Zero();     ///< S_L
  Vec2 abort_site = Vec2::Zero();  ///< S_A

  double t_max = 0.0;  ///< budget for t1+t2+t3 and t1+t4, s
  double dwell = 0.0;  ///< t_c, lower bound on each segment duration, s
  EnergyParams energy_params;
  double variance_weight = 0.01;  ///< lambda, s per path-unit^2

  /// Throws ConfigError naming the first offending field.
  void validate() const;
};

/// Four waypoints (PNR, rendezvous, landing, abort) joined by constant-velocity segments.
///
/// The abort segment starts at the PNR, the others chain from the plan origin.
struct MissionPlan {
  Vec2 origin = Vec2::Zero();
  double origin_clock = 0.0;
  std::array<Vec2, 4> waypoints{};
  std::array<Vec2, 4> velocities{};
  std::array<double, 4> durations{};
  std::array<double, 4> energies{};
  double rendezvous_time = 0.0;  ///< absolute clock of the planned rendezvous
  double predicted_position = 0.0;
  double predicted_variance = 0.0;
  double cost = 0.0;

  double decision_time() const noexcept { return durations[kToPnr]; }
  double rendezvous_branch_energy() const noexcept { return energies[0] + energies[1] + energies[2]; }
  double abort_branch_energy() const noexcept { return energies[0] + energies[3]; }
  double rendezvous_branch_duration() const noexcept { return durations[0] + durations[1] + durations[2]; }
  double abort_branch_duration() const noexcept { return durations[0] + durations[3]; }
};

/// Waypoint representation of a plan's geometry.
struct WaypointForm {
  Vec2 origin = Vec2::Zero();
  std::array<Vec2, 4> waypoints{};
  std::array<double, 4> durations{};
};

/// Velocity representation of the same geometry.
struct VelocityForm {
  Vec2 origin = Vec2::Zero();
  std::array<Vec2, 4> velocities{};
  std::array<double, 4> durations{};
};

/// v_i = (x_i - x_{i-1}) / t_i, abort segment measured from the PNR.
/// Throws InputError when any duration is below `dwell`.
VelocityForm eliminate_velocities(const WaypointForm& form, double dwell);
/// Inverse of eliminate_velocities.
WaypointForm integrate_velocities(const VelocityForm& form, double dwell);

/// The OCP reduced to six unknowns z = (x1.x, x1.y, t1, t2, t3, t4).
///
/// Velocities are eliminated through the segment dynamics and the rendezvous,
/// landing and abort waypoints are pinned by the terminal constraints, so only
/// inequality constraints g(z) <= 0 remain. Exposed for gradient verification.
class RendezvousProblem {
 public:
  static constexpr int kDim = 6;
  using Vector = Eigen::Matrix<double, kDim, 1>;
  using Jacobian = Eigen::Matrix<double, Eigen::Dynamic, kDim>;

  enum Constraint : int {
    kSpeedPnr,
    kSpeedRendezvous,
    kSpeedLanding,
    kSpeedAbort,
    kTimeRendezvousBranch,
    kTimeAbortBranch,
    kDwellPnr,
    kDwellRendezvous,
    kDwellLanding,
    kDwellAbort,
    kEnergyRendezvousBranch,
    kEnergyAbortBranch,
    kProfileHorizon,
    kPathEnd,
    kPathStart,
    kConstraintCount,
  };

  explicit RendezvousProblem(OcpInputs inputs);

  /// lambda Var[theta_d(T_R)] + t2 + t3 - t1.
  double cost(const Vector& z, Vector* gradient = nullptr) const;
  /// Residuals in natural units (m^2, s, J, path units); feasible iff all <= 0.
  Eigen::VectorXd constraints(const Vector& z, Jacobian* jacobian = nullptr) const;
  static const char* constraint_name(int index);

  MissionPlan make_plan(const Vector& z) const;
  Vector encode(const MissionPlan& plan) const;

  const OcpInputs& inputs() const noexcept { return in_; }

 private:
  struct Eval;
  Eval evaluate(const Vector& z, bool derivatives) const;
  OcpInputs in_;
};

/// One SQP iteration of one start.
struct IterationLog {
  int start = 0;
  int iteration = 0;
  int qp_iterations = 0;
  double cost = 0.0;
  double max_violation = 0.0;
  double stationarity = 0.0;
  double elastic_weight = 0.0;
};

struct OcpSettings {
  double tolerance = 1e-6;
  int max_iterations = 200;  ///< SQP iterations per start
  int multistart = 3;
  std::function<void(const IterationLog&)> trace;
};

enum class SolveStatus { Optimal, Infeasible, NotConverged };
const char* to_string(SolveStatus status);

struct SolveResult {
  SolveStatus status = SolveStatus::Infeasible;
  /// Present for Optimal, and for NotConverged as the best point found.
  std::optional<MissionPlan> plan;
  int iterations = 0;           ///< total interior-point QP iterations over all starts
  double max_violation = 0.0;   ///< natural units, largest positive residual
  double stationarity = 0.0;    ///< projected KKT gradient norm
  std::vector<std::string> violations;
  std::string message;
};

/// Solves the rendezvous OCP. Infeasibility is an outcome, not an exception.
SolveResult solve(const OcpInputs& inputs, const OcpSettings& settings = {},
                  const std::optional<MissionPlan>& warm_start = std::nullopt);

/// Checks every MissionPlan invariant against `inputs` without touching solver internals.
/// Returns one message per violated condition; empty means the plan is admissible.
std::vector<std::string> check_plan(const MissionPlan& plan, const OcpInputs& inputs, double tolerance = 1e-6);

/// The slice of check_plan that guarantees the abort branch stays executable.
bool abort_branch_admissible(const MissionPlan& plan, double energy, double time_budget, double v_max,
                             double tolerance = 1e-6);

}  // namespace rdv
