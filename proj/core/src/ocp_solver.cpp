#include "rendezvous/ocp_solver.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "rendezvous/errors.hpp"

namespace rdv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool finite_vec(const Vec2& v) { return std::isfinite(v.x()) && std::isfinite(v.y()); }

}  // namespace

void OcpInputs::validate() const {
  if (!path) throw ConfigError("path model missing", "ocp.path");
  if (!integrals) throw ConfigError("basis integral table missing", "ocp.integrals");
  energy_params.validate();
  if (!finite_vec(start)) throw ConfigError("must be finite", "ocp.start");
  if (!finite_vec(landing)) throw ConfigError("must be finite", "geometry.landing");
  if (!finite_vec(abort_site)) throw ConfigError("must be finite", "geometry.abort");
  if (!std::isfinite(energy) || energy < 0.0) throw ConfigError("must be >= 0", "ocp.energy");
  if (!(dwell > 0.0)) throw ConfigError("must be > 0", "ocp.t_c");
  if (!(t_max > 2.0 * dwell)) throw ConfigError("must exceed 2 * t_c", "ocp.t_max");
  if (!(variance_weight >= 0.0) || !std::isfinite(variance_weight)) throw ConfigError("must be >= 0", "ocp.lambda");
  if (posterior.mean.size() != static_cast<Eigen::Index>(integrals->basis().size()))
    throw ConfigError("posterior dimension does not match basis", "ocp.posterior");
  if (anchor.time > clock + 1e-9) throw ConfigError("anchor time lies in the future", "ocp.anchor");
}

// ---------------------------------------------------------------------------
// Velocity elimination

VelocityForm eliminate_velocities(const WaypointForm& form, double dwell) {
  VelocityForm out;
  out.origin = form.origin;
  out.durations = form.durations;
  for (std::size_t i = 0; i < 4; ++i)
    if (!(form.durations[i] >= dwell)) throw InputError("segment " + std::to_string(i + 1) + " shorter than dwell time");
  const std::array<Vec2, 4> from{form.origin, form.waypoints[0], form.waypoints[1], form.waypoints[0]};
  for (std::size_t i = 0; i < 4; ++i) out.velocities[i] = (form.waypoints[i] - from[i]) / form.durations[i];
  return out;
}

WaypointForm integrate_velocities(const VelocityForm& form, double dwell) {
  WaypointForm out;
  out.origin = form.origin;
  out.durations = form.durations;
  for (std::size_t i = 0; i < 4; ++i)
    if (!(form.durations[i] >= dwell)) throw InputError("segment " + std::to_string(i + 1) + " shorter than dwell time");
  out.waypoints[0] = form.origin + form.velocities[0] * form.durations[0];
  out.waypoints[1] = out.waypoints[0] + form.velocities[1] * form.durations[1];
  out.waypoints[2] = out.waypoints[1] + form.velocities[2] * form.durations[2];
  out.waypoints[3] = out.waypoints[0] + form.velocities[3] * form.durations[3];
  return out;
}

// ---------------------------------------------------------------------------
// Reduced problem

struct RendezvousProblem::Eval {
  double t[4];
  Vec2 x1, x2;
  Vec2 delta[4];
  double energy[4];
  PredictionJet jet;
  Vec2 x2_rate;  // d x2 / d T_R
  double rendezvous_time;
};

RendezvousProblem::RendezvousProblem(OcpInputs inputs) : in_(std::move(inputs)) { in_.validate(); }

RendezvousProblem::Eval RendezvousProblem::evaluate(const Vector& z, bool derivatives) const {
  Eval e;
  e.x1 = Vec2(z[0], z[1]);
  for (int i = 0; i < 4; ++i) e.t[i] = z[2 + i];
  e.rendezvous_time = in_.clock + e.t[0] + e.t[1];
  e.jet = predict_position_jet(in_.posterior, *in_.integrals, in_.anchor, e.rendezvous_time);
  e.x2 = in_.path->position_unchecked(e.jet.mean);
  e.x2_rate = derivatives ? Vec2(in_.path->tangent_at(e.jet.mean) * e.jet.mean_rate) : Vec2::Zero();
  e.delta[0] = e.x1 - in_.start;
  e.delta[1] = e.x2 - e.x1;
  e.delta[2] = in_.landing - e.x2;
  e.delta[3] = in_.abort_site - e.x1;
  const double m = in_.energy_params.mass;
  const double alpha = in_.energy_params.hover_constant;
  for (int i = 0; i < 4; ++i) e.energy[i] = m * e.delta[i].squaredNorm() / (2.0 * e.t[i]) + alpha * m * e.t[i];
  return e;
}

double RendezvousProblem::cost(const Vector& z, Vector* gradient) const {
  const Eval e = evaluate(z, gradient != nullptr);
  const double lambda = in_.variance_weight;
  if (gradient) {
    gradient->setZero();
    (*gradient)[2] = lambda * e.jet.variance_rate - 1.0;
    (*gradient)[3] = lambda * e.jet.variance_rate + 1.0;
    (*gradient)[4] = 1.0;
  }
  return lambda * e.jet.variance + e.t[1] + e.t[2] - e.t[0];
}

Eigen::VectorXd RendezvousProblem::constraints(const Vector& z, Jacobian* jacobian) const {
  const Eval e = evaluate(z, jacobian != nullptr);
  const double v2 = in_.energy_params.v_max * in_.energy_params.v_max;
  const double m = in_.energy_params.mass;
  const double alpha = in_.energy_params.hover_constant;
  const auto& dom = in_.path->theta_domain();

  Eigen::VectorXd g(kConstraintCount);
  for (int i = 0; i < 4; ++i) g[kSpeedPnr + i] = e.delta[i].squaredNorm() - v2 * e.t[i] * e.t[i];
  g[kTimeRendezvousBranch] = e.t[0] + e.t[1] + e.t[2] - in_.t_max;
  g[kTimeAbortBranch] = e.t[0] + e.t[3] - in_.t_max;
  for (int i = 0; i < 4; ++i) g[kDwellPnr + i] = in_.dwell - e.t[i];
  g[kEnergyRendezvousBranch] = e.energy[0] + e.energy[1] + e.energy[2] - in_.energy;
  g[kEnergyAbortBranch] = e.energy[0] + e.energy[3] - in_.energy;
  g[kProfileHorizon] = e.rendezvous_time - in_.integrals->time_domain().hi;
  g[kPathEnd] = e.jet.mean - dom.hi;
  g[kPathStart] = dom.lo - e.jet.mean;

  if (jacobian) {
    Jacobian& J = *jacobian;
    J.setZero(kConstraintCount, kDim);
    const Vec2& q = e.x2_rate;
    // Speed residuals |delta|^2 - v^2 t^2.
    J.block<1, 2>(kSpeedPnr, 0) = 2.0 * e.delta[0].transpose();
    J(kSpeedPnr, 2) = -2.0 * v2 * e.t[0];
    J.block<1, 2>(kSpeedRendezvous, 0) = -2.0 * e.delta[1].transpose();
    J(kSpeedRendezvous, 2) = 2.0 * e.delta[1].dot(q);
    J(kSpeedRendezvous, 3) = 2.0 * e.delta[1].dot(q) - 2.0 * v2 * e.t[1];
    J(kSpeedLanding, 2) = -2.0 * e.delta[2].dot(q);
    J(kSpeedLanding, 3) = -2.0 * e.delta[2].dot(q);
    J(kSpeedLanding, 4) = -2.0 * v2 * e.t[2];
    J.block<1, 2>(kSpeedAbort, 0) = -2.0 * e.delta[3].transpose();
    J(kSpeedAbort, 5) = -2.0 * v2 * e.t[3];

    J(kTimeRendezvousBranch, 2) = J(kTimeRendezvousBranch, 3) = J(kTimeRendezvousBranch, 4) = 1.0;
    J(kTimeAbortBranch, 2) = J(kTimeAbortBranch, 5) = 1.0;
    for (int i = 0; i < 4; ++i) J(kDwellPnr + i, 2 + i) = -1.0;

    // Energy terms: dE/d delta = m delta / t, dE/dt (explicit) = alpha m - m |delta|^2 / (2 t^2).
    double explicit_t[4];
    Vec2 by_delta[4];
    for (int i = 0; i < 4; ++i) {
      explicit_t[i] = alpha * m - m * e.delta[i].squaredNorm() / (2.0 * e.t[i] * e.t[i]);
      by_delta[i] = m * e.delta[i] / e.t[i];
    }
    Eigen::Matrix<double, 1, kDim> dE[4];
    for (auto& row : dE) row.setZero();
    dE[0].head<2>() = by_delta[0].transpose();
    dE[0][2] = explicit_t[0];
    dE[1].head<2>() = -by_delta[1].transpose();
    dE[1][2] = by_delta[1].dot(q);
    dE[1][3] = by_delta[1].dot(q) + explicit_t[1];
    dE[2][2] = -by_delta[2].dot(q);
    dE[2][3] = -by_delta[2].dot(q);
    dE[2][4] = explicit_t[2];
    dE[3].head<2>() = -by_delta[3].transpose();
    dE[3][5] = explicit_t[3];
    J.row(kEnergyRendezvousBranch) = dE[0] + dE[1] + dE[2];
    J.row(kEnergyAbortBranch) = dE[0] + dE[3];

    J(kProfileHorizon, 2) = J(kProfileHorizon, 3) = 1.0;
    J(kPathEnd, 2) = J(kPathEnd, 3) = e.jet.mean_rate;
    J(kPathStart, 2) = J(kPathStart, 3) = -e.jet.mean_rate;
  }
  return g;
}

const char* RendezvousProblem::constraint_name(int index) {
  static constexpr const char* kNames[kConstraintCount] = {
      "speed_pnr",         "speed_rendezvous",  "speed_landing",   "speed_abort",
      "time_rendezvous",   "time_abort",        "dwell_pnr",       "dwell_rendezvous",
      "dwell_landing",     "dwell_abort",       "energy_rendezvous", "energy_abort",
      "profile_horizon",   "path_end",          "path_start"};
  return (index >= 0 && index < kConstraintCount) ? kNames[index] : "unknown";
}

MissionPlan RendezvousProblem::make_plan(const Vector& z) const {
  const Eval e = evaluate(z, false);
  MissionPlan plan;
  plan.origin = in_.start;
  plan.origin_clock = in_.clock;
  plan.waypoints = {e.x1, e.x2, in_.landing, in_.abort_site};
  for (std::size_t i = 0; i < 4; ++i) {
    plan.durations[i] = e.t[i];
    plan.velocities[i] = e.delta[i] / e.t[i];
    plan.energies[i] = segment_energy(plan.velocities[i], e.t[i], in_.energy_params);
  }
  plan.rendezvous_time = e.rendezvous_time;
  plan.predicted_position = e.jet.mean;
  plan.predicted_variance = std::max(0.0, e.jet.variance);
  plan.cost = cost(z);
  return plan;
}

RendezvousProblem::Vector RendezvousProblem::encode(const MissionPlan& plan) const {
  Vector z;
  z << plan.waypoints[0].x(), plan.waypoints[0].y(), plan.durations[0], plan.durations[1], plan.durations[2],
      plan.durations[3];
  return z;
}

// ---------------------------------------------------------------------------
// Solver

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::NotConverged: return "not_converged";
  }
  return "unknown";
}

namespace {

using Vector = RendezvousProblem::Vector;
using Jacobian = RendezvousProblem::Jacobian;

// Margins that keep the returned plan strictly inside the published tolerances.
constexpr double kSpeedMargin = 1e-7;   // relative
constexpr double kTimeMargin = 1e-7;    // s
constexpr double kEnergyMargin = 1e-5;  // J
constexpr double kInfeasibleViolation = 1e-3;

bool is_bound(int index) {
  return index >= RendezvousProblem::kDwellPnr && index <= RendezvousProblem::kDwellAbort;
}

/// Dense primal-dual interior-point method for  min 1/2 y'Hy + h'y  s.t.  A y <= b.
/// H must be positive definite. Mehrotra predictor-corrector.
struct QpSolution {
  Eigen::VectorXd y;
  Eigen::VectorXd z;  // multipliers of A y <= b
  int iterations = 0;
  bool converged = false;
};

QpSolution solve_qp(const Eigen::MatrixXd& H, const Eigen::VectorXd& h, const Eigen::MatrixXd& A,
                    const Eigen::VectorXd& b) {
  const Eigen::Index n = H.rows(), m = A.rows();
  QpSolution out;
  out.y = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd s = (b - A * out.y).cwiseMax(1.0);
  out.z = Eigen::VectorXd::Ones(m);
  auto max_step = [](const Eigen::VectorXd& v, const Eigen::VectorXd& dv) {
    double a = 1.0;
    for (Eigen::Index i = 0; i < v.size(); ++i)
      if (dv[i] < 0.0) a = std::min(a, -v[i] / dv[i]);
    return a;
  };
  const double hscale = 1.0 + h.lpNorm<Eigen::Infinity>();
  const double bscale = 1.0 + b.lpNorm<Eigen::Infinity>();
  for (out.iterations = 0; out.iterations < 80; ++out.iterations) {
    const Eigen::VectorXd rd = H * out.y + h + A.transpose() * out.z;
    const Eigen::VectorXd rp = A * out.y + s - b;
    const double mu = s.dot(out.z) / static_cast<double>(m);
    if (rd.lpNorm<Eigen::Infinity>() <= 1e-11 * hscale && rp.lpNorm<Eigen::Infinity>() <= 1e-11 * bscale &&
        mu <= 1e-13) {
      out.converged = true;
      break;
    }
    const Eigen::VectorXd w = out.z.cwiseQuotient(s);
    const Eigen::MatrixXd K = H + A.transpose() * w.asDiagonal() * A;
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(K);
    auto direction = [&](const Eigen::VectorXd& rc, Eigen::VectorXd& dy, Eigen::VectorXd& ds, Eigen::VectorXd& dz) {
      const Eigen::VectorXd t = (out.z.cwiseProduct(rp) - rc).cwiseQuotient(s);
      dy = ldlt.solve(-rd - A.transpose() * t);
      ds = -rp - A * dy;
      dz = (-rc - out.z.cwiseProduct(ds)).cwiseQuotient(s);
    };
    Eigen::VectorXd dy, ds, dz;
    const Eigen::VectorXd sz = s.cwiseProduct(out.z);
    direction(sz, dy, ds, dz);
    const double a_aff = std::min(max_step(s, ds), max_step(out.z, dz));
    const double mu_aff = (s + a_aff * ds).dot(out.z + a_aff * dz) / static_cast<double>(m);
    const double sigma = std::pow(mu_aff / mu, 3.0);
    const Eigen::VectorXd rc = sz + ds.cwiseProduct(dz) - Eigen::VectorXd::Constant(m, sigma * mu);
    direction(rc, dy, ds, dz);
    const double a = std::min(1.0, 0.995 * std::min(max_step(s, ds), max_step(out.z, dz)));
    out.y += a * dy;
    s += a * ds;
    out.z += a * dz;
    s = s.cwiseMax(1e-300);
    out.z = out.z.cwiseMax(1e-300);
  }
  return out;
}

/// Sequential quadratic programming over internally scaled variables.
///
/// Internal variables: u = (x1 / v_max, t1..t4), all in seconds. Each iteration
/// solves an elastic QP (linearised constraints may be violated at a linear
/// penalty) with a damped-BFGS Hessian of the Lagrangian, then backtracks on the
/// l1 merit function. Dwell bounds stay exact in every subproblem.
class Sqp {
 public:
  Sqp(const RendezvousProblem& problem, const OcpSettings& settings) : problem_(problem), settings_(settings) {
    const auto& in = problem.inputs();
    const double v = in.energy_params.v_max;
    var_scale_ << v, v, 1.0, 1.0, 1.0, 1.0;
    lower_ << -kInf, -kInf, in.dwell, in.dwell, in.dwell, in.dwell;
    scale_ = Eigen::VectorXd::Ones(RendezvousProblem::kConstraintCount);
    for (int i = 0; i < 4; ++i) scale_[RendezvousProblem::kSpeedPnr + i] = 1.0 / (10.0 * v * v);
    const double hover = in.energy_params.hover_constant * in.energy_params.mass;
    scale_[RendezvousProblem::kEnergyRendezvousBranch] = 1.0 / (10.0 * hover);
    scale_[RendezvousProblem::kEnergyAbortBranch] = 1.0 / (10.0 * hover);
    scale_[RendezvousProblem::kPathEnd] = 0.1;
    scale_[RendezvousProblem::kPathStart] = 0.1;
    for (int i = 0; i < RendezvousProblem::kConstraintCount; ++i)
      if (!is_bound(i)) rows_.push_back(i);
  }

  struct Outcome {
    Vector z;
    double violation = kInf;     // scaled
    double stationarity = kInf;  // relative KKT residual
    int inner_iterations = 0;
    bool converged = false;
  };

  Outcome run(Vector z0, int start_index) const {
    using Mat = Eigen::Matrix<double, RendezvousProblem::kDim, RendezvousProblem::kDim>;
    constexpr int n = RendezvousProblem::kDim;
    const int m = static_cast<int>(rows_.size());

    Vector u = to_internal(z0);
    project(u);
    Point p = evaluate(u);
    Mat B = Mat::Identity();
    Eigen::VectorXd lambda = Eigen::VectorXd::Zero(m);
    double nu = 1.0;
    double radius = 50.0;
    Outcome out;

    // Rows: linearised constraints (elastic), elastic >= 0, dwell bounds, step box.
    const int rows = 2 * m + 4 + 2 * n;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(rows, n + m);
    Eigen::VectorXd b(rows);
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n + m, n + m);
    Eigen::VectorXd h(n + m);

    for (int iter = 1; iter <= settings_.max_iterations; ++iter) {
      const double elastic = std::max(100.0, 10.0 * lambda.lpNorm<Eigen::Infinity>());
      H.setZero();
      H.topLeftCorner<n, n>() = B;
      H.bottomRightCorner(m, m).diagonal().setConstant(1e-8);
      h.head<n>() = p.grad;
      h.tail(m).setConstant(elastic);
      A.setZero();
      A.topLeftCorner(m, n) = p.jac;
      A.block(0, n, m, m).diagonal().setConstant(-1.0);
      b.head(m) = -p.c;
      A.block(m, n, m, m).diagonal().setConstant(-1.0);
      b.segment(m, m).setZero();
      for (int k = 0; k < 4; ++k) {
        A(2 * m + k, 2 + k) = -1.0;
        b[2 * m + k] = u[2 + k] - lower_[2 + k];
      }
      for (int j = 0; j < n; ++j) {
        A(2 * m + 4 + 2 * j, j) = 1.0;
        A(2 * m + 4 + 2 * j + 1, j) = -1.0;
        b[2 * m + 4 + 2 * j] = radius;
        b[2 * m + 4 + 2 * j + 1] = radius;
      }
      const QpSolution qp = solve_qp(H, h, A, b);
      out.inner_iterations += qp.iterations;
      const Vector d = qp.y.head<n>();
      const Eigen::VectorXd lambda_qp = qp.z.head(m);

      // KKT measures at the current point with the subproblem multipliers.
      Vector grad_l = p.grad + p.jac.transpose() * lambda_qp;
      for (int k = 0; k < 4; ++k) grad_l[2 + k] -= qp.z[2 * m + k];
      const double violation = std::max(0.0, p.c.maxCoeff());
      double complementarity = 0.0;
      for (int i = 0; i < m; ++i) complementarity = std::max(complementarity, std::abs(lambda_qp[i] * p.c[i]));
      for (int k = 0; k < 4; ++k)
        complementarity = std::max(complementarity, std::abs(qp.z[2 * m + k] * (u[2 + k] - lower_[2 + k])));
      const double stationarity = grad_l.lpNorm<Eigen::Infinity>() / (1.0 + p.grad.lpNorm<Eigen::Infinity>());

      out.z = to_external(u);
      out.violation = violation;
      out.stationarity = stationarity;
      if (settings_.trace) {
        IterationLog log;
        log.start = start_index;
        log.iteration = iter;
        log.qp_iterations = qp.iterations;
        log.cost = p.f;
        log.max_violation = violation;
        log.stationarity = stationarity;
        log.elastic_weight = nu;
        settings_.trace(log);
      }
      if (violation <= 1e-9 && complementarity <= 1e-7 && stationarity <= settings_.tolerance) {
        out.converged = true;
        break;
      }

      nu = std::max(nu, 1.1 * lambda_qp.lpNorm<Eigen::Infinity>() + 1e-3);
      const double phi0 = p.f + nu * p.c.cwiseMax(0.0).sum();
      double slope = p.grad.dot(d) - nu * p.c.cwiseMax(0.0).sum();
      slope = std::min(slope, -1e-14);

      double step = 1.0;
      bool accepted = false;
      Vector u_new;
      Point p_new;
      for (int ls = 0; ls < 40; ++ls) {
        u_new = u + step * d;
        project(u_new);
        p_new = evaluate(u_new);
        const double phi = p_new.f + nu * p_new.c.cwiseMax(0.0).sum();
        if (std::isfinite(phi) && phi <= phi0 + 1e-4 * step * slope) {
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      if (!accepted) {
        if (d.lpNorm<Eigen::Infinity>() <= 1e-12) break;
        B = Mat::Identity();
        radius = std::max(1e-3, 0.25 * radius);
        lambda = lambda_qp;
        continue;
      }

      // Damped BFGS on the Lagrangian gradient.
      const Vector s = u_new - u;
      Vector y = (p_new.grad + p_new.jac.transpose() * lambda_qp) - (p.grad + p.jac.transpose() * lambda_qp);
      const Vector Bs = B * s;
      const double sBs = s.dot(Bs);
      if (sBs > 1e-16) {
        double sy = s.dot(y);
        if (sy < 0.2 * sBs) {
          const double theta = 0.8 * sBs / (sBs - sy);
          y = theta * y + (1.0 - theta) * Bs;
          sy = s.dot(y);
        }
        B += y * y.transpose() / sy - Bs * Bs.transpose() / sBs;
        B = 0.5 * (B + B.transpose());
      }
      if (step == 1.0) radius = std::min(50.0, 2.0 * radius);
      u = u_new;
      p = std::move(p_new);
      lambda = lambda_qp;
    }
    if (!out.converged) {
      out.z = to_external(u);
      out.violation = std::max(0.0, p.c.maxCoeff());
    }
    return out;
  }

 private:
  struct Point {
    double f = 0.0;
    Vector grad;
    Eigen::VectorXd c;
    Eigen::MatrixXd jac;
  };

  Point evaluate(const Vector& u) const {
    const Vector z = to_external(u);
    Point p;
    Vector gz;
    p.f = problem_.cost(z, &gz);
    p.grad = gz.cwiseProduct(var_scale_);
    RendezvousProblem::Jacobian J;
    const Eigen::VectorXd g = problem_.constraints(z, &J);
    const auto m = static_cast<Eigen::Index>(rows_.size());
    p.c.resize(m);
    p.jac.resize(m, RendezvousProblem::kDim);
    for (Eigen::Index i = 0; i < m; ++i) {
      const int r = rows_[static_cast<std::size_t>(i)];
      p.c[i] = scale_[r] * g[r];
      p.jac.row(i) = scale_[r] * J.row(r).cwiseProduct(var_scale_.transpose());
    }
    return p;
  }

  Vector to_internal(const Vector& z) const { return z.cwiseQuotient(var_scale_); }
  Vector to_external(const Vector& u) const { return u.cwiseProduct(var_scale_); }
  void project(Vector& u) const { u = u.cwiseMax(lower_); }

  const RendezvousProblem& problem_;
  const OcpSettings& settings_;
  Vector var_scale_;
  Vector lower_;
  Eigen::VectorXd scale_;
  std::vector<int> rows_;
};

OcpInputs with_margins(const OcpInputs& in) {
  OcpInputs tight = in;
  tight.energy_params.v_max = in.energy_params.v_max * (1.0 - kSpeedMargin);
  tight.t_max = in.t_max - kTimeMargin;
  tight.energy = in.energy - kEnergyMargin;
  return tight;
}

double natural_violation(const RendezvousProblem& problem, const Vector& z) {
  const Eigen::VectorXd g = problem.constraints(z);
  double worst = 0.0;
  for (int i = 0; i < g.size(); ++i) worst = std::max(worst, g[i]);
  return worst;
}

/// Necessary conditions: some rendezvous time must be reachable at v_max within the
/// budget, and the abort site must be reachable from the start.
bool obviously_infeasible(const OcpInputs& in) {
  const double v = in.energy_params.v_max;
  if ((in.abort_site - in.start).norm() > v * in.t_max + 1e-6) return true;
  const double hover = in.energy_params.hover_constant * in.energy_params.mass;
  if (hover * 2.0 * in.dwell > in.energy + 1e-6) return true;
  const double t_lo = in.clock + 2.0 * in.dwell;
  const double t_hi = std::min(in.clock + in.t_max - in.dwell, in.integrals->time_domain().hi);
  if (t_hi < t_lo) return true;
  constexpr int kScan = 400;
  for (int k = 0; k <= kScan; ++k) {
    const double tr = t_lo + (t_hi - t_lo) * k / kScan;
    const PredictionJet jet = predict_position_jet(in.posterior, *in.integrals, in.anchor, tr);
    const Vec2 p = in.path->position_unchecked(jet.mean);
    const double reach = (p - in.start).norm() / v;
    const double home = (in.landing - p).norm() / v;
    if (reach <= tr - in.clock + 1e-6 && home <= in.clock + in.t_max - tr + 1e-6) return false;
  }
  return true;
}

Vector cold_start(const RendezvousProblem& problem) {
  const auto& in = problem.inputs();
  const double v = in.energy_params.v_max;
  const double horizon_end = std::min(in.clock + in.t_max, in.integrals->time_domain().hi);
  double tr = horizon_end;
  // First rendezvous time at which a straight-line intercept at half speed works.
  for (double cand = in.clock + 2.0 * in.dwell; cand <= horizon_end; cand += 0.5) {
    const PredictionJet jet = predict_position_jet(in.posterior, *in.integrals, in.anchor, cand);
    const Vec2 p = in.path->position_unchecked(jet.mean);
    if ((p - in.start).norm() <= 0.5 * v * (cand - in.clock)) {
      tr = cand;
      break;
    }
  }
  const PredictionJet jet = predict_position_jet(in.posterior, *in.integrals, in.anchor, tr);
  const Vec2 rendezvous = in.path->position_unchecked(jet.mean);
  const Vec2 driver_now = in.path->position_unchecked(in.anchor.position);
  const Vec2 x1 = 0.5 * (in.start + driver_now);
  const double lead = std::max(2.0 * in.dwell, tr - in.clock);
  const double t1 = std::max(in.dwell, 0.5 * lead);
  const double t2 = std::max(in.dwell, lead - t1);
  const double t3 = std::max(in.dwell, (in.landing - rendezvous).norm() / (0.5 * v));
  const double t4 = std::max(in.dwell, (in.abort_site - x1).norm() / (0.5 * v));
  Vector z;
  z << x1.x(), x1.y(), t1, t2, t3, t4;
  return z;
}

}  // namespace

SolveResult solve(const OcpInputs& inputs, const OcpSettings& settings, const std::optional<MissionPlan>& warm_start) {
  inputs.validate();
  SolveResult result;
  if (obviously_infeasible(inputs)) {
    result.status = SolveStatus::Infeasible;
    result.message = "no reachable rendezvous or abort within the time budget";
    return result;
  }

  const RendezvousProblem tight(with_margins(inputs));
  const RendezvousProblem exact(inputs);

  std::vector<Vector> starts;
  if (warm_start) {
    Vector z = exact.encode(*warm_start);
    z[2] -= inputs.clock - warm_start->origin_clock;
    for (int i = 2; i < 6; ++i) z[i] = std::max(z[i], inputs.dwell);
    starts.push_back(z);
  }
  const Vector cold = cold_start(exact);
  starts.push_back(cold);
  static constexpr double kPerturb[2][4] = {{1.2, 0.8, 1.2, 0.8}, {0.8, 1.2, 0.8, 1.2}};
  for (int k = 1; k < settings.multistart; ++k) {
    Vector z = cold;
    const auto& f = kPerturb[(k - 1) % 2];
    for (int i = 0; i < 4; ++i) z[2 + i] = std::max(inputs.dwell, cold[2 + i] * f[i]);
    starts.push_back(z);
  }

  struct Candidate {
    Vector z;
    double cost;
    double violation;
    double stationarity;
    bool converged;
  };
  std::optional<Candidate> best;
  auto better = [](const Candidate& a, const Candidate& b) {
    const bool fa = a.violation <= 1e-6, fb = b.violation <= 1e-6;
    if (fa != fb) return fa;
    if (!fa) return a.violation < b.violation;
    return a.cost < b.cost;
  };

  Sqp solver(tight, settings);
  for (std::size_t s = 0; s < starts.size(); ++s) {
    const auto out = solver.run(starts[s], static_cast<int>(s));
    result.iterations += out.inner_iterations;
    Candidate c{out.z, exact.cost(out.z), natural_violation(exact, out.z), out.stationarity, out.converged};
    if (!best || better(c, *best)) best = c;
    // A converged warm start stands in for the cold multistart.
    if (warm_start && s == 0 && c.converged && c.violation <= 1e-6) break;
  }

  const MissionPlan plan = exact.make_plan(best->z);
  result.violations = check_plan(plan, inputs, settings.tolerance);
  result.max_violation = best->violation;
  result.stationarity = best->stationarity;
  if (!result.violations.empty() && best->violation > kInfeasibleViolation) {
    result.status = SolveStatus::Infeasible;
    result.message = "no feasible point found; best violation " + std::to_string(best->violation);
    return result;
  }
  result.plan = plan;
  if (result.violations.empty() && best->converged) {
    result.status = SolveStatus::Optimal;
  } else {
    result.status = SolveStatus::NotConverged;
    std::ostringstream os;
    os << "iteration cap reached; violation " << best->violation << ", stationarity " << best->stationarity;
    result.message = os.str();
  }
  return result;
}

bool abort_branch_admissible(const MissionPlan& plan, double energy, double time_budget, double v_max,
                             double tolerance) {
  if (plan.abort_branch_energy() > energy + tolerance) return false;
  if (plan.abort_branch_duration() > time_budget + tolerance) return false;
  if (plan.velocities[kToPnr].norm() > v_max + 1e-9) return false;
  if (plan.velocities[kToAbort].norm() > v_max + 1e-9) return false;
  return true;
}

std::vector<std::string> check_plan(const MissionPlan& plan, const OcpInputs& in, double tolerance) {
  std::vector<std::string> issues;
  auto fail = [&issues](std::string msg) { issues.push_back(std::move(msg)); };
  const auto& t = plan.durations;
  const auto& x = plan.waypoints;
  const auto& v = plan.velocities;

  const Vec2 chain[4] = {plan.origin + v[0] * t[0], x[0] + v[1] * t[1], x[1] + v[2] * t[2], x[0] + v[3] * t[3]};
  for (int i = 0; i < 4; ++i)
    if ((chain[i] - x[i]).norm() > tolerance) fail("waypoint " + std::to_string(i + 1) + " inconsistent with segment dynamics");
  for (int i = 0; i < 4; ++i) {
    if (!(v[i].norm() <= in.energy_params.v_max + 1e-9)) fail("segment " + std::to_string(i + 1) + " exceeds v_max");
    if (!(t[i] >= in.dwell - tolerance)) fail("segment " + std::to_string(i + 1) + " shorter than dwell time");
  }
  if (!(t[0] + t[1] + t[2] <= in.t_max + tolerance)) fail("rendezvous branch exceeds t_max");
  if (!(t[0] + t[3] <= in.t_max + tolerance)) fail("abort branch exceeds t_max");

  double energies[4];
  for (int i = 0; i < 4; ++i) energies[i] = segment_energy(v[i], t[i], in.energy_params);
  if (!(energies[0] + energies[1] + energies[2] <= in.energy + tolerance)) fail("rendezvous branch exceeds E_r");
  if (!(energies[0] + energies[3] <= in.energy + tolerance)) fail("abort branch exceeds E_r");

  if ((x[2] - in.landing).norm() > tolerance) fail("landing waypoint differs from S_L");
  if ((x[3] - in.abort_site).norm() > tolerance) fail("abort waypoint differs from S_A");
  if (std::abs(plan.rendezvous_time - (plan.origin_clock + t[0] + t[1])) > tolerance)
    fail("rendezvous time differs from t1 + t2");
  try {
    const PositionPrediction pred = predict_position(in.posterior, *in.integrals, in.anchor, plan.rendezvous_time);
    const Vec2 target = in.path->position_at(pred.mean);
    if ((target - x[1]).norm() > 1e-4) fail("rendezvous waypoint is not at the predicted driver position");
  } catch (const DomainError& e) {
    fail(std::string("rendezvous outside model domain: ") + e.what());
  }
  return issues;
}

}  // namespace rdv
