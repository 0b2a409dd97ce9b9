#pragma once

#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "rendezvous/ocp_solver.hpp"

namespace rdv::oracle {

/// Posterior mean and covariance from the textbook formulas, in long double with explicit inverses.
struct DenseRegression {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
};

DenseRegression dense_regression(const Eigen::MatrixXd& prior_covariance, double noise_variance,
                                 const std::vector<double>& driver_velocity,
                                 const std::vector<double>& historical_velocity, const std::vector<unsigned>& powers);

/// Composite 5-point Gauss-Legendre rule on `panels` equal panels, accumulated in long double.
double gauss_legendre(const std::function<double(double)>& f, double a, double b, int panels = 64);

/// Integral of [profile(t)^p for p in powers] over [t0, tf] by quadrature.
Eigen::VectorXd quadrature_psi(const std::function<double(double)>& profile, const std::vector<unsigned>& powers,
                               double t0, double tf, int panels = 64);

/// Position reached by integrating `velocity` from (t0, theta0) to tf with `steps` midpoint steps.
double integrate_position(const std::function<double(double)>& velocity, double t0, double theta0, double tf,
                          int steps = 200000);

/// Straight-line energy (m |d|^2 / (2 t) + alpha m t), written out independently of the library.
double straight_energy(double distance, double t, double mass, double alpha);

struct GridResult {
  bool feasible = false;
  double cost = 0.0;
  std::array<double, 4> durations{};
  std::size_t evaluated = 0;
};

/// Brute-force OCP search over (t1, t2, t3, t4) on an n^4 grid spanning [t_c, t_max], refined
/// once on an n^4 grid spanning the neighbouring cells of the best point.
///
/// The PNR lies on the straight line from the start to the rendezvous point, reached at constant
/// velocity. Predictions use quadrature_psi, not the library tables.
GridResult grid_search(const OcpInputs& inputs, int n = 40);

}  // namespace rdv::oracle
