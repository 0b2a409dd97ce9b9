#include "rendezvous/oracles.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>

namespace rdv::oracle {

namespace {

using MatrixL = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
using VectorL = Eigen::Matrix<long double, Eigen::Dynamic, 1>;

constexpr long double kNodes[5] = {0.0L, -0.5384693101056830910363144L, 0.5384693101056830910363144L,
                                   -0.9061798459386639927976269L, 0.9061798459386639927976269L};
constexpr long double kWeights[5] = {0.5688888888888888888888889L, 0.4786286704993664680412915L,
                                     0.4786286704993664680412915L, 0.2369268850561890875142640L,
                                     0.2369268850561890875142640L};

struct Prediction {
  double mean = 0.0;
  double variance = 0.0;
};

class Predictor {
 public:
  explicit Predictor(const OcpInputs& in)
      : in_(in), powers_(in.integrals->basis().powers()), profile_([&in](double t) {
          return in.path->profile().at_unchecked(t);
        }) {}

  Prediction at(double tf) const {
    const Eigen::VectorXd psi = quadrature_psi(profile_, powers_, in_.anchor.time, tf, 16);
    return {in_.anchor.position + in_.posterior.mean.dot(psi), psi.dot(in_.posterior.covariance * psi)};
  }

 private:
  const OcpInputs& in_;
  std::vector<unsigned> powers_;
  std::function<double(double)> profile_;
};

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
  return out;
}

void search(const OcpInputs& in, const Predictor& predict, const std::array<std::vector<double>, 4>& axes,
            GridResult& best) {
  const double m = in.energy_params.mass;
  const double alpha = in.energy_params.hover_constant;
  const double v_max = in.energy_params.v_max;
  const auto& dom = in.path->theta_domain();
  const double horizon = in.path->profile().domain().hi;
  for (double t1 : axes[0]) {
    for (double t2 : axes[1]) {
      best.evaluated += axes[2].size() * axes[3].size();
      const double rendezvous_time = in.clock + t1 + t2;
      if (rendezvous_time > horizon) continue;
      const Prediction p = predict.at(rendezvous_time);
      if (p.mean < dom.lo || p.mean > dom.hi) continue;
      const Vec2 target = in.path->position_unchecked(p.mean);
      const Vec2 x1 = in.start + (target - in.start) * (t1 / (t1 + t2));
      const double d1 = (x1 - in.start).norm(), d2 = (target - x1).norm();
      if (d1 > v_max * t1 || d2 > v_max * t2) continue;
      const double e12 = straight_energy(d1, t1, m, alpha) + straight_energy(d2, t2, m, alpha);
      const double d3 = (in.landing - target).norm(), d4 = (in.abort_site - x1).norm();
      for (double t3 : axes[2]) {
        if (t1 + t2 + t3 > in.t_max || d3 > v_max * t3) continue;
        if (e12 + straight_energy(d3, t3, m, alpha) > in.energy) continue;
        const double cost = in.variance_weight * p.variance + t2 + t3 - t1;
        if (best.feasible && cost >= best.cost) continue;
        for (double t4 : axes[3]) {
          if (t1 + t4 > in.t_max || d4 > v_max * t4) continue;
          if (straight_energy(d1, t1, m, alpha) + straight_energy(d4, t4, m, alpha) > in.energy) continue;
          best.feasible = true;
          best.cost = cost;
          best.durations = {t1, t2, t3, t4};
          break;
        }
      }
    }
  }
}

}  // namespace

DenseRegression dense_regression(const Eigen::MatrixXd& prior_covariance, double noise_variance,
                                 const std::vector<double>& driver_velocity,
                                 const std::vector<double>& historical_velocity, const std::vector<unsigned>& powers) {
  const auto m = static_cast<Eigen::Index>(powers.size());
  const auto n = static_cast<Eigen::Index>(driver_velocity.size());
  MatrixL phi(m, n);
  VectorL d(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    d[j] = driver_velocity[static_cast<std::size_t>(j)];
    for (Eigen::Index k = 0; k < m; ++k)
      phi(k, j) = std::pow(static_cast<long double>(historical_velocity[static_cast<std::size_t>(j)]),
                           static_cast<int>(powers[static_cast<std::size_t>(k)]));
  }
  const long double inv_noise = 1.0L / noise_variance;
  const MatrixL prior_inverse = prior_covariance.cast<long double>().fullPivLu().inverse();
  const MatrixL a = inv_noise * phi * phi.transpose() + prior_inverse;
  const MatrixL covariance = a.fullPivLu().inverse();
  const VectorL mean = inv_noise * covariance * phi * d;
  return {mean.cast<double>(), covariance.cast<double>()};
}

double gauss_legendre(const std::function<double(double)>& f, double a, double b, int panels) {
  const long double h = (static_cast<long double>(b) - a) / panels;
  long double total = 0.0L;
  for (int i = 0; i < panels; ++i) {
    const long double mid = a + (i + 0.5L) * h;
    for (int k = 0; k < 5; ++k) total += kWeights[k] * f(static_cast<double>(mid + 0.5L * h * kNodes[k]));
  }
  return static_cast<double>(0.5L * h * total);
}

Eigen::VectorXd quadrature_psi(const std::function<double(double)>& profile, const std::vector<unsigned>& powers,
                               double t0, double tf, int panels) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(powers.size()));
  for (std::size_t k = 0; k < powers.size(); ++k) {
    const int p = static_cast<int>(powers[k]);
    out[static_cast<Eigen::Index>(k)] = gauss_legendre([&](double t) { return std::pow(profile(t), p); }, t0, tf, panels);
  }
  return out;
}

double integrate_position(const std::function<double(double)>& velocity, double t0, double theta0, double tf,
                          int steps) {
  const long double h = (static_cast<long double>(tf) - t0) / steps;
  long double theta = theta0;
  for (int i = 0; i < steps; ++i) theta += h * velocity(static_cast<double>(t0 + (i + 0.5L) * h));
  return static_cast<double>(theta);
}

double straight_energy(double distance, double t, double mass, double alpha) {
  const double speed = distance / t;
  return (0.5 * mass * speed * speed + alpha * mass) * t;
}

GridResult grid_search(const OcpInputs& inputs, int n) {
  const Predictor predict(inputs);
  GridResult best;
  const double lo = inputs.dwell, hi = inputs.t_max;
  std::array<std::vector<double>, 4> axes;
  for (auto& axis : axes) axis = linspace(lo, hi, n);
  search(inputs, predict, axes, best);
  if (!best.feasible) return best;

  const double cell = (hi - lo) / (n - 1);
  for (std::size_t i = 0; i < 4; ++i) {
    const double c = best.durations[i];
    axes[i] = linspace(std::max(lo, c - cell), std::min(hi, c + cell), n);
  }
  search(inputs, predict, axes, best);
  return best;
}

}  // namespace rdv::oracle
