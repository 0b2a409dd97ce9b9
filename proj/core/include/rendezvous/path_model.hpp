#pragma once

#include <Eigen/Core>

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rendezvous/polynomial.hpp"

namespace rdv {

using Vec2 = Eigen::Vector2d;

/// Closed interval [lo, hi].
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double v) const noexcept { return v >= lo && v <= hi; }
  double length() const noexcept { return hi - lo; }
};

/// How the path parameter of the built-in diagonal road relates to distance travelled.
enum class PathMode {
  /// p(theta) = (theta, theta): theta is a path parameter, not metres of travel.
  PaperLiteral,
  /// p(theta) = (theta, theta) / sqrt(2): theta is arc length in metres.
  ArcLength,
};

/// Prototypical traffic speed along the path as a function of mission time.
///
/// Either a polynomial in t (closed-form integrals available) or an arbitrary
/// callable (integrals fall back to adaptive quadrature).
class VelocityProfile {
 public:
  VelocityProfile(Polynomial poly, Interval domain);
  VelocityProfile(std::function<double(double)> fn, Interval domain);

  /// 10 (1 - t/200) on [0, 200] scaled by peak speed and zero crossing.
  static VelocityProfile linear_decay(double initial_speed = 10.0, double zero_time = 200.0);

  /// Throws DomainError outside the profile domain.
  double at(double t) const;
  /// Evaluates without the domain check; used inside the solver's line search.
  double at_unchecked(double t) const;

  const Interval& domain() const noexcept { return domain_; }
  const std::optional<Polynomial>& polynomial() const noexcept { return poly_; }

 private:
  std::optional<Polynomial> poly_;
  std::function<double(double)> fn_;
  Interval domain_;
};

/// The ground vehicle's known road plus the historical speed profile along it.
///
/// Immutable after construction; share freely across threads.
class PathModel {
 public:
  /// Polynomial road p(theta) = (x(theta), y(theta)) on `theta_domain`.
  PathModel(Polynomial x, Polynomial y, Interval theta_domain, VelocityProfile profile);

  /// The straight diagonal road from (0,0) towards (1000,1000).
  static PathModel paper_diagonal(PathMode mode = PathMode::PaperLiteral,
                                  VelocityProfile profile = VelocityProfile::linear_decay(),
                                  std::optional<Interval> theta_domain = std::nullopt);

  Vec2 position_at(double theta) const;
  Vec2 position_unchecked(double theta) const noexcept;
  /// dp/dtheta.
  Vec2 tangent_at(double theta) const noexcept;

  double historical_velocity_at(double t) const { return profile_.at(t); }

  const Interval& theta_domain() const noexcept { return theta_domain_; }
  const Interval& time_domain() const noexcept { return profile_.domain(); }
  const VelocityProfile& profile() const noexcept { return profile_; }

 private:
  Polynomial x_, y_, dx_, dy_;
  Interval theta_domain_;
  VelocityProfile profile_;
};

/// Free-function forms mirroring the operation names used throughout the docs.
inline Vec2 position_at(const PathModel& path, double theta) { return path.position_at(theta); }
inline double historical_velocity_at(const PathModel& path, double t) {
  return path.historical_velocity_at(t);
}

/// Polynomial basis phi(v) = [v^p for p in powers].
class BasisSpec {
 public:
  explicit BasisSpec(std::vector<unsigned> powers);
  /// [1, v, ..., v^degree].
  static BasisSpec polynomial(unsigned degree);

  std::size_t size() const noexcept { return powers_.size(); }
  const std::vector<unsigned>& powers() const noexcept { return powers_; }
  Eigen::VectorXd evaluate(double v) const;
  std::string describe() const;

 private:
  std::vector<unsigned> powers_;
};

/// psi(t0, tf) = integral over [t0, tf] of phi(profile(tau)) dtau.
///
/// Uses exact antiderivatives when the profile is polynomial and adaptive
/// Gauss-Kronrod quadrature (absolute tolerance 1e-10) otherwise.
class BasisIntegralTable {
 public:
  BasisIntegralTable(const PathModel& path, BasisSpec basis);

  Eigen::VectorXd psi(double t0, double tf) const;
  Eigen::VectorXd psi_unchecked(double t0, double tf) const;
  /// d psi / d tf = phi(profile(tf)).
  Eigen::VectorXd psi_rate(double tf) const;

  const BasisSpec& basis() const noexcept { return basis_; }
  const Interval& time_domain() const noexcept { return profile_.domain(); }
  bool closed_form() const noexcept { return !antiderivatives_.empty(); }

 private:
  BasisSpec basis_;
  VelocityProfile profile_;
  std::vector<Polynomial> antiderivatives_;
};

/// Closed-form psi for polynomial basis composed with a polynomial profile.
///
/// Throws ConfigError for non-polynomial profiles (use BasisIntegralTable, which
/// falls back to quadrature) and DomainError for out-of-domain times.
Eigen::VectorXd compute_basis_integrals(const PathModel& path, const BasisSpec& basis, double t0,
                                        double tf);

}  // namespace rdv
