#include "rendezvous/path_model.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <sstream>

#include "rendezvous/errors.hpp"

namespace rdv {

namespace {

constexpr int kProfileCheckSamples = 1001;

void require_nonnegative(const VelocityProfile& profile) {
  const auto& d = profile.domain();
  for (int i = 0; i < kProfileCheckSamples; ++i) {
    const double t = d.lo + d.length() * i / (kProfileCheckSamples - 1);
    const double v = profile.at_unchecked(t);
    if (!std::isfinite(v) || v < -1e-12)
      throw ConfigError("historical velocity must be finite and >= 0 over its domain, got " +
                            std::to_string(v) + " at t=" + std::to_string(t),
                        "profile");
  }
}

}  // namespace

VelocityProfile::VelocityProfile(Polynomial poly, Interval domain)
    : poly_(poly), fn_([p = std::move(poly)](double t) { return p(t); }), domain_(domain) {
  if (!(domain_.hi > domain_.lo)) throw ConfigError("profile domain must be non-empty", "profile");
  require_nonnegative(*this);
}

VelocityProfile::VelocityProfile(std::function<double(double)> fn, Interval domain)
    : fn_(std::move(fn)), domain_(domain) {
  if (!fn_) throw ConfigError("profile callable is empty", "profile");
  if (!(domain_.hi > domain_.lo)) throw ConfigError("profile domain must be non-empty", "profile");
  require_nonnegative(*this);
}

VelocityProfile VelocityProfile::linear_decay(double initial_speed, double zero_time) {
  if (!(initial_speed > 0.0) || !(zero_time > 0.0))
    throw ConfigError("linear-decay profile needs positive speed and zero time", "profile");
  return VelocityProfile(Polynomial{initial_speed, -initial_speed / zero_time}, Interval{0.0, zero_time});
}

double VelocityProfile::at(double t) const {
  // Small slack so that clocks accumulated by repeated addition still hit the end point.
  if (!(t >= domain_.lo - 1e-9 && t <= domain_.hi + 1e-9))
    throw DomainError("time outside historical profile domain [" + std::to_string(domain_.lo) + ", " +
                          std::to_string(domain_.hi) + "]",
                      t);
  return fn_(t);
}

double VelocityProfile::at_unchecked(double t) const { return fn_(t); }

PathModel::PathModel(Polynomial x, Polynomial y, Interval theta_domain, VelocityProfile profile)
    : x_(std::move(x)),
      y_(std::move(y)),
      dx_(x_.derivative()),
      dy_(y_.derivative()),
      theta_domain_(theta_domain),
      profile_(std::move(profile)) {
  if (!(theta_domain_.hi > theta_domain_.lo)) throw ConfigError("path domain must be non-empty", "path");
  for (double c : x_.coefficients())
    if (!std::isfinite(c)) throw ConfigError("path coefficients must be finite", "path.x");
  for (double c : y_.coefficients())
    if (!std::isfinite(c)) throw ConfigError("path coefficients must be finite", "path.y");
}

PathModel PathModel::paper_diagonal(PathMode mode, VelocityProfile profile, std::optional<Interval> theta_domain) {
  const double scale = mode == PathMode::PaperLiteral ? 1.0 : 1.0 / std::sqrt(2.0);
  // The road ends at (1000,1000); the default domain leaves room for fast drivers
  // whose predicted position runs past the nominal end.
  const Interval domain = theta_domain.value_or(Interval{0.0, 1500.0 / scale});
  return PathModel(Polynomial{0.0, scale}, Polynomial{0.0, scale}, domain, std::move(profile));
}

Vec2 PathModel::position_at(double theta) const {
  if (!(theta >= theta_domain_.lo - 1e-9 && theta <= theta_domain_.hi + 1e-9))
    throw DomainError("path parameter outside [" + std::to_string(theta_domain_.lo) + ", " +
                          std::to_string(theta_domain_.hi) + "]",
                      theta);
  return position_unchecked(theta);
}

Vec2 PathModel::position_unchecked(double theta) const noexcept { return {x_(theta), y_(theta)}; }

Vec2 PathModel::tangent_at(double theta) const noexcept { return {dx_(theta), dy_(theta)}; }

BasisSpec::BasisSpec(std::vector<unsigned> powers) : powers_(std::move(powers)) {
  if (powers_.empty()) throw ConfigError("basis must contain at least one function", "behavior.basis");
}

BasisSpec BasisSpec::polynomial(unsigned degree) {
  std::vector<unsigned> p(degree + 1);
  for (unsigned k = 0; k <= degree; ++k) p[k] = k;
  return BasisSpec(std::move(p));
}

Eigen::VectorXd BasisSpec::evaluate(double v) const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(powers_.size()));
  for (std::size_t k = 0; k < powers_.size(); ++k) out[static_cast<Eigen::Index>(k)] = std::pow(v, powers_[k]);
  return out;
}

std::string BasisSpec::describe() const {
  std::ostringstream os;
  os << '[';
  for (std::size_t k = 0; k < powers_.size(); ++k) os << (k ? ", " : "") << "v^" << powers_[k];
  os << ']';
  return os.str();
}

BasisIntegralTable::BasisIntegralTable(const PathModel& path, BasisSpec basis)
    : basis_(std::move(basis)), profile_(path.profile()) {
  if (const auto& poly = profile_.polynomial()) {
    antiderivatives_.reserve(basis_.size());
    for (unsigned p : basis_.powers()) antiderivatives_.push_back(poly->pow(p).antiderivative());
  }
}

Eigen::VectorXd BasisIntegralTable::psi(double t0, double tf) const {
  const auto& d = profile_.domain();
  if (!(t0 >= d.lo - 1e-9 && t0 <= d.hi + 1e-9)) throw DomainError("integral start outside profile domain", t0);
  if (!(tf >= d.lo - 1e-9 && tf <= d.hi + 1e-9)) throw DomainError("integral end outside profile domain", tf);
  if (tf < t0) throw DomainError("integral end precedes start", tf);
  return psi_unchecked(t0, tf);
}

Eigen::VectorXd BasisIntegralTable::psi_unchecked(double t0, double tf) const {
  const auto m = static_cast<Eigen::Index>(basis_.size());
  Eigen::VectorXd out(m);
  if (tf == t0) return Eigen::VectorXd::Zero(m);
  if (closed_form()) {
    for (Eigen::Index k = 0; k < m; ++k) {
      const auto& anti = antiderivatives_[static_cast<std::size_t>(k)];
      out[k] = anti(tf) - anti(t0);
    }
    return out;
  }
  using boost::math::quadrature::gauss_kronrod;
  for (Eigen::Index k = 0; k < m; ++k) {
    const unsigned p = basis_.powers()[static_cast<std::size_t>(k)];
    auto integrand = [this, p](double tau) { return std::pow(profile_.at_unchecked(tau), p); };
    out[k] = gauss_kronrod<double, 31>::integrate(integrand, t0, tf, 20, 1e-13);
  }
  return out;
}

Eigen::VectorXd BasisIntegralTable::psi_rate(double tf) const { return basis_.evaluate(profile_.at_unchecked(tf)); }

Eigen::VectorXd compute_basis_integrals(const PathModel& path, const BasisSpec& basis, double t0, double tf) {
  if (!path.profile().polynomial())
    throw ConfigError(
        "closed-form basis integrals need a polynomial profile; use BasisIntegralTable for the quadrature "
        "fallback",
        "profile");
  return BasisIntegralTable(path, basis).psi(t0, tf);
}

}  // namespace rdv
