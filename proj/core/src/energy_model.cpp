#include "rendezvous/energy_model.hpp"

#include <cmath>

#include "rendezvous/errors.hpp"

namespace rdv {

namespace {
constexpr double kSpeedSlack = 1e-9;
}

void EnergyParams::validate() const {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(mass)) throw ConfigError("must be > 0", "energy.mass");
  if (!positive(hover_constant)) throw ConfigError("must be > 0", "energy.alpha");
  if (!positive(v_max)) throw ConfigError("must be > 0", "energy.v_max");
}

StepResult step(const UasState& state, const Vec2& v, const EnergyParams& params, double dt) {
  if (!(dt > 0.0)) throw InputError("step duration must be positive");
  const double speed = v.norm();
  if (!std::isfinite(speed) || speed > params.v_max + kSpeedSlack)
    throw InputError("commanded speed " + std::to_string(speed) + " exceeds v_max " + std::to_string(params.v_max));
  StepResult out;
  out.state.position = state.position + v * dt;
  out.state.clock = state.clock + dt;
  out.state.energy = state.energy - params.power(speed) * dt;
  if (out.state.energy < 0.0) {
    out.depleted = true;
    out.state.energy = 0.0;
  }
  return out;
}

double segment_energy(const Vec2& v, double t, const EnergyParams& params) {
  if (t < 0.0) throw InputError("segment duration must be >= 0");
  return params.power(v.norm()) * t;
}

std::optional<double> min_energy_to_reach(const Vec2& from, const Vec2& to, double t, const EnergyParams& params) {
  if (!(t > 0.0)) throw InputError("time to reach must be positive");
  const double speed = (to - from).norm() / t;
  if (speed > params.v_max + kSpeedSlack) return std::nullopt;
  return params.power(speed) * t;
}

}  // namespace rdv
