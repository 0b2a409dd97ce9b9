#pragma once

#include <optional>

#include "rendezvous/path_model.hpp"

namespace rdv {

/// Vehicle constants of the quadratic-plus-hover energy law.
struct EnergyParams {
  double mass = 1.0;           ///< kg
  double hover_constant = 5.0; ///< alpha, J/(kg s)
  double v_max = 15.0;         ///< m/s, Euclidean norm of the commanded velocity

  /// Throws ConfigError unless every field is strictly positive and finite.
  void validate() const;
  /// Drain rate in J/s at speed |v|: m |v|^2 / 2 + alpha m.
  double power(double speed) const noexcept { return mass * (0.5 * speed * speed + hover_constant); }
};

/// Aerial vehicle state: single integrator plus an energy reservoir.
struct UasState {
  Vec2 position = Vec2::Zero();
  double energy = 0.0;  ///< remaining energy E_r, J
  double clock = 0.0;   ///< mission time, s
};

struct StepResult {
  UasState state;
  /// Set when the step would have driven E_r below zero; `state.energy` is clamped to 0.
  bool depleted = false;
};

/// Advances the UAS by `dt` at constant velocity `v`.
///
/// Throws InputError for dt <= 0 or |v| > v_max (1e-9 slack).
StepResult step(const UasState& state, const Vec2& v, const EnergyParams& params, double dt);

/// (m |v|^2 / 2 + alpha m) t. Throws InputError for t < 0.
double segment_energy(const Vec2& v, double t, const EnergyParams& params);

/// Cheapest energy to fly `from` -> `to` in exactly `t` seconds along a straight line,
/// or nullopt when the required speed exceeds v_max. Throws InputError for t <= 0.
std::optional<double> min_energy_to_reach(const Vec2& from, const Vec2& to, double t, const EnergyParams& params);

}  // namespace rdv
