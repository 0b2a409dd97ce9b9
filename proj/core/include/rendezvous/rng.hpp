#pragma once

#include <cstdint>
#include <optional>
#include <random>

namespace rdv {

/// Seeded, platform-portable random source.
///
/// std::mt19937_64 has a fully specified output sequence; the standard
/// distributions do not, so uniforms and normals are derived here directly:
/// uniforms take the top 53 bits of one draw, normals use the Box-Muller
/// transform and return the cached second variate on alternate calls.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1).
  double uniform();
  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal.
  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  std::uint64_t next_u64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

}  // namespace rdv
