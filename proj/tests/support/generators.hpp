#pragma once

#include <Eigen/Core>

#include "rendezvous/behavior_learner.hpp"
#include "rendezvous/path_model.hpp"
#include "rendezvous/rng.hpp"

namespace rdv::testing {

/// Symmetric positive-definite matrix L L^T + shift I with a random lower-triangular L.
inline Eigen::MatrixXd random_spd(Rng& rng, Eigen::Index m, double shift = 0.5) {
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j <= i; ++j) l(i, j) = rng.normal(0.0, 1.0);
  return l * l.transpose() + shift * Eigen::MatrixXd::Identity(m, m);
}

/// `n` samples of a driver running at gain `a` over historical speeds in [lo, hi].
inline BehaviorDataset random_dataset(Rng& rng, std::size_t n, double a, double sigma, double lo = 0.0,
                                      double hi = 10.0) {
  BehaviorDataset data;
  for (std::size_t i = 0; i < n; ++i) {
    const double h = rng.uniform(lo, hi);
    data = append(std::move(data), {a * h + (sigma > 0.0 ? rng.normal(0.0, sigma) : 0.0), h});
  }
  return data;
}

}  // namespace rdv::testing
