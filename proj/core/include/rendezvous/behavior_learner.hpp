#pragma once

#include <Eigen/Core>

#include <vector>

#include "rendezvous/path_model.hpp"

namespace rdv {

/// One paired observation: measured driver speed and the historical speed at the same instant.
struct BehaviorSample {
  double driver_velocity = 0.0;
  double historical_velocity = 0.0;
};

/// D and H of the regression, kept as parallel columns.
struct BehaviorDataset {
  std::vector<double> driver_velocity;
  std::vector<double> historical_velocity;

  std::size_t size() const noexcept { return driver_velocity.size(); }
  bool empty() const noexcept { return driver_velocity.empty(); }
};

/// Returns `data` with `sample` appended. Non-finite values throw DataError.
BehaviorDataset append(BehaviorDataset data, BehaviorSample sample);

/// Zero-mean Gaussian prior over basis weights plus the measurement-noise variance.
struct BehaviorPrior {
  Eigen::MatrixXd covariance;
  double noise_variance = 1.0;

  /// scale * I.
  static BehaviorPrior isotropic(std::size_t dimension, double scale, double noise_variance);
};

/// Conjugate posterior N(mean, covariance) over the basis weights.
///
/// `precision` is A = Phi Phi^T / sigma^2 + Sigma_m^{-1}, `information` is Phi D / sigma^2;
/// both are kept so that new samples can be folded in without refitting.
struct BehaviorPosterior {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
  Eigen::MatrixXd precision;
  Eigen::VectorXd information;
  double noise_variance = 1.0;
  std::size_t sample_count = 0;
};

/// Bayesian linear regression of driver speed on phi(historical speed).
///
/// Solves with a Cholesky factorisation of A; never forms an explicit inverse.
/// Throws ConfigError for a non positive-definite prior or non-positive noise,
/// DataError for non-finite data.
BehaviorPosterior regress(const BehaviorPrior& prior, const BehaviorDataset& data, const BasisSpec& basis);

/// Rank-one update with a single new sample. Agrees with batch `regress` to round-off.
BehaviorPosterior update(const BehaviorPosterior& posterior, BehaviorSample sample, const BasisSpec& basis);

/// Where predictions are integrated from: mission time and driver path position.
struct PredictionAnchor {
  double time = 0.0;
  double position = 0.0;
};

/// Predictive distribution of the driver's path parameter at `horizon`.
struct PositionPrediction {
  double mean = 0.0;
  double variance = 0.0;
  PredictionAnchor anchor;
  double horizon = 0.0;

  double stddev() const;
};

/// mean = theta_0 + mu^T psi(t0, tf), variance = psi^T Sigma_w psi.
PositionPrediction predict_position(const BehaviorPosterior& posterior, const BasisIntegralTable& table,
                                    PredictionAnchor anchor, double tf);

/// Prediction together with its derivatives with respect to the horizon.
struct PredictionJet {
  double mean = 0.0;
  double variance = 0.0;
  double mean_rate = 0.0;
  double variance_rate = 0.0;
};

/// Same formulas as predict_position without the domain check, plus d/dtf.
PredictionJet predict_position_jet(const BehaviorPosterior& posterior, const BasisIntegralTable& table,
                                   PredictionAnchor anchor, double tf);

}  // namespace rdv
