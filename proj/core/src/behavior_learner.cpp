#include "rendezvous/behavior_learner.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>

#include "rendezvous/errors.hpp"

namespace rdv {

namespace {

void solve_posterior(BehaviorPosterior& post) {
  Eigen::LLT<Eigen::MatrixXd> llt(post.precision);
  if (llt.info() != Eigen::Success) throw ConfigError("posterior precision is not positive definite", "behavior");
  post.mean = llt.solve(post.information);
  const auto m = post.precision.rows();
  post.covariance = llt.solve(Eigen::MatrixXd::Identity(m, m));
  post.covariance = 0.5 * (post.covariance + post.covariance.transpose());
}

}  // namespace

BehaviorDataset append(BehaviorDataset data, BehaviorSample sample) {
  if (!std::isfinite(sample.driver_velocity) || !std::isfinite(sample.historical_velocity))
    throw DataError("non-finite behavior sample", data.size());
  data.driver_velocity.push_back(sample.driver_velocity);
  data.historical_velocity.push_back(sample.historical_velocity);
  return data;
}

BehaviorPrior BehaviorPrior::isotropic(std::size_t dimension, double scale, double noise_variance) {
  const auto m = static_cast<Eigen::Index>(dimension);
  return BehaviorPrior{scale * Eigen::MatrixXd::Identity(m, m), noise_variance};
}

BehaviorPosterior regress(const BehaviorPrior& prior, const BehaviorDataset& data, const BasisSpec& basis) {
  const auto m = static_cast<Eigen::Index>(basis.size());
  if (prior.covariance.rows() != m || prior.covariance.cols() != m)
    throw ConfigError("prior covariance must be " + std::to_string(m) + "x" + std::to_string(m), "behavior.prior");
  if (!(prior.noise_variance > 0.0) || !std::isfinite(prior.noise_variance))
    throw ConfigError("noise variance must be positive", "behavior.noise_variance");
  if (!prior.covariance.isApprox(prior.covariance.transpose()))
    throw ConfigError("prior covariance must be symmetric", "behavior.prior");
  Eigen::LLT<Eigen::MatrixXd> prior_llt(prior.covariance);
  if (prior_llt.info() != Eigen::Success)
    throw ConfigError("prior covariance must be positive definite", "behavior.prior");
  if (data.driver_velocity.size() != data.historical_velocity.size())
    throw DataError("D and H differ in length", std::min(data.driver_velocity.size(), data.historical_velocity.size()));

  const double inv_noise = 1.0 / prior.noise_variance;
  BehaviorPosterior post;
  post.noise_variance = prior.noise_variance;
  post.precision = prior_llt.solve(Eigen::MatrixXd::Identity(m, m));
  post.information = Eigen::VectorXd::Zero(m);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double y = data.driver_velocity[i];
    const double h = data.historical_velocity[i];
    if (!std::isfinite(y) || !std::isfinite(h)) throw DataError("non-finite behavior sample", i);
    const Eigen::VectorXd phi = basis.evaluate(h);
    post.precision.noalias() += inv_noise * phi * phi.transpose();
    post.information.noalias() += inv_noise * y * phi;
  }
  post.precision = 0.5 * (post.precision + post.precision.transpose());
  post.sample_count = data.size();
  solve_posterior(post);
  return post;
}

BehaviorPosterior update(const BehaviorPosterior& posterior, BehaviorSample sample, const BasisSpec& basis) {
  if (!std::isfinite(sample.driver_velocity) || !std::isfinite(sample.historical_velocity))
    throw DataError("non-finite behavior sample", posterior.sample_count);
  BehaviorPosterior next = posterior;
  const Eigen::VectorXd phi = basis.evaluate(sample.historical_velocity);
  const double inv_noise = 1.0 / posterior.noise_variance;
  next.precision.noalias() += inv_noise * phi * phi.transpose();
  next.information.noalias() += inv_noise * sample.driver_velocity * phi;
  next.sample_count += 1;
  solve_posterior(next);
  return next;
}

double PositionPrediction::stddev() const { return std::sqrt(std::max(variance, 0.0)); }

PositionPrediction predict_position(const BehaviorPosterior& posterior, const BasisIntegralTable& table,
                                    PredictionAnchor anchor, double tf) {
  if (tf < anchor.time) throw DomainError("prediction horizon precedes anchor time", tf);
  const Eigen::VectorXd psi = table.psi(anchor.time, tf);
  PositionPrediction out;
  out.anchor = anchor;
  out.horizon = tf;
  out.mean = anchor.position + posterior.mean.dot(psi);
  out.variance = std::max(0.0, psi.dot(posterior.covariance * psi));
  return out;
}

PredictionJet predict_position_jet(const BehaviorPosterior& posterior, const BasisIntegralTable& table,
                                   PredictionAnchor anchor, double tf) {
  const Eigen::VectorXd psi = table.psi_unchecked(anchor.time, tf);
  const Eigen::VectorXd rate = table.psi_rate(tf);
  const Eigen::VectorXd cov_psi = posterior.covariance * psi;
  PredictionJet jet;
  jet.mean = anchor.position + posterior.mean.dot(psi);
  jet.variance = psi.dot(cov_psi);
  jet.mean_rate = posterior.mean.dot(rate);
  jet.variance_rate = 2.0 * rate.dot(cov_psi);
  return jet;
}

}  // namespace rdv
