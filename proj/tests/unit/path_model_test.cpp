#include "rendezvous/path_model.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "rendezvous/errors.hpp"
#include "rendezvous/oracles.hpp"
#include "rendezvous/rng.hpp"

namespace rdv {
namespace {

TEST(PathModel, DefaultPathStartsAtOrigin) {
  const PathModel path = PathModel::paper_diagonal();
  EXPECT_EQ(path.position_at(0.0), Vec2(0.0, 0.0));
}

TEST(PathModel, PaperLiteralModeMapsThetaToBothCoordinates) {
  const PathModel path = PathModel::paper_diagonal(PathMode::PaperLiteral);
  EXPECT_EQ(path.position_at(1000.0), Vec2(1000.0, 1000.0));
}

TEST(PathModel, ArcLengthModeMeasuresDistance) {
  const PathModel path = PathModel::paper_diagonal(PathMode::ArcLength);
  const Vec2 p = path.position_at(std::sqrt(2.0) * 500.0);
  EXPECT_NEAR(p.x(), 500.0, 1e-9);
  EXPECT_NEAR(p.y(), 500.0, 1e-9);
}

TEST(PathModel, OutOfDomainThetaReportsValue) {
  const PathModel path = PathModel::paper_diagonal(PathMode::PaperLiteral, VelocityProfile::linear_decay(),
                                                   Interval{0.0, 1000.0});
  try {
    path.position_at(1200.0);
    FAIL() << "expected DomainError";
  } catch (const DomainError& e) {
    EXPECT_DOUBLE_EQ(e.value(), 1200.0);
  }
}

TEST(PathModel, PositionIsMonotoneAlongDefaultPath) {
  const PathModel path = PathModel::paper_diagonal();
  Vec2 previous = path.position_at(0.0);
  for (double theta = 1.0; theta <= 1000.0; theta += 1.0) {
    const Vec2 p = path.position_at(theta);
    EXPECT_GE(p.x(), previous.x());
    EXPECT_GE(p.y(), previous.y());
    previous = p;
  }
}

TEST(VelocityProfile, DefaultProfileValues) {
  const PathModel path = PathModel::paper_diagonal();
  EXPECT_DOUBLE_EQ(path.historical_velocity_at(0.0), 10.0);
  EXPECT_DOUBLE_EQ(path.historical_velocity_at(100.0), 5.0);
  EXPECT_NEAR(path.historical_velocity_at(200.0), 0.0, 1e-12);
}

TEST(VelocityProfile, PastZeroCrossingIsDomainError) {
  const PathModel path = PathModel::paper_diagonal();
  EXPECT_THROW(path.historical_velocity_at(201.0), DomainError);
}

TEST(VelocityProfile, NegativeProfileRejected) {
  EXPECT_THROW(VelocityProfile(Polynomial{1.0, -1.0}, Interval{0.0, 2.0}), ConfigError);
}

TEST(BasisIntegrals, LinearBasisClosedForm) {
  const PathModel path = PathModel::paper_diagonal();
  const Eigen::VectorXd psi = compute_basis_integrals(path, BasisSpec::polynomial(1), 0.0, 20.0);
  EXPECT_NEAR(psi[0], 20.0, 1e-12);
  EXPECT_NEAR(psi[1], 190.0, 1e-12);
}

TEST(BasisIntegrals, EmptyIntervalIsZero) {
  const PathModel path = PathModel::paper_diagonal();
  const Eigen::VectorXd psi = compute_basis_integrals(path, BasisSpec::polynomial(3), 50.0, 50.0);
  EXPECT_EQ(psi, Eigen::VectorXd::Zero(4));
}

TEST(BasisIntegrals, QuadraticEntryMatchesQuadrature) {
  const PathModel path = PathModel::paper_diagonal();
  const Eigen::VectorXd psi = compute_basis_integrals(path, BasisSpec::polynomial(2), 0.0, 20.0);
  const double oracle = rdv::oracle::gauss_legendre([](double t) { return std::pow(10.0 - t / 20.0, 2); }, 0.0, 20.0);
  EXPECT_NEAR(psi[2], 5420.0 / 3.0, 1e-9);
  EXPECT_NEAR(psi[2] / oracle, 1.0, 1e-10);
}

TEST(BasisIntegrals, NonPolynomialProfileNeedsTable) {
  const VelocityProfile profile([](double t) { return 10.0 * std::exp(-t / 100.0); }, Interval{0.0, 200.0});
  const PathModel path = PathModel::paper_diagonal(PathMode::PaperLiteral, profile);
  EXPECT_THROW(compute_basis_integrals(path, BasisSpec::polynomial(1), 0.0, 10.0), ConfigError);
  const BasisIntegralTable table(path, BasisSpec::polynomial(1));
  EXPECT_FALSE(table.closed_form());
  EXPECT_NEAR(table.psi(0.0, 10.0)[1], 1000.0 * (1.0 - std::exp(-0.1)), 1e-9);
}

TEST(BasisIntegrals, OutOfDomainEndpointThrows) {
  const PathModel path = PathModel::paper_diagonal();
  EXPECT_THROW(compute_basis_integrals(path, BasisSpec::polynomial(1), 0.0, 250.0), DomainError);
}

TEST(BasisIntegrals, AdditiveOverRandomSplits) {
  const PathModel path = PathModel::paper_diagonal();
  const BasisIntegralTable table(path, BasisSpec::polynomial(4));
  Rng rng(11);
  for (int i = 0; i < 100; ++i) {
    const double a = rng.uniform(0.0, 200.0), b = rng.uniform(0.0, 200.0);
    const double t0 = std::min(a, b), tf = std::max(a, b), tm = rng.uniform(t0, tf);
    const Eigen::VectorXd whole = table.psi(t0, tf);
    const Eigen::VectorXd parts = table.psi(t0, tm) + table.psi(tm, tf);
    for (Eigen::Index k = 0; k < whole.size(); ++k)
      EXPECT_NEAR(parts[k], whole[k], 1e-9 * std::max(1.0, std::abs(whole[k])));
  }
}

TEST(BasisIntegrals, ClosedFormMatchesIndependentQuadrature) {
  const PathModel path = PathModel::paper_diagonal();
  const BasisSpec basis = BasisSpec::polynomial(4);
  const BasisIntegralTable table(path, basis);
  Rng rng(12);
  for (int i = 0; i < 50; ++i) {
    const double a = rng.uniform(0.0, 200.0), b = rng.uniform(0.0, 200.0);
    const double t0 = std::min(a, b), tf = std::max(a, b);
    const Eigen::VectorXd psi = table.psi(t0, tf);
    const Eigen::VectorXd ref =
        oracle::quadrature_psi([&](double t) { return path.historical_velocity_at(t); }, basis.powers(), t0, tf);
    for (Eigen::Index k = 0; k < psi.size(); ++k)
      EXPECT_NEAR(psi[k], ref[k], 1e-8 * std::max(1e-300, std::abs(ref[k])));
  }
}

TEST(BasisIntegrals, RateIsBasisAtProfile) {
  const PathModel path = PathModel::paper_diagonal();
  const BasisIntegralTable table(path, BasisSpec::polynomial(2));
  const Eigen::VectorXd rate = table.psi_rate(40.0);
  EXPECT_NEAR(rate[0], 1.0, 1e-12);
  EXPECT_NEAR(rate[1], 8.0, 1e-12);
  EXPECT_NEAR(rate[2], 64.0, 1e-12);
}

TEST(BasisSpec, RejectsEmptyBasis) { EXPECT_THROW(BasisSpec(std::vector<unsigned>{}), ConfigError); }

}  // namespace
}  // namespace rdv
