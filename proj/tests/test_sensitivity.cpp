#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracle.hpp"
#include "pensiongame/sensitivity.hpp"
#include "pensiongame/verify.hpp"

namespace pg = pensiongame;

TEST(Sensitivity, OracleLambdaPartial) {
  const auto g = pg::benefit_ratio_gradient(oracle::bull(), oracle::g1_prefs());
  EXPECT_NEAR(g.d_lambda, oracle::kG1DLambda, 1e-15);
  EXPECT_DOUBLE_EQ(g.d_alpha, 0.5);
  EXPECT_DOUBLE_EQ(g.d_r, 0.5);
}

TEST(Sensitivity, ThetaSquaredChainRule) {
  const auto at = pg::RatioPoint::from(oracle::bull(), oracle::g1_prefs());
  const auto g = pg::benefit_ratio_gradient(at);
  EXPECT_NEAR(*g.d_theta, 2.0 * at.theta * g.d_theta_sq, 1e-14);
}

TEST(Sensitivity, RandomDrawsAgreeWithDifferences) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> A(0.01, 0.1), R(0.001, 0.05), T(0.05, 1.5), U(0.0, 4.0), G(1.05, 10.0);
  int used = 0;
  while (used < 40) {
    const pg::RatioPoint at{A(rng), R(rng), T(rng), U(rng), G(rng), G(rng), U(rng)};
    if (!(at.value() > 0.0)) continue;
    ++used;
    for (const auto& c : pg::fd_checks(at)) EXPECT_TRUE(c.pass) << c.name << " " << c.target << " " << c.achieved;
  }
}

TEST(Sensitivity, MuDeltaPartialsAgree) {
  const pg::RatioPoint at{0.03, 0.01, 0.8, 0.75, 2.5, 3.0, 1.25};
  const double h = 0x1.0p-22;
  EXPECT_EQ(pg::fd_gradient_step(at, pg::RatioParam::Mu, h).value(),
            pg::fd_gradient_step(at, pg::RatioParam::Delta, h).value());
}

// lambda + gamma = mu + delta makes the mu partial vanish.
TEST(Sensitivity, VanishingPartial) {
  const pg::RatioPoint at{0.03, 0.01, 0.8, 1.0, 3.0, 2.5, 1.5};
  const auto g = pg::benefit_ratio_gradient(at);
  EXPECT_NEAR(g.d_mu_delta, 0.0, 1e-16);
  const double fd = pg::fd_gradient(at, pg::RatioParam::Mu).value();
  EXPECT_LE(std::abs(fd), pg::fd_tolerance(0.0, at.value(), at.mu));
}

TEST(Sensitivity, Errors) {
  const auto m = oracle::bull();
  const auto p = oracle::g1_prefs();
  EXPECT_EQ(pg::fd_gradient(m, p, "kappa").code(), pg::ErrorCode::UnsupportedParameter);
  pg::MarketParams mp;
  mp.r = 0.01;
  mp.b = pg::Vector::Constant(2, 0.05);
  mp.sigma = 0.2 * pg::Matrix::Identity(2, 2);
  EXPECT_EQ(pg::fd_gradient(pg::validate_market(mp).value(), p, "theta").code(),
            pg::ErrorCode::UnsupportedParameter);
  EXPECT_FALSE(pg::benefit_ratio_gradient(pg::validate_market(mp).value(), p).d_theta.has_value());
  // lambda = 0 sits on the boundary: lambda - h is not a valid preference
  pg::RatioPoint at = pg::RatioPoint::from(m, p);
  at.lambda = 0.0;
  EXPECT_EQ(pg::fd_gradient(at, pg::RatioParam::Lambda).code(), pg::ErrorCode::InfeasiblePerturbation);
}
