#include <gtest/gtest.h>

#include "oracle.hpp"
#include "pensiongame/market.hpp"

namespace pg = pensiongame;

TEST(Market, ScalarSharpe) {
  const auto m = oracle::bull();
  EXPECT_NEAR(m.sharpe().theta[0], oracle::kBullTheta, 1e-15);
  EXPECT_NEAR(m.sharpe().theta_sq, oracle::kBullThetaSq, 1e-14);
  EXPECT_NEAR(m.merton_direction()[0], (oracle::kBullB - oracle::kR) / (oracle::kBullSigma * oracle::kBullSigma),
              1e-12);
  EXPECT_NEAR(oracle::bear().sharpe().theta_sq, oracle::kBearThetaSq, 1e-18);
}

TEST(Market, RejectsBadInputs) {
  EXPECT_EQ(pg::validate_market(pg::scalar_market(0.0, 0.1, 0.2)).code(), pg::ErrorCode::NonPositiveRate);
  EXPECT_EQ(pg::validate_market(pg::scalar_market(-0.01, 0.1, 0.2)).code(), pg::ErrorCode::NonPositiveRate);
  EXPECT_EQ(pg::validate_market(pg::scalar_market(0.05, 0.05, 0.2)).code(), pg::ErrorCode::DriftBelowRiskFree);
  EXPECT_EQ(pg::validate_market(pg::scalar_market(0.05, 0.1, 0.0)).code(), pg::ErrorCode::SingularVolatility);

  pg::MarketParams m = pg::scalar_market(0.01, 0.1, 0.2);
  m.sigma = pg::Matrix::Identity(2, 2);
  EXPECT_EQ(pg::validate_market(m).code(), pg::ErrorCode::DimensionMismatch);

  pg::MarketParams sing;
  sing.r = 0.01;
  sing.b = pg::Vector::Constant(2, 0.08);
  sing.sigma.resize(2, 2);
  sing.sigma << 0.2, 0.1, 0.4, 0.2;
  EXPECT_EQ(pg::validate_market(sing).code(), pg::ErrorCode::SingularVolatility);
}

TEST(Market, TwoAssets) {
  pg::MarketParams p;
  p.r = 0.02;
  p.b.resize(2);
  p.b << 0.06, 0.09;
  p.sigma.resize(2, 2);
  p.sigma << 0.2, 0.0, 0.05, 0.3;
  const auto m = pg::validate_market(p).value();
  const pg::Vector theta = p.sigma.lu().solve(p.b - pg::Vector::Constant(2, p.r));
  EXPECT_NEAR((m.sharpe().theta - theta).norm(), 0.0, 1e-14);
  EXPECT_NEAR(m.sharpe().theta_sq, theta.squaredNorm(), 1e-14);
  const pg::Matrix cov = p.sigma * p.sigma.transpose();
  EXPECT_NEAR((cov * m.merton_direction() - m.excess_return()).norm(), 0.0, 1e-14);
  EXPECT_NEAR((m.cov_inv() * cov - pg::Matrix::Identity(2, 2)).norm(), 0.0, 1e-12);
}

TEST(Preferences, Validation) {
  pg::Preferences p = oracle::g1_prefs();
  EXPECT_TRUE(pg::validate_preferences(p).ok());
  auto with = [&](auto set) {
    pg::Preferences q = p;
    set(q);
    return pg::validate_preferences(q).code();
  };
  EXPECT_EQ(with([](auto& q) { q.gamma = 1.0; }), pg::ErrorCode::InvalidPreference);
  EXPECT_EQ(with([](auto& q) { q.delta = 1.0; }), pg::ErrorCode::InvalidPreference);
  EXPECT_EQ(with([](auto& q) { q.alpha = 0.0; }), pg::ErrorCode::InvalidPreference);
  EXPECT_EQ(with([](auto& q) { q.beta = -1.0; }), pg::ErrorCode::InvalidPreference);
  EXPECT_EQ(with([](auto& q) { q.lambda = -0.1; }), pg::ErrorCode::InvalidPreference);
  EXPECT_EQ(with([](auto& q) { q.mu = -0.1; }), pg::ErrorCode::InvalidPreference);
  EXPECT_NE(pg::validate_preferences([&] { auto q = p; q.gamma = 1.0; return q; }()).error().message.find("gamma"),
            std::string::npos);
}
