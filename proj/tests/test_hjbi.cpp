#include <gtest/gtest.h>

#include "oracle.hpp"
#include "pensiongame/hjbi.hpp"

namespace pg = pensiongame;

TEST(Hjbi, GameOneCandidatePasses) {
  const auto m = oracle::bull();
  const auto p = oracle::g1_prefs();
  const auto s = pg::solve_game_one(m, p).value();
  const auto r = pg::hjbi_check_g1(s, m, p);
  EXPECT_TRUE(r.passed) << r.violation;
  EXPECT_LT(r.max_abs_residual_at_candidate, 1e-12);
  EXPECT_TRUE(r.argmin_at_candidate);
  EXPECT_EQ(r.x_points, 82);
  EXPECT_EQ(r.h_points, 82);
  EXPECT_EQ(r.control_points, 82);
}

TEST(Hjbi, PerturbedCandidateFails) {
  const auto m = oracle::bull();
  const auto p = oracle::g1_prefs();
  auto s = pg::solve_game_one(m, p).value();
  s.A *= 1.01;
  const auto r = pg::hjbi_check_g1(s, m, p);
  EXPECT_FALSE(r.passed);
  EXPECT_GT(r.max_abs_residual_at_candidate, 1e-6);
  EXPECT_NE(r.violation.find("union"), std::string::npos);
}

TEST(Hjbi, PerturbedAllocationFails) {
  const auto m = oracle::bull();
  const auto p = oracle::g1_prefs();
  auto s = pg::solve_game_one(m, p).value();
  s.invest_ratio_vec *= 1.05;
  EXPECT_FALSE(pg::hjbi_check_g1(s, m, p).passed);
}

TEST(Hjbi, NoAmbiguityFixesH) {
  const auto m = oracle::bull();
  auto p = oracle::g1_prefs();
  p.lambda = 0.0;
  p.mu = 0.0;
  const auto r = pg::hjbi_check_g1(pg::solve_game_one(m, p).value(), m, p);
  EXPECT_TRUE(r.passed) << r.violation;
  EXPECT_EQ(r.h_points, 2);
}

TEST(Hjbi, GameTwo) {
  const auto m = oracle::bear();
  const auto p = oracle::g2_prefs();
  auto s = pg::solve_game_two(m, p, {1.0, 2.0, 1.5}).value();
  const auto r = pg::hjbi_check_g2(s, m, p);
  EXPECT_TRUE(r.passed) << r.violation;
  s.E *= 1.01;
  EXPECT_FALSE(pg::hjbi_check_g2(s, m, p).passed);
}

TEST(Hjbi, TwoAssetMarket) {
  pg::MarketParams mp;
  mp.r = 0.01;
  mp.b.resize(2);
  mp.b << 0.06, 0.08;
  mp.sigma.resize(2, 2);
  mp.sigma << 0.2, 0.0, 0.06, 0.25;
  const auto m = pg::validate_market(mp).value();
  const auto p = oracle::g1_prefs();
  pg::HjbiGridSpec spec;
  spec.n_per_axis = 11;
  spec.n_x = 11;
  const auto r = pg::hjbi_check_g1(pg::solve_game_one(m, p).value(), m, p, spec);
  EXPECT_TRUE(r.passed) << r.violation;
  EXPECT_EQ(r.h_points, 2 * 121);
  EXPECT_EQ(r.control_points, 11 + 121);
}
