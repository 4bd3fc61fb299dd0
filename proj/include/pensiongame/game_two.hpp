#pragma once

// Robust equilibrium of the second game: the union keeps its CRRA payoff while
// the firm maximizes the probability that the surplus reaches the upper level
// v before the lower level l, penalized by relative entropy.

#include <cmath>
#include <string>

#include "pensiongame/game_one.hpp"
#include "pensiongame/gbm_law.hpp"
#include "pensiongame/market.hpp"
#include "pensiongame/result.hpp"

namespace pensiongame {

struct Barriers {
  double l = 1.0;   ///< lower surplus level
  double v = 2.0;   ///< upper surplus level
  double x0 = 1.5;  ///< initial surplus

  friend bool operator==(const Barriers&, const Barriers&) = default;
};

inline Result<Barriers> validate_barriers(const Barriers& b) {
  if (!(b.l > 0.0 && b.l < b.x0 && b.x0 < b.v) || !std::isfinite(b.v)) {
    return make_error(ErrorCode::InvalidBarriers, "barriers must satisfy 0 < l < x0 < v");
  }
  return b;
}

struct GameTwoSolution {
  double delta_disc = 0.0;  ///< discriminant of the quadratic for omega
  double omega = 0.0;
  double eta = 0.0;
  double E = 0.0;
  double c = 0.0;              ///< penalty shift l^{1-eta}/(v^{1-eta} - l^{1-eta})
  double benefit_ratio = 0.0;  ///< E^{-1/gamma} = r + theta^T theta/(2 omega)
  Vector invest_ratio_vec;     ///< Sigma^{-1}(b - r 1)/omega
  Vector h_union;              ///< lambda/omega theta
  Vector h_firm;               ///< mu(1 - eta)/omega theta
  double theta_sq = 0.0;
  Barriers barriers;

  double benefit(double x) const { return benefit_ratio * x; }
  Vector invest(double x) const { return invest_ratio_vec * x; }
  /// v^{1-eta} - l^{1-eta}
  double barrier_span() const {
    return std::pow(barriers.v, 1.0 - eta) - std::pow(barriers.l, 1.0 - eta);
  }
};

/// Solves for omega, eta, E and c. Only the "+sqrt(Delta)" root of the
/// quadratic for omega is used; the other root is discarded.
inline Result<GameTwoSolution> solve_game_two(double r, const SharpeInfo& sharpe, const Vector& merton_direction,
                                              const Preferences& p, const Barriers& bar) {
  if (auto ok = validate_preferences(p); !ok) return ok.error();
  if (auto ok = validate_barriers(bar); !ok) return ok.error();
  if (!(p.alpha > r)) {
    return make_error(ErrorCode::RequiresAlphaAboveR, "requires alpha > r");
  }
  if (!(std::abs(1.0 - p.mu) > 1e-12)) {
    return make_error(ErrorCode::MuEqualsOne, "requires mu != 1");
  }
  const double g = p.gamma;
  const double t2 = sharpe.theta_sq;
  const double lead = (1.0 - 0.5 * g) * t2;

  GameTwoSolution s;
  s.theta_sq = t2;
  s.barriers = bar;
  s.delta_disc = lead * lead - 2.0 * (p.alpha - r) * (1.0 - g) * (p.lambda + g) * t2;
  if (!(s.delta_disc > 0.0)) {
    return make_error(ErrorCode::NegativeDiscriminant,
                      "requires Delta > 0, got " + std::to_string(s.delta_disc));
  }
  s.omega = (lead + std::sqrt(s.delta_disc)) / (2.0 * (p.alpha - r));
  s.eta = (s.omega - p.mu) / (1.0 - p.mu);
  if (!(s.eta > 0.0 && s.eta < 1.0) || std::abs(1.0 - s.eta) < 1e-10) {
    return make_error(ErrorCode::EtaOutOfRange,
                      "requires 0 < eta < 1, got eta = " + std::to_string(s.eta));
  }
  s.benefit_ratio = r + t2 / (2.0 * s.omega);
  s.E = std::pow(s.benefit_ratio, -g);
  s.c = std::pow(bar.l, 1.0 - s.eta) / s.barrier_span();
  s.invest_ratio_vec = merton_direction / s.omega;
  s.h_union = (p.lambda / s.omega) * sharpe.theta;
  s.h_firm = (p.mu * (1.0 - s.eta) / s.omega) * sharpe.theta;
  return s;
}

inline Result<GameTwoSolution> solve_game_two(const ValidatedMarket& m, const Preferences& p,
                                              const Barriers& bar) {
  return solve_game_two(m.r(), m.sharpe(), m.merton_direction(), p, bar);
}

/// Union value E e^{-alpha s} x^{1-gamma}/(1-gamma); defined for any x > 0.
inline Result<double> union_value_g2(const GameTwoSolution& sol, const Preferences& p, double s, double x) {
  if (!(x > 0.0)) return make_error(ErrorCode::NonPositiveSurplus, "surplus x must be > 0");
  return sol.E * std::exp(-p.alpha * s) * std::pow(x, 1.0 - p.gamma) / (1.0 - p.gamma);
}

/// Firm value (x^{1-eta} - l^{1-eta})/(v^{1-eta} - l^{1-eta}) on [l, v].
/// Time-homogeneous; exactly 0 at l and 1 at v.
inline Result<double> firm_value_g2(const GameTwoSolution& sol, double x) {
  const Barriers& bar = sol.barriers;
  if (!(x >= bar.l && x <= bar.v)) {
    return make_error(ErrorCode::SurplusOutsideBarriers, "firm value defined only for l <= x <= v");
  }
  if (x == bar.l) return 0.0;
  if (x == bar.v) return 1.0;
  return (std::pow(x, 1.0 - sol.eta) - std::pow(bar.l, 1.0 - sol.eta)) / sol.barrier_span();
}

inline Result<ValuePair> value_functions_g2(const GameTwoSolution& sol, const Preferences& p, double s,
                                            double x) {
  auto u = union_value_g2(sol, p, s, x);
  if (!u) return u.error();
  auto f = firm_value_g2(sol, x);
  if (!f) return f.error();
  return ValuePair{*u, *f};
}

inline GbmLaw wealth_law_g2(const GameTwoSolution& sol, double r, const SharpeInfo& sharpe, const Preferences& p,
                            MeasureTag tag) {
  const double w = sol.omega;
  const double t2 = sol.theta_sq;
  GbmLaw law;
  law.measure = tag;
  law.vol = sharpe.theta / w;
  law.log_drift = r + t2 / w - sol.benefit_ratio - t2 / (2.0 * w * w);
  switch (tag) {
    case MeasureTag::Reference: break;
    case MeasureTag::WorstCaseUnion: law.log_drift -= p.lambda * t2 / (w * w); break;
    case MeasureTag::WorstCaseFirm: law.log_drift -= p.mu * (1.0 - sol.eta) * t2 / (w * w); break;
  }
  return law;
}

inline GbmLaw wealth_law_g2(const GameTwoSolution& sol, const ValidatedMarket& m, const Preferences& p,
                            MeasureTag tag) {
  return wealth_law_g2(sol, m.r(), m.sharpe(), p, tag);
}

}  // namespace pensiongame
