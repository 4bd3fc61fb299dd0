#pragma once

// Robust equilibrium of the first game: the union chooses the benefit rate,
// the firm chooses the risky allocation, and both maximize CRRA payoffs under
// their own worst-case measures. Also the cooperative (Pareto) problem in
// which both players maximize the union's payoff.

#include <cmath>
#include <string>

#include "pensiongame/gbm_law.hpp"
#include "pensiongame/market.hpp"
#include "pensiongame/result.hpp"

namespace pensiongame {

struct GameOneSolution {
  double A = 0.0;
  double B = 0.0;
  /// A^{-1/gamma}; the bracket of A, stored to avoid re-rooting A.
  double benefit_ratio = 0.0;
  /// Bracket of B, so that B = 1 / ((1 - delta) * b_bracket).
  double b_bracket = 0.0;
  /// Risky holdings per unit of surplus, Sigma^{-1}(b - r 1)/(mu + delta).
  Vector invest_ratio_vec;
  Vector h_union;  ///< lambda/(mu+delta) theta
  Vector h_firm;   ///< mu/(mu+delta) theta
  double theta_sq = 0.0;
  double mu_plus_delta = 0.0;

  /// Equilibrium benefit rate P*(x) = A^{-1/gamma} x.
  double benefit(double x) const { return benefit_ratio * x; }
  /// Equilibrium allocation pi*(x).
  Vector invest(double x) const { return invest_ratio_vec * x; }
};

struct ParetoSolution {
  double A0 = 0.0;
  double benefit_ratio = 0.0;
  Vector invest_ratio_vec;  ///< Sigma^{-1}(b - r 1)/(gamma + lambda)
  Vector h_star;            ///< lambda/(gamma + lambda) theta
};

/// Value pair (union, firm).
struct ValuePair {
  double union_value = 0.0;
  double firm_value = 0.0;
};

/// Bracket of A for a given squared Sharpe ratio; A = bracket^{-gamma}.
/// Exposed so the sensitivity module can perturb theta directly.
inline double game_one_benefit_ratio(double alpha, double r, double theta_sq, double mu_plus_delta,
                                     double gamma, double lambda) {
  const double md = mu_plus_delta;
  return alpha / gamma -
         ((1.0 - gamma) / gamma) *
             (r + (1.0 / md - (lambda + gamma) / (2.0 * md * md)) * theta_sq);
}

/// Core solver on already-derived market quantities. Also serves synthetic
/// inputs such as a zero Sharpe ratio, which validate_market() rejects.
inline Result<GameOneSolution> solve_game_one(double r, const SharpeInfo& sharpe, const Vector& merton_direction,
                                              const Preferences& p) {
  if (auto ok = validate_preferences(p); !ok) return ok.error();
  const double t2 = sharpe.theta_sq;
  const double md = p.mu + p.delta;
  const double g = p.gamma;
  const double d = p.delta;

  GameOneSolution s;
  s.theta_sq = t2;
  s.mu_plus_delta = md;
  s.benefit_ratio = game_one_benefit_ratio(p.alpha, r, t2, md, g, p.lambda);
  if (!(s.benefit_ratio > 0.0)) {
    return make_error(ErrorCode::InadmissibleA,
                      "A^(-1/gamma) bracket is " + std::to_string(s.benefit_ratio) + " (must be > 0)");
  }
  s.A = std::pow(s.benefit_ratio, -g);

  s.b_bracket = p.beta / (1.0 - d) + (p.alpha - r) / g +
                ((1.0 - g) * (p.lambda + g) / (2.0 * g * md * md) - (1.0 - g) / (g * md) -
                 1.0 / (2.0 * md)) *
                    t2;
  if (std::abs(s.b_bracket) < 1e-14) {
    return make_error(ErrorCode::InadmissibleB, "bracket of B vanishes (B unbounded)");
  }
  s.B = 1.0 / ((1.0 - d) * s.b_bracket);
  if (!(s.B > 0.0)) {
    return make_error(ErrorCode::InadmissibleB, "B = " + std::to_string(s.B) + " (must be > 0)");
  }

  s.invest_ratio_vec = merton_direction / md;
  s.h_union = (p.lambda / md) * sharpe.theta;
  s.h_firm = (p.mu / md) * sharpe.theta;
  return s;
}

inline Result<GameOneSolution> solve_game_one(const ValidatedMarket& m, const Preferences& p) {
  return solve_game_one(m.r(), m.sharpe(), m.merton_direction(), p);
}

inline Result<ValuePair> value_functions_g1(const GameOneSolution& sol, const Preferences& p, double s,
                                            double x) {
  if (!(x > 0.0)) return make_error(ErrorCode::NonPositiveSurplus, "surplus x must be > 0");
  ValuePair v;
  v.union_value = sol.A * std::exp(-p.alpha * s) * std::pow(x, 1.0 - p.gamma) / (1.0 - p.gamma);
  v.firm_value = sol.B * std::exp(-p.beta * s) * std::pow(x, 1.0 - p.delta) / (1.0 - p.delta);
  return v;
}

/// Law of the optimal surplus under the reference or a worst-case measure.
/// The volatility vector theta/(mu+delta) is the same under all three.
inline GbmLaw wealth_law_g1(const GameOneSolution& sol, double r, const SharpeInfo& sharpe,
                            const Preferences& p, MeasureTag tag) {
  const double md = sol.mu_plus_delta;
  const double t2 = sol.theta_sq;
  GbmLaw law;
  law.measure = tag;
  law.vol = sharpe.theta / md;
  law.log_drift = r + t2 / md - sol.benefit_ratio - t2 / (2.0 * md * md);
  switch (tag) {
    case MeasureTag::Reference: break;
    case MeasureTag::WorstCaseUnion: law.log_drift -= p.lambda * t2 / (md * md); break;
    case MeasureTag::WorstCaseFirm: law.log_drift -= p.mu * t2 / (md * md); break;
  }
  return law;
}

inline GbmLaw wealth_law_g1(const GameOneSolution& sol, const ValidatedMarket& m, const Preferences& p,
                            MeasureTag tag) {
  return wealth_law_g1(sol, m.r(), m.sharpe(), p, tag);
}

inline Result<ParetoSolution> solve_pareto(double r, const SharpeInfo& sharpe, const Vector& merton_direction,
                                           const Preferences& p) {
  if (auto ok = validate_preferences(p); !ok) return ok.error();
  const double g = p.gamma;
  const double gl = g + p.lambda;
  ParetoSolution s;
  s.benefit_ratio = p.alpha / g - ((1.0 - g) / g) * (r + sharpe.theta_sq / (2.0 * gl));
  if (!(s.benefit_ratio > 0.0)) {
    return make_error(ErrorCode::InadmissibleA0, "A0^(-1/gamma) bracket must be > 0");
  }
  s.A0 = std::pow(s.benefit_ratio, -g);
  s.invest_ratio_vec = merton_direction / gl;
  s.h_star = (p.lambda / gl) * sharpe.theta;
  return s;
}

inline Result<ParetoSolution> solve_pareto(const ValidatedMarket& m, const Preferences& p) {
  return solve_pareto(m.r(), m.sharpe(), m.merton_direction(), p);
}

}  // namespace pensiongame
