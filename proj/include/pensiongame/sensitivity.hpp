#pragma once

// First-order sensitivities of the game-one benefit ratio A^{-1/gamma} and a
// Richardson central-difference check. The ratio is treated as a function of
// (alpha, r, theta, mu, delta, gamma, lambda) with theta an independent
// coordinate, so the r-partial holds theta fixed.

#include <cmath>
#include <optional>
#include <string>
#include <string_view>

#include "pensiongame/game_one.hpp"
#include "pensiongame/market.hpp"
#include "pensiongame/result.hpp"

namespace pensiongame {

/// Point at which the benefit ratio is differentiated. theta is the scalar
/// Sharpe ratio (n = 1) or |theta| for n > 1.
struct RatioPoint {
  double alpha = 0.0;
  double r = 0.0;
  double theta = 0.0;
  double mu = 0.0;
  double delta = 0.0;
  double gamma = 0.0;
  double lambda = 0.0;

  static RatioPoint from(const ValidatedMarket& m, const Preferences& p) {
    return {p.alpha, m.r(), std::sqrt(m.sharpe().theta_sq), p.mu, p.delta, p.gamma, p.lambda};
  }

  double value() const {
    return game_one_benefit_ratio(alpha, r, theta * theta, mu + delta, gamma, lambda);
  }
};

struct BenefitRatioGradient {
  double d_alpha = 0.0;
  double d_r = 0.0;
  /// d/d theta, defined for a scalar Sharpe ratio only.
  std::optional<double> d_theta;
  /// d/d (theta^T theta); available for every n.
  double d_theta_sq = 0.0;
  /// d/d (mu + delta); equal to both d/d mu and d/d delta.
  double d_mu_delta = 0.0;
  double d_gamma = 0.0;
  double d_lambda = 0.0;
};

inline BenefitRatioGradient benefit_ratio_gradient(const RatioPoint& x, bool scalar_theta = true) {
  const double g = x.gamma, lg = x.lambda + x.gamma, md = x.mu + x.delta, t2 = x.theta * x.theta;
  BenefitRatioGradient d;
  d.d_alpha = 1.0 / g;
  d.d_r = -(1.0 - g) / g;
  d.d_theta_sq = (1.0 - g) * (lg - 2.0 * md) / (2.0 * g * md * md);
  if (scalar_theta) d.d_theta = (1.0 - g) * (lg - 2.0 * md) * x.theta / (g * md * md);
  d.d_mu_delta = (1.0 - g) * (md - lg) * t2 / (g * md * md * md);
  d.d_gamma = (x.r - x.alpha) / (g * g) + (2.0 * md - x.lambda - g * g) * t2 / (2.0 * g * g * md * md);
  d.d_lambda = (1.0 - g) * t2 / (2.0 * g * md * md);
  return d;
}

inline BenefitRatioGradient benefit_ratio_gradient(const ValidatedMarket& m, const Preferences& p) {
  return benefit_ratio_gradient(RatioPoint::from(m, p), m.n() == 1);
}

enum class RatioParam { Alpha, R, Theta, Mu, Delta, Gamma, Lambda };

inline std::optional<RatioParam> parse_ratio_param(std::string_view s) {
  if (s == "alpha") return RatioParam::Alpha;
  if (s == "r") return RatioParam::R;
  if (s == "theta") return RatioParam::Theta;
  if (s == "mu") return RatioParam::Mu;
  if (s == "delta") return RatioParam::Delta;
  if (s == "gamma") return RatioParam::Gamma;
  if (s == "lambda") return RatioParam::Lambda;
  return std::nullopt;
}

namespace detail {

inline double& coordinate(RatioPoint& x, RatioParam which) {
  switch (which) {
    case RatioParam::Alpha: return x.alpha;
    case RatioParam::R: return x.r;
    case RatioParam::Theta: return x.theta;
    case RatioParam::Mu: return x.mu;
    case RatioParam::Delta: return x.delta;
    case RatioParam::Gamma: return x.gamma;
    case RatioParam::Lambda: return x.lambda;
  }
  return x.alpha;
}

/// Preferences valid and A > 0 at the shifted point.
inline bool admissible(const RatioPoint& x) {
  const Preferences p{x.alpha, 1.0, x.gamma, x.delta, x.lambda, x.mu};
  if (!validate_preferences(p)) return false;
  if (!(x.r > 0.0) || !(x.theta >= 0.0)) return false;
  return x.value() > 0.0;
}

}  // namespace detail

/// Central difference with absolute step h and one Richardson
/// extrapolation: (4 D(h/2) - D(h)) / 3.
inline Result<double> fd_gradient_step(const RatioPoint& at, RatioParam which, double h) {
  RatioPoint base = at;
  const double x0 = detail::coordinate(base, which);
  auto central = [&](double hh) -> std::optional<double> {
    RatioPoint up = at, dn = at;
    detail::coordinate(up, which) = x0 + hh;
    detail::coordinate(dn, which) = x0 - hh;
    if (!detail::admissible(up) || !detail::admissible(dn)) return std::nullopt;
    return (up.value() - dn.value()) / (2.0 * hh);
  };
  const auto d1 = central(h);
  const auto d2 = central(0.5 * h);
  if (!d1 || !d2) {
    return make_error(ErrorCode::InfeasiblePerturbation, "perturbed point loses admissibility (A > 0)");
  }
  return (4.0 * *d2 - *d1) / 3.0;
}

/// As fd_gradient_step with h = step*|x| (step when x = 0).
inline Result<double> fd_gradient(const RatioPoint& at, RatioParam which, double step = 1e-6) {
  RatioPoint base = at;
  const double x0 = detail::coordinate(base, which);
  return fd_gradient_step(at, which, x0 != 0.0 ? step * std::abs(x0) : step);
}

inline Result<double> fd_gradient(const ValidatedMarket& m, const Preferences& p, std::string_view param,
                                  double step = 1e-6) {
  const auto which = parse_ratio_param(param);
  if (!which) return make_error(ErrorCode::UnsupportedParameter, "unknown parameter " + std::string(param));
  if (*which == RatioParam::Theta && m.n() != 1) {
    return make_error(ErrorCode::UnsupportedParameter, "d/d theta needs a scalar Sharpe ratio (n = 1)");
  }
  return fd_gradient(RatioPoint::from(m, p), *which, step);
}

/// Analytic partial matching a RatioParam.
inline double analytic_partial(const BenefitRatioGradient& g, RatioParam which) {
  switch (which) {
    case RatioParam::Alpha: return g.d_alpha;
    case RatioParam::R: return g.d_r;
    case RatioParam::Theta: return g.d_theta.value_or(0.0);
    case RatioParam::Mu:
    case RatioParam::Delta: return g.d_mu_delta;
    case RatioParam::Gamma: return g.d_gamma;
    case RatioParam::Lambda: return g.d_lambda;
  }
  return 0.0;
}

}  // namespace pensiongame
