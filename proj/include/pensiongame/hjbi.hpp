#pragma once

// Grid check of the HJBI sign properties at a candidate equilibrium. For
// each player the generator
//   G = W_s + (r x + pi^T(b - r1) - P - pi^T sigma h) W_x + 1/2 pi^T Sigma pi W_xx + Phi
// is evaluated with the closed-form value function W. At the candidate:
//   (i)   G >= 0 over the measure-change grid, controls at equilibrium;
//   (ii)  G <= 0 over the player's own control grid, h at equilibrium;
//   (iii) G = 0 at the full candidate.
// Slacks are divided by (1 + |W|) before comparison with the tolerance.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "pensiongame/game_one.hpp"
#include "pensiongame/game_two.hpp"
#include "pensiongame/market.hpp"
#include "pensiongame/numeric.hpp"

namespace pensiongame {

struct HjbiGridSpec {
  double x_lo = 0.5;
  double x_hi = 2.0;
  int n_x = 41;
  /// Controls and h range over candidate * (1 + u), u in [-rel_range, rel_range].
  double rel_range = 0.5;
  int n_per_axis = 41;
  double tol = 1e-9;
};

struct HjbiReport {
  double max_abs_residual_at_candidate = 0.0;
  /// Most negative normalized G over the h grid (property (i)); >= -tol passes.
  double min_over_h_slack = std::numeric_limits<double>::infinity();
  /// Most positive normalized G - 0 over the control grid (property (ii)).
  double max_over_controls_slack = -std::numeric_limits<double>::infinity();
  std::int64_t x_points = 0;
  std::int64_t h_points = 0;
  std::int64_t control_points = 0;
  /// Whether the h-grid minimum of G sits at the candidate h for every x.
  bool argmin_at_candidate = true;
  bool passed = true;
  std::string violation;  ///< first violation, empty when passed

  void merge(const HjbiReport& o) {
    max_abs_residual_at_candidate = std::max(max_abs_residual_at_candidate, o.max_abs_residual_at_candidate);
    min_over_h_slack = std::min(min_over_h_slack, o.min_over_h_slack);
    max_over_controls_slack = std::max(max_over_controls_slack, o.max_over_controls_slack);
    x_points += o.x_points;
    h_points += o.h_points;
    control_points += o.control_points;
    argmin_at_candidate = argmin_at_candidate && o.argmin_at_candidate;
    if (passed && !o.passed) violation = o.violation;
    passed = passed && o.passed;
  }
};

namespace detail {

/// Tensor grid candidate_i (1 + u_i). A zero component is spread additively
/// over +-rel_range * max|candidate| (or +-rel_range when all are zero).
inline std::vector<Vector> box_grid(const Vector& cand, double rel_range, int n_per_axis) {
  const auto n = cand.size();
  const double scale = cand.cwiseAbs().maxCoeff() > 0.0 ? cand.cwiseAbs().maxCoeff() : 1.0;
  const auto us = linspace(-rel_range, rel_range, n_per_axis);
  std::vector<Vector> pts;
  std::vector<int> ix(static_cast<std::size_t>(n), 0);
  for (;;) {
    Vector v(n);
    for (Eigen::Index d = 0; d < n; ++d) {
      const double u = us[static_cast<std::size_t>(ix[static_cast<std::size_t>(d)])];
      v[d] = cand[d] != 0.0 ? cand[d] * (1.0 + u) : scale * u;
    }
    pts.push_back(std::move(v));
    Eigen::Index d = 0;
    while (d < n && ++ix[static_cast<std::size_t>(d)] == static_cast<int>(us.size())) {
      ix[static_cast<std::size_t>(d)] = 0;
      ++d;
    }
    if (d == n) break;
  }
  return pts;
}

/// Closed-form value and derivatives of one player at (s, x).
struct ValueJet {
  double w = 0.0, ws = 0.0, wx = 0.0, wxx = 0.0;
};

/// One player's generator data. The other player's control stays at its
/// equilibrium value and enters through the drift.
struct PlayerProblem {
  std::function<ValueJet(double)> jet;  ///< value at (s = 0, x)
  /// Running reward without the penalty, at surplus x and benefit P.
  std::function<double(double, double)> reward;
  /// Entropy penalty pen_k h^T h (W + pen_c); pen_k = 0 when h is fixed at 0.
  double pen_k = 0.0;
  double pen_c = 0.0;
  double r = 0.0;
  Vector excess;  ///< b - r 1
  Matrix sigma;
  Matrix cov;
  double benefit_ratio = 0.0;  ///< P* / x
  Vector invest_ratio;         ///< pi* / x
  Vector h_star;
  bool h_free = true;  ///< false when the ambiguity aversion is 0 (h fixed at 0)
  bool controls_benefit = true;  ///< player's own control: P (union) or pi (firm)
  const char* name = "";
};

inline HjbiReport check_player(const PlayerProblem& pp, const std::vector<double>& xs, const HjbiGridSpec& spec) {
  HjbiReport rep;
  rep.x_points = static_cast<std::int64_t>(xs.size());
  const std::vector<Vector> hs = pp.h_free ? box_grid(pp.h_star, spec.rel_range, spec.n_per_axis)
                                           : std::vector<Vector>{Vector::Zero(pp.h_star.size())};
  // Index of the candidate on the h grid: the all-zero offset.
  std::size_t h_cand = 0;
  for (std::size_t i = 0; i < hs.size(); ++i) {
    if ((hs[i] - pp.h_star).norm() <= (hs[h_cand] - pp.h_star).norm()) h_cand = i;
  }
  std::vector<Vector> pis;
  std::vector<double> ps;
  if (pp.controls_benefit) {
    for (double u : linspace(-spec.rel_range, spec.rel_range, spec.n_per_axis)) ps.push_back(pp.benefit_ratio * (1.0 + u));
  } else {
    pis = box_grid(pp.invest_ratio, spec.rel_range, spec.n_per_axis);
  }
  rep.h_points = static_cast<std::int64_t>(hs.size());
  rep.control_points = static_cast<std::int64_t>(pp.controls_benefit ? ps.size() : pis.size());

  // Per-unit-surplus pieces that do not depend on x.
  const Vector sig_pi_star = pp.sigma.transpose() * pp.invest_ratio;  // sigma^T pi*/x
  const double pe_star = pp.invest_ratio.dot(pp.excess);
  const double pcp_star = pp.invest_ratio.dot(pp.cov * pp.invest_ratio);
  std::vector<double> h_cross(hs.size()), h_sq(hs.size());
  for (std::size_t i = 0; i < hs.size(); ++i) {
    h_cross[i] = sig_pi_star.dot(hs[i]);
    h_sq[i] = hs[i].squaredNorm();
  }
  const Vector sig_h_star = pp.sigma * pp.h_star;
  const double hsq_star = pp.h_star.squaredNorm();
  std::vector<double> pi_e(pis.size()), pi_cross(pis.size()), pi_cov(pis.size());
  for (std::size_t j = 0; j < pis.size(); ++j) {
    pi_e[j] = pis[j].dot(pp.excess);
    pi_cross[j] = pis[j].dot(sig_h_star);
    pi_cov[j] = pis[j].dot(pp.cov * pis[j]);
  }

  auto fail = [&](const std::string& what, double x, double slack) {
    if (rep.passed) {
      rep.violation = std::string(pp.name) + ": " + what + " at x = " + std::to_string(x) +
                      ", normalized slack " + std::to_string(slack);
    }
    rep.passed = false;
  };

  for (double x : xs) {
    const ValueJet v = pp.jet(x);
    const double scale = 1.0 + std::abs(v.w);
    const double P_star = pp.benefit_ratio * x;
    // G with per-unit-surplus allocation q (pi = q x), benefit P, h entering
    // through the cross term c = q^T sigma h and hh = h^T h.
    const double pen_w = pp.pen_k * (v.w + pp.pen_c);
    auto G = [&](double qe, double qcq, double P, double reward, double c, double hh) {
      const double drift = pp.r * x + x * qe - P - x * c;
      return v.ws + drift * v.wx + 0.5 * x * x * qcq * v.wxx + reward + hh * pen_w;
    };
    const double r_star = pp.reward(x, P_star);

    const double g_star = G(pe_star, pcp_star, P_star, r_star, sig_pi_star.dot(pp.h_star), hsq_star) / scale;
    rep.max_abs_residual_at_candidate = std::max(rep.max_abs_residual_at_candidate, std::abs(g_star));
    if (!(std::abs(g_star) <= spec.tol)) fail("residual at the candidate", x, g_star);

    double g_min = std::numeric_limits<double>::infinity();
    std::size_t arg = 0;
    for (std::size_t i = 0; i < hs.size(); ++i) {
      const double g = G(pe_star, pcp_star, P_star, r_star, h_cross[i], h_sq[i]) / scale;
      if (g < g_min) {
        g_min = g;
        arg = i;
      }
    }
    rep.min_over_h_slack = std::min(rep.min_over_h_slack, g_min);
    if (!(g_min >= -spec.tol)) fail("property (i) G >= 0 over h", x, g_min);
    // Ties within rounding count as the candidate.
    if (arg != h_cand) {
      const double g_c = G(pe_star, pcp_star, P_star, r_star, h_cross[h_cand], h_sq[h_cand]) / scale;
      if (g_c - g_min > 1e-14 * (1.0 + std::abs(g_min))) rep.argmin_at_candidate = false;
    }

    double g_max = -std::numeric_limits<double>::infinity();
    const double c_star_h = pp.invest_ratio.dot(sig_h_star);
    if (pp.controls_benefit) {
      for (double pr : ps) {
        g_max = std::max(g_max, G(pe_star, pcp_star, pr * x, pp.reward(x, pr * x), c_star_h, hsq_star) / scale);
      }
    } else {
      for (std::size_t j = 0; j < pis.size(); ++j) {
        g_max = std::max(g_max, G(pi_e[j], pi_cov[j], P_star, r_star, pi_cross[j], hsq_star) / scale);
      }
    }
    rep.max_over_controls_slack = std::max(rep.max_over_controls_slack, g_max);
    if (!(g_max <= spec.tol)) fail("property (ii) G <= 0 over controls", x, g_max);
  }
  return rep;
}

inline std::vector<double> x_grid(const HjbiGridSpec& spec, double lo, double hi) {
  return linspace(std::max(spec.x_lo, lo), std::min(spec.x_hi, hi), spec.n_x);
}

}  // namespace detail

/// Checks both players of game one at s = 0 (the generator is time-homogeneous
/// after the discount factor, so s = 0 loses no generality).
inline HjbiReport hjbi_check_g1(const GameOneSolution& sol, const ValidatedMarket& m, const Preferences& p,
                                const HjbiGridSpec& spec = {}) {
  const auto xs = detail::x_grid(spec, 0.0, std::numeric_limits<double>::infinity());
  detail::PlayerProblem base;
  base.r = m.r();
  base.excess = m.excess_return();
  base.sigma = m.sigma();
  base.cov = m.cov();
  base.benefit_ratio = sol.benefit_ratio;
  base.invest_ratio = sol.invest_ratio_vec;

  detail::PlayerProblem u = base;
  u.name = "union";
  u.h_star = sol.h_union;
  u.h_free = p.lambda > 0.0;
  u.controls_benefit = true;
  const double A = sol.A, g = p.gamma, lam = p.lambda;
  u.jet = [A, g, a = p.alpha](double x) {
    detail::ValueJet j;
    j.w = A * std::pow(x, 1.0 - g) / (1.0 - g);
    j.ws = -a * j.w;
    j.wx = A * std::pow(x, -g);
    j.wxx = -g * A * std::pow(x, -g - 1.0);
    return j;
  };
  u.reward = [g](double, double P) { return std::pow(P, 1.0 - g) / (1.0 - g); };
  if (lam > 0.0) u.pen_k = (1.0 - g) / (2.0 * lam);

  detail::PlayerProblem f = base;
  f.name = "firm";
  f.h_star = sol.h_firm;
  f.h_free = p.mu > 0.0;
  f.controls_benefit = false;
  const double B = sol.B, d = p.delta, mu = p.mu;
  f.jet = [B, d, b = p.beta](double x) {
    detail::ValueJet j;
    j.w = B * std::pow(x, 1.0 - d) / (1.0 - d);
    j.ws = -b * j.w;
    j.wx = B * std::pow(x, -d);
    j.wxx = -d * B * std::pow(x, -d - 1.0);
    return j;
  };
  f.reward = [d](double x, double) { return std::pow(x, 1.0 - d) / (1.0 - d); };
  if (mu > 0.0) f.pen_k = (1.0 - d) / (2.0 * mu);

  HjbiReport rep = detail::check_player(u, xs, spec);
  rep.merge(detail::check_player(f, xs, spec));
  return rep;
}

/// Game two: union as in game one with E in place of A; the firm's value is
/// time-homogeneous and checked on [l, v] intersected with the x range.
inline HjbiReport hjbi_check_g2(const GameTwoSolution& sol, const ValidatedMarket& m, const Preferences& p,
                                const HjbiGridSpec& spec = {}) {
  detail::PlayerProblem base;
  base.r = m.r();
  base.excess = m.excess_return();
  base.sigma = m.sigma();
  base.cov = m.cov();
  base.benefit_ratio = sol.benefit_ratio;
  base.invest_ratio = sol.invest_ratio_vec;

  detail::PlayerProblem u = base;
  u.name = "union";
  u.h_star = sol.h_union;
  u.h_free = p.lambda > 0.0;
  u.controls_benefit = true;
  const double E = sol.E, g = p.gamma, lam = p.lambda;
  u.jet = [E, g, a = p.alpha](double x) {
    detail::ValueJet j;
    j.w = E * std::pow(x, 1.0 - g) / (1.0 - g);
    j.ws = -a * j.w;
    j.wx = E * std::pow(x, -g);
    j.wxx = -g * E * std::pow(x, -g - 1.0);
    return j;
  };
  u.reward = [g](double, double P) { return std::pow(P, 1.0 - g) / (1.0 - g); };
  if (lam > 0.0) u.pen_k = (1.0 - g) / (2.0 * lam);

  detail::PlayerProblem f = base;
  f.name = "firm";
  f.h_star = sol.h_firm;
  f.h_free = p.mu > 0.0;
  f.controls_benefit = false;
  const double eta = sol.eta, span = sol.barrier_span(), c = sol.c, mu = p.mu;
  const double l_pow = std::pow(sol.barriers.l, 1.0 - eta);
  f.jet = [eta, span, l_pow](double x) {
    detail::ValueJet j;
    j.w = (std::pow(x, 1.0 - eta) - l_pow) / span;
    j.wx = (1.0 - eta) * std::pow(x, -eta) / span;
    j.wxx = -eta * (1.0 - eta) * std::pow(x, -eta - 1.0) / span;
    return j;
  };
  f.reward = [](double, double) { return 0.0; };
  if (mu > 0.0) f.pen_k = 1.0 / (2.0 * mu);
  f.pen_c = c;

  HjbiReport rep = detail::check_player(u, detail::x_grid(spec, 0.0, std::numeric_limits<double>::infinity()), spec);
  rep.merge(detail::check_player(f, detail::x_grid(spec, sol.barriers.l, sol.barriers.v), spec));
  return rep;
}

}  // namespace pensiongame
