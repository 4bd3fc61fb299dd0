#pragma once

// Check suites run by `pensiongame verify`: moment oracles, the payoff
// triangle, the HJBI grid, and finite-difference sensitivities.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "pensiongame/game_one.hpp"
#include "pensiongame/game_two.hpp"
#include "pensiongame/hjbi.hpp"
#include "pensiongame/monte_carlo.hpp"
#include "pensiongame/sensitivity.hpp"
#include "pensiongame/stochastics.hpp"

namespace pensiongame {

struct Check {
  std::string name;
  double target = 0.0;
  double achieved = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct VerifyOptions {
  double x0 = 1.0;  ///< game one only; game two starts at barriers.x0
  std::uint64_t seed = 0;
  unsigned threads = 1;
  bool monte_carlo = true;
  std::int64_t mc_paths = 100000;
  double dt = 1.0 / 252.0;  ///< game one payoff grid
  double tail_tolerance = 1e-3;
  std::int64_t moment_paths = 100000;
  double dt_barrier = 1.0 / 2000.0;
  double horizon_cap = 200.0;
  /// Multiplies A (game one) or E (game two) before the HJBI check. A value
  /// other than 1 is a negative control and should make the check fail.
  double perturb_a = 1.0;
  HjbiGridSpec hjbi;
  double fd_step = 1e-6;
};

inline bool all_pass(const std::vector<Check>& cs) {
  return std::all_of(cs.begin(), cs.end(), [](const Check& c) { return c.pass; });
}

namespace detail {

inline Check abs_check(std::string name, double target, double achieved, double tol) {
  return {std::move(name), target, achieved, tol, std::abs(achieved - target) <= tol};
}

inline Check rel_check(std::string name, double target, double achieved, double rel) {
  const double tol = rel * std::abs(target);
  return {std::move(name), target, achieved, tol, std::abs(achieved - target) <= tol};
}

inline std::string fmt_exp(double m) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", m);
  return buf;
}

/// Sample moments of X(1) against the lognormal formula, 4 standard errors.
template <class LawFor>
void moment_checks(LawFor law_for, double x0, std::vector<double> exps, const VerifyOptions& opt,
                   std::vector<Check>& out) {
  std::sort(exps.begin(), exps.end());
  exps.erase(std::unique(exps.begin(), exps.end()), exps.end());
  PathGrid grid;
  grid.dt = 1.0 / 12.0;
  grid.n_steps = 12;
  grid.n_paths = opt.moment_paths;
  grid.seed = opt.seed;
  for (MeasureTag tag : {MeasureTag::Reference, MeasureTag::WorstCaseUnion, MeasureTag::WorstCaseFirm}) {
    const GbmLaw law = law_for(tag);
    auto paths = sample_paths(law, x0, grid, opt.threads);
    if (!paths) continue;
    std::vector<double> y(static_cast<std::size_t>(grid.n_paths));
    for (double m : exps) {
      for (std::int64_t i = 0; i < grid.n_paths; ++i) y[static_cast<std::size_t>(i)] = std::pow(paths->at(i, grid.n_steps), m);
      const McEstimate e = summarize(y, grid.seed);
      const double target = gbm_moment(law, x0, m, 1.0).value();
      out.push_back(abs_check("moment." + std::string(to_string(tag)) + ".m=" + fmt_exp(m), target, e.mean,
                              4.0 * e.std_err));
    }
  }
}

inline void hjbi_checks(const HjbiReport& r, std::vector<Check>& out) {
  out.push_back({"hjbi.residual_at_candidate", 0.0, r.max_abs_residual_at_candidate, 1e-9,
                 r.max_abs_residual_at_candidate <= 1e-9});
  out.push_back({"hjbi.min_over_h_slack", 0.0, r.min_over_h_slack, 1e-9, r.min_over_h_slack >= -1e-9});
  out.push_back({"hjbi.max_over_controls_slack", 0.0, r.max_over_controls_slack, 1e-9,
                 r.max_over_controls_slack <= 1e-9});
  out.push_back({"hjbi.argmin_at_candidate", 1.0, r.argmin_at_candidate ? 1.0 : 0.0, 0.0, r.argmin_at_candidate});
}

}  // namespace detail

/// Tolerance for a finite-difference partial: 1e-6 relative, with the scale
/// floored at 1e-3 |R / x| so that partials that vanish analytically are
/// compared against the rounding level of the difference quotient.
inline double fd_tolerance(double analytic, double ratio, double coordinate, double rel = 1e-6) {
  const double floor = 1e-3 * std::abs(ratio) / std::max(std::abs(coordinate), 1e-300);
  return rel * std::max(std::abs(analytic), floor);
}

inline std::vector<Check> fd_checks(const RatioPoint& at, double step = 1e-6) {
  std::vector<Check> out;
  const auto g = benefit_ratio_gradient(at, true);
  const double R = at.value();
  for (const char* name : {"alpha", "r", "theta", "mu", "delta", "gamma", "lambda"}) {
    const RatioParam which = *parse_ratio_param(name);
    RatioPoint tmp = at;
    const double x = detail::coordinate(tmp, which);
    const double an = analytic_partial(g, which);
    auto fd = fd_gradient(at, which, step);
    Check c{std::string("fd.") + name, an, fd ? *fd : std::nan(""), fd_tolerance(an, R, x), false};
    c.pass = fd && std::abs(*fd - an) <= c.tolerance;
    out.push_back(c);
  }
  return out;
}

inline std::vector<Check> verify_game_one(const ValidatedMarket& m, const Preferences& p, const VerifyOptions& opt) {
  std::vector<Check> out;
  const auto sol = solve_game_one(m, p).value();

  detail::moment_checks([&](MeasureTag t) { return wealth_law_g1(sol, m, p, t); }, opt.x0,
                        {1.0, 1.0 - p.gamma, 2.0 - 2.0 * p.gamma, 1.0 - p.delta, 2.0 - 2.0 * p.delta}, opt, out);

  const auto w = value_functions_g1(sol, p, 0.0, opt.x0).value();
  const double targets[2] = {w.union_value, w.firm_value};
  const Side sides[2] = {Side::Union, Side::Firm};
  for (int i = 0; i < 2; ++i) {
    auto an = analytic_payoff_g1(sol, m, p, sides[i], 0.0, opt.x0);
    Check c = detail::rel_check(std::string("payoff.analytic.") + to_string(sides[i]), targets[i],
                                an ? *an : std::nan(""), 1e-9);
    c.pass = c.pass && an.ok();
    out.push_back(c);
  }
  if (opt.monte_carlo) {
    PathGrid grid;
    grid.dt = opt.dt;
    grid.n_paths = opt.mc_paths;
    grid.seed = opt.seed;
    auto T = payoff_horizon_g1(sol, m, p, 0.0, opt.tail_tolerance);
    auto est = T ? mc_payoff_both_g1(sol, m, p, opt.x0, *T, grid, {opt.threads, false, opt.tail_tolerance})
                 : Result<std::array<McEstimate, 2>>(T.error());
    for (int i = 0; i < 2; ++i) {
      const std::string name = std::string("payoff.monte_carlo.") + to_string(sides[i]);
      if (!est) {
        out.push_back({name, targets[i], std::nan(""), 0.0, false});
        continue;
      }
      out.push_back(detail::abs_check(name, targets[i], (*est)[i].mean, 3.0 * (*est)[i].std_err));
    }
  }

  GameOneSolution hs = sol;
  hs.A *= opt.perturb_a;
  detail::hjbi_checks(hjbi_check_g1(hs, m, p, opt.hjbi), out);

  if (m.n() == 1) {
    for (auto& c : fd_checks(RatioPoint::from(m, p), opt.fd_step)) out.push_back(std::move(c));
  }
  return out;
}

inline std::vector<Check> verify_game_two(const ValidatedMarket& m, const Preferences& p, const Barriers& bar,
                                          const VerifyOptions& opt) {
  std::vector<Check> out;
  const auto sol = solve_game_two(m, p, bar).value();
  const double x0 = bar.x0;

  detail::moment_checks([&](MeasureTag t) { return wealth_law_g2(sol, m, p, t); }, x0,
                        {1.0, 1.0 - p.gamma, 2.0 - 2.0 * p.gamma, 1.0 - sol.eta}, opt, out);

  const double wu = union_value_g2(sol, p, 0.0, x0).value();
  auto an = analytic_payoff_union_g2(sol, m, p, 0.0, x0);
  Check cu = detail::rel_check("payoff.analytic.union", wu, an ? *an : std::nan(""), 1e-9);
  cu.pass = cu.pass && an.ok();
  out.push_back(cu);

  if (opt.monte_carlo) {
    PathGrid grid;
    grid.dt = opt.dt_barrier;
    grid.n_paths = opt.mc_paths;
    grid.seed = opt.seed;
    const double wf = firm_value_g2(sol, x0).value();
    const auto law = wealth_law_g2(sol, m, p, MeasureTag::WorstCaseFirm);
    const double pexit = exit_probability_gbm(law, bar.l, bar.v, x0).value();
    auto lad = mc_firm_payoff_g2_ladder(sol, m, p, grid, {4, 2, 1}, {opt.threads, opt.horizon_cap, 1e-3});
    if (!lad) {
      out.push_back({"payoff.monte_carlo.firm", wf, std::nan(""), 0.0, false});
      out.push_back({"exit_probability", pexit, std::nan(""), 0.0, false});
      out.push_back({"barrier.dt_ladder_monotone", 1.0, 0.0, 0.0, false});
    } else {
      const auto& fine = lad->back();
      out.push_back(detail::abs_check("payoff.monte_carlo.firm", wf, fine.payoff.mean,
                                      std::max(3.0 * fine.payoff.std_err, 0.005)));
      out.push_back(detail::abs_check("exit_probability", pexit, fine.upper_exit.mean, 3.0 * fine.upper_exit.std_err));
      const double d1 = (*lad)[0].payoff.mean - (*lad)[1].payoff.mean;
      const double d2 = (*lad)[1].payoff.mean - (*lad)[2].payoff.mean;
      const bool mono = (d1 > 0.0) == (d2 > 0.0) && std::abs(d2) < std::abs(d1);
      // achieved: ratio of successive refinement differences, below 1 when shrinking
      out.push_back({"barrier.dt_ladder_monotone", 1.0, d1 != 0.0 ? d2 / d1 : std::nan(""), 1.0, mono});
    }
  }

  GameTwoSolution hs = sol;
  hs.E *= opt.perturb_a;
  detail::hjbi_checks(hjbi_check_g2(hs, m, p, opt.hjbi), out);
  return out;
}

/// Pareto solution against game one with gamma = delta and lambda = mu.
inline std::vector<Check> verify_pareto(const ValidatedMarket& m, const Preferences& p) {
  std::vector<Check> out;
  const auto par = solve_pareto(m, p).value();
  Preferences tied = p;
  tied.delta = p.gamma;
  tied.mu = p.lambda;
  auto g1 = solve_game_one(m, tied);
  if (!g1) {
    out.push_back({"pareto.A0_vs_A", par.A0, std::nan(""), 0.0, false});
    return out;
  }
  out.push_back(detail::rel_check("pareto.A0_vs_A", g1->A, par.A0, 1e-10));
  out.push_back(detail::abs_check("pareto.invest_ratio", 0.0, (par.invest_ratio_vec - g1->invest_ratio_vec).cwiseAbs().maxCoeff(), 1e-12));
  out.push_back(detail::abs_check("pareto.h", 0.0, (par.h_star - g1->h_union).cwiseAbs().maxCoeff(), 1e-12));
  return out;
}

}  // namespace pensiongame
