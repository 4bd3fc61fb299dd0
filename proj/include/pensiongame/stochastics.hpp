#pragma once

// Exact simulation and analytic oracles for the optimal surplus, which is a
// geometric Brownian motion under each of the three measures.

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pensiongame/game_one.hpp"
#include "pensiongame/game_two.hpp"
#include "pensiongame/gbm_law.hpp"
#include "pensiongame/parallel.hpp"
#include "pensiongame/random.hpp"
#include "pensiongame/result.hpp"

namespace pensiongame {

struct PathGrid {
  double t0 = 0.0;
  double dt = 1.0 / 252.0;
  std::int64_t n_steps = 1;
  std::int64_t n_paths = 1;
  std::uint64_t seed = 0;

  double horizon() const { return t0 + static_cast<double>(n_steps) * dt; }
};

inline Result<PathGrid> validate_grid(const PathGrid& g) {
  if (!(g.dt > 0.0) || !std::isfinite(g.dt) || g.n_steps < 1 || g.n_paths < 1 || !std::isfinite(g.t0)) {
    return make_error(ErrorCode::InvalidGrid, "grid needs dt > 0, n_steps >= 1, n_paths >= 1");
  }
  return g;
}

struct McEstimate {
  double mean = 0.0;
  double std_err = 0.0;
  std::int64_t n = 0;
  std::uint64_t seed = 0;
};

/// Sample mean and standard error, summed in index order.
inline McEstimate summarize(std::span<const double> y, std::uint64_t seed) {
  McEstimate e;
  e.n = static_cast<std::int64_t>(y.size());
  e.seed = seed;
  if (y.empty()) return e;
  double sum = 0.0;
  for (double v : y) sum += v;
  e.mean = sum / static_cast<double>(y.size());
  if (y.size() > 1) {
    double ss = 0.0;
    for (double v : y) ss += (v - e.mean) * (v - e.mean);
    e.std_err = std::sqrt(ss / static_cast<double>(y.size() - 1) / static_cast<double>(y.size()));
  }
  return e;
}

/// E[X(t)^m] for X(0) = x0:  x0^m exp{(m log_drift + m^2 |vol|^2/2) t}.
inline Result<double> gbm_moment(const GbmLaw& law, double x0, double m, double t) {
  if (!(x0 > 0.0)) return make_error(ErrorCode::NonPositiveStart, "x0 must be > 0");
  if (!(t >= 0.0)) return make_error(ErrorCode::InvalidGrid, "t must be >= 0");
  const double g = m * law.log_drift + 0.5 * m * m * law.vol_sq();
  return std::pow(x0, m) * std::exp(g * t);
}

/// Growth rate of t -> E[X(t)^m].
inline double moment_growth(const GbmLaw& law, double m) {
  return m * law.log_drift + 0.5 * m * m * law.vol_sq();
}

/// Surplus paths, row-major: path i occupies values[i*(n_steps+1) ...],
/// starting with X(t0) = x0.
struct PathArray {
  double t0 = 0.0;
  double dt = 0.0;
  std::int64_t n_steps = 0;
  std::int64_t n_paths = 0;
  std::vector<double> values;

  double time(std::int64_t k) const { return t0 + static_cast<double>(k) * dt; }
  double at(std::int64_t path, std::int64_t k) const { return values[path * (n_steps + 1) + k]; }
};

/// Exact log-normal stepping. Only vol^T dW enters, so one standard normal
/// per step, scaled by |vol| sqrt(dt), reproduces the law for any n. Path i
/// draws from substream (seed, i) whatever the thread count.
inline Result<PathArray> sample_paths(const GbmLaw& law, double x0, const PathGrid& grid, unsigned threads = 1) {
  if (auto ok = validate_grid(grid); !ok) return ok.error();
  if (!(x0 > 0.0)) return make_error(ErrorCode::NonPositiveStart, "x0 must be > 0");
  PathArray out;
  out.t0 = grid.t0;
  out.dt = grid.dt;
  out.n_steps = grid.n_steps;
  out.n_paths = grid.n_paths;
  const std::int64_t stride = grid.n_steps + 1;
  out.values.assign(static_cast<std::size_t>(grid.n_paths * stride), 0.0);
  const double mean_inc = law.log_drift * grid.dt;
  const double sd_inc = std::sqrt(law.vol_sq() * grid.dt);
  const double log_x0 = std::log(x0);

  parallel_for(grid.n_paths, threads, [&](std::int64_t path) {
    random::NormalStream ns(grid.seed, static_cast<std::uint64_t>(path));
    double* row = out.values.data() + path * stride;
    row[0] = x0;
    double log_x = log_x0;
    for (std::int64_t k = 1; k <= grid.n_steps; ++k) {
      log_x += mean_inc + sd_inc * ns.next();
      row[k] = std::exp(log_x);
    }
  });
  return out;
}

/// Probability that the surplus reaches v before l, started at x0.
inline Result<double> exit_probability_gbm(const GbmLaw& law, double l, double v, double x0) {
  if (!(l > 0.0 && l < v)) return make_error(ErrorCode::InvalidBarriers, "requires 0 < l < v");
  if (!(x0 >= l && x0 <= v)) return make_error(ErrorCode::SurplusOutsideBarriers, "requires l <= x0 <= v");
  const double s2 = law.vol_sq();
  if (!(s2 > 0.0)) return make_error(ErrorCode::DegenerateVolatility, "variance rate must be > 0");
  if (x0 == l) return 0.0;
  if (x0 == v) return 1.0;
  const double rho = 1.0 - 2.0 * law.sde_drift() / s2;
  if (std::abs(rho) <= 1e-10) return (std::log(x0) - std::log(l)) / (std::log(v) - std::log(l));
  // x^rho - l^rho written as l^rho expm1(rho log(x/l)) to keep precision near rho = 0.
  return std::expm1(rho * std::log(x0 / l)) / std::expm1(rho * std::log(v / l));
}

enum class Side { Union, Firm };

constexpr const char* to_string(Side s) { return s == Side::Union ? "union" : "firm"; }

/// Running payoff k e^{-rho t} X(t)^m with X a GBM of the given law. Both
/// robust payoffs of game one, penalty included, take this form at the
/// equilibrium strategies.
struct PowerIntegrand {
  double k = 0.0;
  double m = 0.0;
  double rho = 0.0;
  GbmLaw law;

  double growth() const { return moment_growth(law, m); }
};

inline PowerIntegrand payoff_integrand_g1(const GameOneSolution& sol, double r, const SharpeInfo& sharpe,
                                          const Preferences& p, Side side) {
  PowerIntegrand f;
  if (side == Side::Union) {
    f.m = 1.0 - p.gamma;
    f.rho = p.alpha;
    f.k = std::pow(sol.benefit_ratio, f.m) / f.m;
    if (p.lambda > 0.0) f.k += sol.h_union.squaredNorm() * sol.A / (2.0 * p.lambda);
    f.law = wealth_law_g1(sol, r, sharpe, p, MeasureTag::WorstCaseUnion);
  } else {
    f.m = 1.0 - p.delta;
    f.rho = p.beta;
    f.k = 1.0 / f.m;
    if (p.mu > 0.0) f.k += sol.h_firm.squaredNorm() * sol.B / (2.0 * p.mu);
    f.law = wealth_law_g1(sol, r, sharpe, p, MeasureTag::WorstCaseFirm);
  }
  return f;
}

/// Union payoff of game two; same form with omega in place of mu + delta.
inline PowerIntegrand payoff_integrand_union_g2(const GameTwoSolution& sol, double r, const SharpeInfo& sharpe,
                                                const Preferences& p) {
  PowerIntegrand f;
  f.m = 1.0 - p.gamma;
  f.rho = p.alpha;
  f.k = std::pow(sol.benefit_ratio, f.m) / f.m;
  if (p.lambda > 0.0) f.k += sol.h_union.squaredNorm() * sol.E / (2.0 * p.lambda);
  f.law = wealth_law_g2(sol, r, sharpe, p, MeasureTag::WorstCaseUnion);
  return f;
}

/// int_s^inf k e^{-rho t} E[X(t)^m] dt with X(s) = x0.
inline Result<double> analytic_power_payoff(const PowerIntegrand& f, double s, double x0) {
  if (!(x0 > 0.0)) return make_error(ErrorCode::NonPositiveStart, "x0 must be > 0");
  const double g = f.growth();
  if (!(g < f.rho)) {
    return make_error(ErrorCode::DivergentIntegral, "moment growth rate " + std::to_string(g) +
                                                        " is not below the discount rate " +
                                                        std::to_string(f.rho));
  }
  return f.k * std::exp(-f.rho * s) * std::pow(x0, f.m) / (f.rho - g);
}

/// Share of the payoff integral beyond horizon T: e^{-(rho - g)(T - s)}.
inline double tail_fraction(const PowerIntegrand& f, double s, double T) {
  return std::exp(-(f.rho - f.growth()) * (T - s));
}

/// Smallest horizon whose tail share is below `fraction`.
inline double horizon_for_tail(const PowerIntegrand& f, double s, double fraction) {
  return s + std::log(1.0 / fraction) / (f.rho - f.growth());
}

inline Result<double> analytic_payoff_g1(const GameOneSolution& sol, const ValidatedMarket& m,
                                         const Preferences& p, Side side, double s, double x0) {
  return analytic_power_payoff(payoff_integrand_g1(sol, m.r(), m.sharpe(), p, side), s, x0);
}

inline Result<double> analytic_payoff_union_g2(const GameTwoSolution& sol, const ValidatedMarket& m,
                                               const Preferences& p, double s, double x0) {
  return analytic_power_payoff(payoff_integrand_union_g2(sol, m.r(), m.sharpe(), p), s, x0);
}

}  // namespace pensiongame
