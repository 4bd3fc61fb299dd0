#pragma once

// Monte-Carlo estimators of the robust payoffs at the equilibrium strategies.
// Paths are simulated exactly (log-normal steps) under the worst-case measure
// of the player whose payoff is estimated; the entropy penalty enters the
// running payoff through the closed-form value function.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "pensiongame/game_one.hpp"
#include "pensiongame/game_two.hpp"
#include "pensiongame/parallel.hpp"
#include "pensiongame/random.hpp"
#include "pensiongame/result.hpp"
#include "pensiongame/stochastics.hpp"

namespace pensiongame {

struct McOptions {
  unsigned threads = 1;
  bool antithetic = false;
  /// Largest admissible share of the payoff integral beyond the horizon.
  double tail_tolerance = 1e-3;
};

namespace detail {

inline constexpr std::size_t kStepBlock = random::NormalStream::kBlock;
using StepArray = Eigen::Array<double, Eigen::Dynamic, 1, Eigen::ColMajor, static_cast<int>(kStepBlock), 1>;

/// Trapezoidal integral over [t0, t0 + n_steps dt] of k_j e^{-rho_j t} X_j(t)^m_j
/// for every integrand j along one path. All integrands share the Gaussian
/// increments; they may differ in log-drift, exponent and discount.
inline void power_integrals_one_path(std::span<const PowerIntegrand> fs, double x0, const PathGrid& grid,
                                     std::uint64_t stream, double sign, std::span<double> out) {
  const std::size_t J = fs.size();
  const double sd = sign * std::sqrt(fs[0].law.vol_sq() * grid.dt);
  std::array<double, kStepBlock> z{};
  StepArray cum(static_cast<Eigen::Index>(kStepBlock)), steps(static_cast<Eigen::Index>(kStepBlock)),
      expo(static_cast<Eigen::Index>(kStepBlock));
  // log of the running payoff after k steps: c_j + a_j k + b_j W_k, W_k the
  // sum of the first k normals
  std::array<double, 4> c{}, a{}, b{}, first{}, acc{}, last{};
  std::array<std::size_t, 4> same{};  // earlier integrand with the same exponent, or j
  for (std::size_t j = 0; j < J; ++j) {
    const PowerIntegrand& f = fs[j];
    c[j] = f.m * std::log(x0) - f.rho * grid.t0;
    a[j] = (f.m * f.law.log_drift - f.rho) * grid.dt;
    b[j] = f.m * sd;
    first[j] = std::exp(c[j]);
    same[j] = j;
    for (std::size_t i = 0; i < j; ++i) {
      if (same[i] == i && c[i] == c[j] && a[i] == a[j] && b[i] == b[j]) {
        same[j] = i;
        break;
      }
    }
  }
  random::NormalStream ns(grid.seed, stream);
  double w = 0.0;
  std::int64_t done = 0;
  while (done < grid.n_steps) {
    const auto len = static_cast<std::size_t>(std::min<std::int64_t>(kStepBlock, grid.n_steps - done));
    const auto n = static_cast<Eigen::Index>(len);
    ns.fill(std::span<double>(z.data(), len));
    cum.resize(n);
    steps.resize(n);
    for (std::size_t i = 0; i < len; ++i) {
      w += z[i];
      cum[static_cast<Eigen::Index>(i)] = w;
      steps[static_cast<Eigen::Index>(i)] = static_cast<double>(done + static_cast<std::int64_t>(i) + 1);
    }
    for (std::size_t j = 0; j < J; ++j) {
      if (same[j] != j) continue;
      expo = (c[j] + a[j] * steps + b[j] * cum).exp();
      acc[j] += expo.sum();
      last[j] = expo[n - 1];
    }
    done += static_cast<std::int64_t>(len);
  }
  for (std::size_t j = 0; j < J; ++j) {
    acc[j] = acc[same[j]];
    last[j] = last[same[j]];
    out[j] = fs[j].k * grid.dt * (0.5 * first[j] + acc[j] - 0.5 * last[j]);
  }
}

}  // namespace detail

/// Joint estimate for several integrands with a common volatility, from one
/// set of paths. Each estimate adds the analytic tail beyond the horizon.
inline Result<std::vector<McEstimate>> mc_power_payoffs(std::span<const PowerIntegrand> fs, double x0,
                                                        double horizon, PathGrid grid, const McOptions& opt) {
  if (fs.empty() || fs.size() > 4) return make_error(ErrorCode::InvalidGrid, "between 1 and 4 integrands");
  if (!(x0 > 0.0)) return make_error(ErrorCode::NonPositiveStart, "x0 must be > 0");
  if (!(grid.dt > 0.0) || grid.n_paths < 1 || !(horizon > grid.t0)) {
    return make_error(ErrorCode::InvalidGrid, "need dt > 0, n_paths >= 1 and horizon > t0");
  }
  grid.n_steps = static_cast<std::int64_t>(std::ceil((horizon - grid.t0) / grid.dt - 1e-9));
  const double T = grid.horizon();
  for (const auto& f : fs) {
    if (std::abs(f.law.vol_sq() - fs[0].law.vol_sq()) > 1e-14 * fs[0].law.vol_sq()) {
      return make_error(ErrorCode::InvalidGrid, "joint estimation needs a common volatility");
    }
    if (!(f.growth() < f.rho)) {
      return make_error(ErrorCode::InadmissibleSolution,
                        "discounted moment does not decay (growth " + std::to_string(f.growth()) +
                            " >= discount " + std::to_string(f.rho) + ")");
    }
    const double share = tail_fraction(f, grid.t0, T);
    if (!(share < opt.tail_tolerance)) {
      return make_error(ErrorCode::TailBoundNotMet, "tail beyond T = " + std::to_string(T) + " is " +
                                                        std::to_string(share) + " of the payoff");
    }
  }

  const std::size_t J = fs.size();
  std::vector<double> samples(static_cast<std::size_t>(grid.n_paths) * J);
  parallel_for(grid.n_paths, opt.threads, [&](std::int64_t path) {
    std::span<double> row(samples.data() + static_cast<std::size_t>(path) * J, J);
    detail::power_integrals_one_path(fs, x0, grid, static_cast<std::uint64_t>(path), 1.0, row);
    if (opt.antithetic) {
      std::array<double, 4> anti{};
      detail::power_integrals_one_path(fs, x0, grid, static_cast<std::uint64_t>(path), -1.0,
                                       std::span<double>(anti.data(), J));
      for (std::size_t j = 0; j < J; ++j) row[j] = 0.5 * (row[j] + anti[j]);
    }
  }, 8);

  std::vector<McEstimate> out;
  std::vector<double> col(static_cast<std::size_t>(grid.n_paths));
  for (std::size_t j = 0; j < J; ++j) {
    for (std::int64_t i = 0; i < grid.n_paths; ++i) col[static_cast<std::size_t>(i)] = samples[i * J + j];
    McEstimate e = summarize(col, grid.seed);
    const PowerIntegrand& f = fs[j];
    // Tail from the moment formula: k e^{-rho T} E[X(T)^m]/(rho - g).
    e.mean += f.k * std::exp(-f.rho * T) * std::pow(x0, f.m) * std::exp(f.growth() * (T - grid.t0)) /
              (f.rho - f.growth());
    out.push_back(e);
  }
  return out;
}

inline Result<McEstimate> mc_payoff_g1(const GameOneSolution& sol, const ValidatedMarket& m, const Preferences& p,
                                       Side side, double x0, double horizon, const PathGrid& grid,
                                       const McOptions& opt = {}) {
  if (!(sol.A > 0.0 && sol.B > 0.0)) {
    return make_error(ErrorCode::InadmissibleSolution, "requires A > 0 and B > 0");
  }
  const PowerIntegrand f = payoff_integrand_g1(sol, m.r(), m.sharpe(), p, side);
  auto est = mc_power_payoffs(std::span<const PowerIntegrand>(&f, 1), x0, horizon, grid, opt);
  if (!est) return est.error();
  return est->front();
}

inline Result<McEstimate> mc_payoff_union_g1(const GameOneSolution& sol, const ValidatedMarket& m,
                                             const Preferences& p, double x0, double horizon,
                                             const PathGrid& grid, const McOptions& opt = {}) {
  return mc_payoff_g1(sol, m, p, Side::Union, x0, horizon, grid, opt);
}

inline Result<McEstimate> mc_payoff_firm_g1(const GameOneSolution& sol, const ValidatedMarket& m,
                                            const Preferences& p, double x0, double horizon,
                                            const PathGrid& grid, const McOptions& opt = {}) {
  return mc_payoff_g1(sol, m, p, Side::Firm, x0, horizon, grid, opt);
}

/// Union and firm estimates from the same Gaussian increments; each equals
/// the corresponding single-side estimate bit for bit.
inline Result<std::array<McEstimate, 2>> mc_payoff_both_g1(const GameOneSolution& sol, const ValidatedMarket& m,
                                                           const Preferences& p, double x0, double horizon,
                                                           const PathGrid& grid, const McOptions& opt = {}) {
  if (!(sol.A > 0.0 && sol.B > 0.0)) {
    return make_error(ErrorCode::InadmissibleSolution, "requires A > 0 and B > 0");
  }
  const std::array<PowerIntegrand, 2> fs{payoff_integrand_g1(sol, m.r(), m.sharpe(), p, Side::Union),
                                         payoff_integrand_g1(sol, m.r(), m.sharpe(), p, Side::Firm)};
  auto est = mc_power_payoffs(fs, x0, horizon, grid, opt);
  if (!est) return est.error();
  return std::array<McEstimate, 2>{(*est)[0], (*est)[1]};
}

/// Horizon at which both game-one payoff tails fall below `tail_tolerance`,
/// with a small margin so the step rounding cannot land on the bound.
inline Result<double> payoff_horizon_g1(const GameOneSolution& sol, const ValidatedMarket& m, const Preferences& p,
                                        double t0, double tail_tolerance) {
  double T = t0;
  for (Side side : {Side::Union, Side::Firm}) {
    const PowerIntegrand f = payoff_integrand_g1(sol, m.r(), m.sharpe(), p, side);
    if (!(f.growth() < f.rho)) {
      return make_error(ErrorCode::InadmissibleSolution, std::string(to_string(side)) +
                                                             " discounted moment does not decay");
    }
    T = std::max(T, horizon_for_tail(f, t0, 0.999 * tail_tolerance));
  }
  return T;
}

struct BarrierOptions {
  unsigned threads = 1;
  double horizon_cap = 200.0;
  double max_censored_share = 1e-3;
};

/// Game-two firm payoff at one monitoring step.
struct BarrierEstimate {
  double dt = 0.0;
  McEstimate payoff;      ///< 1{v before l} + entropy penalty
  McEstimate upper_exit;  ///< barrier-only indicator 1{v before l}
  std::int64_t censored = 0;
};

/// Firm payoff of game two on a ladder of monitoring steps stride*grid.dt.
/// All levels watch the same fine path, so their differences are free of
/// path-to-path noise. Barriers are checked at monitoring times only; the
/// penalty is a left Riemann sum over the monitored points before exit.
inline Result<std::vector<BarrierEstimate>> mc_firm_payoff_g2_ladder(const GameTwoSolution& sol,
                                                                     const ValidatedMarket& m,
                                                                     const Preferences& p, const PathGrid& grid,
                                                                     std::vector<int> strides,
                                                                     const BarrierOptions& opt = {}) {
  if (!(sol.eta > 0.0 && sol.eta < 1.0) || !(sol.omega > 0.0)) {
    return make_error(ErrorCode::InfeasibleSolution, "game-two solution needs 0 < eta < 1");
  }
  if (!(grid.dt > 0.0) || grid.n_paths < 1 || !(opt.horizon_cap > 0.0)) {
    return make_error(ErrorCode::InvalidGrid, "need dt > 0, n_paths >= 1 and a positive horizon cap");
  }
  if (strides.empty() || std::any_of(strides.begin(), strides.end(), [](int s) { return s < 1; })) {
    return make_error(ErrorCode::InvalidGrid, "strides must be >= 1");
  }
  const Barriers& bar = sol.barriers;
  const GbmLaw law = wealth_law_g2(sol, m, p, MeasureTag::WorstCaseFirm);
  const double one_eta = 1.0 - sol.eta;
  const double rate = p.mu > 0.0 ? sol.h_firm.squaredNorm() / (2.0 * p.mu) : 0.0;
  // (W + c) = x^{1-eta}/span; running penalty per unit time is rate * that.
  const double pen_scale = rate * std::pow(bar.x0, one_eta) / sol.barrier_span();
  const double lo = std::log(bar.l / bar.x0);
  const double hi = std::log(bar.v / bar.x0);
  const double mean_inc = law.log_drift * grid.dt;
  const double sd_inc = std::sqrt(law.vol_sq() * grid.dt);
  const auto n_cap = static_cast<std::int64_t>(std::ceil(opt.horizon_cap / grid.dt - 1e-9));
  const std::size_t L = strides.size();
  const auto n_paths = static_cast<std::size_t>(grid.n_paths);

  std::vector<double> pay(L * n_paths), upper(L * n_paths);
  std::vector<unsigned char> cens(L * n_paths);

  parallel_for(grid.n_paths, opt.threads, [&](std::int64_t path) {
    random::NormalStream ns(grid.seed, static_cast<std::uint64_t>(path));
    std::array<double, detail::kStepBlock> z{};
    detail::StepArray logx(static_cast<Eigen::Index>(detail::kStepBlock));
    detail::StepArray powx(static_cast<Eigen::Index>(detail::kStepBlock));
    std::vector<double> pen(L, 1.0);  // X(0)^{1-eta} relative to x0^{1-eta}
    std::vector<double> hit(L, 0.0);
    std::vector<char> alive(L, 1);
    std::size_t n_alive = L;
    double lx = 0.0;
    std::int64_t k0 = 0;  // fine steps already simulated
    while (n_alive > 0 && k0 < n_cap) {
      const auto len = static_cast<std::size_t>(std::min<std::int64_t>(detail::kStepBlock, n_cap - k0));
      ns.fill(std::span<double>(z.data(), len));
      logx.resize(static_cast<Eigen::Index>(len));
      for (std::size_t i = 0; i < len; ++i) {
        lx += mean_inc + sd_inc * z[i];
        logx[static_cast<Eigen::Index>(i)] = lx;
      }
      if (rate > 0.0) powx = (one_eta * logx).exp();
      for (std::size_t lv = 0; lv < L; ++lv) {
        if (!alive[lv]) continue;
        const std::int64_t s = strides[lv];
        // first monitored index in this block: fine step k = k0 + i + 1, k % s == 0
        std::int64_t k = ((k0 + 1 + s - 1) / s) * s;
        for (; k <= k0 + static_cast<std::int64_t>(len); k += s) {
          const auto i = static_cast<Eigen::Index>(k - k0 - 1);
          const double y = logx[i];
          if (y <= lo || y >= hi) {
            hit[lv] = y >= hi ? 1.0 : 0.0;
            alive[lv] = 0;
            --n_alive;
            break;
          }
          if (rate > 0.0) pen[lv] += powx[i];
        }
      }
      k0 += static_cast<std::int64_t>(len);
    }
    for (std::size_t lv = 0; lv < L; ++lv) {
      const std::size_t at = lv * n_paths + static_cast<std::size_t>(path);
      const double dt_level = grid.dt * strides[lv];
      pay[at] = hit[lv] + pen_scale * dt_level * pen[lv];
      upper[at] = hit[lv];
      cens[at] = alive[lv] ? 1 : 0;
    }
  }, 8);

  std::vector<BarrierEstimate> out;
  for (std::size_t lv = 0; lv < L; ++lv) {
    BarrierEstimate e;
    e.dt = grid.dt * strides[lv];
    const std::span<const double> ps(pay.data() + lv * n_paths, n_paths);
    const std::span<const double> us(upper.data() + lv * n_paths, n_paths);
    e.payoff = summarize(ps, grid.seed);
    e.upper_exit = summarize(us, grid.seed);
    for (std::size_t i = 0; i < n_paths; ++i) e.censored += cens[lv * n_paths + i];
    if (static_cast<double>(e.censored) > opt.max_censored_share * static_cast<double>(n_paths)) {
      return make_error(ErrorCode::ExcessiveCensoring,
                        std::to_string(e.censored) + " of " + std::to_string(n_paths) +
                            " paths did not exit before the horizon cap");
    }
    out.push_back(e);
  }
  return out;
}

inline Result<BarrierEstimate> mc_firm_payoff_g2(const GameTwoSolution& sol, const ValidatedMarket& m,
                                                 const Preferences& p, const PathGrid& grid,
                                                 const BarrierOptions& opt = {}) {
  auto r = mc_firm_payoff_g2_ladder(sol, m, p, grid, {1}, opt);
  if (!r) return r.error();
  return r->front();
}

}  // namespace pensiongame
