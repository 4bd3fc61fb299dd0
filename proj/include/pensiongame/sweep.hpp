#pragma once

// Parameter grids over the equilibrium ratios, one table per (game, market).

#include <cstdint>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "pensiongame/game_one.hpp"
#include "pensiongame/game_two.hpp"
#include "pensiongame/market.hpp"
#include "pensiongame/numeric.hpp"
#include "pensiongame/parallel.hpp"
#include "pensiongame/result.hpp"

namespace pensiongame {

/// Swept coordinates. The tied axes set two preferences to the same value.
enum class AxisKind { Gamma, Delta, GammaEqDelta, Lambda, Mu, LambdaEqMu };

constexpr std::string_view to_string(AxisKind k) {
  switch (k) {
    case AxisKind::Gamma: return "gamma";
    case AxisKind::Delta: return "delta";
    case AxisKind::GammaEqDelta: return "gamma_eq_delta";
    case AxisKind::Lambda: return "lambda";
    case AxisKind::Mu: return "mu";
    case AxisKind::LambdaEqMu: return "lambda_eq_mu";
  }
  return "gamma";
}

inline std::optional<AxisKind> parse_axis(std::string_view s) {
  for (auto k : {AxisKind::Gamma, AxisKind::Delta, AxisKind::GammaEqDelta, AxisKind::Lambda, AxisKind::Mu,
                 AxisKind::LambdaEqMu}) {
    if (s == to_string(k)) return k;
  }
  return std::nullopt;
}

struct Axis {
  AxisKind kind = AxisKind::Gamma;
  std::vector<double> values;

  friend bool operator==(const Axis&, const Axis&) = default;
};

struct SweepSpec {
  int game = 1;  ///< 1 or 2
  std::string market_name;
  MarketParams market;
  Preferences base;  ///< values of the preferences not swept
  Barriers barriers;
  std::vector<Axis> axes;
};

struct SweepCell {
  std::vector<double> coords;
  bool feasible = false;
  std::string reason;  ///< error code name when infeasible
  double benefit_ratio = 0.0;
  double invest_ratio = 0.0;  ///< 1^T pi* / x
};

struct SweepTable {
  int game = 1;
  std::string market_name;
  std::vector<Axis> axes;
  std::vector<SweepCell> cells;  ///< lexicographic in axis indices, last axis fastest
};

inline Preferences apply_axes(Preferences p, const std::vector<Axis>& axes, const std::vector<double>& coords) {
  for (std::size_t i = 0; i < axes.size(); ++i) {
    const double v = coords[i];
    switch (axes[i].kind) {
      case AxisKind::Gamma: p.gamma = v; break;
      case AxisKind::Delta: p.delta = v; break;
      case AxisKind::GammaEqDelta: p.gamma = p.delta = v; break;
      case AxisKind::Lambda: p.lambda = v; break;
      case AxisKind::Mu: p.mu = v; break;
      case AxisKind::LambdaEqMu: p.lambda = p.mu = v; break;
    }
  }
  return p;
}

inline std::int64_t cell_count(const std::vector<Axis>& axes) {
  std::int64_t n = 1;
  for (const auto& a : axes) n *= static_cast<std::int64_t>(a.values.size());
  return n;
}

/// Coordinates of cell `index` (last axis varies fastest).
inline std::vector<double> cell_coords(const std::vector<Axis>& axes, std::int64_t index) {
  std::vector<double> c(axes.size());
  for (std::size_t i = axes.size(); i-- > 0;) {
    const auto n = static_cast<std::int64_t>(axes[i].values.size());
    c[i] = axes[i].values[static_cast<std::size_t>(index % n)];
    index /= n;
  }
  return c;
}

/// Solves one cell and fills benefit/invest ratios or the infeasibility reason.
inline SweepCell solve_cell(int game, const ValidatedMarket& m, const Preferences& p, const Barriers& bar) {
  SweepCell cell;
  auto fill = [&](const auto& res) {
    if (!res) {
      cell.reason = std::string(to_string(res.code()));
      return;
    }
    cell.feasible = true;
    cell.benefit_ratio = res->benefit_ratio;
    cell.invest_ratio = res->invest_ratio_vec.sum();
  };
  if (game == 1) {
    fill(solve_game_one(m, p));
  } else {
    fill(solve_game_two(m, p, bar));
  }
  return cell;
}

inline Result<SweepTable> run_sweep(const SweepSpec& spec, unsigned threads = 1) {
  if (spec.game != 1 && spec.game != 2) return make_error(ErrorCode::ConfigParse, "sweep game must be 1 or 2");
  for (const auto& a : spec.axes) {
    if (a.values.empty()) return make_error(ErrorCode::ConfigParse, "sweep axis " + std::string(to_string(a.kind)) + " is empty");
  }
  auto vm = validate_market(spec.market);
  if (!vm) return vm.error();
  SweepTable t;
  t.game = spec.game;
  t.market_name = spec.market_name;
  t.axes = spec.axes;
  const std::int64_t n = cell_count(spec.axes);
  t.cells.resize(static_cast<std::size_t>(n));
  parallel_for(n, threads, [&](std::int64_t i) {
    auto coords = cell_coords(spec.axes, i);
    const Preferences p = apply_axes(spec.base, spec.axes, coords);
    SweepCell cell = solve_cell(spec.game, *vm, p, spec.barriers);
    cell.coords = std::move(coords);
    t.cells[static_cast<std::size_t>(i)] = std::move(cell);
  }, 256);
  return t;
}

/// Shortest decimal form that round-trips ("%.17g").
inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// CSV with a header of axis names then benefit_ratio, invest_ratio,
/// feasible, reason. Infeasible rows leave the numeric fields empty.
inline void write_csv(const SweepTable& t, std::ostream& os) {
  for (const auto& a : t.axes) os << to_string(a.kind) << ',';
  os << "benefit_ratio,invest_ratio,feasible,reason\n";
  for (const auto& c : t.cells) {
    for (double v : c.coords) os << format_double(v) << ',';
    if (c.feasible) {
      os << format_double(c.benefit_ratio) << ',' << format_double(c.invest_ratio) << ",true,\n";
    } else {
      os << ",,false," << c.reason << '\n';
    }
  }
}

inline std::string sweep_file_name(const SweepTable& t) {
  return "sweep_game" + std::to_string(t.game) + "_" + t.market_name + ".csv";
}

/// Default game-one axes: gamma and delta on the same 60-point grid over
/// [1.05, 10] (so the gamma = delta diagonal is present), lambda and mu on
/// {0, 1, 2, 3, 4}.
inline std::vector<Axis> default_axes_game_one() {
  const auto rg = linspace(1.05, 10.0, 60);
  const auto amb = linspace(0.0, 4.0, 5);
  return {{AxisKind::Gamma, rg}, {AxisKind::Delta, rg}, {AxisKind::Lambda, amb}, {AxisKind::Mu, amb}};
}

/// Default game-two axes: gamma over [1.05, 10] and lambda over [0, 4], 60
/// points each, and a mu grid reaching past omega so that both markets have
/// feasible cells.
inline std::vector<Axis> default_axes_game_two() {
  return {{AxisKind::Gamma, linspace(1.05, 10.0, 60)},
          {AxisKind::Lambda, linspace(0.0, 4.0, 60)},
          {AxisKind::Mu, {0.0, 0.05, 0.1, 0.5, 2.0, 20.0, 50.0, 100.0, 200.0}}};
}

}  // namespace pensiongame
