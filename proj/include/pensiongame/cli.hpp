#pragma once

// Scenario configuration and the solve / sweep / verify / simulate commands
// behind the `pensiongame` executable. Configs are TOML or JSON; both are
// read into the same JSON tree before validation.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>
#include <toml.hpp>

#include "pensiongame/game_one.hpp"
#include "pensiongame/game_two.hpp"
#include "pensiongame/market.hpp"
#include "pensiongame/monte_carlo.hpp"
#include "pensiongame/result.hpp"
#include "pensiongame/stochastics.hpp"
#include "pensiongame/sweep.hpp"
#include "pensiongame/verify.hpp"

namespace pensiongame::cli {

using json = nlohmann::ordered_json;

enum ExitCode : int { kOk = 0, kParse = 1, kInfeasible = 2, kVerifyFailed = 3, kIo = 4 };

enum class GameKind { One, Two, Pareto };

struct SimulationConfig {
  double x0 = 1.0;  ///< game one; game two starts at barriers.x0
  double t0 = 0.0;
  double dt = 1.0 / 252.0;
  std::int64_t n_paths = 1000;
  std::int64_t n_steps = 252;
  /// Payoff horizon; chosen from tail_tolerance when absent.
  std::optional<double> horizon;
  std::uint64_t seed = 0;
  MeasureTag measure = MeasureTag::Reference;
  bool antithetic = false;
  double horizon_cap = 200.0;
  double tail_tolerance = 1e-3;
  bool write_paths = true;
  bool estimate_payoff = true;

  friend bool operator==(const SimulationConfig&, const SimulationConfig&) = default;
};

struct NamedMarket {
  std::string name;
  MarketParams market;
};

struct SweepConfig {
  std::vector<int> games{1, 2};
  std::vector<NamedMarket> markets;  ///< empty: the scenario market, named "scenario"
  Barriers barriers;
  std::vector<Axis> game1_axes = default_axes_game_one();
  std::vector<Axis> game2_axes = default_axes_game_two();
};

struct VerifyConfig {
  bool monte_carlo = true;
  std::int64_t mc_paths = 100000;
  std::int64_t moment_paths = 100000;
  double dt = 1.0 / 252.0;
  double dt_barrier = 1.0 / 2000.0;
  double tail_tolerance = 1e-3;
  double horizon_cap = 200.0;
  double perturb_a = 1.0;
  std::uint64_t seed = 0;

  friend bool operator==(const VerifyConfig&, const VerifyConfig&) = default;
};

struct ScenarioConfig {
  GameKind game = GameKind::One;
  MarketParams market;
  Preferences preferences;
  std::optional<Barriers> barriers;
  std::optional<SimulationConfig> simulation;
  std::optional<SweepConfig> sweep;
  std::optional<VerifyConfig> verify;
};

inline bool same_market(const MarketParams& a, const MarketParams& b) {
  return a.r == b.r && a.b.size() == b.b.size() && a.b == b.b && a.sigma.rows() == b.sigma.rows() &&
         a.sigma.cols() == b.sigma.cols() && a.sigma == b.sigma;
}

inline bool operator==(const SweepConfig& a, const SweepConfig& b) {
  if (a.games != b.games || a.markets.size() != b.markets.size()) return false;
  for (std::size_t i = 0; i < a.markets.size(); ++i) {
    if (a.markets[i].name != b.markets[i].name || !same_market(a.markets[i].market, b.markets[i].market)) return false;
  }
  auto same_bar = [](const Barriers& x, const Barriers& y) { return x.l == y.l && x.v == y.v && x.x0 == y.x0; };
  return same_bar(a.barriers, b.barriers) && a.game1_axes == b.game1_axes && a.game2_axes == b.game2_axes;
}

inline bool operator==(const ScenarioConfig& a, const ScenarioConfig& b) {
  auto same_bar = [](const std::optional<Barriers>& x, const std::optional<Barriers>& y) {
    if (x.has_value() != y.has_value()) return false;
    return !x || (x->l == y->l && x->v == y->v && x->x0 == y->x0);
  };
  return a.game == b.game && same_market(a.market, b.market) && a.preferences == b.preferences &&
         same_bar(a.barriers, b.barriers) && a.simulation == b.simulation && a.sweep == b.sweep &&
         a.verify == b.verify;
}

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline json toml_to_json(const toml::node& n) {
  if (const auto* t = n.as_table()) {
    json j = json::object();
    for (auto&& [k, v] : *t) j[std::string(k.str())] = toml_to_json(v);
    return j;
  }
  if (const auto* a = n.as_array()) {
    json j = json::array();
    for (auto&& v : *a) j.push_back(toml_to_json(v));
    return j;
  }
  if (const auto* v = n.as_integer()) return v->get();
  if (const auto* v = n.as_floating_point()) return v->get();
  if (const auto* v = n.as_boolean()) return v->get();
  if (const auto* v = n.as_string()) return v->get();
  throw ConfigError("unsupported TOML value (dates and times are not accepted)");
}

/// Object reader that rejects keys it was not asked about.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError("[" + path_ + "] must be a table");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json& raw(const std::string& key) {
    seen_.push_back(key);
    if (!j_.contains(key)) throw ConfigError("missing key " + where(key));
    return j_.at(key);
  }

  double number(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_number()) throw ConfigError(where(key) + " must be a number");
    return v.get<double>();
  }
  double number(const std::string& key, double fallback) { return has(key) ? number(key) : mark(key, fallback); }

  std::int64_t integer(const std::string& key) {
    const json& v = raw(key);
    if (v.is_number_integer()) return v.get<std::int64_t>();
    if (v.is_number_float() && std::floor(v.get<double>()) == v.get<double>() && std::abs(v.get<double>()) < 9e15) {
      return static_cast<std::int64_t>(v.get<double>());
    }
    throw ConfigError(where(key) + " must be an integer");
  }
  std::int64_t integer(const std::string& key, std::int64_t fallback) {
    return has(key) ? integer(key) : mark(key, fallback);
  }

  std::uint64_t seed(const std::string& key, std::uint64_t fallback) {
    if (!has(key)) return mark(key, fallback);
    const json& v = raw(key);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
    throw ConfigError(where(key) + " must be a non-negative integer");
  }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return mark(key, fallback);
    const json& v = raw(key);
    if (!v.is_boolean()) throw ConfigError(where(key) + " must be true or false");
    return v.get<bool>();
  }

  std::string string(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_string()) throw ConfigError(where(key) + " must be a string");
    return v.get<std::string>();
  }

  Section sub(const std::string& key) { return Section(raw(key), path_ + "." + key); }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (std::find(seen_.begin(), seen_.end(), it.key()) == seen_.end()) {
        throw ConfigError("unknown key " + where(it.key()));
      }
    }
  }

  std::string where(const std::string& key) const { return "'" + key + "' in [" + path_ + "]"; }

 private:
  template <class T>
  T mark(const std::string& key, T v) {
    seen_.push_back(key);
    return v;
  }

  const json& j_;
  std::string path_;
  std::vector<std::string> seen_;
};

inline Vector parse_vector(const json& v, const std::string& what) {
  if (v.is_number()) return Vector::Constant(1, v.get<double>());
  if (!v.is_array() || v.empty()) throw ConfigError(what + " must be a number or a non-empty array");
  Vector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) throw ConfigError(what + " entries must be numbers");
    out[static_cast<Eigen::Index>(i)] = v[i].get<double>();
  }
  return out;
}

inline Matrix parse_matrix(const json& v, const std::string& what) {
  if (v.is_number()) return Matrix::Constant(1, 1, v.get<double>());
  if (!v.is_array() || v.empty() || !v[0].is_array()) {
    throw ConfigError(what + " must be a number or an array of rows");
  }
  const auto rows = static_cast<Eigen::Index>(v.size());
  const auto cols = static_cast<Eigen::Index>(v[0].size());
  Matrix out(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Vector row = parse_vector(v[static_cast<std::size_t>(i)], what + " row");
    if (row.size() != cols) throw ConfigError(what + " rows must have equal length");
    out.row(i) = row.transpose();
  }
  return out;
}

inline MarketParams parse_market(Section s) {
  MarketParams m;
  m.r = s.number("r");
  m.b = parse_vector(s.raw("b"), s.where("b"));
  m.sigma = parse_matrix(s.raw("sigma"), s.where("sigma"));
  s.finish();
  if (auto ok = validate_market(m); !ok) throw ConfigError(ok.error().message);
  return m;
}

inline Barriers parse_barriers(Section s) {
  Barriers b;
  b.l = s.number("l", b.l);
  b.v = s.number("v", b.v);
  b.x0 = s.number("x0", b.x0);
  s.finish();
  if (auto ok = validate_barriers(b); !ok) throw ConfigError(ok.error().message);
  return b;
}

inline std::vector<Axis> parse_axes(const json& arr, const std::string& path) {
  if (!arr.is_array()) throw ConfigError("[" + path + "] must be an array of tables");
  std::vector<Axis> axes;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    Section s(arr[i], path + "[" + std::to_string(i) + "]");
    Axis a;
    const std::string name = s.string("name");
    const auto kind = parse_axis(name);
    if (!kind) throw ConfigError("unknown sweep axis '" + name + "'");
    a.kind = *kind;
    if (s.has("values")) {
      const Vector v = parse_vector(s.raw("values"), s.where("values"));
      a.values.assign(v.data(), v.data() + v.size());
    } else {
      const double start = s.number("start"), stop = s.number("stop");
      const auto num = s.integer("num");
      if (num < 1) throw ConfigError(s.where("num") + " must be >= 1");
      a.values = linspace(start, stop, static_cast<int>(num));
    }
    s.finish();
    axes.push_back(std::move(a));
  }
  return axes;
}

}  // namespace detail

inline ScenarioConfig parse_config(const json& root) {
  detail::Section top(root, "root");
  ScenarioConfig c;

  const json& g = top.raw("game");
  if (g.is_number_integer() && g.get<std::int64_t>() == 1) {
    c.game = GameKind::One;
  } else if (g.is_number_integer() && g.get<std::int64_t>() == 2) {
    c.game = GameKind::Two;
  } else if (g.is_string() && g.get<std::string>() == "pareto") {
    c.game = GameKind::Pareto;
  } else {
    throw ConfigError("game must be 1, 2 or \"pareto\"");
  }

  c.market = detail::parse_market(top.sub("market"));

  {
    auto s = top.sub("preferences");
    Preferences& p = c.preferences;
    p.alpha = s.number("alpha");
    p.beta = s.number("beta");
    p.gamma = s.number("gamma");
    p.delta = s.number("delta");
    p.lambda = s.number("lambda");
    p.mu = s.number("mu");
    s.finish();
    if (auto ok = validate_preferences(p); !ok) throw ConfigError(ok.error().message);
  }

  if (top.has("barriers")) c.barriers = detail::parse_barriers(top.sub("barriers"));
  if ((c.game == GameKind::Two) != c.barriers.has_value()) {
    throw ConfigError(c.game == GameKind::Two ? "game 2 needs a [barriers] table"
                                              : "[barriers] is only allowed with game 2");
  }

  if (top.has("simulation")) {
    auto s = top.sub("simulation");
    SimulationConfig sim;
    if (c.game == GameKind::Two) sim.dt = 1.0 / 2000.0;
    sim.x0 = s.number("x0", sim.x0);
    sim.t0 = s.number("t0", sim.t0);
    sim.dt = s.number("dt", sim.dt);
    sim.n_paths = s.integer("n_paths", sim.n_paths);
    sim.n_steps = s.integer("n_steps", sim.n_steps);
    if (s.has("horizon")) sim.horizon = s.number("horizon");
    sim.seed = s.seed("seed", sim.seed);
    if (s.has("measure")) {
      const std::string m = s.string("measure");
      const auto tag = parse_measure(m);
      if (!tag) throw ConfigError("unknown measure '" + m + "'");
      sim.measure = *tag;
    }
    sim.antithetic = s.boolean("antithetic", sim.antithetic);
    sim.horizon_cap = s.number("horizon_cap", sim.horizon_cap);
    sim.tail_tolerance = s.number("tail_tolerance", sim.tail_tolerance);
    sim.write_paths = s.boolean("write_paths", sim.write_paths);
    sim.estimate_payoff = s.boolean("estimate_payoff", sim.estimate_payoff);
    s.finish();
    PathGrid pg{sim.t0, sim.dt, sim.n_steps, sim.n_paths, sim.seed};
    if (auto ok = validate_grid(pg); !ok) throw ConfigError(ok.error().message);
    if (!(sim.x0 > 0.0)) throw ConfigError("simulation x0 must be > 0");
    if (!(sim.tail_tolerance > 0.0 && sim.tail_tolerance < 1.0)) throw ConfigError("tail_tolerance must lie in (0, 1)");
    if (sim.horizon && !(*sim.horizon > sim.t0)) throw ConfigError("horizon must exceed t0");
    if (!(sim.horizon_cap > 0.0)) throw ConfigError("horizon_cap must be > 0");
    c.simulation = sim;
  }

  if (top.has("sweep")) {
    auto s = top.sub("sweep");
    SweepConfig sw;
    if (s.has("games")) {
      sw.games.clear();
      for (const auto& v : s.raw("games")) {
        if (!v.is_number_integer() || (v.get<int>() != 1 && v.get<int>() != 2)) {
          throw ConfigError("sweep games must be a list of 1 and 2");
        }
        sw.games.push_back(v.get<int>());
      }
    }
    if (s.has("markets")) {
      auto ms = s.sub("markets");
      for (auto it = s.raw("markets").begin(); it != s.raw("markets").end(); ++it) {
        sw.markets.push_back({it.key(), detail::parse_market(ms.sub(it.key()))});
      }
      ms.finish();
    }
    if (s.has("barriers")) sw.barriers = detail::parse_barriers(s.sub("barriers"));
    if (s.has("game1")) sw.game1_axes = detail::parse_axes(s.raw("game1"), "sweep.game1");
    if (s.has("game2")) sw.game2_axes = detail::parse_axes(s.raw("game2"), "sweep.game2");
    s.finish();
    c.sweep = sw;
  }

  if (top.has("verify")) {
    auto s = top.sub("verify");
    VerifyConfig v;
    v.monte_carlo = s.boolean("monte_carlo", v.monte_carlo);
    v.mc_paths = s.integer("mc_paths", v.mc_paths);
    v.moment_paths = s.integer("moment_paths", v.moment_paths);
    v.dt = s.number("dt", v.dt);
    v.dt_barrier = s.number("dt_barrier", v.dt_barrier);
    v.tail_tolerance = s.number("tail_tolerance", v.tail_tolerance);
    v.horizon_cap = s.number("horizon_cap", v.horizon_cap);
    v.perturb_a = s.number("perturb_a", v.perturb_a);
    v.seed = s.seed("seed", v.seed);
    s.finish();
    if (v.mc_paths < 2 || v.moment_paths < 2) throw ConfigError("verify path counts must be >= 2");
    if (!(v.dt > 0.0) || !(v.dt_barrier > 0.0)) throw ConfigError("verify time steps must be > 0");
    c.verify = v;
  }

  top.finish();
  return c;
}

inline json load_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  if (path.extension() == ".json") {
    try {
      return json::parse(ss.str());
    } catch (const json::exception& e) {
      throw ConfigError(std::string("JSON: ") + e.what());
    }
  }
  try {
    const toml::table t = toml::parse(ss.str(), path.string());
    return detail::toml_to_json(t);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << "TOML: " << e.description() << " (line " << e.source().begin.line << ")";
    throw ConfigError(msg.str());
  }
}

inline ScenarioConfig load_config(const std::filesystem::path& path) { return parse_config(load_json_file(path)); }

namespace detail {

inline json to_json(const Vector& v) {
  json j = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v[i]);
  return j;
}

inline json to_json(const Matrix& m) {
  json j = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) j.push_back(to_json(Vector(m.row(i).transpose())));
  return j;
}

inline json to_json(const MarketParams& m) { return {{"r", m.r}, {"b", to_json(m.b)}, {"sigma", to_json(m.sigma)}}; }

inline json to_json(const Barriers& b) { return {{"l", b.l}, {"v", b.v}, {"x0", b.x0}}; }

inline json to_json(const std::vector<Axis>& axes) {
  json j = json::array();
  for (const auto& a : axes) j.push_back({{"name", std::string(to_string(a.kind))}, {"values", a.values}});
  return j;
}

}  // namespace detail

/// Full normalized config; parse_config(config_to_json(c)) == c.
inline json config_to_json(const ScenarioConfig& c) {
  json j;
  if (c.game == GameKind::Pareto) {
    j["game"] = "pareto";
  } else {
    j["game"] = c.game == GameKind::One ? 1 : 2;
  }
  j["market"] = detail::to_json(c.market);
  const Preferences& p = c.preferences;
  j["preferences"] = {{"alpha", p.alpha}, {"beta", p.beta},     {"gamma", p.gamma},
                      {"delta", p.delta}, {"lambda", p.lambda}, {"mu", p.mu}};
  if (c.barriers) j["barriers"] = detail::to_json(*c.barriers);
  if (c.simulation) {
    const auto& s = *c.simulation;
    json js = {{"x0", s.x0},           {"t0", s.t0},
               {"dt", s.dt},           {"n_paths", s.n_paths},
               {"n_steps", s.n_steps}, {"seed", s.seed},
               {"measure", std::string(to_string(s.measure))},
               {"antithetic", s.antithetic},
               {"horizon_cap", s.horizon_cap},
               {"tail_tolerance", s.tail_tolerance},
               {"write_paths", s.write_paths},
               {"estimate_payoff", s.estimate_payoff}};
    if (s.horizon) js["horizon"] = *s.horizon;
    j["simulation"] = js;
  }
  if (c.sweep) {
    const auto& s = *c.sweep;
    json js;
    js["games"] = s.games;
    if (!s.markets.empty()) {
      json ms = json::object();
      for (const auto& m : s.markets) ms[m.name] = detail::to_json(m.market);
      js["markets"] = ms;
    }
    js["barriers"] = detail::to_json(s.barriers);
    js["game1"] = detail::to_json(s.game1_axes);
    js["game2"] = detail::to_json(s.game2_axes);
    j["sweep"] = js;
  }
  if (c.verify) {
    const auto& v = *c.verify;
    j["verify"] = {{"monte_carlo", v.monte_carlo}, {"mc_paths", v.mc_paths},
                   {"moment_paths", v.moment_paths}, {"dt", v.dt},
                   {"dt_barrier", v.dt_barrier},   {"tail_tolerance", v.tail_tolerance},
                   {"horizon_cap", v.horizon_cap}, {"perturb_a", v.perturb_a},
                   {"seed", v.seed}};
  }
  return j;
}

struct RunOptions {
  std::filesystem::path out_dir = "out";
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
};

/// What a command did. `outputs` lists files written, each once.
struct CommandResult {
  int exit_code = kOk;
  json summary = json::object();
  std::vector<std::string> outputs;
  json feasibility = json::object();
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void write_file(const std::filesystem::path& path, const std::string& text, CommandResult& res) {
  std::error_code ec;
  std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  out.close();
  if (!out) throw IoError("error writing " + path.string());
  res.outputs.push_back(path.string());
}

inline json error_json(const Error& e) {
  return {{"error", {{"code", std::string(to_string(e.code))}, {"message", e.message}}}};
}

inline json estimate_json(const McEstimate& e, const json& settings) {
  return {{"mean", e.mean}, {"std_err", e.std_err}, {"n", e.n}, {"seed", e.seed}, {"settings", settings}};
}

inline json law_json(const GbmLaw& law) {
  return {{"log_drift", law.log_drift}, {"vol", to_json(law.vol)}, {"sde_drift", law.sde_drift()}};
}

inline void apply_seed(ScenarioConfig& c, const RunOptions& o) {
  if (!o.seed) return;
  if (c.simulation) c.simulation->seed = *o.seed;
  if (c.verify) c.verify->seed = *o.seed;
}

inline ValidatedMarket market_of(const ScenarioConfig& c) { return validate_market(c.market).value(); }

}  // namespace detail

inline CommandResult cmd_solve(const ScenarioConfig& c, const RunOptions& o) {
  CommandResult res;
  const auto m = detail::market_of(c);
  const Preferences& p = c.preferences;
  json sol;
  auto fail = [&](const Error& e) {
    res.exit_code = kInfeasible;
    res.feasibility["feasible"] = false;
    res.feasibility["reason"] = std::string(to_string(e.code));
    sol = detail::error_json(e);
  };
  if (c.game == GameKind::One) {
    auto s = solve_game_one(m, p);
    if (!s) {
      fail(s.error());
    } else {
      const double x0 = c.simulation ? c.simulation->x0 : 1.0;
      const auto w = value_functions_g1(*s, p, 0.0, x0).value();
      sol = {{"game", 1},
             {"A", s->A},
             {"B", s->B},
             {"benefit_ratio", s->benefit_ratio},
             {"b_bracket", s->b_bracket},
             {"invest_ratio", detail::to_json(s->invest_ratio_vec)},
             {"invest_ratio_total", s->invest_ratio_vec.sum()},
             {"h_union", detail::to_json(s->h_union)},
             {"h_firm", detail::to_json(s->h_firm)},
             {"theta_sq", s->theta_sq},
             {"mu_plus_delta", s->mu_plus_delta},
             {"x0", x0},
             {"value_union", w.union_value},
             {"value_firm", w.firm_value},
             {"laws",
              {{"reference", detail::law_json(wealth_law_g1(*s, m, p, MeasureTag::Reference))},
               {"worst_case_union", detail::law_json(wealth_law_g1(*s, m, p, MeasureTag::WorstCaseUnion))},
               {"worst_case_firm", detail::law_json(wealth_law_g1(*s, m, p, MeasureTag::WorstCaseFirm))}}}};
    }
  } else if (c.game == GameKind::Two) {
    auto s = solve_game_two(m, p, *c.barriers);
    if (!s) {
      fail(s.error());
    } else {
      const double x0 = c.barriers->x0;
      const auto w = value_functions_g2(*s, p, 0.0, x0).value();
      sol = {{"game", 2},
             {"discriminant", s->delta_disc},
             {"omega", s->omega},
             {"eta", s->eta},
             {"E", s->E},
             {"c", s->c},
             {"benefit_ratio", s->benefit_ratio},
             {"invest_ratio", detail::to_json(s->invest_ratio_vec)},
             {"invest_ratio_total", s->invest_ratio_vec.sum()},
             {"h_union", detail::to_json(s->h_union)},
             {"h_firm", detail::to_json(s->h_firm)},
             {"theta_sq", s->theta_sq},
             {"barriers", detail::to_json(s->barriers)},
             {"value_union", w.union_value},
             {"value_firm", w.firm_value},
             {"laws",
              {{"reference", detail::law_json(wealth_law_g2(*s, m, p, MeasureTag::Reference))},
               {"worst_case_union", detail::law_json(wealth_law_g2(*s, m, p, MeasureTag::WorstCaseUnion))},
               {"worst_case_firm", detail::law_json(wealth_law_g2(*s, m, p, MeasureTag::WorstCaseFirm))}}}};
    }
  } else {
    auto s = solve_pareto(m, p);
    if (!s) {
      fail(s.error());
    } else {
      sol = {{"game", "pareto"},
             {"A0", s->A0},
             {"benefit_ratio", s->benefit_ratio},
             {"invest_ratio", detail::to_json(s->invest_ratio_vec)},
             {"invest_ratio_total", s->invest_ratio_vec.sum()},
             {"h", detail::to_json(s->h_star)}};
    }
  }
  if (res.exit_code == kOk) res.feasibility["feasible"] = true;
  detail::write_file(o.out_dir / "solution.json", sol.dump(2) + "\n", res);
  res.summary = sol;
  return res;
}

inline CommandResult cmd_sweep(const ScenarioConfig& c, const RunOptions& o) {
  CommandResult res;
  if (!c.sweep) throw ConfigError("sweep needs a [sweep] table");
  const SweepConfig& sw = *c.sweep;
  std::vector<NamedMarket> markets = sw.markets;
  if (markets.empty()) markets.push_back({"scenario", c.market});
  json files = json::array();
  for (int g : sw.games) {
    for (const auto& nm : markets) {
      SweepSpec spec;
      spec.game = g;
      spec.market_name = nm.name;
      spec.market = nm.market;
      spec.base = c.preferences;
      spec.barriers = sw.barriers;
      spec.axes = g == 1 ? sw.game1_axes : sw.game2_axes;
      const SweepTable t = run_sweep(spec, o.threads).value();
      std::ostringstream csv;
      write_csv(t, csv);
      detail::write_file(o.out_dir / sweep_file_name(t), csv.str(), res);
      std::int64_t feasible = 0;
      for (const auto& cell : t.cells) feasible += cell.feasible ? 1 : 0;
      const std::string key = "game" + std::to_string(g) + "_" + nm.name;
      res.feasibility[key] = {{"cells", static_cast<std::int64_t>(t.cells.size())}, {"feasible", feasible}};
      files.push_back(res.outputs.back());
    }
  }
  res.summary = {{"files", files}};
  return res;
}

inline CommandResult cmd_verify(const ScenarioConfig& c, const RunOptions& o) {
  CommandResult res;
  const auto m = detail::market_of(c);
  const Preferences& p = c.preferences;
  const VerifyConfig v = c.verify.value_or(VerifyConfig{});
  VerifyOptions opt;
  opt.x0 = c.simulation ? c.simulation->x0 : 1.0;
  opt.seed = v.seed;
  opt.threads = o.threads;
  opt.monte_carlo = v.monte_carlo;
  opt.mc_paths = v.mc_paths;
  opt.moment_paths = v.moment_paths;
  opt.dt = v.dt;
  opt.dt_barrier = v.dt_barrier;
  opt.tail_tolerance = v.tail_tolerance;
  opt.horizon_cap = v.horizon_cap;
  opt.perturb_a = v.perturb_a;

  std::optional<Error> infeasible;
  std::vector<Check> checks;
  if (c.game == GameKind::One) {
    if (auto s = solve_game_one(m, p); !s) {
      infeasible = s.error();
    } else {
      checks = verify_game_one(m, p, opt);
    }
  } else if (c.game == GameKind::Two) {
    if (auto s = solve_game_two(m, p, *c.barriers); !s) {
      infeasible = s.error();
    } else {
      checks = verify_game_two(m, p, *c.barriers, opt);
    }
  } else {
    if (auto s = solve_pareto(m, p); !s) {
      infeasible = s.error();
    } else {
      checks = verify_pareto(m, p);
    }
  }

  json report;
  if (infeasible) {
    res.exit_code = kInfeasible;
    res.feasibility = {{"feasible", false}, {"reason", std::string(to_string(infeasible->code))}};
    report = detail::error_json(*infeasible);
  } else {
    res.feasibility = {{"feasible", true}};
    json arr = json::array();
    for (const auto& ch : checks) {
      arr.push_back({{"name", ch.name},
                     {"target", ch.target},
                     {"achieved", ch.achieved},
                     {"tolerance", ch.tolerance},
                     {"pass", ch.pass}});
    }
    const bool ok = all_pass(checks);
    report = {{"pass", ok}, {"checks", arr}};
    if (!ok) res.exit_code = kVerifyFailed;
  }
  detail::write_file(o.out_dir / "verify.json", report.dump(2) + "\n", res);
  res.summary = report;
  return res;
}

inline CommandResult cmd_simulate(const ScenarioConfig& c, const RunOptions& o) {
  CommandResult res;
  if (!c.simulation) throw ConfigError("simulate needs a [simulation] table");
  if (c.game == GameKind::Pareto) throw ConfigError("simulate supports game 1 and game 2");
  const SimulationConfig& sim = *c.simulation;
  const auto m = detail::market_of(c);
  const Preferences& p = c.preferences;

  std::optional<GameOneSolution> s1;
  std::optional<GameTwoSolution> s2;
  std::optional<Error> infeasible;
  if (c.game == GameKind::One) {
    auto s = solve_game_one(m, p);
    if (s) s1 = *s; else infeasible = s.error();
  } else {
    auto s = solve_game_two(m, p, *c.barriers);
    if (s) s2 = *s; else infeasible = s.error();
  }
  if (infeasible) {
    res.exit_code = kInfeasible;
    res.feasibility = {{"feasible", false}, {"reason", std::string(to_string(infeasible->code))}};
    res.summary = detail::error_json(*infeasible);
    return res;
  }
  res.feasibility = {{"feasible", true}};

  const double x0 = s1 ? sim.x0 : c.barriers->x0;
  const PathGrid grid{sim.t0, sim.dt, sim.n_steps, sim.n_paths, sim.seed};
  if (sim.write_paths) {
    const GbmLaw law = s1 ? wealth_law_g1(*s1, m, p, sim.measure) : wealth_law_g2(*s2, m, p, sim.measure);
    const PathArray paths = sample_paths(law, x0, grid, o.threads).value();
    std::string csv = "t,path_id,X\n";
    for (std::int64_t i = 0; i < paths.n_paths; ++i) {
      for (std::int64_t k = 1; k <= paths.n_steps; ++k) {
        csv += format_double(paths.time(k));
        csv += ',';
        csv += std::to_string(i);
        csv += ',';
        csv += format_double(paths.at(i, k));
        csv += '\n';
      }
    }
    detail::write_file(o.out_dir / "paths.csv", csv, res);
  }

  if (sim.estimate_payoff) {
    json est;
    if (s1) {
      Result<double> T = sim.horizon ? Result<double>(*sim.horizon)
                                     : payoff_horizon_g1(*s1, m, p, sim.t0, sim.tail_tolerance);
      auto both = T ? mc_payoff_both_g1(*s1, m, p, x0, *T, grid, {o.threads, sim.antithetic, sim.tail_tolerance})
                    : Result<std::array<McEstimate, 2>>(T.error());
      if (!both) {
        res.exit_code = kInfeasible;
        res.feasibility = {{"feasible", false}, {"reason", std::string(to_string(both.code()))}};
        est = detail::error_json(both.error());
      } else {
        const json settings = {{"x0", x0},
                               {"t0", sim.t0},
                               {"dt", sim.dt},
                               {"horizon", *T},
                               {"antithetic", sim.antithetic},
                               {"tail_tolerance", sim.tail_tolerance}};
        const auto w = value_functions_g1(*s1, p, sim.t0, x0).value();
        est = {{"union", detail::estimate_json((*both)[0], settings)},
               {"firm", detail::estimate_json((*both)[1], settings)},
               {"targets", {{"union", w.union_value}, {"firm", w.firm_value}}}};
      }
    } else {
      auto e = mc_firm_payoff_g2(*s2, m, p, grid, {o.threads, sim.horizon_cap, 1e-3});
      if (!e) {
        res.exit_code = kInfeasible;
        res.feasibility = {{"feasible", false}, {"reason", std::string(to_string(e.code()))}};
        est = detail::error_json(e.error());
      } else {
        est = {{"estimate", e->payoff.mean},
               {"std_err", e->payoff.std_err},
               {"censored_count", e->censored},
               {"n", e->payoff.n},
               {"seed", e->payoff.seed},
               {"upper_exit", {{"mean", e->upper_exit.mean}, {"std_err", e->upper_exit.std_err}}},
               {"target", firm_value_g2(*s2, x0).value()},
               {"settings",
                {{"x0", x0}, {"dt", sim.dt}, {"horizon_cap", sim.horizon_cap}, {"barriers", detail::to_json(s2->barriers)}}}};
      }
    }
    detail::write_file(o.out_dir / "payoff.json", est.dump(2) + "\n", res);
    res.summary = est;
  }
  return res;
}

/// Runs one command and writes run_report.json next to its outputs.
/// Returns the process exit code.
inline int run_command(const std::string& command, const std::filesystem::path& config_path, const RunOptions& o,
                       std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  ScenarioConfig c;
  try {
    c = load_config(config_path);
  } catch (const ConfigError& e) {
    err << "ConfigParse: " << e.what() << "\n";
    return kParse;
  }
  detail::apply_seed(c, o);
  CommandResult res;
  try {
    if (command == "solve") {
      res = cmd_solve(c, o);
    } else if (command == "sweep") {
      res = cmd_sweep(c, o);
    } else if (command == "verify") {
      res = cmd_verify(c, o);
    } else if (command == "simulate") {
      res = cmd_simulate(c, o);
    } else {
      err << "unknown command " << command << "\n";
      return kParse;
    }
  } catch (const ConfigError& e) {
    err << "ConfigParse: " << e.what() << "\n";
    return kParse;
  } catch (const IoError& e) {
    err << "IoFailure: " << e.what() << "\n";
    return kIo;
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  json report = {{"command", command},
                 {"config", config_to_json(c)},
                 {"outputs", res.outputs},
                 {"feasibility", res.feasibility},
                 {"exit_code", res.exit_code},
                 {"threads", o.threads},
                 {"wall_time_seconds", wall}};
  try {
    CommandResult sink;
    detail::write_file(o.out_dir / "run_report.json", report.dump(2) + "\n", sink);
  } catch (const IoError& e) {
    err << "IoFailure: " << e.what() << "\n";
    return kIo;
  }
  out << res.summary.dump(2) << "\n";
  return res.exit_code;
}

}  // namespace pensiongame::cli
