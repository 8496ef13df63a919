#include "ddstop/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ddstop/error.hpp"
#include "ddstop/numeric.hpp"

namespace ddstop::config {

namespace {

std::string join(std::string_view path, std::string_view key) {
  if (path.empty()) return std::string(key);
  return std::string(path) + "." + std::string(key);
}

[[noreturn]] void fail(const std::string& key, const std::string& what) {
  throw Error(Errc::ConfigError, what + " (" + key + ")", key);
}

const Json& member(const Json& obj, std::string_view path, std::string_view key) {
  if (!obj.is_object()) fail(std::string(path), "expected an object");
  const auto it = obj.find(std::string(key));
  if (it == obj.end()) fail(join(path, key), "missing key");
  return *it;
}

bool has(const Json& obj, std::string_view key) { return obj.is_object() && obj.contains(std::string(key)); }

std::uint64_t integer(const Json& obj, std::string_view path, std::string_view key) {
  const auto& v = member(obj, path, key);
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0))
    fail(join(path, key), "expected a non-negative integer");
  return v.get<std::uint64_t>();
}

bool flag_or(const Json& obj, std::string_view path, std::string_view key, bool fallback) {
  if (!has(obj, key)) return fallback;
  const auto& v = obj.at(std::string(key));
  if (!v.is_boolean()) fail(join(path, key), "expected true or false");
  return v.get<bool>();
}

}  // namespace

Json load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::ConfigError, "cannot read config file " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw Error(Errc::ConfigError, std::string("malformed config: ") + e.what());
  }
}

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hash(const Json& config) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(config.dump())));
  return buf;
}

const Json& section(const Json& config, std::string_view name) { return member(config, "", name); }

double number(const Json& obj, std::string_view path, std::string_view key) {
  const auto& v = member(obj, path, key);
  if (!v.is_number()) fail(join(path, key), "expected a number");
  return v.get<double>();
}

double number_or(const Json& obj, std::string_view path, std::string_view key, double fallback) {
  return has(obj, key) ? number(obj, path, key) : fallback;
}

std::string text_or(const Json& obj, std::string_view path, std::string_view key, std::string fallback) {
  if (!has(obj, key)) return fallback;
  const auto& v = obj.at(std::string(key));
  if (!v.is_string()) fail(join(path, key), "expected a string");
  return v.get<std::string>();
}

DriftSpec parse_drift(const Json& d) {
  const std::string p = "drift";
  const auto& name_v = member(d, p, "name");
  if (!name_v.is_string()) fail(p + ".name", "expected a string");
  const auto name = name_v.get<std::string>();
  DriftSpec spec;
  spec.class_C = number_or(d, p, "C", 1.0);
  spec.class_A = number_or(d, p, "A", 5.0);
  spec.class_gamma = number_or(d, p, "gamma", 0.5);
  if (name == "ou") {
    spec.family = OrnsteinUhlenbeck{number(d, p, "slope")};
  } else if (name == "piecewise_margin") {
    spec.family = PiecewiseMargin{number_or(d, p, "A0", 3.0), number_or(d, p, "eps", 0.0)};
  } else if (name == "piecewise_general") {
    spec.family = PiecewiseGeneral{number_or(d, p, "a", 1.0), number_or(d, p, "A0", 1.2), number_or(d, p, "eps", 0.0)};
  } else if (name == "tabulated") {
    const auto path = text_or(d, p, "path", "");
    if (path.empty()) fail(p + ".path", "missing key");
    spec.family = load_tabulated_drift(path);
  } else {
    fail(p + ".name", "unknown drift family '" + name + "'");
  }
  if (!(spec.class_C >= 1.0)) fail(p + ".C", "class constant C must be >= 1");
  if (!(spec.class_A > 0.0)) fail(p + ".A", "class constant A must be positive");
  if (!(spec.class_gamma > 0.0)) fail(p + ".gamma", "class constant gamma must be positive");
  return spec;
}

PayoffSpec parse_payoff(const Json& g, const DriftSpec& reference, std::optional<double> beta_override) {
  const std::string p = "payoff";
  const auto& name_v = member(g, p, "name");
  if (!name_v.is_string()) fail(p + ".name", "expected a string");
  const auto name = name_v.get<std::string>();
  const double y1 = number_or(g, p, "y1", 0.2);
  const double zeta = number_or(g, p, "zeta", 2.0);
  if (!(y1 > 0.0 && y1 < zeta)) fail(p + ".y1", "window needs 0 < y1 < zeta");
  PayoffSpec spec;
  if (name == "sim_tent") {
    const double beta = beta_override.value_or(number_or(g, p, "beta", 0.5));
    if (!(beta > 0.0)) fail(p + ".beta", "beta must be positive");
    spec = make_sim_tent(beta, reference, y1, zeta);
  } else if (name == "margin_tent") {
    const double beta = number_or(g, p, "beta", 0.5);
    if (!(beta > 0.0 && beta < 1.0)) fail(p + ".beta", "beta must lie in (0, 1)");
    spec = make_margin_tent(number(g, p, "M"), beta, number(g, p, "y_star"), make_xi_curve(reference), y1, zeta);
  } else if (name == "two_peak") {
    spec = make_two_peak(number(g, p, "M"), number(g, p, "a"), number_or(g, p, "delta", 0.0),
                         make_xi_curve(reference), y1, zeta);
  } else if (name == "tabulated") {
    const auto path = text_or(g, p, "path", "");
    if (path.empty()) fail(p + ".path", "missing key");
    spec = make_tabulated_payoff(load_tabulated_payoff(path), y1, zeta);
  } else {
    fail(p + ".name", "unknown payoff family '" + name + "'");
  }
  if (has(g, "M_bound")) spec.M_bound = number(g, p, "M_bound");
  return spec;
}

std::vector<double> parse_T_grid(const Json& grid, std::string_view path) {
  const std::string p(path);
  std::vector<double> out;
  if (grid.is_array()) {
    for (const auto& v : grid) {
      if (!v.is_number()) fail(p, "T_grid entries must be numbers");
      out.push_back(v.get<double>());
    }
  } else if (grid.is_object()) {
    const auto n = integer(grid, p, "n");
    if (n < 2) fail(p + ".n", "a generated T_grid needs n >= 2");
    const bool log_e = has(grid, "log_e");
    const auto& ends = member(grid, p, log_e ? "log_e" : "linear");
    if (!ends.is_array() || ends.size() != 2 || !ends[0].is_number() || !ends[1].is_number())
      fail(p + (log_e ? ".log_e" : ".linear"), "expected [lo, hi]");
    const double lo = ends[0].get<double>(), hi = ends[1].get<double>();
    out = log_e ? logspace(std::exp(lo), std::exp(hi), n) : linspace(lo, hi, n);
  } else {
    fail(p, "expected a list or a generator object");
  }
  if (out.empty()) fail(p, "T_grid is empty");
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!(out[i] > 0.0)) fail(p, "T_grid entries must be positive");
    if (i > 0 && !(out[i] > out[i - 1])) fail(p, "T_grid must be strictly increasing");
  }
  return out;
}

ExperimentConfig parse_experiment(const Json& e) {
  const std::string p = "experiment";
  ExperimentConfig c;
  c.T_grid = parse_T_grid(member(e, p, "T_grid"), p + ".T_grid");
  c.dt = number_or(e, p, "dt", 0.01);
  c.replications = static_cast<int>(has(e, "replications") ? integer(e, p, "replications") : 50);
  c.master_seed = has(e, "master_seed") ? integer(e, p, "master_seed") : 1;
  c.beta = number_or(e, p, "beta", 0.5);
  if (has(e, "floor_a")) c.floor_a = number(e, p, "floor_a");
  if (has(e, "clamp_M1")) c.clamp_M1 = number(e, p, "clamp_M1");
  const auto kernel = text_or(e, p, "kernel", "epanechnikov");
  const auto shape = parse_kernel(kernel);
  if (!shape) fail(p + ".kernel", "unknown kernel '" + kernel + "'");
  c.kernel.shape = *shape;
  c.zoom.levels = static_cast<int>(has(e, "zoom_levels") ? integer(e, p, "zoom_levels") : 0);
  c.stationary_start = flag_or(e, p, "stationary_start", false);
  const auto schedule = text_or(e, p, "schedule", "margin");
  if (schedule == "margin") c.schedule = ScheduleMode::Margin;
  else if (schedule == "general") c.schedule = ScheduleMode::General;
  else fail(p + ".schedule", "schedule must be 'margin' or 'general'");
  c.threads = static_cast<int>(has(e, "threads") ? integer(e, p, "threads") : 1);
  if (!(c.dt > 0.0 && c.dt <= 0.05)) fail(p + ".dt", "dt must lie in (0, 0.05]");
  if (c.replications < 1) fail(p + ".replications", "replications must be >= 1");
  if (c.threads < 1) fail(p + ".threads", "threads must be >= 1");
  return c;
}

std::vector<double> parse_betas(const Json& e) {
  if (!has(e, "betas")) return {number_or(e, "experiment", "beta", 0.5)};
  const auto& list = e.at("betas");
  if (!list.is_array() || list.empty()) fail("experiment.betas", "expected a non-empty list");
  std::vector<double> out;
  for (const auto& b : list) {
    if (!b.is_number() || !(b.get<double>() > 0.0)) fail("experiment.betas", "betas must be positive numbers");
    out.push_back(b.get<double>());
  }
  return out;
}

StrategyParams parse_strategy(const Json& config) {
  StrategyParams s;
  if (!has(config, "strategy")) return s;
  const auto& st = config.at("strategy");
  const std::string p = "strategy";
  s.block_len = number_or(st, p, "block_len", 1.0);
  s.end_blocks_at_zero = flag_or(st, p, "end_blocks_at_zero", true);
  s.explore = flag_or(st, p, "explore", true);
  if (has(st, "fixed_threshold")) s.fixed_threshold = number(st, p, "fixed_threshold");
  if (!(s.block_len > 0.0)) fail(p + ".block_len", "block_len must be positive");
  if (!s.explore && !s.fixed_threshold) fail(p + ".fixed_threshold", "required when explore is false");
  return s;
}

HypothesisMode parse_mode(const Json& h) {
  const std::string p = "hypotheses";
  const auto mode = text_or(h, p, "mode", "");
  if (mode == "margin")
    return MarginMode{number_or(h, p, "M", 1.0), number_or(h, p, "beta", 0.5), number_or(h, p, "y_star", 1.5)};
  if (mode == "general") return GeneralMode{number_or(h, p, "M", 0.2), number_or(h, p, "a", 1.0)};
  if (mode.empty()) fail(p + ".mode", "missing key");
  fail(p + ".mode", "mode must be 'margin' or 'general'");
}

}  // namespace ddstop::config
