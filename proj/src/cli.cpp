#include "ddstop/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <limits>
#include <locale>
#include <map>
#include <sstream>
#include <type_traits>

#include "ddstop/config.hpp"
#include "ddstop/error.hpp"
#include "ddstop/numeric.hpp"
#include "ddstop/sde.hpp"

namespace ddstop::cli {

namespace fs = std::filesystem;
using config::Json;

namespace {

// Fixed format for every CSV: classic locale, 17 significant digits.
class Csv {
 public:
  explicit Csv(std::initializer_list<std::string_view> header) {
    out_.imbue(std::locale::classic());
    out_ << std::setprecision(17);
    bool first = true;
    for (auto h : header) {
      out_ << (first ? "" : ",") << h;
      first = false;
    }
    out_ << '\n';
  }

  template <class... Ts>
  void row(const Ts&... cells) {
    bool first = true;
    ((out_ << (first ? "" : ","), put(cells), first = false), ...);
    out_ << '\n';
  }

  std::string str() const { return out_.str(); }

 private:
  template <class T>
    requires std::is_arithmetic_v<T>
  void put(T v) {
    if constexpr (std::is_same_v<T, bool>) out_ << (v ? 1 : 0);
    else out_ << v;
  }
  void put(const std::string& s) {
    // Error messages are the only free text; keep them on one field.
    std::string clean = s;
    std::replace(clean.begin(), clean.end(), ',', ';');
    std::replace(clean.begin(), clean.end(), '\n', ' ');
    out_ << clean;
  }

  std::ostringstream out_;
};

struct Context {
  const Json& config;
  fs::path out_dir;
  std::optional<std::uint64_t> seed_override;
  std::optional<int> threads_override;
  RunManifest& manifest;
  Json summary = Json::object();

  void write(const std::string& name, const std::string& body) {
    const auto path = out_dir / name;
    std::ofstream f(path, std::ios::binary);
    f << body;
    if (!f) throw Error(Errc::BadParameters, "cannot write " + path.string());
    manifest.outputs.push_back(path.string());
  }

  std::uint64_t seed(const Json& section, std::string_view path, std::string_view key) {
    std::uint64_t s = 1;
    if (seed_override) s = *seed_override;
    else if (section.contains(std::string(key))) {
      const auto& v = section.at(std::string(key));
      const auto where = std::string(path) + "." + std::string(key);
      if (!v.is_number_unsigned()) throw Error(Errc::ConfigError, "expected a non-negative integer (" + where + ")", where);
      s = v.get<std::uint64_t>();
    }
    manifest.master_seed = s;
    return s;
  }
};

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json fit_json(const RateFit& f, XAxis axis) {
  return {{"axis", axis == XAxis::LogT ? "log_T" : "T"},
          {"slope", f.slope},
          {"intercept", f.intercept},
          {"ci95", f.ci95},
          {"r2", f.r2},
          {"points", f.points},
          {"floored", f.floored}};
}

DriftSpec drift_of(const Json& cfg) { return config::parse_drift(config::section(cfg, "drift")); }

// ---- subcommands ----

void run_simulate(Context& ctx) {
  const auto& s = config::section(ctx.config, "simulate");
  const std::string p = "simulate";
  const auto drift = drift_of(ctx.config);
  const double T = config::number(s, p, "T");
  const double dt = config::number_or(s, p, "dt", 0.01);
  const double x0 = config::number_or(s, p, "x0", 0.0);
  const auto stride = static_cast<std::size_t>(config::number_or(s, p, "stride", 1.0));
  if (!(T > 0.0)) throw Error(Errc::ConfigError, "T must be positive (simulate.T)", "simulate.T");
  if (stride < 1) throw Error(Errc::ConfigError, "stride must be >= 1 (simulate.stride)", "simulate.stride");
  const auto seed = ctx.seed(s, p, "seed");

  const auto path = simulate_path(drift, T, dt, x0, seed);
  Csv csv({"t", "x"});
  for (std::size_t k = 0; k < path.samples.size(); k += stride)
    csv.row(static_cast<double>(k) * dt, path.samples[k]);
  ctx.write("path.csv", csv.str());
  ctx.summary = {{"drift", family_name(drift)}, {"T", path.T}, {"dt", dt}, {"x0", x0},
                 {"seed", seed}, {"steps", path.steps()}, {"x_T", path.samples.back()}};

  // Optional controlled run to a fixed barrier.
  if (s.contains("threshold")) {
    const double y = config::number(s, p, "threshold");
    const auto payoff = config::parse_payoff(config::section(ctx.config, "payoff"), drift);
    const auto traj = simulate_impulse_controlled(
        drift, [y](const CycleHistory&) { return y; }, payoff, T, dt, seed);
    Csv tc({"tau", "y", "payoff", "phase"});
    for (const auto& e : traj.events) tc.row(e.time, e.threshold, e.payoff, to_string(e.phase));
    ctx.write("trajectory.csv", tc.str());
    ctx.summary["controlled"] = {{"threshold", y},
                                 {"cycles", traj.stop_times.size()},
                                 {"payoff_total", traj.total_payoff()}};
  }
}

DiffusionPath load_path_csv(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw Error(Errc::ConfigError, "cannot read path CSV " + file + " (estimate.path_csv)", "estimate.path_csv");
  DiffusionPath path;
  std::vector<double> times;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    ls.imbue(std::locale::classic());
    double t = 0.0, x = 0.0;
    char comma = 0;
    if (!(ls >> t >> comma >> x) || comma != ',') {
      if (times.empty()) continue;  // header
      throw Error(Errc::ConfigError, "malformed row in " + file + " (estimate.path_csv)", "estimate.path_csv");
    }
    times.push_back(t);
    path.samples.push_back(x);
  }
  if (times.size() < 2) throw Error(Errc::EmptyInput, "path CSV needs at least two rows");
  path.dt = times[1] - times[0];
  if (!(path.dt > 0.0)) throw Error(Errc::ConfigError, "path CSV times must increase (estimate.path_csv)", "estimate.path_csv");
  path.T = path.dt * static_cast<double>(path.steps());
  path.x0 = path.samples.front();
  return path;
}

void run_estimate(Context& ctx) {
  const auto& s = config::section(ctx.config, "estimate");
  const std::string p = "estimate";
  const bool has_drift = ctx.config.contains("drift");
  std::optional<DriftSpec> drift;
  if (has_drift) drift = drift_of(ctx.config);

  DiffusionPath path;
  std::uint64_t seed = 0;
  const auto csv_file = config::text_or(s, p, "path_csv", "");
  if (!csv_file.empty()) {
    path = load_path_csv(csv_file);
    ctx.manifest.master_seed = seed;
  } else {
    if (!drift) config::section(ctx.config, "drift");  // throws naming the key
    seed = ctx.seed(s, p, "seed");
    path = simulate_path(*drift, config::number(s, p, "T"), config::number_or(s, p, "dt", 0.01),
                         config::number_or(s, p, "x0", 0.0), seed);
  }

  const auto& g_cfg = config::section(ctx.config, "payoff");
  // The payoff families built on xi need a reference drift.
  const auto payoff = config::parse_payoff(g_cfg, drift.value_or(make_ou(0.5)));
  if (!drift && config::text_or(g_cfg, "payoff", "name", "") != "tabulated")
    throw Error(Errc::ConfigError, "analytic payoffs need a reference drift (drift)", "drift");

  Kernel kernel;
  const auto kname = config::text_or(s, p, "kernel", "epanechnikov");
  const auto shape = parse_kernel(kname);
  if (!shape) throw Error(Errc::ConfigError, "unknown kernel '" + kname + "' (estimate.kernel)", "estimate.kernel");
  kernel.shape = *shape;

  double a = 0.0, M1 = 0.0;
  if (s.contains("floor_a") && s.contains("clamp_M1")) {
    a = config::number(s, p, "floor_a");
    M1 = config::number(s, p, "clamp_M1");
  } else {
    if (!drift) throw Error(Errc::ConfigError, "floor_a and clamp_M1 are required without a drift (estimate.floor_a)",
                            "estimate.floor_a");
    const auto c = default_constants(invariant_law(*drift), payoff.y1, payoff.zeta);
    a = config::number_or(s, p, "floor_a", c.floor_a);
    M1 = config::number_or(s, p, "clamp_M1", c.clamp_M1);
  }

  const auto grid = barrier_grid(payoff.y1, payoff.zeta);
  const auto data = std::make_shared<const OccupationEstimator>(path);
  const auto est = xi_hat(data, kernel, grid, a, M1);
  const auto barrier = estimate_barrier(est, payoff, payoff.y1, payoff.zeta);

  std::shared_ptr<const XiCurve> xi_true;
  if (drift) xi_true = make_xi_curve(*drift);
  Csv csv = xi_true ? Csv({"x", "rho_hat", "F_hat", "xi_hat", "xi_true"}) : Csv({"x", "rho_hat", "F_hat", "xi_hat"});
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid[i];
    if (xi_true)
      csv.row(x, data->density(kernel, x), data->cdf(x), est.xi_values[i], (*xi_true)(x));
    else
      csv.row(x, data->density(kernel, x), data->cdf(x), est.xi_values[i]);
  }
  ctx.write("estimate.csv", csv.str());
  ctx.summary = {{"y_hat", barrier.y_hat}, {"value", barrier.value}, {"T", path.T}, {"seed", seed},
                 {"floor_a", a}, {"clamp_M1", M1}, {"kernel", to_string(kernel.shape)}};
  if (drift) {
    const auto law = invariant_law(*drift);
    ctx.summary["regret"] = simple_regret(*drift, payoff, barrier.y_hat, law);
  }
}

ExperimentConfig experiment_of(Context& ctx) {
  const auto& e = config::section(ctx.config, "experiment");
  auto c = config::parse_experiment(e);
  c.master_seed = ctx.seed(e, "experiment", "master_seed");
  if (ctx.threads_override) c.threads = *ctx.threads_override;
  c.drift = drift_of(ctx.config);
  return c;
}

void run_regret_sweep(Context& ctx) {
  auto base = experiment_of(ctx);
  const auto& g_cfg = config::section(ctx.config, "payoff");
  const auto betas = config::parse_betas(config::section(ctx.config, "experiment"));
  const bool tent = config::text_or(g_cfg, "payoff", "name", "") == "sim_tent";
  if (!tent && betas.size() > 1)
    throw Error(Errc::ConfigError, "several betas need the sim_tent payoff (experiment.betas)", "experiment.betas");

  std::vector<RegretRecord> all;
  Json fits = Json::array();
  for (double beta : betas) {
    auto c = base;
    c.beta = beta;
    c.payoff = config::parse_payoff(g_cfg, c.drift, tent ? std::optional<double>(beta) : std::nullopt);
    const auto recs = run_simple_regret_sweep(c);
    const auto axis = beta >= 1.0 ? XAxis::T : XAxis::LogT;
    Json entry = {{"beta", beta}};
    try {
      entry.update(fit_json(fit_rate_slope(recs, axis), axis));
    } catch (const Error& err) {
      if (err.code() != Errc::DegenerateDesign) throw;
      entry["fit_error"] = err.what();
    }
    entry["failed_replications"] = std::count_if(recs.begin(), recs.end(), [](const auto& r) { return !r.ok; });
    fits.push_back(entry);
    all.insert(all.end(), recs.begin(), recs.end());
  }

  ctx.write("regret_records.csv", regret_records_csv(all));
  ctx.write("regret_summary.csv", summary_csv(summarize(all)));
  std::vector<RegretRecord> log_part, lin_part;
  for (const auto& r : all) (r.beta >= 1.0 ? lin_part : log_part).push_back(r);
  if (!log_part.empty()) ctx.write("figure_loglog.csv", emit_figure_data(log_part, FigureMode::LogLog));
  if (!lin_part.empty()) ctx.write("figure_semilog.csv", emit_figure_data(lin_part, FigureMode::SemiLog));
  ctx.summary = {{"fits", fits}, {"T_grid", base.T_grid}, {"replications", base.replications},
                 {"dt", base.dt}, {"master_seed", base.master_seed}};
}

void run_cumulative(Context& ctx) {
  auto c = experiment_of(ctx);
  c.payoff = config::parse_payoff(config::section(ctx.config, "payoff"), c.drift);
  const auto strategy = config::parse_strategy(ctx.config);
  const auto recs = run_exploration_exploitation(c, strategy);

  ctx.write("cumulative_records.csv", cumulative_records_csv(recs));
  ctx.write("cumulative_summary.csv", summary_csv(summarize(recs)));
  std::vector<RegretRecord> as_regret;
  for (const auto& r : recs)
    as_regret.push_back({r.T, c.beta, r.replication, 0.0, r.regret_cum, r.seed, r.ok, r.error});
  ctx.write("figure_loglog.csv", emit_figure_data(as_regret, FigureMode::LogLog));

  Json fit = nullptr;
  try {
    fit = fit_json(fit_rate_slope(recs, XAxis::LogT), XAxis::LogT);
  } catch (const Error& err) {
    if (err.code() != Errc::DegenerateDesign) throw;
    fit = {{"fit_error", err.what()}};
  }
  ctx.summary = {{"fit", fit},
                 {"schedule", to_string(c.schedule)},
                 {"beta", c.beta},
                 {"block_len", strategy.block_len},
                 {"end_blocks_at_zero", strategy.end_blocks_at_zero},
                 {"explore", strategy.explore},
                 {"failed_replications", std::count_if(recs.begin(), recs.end(), [](const auto& r) { return !r.ok; })}};
}

std::vector<double> number_list(const Json& obj, const std::string& path, const std::string& key,
                                std::vector<double> fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  const auto where = path + "." + key;
  if (!v.is_array() || v.empty()) throw Error(Errc::ConfigError, "expected a non-empty list (" + where + ")", where);
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) throw Error(Errc::ConfigError, "expected numbers (" + where + ")", where);
    out.push_back(x.get<double>());
  }
  return out;
}

void run_pac(Context& ctx) {
  const auto& s = config::section(ctx.config, "pac");
  const std::string p = "pac";
  const auto betas = number_list(s, p, "betas", {0.25, 0.5, 0.75, 1.0});
  const auto eps = number_list(s, p, "eps", {0.1, 0.05, 0.01});
  const auto delta = number_list(s, p, "delta", {std::exp(-1.0), 0.1, 0.01});
  const double C1 = config::number_or(s, p, "C1", 1.0);
  const double c3 = config::number_or(s, p, "c3", 1.0);
  ctx.manifest.master_seed = 0;

  Csv csv({"beta", "eps", "delta", "T_margin", "T_general"});
  Json rows = Json::array();
  for (double b : betas)
    for (double e : eps)
      for (double d : delta) {
        const auto r = pac_bounds(b, e, d, C1, c3);
        csv.row(b, e, d, r.T_margin, r.T_general);
        rows.push_back({{"beta", b}, {"eps", e}, {"delta", d}, {"T_margin", r.T_margin}, {"T_general", r.T_general}});
      }
  ctx.write("pac.csv", csv.str());
  ctx.summary = {{"C1", C1}, {"c3", c3}, {"bounds", rows}};
}

void run_hypotheses(Context& ctx) {
  const auto& s = config::section(ctx.config, "hypotheses");
  const std::string p = "hypotheses";
  const auto mode = config::parse_mode(s);
  const auto horizons = number_list(s, p, "T", {1e2, 1e3, 1e4});
  const double step = config::number_or(s, p, "grid_step", 1e-4);
  const double csv_step = config::number_or(s, p, "csv_step", 1e-2);
  if (!(step > 0.0)) throw Error(Errc::ConfigError, "grid_step must be positive (hypotheses.grid_step)", "hypotheses.grid_step");
  if (!(csv_step > 0.0)) throw Error(Errc::ConfigError, "csv_step must be positive (hypotheses.csv_step)", "hypotheses.csv_step");
  ClassParams cls;
  cls.C = config::number_or(s, p, "C", 1.0);
  cls.gamma = config::number_or(s, p, "gamma", 0.5);
  if (s.contains("A")) cls.A = config::number(s, p, "A");
  ctx.manifest.master_seed = 0;

  Csv csv({"T", "x", "ratio_b", "ratio_b_bar"});
  Json rows = Json::array();
  for (double T : horizons) {
    const auto pair = build_hypotheses(mode, T, cls);
    const double kl = stationary_kl(pair.b, pair.b_bar, T, *pair.law_b, *pair.law_b_bar);
    const auto rep = verify_separation(pair, uniform_grid(pair.g.y1, pair.g.zeta, step));
    double delta = 0.0;
    if (const auto* gm = std::get_if<GeneralMode>(&pair.mode)) delta = gm->delta;
    Json sep = {{"holds", rep.holds},
                {"c_lower", rep.c_lower},
                {"c_upper", rep.c_upper},
                {"scale", rep.scale},
                {"y_star_b", rep.under_b.y_star},
                {"phi_b", rep.under_b.phi},
                {"y_star_b_bar", rep.under_b_bar.y_star},
                {"phi_b_bar", rep.under_b_bar.phi},
                {"left_set", {rep.left_lo, rep.left_hi}},
                {"near_optimal_set_b", {rep.near_b_lo, rep.near_b_hi}},
                {"right_covers_below_a", rep.right_covers_below_a}};
    if (rep.formula) {
      sep["formula"] = {{"c5", rep.formula->c5},
                        {"c_L2", rep.formula->c_L2},
                        {"c_L3", rep.formula->c_L3},
                        {"kappa_threshold", rep.formula->kappa_threshold},
                        {"holds", rep.formula_holds}};
    }
    rows.push_back({{"mode", mode_name(pair.mode)}, {"T", T}, {"eps", pair.eps}, {"delta", delta},
                    {"kl", kl}, {"separation_report", sep}});
    for (double x : uniform_grid(pair.g.y1, pair.g.zeta, csv_step)) {
      const double g = eval_payoff(pair.g, x);
      csv.row(T, x, g / (*pair.xi_b)(x), g / (*pair.xi_b_bar)(x));
    }
  }
  ctx.write("hypotheses.csv", csv.str());
  ctx.summary = {{"hypotheses", rows}};
}

void run_margin_check(Context& ctx) {
  const auto& s = config::section(ctx.config, "margin");
  const std::string p = "margin";
  const auto drift = drift_of(ctx.config);
  const auto payoff = config::parse_payoff(config::section(ctx.config, "payoff"), drift);
  MarginParams mp;
  mp.beta = config::number(s, p, "beta");
  mp.eta = config::number_or(s, p, "eta", 2.0);
  mp.n = static_cast<int>(config::number_or(s, p, "n", 1.0));
  mp.Delta0 = config::number_or(s, p, "Delta0", 0.5);
  const double step = config::number_or(s, p, "grid_step", 5e-5);
  if (!(mp.beta > 0.0)) throw Error(Errc::ConfigError, "beta must be positive (margin.beta)", "margin.beta");
  if (mp.n < 1) throw Error(Errc::ConfigError, "n must be >= 1 (margin.n)", "margin.n");
  if (!(step > 0.0)) throw Error(Errc::ConfigError, "grid_step must be positive (margin.grid_step)", "margin.grid_step");
  ctx.manifest.master_seed = 0;

  // The condition is stated for g / xi_b over the payoff window.
  const auto xi = make_xi_curve(drift);
  const auto grid = uniform_grid(payoff.y1, payoff.zeta, step);
  std::vector<double> f(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) f[i] = eval_payoff(payoff, grid[i]) / (*xi)(grid[i]);
  const auto deltas = default_delta_grid(mp.Delta0);
  const auto rep = check_margin(grid, f, mp, deltas);

  Json witnesses = Json::array();
  for (const auto& w : rep.witnesses) witnesses.push_back({{"Delta", w.Delta}, {"x", w.x}});

  const std::vector<DriftSpec> drifts{drift};
  const auto class_grid = uniform_grid(1e-3, std::min(3.0 * payoff.zeta, xi->x_max()), 1e-3);
  const auto cg = check_class_G(payoff, drifts, class_grid);
  ctx.summary = {{"ok", rep.ok},
                 {"beta", mp.beta},
                 {"eta", mp.eta},
                 {"n", mp.n},
                 {"Delta0", mp.Delta0},
                 {"maximizers", rep.maximizers},
                 {"witnesses", witnesses},
                 {"class_G",
                  {{"ok", cg.ok},
                   {"g0_boundary", cg.g0_boundary},
                   {"first_sign_change", cg.first_sign_change},
                   {"sup_abs", cg.sup_abs},
                   {"bound_ok", cg.bound_ok}}}};
}

const std::map<std::string, std::function<void(Context&)>, std::less<>>& table() {
  static const std::map<std::string, std::function<void(Context&)>, std::less<>> t = {
      {"simulate", run_simulate},         {"estimate", run_estimate}, {"regret-sweep", run_regret_sweep},
      {"cumulative", run_cumulative},     {"pac", run_pac},           {"hypotheses", run_hypotheses},
      {"margin-check", run_margin_check},
  };
  return t;
}

Json manifest_json(const RunManifest& m) {
  return {{"config_hash", m.config_hash}, {"subcommand", m.subcommand}, {"master_seed", m.master_seed},
          {"version", m.version},         {"outputs", m.outputs},       {"wall_seconds", m.wall_seconds},
          {"ok", m.ok}};
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names = {"simulate", "estimate", "regret-sweep", "cumulative",
                                                 "pac", "hypotheses", "margin-check"};
  return names;
}

int run(std::string_view subcommand, const RunOptions& options) {
  const auto t0 = std::chrono::steady_clock::now();
  fs::path out_dir = options.out_dir;
  if (out_dir.empty()) {
    const char* env = std::getenv(std::string(kOutDirEnv).c_str());
    out_dir = env && *env ? env : "out";
  }
  RunManifest manifest;
  manifest.subcommand = std::string(subcommand);

  int status = 0;
  Json error_json;
  try {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw Error(Errc::BadParameters, "cannot create output directory " + out_dir.string());
    const auto it = table().find(subcommand);
    if (it == table().end())
      throw Error(Errc::ConfigError, "unknown subcommand '" + std::string(subcommand) + "'");
    const auto cfg = config::load(options.config_path);
    if (!cfg.is_object()) throw Error(Errc::ConfigError, "config must be a JSON object");
    manifest.config_hash = config::hash(cfg);
    Context ctx{cfg, out_dir, options.seed, options.threads, manifest};
    it->second(ctx);
    ctx.write("summary.json", dump(ctx.summary));
    manifest.ok = true;
  } catch (const Error& e) {
    status = e.code() == Errc::ConfigError ? 2 : 1;
    error_json = {{"error", std::string(to_string(e.code()))}, {"message", e.what()}};
    if (!e.key().empty()) error_json["key"] = e.key();
  } catch (const std::exception& e) {
    status = 1;
    error_json = {{"error", "Internal"}, {"message", e.what()}};
  }

  if (status != 0) {
    std::cerr << error_json.dump() << '\n';
    std::ofstream f(out_dir / "error.json");
    if (f << dump(error_json)) manifest.outputs.push_back((out_dir / "error.json").string());
  }
  manifest.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::ofstream m(out_dir / "manifest.json");
  m << dump(manifest_json(manifest));
  return status;
}

std::string emit_figure_data(std::span<const RegretRecord> records, FigureMode mode) {
  const auto rows = summarize(records);
  if (rows.empty()) throw Error(Errc::EmptyInput, "no successful records to plot");
  Csv csv({"x", "y", "beta", "n_reps", "stderr"});
  for (const auto& r : rows) {
    const double mean = std::max(r.mean, std::numeric_limits<double>::min());
    const double x = mode == FigureMode::LogLog ? std::log(r.T) : r.T;
    csv.row(x, std::log(mean), r.beta, r.n, r.stderr_mean / mean);
  }
  return csv.str();
}

std::string regret_records_csv(std::span<const RegretRecord> records) {
  Csv csv({"T", "beta", "replication", "y_hat", "regret", "seed", "ok", "error"});
  for (const auto& r : records) csv.row(r.T, r.beta, r.replication, r.y_hat, r.regret, r.seed, r.ok, r.error);
  return csv.str();
}

std::string cumulative_records_csv(std::span<const CumulativeRecord> records) {
  Csv csv({"T", "replication", "regret_cum", "payoff_total", "exploration_time", "n_cycles", "seed", "ok", "error"});
  for (const auto& r : records)
    csv.row(r.T, r.replication, r.regret_cum, r.payoff_total, r.exploration_time, r.n_cycles, r.seed, r.ok, r.error);
  return csv.str();
}

std::string summary_csv(std::span<const HorizonSummary> rows) {
  Csv csv({"T", "beta", "n", "mean", "median", "stderr"});
  for (const auto& r : rows) csv.row(r.T, r.beta, r.n, r.mean, r.median, r.stderr_mean);
  return csv.str();
}

}  // namespace ddstop::cli
