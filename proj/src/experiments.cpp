#include "ddstop/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <numbers>
#include <thread>

#include "ddstop/error.hpp"
#include "ddstop/numeric.hpp"
#include "ddstop/sde.hpp"

namespace ddstop {

std::string to_string(ScheduleMode mode) { return mode == ScheduleMode::Margin ? "margin" : "general"; }

double schedule_budget(ScheduleMode mode, double beta, double t) {
  if (t <= 0.0) return 0.0;
  if (mode == ScheduleMode::General) return std::pow(t, 2.0 / 3.0);
  DDSTOP_REQUIRE(beta > 0.0 && beta < 1.0, Errc::BadParameters, "margin schedule needs beta in (0, 1)");
  return std::pow(t, (2.0 - 2.0 * beta) / (3.0 - 2.0 * beta));
}

void validate(const ExperimentConfig& c) {
  DDSTOP_REQUIRE(!c.T_grid.empty() && std::is_sorted(c.T_grid.begin(), c.T_grid.end()), Errc::BadParameters,
                 "T_grid must be non-empty and sorted");
  DDSTOP_REQUIRE(c.T_grid.front() >= c.dt, Errc::BadParameters, "every horizon must cover one step");
  DDSTOP_REQUIRE(c.replications >= 1, Errc::BadParameters, "replications must be >= 1");
  DDSTOP_REQUIRE(c.dt > 0.0 && c.dt <= 0.05, Errc::BadParameters, "dt must lie in (0, 0.05]");
  DDSTOP_REQUIRE(c.payoff.y1 > 0.0 && c.payoff.y1 < c.payoff.zeta, Errc::BadParameters,
                 "window needs 0 < y1 < zeta");
  DDSTOP_REQUIRE(c.threads >= 1, Errc::BadParameters, "threads must be >= 1");
}

EstimatorConstants default_constants(const InvariantLaw& law, double y1, double zeta) {
  double min_rho = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < law.grid.size(); ++i)
    if (law.grid[i] >= 0.0 && law.grid[i] <= zeta) min_rho = std::min(min_rho, law.density[i]);
  min_rho = std::min({min_rho, law.density_at(0.0), law.density_at(zeta)});
  DDSTOP_REQUIRE(min_rho > 0.0, Errc::BadParameters, "invariant density vanishes on [0, zeta]");
  return {0.5 * min_rho, 0.5 * XiCurve(law)(y1)};
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& task) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(threads, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n && !failed; i = next++) {
        try {
          task(i);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

namespace {

struct OracleContext {
  InvariantLaw law;
  XiCurve xi;
  PhiStar phi;
  EstimatorConstants constants;
  std::vector<double> grid;

  explicit OracleContext(const ExperimentConfig& c)
      : law(invariant_law(c.drift)), xi(law), grid(barrier_grid(c.payoff.y1, c.payoff.zeta)) {
    phi = phi_star(xi, c.payoff, c.payoff.y1, c.payoff.zeta, grid, c.zoom);
    constants = default_constants(law, c.payoff.y1, c.payoff.zeta);
    if (c.floor_a) constants.floor_a = *c.floor_a;
    if (c.clamp_M1) constants.clamp_M1 = *c.clamp_M1;
  }
};

double start_state(const ExperimentConfig& c, const OracleContext& oracle, std::uint64_t seed) {
  // A distinct stream so the stationary draw does not consume path noise.
  return c.stationary_start ? sample_stationary_start(oracle.law, derive_seed(seed, 0x5eedULL)) : 0.0;
}

}  // namespace

std::vector<RegretRecord> run_simple_regret_sweep(const ExperimentConfig& config) {
  validate(config);
  const OracleContext oracle(config);
  const std::size_t reps = static_cast<std::size_t>(config.replications);
  const std::size_t nT = config.T_grid.size();
  std::vector<RegretRecord> records(nT * reps);

  parallel_for(reps, config.threads, [&](std::size_t r) {
    const std::uint64_t seed = derive_seed(config.master_seed, r);
    for (std::size_t j = 0; j < nT; ++j) {
      auto& rec = records[j * reps + r];
      rec.T = config.T_grid[j];
      rec.beta = config.beta;
      rec.replication = static_cast<int>(r);
      rec.seed = seed;
    }
    try {
      const DiffusionPath path =
          simulate_path(config.drift, config.T_grid.back(), config.dt, start_state(config, oracle, seed), seed);
      for (std::size_t j = 0; j < nT; ++j) {
        auto& rec = records[j * reps + r];
        try {
          const std::size_t steps = steps_for_horizon(config.T_grid[j], config.dt);
          auto data = std::make_shared<const OccupationEstimator>(
              path.riemann_nodes().first(std::min(steps, path.steps())), config.dt);
          const auto est = xi_hat(data, config.kernel, oracle.grid, oracle.constants.floor_a,
                                  oracle.constants.clamp_M1);
          const auto barrier = estimate_barrier(est, config.payoff, config.payoff.y1, config.payoff.zeta, config.zoom);
          rec.y_hat = barrier.y_hat;
          rec.regret = simple_regret(oracle.xi, config.payoff, barrier.y_hat, oracle.phi);
        } catch (const std::exception& e) {
          rec.ok = false;
          rec.regret = std::numeric_limits<double>::quiet_NaN();
          rec.error = e.what();
        }
      }
    } catch (const std::exception& e) {
      for (std::size_t j = 0; j < nT; ++j) {
        auto& rec = records[j * reps + r];
        rec.ok = false;
        rec.regret = std::numeric_limits<double>::quiet_NaN();
        rec.error = e.what();
      }
    }
  });
  return records;
}

RateFit fit_line(std::span<const double> x, std::span<const double> y) {
  DDSTOP_REQUIRE(x.size() == y.size(), Errc::BadParameters, "fit_line: size mismatch");
  const std::size_t n = x.size();
  if (n < 3) throw Error(Errc::DegenerateDesign, "line fit needs at least 3 points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw Error(Errc::DegenerateDesign, "line fit needs distinct x values");
  RateFit fit;
  fit.points = n;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = y[i] - fit.intercept - fit.slope * x[i];
    ssr += e * e;
  }
  fit.r2 = syy > 0.0 ? 1.0 - ssr / syy : 1.0;
  const double dof = static_cast<double>(n - 2);
  fit.ci95 = student_t_quantile(0.975, dof) * std::sqrt(ssr / dof / sxx);
  return fit;
}

std::vector<HorizonSummary> summarize(std::span<const RegretRecord> records) {
  std::map<std::pair<double, double>, std::vector<double>> groups;
  for (const auto& r : records)
    if (r.ok) groups[{r.beta, r.T}].push_back(r.regret);
  std::vector<HorizonSummary> out;
  for (auto& [key, v] : groups) {
    HorizonSummary s;
    s.beta = key.first;
    s.T = key.second;
    s.n = v.size();
    double sum = 0.0;
    for (double x : v) sum += x;
    s.mean = sum / static_cast<double>(s.n);
    double ss = 0.0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.stderr_mean = s.n > 1 ? std::sqrt(ss / static_cast<double>(s.n - 1) / static_cast<double>(s.n)) : 0.0;
    std::sort(v.begin(), v.end());
    s.median = s.n % 2 ? v[s.n / 2] : 0.5 * (v[s.n / 2 - 1] + v[s.n / 2]);
    out.push_back(s);
  }
  return out;
}

RateFit fit_rate_slope(std::span<const RegretRecord> records, XAxis axis) {
  const auto groups = summarize(records);
  if (groups.size() < 4) throw Error(Errc::DegenerateDesign, "rate fit needs at least 4 distinct horizons");
  std::vector<double> x, y;
  bool floored = false;
  for (const auto& g : groups) {
    x.push_back(axis == XAxis::LogT ? std::log(g.T) : g.T);
    double m = g.mean;
    if (!(m > 0.0)) {
      m = std::numeric_limits<double>::min();
      floored = true;
    }
    y.push_back(std::log(m));
  }
  RateFit fit = fit_line(x, y);
  fit.floored = floored;
  return fit;
}

PacBounds pac_bounds(double beta, double eps, double delta, double C1, double c3) {
  DDSTOP_REQUIRE(eps > 0.0 && eps < 1.0, Errc::BadParameters, "pac_bounds needs eps in (0, 1)");
  DDSTOP_REQUIRE(delta > 0.0 && delta <= std::exp(-1.0) * (1.0 + 1e-15), Errc::BadParameters,
                 "pac_bounds needs delta in (0, 1/e]");
  DDSTOP_REQUIRE(beta > 0.0 && C1 > 0.0 && c3 > 0.0, Errc::BadParameters, "pac_bounds needs beta, C1, c3 > 0");
  PacBounds out;
  if (beta < 1.0) {
    const double p = 2.0 - 2.0 * beta;
    out.T_margin = 4.0 * C1 * C1 * std::exp(p) * std::log(1.0 / delta) / ((1.0 - beta) * std::pow(eps, p));
  } else {
    out.T_margin = 4.0 * C1 * C1 / std::numbers::ln2 * std::log(2.0 / delta) * std::log(std::numbers::e / eps);
  }
  out.T_general = 4.0 * std::exp(2.0) * c3 * c3 / (eps * eps) * std::log(1.0 / delta);
  return out;
}

double pac_psi(double alpha, double T, double u, double C1) {
  DDSTOP_REQUIRE(alpha > 0.0 && alpha < 1.0 && T > 0.0 && u > 0.0 && C1 > 0.0, Errc::BadParameters,
                 "pac_psi needs alpha in (0, 1) and positive T, u, C1");
  const double q = 1.0 / (1.0 - alpha);
  const double h = 0.5 * q;
  const double v = u * q;
  const double t_pow = std::pow(T, -h);
  return std::numbers::e * std::pow(C1, q) * t_pow * (std::pow(v, h) + std::pow(v, q) * t_pow);
}

double pac_psi_inf(double beta, double T, double u, double C1) {
  const double top = std::min(beta, 1.0);
  DDSTOP_REQUIRE(top > 0.0, Errc::BadParameters, "pac_psi_inf needs beta > 0");
  // The infimum over the open interval may sit at its right end; scan
  // interior points and refine around the best one.
  constexpr int kScan = 400;
  double best_alpha = 0.0, best = std::numeric_limits<double>::infinity();
  const double cap = top * (1.0 - 1e-9);
  for (int i = 1; i <= kScan; ++i) {
    const double a = cap * static_cast<double>(i) / kScan;
    const double v = pac_psi(a, T, u, C1);
    if (v < best) {
      best = v;
      best_alpha = a;
    }
  }
  double lo = std::max(best_alpha - cap / kScan, cap * 1e-6);
  double hi = std::min(best_alpha + cap / kScan, cap);
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int k = 0; k < 100; ++k) {
    const double a1 = hi - phi * (hi - lo);
    const double a2 = lo + phi * (hi - lo);
    if (pac_psi(a1, T, u, C1) < pac_psi(a2, T, u, C1)) hi = a2;
    else lo = a1;
  }
  return std::min(best, pac_psi(0.5 * (lo + hi), T, u, C1));
}

double pac_general_level(double T, double u, double c3) {
  DDSTOP_REQUIRE(T > 0.0 && u > 0.0 && c3 > 0.0, Errc::BadParameters, "pac_general_level needs positive inputs");
  const double s = 1.0 / std::sqrt(T);
  return std::numbers::e * c3 * s * (std::sqrt(u) + u * s);
}

double empirical_pac_check(std::span<const RegretRecord> records, double eps) {
  std::size_t n = 0, hits = 0;
  for (const auto& r : records) {
    if (!r.ok) continue;
    ++n;
    if (r.regret >= eps) ++hits;
  }
  if (n < 50) throw Error(Errc::TooFewRecords, "empirical PAC check needs >= 50 records, got " + std::to_string(n));
  return static_cast<double>(hits) / static_cast<double>(n);
}

namespace {

struct Block {
  double start = 0.0;
  double end = 0.0;
};

double explored_before(const std::vector<Block>& blocks, double T) {
  double s = 0.0;
  for (const auto& b : blocks) s += std::max(0.0, std::min(b.end, T) - b.start);
  return s;
}

}  // namespace

std::vector<CumulativeRecord> run_exploration_exploitation(const ExperimentConfig& config,
                                                           const StrategyParams& strategy) {
  validate(config);
  DDSTOP_REQUIRE(strategy.block_len > 0.0, Errc::BadParameters, "block_len must be positive");
  DDSTOP_REQUIRE(strategy.explore || strategy.fixed_threshold, Errc::BadParameters,
                 "disabling exploration requires a fixed threshold");
  const OracleContext oracle(config);
  const std::size_t reps = static_cast<std::size_t>(config.replications);
  const std::size_t nT = config.T_grid.size();
  std::vector<CumulativeRecord> records(nT * reps);

  parallel_for(reps, config.threads, [&](std::size_t r) {
    const std::uint64_t seed = derive_seed(config.master_seed, r);
    for (std::size_t j = 0; j < nT; ++j) {
      auto& rec = records[j * reps + r];
      rec.T = config.T_grid[j];
      rec.replication = static_cast<int>(r);
      rec.seed = seed;
    }
    try {
      ImpulseSimulator sim(config.drift, config.dt, config.T_grid.back(), seed);
      std::vector<Block> blocks;
      std::vector<double> fresh;
      std::shared_ptr<OccupationEstimator> data;
      double threshold = strategy.fixed_threshold.value_or(config.payoff.y1);
      bool stale = true;
      double explored = 0.0;

      while (!sim.finished()) {
        const double budget = std::max(schedule_budget(config.schedule, config.beta, sim.now()), strategy.block_len);
        if (strategy.explore && explored < budget) {
          const double start = sim.now();
          fresh.clear();
          sim.explore(strategy.block_len, &fresh, strategy.end_blocks_at_zero);
          blocks.push_back({start, sim.now()});
          explored += sim.now() - start;
          if (!data) data = std::make_shared<OccupationEstimator>(fresh, config.dt);
          else data->append(fresh);
          stale = true;
          continue;
        }
        if (strategy.explore && stale) {
          const auto est = xi_hat(data, config.kernel, oracle.grid, oracle.constants.floor_a,
                                  oracle.constants.clamp_M1);
          threshold = estimate_barrier(est, config.payoff, config.payoff.y1, config.payoff.zeta, config.zoom).y_hat;
          stale = false;
        }
        if (!sim.exploit(threshold, config.payoff)) break;
      }

      const ControlledTrajectory traj = std::move(sim).finish();
      for (std::size_t j = 0; j < nT; ++j) {
        auto& rec = records[j * reps + r];
        const double T = config.T_grid[j];
        for (std::size_t k = 0; k < traj.stop_times.size() && traj.stop_times[k] <= T + 1e-9 * T; ++k) {
          rec.payoff_total += traj.payoffs[k];
          ++rec.n_cycles;
        }
        rec.exploration_time = explored_before(blocks, T);
        rec.regret_cum = oracle.phi.phi * T - rec.payoff_total;
      }
    } catch (const std::exception& e) {
      for (std::size_t j = 0; j < nT; ++j) {
        auto& rec = records[j * reps + r];
        rec.ok = false;
        rec.regret_cum = std::numeric_limits<double>::quiet_NaN();
        rec.error = e.what();
      }
    }
  });
  return records;
}

namespace {

std::vector<RegretRecord> as_regret_records(std::span<const CumulativeRecord> records) {
  std::vector<RegretRecord> out;
  out.reserve(records.size());
  for (const auto& c : records) {
    RegretRecord r;
    r.T = c.T;
    r.replication = c.replication;
    r.regret = c.regret_cum;
    r.seed = c.seed;
    r.ok = c.ok;
    out.push_back(r);
  }
  return out;
}

}  // namespace

RateFit fit_rate_slope(std::span<const CumulativeRecord> records, XAxis axis) {
  return fit_rate_slope(as_regret_records(records), axis);
}

std::vector<HorizonSummary> summarize(std::span<const CumulativeRecord> records) {
  return summarize(as_regret_records(records));
}

}  // namespace ddstop
