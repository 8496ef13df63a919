#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ddstop/drift.hpp"
#include "ddstop/estimators.hpp"
#include "ddstop/oracle.hpp"
#include "ddstop/payoff.hpp"

namespace ddstop {

enum class ScheduleMode { Margin, General };

std::string to_string(ScheduleMode mode);

/// Exploration budget S_t: t^{(2-2beta)/(3-2beta)} under the margin
/// condition, t^{2/3} in the general case.
double schedule_budget(ScheduleMode mode, double beta, double t);

struct ExperimentConfig {
  DriftSpec drift;
  PayoffSpec payoff;
  /// Margin exponent attached to the records and used by the margin schedule.
  double beta = 0.5;
  std::vector<double> T_grid;
  double dt = 0.01;
  int replications = 50;
  std::uint64_t master_seed = 1;
  /// Estimator constants; unset means 0.5 min rho_b on [0, zeta] and 0.5 xi_b(y1).
  std::optional<double> floor_a;
  std::optional<double> clamp_M1;
  Kernel kernel;
  /// Off-grid refinement of the barrier and of the oracle maximizer; off by default.
  ZoomOptions zoom{0, 201};
  bool stationary_start = false;
  ScheduleMode schedule = ScheduleMode::Margin;
  int threads = 1;
};

/// Throws BadParameters for an invalid config.
void validate(const ExperimentConfig& config);

struct EstimatorConstants {
  double floor_a = 0.0;
  double clamp_M1 = 0.0;
};

/// a = 0.5 min_{[0, zeta]} rho_b and M1 = 0.5 xi_b(y1).
EstimatorConstants default_constants(const InvariantLaw& law, double y1, double zeta);

struct RegretRecord {
  double T = 0.0;
  double beta = 0.0;
  int replication = 0;
  double y_hat = 0.0;
  double regret = 0.0;
  std::uint64_t seed = 0;
  bool ok = true;
  std::string error;
};

/// For every replication one path of the longest horizon is simulated from
/// the replication seed; shorter horizons use its prefixes. Records are
/// ordered by (T, replication) and do not depend on the thread count. A
/// failing replication is flagged and the sweep continues.
std::vector<RegretRecord> run_simple_regret_sweep(const ExperimentConfig& config);

enum class XAxis { LogT, T };

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  /// Half-width of the 95% confidence interval of the slope.
  double ci95 = 0.0;
  std::size_t points = 0;
  /// A zero mean was floored at the smallest normal double before the log.
  bool floored = false;
};

/// OLS of y on x with standard errors from the residual variance.
RateFit fit_line(std::span<const double> x, std::span<const double> y);

/// OLS of log(mean regret per T) on log T (or T). Throws DegenerateDesign for
/// fewer than 4 distinct horizons.
RateFit fit_rate_slope(std::span<const RegretRecord> records, XAxis axis);

struct HorizonSummary {
  double T = 0.0;
  double beta = 0.0;
  std::size_t n = 0;
  double mean = 0.0;
  double median = 0.0;
  double stderr_mean = 0.0;
};

/// Statistics of the successful records per (beta, T), sorted by beta then T.
std::vector<HorizonSummary> summarize(std::span<const RegretRecord> records);

struct PacBounds {
  double T_margin = 0.0;
  double T_general = 0.0;
};

/// Horizons guaranteeing regret < eps with probability >= 1 - delta.
/// Throws BadParameters outside eps in (0,1), delta in (0, 1/e], beta, C1, c3 > 0.
PacBounds pac_bounds(double beta, double eps, double delta, double C1 = 1.0, double c3 = 1.0);

/// Psi_{alpha,T}(u) = e C1^{1/(1-alpha)} T^{-1/(2-2alpha)}
///   ((u/(1-alpha))^{1/(2-2alpha)} + (u/(1-alpha))^{1/(1-alpha)} T^{-1/(2-2alpha)}).
double pac_psi(double alpha, double T, double u, double C1 = 1.0);

/// inf of pac_psi over alpha in (0, min(beta, 1)), by a grid scan refined
/// with golden-section search.
double pac_psi_inf(double beta, double T, double u, double C1 = 1.0);

/// e c3 T^{-1/2} (u^{1/2} + u T^{-1/2}).
double pac_general_level(double T, double u, double c3 = 1.0);

/// Fraction of records with regret >= eps. Throws TooFewRecords below 50.
double empirical_pac_check(std::span<const RegretRecord> records, double eps);

struct StrategyParams {
  double block_len = 1.0;
  /// Extend each block until the path returns to 0 (see ImpulseSimulator::explore).
  /// Without it, blocks restart at 0 after every reset and the exploration data
  /// are short excursions rather than a stationary record.
  bool end_blocks_at_zero = true;
  /// false disables exploration; a fixed threshold is then required.
  bool explore = true;
  std::optional<double> fixed_threshold;
};

struct CumulativeRecord {
  double T = 0.0;
  int replication = 0;
  double regret_cum = 0.0;
  double payoff_total = 0.0;
  double exploration_time = 0.0;
  int n_cycles = 0;
  std::uint64_t seed = 0;
  bool ok = true;
  std::string error;
};

/// Exploration-exploitation strategy: while the explored time is below
/// max(S_t, block_len) an exploration block of length at least block_len
/// observes the unstopped process from its current state; otherwise the barrier is
/// re-estimated from all exploration data (only when new data arrived) and
/// one exploitation cycle runs to it. Each replication simulates the longest
/// horizon once; every shorter horizon reads the same trajectory up to T,
/// which is exact because no decision depends on the horizon.
std::vector<CumulativeRecord> run_exploration_exploitation(const ExperimentConfig& config,
                                                           const StrategyParams& strategy);

/// The same fit and summary over regret_cum, for the cumulative runner.
RateFit fit_rate_slope(std::span<const CumulativeRecord> records, XAxis axis);
std::vector<HorizonSummary> summarize(std::span<const CumulativeRecord> records);

/// Runs `task(i)` for i in [0, n) on up to `threads` workers.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& task);

}  // namespace ddstop
