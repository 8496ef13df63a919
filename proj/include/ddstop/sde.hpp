#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "ddstop/drift.hpp"

namespace ddstop {

struct PayoffSpec;

/// Per-replication seed: splitmix64(master ^ index). Identical for every
/// horizon, so the paths of one replication at different horizons share a
/// prefix.
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index) noexcept;

/// Standard normal draws from a seeded mt19937_64. At coarsening level L each
/// draw is the normalized sum of 2^L underlying draws, so a path simulated
/// with step 2^L dt at level L is driven by the same Brownian motion as the
/// level-0 path with step dt. In zero-noise mode every draw is 0.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed, unsigned level = 0, bool zero_noise = false);

  double next();

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
  unsigned level_;
  double scale_;
  bool zero_noise_;
};

struct SimOptions {
  unsigned coarsen_level = 0;
  bool zero_noise = false;
};

/// Discretized trajectory X_0, X_dt, ..., X_T with T = dt * (samples.size() - 1).
struct DiffusionPath {
  double dt = 0.01;
  std::vector<double> samples;
  double T = 0.0;
  std::uint64_t seed = 0;
  double x0 = 0.0;

  std::size_t steps() const { return samples.empty() ? 0 : samples.size() - 1; }
  /// Left-endpoint samples X_0 .. X_{T-dt}: the Riemann nodes of time integrals.
  std::span<const double> riemann_nodes() const {
    return std::span<const double>(samples).first(steps());
  }
  /// First `steps` Euler steps as a path of horizon steps * dt.
  DiffusionPath prefix(std::size_t steps) const;
};

/// Number of Euler steps for horizon T (rounded to the nearest step, >= 1).
std::size_t steps_for_horizon(double T, double dt);

/// Euler-Maruyama: X_{k+1} = X_k + b(X_k) dt + sqrt(dt) Z_k.
DiffusionPath simulate_path(const DriftSpec& spec, double T, double dt, double x0,
                            std::uint64_t seed, const SimOptions& options = {});

/// Stationary initial state by inverse-CDF sampling from the invariant law.
double sample_stationary_start(const InvariantLaw& law, std::uint64_t seed);

struct HittingTime {
  double tau = 0.0;
  bool hit = false;
};

/// First grid time with X >= threshold for the path started at 0.
/// Returns {t_cap, false} if the level is not reached by t_cap.
HittingTime first_hitting_time(const DriftSpec& spec, double threshold, double dt,
                               std::uint64_t seed, double t_cap,
                               const SimOptions& options = {});

enum class Phase { Explore, Exploit };

std::string to_string(Phase phase);

/// One row of a controlled trajectory: an exploitation stop (threshold and
/// payoff set) or the end of an exploration block (threshold NaN, payoff 0).
struct CycleEvent {
  double time = 0.0;
  double threshold = 0.0;
  double payoff = 0.0;
  Phase phase = Phase::Exploit;
};

struct ControlledTrajectory {
  std::vector<double> stop_times;
  std::vector<double> thresholds;
  std::vector<double> payoffs;
  std::vector<CycleEvent> events;
  double exploration_time = 0.0;
  double total_T = 0.0;
  /// Full state record (only when requested); post-stop states are exactly 0.
  std::optional<DiffusionPath> path;

  double total_payoff() const;
};

/// History visible to a threshold policy before a new cycle starts.
struct CycleHistory {
  std::span<const double> stop_times;
  std::span<const double> thresholds;
  std::span<const double> payoffs;
  double now = 0.0;
};

using ThresholdPolicy = std::function<double(const CycleHistory&)>;

/// Stepper for impulse-controlled dynamics: the process follows the SDE,
/// is observed unstopped during exploration blocks and is reset to 0 at every
/// exploitation stop. Payoffs are g at the pre-stop state, which for the
/// continuous process is the barrier itself, so g(y_n) is credited.
class ImpulseSimulator {
 public:
  ImpulseSimulator(const DriftSpec& spec, double dt, double horizon, std::uint64_t seed,
                   bool record_path = false);

  double now() const { return t_; }
  double state() const { return x_; }
  bool finished() const { return step_ >= total_steps_; }
  CycleHistory history() const;

  /// Runs the unstopped process for `length` (truncated at the horizon) and
  /// appends the left-endpoint samples of the block to `observed`. With
  /// `until_zero` the block then continues until the path crosses 0, so that
  /// blocks started at 0 concatenate into one path of the diffusion.
  void explore(double length, std::vector<double>* observed, bool until_zero = false);

  /// Runs from the current state until X >= threshold. Validates the
  /// threshold against [y1, zeta]. Returns true if the stop happened by the
  /// horizon. A cycle that starts at or above the threshold stops at once and
  /// credits g at the current state.
  bool exploit(double threshold, const PayoffSpec& payoff);

  ControlledTrajectory finish() &&;

 private:
  void advance();

  const DriftSpec& spec_;
  double dt_;
  double sqrt_dt_;
  std::size_t total_steps_;
  std::size_t step_ = 0;
  double t_ = 0.0;
  double x_ = 0.0;
  NormalStream noise_;
  ControlledTrajectory traj_;
};

ControlledTrajectory simulate_impulse_controlled(const DriftSpec& spec, const ThresholdPolicy& policy,
                                                 const PayoffSpec& payoff, double T, double dt,
                                                 std::uint64_t seed, bool record_path = false);

}  // namespace ddstop
