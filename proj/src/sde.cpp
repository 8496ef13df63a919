#include "ddstop/sde.hpp"

#include <cmath>
#include <limits>

#include "ddstop/error.hpp"
#include "ddstop/payoff.hpp"

namespace ddstop {

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index) noexcept {
  std::uint64_t z = master_seed ^ index;
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

NormalStream::NormalStream(std::uint64_t seed, unsigned level, bool zero_noise)
    : engine_(seed),
      level_(level),
      scale_(1.0 / std::sqrt(std::ldexp(1.0, static_cast<int>(level)))),
      zero_noise_(zero_noise) {}

double NormalStream::next() {
  if (zero_noise_) return 0.0;
  if (level_ == 0) return normal_(engine_);
  double sum = 0.0;
  const std::size_t count = std::size_t{1} << level_;
  for (std::size_t i = 0; i < count; ++i) sum += normal_(engine_);
  return sum * scale_;
}

DiffusionPath DiffusionPath::prefix(std::size_t n) const {
  DDSTOP_REQUIRE(n >= 1 && n <= steps(), Errc::BadParameters, "prefix length out of range");
  DiffusionPath out;
  out.dt = dt;
  out.samples.assign(samples.begin(), samples.begin() + static_cast<std::ptrdiff_t>(n + 1));
  out.T = dt * static_cast<double>(n);
  out.seed = seed;
  out.x0 = x0;
  return out;
}

std::size_t steps_for_horizon(double T, double dt) {
  DDSTOP_REQUIRE(dt > 0.0 && T > 0.0, Errc::BadParameters, "horizon and step must be positive");
  const double n = std::round(T / dt);
  return n < 1.0 ? 1 : static_cast<std::size_t>(n);
}

namespace {

void require_step(double dt) {
  DDSTOP_REQUIRE(dt > 0.0 && dt <= 0.05, Errc::BadParameters, "time step must lie in (0, 0.05]");
}

}  // namespace

DiffusionPath simulate_path(const DriftSpec& spec, double T, double dt, double x0, std::uint64_t seed,
                            const SimOptions& options) {
  require_step(dt);
  DDSTOP_REQUIRE(T >= dt * (1.0 - 1e-12), Errc::BadParameters, "horizon shorter than one step");
  const std::size_t n = steps_for_horizon(T, dt);
  NormalStream noise(seed, options.coarsen_level, options.zero_noise);
  const double sqrt_dt = std::sqrt(dt);

  DiffusionPath path;
  path.dt = dt;
  path.T = dt * static_cast<double>(n);
  path.seed = seed;
  path.x0 = x0;
  path.samples.resize(n + 1);
  path.samples[0] = x0;
  double x = x0;
  for (std::size_t k = 0; k < n; ++k) {
    x += eval_drift(spec, x) * dt + sqrt_dt * noise.next();
    if (!std::isfinite(x))
      throw Error(Errc::NonFinite, "path overflowed at step " + std::to_string(k + 1));
    path.samples[k + 1] = x;
  }
  return path;
}

double sample_stationary_start(const InvariantLaw& law, std::uint64_t seed) {
  std::mt19937_64 engine(seed);
  // 53 random bits, shifted off 0 so the draw lies in (0, 1).
  const double u = (static_cast<double>(engine() >> 11) + 0.5) * 0x1.0p-53;
  return law.quantile(u);
}

HittingTime first_hitting_time(const DriftSpec& spec, double threshold, double dt, std::uint64_t seed,
                               double t_cap, const SimOptions& options) {
  require_step(dt);
  if (threshold <= 0.0) return {0.0, true};
  const std::size_t n = steps_for_horizon(t_cap, dt);
  NormalStream noise(seed, options.coarsen_level, options.zero_noise);
  const double sqrt_dt = std::sqrt(dt);
  double x = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    x += eval_drift(spec, x) * dt + sqrt_dt * noise.next();
    if (x >= threshold) return {dt * static_cast<double>(k + 1), true};
    if (!std::isfinite(x)) throw Error(Errc::NonFinite, "hitting-time path overflowed");
  }
  return {t_cap, false};
}

std::string to_string(Phase phase) { return phase == Phase::Explore ? "explore" : "exploit"; }

double ControlledTrajectory::total_payoff() const {
  double s = 0.0;
  for (double p : payoffs) s += p;
  return s;
}

ImpulseSimulator::ImpulseSimulator(const DriftSpec& spec, double dt, double horizon, std::uint64_t seed,
                                   bool record_path)
    : spec_(spec),
      dt_(dt),
      sqrt_dt_(std::sqrt(dt)),
      total_steps_(steps_for_horizon(horizon, dt)),
      noise_(seed) {
  require_step(dt);
  traj_.total_T = dt * static_cast<double>(total_steps_);
  if (record_path) {
    traj_.path.emplace();
    traj_.path->dt = dt;
    traj_.path->seed = seed;
    traj_.path->T = traj_.total_T;
    traj_.path->samples.reserve(total_steps_ + 1);
    traj_.path->samples.push_back(0.0);
  }
}

CycleHistory ImpulseSimulator::history() const {
  return CycleHistory{traj_.stop_times, traj_.thresholds, traj_.payoffs, t_};
}

void ImpulseSimulator::advance() {
  x_ += eval_drift(spec_, x_) * dt_ + sqrt_dt_ * noise_.next();
  if (!std::isfinite(x_)) throw Error(Errc::NonFinite, "controlled path overflowed");
  ++step_;
  t_ = dt_ * static_cast<double>(step_);
  if (traj_.path) traj_.path->samples.push_back(x_);
}

void ImpulseSimulator::explore(double length, std::vector<double>* observed, bool until_zero) {
  const std::size_t want = steps_for_horizon(length, dt_);
  std::size_t done = 0;
  const auto step = [&] {
    if (observed) observed->push_back(x_);
    advance();
    ++done;
  };
  while (done < want && !finished()) step();
  if (until_zero && x_ != 0.0) {
    const bool above = x_ > 0.0;
    while (!finished() && (x_ > 0.0) == above && x_ != 0.0) step();
  }
  traj_.exploration_time += dt_ * static_cast<double>(done);
  if (done > 0) traj_.events.push_back({t_, std::numeric_limits<double>::quiet_NaN(), 0.0, Phase::Explore});
}

bool ImpulseSimulator::exploit(double threshold, const PayoffSpec& payoff) {
  if (!(threshold >= payoff.y1 && threshold <= payoff.zeta))
    throw Error(Errc::InvalidThreshold, "threshold " + std::to_string(threshold) + " outside [" +
                                            std::to_string(payoff.y1) + ", " +
                                            std::to_string(payoff.zeta) + "]");
  double credited = 0.0;
  if (x_ >= threshold) {
    credited = eval_payoff(payoff, x_);
  } else {
    while (!finished()) {
      advance();
      if (x_ >= threshold) break;
    }
    if (x_ < threshold) return false;
    credited = eval_payoff(payoff, threshold);
  }
  traj_.stop_times.push_back(t_);
  traj_.thresholds.push_back(threshold);
  traj_.payoffs.push_back(credited);
  traj_.events.push_back({t_, threshold, credited, Phase::Exploit});
  x_ = 0.0;
  if (traj_.path) traj_.path->samples.back() = 0.0;
  return true;
}

ControlledTrajectory ImpulseSimulator::finish() && { return std::move(traj_); }

ControlledTrajectory simulate_impulse_controlled(const DriftSpec& spec, const ThresholdPolicy& policy,
                                                 const PayoffSpec& payoff, double T, double dt,
                                                 std::uint64_t seed, bool record_path) {
  ImpulseSimulator sim(spec, dt, T, seed, record_path);
  while (!sim.finished()) {
    if (!sim.exploit(policy(sim.history()), payoff)) break;
  }
  return std::move(sim).finish();
}

}  // namespace ddstop
