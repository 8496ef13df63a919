#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "ddstop/drift.hpp"
#include "ddstop/payoff.hpp"
#include "ddstop/sde.hpp"
#include "support.hpp"

using namespace ddstop;
using ddstop::test::error_code;
using Catch::Approx;

namespace {

constexpr double kSqrtPi = 1.7724538509055160273;

DriftSpec margin_drift() {
  DriftSpec d;
  d.family = PiecewiseMargin{3.0, 0.0};
  d.class_A = 4.0;
  return d;
}

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

MeanSe mean_se(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return {m, std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()))};
}

}  // namespace

TEST_CASE("zero-noise Euler step", "[sde]") {
  SimOptions opt;
  opt.zero_noise = true;
  const auto path = simulate_path(make_ou(0.5), 0.01, 0.01, 1.0, 1, opt);
  REQUIRE(path.samples.size() == 2);
  REQUIRE(path.samples[1] == Approx(0.995).epsilon(1e-15));
  REQUIRE(path.T == 0.01);
}

TEST_CASE("path layout and preconditions", "[sde]") {
  const auto path = simulate_path(make_ou(0.5), 10.0, 0.01, 0.0, 42);
  REQUIRE(path.steps() == 1000);
  REQUIRE(path.T == Approx(path.dt * static_cast<double>(path.steps())));
  REQUIRE(path.riemann_nodes().size() == 1000);
  REQUIRE(path.samples.front() == 0.0);

  const auto head = path.prefix(100);
  REQUIRE(head.steps() == 100);
  REQUIRE(head.samples.back() == path.samples[100]);

  REQUIRE(error_code([] { simulate_path(make_ou(0.5), 1.0, 0.1, 0.0, 1); }) == Errc::BadParameters);
  REQUIRE(error_code([] { simulate_path(make_ou(0.5), 0.001, 0.01, 0.0, 1); }) == Errc::BadParameters);
}

TEST_CASE("simulation is deterministic in the seed", "[sde]") {
  const auto a = simulate_path(make_ou(0.5), 50.0, 0.01, 0.0, 7);
  const auto b = simulate_path(make_ou(0.5), 50.0, 0.01, 0.0, 7);
  const auto c = simulate_path(make_ou(0.5), 50.0, 0.01, 0.0, 8);
  REQUIRE(a.samples == b.samples);
  REQUIRE(a.samples != c.samples);
  REQUIRE(derive_seed(1, 0) == derive_seed(1, 0));
  REQUIRE(derive_seed(1, 0) != derive_seed(1, 1));
}

TEST_CASE("shorter horizons are prefixes of longer ones", "[sde]") {
  const auto longer = simulate_path(make_ou(0.5), 20.0, 0.01, 0.0, 3);
  const auto shorter = simulate_path(make_ou(0.5), 5.0, 0.01, 0.0, 3);
  REQUIRE(std::equal(shorter.samples.begin(), shorter.samples.end(), longer.samples.begin()));
}

TEST_CASE("coarsened stream drives the same Brownian motion", "[sde]") {
  // One level-1 step of 2 dt must land where two level-0 steps of dt land
  // when the drift vanishes.
  DriftSpec zero;
  zero.family = TabulatedDrift{{-100.0, 100.0}, {0.0, 0.0}};
  const auto fine = simulate_path(zero, 1.0, 0.01, 0.0, 11);
  const auto coarse = simulate_path(zero, 1.0, 0.02, 0.0, 11, SimOptions{1, false});
  for (std::size_t k = 0; k < coarse.samples.size(); ++k)
    REQUIRE(coarse.samples[k] == Approx(fine.samples[2 * k]).margin(1e-12));
}

TEST_CASE("OU end state is centred", "[sde]") {
  std::vector<double> ends;
  for (std::uint64_t s = 0; s < 50; ++s)
    ends.push_back(simulate_path(make_ou(0.5), std::exp(8.0), 0.01, 0.0, derive_seed(99, s)).samples.back());
  const auto r = mean_se(ends);
  REQUIRE(std::abs(r.mean) <= 3.0 * r.se);
}

TEST_CASE("non-finite paths are reported", "[sde]") {
  // b(x) = 1e4 x multiplies the state by 101 per step.
  const auto explosive = make_ou(-1e4);
  REQUIRE(error_code([&] { simulate_path(explosive, 10.0, 0.01, 1.0, 1); }) == Errc::NonFinite);
}

TEST_CASE("hitting time at a non-positive threshold is zero", "[sde]") {
  const auto h = first_hitting_time(make_ou(0.5), 0.0, 0.01, 5, 100.0);
  REQUIRE(h.hit);
  REQUIRE(h.tau == 0.0);
}

TEST_CASE("hitting time is capped", "[sde]") {
  const auto h = first_hitting_time(make_ou(0.5), 50.0, 0.01, 5, 1.0);
  REQUIRE_FALSE(h.hit);
  REQUIRE(h.tau == 1.0);
}

TEST_CASE("mean hitting time of the margin drift", "[sde][mc]") {
  std::vector<double> taus;
  for (std::uint64_t s = 0; s < 2000; ++s) {
    const auto h = first_hitting_time(margin_drift(), 1.0, 1e-4, derive_seed(2024, s), 1e3);
    REQUIRE(h.hit);
    taus.push_back(h.tau);
  }
  const auto r = mean_se(taus);
  REQUIRE(std::abs(r.mean - (1.0 + kSqrtPi)) <= 3.0 * r.se);
}

TEST_CASE("mean hitting time of OU matches the quadrature oracle", "[sde][mc]") {
  const XiCurve xi(invariant_law(make_ou(0.5)));
  std::vector<double> taus;
  for (std::uint64_t s = 0; s < 2000; ++s)
    taus.push_back(first_hitting_time(make_ou(0.5), 1.0, 1e-4, derive_seed(77, s), 1e3).tau);
  const auto r = mean_se(taus);
  REQUIRE(std::abs(r.mean - xi(1.0)) <= 3.0 * r.se);
}

TEST_CASE("halving dt moves the mean hitting time by less than one standard error", "[sde][mc]") {
  // Same Brownian motion at both resolutions via the coarsening level.
  std::vector<double> fine, coarse, diff;
  for (std::uint64_t s = 0; s < 2000; ++s) {
    const auto seed = derive_seed(5, s);
    fine.push_back(first_hitting_time(margin_drift(), 1.0, 5e-5, seed, 1e3).tau);
    coarse.push_back(first_hitting_time(margin_drift(), 1.0, 1e-4, seed, 1e3, SimOptions{1, false}).tau);
  }
  const auto f = mean_se(fine);
  const auto c = mean_se(coarse);
  REQUIRE(std::abs(f.mean - c.mean) < f.se);
}

TEST_CASE("stationary start follows the invariant law", "[sde]") {
  const auto law = invariant_law(make_ou(0.5));
  std::vector<double> draws;
  for (std::uint64_t s = 0; s < 4000; ++s) draws.push_back(sample_stationary_start(law, derive_seed(3, s)));
  const auto r = mean_se(draws);
  REQUIRE(std::abs(r.mean) <= 3.0 * r.se);
  double var = 0.0;
  for (double x : draws) var += x * x;
  REQUIRE(var / 4000.0 == Approx(1.0).margin(0.1));
}

TEST_CASE("impulse control with a constant barrier", "[sde][mc]") {
  const auto drift = margin_drift();
  const auto payoff = make_sim_tent(0.5, drift, 0.2, 2.0);
  std::vector<double> rates;
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto traj = simulate_impulse_controlled(
        drift, [](const CycleHistory&) { return 1.0; }, payoff, 1000.0, 1e-4, derive_seed(12, s));
    rates.push_back(traj.total_payoff() / 1000.0);
  }
  // g(1) / xi(1) = 1 for the tent payoff built on this drift.
  const auto r = mean_se(rates);
  REQUIRE(std::abs(r.mean - 1.0) <= 3.0 * r.se);
}

TEST_CASE("controlled trajectory invariants", "[sde]") {
  const auto drift = make_ou(0.5);
  const auto payoff = make_sim_tent(0.5, drift, 0.2, 2.0);
  int calls = 0;
  const auto traj = simulate_impulse_controlled(
      drift,
      [&](const CycleHistory& h) {
        REQUIRE(h.stop_times.size() == static_cast<std::size_t>(calls));
        ++calls;
        return 0.5 + 0.1 * static_cast<double>(calls % 5);
      },
      payoff, 200.0, 0.01, 4, true);
  REQUIRE(!traj.stop_times.empty());
  REQUIRE(std::is_sorted(traj.stop_times.begin(), traj.stop_times.end()));
  REQUIRE(std::adjacent_find(traj.stop_times.begin(), traj.stop_times.end()) == traj.stop_times.end());
  REQUIRE(traj.path.has_value());
  for (double tau : traj.stop_times) {
    const auto k = static_cast<std::size_t>(std::llround(tau / traj.path->dt));
    REQUIRE(traj.path->samples[k] == 0.0);
  }
  for (std::size_t i = 0; i < traj.payoffs.size(); ++i)
    REQUIRE(traj.payoffs[i] == eval_payoff(payoff, traj.thresholds[i]));
  REQUIRE(traj.exploration_time <= traj.total_T);
}

TEST_CASE("invalid thresholds are rejected", "[sde]") {
  const auto drift = make_ou(0.5);
  const auto payoff = make_sim_tent(0.5, drift, 0.2, 2.0);
  REQUIRE(error_code([&] {
            simulate_impulse_controlled(drift, [](const CycleHistory&) { return 3.0; }, payoff, 10.0, 0.01, 1);
          }) == Errc::InvalidThreshold);
}

TEST_CASE("horizon shorter than the first hit records nothing", "[sde]") {
  const auto drift = make_ou(0.5);
  const auto payoff = make_sim_tent(0.5, drift, 0.2, 2.0);
  const auto traj =
      simulate_impulse_controlled(drift, [](const CycleHistory&) { return 2.0; }, payoff, 0.02, 0.01, 1);
  REQUIRE(traj.stop_times.empty());
  REQUIRE(traj.payoffs.empty());
  REQUIRE(traj.total_payoff() == 0.0);
}

TEST_CASE("exploration blocks can be extended to the next zero crossing", "[sde]") {
  ImpulseSimulator sim(make_ou(0.5), 0.01, 100.0, 9);
  std::vector<double> seen;
  sim.explore(1.0, &seen, true);
  REQUIRE(seen.size() >= 100);
  REQUIRE(seen.front() == 0.0);
  // The block ends on the first step that leaves the side of 0 it was on after 1.0.
  const bool above = seen[100] > 0.0;
  for (std::size_t i = 100; i < seen.size(); ++i) REQUIRE((seen[i] > 0.0) == above);
  REQUIRE((sim.state() > 0.0) != above);
}
