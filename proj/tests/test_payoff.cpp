#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <vector>

#include "ddstop/drift.hpp"
#include "ddstop/numeric.hpp"
#include "ddstop/oracle.hpp"
#include "ddstop/payoff.hpp"
#include "support.hpp"

using namespace ddstop;
using ddstop::test::error_code;
using Catch::Approx;

namespace {

std::vector<double> tent(std::span<const double> x, double beta) {
  std::vector<double> f(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) f[i] = 1.0 - std::pow(std::abs(1.0 - x[i]), 1.0 / beta);
  return f;
}

}  // namespace

TEST_CASE("payoff families at their peaks", "[payoff]") {
  const auto ou = make_ou(0.5);
  const auto xi = make_xi_curve(ou);
  const auto sim = make_sim_tent(0.5, xi, 0.2, 2.0);
  REQUIRE(eval_payoff(sim, 1.0) == Approx((*xi)(1.0)));
  REQUIRE(payoff_profile(sim, 1.1) == Approx(1.0 - 0.01));

  const auto mt = make_margin_tent(0.7, 0.5, 1.5, xi, 1.0, 2.0);
  REQUIRE(eval_payoff(mt, 1.5) == Approx(0.7 * (*xi)(1.5)));

  const double a = 1.0, M = 0.2, delta = 1e-3;
  const auto tp = make_two_peak(M, a, delta, xi, 0.3, 1.7);
  REQUIRE(payoff_profile(tp, 1.5 * a + delta) == Approx(M - delta));
  REQUIRE(payoff_profile(tp, 0.5 * a) == Approx(M));
  REQUIRE(payoff_profile(tp, 0.1) == Approx(M - 0.4));
}

TEST_CASE("payoffs are defined on the positive axis only", "[payoff]") {
  const auto sim = make_sim_tent(0.5, make_ou(0.5));
  REQUIRE(error_code([&] { eval_payoff(sim, 0.0); }) == Errc::OutOfDomain);
  REQUIRE(error_code([&] { eval_payoff(sim, -1.0); }) == Errc::OutOfDomain);
  REQUIRE(error_code([&] { make_sim_tent(0.5, make_ou(0.5), 2.0, 1.0); }) == Errc::BadParameters);
}

TEST_CASE("M_bound covers the window", "[payoff]") {
  const auto sim = make_sim_tent(0.5, make_ou(0.5), 0.2, 2.0);
  REQUIRE(sim.M_bound == Approx(sup_abs_on_window(sim)));
  REQUIRE(sim.M_bound >= eval_payoff(sim, 1.0));
}

TEST_CASE("tabulated payoff from CSV", "[payoff]") {
  const auto path = std::filesystem::temp_directory_path() / "ddstop_payoff_table.csv";
  {
    std::ofstream out(path);
    out << "x,g\n0.1,-1\n1,1\n2,0\n";
  }
  const auto spec = make_tabulated_payoff(load_tabulated_payoff(path.string()), 0.2, 2.0);
  REQUIRE(eval_payoff(spec, 0.55) == Approx(0.0).margin(1e-12));
  REQUIRE(error_code([&] { eval_payoff(spec, 2.5); }) == Errc::OutOfRange);
  std::filesystem::remove(path);
}

TEST_CASE("margin checker on tent profiles", "[payoff]") {
  const auto x = uniform_grid(0.0, 2.0, 5e-5);
  const auto deltas = default_delta_grid(0.5);
  REQUIRE(deltas.size() == 20);
  REQUIRE(deltas.front() == Approx(1e-4));
  REQUIRE(deltas.back() == Approx(0.5));

  for (double beta : {0.25, 0.5, 0.75}) {
    const auto f = tent(x, beta);
    const auto ok = check_margin(x, f, MarginParams{0.5, 1, 2.0, beta}, deltas);
    INFO("beta = " << beta);
    REQUIRE(ok.ok);
    REQUIRE(ok.maximizers.size() == 1);
    REQUIRE(ok.maximizers.front() == Approx(1.0).margin(1e-4));

    const auto tight = check_margin(x, f, MarginParams{0.5, 1, 1.0, beta}, deltas);
    REQUIRE_FALSE(tight.ok);
    REQUIRE(!tight.witnesses.empty());
    // Witnesses sit at the edge of the near-optimal set.
    const auto& w = tight.witnesses.front();
    REQUIRE(std::abs(w.x - 1.0) > 0.5 * std::pow(w.Delta, beta));
    REQUIRE(std::abs(w.x - 1.0) <= std::pow(w.Delta, beta) + 1e-4);
  }
}

TEST_CASE("margin checker enforces the grid resolution", "[payoff]") {
  const auto coarse = uniform_grid(0.0, 2.0, 1e-2);
  const auto f = tent(coarse, 0.5);
  REQUIRE(error_code([&] { check_margin(coarse, f, MarginParams{0.5, 1, 2.0, 0.5}, default_delta_grid(0.5)); }) ==
          Errc::GridTooCoarse);
}

TEST_CASE("margin checker with two maximizers", "[payoff]") {
  const auto x = uniform_grid(0.0, 4.0, 1e-4);
  std::vector<double> f(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    f[i] = 1.0 - std::min(std::pow(x[i] - 1.0, 2.0), std::pow(x[i] - 3.0, 2.0));
  const auto deltas = default_delta_grid(0.5);
  REQUIRE_FALSE(check_margin(x, f, MarginParams{0.5, 1, 2.0, 0.5}, deltas).ok);
  const auto two = check_margin(x, f, MarginParams{0.5, 2, 2.0, 0.5}, deltas);
  REQUIRE(two.ok);
  REQUIRE(two.maximizers.size() == 2);
}

TEST_CASE("class G for the simulation-study payoff", "[payoff]") {
  const auto ou = make_ou(0.5);
  const auto sim = make_sim_tent(0.5, ou, 0.2, 2.0);
  const std::vector<DriftSpec> drifts{ou};
  const auto rep = check_class_G(sim, drifts, uniform_grid(1e-3, 6.0, 1e-3));
  // g(0+) = 0 is flagged, not rejected.
  REQUIRE(rep.g0_boundary);
  REQUIRE_FALSE(rep.g0_negative);
  REQUIRE(rep.bound_ok);
  REQUIRE(rep.maximizers.size() == 1);
  REQUIRE(rep.maximizers.front().argmax == Approx(1.0).margin(1e-3));
  REQUIRE(rep.maximizers.front().in_window);
  REQUIRE(rep.ok);
}

TEST_CASE("class G for the general hypotheses", "[payoff]") {
  const auto pair = build_hypotheses(GeneralMode{0.2, 1.0}, 1e4);
  const std::vector<DriftSpec> drifts{pair.b, pair.b_bar};
  const auto rep = check_class_G(pair.g, drifts, uniform_grid(1e-3, 3.0 * pair.g.zeta, 1e-3));
  REQUIRE(rep.g0_negative);
  REQUIRE(rep.y1_matches);
  REQUIRE(rep.bound_ok);
  REQUIRE(rep.ok);
  for (const auto& m : rep.maximizers) REQUIRE(m.in_window);
}

TEST_CASE("class G rejects a payoff positive near 0", "[payoff]") {
  const auto spec = make_tabulated_payoff({{0.0, 5.0}, {1.0, 1.0}}, 0.2, 2.0);
  const std::vector<DriftSpec> drifts{make_ou(0.5)};
  const auto rep = check_class_G(spec, drifts, uniform_grid(1e-3, 4.9, 1e-3));
  REQUIRE_FALSE(rep.g0_negative);
  REQUIRE_FALSE(rep.g0_boundary);
  REQUIRE_FALSE(rep.ok);
}

TEST_CASE("vicinity class", "[payoff]") {
  const auto x = uniform_grid(0.5, 2.5, 1e-3);
  const std::vector<double> cs{1.5, 2.0, 4.0, 8.0};

  const auto ou = make_ou(0.5);
  const auto g = make_margin_tent(1.0, 0.5, 1.5, make_xi_curve(ou), 0.5, 2.5);
  REQUIRE(check_vicinity(g, g, ou, 1.0, 0.5, 1e4, cs, x));

  const MarginMode mode{1.0, 0.5, 1.5};
  const auto pair = build_hypotheses(mode, 1e6);
  const double kappa = margin_constants(mode).kappa_threshold;
  REQUIRE(kappa >= 1.0);
  REQUIRE(check_vicinity(pair.g, *pair.g_bar, *pair.xi_b, kappa, 0.5, 1e6, cs, x));

  // Moving the maximizer by a fixed amount breaks the inclusion for small kappa.
  const auto shifted = make_margin_tent(1.0, 0.5, 1.8, make_xi_curve(ou), 0.5, 2.5);
  REQUIRE_FALSE(check_vicinity(shifted, g, ou, 1.0, 0.5, 1e4, cs, x));
  REQUIRE(error_code([&] { check_vicinity(g, g, ou, 0.5, 0.5, 1e4, cs, x); }) == Errc::BadParameters);
}
