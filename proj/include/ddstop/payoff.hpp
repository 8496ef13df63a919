#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "ddstop/drift.hpp"

namespace ddstop {

/// g(x) = (1 - |1 - x|^{1/beta}) xi_b(x). The simulation-study payoff.
struct SimTent {
  double beta = 0.5;
  std::shared_ptr<const XiCurve> xi;
};

/// g(y) = (M - |y - y_star|^{1/beta}) xi_ref(y).
struct MarginTent {
  double M = 1.0;
  double beta = 0.5;
  double y_star = 1.5;
  std::shared_ptr<const XiCurve> xi_ref;
};

/// g(y) = f(y) xi_ref(y) with the two-tent profile
///   f(y) = M - |y - a/2|                 0 < y < a
///          M - delta - |y - 3a/2 - delta|  y >= a.
struct TwoPeak {
  double M = 0.2;
  double a = 1.0;
  double delta = 0.0;
  std::shared_ptr<const XiCurve> xi_ref;
};

/// Linear interpolation of (grid, values); evaluation outside the grid throws.
struct TabulatedPayoff {
  std::vector<double> grid;
  std::vector<double> values;
};

using PayoffFamily = std::variant<SimTent, MarginTent, TwoPeak, TabulatedPayoff>;

struct PayoffSpec {
  PayoffFamily family;
  double y1 = 0.2;
  double zeta = 2.0;
  double M_bound = 1.0;
};

/// Throws OutOfDomain for x <= 0.
double eval_payoff(const PayoffSpec& payoff, double x);

/// The profile g / xi_ref for the analytic families (f for the tents,
/// the tent factor for SimTent). Throws BadParameters for Tabulated.
double payoff_profile(const PayoffSpec& payoff, double x);

std::string family_name(const PayoffSpec& payoff);

/// sup of |g| over a uniform grid on [y1, zeta].
double sup_abs_on_window(const PayoffSpec& payoff, std::size_t n = 4001);

// The factories validate y1 < zeta and set M_bound from the window.
PayoffSpec make_sim_tent(double beta, const DriftSpec& drift, double y1 = 0.2, double zeta = 2.0);
PayoffSpec make_sim_tent(double beta, std::shared_ptr<const XiCurve> xi, double y1 = 0.2,
                         double zeta = 2.0);
PayoffSpec make_margin_tent(double M, double beta, double y_star, std::shared_ptr<const XiCurve> xi_ref,
                            double y1, double zeta);
PayoffSpec make_two_peak(double M, double a, double delta, std::shared_ptr<const XiCurve> xi_ref,
                         double y1, double zeta);
PayoffSpec make_tabulated_payoff(TabulatedPayoff table, double y1, double zeta);

/// Two-column CSV (x, g(x)); a non-numeric first line is a header.
TabulatedPayoff load_tabulated_payoff(const std::string& path);

struct MarginParams {
  double Delta0 = 0.5;
  int n = 1;
  double eta = 2.0;
  double beta = 0.5;
};

struct MarginWitness {
  double Delta = 0.0;
  double x = 0.0;
};

struct MarginReport {
  bool ok = true;
  std::vector<double> maximizers;
  std::vector<MarginWitness> witnesses;
};

/// 20 log-spaced levels in [1e-4, Delta0].
std::vector<double> default_delta_grid(double Delta0, std::size_t n = 20);

/// Margin condition on a grid: for every Delta the near-optimal set
/// {sup f - f <= Delta} must lie in the union of the closed intervals
/// [x_i - eta Delta^beta / 2, x_i + eta Delta^beta / 2] around at most n grid
/// maximizers. A plateau of equal grid values is one maximizer at its midpoint. Throws
/// GridTooCoarse unless the largest grid step is <= (min Delta)^beta eta / 10.
MarginReport check_margin(std::span<const double> grid, std::span<const double> f,
                          const MarginParams& params, std::span<const double> delta_grid);

struct DriftMaximizer {
  double argmax = 0.0;
  bool in_window = false;
};

struct ClassGReport {
  bool ok = false;
  double g_at_zero = 0.0;
  bool g0_negative = false;
  /// g(0+) = 0: accepted with a flag, the y1 match is then relaxed.
  bool g0_boundary = false;
  double first_sign_change = 0.0;
  bool y1_matches = false;
  double sup_abs = 0.0;
  bool bound_ok = false;
  std::vector<DriftMaximizer> maximizers;
};

/// Grid check of the payoff class conditions. For every drift the argmax of
/// g / xi_b over the grid (which should reach about 3 zeta) must lie in (0, zeta].
ClassGReport check_class_G(const PayoffSpec& payoff, std::span<const DriftSpec> drifts,
                           std::span<const double> grid);

/// For every c in c_grid checks on x_grid that
///   {Phi_b(g) - g/xi_b > kappa c s} is contained in {Phi_b(g_bar) - g_bar/xi_b > c s}
/// with s = T^{-1/(2 - 2 beta)}, both Phi computed as grid maxima.
bool check_vicinity(const PayoffSpec& g, const PayoffSpec& g_bar, const XiCurve& xi_b, double kappa,
                    double beta, double T, std::span<const double> c_grid,
                    std::span<const double> x_grid);
bool check_vicinity(const PayoffSpec& g, const PayoffSpec& g_bar, const DriftSpec& drift, double kappa,
                    double beta, double T, std::span<const double> c_grid,
                    std::span<const double> x_grid);

}  // namespace ddstop
