#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "ddstop/drift.hpp"
#include "ddstop/estimators.hpp"
#include "ddstop/payoff.hpp"

namespace ddstop {

/// 2 int_0^x F_b / rho_b on the law grid. Throws OutOfRange beyond the grid.
double xi_true(const InvariantLaw& law, double x);

/// x^2 + (1 + eps) sqrt(pi) x: the margin family on (0, A0] and the general
/// family on (0, a] (on (0, A0] when eps = 0). Throws OutOfRange outside that
/// interval and BadParameters for drifts without a closed form.
double xi_closed_form(const DriftSpec& spec, double x);

struct PhiStar {
  double phi = 0.0;
  double y_star = 0.0;
};

/// Grid maximum of g / xi over grid points in [y1, zeta]; the smallest
/// argmax wins. zoom.levels > 0 refines the argmax off-grid. Throws EmptyWindow.
PhiStar phi_star(const XiCurve& xi, const PayoffSpec& payoff, double y1, double zeta,
                 std::span<const double> grid, const ZoomOptions& zoom = {});

/// Phi - g(y_hat) / xi(y_hat). Values below zero by at most `tolerance` are
/// clipped to 0; larger negative gaps throw NegativeRegret. Throws OutOfRange
/// if y_hat lies outside [y1, zeta].
double simple_regret(const XiCurve& xi, const PayoffSpec& payoff, double y_hat, const PhiStar& phi,
                     double tolerance = 1e-9);

/// Convenience form: Phi is computed on the barrier grid with three zoom levels.
double simple_regret(const DriftSpec& spec, const PayoffSpec& payoff, double y_hat, const InvariantLaw& law);

/// int log(rho_b / rho_bbar) rho_b + (T/2) int (b - bbar)^2 rho_b. Both laws
/// must share one grid.
double stationary_kl(const DriftSpec& b, const DriftSpec& b_bar, double T, const InvariantLaw& law_b,
                     const InvariantLaw& law_b_bar);

/// Perturbation of the left slope of the margin drift.
struct MarginMode {
  double M = 1.0;
  double beta = 0.5;
  double y_star = 1.5;
};

/// Two-tent construction with a kink at `a`. delta and c_a are filled in by
/// build_hypotheses.
struct GeneralMode {
  double M = 0.2;
  double a = 1.0;
  double delta = 0.0;
  double c_a = 0.0;
};

using HypothesisMode = std::variant<MarginMode, GeneralMode>;

/// Closed-form constants of the margin construction.
struct MarginConstants {
  double c5 = 0.0;
  double c_L2 = 0.0;
  double c_L3 = 0.0;
  double kappa_threshold = 0.0;
};

MarginConstants margin_constants(const MarginMode& mode);

/// a^2 / (64 a + 32 sqrt(pi)).
double general_c_a(double a);

struct HypothesisPair {
  DriftSpec b;
  DriftSpec b_bar;
  PayoffSpec g;
  std::optional<PayoffSpec> g_bar;
  double T = 0.0;
  double eps = 0.0;
  HypothesisMode mode;
  std::shared_ptr<const InvariantLaw> law_b;
  std::shared_ptr<const InvariantLaw> law_b_bar;
  std::shared_ptr<const XiCurve> xi_b;
  std::shared_ptr<const XiCurve> xi_b_bar;
};

struct ClassParams {
  double C = 1.0;
  double gamma = 0.5;
  /// Defaults to one unit above the smallest admissible A when unset.
  std::optional<double> A;
};

/// Builds b (unperturbed), b_bar (perturbed with eps = T^{-1/2}) and the
/// payoff g = f xi_bbar (plus g_bar = f xi_b in margin mode), with the
/// window [y1, zeta] at the admissible extremes. Throws BadParameters when
/// the mode constraints fail.
HypothesisPair build_hypotheses(const HypothesisMode& mode, double T, const ClassParams& cls = {});

std::string mode_name(const HypothesisMode& mode);

struct SeparationReport {
  bool holds = false;
  /// Empirical constants: {r_bar <= c_lower s} is contained in {r > c_upper s}.
  double c_lower = 0.0;
  double c_upper = 0.0;
  /// s = T^{-1/(2-2beta)} in margin mode, T^{-1/2} in general mode.
  double scale = 0.0;
  PhiStar under_b;
  PhiStar under_b_bar;
  /// Hull of {r_bar <= c_lower s}.
  double left_lo = 0.0;
  double left_hi = 0.0;
  /// Hull of the near-optimal set {r <= c_upper s} under b.
  double near_b_lo = 0.0;
  double near_b_hi = 0.0;
  /// {r > c_upper s} contains every grid point of (0, a) in the window (general mode).
  bool right_covers_below_a = false;
  /// Margin mode: the closed-form constants and whether they separate on the grid.
  std::optional<MarginConstants> formula;
  bool formula_holds = false;
};

/// Grid computation of the separation events. Here r_bar = Phi_bbar(g) - g/xi_bbar
/// and r = Phi_b(g) - g/xi_b. c_lower is half the r_bar gap at the b-argmax,
/// c_upper half the smallest r over the left set.
SeparationReport verify_separation(const HypothesisPair& pair, std::span<const double> x_grid);

}  // namespace ddstop
