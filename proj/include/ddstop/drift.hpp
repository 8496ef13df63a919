#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace ddstop {

// Drift families. The diffusion is dX = b(X) dt + dW throughout.

/// b(x) = -slope * x.
struct OrnsteinUhlenbeck {
  double slope = 0.5;
};

/// Margin lower-bound construction: zero drift on (0, A0], unit restoring
/// drift beyond A0, and on x <= 0 a linear drift whose slope is tuned so that
/// xi(x) = x^2 + (1 + eps) sqrt(pi) x on (0, A0]:
///   b(x) = -x / (1 + eps)^2   for x <= 0.
/// eps = 0 gives the unperturbed hypothesis.
struct PiecewiseMargin {
  double A0 = 3.0;
  double eps = 0.0;
};

/// General lower-bound construction with kink at `a`:
///   b(x) = -x                          x <= 0
///          0                           0 < x <= a
///          -eps (x - a)                a < x <= A0
///          -(x - A0) - eps (A0 - a)    A0 < x
struct PiecewiseGeneral {
  double a = 1.0;
  double A0 = 1.2;
  double eps = 0.0;
};

/// Linear interpolation of (grid, values); evaluation outside the grid throws.
struct TabulatedDrift {
  std::vector<double> grid;
  std::vector<double> values;
};

using DriftFamily = std::variant<OrnsteinUhlenbeck, PiecewiseMargin, PiecewiseGeneral, TabulatedDrift>;

/// A drift together with the class parameters (C, A, gamma) it is claimed to
/// satisfy: |b(x)| <= C (1 + |x|) and b(x) sgn(x) <= -gamma for |x| > A.
struct DriftSpec {
  DriftFamily family = OrnsteinUhlenbeck{};
  double class_C = 1.0;
  double class_A = 5.0;
  double class_gamma = 0.5;
};

DriftSpec make_ou(double slope, double C = 1.0, double A = 5.0, double gamma = 0.5);

double eval_drift(const DriftSpec& spec, double x);

/// Human-readable family name ("ou", "piecewise_margin", ...).
std::string family_name(const DriftSpec& spec);

/// Loads a two-column CSV (x, b(x)); a non-numeric first line is treated as a header.
TabulatedDrift load_tabulated_drift(const std::string& path);

enum class SigmaCondition { LocalLipschitz, LinearGrowth, InwardDrift };

struct SigmaViolation {
  double x = 0.0;
  SigmaCondition condition = SigmaCondition::LinearGrowth;
  double value = 0.0;  // offending quantity (quotient, |b|, or b sgn(x))
};

struct SigmaReport {
  bool ok = true;
  std::vector<SigmaViolation> violations;
  double max_difference_quotient = 0.0;
};

/// Pointwise check of the three class conditions on a probe grid. Local
/// Lipschitz continuity is declared violated where a difference quotient is
/// non-finite or exceeds `lipschitz_cap`.
SigmaReport check_sigma_membership(const DriftSpec& spec, std::span<const double> probe_grid,
                                   double lipschitz_cap = 1e6);

/// Default probe grid covering [-(A + margin), A + margin].
std::vector<double> default_probe_grid(const DriftSpec& spec, double margin = 5.0,
                                       std::size_t n = 4001);

/// Invariant law on a symmetric uniform grid.
struct InvariantLaw {
  std::vector<double> grid;
  std::vector<double> density;
  std::vector<double> cdf;
  double normalization_error = 0.0;

  double density_at(double x) const;
  double cdf_at(double x) const;
  double x_max() const { return grid.back(); }
  /// Inverse-CDF draw for u in (0, 1).
  double quantile(double u) const;
};

inline constexpr std::size_t kMinLawGrid = 1000;

/// density(x) proportional to exp(2 int_0^x b), both integrals by cumulative
/// trapezoid. n_grid is rounded up to an odd count so that 0 is a node.
/// normalization_error bounds the mass beyond +-X_max (using the -gamma tail)
/// plus a Richardson estimate of the quadrature error of the normalizer.
InvariantLaw invariant_law(const DriftSpec& spec, double x_max, std::size_t n_grid);

/// X_max = A + 10 / gamma, grid step about 1e-3.
InvariantLaw invariant_law(const DriftSpec& spec);

double default_x_max(const DriftSpec& spec);

/// Expected hitting time curve xi(x) = 2 int_0^x F(y) / rho(y) dy on the
/// non-negative part of a law grid. Between nodes the ratio F/rho is
/// interpolated linearly and integrated exactly.
class XiCurve {
 public:
  explicit XiCurve(const InvariantLaw& law);

  /// Throws OutOfRange for x < 0 or beyond the law grid.
  double operator()(double x) const;
  double x_max() const { return nodes_.back(); }

 private:
  std::vector<double> nodes_;
  std::vector<double> ratio_;
  std::vector<double> integral_;
};

/// Builds the default invariant law of `spec` and its xi curve.
std::shared_ptr<const XiCurve> make_xi_curve(const DriftSpec& spec);

}  // namespace ddstop
