#include "ddstop/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "ddstop/error.hpp"
#include "ddstop/numeric.hpp"

namespace ddstop {

namespace {

constexpr double kSqrtPi = 1.7724538509055160273;

double closed_xi(double eps, double x) { return x * x + (1.0 + eps) * kSqrtPi * x; }

}  // namespace

double xi_true(const InvariantLaw& law, double x) { return XiCurve(law)(x); }

double xi_closed_form(const DriftSpec& spec, double x) {
  double right = 0.0;
  double eps = 0.0;
  if (const auto* pm = std::get_if<PiecewiseMargin>(&spec.family)) {
    right = pm->A0;
    eps = pm->eps;
  } else if (const auto* pg = std::get_if<PiecewiseGeneral>(&spec.family)) {
    right = pg->eps == 0.0 ? pg->A0 : pg->a;
  } else {
    throw Error(Errc::BadParameters, "no closed-form xi for drift family " + family_name(spec));
  }
  if (!(x > 0.0) || x > right)
    throw Error(Errc::OutOfRange, "closed-form xi only holds on (0, " + std::to_string(right) + "]");
  return closed_xi(eps, x);
}

PhiStar phi_star(const XiCurve& xi, const PayoffSpec& payoff, double y1, double zeta,
                 std::span<const double> grid, const ZoomOptions& zoom) {
  const double tol = 1e-12 * std::max(1.0, zeta);
  const auto ratio = [&](double x) { return eval_payoff(payoff, x) / xi(x); };
  std::size_t best = grid.size();
  PhiStar out;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < y1 - tol || grid[i] > zeta + tol) continue;
    const double v = ratio(grid[i]);
    if (best == grid.size() || v > out.phi) {
      best = i;
      out = {v, grid[i]};
    }
  }
  if (best == grid.size()) throw Error(Errc::EmptyWindow, "no grid point in [y1, zeta]");

  double lo = grid[best > 0 ? best - 1 : best];
  double hi = grid[best + 1 < grid.size() ? best + 1 : best];
  for (int level = 0; level < zoom.levels && hi > lo; ++level) {
    const auto xs = linspace(std::max(lo, y1), std::min(hi, zeta), static_cast<std::size_t>(zoom.points));
    std::size_t arg = 0;
    double level_best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double v = ratio(xs[i]);
      if (v > level_best) {
        arg = i;
        level_best = v;
      }
    }
    if (level_best > out.phi || (level_best == out.phi && xs[arg] < out.y_star)) out = {level_best, xs[arg]};
    lo = xs[arg > 0 ? arg - 1 : arg];
    hi = xs[arg + 1 < xs.size() ? arg + 1 : arg];
  }
  return out;
}

double simple_regret(const XiCurve& xi, const PayoffSpec& payoff, double y_hat, const PhiStar& phi,
                     double tolerance) {
  const double tol = 1e-12 * std::max(1.0, payoff.zeta);
  if (y_hat < payoff.y1 - tol || y_hat > payoff.zeta + tol)
    throw Error(Errc::OutOfRange, "y_hat " + std::to_string(y_hat) + " outside the payoff window");
  const double regret = phi.phi - eval_payoff(payoff, y_hat) / xi(y_hat);
  if (regret >= 0.0) return regret;
  if (-regret <= tolerance) return 0.0;
  throw Error(Errc::NegativeRegret, "regret " + std::to_string(regret) + " below the grid tolerance");
}

double simple_regret(const DriftSpec&, const PayoffSpec& payoff, double y_hat, const InvariantLaw& law) {
  const XiCurve xi(law);
  const auto grid = barrier_grid(payoff.y1, payoff.zeta);
  const auto phi = phi_star(xi, payoff, payoff.y1, payoff.zeta, grid, ZoomOptions{3, 201});
  return simple_regret(xi, payoff, y_hat, phi);
}

double stationary_kl(const DriftSpec& b, const DriftSpec& b_bar, double T, const InvariantLaw& law_b,
                     const InvariantLaw& law_b_bar) {
  DDSTOP_REQUIRE(law_b.grid == law_b_bar.grid, Errc::BadParameters, "stationary_kl needs a common law grid");
  const auto& x = law_b.grid;
  std::vector<double> log_term(x.size()), drift_term(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double p = law_b.density[i];
    const double q = law_b_bar.density[i];
    log_term[i] = (p > 0.0 && q > 0.0) ? std::log(p / q) * p : 0.0;
    const double d = eval_drift(b, x[i]) - eval_drift(b_bar, x[i]);
    drift_term[i] = d * d * p;
  }
  return trapezoid(x, log_term) + 0.5 * T * trapezoid(x, drift_term);
}

MarginConstants margin_constants(const MarginMode& m) {
  MarginConstants c;
  const double ys = m.y_star;
  const double power = m.beta / (1.0 - m.beta);
  const double denom = 4.0 * (ys + kSqrtPi) * (ys + kSqrtPi) + 2.0 * m.beta * ys * kSqrtPi;
  c.c5 = std::pow(m.M * m.beta * kSqrtPi / denom, power);
  c.c_L2 = std::pow(0.5 * c.c5, 1.0 / m.beta);
  c.c_L3 = c.c5 * m.M * kSqrtPi / (4.0 * (ys + kSqrtPi) * (ys + kSqrtPi));
  const double ratio = m.M / kSqrtPi;
  c.kappa_threshold =
      (1.0 + std::pow(m.beta * ratio, power)) * (2.0 * std::max(ratio, 1.0 / m.beta) + ratio);
  return c;
}

double general_c_a(double a) { return a * a / (64.0 * a + 32.0 * kSqrtPi); }

std::string mode_name(const HypothesisMode& mode) {
  return std::holds_alternative<MarginMode>(mode) ? "margin" : "general";
}

HypothesisPair build_hypotheses(const HypothesisMode& mode, double T, const ClassParams& cls) {
  DDSTOP_REQUIRE(T > 0.0, Errc::BadParameters, "hypotheses need T > 0");
  DDSTOP_REQUIRE(cls.C >= 1.0 && cls.gamma > 0.0, Errc::BadParameters, "class needs C >= 1 and gamma > 0");
  HypothesisPair pair;
  pair.T = T;
  pair.eps = 1.0 / std::sqrt(T);
  pair.mode = mode;

  double A0 = 0.0, y1 = 0.0, zeta = 0.0, min_A = 0.0;
  if (const auto* m = std::get_if<MarginMode>(&mode)) {
    DDSTOP_REQUIRE(m->M > 0.0 && m->beta > 0.0 && m->beta < 1.0, Errc::BadParameters,
                   "margin hypotheses need M > 0 and beta in (0, 1)");
    const double width = std::pow(m->M, m->beta);
    DDSTOP_REQUIRE(m->y_star > width, Errc::BadParameters, "margin hypotheses need y_star > M^beta");
    A0 = m->y_star + width;
    y1 = m->y_star - width;
    zeta = m->y_star + width;
    min_A = m->y_star + width + cls.gamma;
    pair.b.family = PiecewiseMargin{A0, 0.0};
    pair.b_bar.family = PiecewiseMargin{A0, pair.eps};
  } else {
    auto g = std::get<GeneralMode>(mode);
    DDSTOP_REQUIRE(g.a > 0.0 && g.M > 0.0 && g.M < 0.5 * g.a, Errc::BadParameters,
                   "general hypotheses need a > 0 and 0 < M < a/2");
    g.c_a = general_c_a(g.a);
    g.delta = 0.5 * g.M * g.c_a * pair.eps;
    pair.mode = g;
    A0 = g.M + g.a;
    y1 = 0.5 * g.a - g.M;
    zeta = g.M + 1.5 * g.a;
    min_A = g.M + g.a + cls.gamma;
    pair.b.family = PiecewiseGeneral{g.a, A0, 0.0};
    pair.b_bar.family = PiecewiseGeneral{g.a, A0, pair.eps};
  }
  const double A = cls.A.value_or(min_A + 1.0);
  DDSTOP_REQUIRE(A > min_A, Errc::BadParameters, "class parameter A is below the admissible minimum");
  for (DriftSpec* d : {&pair.b, &pair.b_bar}) {
    d->class_C = cls.C;
    d->class_A = A;
    d->class_gamma = cls.gamma;
  }

  pair.law_b = std::make_shared<const InvariantLaw>(invariant_law(pair.b));
  pair.law_b_bar = std::make_shared<const InvariantLaw>(invariant_law(pair.b_bar));
  pair.xi_b = std::make_shared<const XiCurve>(*pair.law_b);
  pair.xi_b_bar = std::make_shared<const XiCurve>(*pair.law_b_bar);

  if (const auto* m = std::get_if<MarginMode>(&pair.mode)) {
    pair.g = make_margin_tent(m->M, m->beta, m->y_star, pair.xi_b_bar, y1, zeta);
    pair.g_bar = make_margin_tent(m->M, m->beta, m->y_star, pair.xi_b, y1, zeta);
  } else {
    const auto& g = std::get<GeneralMode>(pair.mode);
    pair.g = make_two_peak(g.M, g.a, g.delta, pair.xi_b_bar, y1, zeta);
    // The class bound is M times the largest xi_bbar on the window.
    pair.g.M_bound = g.M * (*pair.xi_b_bar)(zeta);
  }
  return pair;
}

namespace {

struct Hull {
  double lo = std::numeric_limits<double>::quiet_NaN();
  double hi = std::numeric_limits<double>::quiet_NaN();
  void add(double x) {
    if (std::isnan(lo) || x < lo) lo = x;
    if (std::isnan(hi) || x > hi) hi = x;
  }
};

bool inclusion_holds(std::span<const double> r_bar, std::span<const double> r, double lower, double upper) {
  bool any = false;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (r_bar[i] > lower) continue;
    any = true;
    if (!(r[i] > upper)) return false;
  }
  return any;
}

}  // namespace

SeparationReport verify_separation(const HypothesisPair& pair, std::span<const double> x_grid) {
  const PayoffSpec& g = pair.g;
  const double y1 = g.y1, zeta = g.zeta;
  const ZoomOptions zoom{3, 201};
  SeparationReport rep;
  rep.under_b = phi_star(*pair.xi_b, g, y1, zeta, x_grid, zoom);
  rep.under_b_bar = phi_star(*pair.xi_b_bar, g, y1, zeta, x_grid, zoom);

  double beta = 0.0;
  if (const auto* m = std::get_if<MarginMode>(&pair.mode)) beta = m->beta;
  rep.scale = std::pow(pair.T, -1.0 / (2.0 - 2.0 * beta));

  std::vector<double> xs, r, r_bar;
  for (double x : x_grid) {
    if (x < y1 || x > zeta) continue;
    xs.push_back(x);
    const double gx = eval_payoff(g, x);
    r.push_back(rep.under_b.phi - gx / (*pair.xi_b)(x));
    r_bar.push_back(rep.under_b_bar.phi - gx / (*pair.xi_b_bar)(x));
  }
  DDSTOP_REQUIRE(!xs.empty(), Errc::EmptyWindow, "separation grid misses the payoff window");

  const double gap_at_b_argmax =
      rep.under_b_bar.phi - eval_payoff(g, rep.under_b.y_star) / (*pair.xi_b_bar)(rep.under_b.y_star);
  rep.c_lower = 0.5 * std::max(gap_at_b_argmax, 0.0) / rep.scale;

  Hull left;
  double min_r_left = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (r_bar[i] > rep.c_lower * rep.scale) continue;
    left.add(xs[i]);
    min_r_left = std::min(min_r_left, r[i]);
  }
  rep.left_lo = left.lo;
  rep.left_hi = left.hi;
  rep.c_upper = std::isfinite(min_r_left) ? 0.5 * std::max(min_r_left, 0.0) / rep.scale : 0.0;

  Hull near_b;
  for (std::size_t i = 0; i < xs.size(); ++i)
    if (r[i] <= rep.c_upper * rep.scale) near_b.add(xs[i]);
  rep.near_b_lo = near_b.lo;
  rep.near_b_hi = near_b.hi;

  rep.holds = rep.c_lower > 0.0 && rep.c_upper > 0.0 &&
              inclusion_holds(r_bar, r, rep.c_lower * rep.scale, rep.c_upper * rep.scale);

  if (const auto* gm = std::get_if<GeneralMode>(&pair.mode)) {
    rep.right_covers_below_a = true;
    for (std::size_t i = 0; i < xs.size(); ++i)
      if (xs[i] < gm->a && !(r[i] > rep.c_upper * rep.scale)) rep.right_covers_below_a = false;
  } else {
    const auto c = margin_constants(std::get<MarginMode>(pair.mode));
    rep.formula = c;
    rep.formula_holds = inclusion_holds(r_bar, r, c.c_L2 * rep.scale, c.c_L3 * rep.scale);
  }
  return rep;
}

}  // namespace ddstop
