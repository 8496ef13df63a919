#include "ddstop/payoff.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "ddstop/error.hpp"
#include "ddstop/numeric.hpp"

namespace ddstop {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

const XiCurve& require_curve(const std::shared_ptr<const XiCurve>& xi) {
  DDSTOP_REQUIRE(xi != nullptr, Errc::BadParameters, "payoff is missing its xi reference");
  return *xi;
}

double two_peak_profile(const TwoPeak& tp, double y) {
  if (y < tp.a) return tp.M - std::abs(y - 0.5 * tp.a);
  return tp.M - tp.delta - std::abs(y - 1.5 * tp.a - tp.delta);
}

void require_window(double y1, double zeta) {
  DDSTOP_REQUIRE(y1 > 0.0 && y1 < zeta, Errc::BadParameters, "payoff window needs 0 < y1 < zeta");
}

PayoffSpec with_bound(PayoffFamily family, double y1, double zeta) {
  require_window(y1, zeta);
  PayoffSpec spec{std::move(family), y1, zeta, 1.0};
  spec.M_bound = sup_abs_on_window(spec);
  return spec;
}

}  // namespace

double payoff_profile(const PayoffSpec& payoff, double x) {
  return std::visit(overloaded{
                        [x](const SimTent& st) { return 1.0 - std::pow(std::abs(1.0 - x), 1.0 / st.beta); },
                        [x](const MarginTent& mt) {
                          return mt.M - std::pow(std::abs(x - mt.y_star), 1.0 / mt.beta);
                        },
                        [x](const TwoPeak& tp) { return two_peak_profile(tp, x); },
                        [](const TabulatedPayoff&) -> double {
                          throw Error(Errc::BadParameters, "tabulated payoffs have no profile");
                        },
                    },
                    payoff.family);
}

double eval_payoff(const PayoffSpec& payoff, double x) {
  if (!(x > 0.0)) throw Error(Errc::OutOfDomain, "payoff evaluated at x <= 0");
  return std::visit(overloaded{
                        [&](const SimTent& st) { return payoff_profile(payoff, x) * require_curve(st.xi)(x); },
                        [&](const MarginTent& mt) {
                          return payoff_profile(payoff, x) * require_curve(mt.xi_ref)(x);
                        },
                        [&](const TwoPeak& tp) {
                          return payoff_profile(payoff, x) * require_curve(tp.xi_ref)(x);
                        },
                        [x](const TabulatedPayoff& tab) {
                          if (tab.grid.empty() || x < tab.grid.front() || x > tab.grid.back())
                            throw Error(Errc::OutOfRange, "tabulated payoff evaluated outside its grid");
                          return interpolate(tab.grid, tab.values, x);
                        },
                    },
                    payoff.family);
}

std::string family_name(const PayoffSpec& payoff) {
  return std::visit(overloaded{
                        [](const SimTent&) { return std::string("sim_tent"); },
                        [](const MarginTent&) { return std::string("margin_tent"); },
                        [](const TwoPeak&) { return std::string("two_peak"); },
                        [](const TabulatedPayoff&) { return std::string("tabulated"); },
                    },
                    payoff.family);
}

double sup_abs_on_window(const PayoffSpec& payoff, std::size_t n) {
  double sup = 0.0;
  for (double x : linspace(payoff.y1, payoff.zeta, n)) sup = std::max(sup, std::abs(eval_payoff(payoff, x)));
  return sup;
}

PayoffSpec make_sim_tent(double beta, const DriftSpec& drift, double y1, double zeta) {
  return make_sim_tent(beta, make_xi_curve(drift), y1, zeta);
}

PayoffSpec make_sim_tent(double beta, std::shared_ptr<const XiCurve> xi, double y1, double zeta) {
  DDSTOP_REQUIRE(beta > 0.0, Errc::BadParameters, "sim tent needs beta > 0");
  return with_bound(SimTent{beta, std::move(xi)}, y1, zeta);
}

PayoffSpec make_margin_tent(double M, double beta, double y_star, std::shared_ptr<const XiCurve> xi_ref,
                            double y1, double zeta) {
  DDSTOP_REQUIRE(M > 0.0 && beta > 0.0 && y_star > 0.0, Errc::BadParameters,
                 "margin tent needs positive M, beta, y_star");
  return with_bound(MarginTent{M, beta, y_star, std::move(xi_ref)}, y1, zeta);
}

PayoffSpec make_two_peak(double M, double a, double delta, std::shared_ptr<const XiCurve> xi_ref, double y1,
                         double zeta) {
  DDSTOP_REQUIRE(M > 0.0 && a > 0.0 && delta >= 0.0, Errc::BadParameters,
                 "two-peak payoff needs M, a > 0 and delta >= 0");
  return with_bound(TwoPeak{M, a, delta, std::move(xi_ref)}, y1, zeta);
}

PayoffSpec make_tabulated_payoff(TabulatedPayoff table, double y1, double zeta) {
  DDSTOP_REQUIRE(table.grid.size() >= 2 && table.grid.size() == table.values.size() &&
                     std::is_sorted(table.grid.begin(), table.grid.end()),
                 Errc::BadParameters, "tabulated payoff needs >= 2 sorted rows");
  DDSTOP_REQUIRE(table.grid.front() <= y1 && table.grid.back() >= zeta, Errc::BadParameters,
                 "tabulated payoff must cover [y1, zeta]");
  return with_bound(std::move(table), y1, zeta);
}

TabulatedPayoff load_tabulated_payoff(const std::string& path) {
  // Same two-column format as drift tables.
  const TabulatedDrift raw = load_tabulated_drift(path);
  return TabulatedPayoff{raw.grid, raw.values};
}

std::vector<double> default_delta_grid(double Delta0, std::size_t n) {
  DDSTOP_REQUIRE(Delta0 > 1e-4 && Delta0 < 1.0, Errc::BadParameters, "Delta0 must lie in (1e-4, 1)");
  return logspace(1e-4, Delta0, n);
}

MarginReport check_margin(std::span<const double> grid, std::span<const double> f, const MarginParams& params,
                          std::span<const double> delta_grid) {
  DDSTOP_REQUIRE(params.Delta0 > 0.0 && params.Delta0 < 1.0 && params.n >= 1 && params.eta > 0.0 &&
                     params.beta > 0.0,
                 Errc::BadParameters, "margin parameters must be positive with Delta0 < 1");
  DDSTOP_REQUIRE(grid.size() == f.size() && grid.size() >= 3, Errc::BadParameters,
                 "check_margin: grid and values differ in size");
  DDSTOP_REQUIRE(!delta_grid.empty(), Errc::BadParameters, "check_margin: empty delta grid");

  double max_step = 0.0;
  for (std::size_t i = 1; i < grid.size(); ++i) max_step = std::max(max_step, grid[i] - grid[i - 1]);
  const double min_delta = *std::min_element(delta_grid.begin(), delta_grid.end());
  const double resolution = std::pow(min_delta, params.beta) * params.eta / 10.0;
  if (max_step > resolution)
    throw Error(Errc::GridTooCoarse, "margin grid step " + std::to_string(max_step) + " exceeds " +
                                         std::to_string(resolution));

  // Local maxima ranked by value. A plateau of equal values counts once, at
  // its midpoint, so that rounding ties at the peak do not shift the maximizer.
  struct Peak {
    double x;
    double value;
  };
  std::vector<Peak> peaks;
  for (std::size_t i = 0; i < grid.size();) {
    std::size_t j = i;
    while (j + 1 < grid.size() && f[j + 1] == f[i]) ++j;
    const bool left_ok = i == 0 || f[i] > f[i - 1];
    const bool right_ok = j + 1 == grid.size() || f[j] > f[j + 1];
    if (left_ok && right_ok) peaks.push_back({0.5 * (grid[i] + grid[j]), f[i]});
    i = j + 1;
  }
  std::stable_sort(peaks.begin(), peaks.end(), [](const Peak& l, const Peak& r) { return l.value > r.value; });
  if (peaks.size() > static_cast<std::size_t>(params.n)) peaks.resize(static_cast<std::size_t>(params.n));

  MarginReport report;
  for (const auto& p : peaks) report.maximizers.push_back(p.x);
  const double sup = peaks.front().value;

  constexpr double kSlack = 1e-9;
  for (double delta : delta_grid) {
    const double half = 0.5 * params.eta * std::pow(delta, params.beta) * (1.0 + kSlack);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (sup - f[i] > delta) continue;
      const bool covered = std::any_of(report.maximizers.begin(), report.maximizers.end(),
                                       [&](double xi) { return std::abs(grid[i] - xi) <= half; });
      if (!covered) report.witnesses.push_back({delta, grid[i]});
    }
  }
  report.ok = report.witnesses.empty();
  return report;
}

ClassGReport check_class_G(const PayoffSpec& payoff, std::span<const DriftSpec> drifts,
                           std::span<const double> grid) {
  DDSTOP_REQUIRE(grid.size() >= 2 && grid.front() > 0.0, Errc::BadParameters,
                 "class check grid must be positive and non-trivial");
  ClassGReport report;
  const double step = (grid.back() - grid.front()) / static_cast<double>(grid.size() - 1);
  const double scale = std::max(1.0, payoff.M_bound);

  report.g_at_zero = eval_payoff(payoff, std::min(grid.front(), 1e-9 * payoff.zeta));
  report.g0_negative = report.g_at_zero < 0.0;
  report.g0_boundary = !report.g0_negative && std::abs(report.g_at_zero) <= 1e-8 * scale;

  report.first_sign_change = std::numeric_limits<double>::quiet_NaN();
  for (double x : grid) {
    if (eval_payoff(payoff, x) > 0.0) {
      report.first_sign_change = x;
      break;
    }
  }
  report.y1_matches = std::abs(report.first_sign_change - payoff.y1) <= 2.0 * step;

  for (double x : grid) {
    if (x < payoff.y1 || x > payoff.zeta) continue;
    report.sup_abs = std::max(report.sup_abs, std::abs(eval_payoff(payoff, x)));
  }
  report.bound_ok = report.sup_abs <= payoff.M_bound * (1.0 + 1e-9);

  for (const auto& drift : drifts) {
    const XiCurve xi(invariant_law(drift));
    double best = -std::numeric_limits<double>::infinity();
    double argmax = grid.front();
    for (double x : grid) {
      if (x > xi.x_max()) break;
      const double r = eval_payoff(payoff, x) / xi(x);
      if (r > best) {
        best = r;
        argmax = x;
      }
    }
    const bool in_window = report.g0_boundary ? (argmax >= payoff.y1 - step && argmax <= payoff.zeta + step)
                                              : argmax <= payoff.zeta + step;
    report.maximizers.push_back({argmax, in_window});
  }

  const bool sign_ok = report.g0_negative ? report.y1_matches : report.g0_boundary;
  report.ok = sign_ok && report.bound_ok &&
              std::all_of(report.maximizers.begin(), report.maximizers.end(),
                          [](const DriftMaximizer& m) { return m.in_window; });
  return report;
}

bool check_vicinity(const PayoffSpec& g, const PayoffSpec& g_bar, const XiCurve& xi_b, double kappa,
                    double beta, double T, std::span<const double> c_grid, std::span<const double> x_grid) {
  DDSTOP_REQUIRE(kappa >= 1.0 && beta > 0.0 && beta < 1.0 && T > 0.0 && !x_grid.empty(), Errc::BadParameters,
                 "check_vicinity needs kappa >= 1, beta in (0,1), T > 0");
  std::vector<double> r(x_grid.size()), r_bar(x_grid.size());
  for (std::size_t i = 0; i < x_grid.size(); ++i) {
    const double xi = xi_b(x_grid[i]);
    r[i] = eval_payoff(g, x_grid[i]) / xi;
    r_bar[i] = eval_payoff(g_bar, x_grid[i]) / xi;
  }
  const double phi = *std::max_element(r.begin(), r.end());
  const double phi_bar = *std::max_element(r_bar.begin(), r_bar.end());
  const double s = std::pow(T, -1.0 / (2.0 - 2.0 * beta));
  for (double c : c_grid) {
    for (std::size_t i = 0; i < x_grid.size(); ++i) {
      if (phi - r[i] > kappa * c * s && !(phi_bar - r_bar[i] > c * s)) return false;
    }
  }
  return true;
}

bool check_vicinity(const PayoffSpec& g, const PayoffSpec& g_bar, const DriftSpec& drift, double kappa,
                    double beta, double T, std::span<const double> c_grid, std::span<const double> x_grid) {
  return check_vicinity(g, g_bar, XiCurve(invariant_law(drift)), kappa, beta, T, c_grid, x_grid);
}

}  // namespace ddstop
