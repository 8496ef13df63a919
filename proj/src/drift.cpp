#include "ddstop/drift.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
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

}  // namespace

DriftSpec make_ou(double slope, double C, double A, double gamma) {
  return DriftSpec{OrnsteinUhlenbeck{slope}, C, A, gamma};
}

double eval_drift(const DriftSpec& spec, double x) {
  return std::visit(
      overloaded{
          [x](const OrnsteinUhlenbeck& ou) { return -ou.slope * x; },
          [x](const PiecewiseMargin& pm) {
            if (x <= 0.0) return -x / ((1.0 + pm.eps) * (1.0 + pm.eps));
            if (x <= pm.A0) return 0.0;
            return -(x - pm.A0);
          },
          [x](const PiecewiseGeneral& pg) {
            if (x <= 0.0) return -x;
            if (x <= pg.a) return 0.0;
            if (x <= pg.A0) return -pg.eps * (x - pg.a);
            return -(x - pg.A0) - pg.eps * (pg.A0 - pg.a);
          },
          [x](const TabulatedDrift& tab) {
            if (tab.grid.empty() || x < tab.grid.front() || x > tab.grid.back())
              throw Error(Errc::OutOfRange, "tabulated drift evaluated outside its grid");
            return interpolate(tab.grid, tab.values, x);
          },
      },
      spec.family);
}

std::string family_name(const DriftSpec& spec) {
  return std::visit(overloaded{
                        [](const OrnsteinUhlenbeck&) { return std::string("ou"); },
                        [](const PiecewiseMargin&) { return std::string("piecewise_margin"); },
                        [](const PiecewiseGeneral&) { return std::string("piecewise_general"); },
                        [](const TabulatedDrift&) { return std::string("tabulated"); },
                    },
                    spec.family);
}

TabulatedDrift load_tabulated_drift(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::ConfigError, "cannot open drift table " + path, "drift.file");
  TabulatedDrift tab;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    ss.imbue(std::locale::classic());
    double x = 0.0, b = 0.0;
    if (!(ss >> x >> b)) {
      if (first) {
        first = false;
        continue;
      }
      throw Error(Errc::ConfigError, "malformed row in drift table: " + line, "drift.file");
    }
    first = false;
    tab.grid.push_back(x);
    tab.values.push_back(b);
  }
  if (tab.grid.size() < 2 || !std::is_sorted(tab.grid.begin(), tab.grid.end()))
    throw Error(Errc::ConfigError, "drift table needs >= 2 rows with sorted x", "drift.file");
  return tab;
}

SigmaReport check_sigma_membership(const DriftSpec& spec, std::span<const double> probe_grid,
                                   double lipschitz_cap) {
  SigmaReport report;
  std::vector<double> b(probe_grid.size());
  for (std::size_t i = 0; i < probe_grid.size(); ++i) b[i] = eval_drift(spec, probe_grid[i]);

  for (std::size_t i = 0; i < probe_grid.size(); ++i) {
    const double x = probe_grid[i];
    if (std::abs(b[i]) > spec.class_C * (1.0 + std::abs(x)))
      report.violations.push_back({x, SigmaCondition::LinearGrowth, std::abs(b[i])});
    if (std::abs(x) > spec.class_A) {
      const double inward = b[i] * (x > 0.0 ? 1.0 : -1.0);
      if (inward > -spec.class_gamma)
        report.violations.push_back({x, SigmaCondition::InwardDrift, inward});
    }
    if (i + 1 < probe_grid.size()) {
      const double h = probe_grid[i + 1] - x;
      const double q = h > 0.0 ? std::abs(b[i + 1] - b[i]) / h : 0.0;
      if (!std::isfinite(q) || q > lipschitz_cap)
        report.violations.push_back({x, SigmaCondition::LocalLipschitz, q});
      else
        report.max_difference_quotient = std::max(report.max_difference_quotient, q);
    }
  }
  report.ok = report.violations.empty();
  return report;
}

std::vector<double> default_probe_grid(const DriftSpec& spec, double margin, std::size_t n) {
  double reach = spec.class_A + margin;
  if (const auto* tab = std::get_if<TabulatedDrift>(&spec.family)) {
    reach = std::min({reach, -tab->grid.front(), tab->grid.back()});
  }
  return linspace(-reach, reach, n);
}

double default_x_max(const DriftSpec& spec) {
  double x_max = spec.class_A + 10.0 / spec.class_gamma;
  if (const auto* tab = std::get_if<TabulatedDrift>(&spec.family))
    x_max = std::min({x_max, -tab->grid.front(), tab->grid.back()});
  return x_max;
}

InvariantLaw invariant_law(const DriftSpec& spec) {
  const double x_max = default_x_max(spec);
  const auto n = static_cast<std::size_t>(std::ceil(2.0 * x_max / 1e-3)) + 1;
  return invariant_law(spec, x_max, std::max(n, kMinLawGrid));
}

InvariantLaw invariant_law(const DriftSpec& spec, double x_max, std::size_t n_grid) {
  if (n_grid < kMinLawGrid)
    throw Error(Errc::GridTooCoarse, "invariant_law needs n_grid >= " + std::to_string(kMinLawGrid));
  DDSTOP_REQUIRE(x_max > 0.0, Errc::BadParameters, "invariant_law: X_max must be positive");
  if (n_grid % 2 == 0) ++n_grid;

  InvariantLaw law;
  law.grid = linspace(-x_max, x_max, n_grid);
  law.grid[n_grid / 2] = 0.0;
  const auto& x = law.grid;

  std::vector<double> b(n_grid);
  for (std::size_t i = 0; i < n_grid; ++i) b[i] = 2.0 * eval_drift(spec, x[i]);
  // Potential 2 int_0^x b, anchored at the centre node.
  auto potential = cumulative_trapezoid(x, b);
  const double at_zero = potential[n_grid / 2];
  for (auto& p : potential) p -= at_zero;
  const double peak = *std::max_element(potential.begin(), potential.end());

  law.density.resize(n_grid);
  for (std::size_t i = 0; i < n_grid; ++i) law.density[i] = std::exp(potential[i] - peak);

  const double z = trapezoid(x, law.density);
  // Same rule on every other node; the grid has an even number of cells.
  double z_coarse = 0.0;
  for (std::size_t i = 2; i < n_grid; i += 2)
    z_coarse += (x[i] - x[i - 2]) * (law.density[i] + law.density[i - 2]) * 0.5;

  for (auto& d : law.density) d /= z;
  law.cdf = cumulative_trapezoid(x, law.density);
  for (double& c : law.cdf) c = std::min(c, 1.0);

  const double tail = (law.density.front() + law.density.back()) / (2.0 * spec.class_gamma);
  const double quadrature = std::abs(z - z_coarse) / (3.0 * z);
  law.normalization_error = tail + quadrature;
  return law;
}

double InvariantLaw::density_at(double x) const { return interpolate(grid, density, x); }

double InvariantLaw::cdf_at(double x) const { return interpolate(grid, cdf, x); }

double InvariantLaw::quantile(double u) const {
  u = std::clamp(u, 0.0, 1.0);
  auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
  if (it == cdf.begin()) return grid.front();
  if (it == cdf.end()) return grid.back();
  const auto i = static_cast<std::size_t>(it - cdf.begin());
  const double span = cdf[i] - cdf[i - 1];
  const double w = span > 0.0 ? (u - cdf[i - 1]) / span : 0.0;
  return grid[i - 1] + w * (grid[i] - grid[i - 1]);
}

}  // namespace ddstop

namespace ddstop {

XiCurve::XiCurve(const InvariantLaw& law) {
  const std::size_t zero =
      static_cast<std::size_t>(std::lower_bound(law.grid.begin(), law.grid.end(), 0.0) - law.grid.begin());
  DDSTOP_REQUIRE(zero + 1 < law.grid.size() && law.grid[zero] == 0.0, Errc::BadParameters,
                 "XiCurve needs a law grid with a node at 0");
  nodes_.assign(law.grid.begin() + static_cast<std::ptrdiff_t>(zero), law.grid.end());
  ratio_.resize(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    ratio_[i] = law.cdf[zero + i] / law.density[zero + i];
  integral_ = cumulative_trapezoid(nodes_, ratio_);
}

double XiCurve::operator()(double x) const {
  if (!(x >= 0.0) || x > nodes_.back())
    throw Error(Errc::OutOfRange, "xi evaluated outside [0, " + std::to_string(nodes_.back()) + "]");
  const std::size_t i = bracket_index(nodes_, x);
  const double h = x - nodes_[i];
  const double r = ratio_[i] + (ratio_[i + 1] - ratio_[i]) * h / (nodes_[i + 1] - nodes_[i]);
  return 2.0 * (integral_[i] + 0.5 * h * (ratio_[i] + r));
}

std::shared_ptr<const XiCurve> make_xi_curve(const DriftSpec& spec) {
  return std::make_shared<const XiCurve>(invariant_law(spec));
}

}  // namespace ddstop
