#include "ddstop/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/distributions/students_t.hpp>

#include "ddstop/error.hpp"

namespace ddstop {

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  DDSTOP_REQUIRE(n >= 2, Errc::BadParameters, "linspace needs at least two points");
  std::vector<double> out(n);
  const double step = (hi - lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) out[i] = lo + step * static_cast<double>(i);
  out.back() = hi;
  return out;
}

std::vector<double> uniform_grid(double lo, double hi, double max_step) {
  DDSTOP_REQUIRE(hi > lo && max_step > 0.0, Errc::BadParameters, "uniform_grid: bad range");
  const auto cells = static_cast<std::size_t>(std::ceil((hi - lo) / max_step - 1e-9));
  return linspace(lo, hi, std::max<std::size_t>(cells, 1) + 1);
}

std::vector<double> logspace(double lo, double hi, std::size_t n) {
  DDSTOP_REQUIRE(lo > 0.0 && hi > 0.0, Errc::BadParameters, "logspace needs positive bounds");
  auto out = linspace(std::log(lo), std::log(hi), n);
  for (auto& v : out) v = std::exp(v);
  out.front() = lo;
  out.back() = hi;
  return out;
}

std::vector<double> cumulative_trapezoid(std::span<const double> x,
                                         std::span<const double> f) {
  DDSTOP_REQUIRE(x.size() == f.size() && !x.empty(), Errc::BadParameters,
                 "cumulative_trapezoid: size mismatch");
  std::vector<double> out(x.size(), 0.0);
  for (std::size_t i = 1; i < x.size(); ++i)
    out[i] = out[i - 1] + 0.5 * (x[i] - x[i - 1]) * (f[i] + f[i - 1]);
  return out;
}

double trapezoid(std::span<const double> x, std::span<const double> f) {
  DDSTOP_REQUIRE(x.size() == f.size(), Errc::BadParameters, "trapezoid: size mismatch");
  double s = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) s += 0.5 * (x[i] - x[i - 1]) * (f[i] + f[i - 1]);
  return s;
}

std::size_t bracket_index(std::span<const double> x, double at) {
  if (x.size() < 2 || at <= x.front()) return 0;
  if (at >= x.back()) return x.size() - 2;
  auto it = std::upper_bound(x.begin(), x.end(), at);
  return static_cast<std::size_t>(it - x.begin()) - 1;
}

double interpolate(std::span<const double> x, std::span<const double> f, double at) {
  if (at <= x.front()) return f.front();
  if (at >= x.back()) return f.back();
  const std::size_t i = bracket_index(x, at);
  const double w = (at - x[i]) / (x[i + 1] - x[i]);
  return f[i] + w * (f[i + 1] - f[i]);
}

double standard_normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

double standard_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double student_t_quantile(double p, double dof) {
  boost::math::students_t dist(dof);
  return boost::math::quantile(dist, p);
}

}  // namespace ddstop
