#include "ddstop/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ddstop/error.hpp"
#include "ddstop/numeric.hpp"

namespace ddstop {

double Kernel::operator()(double u) const {
  const double a = std::abs(u);
  if (a > 1.0) return 0.0;
  switch (shape) {
    case KernelShape::Epanechnikov: return 0.75 * (1.0 - u * u);
    case KernelShape::Uniform: return 0.5;
    case KernelShape::Triangular: return 1.0 - a;
  }
  return 0.0;
}

std::string to_string(KernelShape shape) {
  switch (shape) {
    case KernelShape::Epanechnikov: return "epanechnikov";
    case KernelShape::Uniform: return "uniform";
    case KernelShape::Triangular: return "triangular";
  }
  return "unknown";
}

std::optional<KernelShape> parse_kernel(std::string_view name) {
  if (name == "epanechnikov") return KernelShape::Epanechnikov;
  if (name == "uniform") return KernelShape::Uniform;
  if (name == "triangular") return KernelShape::Triangular;
  return std::nullopt;
}

double density_estimate(const DiffusionPath& path, const Kernel& kernel, double x) {
  const auto nodes = path.riemann_nodes();
  DDSTOP_REQUIRE(!nodes.empty() && path.T > 0.0, Errc::BadParameters, "density estimate needs T > 0");
  const double root_T = std::sqrt(path.T);
  double sum = 0.0;
  for (double xk : nodes) sum += kernel(root_T * (x - xk));
  return sum * root_T * path.dt / path.T;
}

double cdf_estimate(const DiffusionPath& path, double x) {
  const auto nodes = path.riemann_nodes();
  DDSTOP_REQUIRE(!nodes.empty(), Errc::BadParameters, "cdf estimate needs T > 0");
  const auto below = std::count_if(nodes.begin(), nodes.end(), [x](double xk) { return xk < x; });
  return static_cast<double>(below) / static_cast<double>(nodes.size());
}

OccupationEstimator::OccupationEstimator(std::span<const double> nodes, double dt)
    : dt_(dt), sorted_(nodes.begin(), nodes.end()) {
  DDSTOP_REQUIRE(dt > 0.0, Errc::BadParameters, "occupation data needs dt > 0");
  std::sort(sorted_.begin(), sorted_.end());
  rebuild_sums();
}

OccupationEstimator::OccupationEstimator(const DiffusionPath& path)
    : OccupationEstimator(path.riemann_nodes(), path.dt) {}

void OccupationEstimator::append(std::span<const double> nodes) {
  DDSTOP_REQUIRE(dt_ > 0.0, Errc::BadParameters, "append to an estimator without a time step");
  const auto mid = static_cast<std::ptrdiff_t>(sorted_.size());
  sorted_.insert(sorted_.end(), nodes.begin(), nodes.end());
  std::sort(sorted_.begin() + mid, sorted_.end());
  std::inplace_merge(sorted_.begin(), sorted_.begin() + mid, sorted_.end());
  rebuild_sums();
}

void OccupationEstimator::rebuild_sums() {
  const std::size_t n = sorted_.size();
  centre_ = n == 0 ? 0.0 : std::accumulate(sorted_.begin(), sorted_.end(), 0.0) / static_cast<double>(n);
  prefix_.assign(n + 1, 0.0);
  prefix2_.assign(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double d = sorted_[i] - centre_;
    prefix_[i + 1] = prefix_[i] + d;
    prefix2_[i + 1] = prefix2_[i] + d * d;
  }
}

double OccupationEstimator::cdf(double x) const {
  DDSTOP_REQUIRE(!sorted_.empty(), Errc::BadParameters, "cdf of empty occupation data");
  const auto below = std::lower_bound(sorted_.begin(), sorted_.end(), x) - sorted_.begin();
  return static_cast<double>(below) / static_cast<double>(sorted_.size());
}

double OccupationEstimator::density(const Kernel& kernel, double x) const {
  DDSTOP_REQUIRE(!sorted_.empty(), Errc::BadParameters, "density of empty occupation data");
  const double T = this->T();
  const double root_T = std::sqrt(T);
  const double h = 1.0 / root_T;
  const auto index = [&](auto it) { return static_cast<std::size_t>(it - sorted_.begin()); };
  const std::size_t lo = index(std::lower_bound(sorted_.begin(), sorted_.end(), x - h));
  const std::size_t hi = index(std::upper_bound(sorted_.begin(), sorted_.end(), x + h));
  if (hi <= lo) return 0.0;
  const double xc = x - centre_;
  // Sums over samples j in [i, k) of 1, (X_j - x) and (X_j - x)^2.
  const auto count = [](std::size_t i, std::size_t k) { return static_cast<double>(k - i); };
  const auto first = [&](std::size_t i, std::size_t k) { return prefix_[k] - prefix_[i] - count(i, k) * xc; };
  const auto second = [&](std::size_t i, std::size_t k) {
    return prefix2_[k] - prefix2_[i] - 2.0 * xc * (prefix_[k] - prefix_[i]) + count(i, k) * xc * xc;
  };

  double kernel_sum = 0.0;
  switch (kernel.shape) {
    case KernelShape::Epanechnikov:
      kernel_sum = 0.75 * (count(lo, hi) - T * second(lo, hi));
      break;
    case KernelShape::Uniform:
      kernel_sum = 0.5 * count(lo, hi);
      break;
    case KernelShape::Triangular: {
      const std::size_t mid = index(std::upper_bound(sorted_.begin() + static_cast<std::ptrdiff_t>(lo),
                                                     sorted_.begin() + static_cast<std::ptrdiff_t>(hi), x));
      // Left of x the samples sit below x, so |u| = -sqrt(T) (X - x).
      kernel_sum = count(lo, mid) + root_T * first(lo, mid) + count(mid, hi) - root_T * first(mid, hi);
      break;
    }
  }
  return std::max(kernel_sum, 0.0) * root_T * dt_ / T;
}

double XiEstimate::integrand(double y) const {
  DDSTOP_REQUIRE(source != nullptr, Errc::BadParameters, "xi estimate has no data attached");
  return source->cdf(y) / std::max(source->density(kernel, y), floor_a);
}

std::vector<double> barrier_grid(double y1, double zeta) {
  DDSTOP_REQUIRE(y1 > 0.0 && y1 < zeta, Errc::BadParameters, "barrier grid needs 0 < y1 < zeta");
  return uniform_grid(0.0, zeta, std::min(1e-3, (zeta - y1) / 2000.0));
}

XiEstimate xi_hat(std::shared_ptr<const OccupationEstimator> data, const Kernel& kernel,
                  std::span<const double> grid, double floor_a, double clamp_M1) {
  DDSTOP_REQUIRE(data != nullptr && !data->empty(), Errc::BadParameters, "xi_hat needs observations");
  DDSTOP_REQUIRE(grid.size() >= 2 && grid.front() == 0.0, Errc::BadParameters, "xi_hat grid must start at 0");
  DDSTOP_REQUIRE(floor_a > 0.0 && clamp_M1 > 0.0, Errc::BadParameters, "xi_hat needs a > 0 and M1 > 0");
  XiEstimate est;
  est.grid.assign(grid.begin(), grid.end());
  est.floor_a = floor_a;
  est.clamp_M1 = clamp_M1;
  est.T = data->T();
  est.kernel = kernel;
  est.source = std::move(data);

  std::vector<double> h(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) h[i] = est.integrand(grid[i]);
  est.integral = cumulative_trapezoid(grid, h);
  est.xi_values.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    est.integral[i] *= 2.0;
    est.xi_values[i] = std::max(est.integral[i], 0.5 * clamp_M1);
  }
  return est;
}

XiEstimate xi_hat(const DiffusionPath& path, const Kernel& kernel, std::span<const double> grid, double floor_a,
                  double clamp_M1) {
  return xi_hat(std::make_shared<const OccupationEstimator>(path), kernel, grid, floor_a, clamp_M1);
}

BarrierEstimate estimate_barrier(const XiEstimate& xi_est, const PayoffSpec& payoff, double y1, double zeta,
                                 const ZoomOptions& zoom) {
  DDSTOP_REQUIRE(y1 < zeta, Errc::BadParameters, "estimate_barrier needs y1 < zeta");
  const auto& grid = xi_est.grid;
  const double tol = 1e-12 * std::max(1.0, zeta);
  std::size_t best = grid.size();
  double best_value = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < y1 - tol || grid[i] > zeta + tol) continue;
    const double v = eval_payoff(payoff, grid[i]) / xi_est.xi_values[i];
    if (best == grid.size() || v > best_value) {
      best = i;
      best_value = v;
    }
  }
  if (best == grid.size()) throw Error(Errc::EmptyWindow, "no barrier grid point in [y1, zeta]");
  BarrierEstimate out{grid[best], best_value};
  if (zoom.levels <= 0) return out;
  DDSTOP_REQUIRE(zoom.points >= 3, Errc::BadParameters, "zoom needs at least 3 points per level");

  // Bracket the two neighbouring cells, clipped to the window, and integrate
  // the estimator on a fine panel starting from a known cumulative value.
  double lo = best > 0 ? grid[best - 1] : grid[best];
  double lo_integral = best > 0 ? xi_est.integral[best - 1] : xi_est.integral[best];
  double hi = best + 1 < grid.size() ? grid[best + 1] : grid[best];
  for (int level = 0; level < zoom.levels && hi > lo; ++level) {
    const auto xs = linspace(lo, hi, static_cast<std::size_t>(zoom.points));
    std::vector<double> h(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) h[i] = xi_est.integrand(xs[i]);
    auto cum = cumulative_trapezoid(xs, h);
    std::size_t arg = xs.size();
    double level_best = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      cum[i] = lo_integral + 2.0 * cum[i];
      if (xs[i] < y1 - tol || xs[i] > zeta + tol) continue;
      const double v = eval_payoff(payoff, xs[i]) / std::max(cum[i], 0.5 * xi_est.clamp_M1);
      if (arg == xs.size() || v > level_best) {
        arg = i;
        level_best = v;
      }
    }
    if (arg == xs.size()) break;
    if (level_best > out.value || (level_best == out.value && xs[arg] < out.y_hat)) out = {xs[arg], level_best};
    if (arg == xs.size()) break;
    lo = arg > 0 ? xs[arg - 1] : xs[arg];
    lo_integral = arg > 0 ? cum[arg - 1] : cum[arg];
    hi = arg + 1 < xs.size() ? xs[arg + 1] : xs[arg];
  }
  return out;
}

}  // namespace ddstop
