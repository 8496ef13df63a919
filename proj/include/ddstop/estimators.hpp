#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ddstop/payoff.hpp"
#include "ddstop/sde.hpp"

namespace ddstop {

enum class KernelShape { Epanechnikov, Uniform, Triangular };

/// Compactly supported kernel on [-1, 1] with unit mass.
struct Kernel {
  KernelShape shape = KernelShape::Epanechnikov;
  static constexpr double support_radius = 1.0;

  double operator()(double u) const;
};

std::string to_string(KernelShape shape);
std::optional<KernelShape> parse_kernel(std::string_view name);

/// Direct O(n) evaluation of rho_T(x) = (1/T) sum_k K_T(x - X_k) dt with
/// K_T(u) = sqrt(T) K(u sqrt(T)), over the left-endpoint samples of the path.
double density_estimate(const DiffusionPath& path, const Kernel& kernel, double x);

/// Fraction of left-endpoint samples strictly below x.
double cdf_estimate(const DiffusionPath& path, double x);

/// Occupation data kept sorted with prefix sums, so that the kernel density
/// and empirical CDF cost O(log n) per evaluation. Observations may arrive
/// in several blocks with a common time step.
class OccupationEstimator {
 public:
  OccupationEstimator() = default;
  OccupationEstimator(std::span<const double> nodes, double dt);
  explicit OccupationEstimator(const DiffusionPath& path);

  void append(std::span<const double> nodes);

  double T() const { return dt_ * static_cast<double>(sorted_.size()); }
  double dt() const { return dt_; }
  std::size_t size() const { return sorted_.size(); }
  bool empty() const { return sorted_.empty(); }
  double min() const { return sorted_.front(); }
  double max() const { return sorted_.back(); }

  double density(const Kernel& kernel, double x) const;
  double cdf(double x) const;

 private:
  void rebuild_sums();

  double dt_ = 0.0;
  double centre_ = 0.0;
  std::vector<double> sorted_;
  // prefix_[i] = sum_{j < i} (X_j - centre), prefix2_ likewise for squares.
  std::vector<double> prefix_;
  std::vector<double> prefix2_;
};

/// xi estimate on a grid over [0, zeta]:
///   xi(x) = max(2 int_0^x F / max(rho, a), M1 / 2).
struct XiEstimate {
  std::vector<double> grid;
  std::vector<double> xi_values;
  /// 2 int_0^x F / max(rho, a) before the clamp.
  std::vector<double> integral;
  double floor_a = 0.0;
  double clamp_M1 = 0.0;
  double T = 0.0;
  Kernel kernel;
  /// Data the estimate was built from; used for off-grid refinement.
  std::shared_ptr<const OccupationEstimator> source;

  double integrand(double y) const;
};

/// Uniform barrier grid on [0, zeta] with step min(1e-3, (zeta - y1) / 2000).
std::vector<double> barrier_grid(double y1, double zeta);

XiEstimate xi_hat(std::shared_ptr<const OccupationEstimator> data, const Kernel& kernel,
                  std::span<const double> grid, double floor_a, double clamp_M1);
XiEstimate xi_hat(const DiffusionPath& path, const Kernel& kernel, std::span<const double> grid,
                  double floor_a, double clamp_M1);

/// Optional off-grid refinement of an argmax: each level resamples the two
/// cells around the current best point at `points` nodes. levels = 0 is the
/// plain grid search.
struct ZoomOptions {
  int levels = 0;
  int points = 201;
};

struct BarrierEstimate {
  double y_hat = 0.0;
  double value = 0.0;
};

/// Smallest grid point maximizing g / xi over grid points in [y1, zeta],
/// refined off-grid if zoom.levels > 0. Throws EmptyWindow if no grid point
/// lies in the window.
BarrierEstimate estimate_barrier(const XiEstimate& xi_est, const PayoffSpec& payoff, double y1, double zeta,
                                 const ZoomOptions& zoom = {});

}  // namespace ddstop
