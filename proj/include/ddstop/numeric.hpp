#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ddstop {

/// n points from lo to hi inclusive (n >= 2).
std::vector<double> linspace(double lo, double hi, std::size_t n);

/// Uniform grid from lo to hi whose step is the largest value <= max_step
/// that divides [lo, hi] exactly, so both endpoints are nodes.
std::vector<double> uniform_grid(double lo, double hi, double max_step);

/// n log-spaced points from lo to hi inclusive.
std::vector<double> logspace(double lo, double hi, std::size_t n);

/// out[i] = integral of f from x[0] to x[i] by the trapezoid rule.
std::vector<double> cumulative_trapezoid(std::span<const double> x,
                                         std::span<const double> f);

double trapezoid(std::span<const double> x, std::span<const double> f);

/// Linear interpolation on a sorted grid; clamps outside [x.front(), x.back()].
double interpolate(std::span<const double> x, std::span<const double> f, double at);

/// Index i with x[i] <= at < x[i+1], clamped to [0, n-2].
std::size_t bracket_index(std::span<const double> x, double at);

double standard_normal_pdf(double x);
double standard_normal_cdf(double x);

/// Quantile of the Student-t distribution with `dof` degrees of freedom.
double student_t_quantile(double p, double dof);

}  // namespace ddstop
