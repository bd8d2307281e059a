#pragma once

#include <cstddef>
#include <span>

#include "nsquant/kernel.hpp"
#include "nsquant/series.hpp"

namespace nsquant {

// Check loss rho_alpha(x) = x * (alpha - 1{x < 0}) and its left derivative
// psi_alpha(x) = alpha - 1{x <= 0}.
double check_loss(double alpha, double x);
double psi(double alpha, double x);

enum class SolveMethod {
  automatic,  // exact enumeration for small windows, smoothed descent otherwise
  exact,      // force vertex enumeration
  smoothed,   // force smoothed-loss descent (still polished to a vertex)
};

struct SolverOptions {
  SolveMethod method = SolveMethod::automatic;
  // Windows up to this many points use exact enumeration under automatic.
  std::size_t exact_max_points = 32;
  // Kernel weights at or below this value are dropped from the window.
  double weight_floor = 1e-14;
  // Largest window for the full-enumeration fallback when certification fails.
  std::size_t fallback_max_points = 1500;
};

struct QuantileFit {
  double value = 0;    // fitted quantile at t
  double slope = 0;    // fitted derivative (0 for local constant)
  double loss = 0;     // attained weighted check loss
  std::size_t support = 0;  // observations with positive weight
  unsigned flags = 0;
};

struct LocalFitProblem {
  UnitTimeSeries series;
  double t = 0;
  double alpha = 0.5;
  double bandwidth = 0.1;
  KernelSpec kernel = KernelSpec::epanechnikov();
};

// Local linear check-loss fit at time t: minimize over (b0, b1) of
//   sum_i w_i * rho_alpha(X_i - b0 - b1 (i/n - t)),  w_i = K((i/n - t)/b).
// Throws InsufficientDataError if fewer than 2 weighted points; a window with
// a single distinct time falls back to local constant with a flag.
QuantileFit fit_local_linear(const UnitTimeSeries& series, double t,
                             double alpha, double bandwidth,
                             const KernelSpec& kernel,
                             const SolverOptions& options = {});
QuantileFit fit_local_linear(const LocalFitProblem& problem,
                             const SolverOptions& options = {});

// Weighted quantile of the window values (intercept-only fit).
QuantileFit fit_local_constant(const UnitTimeSeries& series, double t,
                               double alpha, double bandwidth,
                               const KernelSpec& kernel,
                               const SolverOptions& options = {});

// Core fit on explicit design points: times s_i (offsets from t), values y_i,
// weights w_i > 0.  Exposed for tests and reuse.
QuantileFit fit_weighted_line(std::span<const double> s,
                              std::span<const double> y,
                              std::span<const double> w, double alpha,
                              const SolverOptions& options = {});

// Smallest value x among y such that cumulative weight at x >= alpha * total.
double weighted_quantile_lower(std::span<const double> y,
                               std::span<const double> w, double alpha);

}  // namespace nsquant
