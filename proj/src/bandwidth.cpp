#include "nsquant/bandwidth.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "nsquant/errors.hpp"
#include "nsquant/flags.hpp"
#include "nsquant/inference.hpp"
#include "nsquant/mathutil.hpp"

namespace nsquant {

namespace {

// Least-squares quartic trend c0 + c1 t + ... + c4 t^4 over t_i = i/n.
struct QuarticFit {
  double c[5] = {0, 0, 0, 0, 0};
  double residual_variance = 0;
};

QuarticFit fit_quartic(const UnitTimeSeries& series) {
  const std::size_t n = series.size();
  double a[5][6] = {};  // normal equations, augmented
  for (std::size_t i = 0; i < n; ++i) {
    const double t = series.time(i);
    double pw[9];
    pw[0] = 1;
    for (int p = 1; p < 9; ++p) pw[p] = pw[p - 1] * t;
    for (int r = 0; r < 5; ++r) {
      for (int c = 0; c < 5; ++c) a[r][c] += pw[r + c];
      a[r][5] += pw[r] * series.values[i];
    }
  }
  // Gaussian elimination with partial pivoting; 5x5 on [0,1] powers is tame.
  for (int col = 0; col < 5; ++col) {
    int piv = col;
    for (int r = col + 1; r < 5; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    if (std::abs(a[piv][col]) < 1e-30)
      throw NumericError("quartic trend fit: singular normal equations");
    if (piv != col)
      for (int c = 0; c < 6; ++c) std::swap(a[piv][c], a[col][c]);
    for (int r = col + 1; r < 5; ++r) {
      const double f = a[r][col] / a[col][col];
      for (int c = col; c < 6; ++c) a[r][c] -= f * a[col][c];
    }
  }
  QuarticFit fit;
  for (int r = 4; r >= 0; --r) {
    double v = a[r][5];
    for (int c = r + 1; c < 5; ++c) v -= a[r][c] * fit.c[c];
    fit.c[r] = v / a[r][r];
  }
  double rss = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = series.time(i);
    const double yhat =
        fit.c[0] + t * (fit.c[1] + t * (fit.c[2] + t * (fit.c[3] + t * fit.c[4])));
    const double r = series.values[i] - yhat;
    rss += r * r;
  }
  fit.residual_variance = rss / static_cast<double>(n > 5 ? n - 5 : 1);
  return fit;
}

// int_0^1 (2 c2 + 6 c3 t + 12 c4 t^2)^2 dt, in closed form.
double curvature_integral(const QuarticFit& fit) {
  const double A = 2 * fit.c[2], B = 6 * fit.c[3], C = 12 * fit.c[4];
  return A * A + A * B + (B * B + 2 * A * C) / 3.0 + B * C / 2.0 + C * C / 5.0;
}

}  // namespace

double yj_multiplier(double alpha) {
  if (!(alpha > 0 && alpha < 1))
    throw ValidationError("bandwidth multiplier: alpha must be in (0, 1)");
  // Evaluate at min(alpha, 1-alpha) so the symmetry holds bit-exactly.
  const double a = std::min(alpha, 1.0 - alpha);
  const double d = normal_pdf(normal_quantile(a));
  return std::pow(a * (1.0 - a) / (d * d), 0.2);
}

double bandwidth_lower_clamp(std::size_t n, const KernelSpec& kernel) {
  return 2.0 / (static_cast<double>(n) * kernel.support_radius());
}

double yj_rule_of_thumb(const UnitTimeSeries& series, double alpha,
                        const KernelSpec& kernel) {
  const std::size_t n = series.size();
  if (n < 20)
    throw InsufficientDataError(
        "bandwidth rule of thumb needs n >= 20, got " + std::to_string(n));
  const QuarticFit trend = fit_quartic(series);
  const double curvature = std::max(curvature_integral(trend), 1e-8);
  const double phi = kernel_phi(kernel);
  const double mu2 = kernel_moment(kernel, 2);
  const double h_mean =
      std::pow(trend.residual_variance * phi /
                   (static_cast<double>(n) * mu2 * mu2 * curvature),
               0.2);
  return h_mean * yj_multiplier(alpha);
}

double rho_star_from(double sigma_tilde_sq, double alpha) {
  return std::pow(sigma_tilde_sq / (alpha * (1.0 - alpha)), 0.2);
}

VarianceCorrection variance_correction(const UnitTimeSeries& series,
                                       double alpha, double pilot_b,
                                       const KernelSpec& kernel) {
  const std::size_t n = series.size();
  if (n < 27)
    throw InsufficientDataError(
        "variance correction needs n >= 27 (block length >= 3), got " +
        std::to_string(n));
  VarianceCorrection vc;
  vc.m_tilde = static_cast<std::size_t>(
      floor_index(std::cbrt(static_cast<double>(n))));

  const QuantileCurve pilot = estimate_raw_curve(
      series, alpha, pilot_b, kernel, EvaluationGrid::full(n));
  std::vector<double> scores;
  scores.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!pilot.valid_at(i)) continue;
    scores.push_back(psi(alpha, series.values[i] - pilot.values[i]));
  }
  if (scores.size() <= vc.m_tilde)
    throw InsufficientDataError(
        "variance correction: too few usable pilot scores");
  vc.sigma_tilde_sq = block_long_run_variance(scores, vc.m_tilde);
  if (!(vc.sigma_tilde_sq > 1e-10)) {
    vc.sigma_tilde_sq = 1e-10;
    vc.flags |= kFlagSigmaFloor;
  }
  vc.rho_star = rho_star_from(vc.sigma_tilde_sq, alpha);
  return vc;
}

BandwidthSelection select_bandwidth(const UnitTimeSeries& series, double alpha,
                                    const KernelSpec& kernel) {
  const std::size_t n = series.size();
  BandwidthSelection sel;
  sel.alpha = alpha;
  sel.b_yj = yj_rule_of_thumb(series, alpha, kernel);

  const double lo = bandwidth_lower_clamp(n, kernel);
  double pilot = sel.b_yj;
  if (pilot < lo || pilot > kBandwidthUpperClamp) {
    pilot = std::clamp(pilot, lo, kBandwidthUpperClamp);
    sel.flags |= kFlagClamped;
  }
  sel.pilot_bandwidth = pilot;

  const VarianceCorrection vc =
      variance_correction(series, alpha, pilot, kernel);
  sel.sigma_tilde_sq = vc.sigma_tilde_sq;
  sel.rho_star = vc.rho_star;
  sel.m_tilde = vc.m_tilde;
  sel.flags |= vc.flags;

  sel.b_star = sel.b_yj * sel.rho_star;
  if (sel.b_star < lo || sel.b_star > kBandwidthUpperClamp) {
    sel.b_star = std::clamp(sel.b_star, lo, kBandwidthUpperClamp);
    sel.flags |= kFlagClamped;
  }
  return sel;
}

LocalBandwidthProfile local_bandwidth_profile(const UnitTimeSeries& series,
                                              double alpha,
                                              const KernelSpec& kernel,
                                              const EvaluationGrid& grid) {
  const std::size_t n = series.size();
  BandwidthSelection base = select_bandwidth(series, alpha, kernel);
  const double pilot = base.pilot_bandwidth;
  const QuantileCurve pilot_curve = estimate_raw_curve(
      series, alpha, pilot, kernel, EvaluationGrid::full(n));

  LocalBandwidthProfile prof;
  prof.alpha = alpha;
  prof.grid = grid;
  prof.rho_star_local.assign(grid.size(), 1.0);
  prof.b_local.assign(grid.size(), base.b_yj);
  prof.flags.assign(grid.size(), 0u);
  const double lo = bandwidth_lower_clamp(n, kernel);

  for (std::size_t k = 0; k < grid.size(); ++k) {
    // Edge evaluation points borrow the nearest interior window.
    const double t = std::clamp(grid[k], pilot, 1.0 - pilot);
    const LocalNeighborhood nb = neighborhood(n, t, pilot);
    const std::size_t m_n = std::max<std::size_t>(
        2, static_cast<std::size_t>(std::cbrt(static_cast<double>(nb.size()))));
    double sigma_sq;
    try {
      sigma_sq = long_run_variance(series, alpha, pilot_curve, t, pilot, m_n);
    } catch (const InsufficientDataError&) {
      sigma_sq = 0;
    }
    unsigned flags = 0;
    if (!(sigma_sq > 1e-10)) {
      sigma_sq = 1e-10;
      flags |= kFlagSigmaFloor;
    }
    prof.rho_star_local[k] = rho_star_from(sigma_sq, alpha);
    double b = base.b_yj * prof.rho_star_local[k];
    if (b < lo || b > kBandwidthUpperClamp) {
      b = std::clamp(b, lo, kBandwidthUpperClamp);
      flags |= kFlagClamped;
    }
    prof.b_local[k] = b;
    prof.flags[k] = flags;
  }
  return prof;
}

}  // namespace nsquant
