#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "nsquant/curvefit.hpp"
#include "nsquant/kernel.hpp"
#include "nsquant/series.hpp"

#include <nlohmann/json_fwd.hpp>

namespace nsquant {

// Observation indices i with i/n within b of t: s = max(floor(nt - nb), 1),
// l = min(floor(nt + nb), n).  1-based.
struct LocalNeighborhood {
  std::size_t s = 1;
  std::size_t l = 1;
  std::size_t size() const { return l - s + 1; }
};

LocalNeighborhood neighborhood(std::size_t n, double t, double b);

// Overlapping-block variance of a sequence: with blocks of length m,
//   (m / (N - m + 1)) * sum_j (block_mean_j - grand_mean)^2.
// Throws InsufficientDataError unless 2 <= m < N.
double block_long_run_variance(std::span<const double> z, std::size_t m);

// Windowed long-run variance of the quantile score process at t: applies the
// block statistic to Z_i = psi_alpha(X_i - rawcurve(i/n)) over the
// neighborhood of t.  The raw curve must cover {i/n} for i in that window.
double long_run_variance(const UnitTimeSeries& series, double alpha,
                         const QuantileCurve& raw_curve, double t, double b,
                         std::size_t m_n);

// Kernel density estimate of the observation density at height qhat, windowed:
//   (1 / (|N| h)) * sum_{i in N} K#((qhat - X_i)/h).
double density_at_quantile(const UnitTimeSeries& series, double t, double b,
                           double qhat, double h_n,
                           const KernelSpec& kernel_sharp);

struct PlugIns {
  std::vector<double> sigma_sq;      // long-run variance at each grid point
  std::vector<double> density;       // density at the fitted quantile
  std::vector<std::size_t> m_n;      // block lengths actually used
  std::vector<double> h_n;           // density bandwidths actually used
  std::vector<double> qhat;          // raw fit at the grid point
  std::vector<double> slope;         // raw slope at the grid point
  std::vector<unsigned> flags;
};

struct BandOptions {
  double lambda_star = 1.0;    // m_n = floor(lambda_star * |N|^{1/3})
  double c_star_scale = 1.06;  // h_n = scale * min(sd, IQR/1.34) * |N|^{-1/5}
  double sigma_floor = 1e-10;
  double density_floor = 1e-8;
  SolverOptions solver;
};

struct PointwiseBand {
  QuantileCurve center;  // jackknifed; for IQR bands alpha is NaN
  std::vector<double> lower;
  std::vector<double> upper;
  double nominal = 0.05;  // gamma
  PlugIns plugins;
  double first_bandwidth = 0;
  std::vector<unsigned> flags;  // per grid point, duplicated from center + plugins
};

// Pointwise (1-gamma) confidence band around the jackknifed quantile curve:
//   half-width(t) = z_{1-gamma/2} sqrt(phi_{K*} sigma^2(t)) / (f(t) sqrt(n b)).
// Grid points outside [b, 1-b] are marked missing with a boundary flag.
PointwiseBand pointwise_band(const UnitTimeSeries& series, double alpha,
                             double bandwidth, double bbar, double gamma,
                             const KernelSpec& kernel,
                             const EvaluationGrid& grid,
                             const BandOptions& options = {});

// Band around the IQR curve.  The variance plug-in applies the block statistic
// to W_i = psi_.75(X_i - q75(i/n))/f75(t) - psi_.25(X_i - q25(i/n))/f25(t);
// the density scaling is inside W, so the half-width has no density factor:
//   z_{1-gamma/2} sqrt(phi_{K*} sigma_IQR^2(t)) / sqrt(n min(b25, b75)).
PointwiseBand iqr_band(const UnitTimeSeries& series, double bandwidth25,
                       double bandwidth75, double bbar, double gamma,
                       const KernelSpec& kernel, const EvaluationGrid& grid,
                       const BandOptions& options = {});

// Half-width of the quantile band: z_{1-gamma/2} sqrt(phi_star sigma_sq) /
// (density sqrt(n b)).
double band_half_width(double sigma_sq, double density, std::size_t n, double b,
                       double phi_star, double gamma);

std::string band_to_csv(const PointwiseBand& band);
nlohmann::json band_to_json(const PointwiseBand& band);

}  // namespace nsquant
