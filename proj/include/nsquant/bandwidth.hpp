#pragma once

#include <vector>

#include "nsquant/curvefit.hpp"
#include "nsquant/kernel.hpp"
#include "nsquant/series.hpp"

namespace nsquant {

struct BandwidthSelection {
  double alpha = 0.5;
  double b_yj = 0;             // independence rule-of-thumb bandwidth
  double sigma_tilde_sq = 0;   // block long-run variance estimate
  double rho_star = 1;         // dependence correction factor
  double b_star = 0;           // b_yj * rho_star, clamped
  std::size_t m_tilde = 0;     // block length floor(n^{1/3})
  double pilot_bandwidth = 0;  // bandwidth of the pilot curve (= b_yj)
  unsigned flags = 0;          // clamp / floor diagnostics
};

struct LocalBandwidthProfile {
  double alpha = 0.5;
  EvaluationGrid grid;
  std::vector<double> rho_star_local;
  std::vector<double> b_local;
  std::vector<unsigned> flags;
};

// Quantile rule-of-thumb bandwidth: a quartic-trend plug-in mean-regression
// bandwidth times the normal-model factor {alpha(1-alpha)/phi_N(z_alpha)^2}^{1/5}.
double yj_rule_of_thumb(const UnitTimeSeries& series, double alpha,
                        const KernelSpec& kernel);

// The normal-model factor alone; symmetric in alpha <-> 1-alpha by construction.
double yj_multiplier(double alpha);

struct VarianceCorrection {
  double rho_star = 1;
  double sigma_tilde_sq = 0;
  std::size_t m_tilde = 0;
  unsigned flags = 0;
};

// Dependence correction rho* = (sigma_tilde^2 / (alpha(1-alpha)))^{1/5} where
// sigma_tilde^2 is the overlapping-block variance of the check-loss scores
// psi_alpha(X_i - pilot curve at i/n), block length floor(n^{1/3}).
VarianceCorrection variance_correction(const UnitTimeSeries& series,
                                       double alpha, double pilot_b,
                                       const KernelSpec& kernel);

// rho* from a precomputed block statistic; identity when the statistic equals
// alpha(1-alpha).
double rho_star_from(double sigma_tilde_sq, double alpha);

BandwidthSelection select_bandwidth(const UnitTimeSeries& series, double alpha,
                                    const KernelSpec& kernel);

// Local correction rho*(alpha, t) = (sigma_hat^2(t) / (alpha(1-alpha)))^{1/5}
// using the windowed long-run variance at pilot bandwidth b_yj.
LocalBandwidthProfile local_bandwidth_profile(const UnitTimeSeries& series,
                                              double alpha,
                                              const KernelSpec& kernel,
                                              const EvaluationGrid& grid);

// Admissible range for a selected bandwidth on n observations.
double bandwidth_lower_clamp(std::size_t n, const KernelSpec& kernel);
constexpr double kBandwidthUpperClamp = 0.45;

}  // namespace nsquant
