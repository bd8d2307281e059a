#include "nsquant/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "nsquant/csvio.hpp"
#include "nsquant/errors.hpp"
#include "nsquant/flags.hpp"
#include "nsquant/mathutil.hpp"
#include "nsquant/parallel.hpp"
#include "nsquant/solver.hpp"

#include <nlohmann/json.hpp>

namespace nsquant {

namespace {
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
}

LocalNeighborhood neighborhood(std::size_t n, double t, double b) {
  if (!(t > 0 && t < 1))
    throw ValidationError("neighborhood: t must lie in (0, 1)");
  if (!(b > 0)) throw ValidationError("neighborhood: bandwidth must be > 0");
  const double nd = static_cast<double>(n);
  LocalNeighborhood nb;
  const long long s = std::max(floor_index(nd * t - nd * b), 1LL);
  const long long l =
      std::min(floor_index(nd * t + nd * b), static_cast<long long>(n));
  nb.s = static_cast<std::size_t>(s);
  nb.l = static_cast<std::size_t>(std::max(l, s));
  return nb;
}

double block_long_run_variance(std::span<const double> z, std::size_t m) {
  const std::size_t n = z.size();
  if (m < 2)
    throw InsufficientDataError("block variance: block length must be >= 2");
  if (n <= m)
    throw InsufficientDataError(
        "block variance: sequence length " + std::to_string(n) +
        " must exceed block length " + std::to_string(m));
  double grand = 0;
  for (double v : z) grand += v;
  grand /= static_cast<double>(n);
  const std::size_t blocks = n - m + 1;
  double rolling = 0;
  for (std::size_t i = 0; i < m; ++i) rolling += z[i];
  double acc = 0;
  const double md = static_cast<double>(m);
  for (std::size_t j = 0;; ++j) {
    const double dev = rolling / md - grand;
    acc += dev * dev;
    if (j + 1 == blocks) break;
    rolling += z[j + m] - z[j];
  }
  return md / static_cast<double>(blocks) * acc;
}

namespace {

// Raw-curve lookup for observation index i (1-based); the curve grid must be
// a contiguous {i/n} range containing i.
double raw_value_at_index(const QuantileCurve& raw, std::size_t n,
                          std::size_t i, bool& ok) {
  const double nd = static_cast<double>(n);
  const auto i0 =
      static_cast<long long>(std::llround(raw.grid.points.front() * nd));
  const auto k = static_cast<long long>(i) - i0;
  if (k < 0 || k >= static_cast<long long>(raw.grid.size())) {
    ok = false;
    return kNan;
  }
  if (std::abs(raw.grid.points[static_cast<std::size_t>(k)] * nd -
               static_cast<double>(i)) > 1e-6)
    throw ValidationError(
        "long_run_variance: raw curve grid is not aligned to {i/n}");
  ok = raw.valid_at(static_cast<std::size_t>(k));
  return raw.values[static_cast<std::size_t>(k)];
}

}  // namespace

double long_run_variance(const UnitTimeSeries& series, double alpha,
                         const QuantileCurve& raw_curve, double t, double b,
                         std::size_t m_n) {
  const std::size_t n = series.size();
  const LocalNeighborhood nb = neighborhood(n, t, b);
  static thread_local std::vector<double> z;
  z.clear();
  for (std::size_t i = nb.s; i <= nb.l; ++i) {
    bool ok = false;
    const double q = raw_value_at_index(raw_curve, n, i, ok);
    if (!ok) continue;
    z.push_back(psi(alpha, series.values[i - 1] - q));
  }
  if (z.size() <= m_n)
    throw InsufficientDataError(
        "long_run_variance: neighborhood of t=" + std::to_string(t) + " has " +
        std::to_string(z.size()) + " usable points, needs more than " +
        std::to_string(m_n));
  return block_long_run_variance(z, m_n);
}

double density_at_quantile(const UnitTimeSeries& series, double t, double b,
                           double qhat, double h_n,
                           const KernelSpec& kernel_sharp) {
  if (!(h_n > 0))
    throw ValidationError("density_at_quantile: h_n must be > 0");
  const std::size_t n = series.size();
  const LocalNeighborhood nb = neighborhood(n, t, b);
  double acc = 0;
  for (std::size_t i = nb.s; i <= nb.l; ++i)
    acc += kernel_sharp((qhat - series.values[i - 1]) / h_n);
  return acc / (static_cast<double>(nb.size()) * h_n);
}

double band_half_width(double sigma_sq, double density, std::size_t n, double b,
                       double phi_star, double gamma) {
  const double z = normal_quantile(1.0 - gamma / 2.0);
  return z * std::sqrt(phi_star * sigma_sq) /
         (density * std::sqrt(static_cast<double>(n) * b));
}

namespace {

// Linear-interpolation quantile of a small unweighted sample.
double sample_quantile(std::vector<double> v, double p) {
  std::sort(v.begin(), v.end());
  const double pos = p * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= v.size()) return v.back();
  const double frac = pos - static_cast<double>(lo);
  return v[lo] * (1.0 - frac) + v[lo + 1] * frac;
}

struct WindowScale {
  double c_star = 0;  // 1.06 * min(sd, IQR/1.34), possibly 0 for flat windows
};

WindowScale window_scale(const UnitTimeSeries& series,
                         const LocalNeighborhood& nb, double scale_factor) {
  std::vector<double> v(series.values.begin() + (nb.s - 1),
                        series.values.begin() + nb.l);
  double mean = 0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0;
  for (double x : v) ss += (x - mean) * (x - mean);
  const double sd = v.size() > 1
                        ? std::sqrt(ss / static_cast<double>(v.size() - 1))
                        : 0.0;
  const double iqr = sample_quantile(v, 0.75) - sample_quantile(v, 0.25);
  WindowScale w;
  w.c_star = scale_factor * std::min(sd, iqr / 1.34);
  return w;
}

std::size_t block_length_for(std::size_t window, double lambda_star) {
  const double m =
      lambda_star * std::cbrt(static_cast<double>(window));
  return std::max<std::size_t>(2, static_cast<std::size_t>(m));
}

struct JackknifeParts {
  QuantileCurve raw_b;      // cover-grid raw curve at b
  QuantileCurve center;     // jackknifed on the target grid
};

JackknifeParts assemble_jackknife(const UnitTimeSeries& series, double alpha,
                                  double b, double bbar,
                                  const KernelSpec& kernel,
                                  const EvaluationGrid& target,
                                  double cover_radius,
                                  const SolverOptions& solver) {
  const EvaluationGrid cover =
      raw_cover_grid(series.size(), target, cover_radius);
  JackknifeParts parts;
  parts.raw_b = estimate_raw_curve(series, alpha, b, kernel, cover, solver);
  QuantileCurve raw_b2 = estimate_raw_curve(series, alpha, b * std::sqrt(2.0),
                                            kernel, cover, solver);
  const QuantileCurve sm_b =
      second_stage_smooth(parts.raw_b, bbar, kernel, target);
  const QuantileCurve sm_b2 = second_stage_smooth(raw_b2, bbar, kernel, target);

  QuantileCurve& out = parts.center;
  out.alpha = alpha;
  out.bandwidth = b;
  out.second_bandwidth = bbar;
  out.stage = CurveStage::jackknifed;
  out.grid = target;
  out.values.assign(target.size(), kNan);
  out.flags.assign(target.size(), 0u);
  for (std::size_t k = 0; k < target.size(); ++k) {
    out.flags[k] = sm_b.flags[k] | sm_b2.flags[k];
    if (!sm_b.valid_at(k) || !sm_b2.valid_at(k)) {
      out.flags[k] |= kFlagMissing;
      continue;
    }
    out.values[k] = 2.0 * sm_b.values[k] - sm_b2.values[k];
  }
  return parts;
}

void check_band_args(double b, double bbar, double gamma) {
  if (!(b > 0 && b <= 0.5))
    throw ValidationError("band: bandwidth must lie in (0, 0.5]");
  if (!(bbar > 0 && bbar < 1))
    throw ValidationError("band: second-stage bandwidth must lie in (0, 1)");
  if (!(gamma > 0 && gamma < 1))
    throw ValidationError("band: gamma must lie in (0, 1)");
}

}  // namespace

PointwiseBand pointwise_band(const UnitTimeSeries& series, double alpha,
                             double bandwidth, double bbar, double gamma,
                             const KernelSpec& kernel,
                             const EvaluationGrid& grid,
                             const BandOptions& options) {
  check_band_args(bandwidth, bbar, gamma);
  const std::size_t n = series.size();
  const std::size_t m = grid.size();
  const double cover_radius = std::max(bbar * kernel.support_radius(),
                                       bandwidth) +
                              2.0 / static_cast<double>(n);
  JackknifeParts parts =
      assemble_jackknife(series, alpha, bandwidth, bbar, kernel, grid,
                         cover_radius, options.solver);
  const double phi_star = kernel_phi(jackknife_kernel(kernel));
  const double z = normal_quantile(1.0 - gamma / 2.0);

  PointwiseBand band;
  band.center = std::move(parts.center);
  band.nominal = gamma;
  band.first_bandwidth = bandwidth;
  band.lower.assign(m, kNan);
  band.upper.assign(m, kNan);
  band.flags.assign(m, 0u);
  band.plugins.sigma_sq.assign(m, kNan);
  band.plugins.density.assign(m, kNan);
  band.plugins.m_n.assign(m, 0);
  band.plugins.h_n.assign(m, kNan);
  band.plugins.qhat.assign(m, kNan);
  band.plugins.slope.assign(m, kNan);
  band.plugins.flags.assign(m, 0u);

  parallel_for(m, [&](std::size_t k) {
    const double t = grid[k];
    unsigned flags = band.center.flags[k];
    if (t < bandwidth || t > 1.0 - bandwidth) {
      // The band's asymptotics hold on [b, 1-b] only.
      band.flags[k] = flags | kFlagMissing | kFlagBoundary;
      band.plugins.flags[k] = band.flags[k];
      return;
    }
    if (!band.center.valid_at(k)) {
      band.flags[k] = flags | kFlagMissing;
      band.plugins.flags[k] = band.flags[k];
      return;
    }
    const LocalNeighborhood nb = neighborhood(n, t, bandwidth);
    const std::size_t m_n = block_length_for(nb.size(), options.lambda_star);
    band.plugins.m_n[k] = m_n;

    double sigma_sq;
    try {
      sigma_sq =
          long_run_variance(series, alpha, parts.raw_b, t, bandwidth, m_n);
    } catch (const InsufficientDataError&) {
      sigma_sq = 0;
    }
    if (!(sigma_sq > options.sigma_floor)) {
      sigma_sq = options.sigma_floor;
      flags |= kFlagSigmaFloor;
    }
    band.plugins.sigma_sq[k] = sigma_sq;

    QuantileFit at_t;
    try {
      at_t = fit_local_linear(series, t, alpha, bandwidth, kernel,
                              options.solver);
    } catch (const InsufficientDataError&) {
      band.flags[k] = flags | kFlagMissing;
      band.plugins.flags[k] = band.flags[k];
      return;
    }
    band.plugins.qhat[k] = at_t.value;
    band.plugins.slope[k] = at_t.slope;

    const WindowScale ws = window_scale(series, nb, options.c_star_scale);
    double density = 0;
    if (ws.c_star > 0) {
      const double h =
          ws.c_star * std::pow(static_cast<double>(nb.size()), -0.2);
      band.plugins.h_n[k] = h;
      density = density_at_quantile(series, t, bandwidth, at_t.value, h, kernel);
    }
    if (!(density > options.density_floor)) {
      density = options.density_floor;
      flags |= kFlagDensityFloor;
    }
    band.plugins.density[k] = density;

    const double half = z * std::sqrt(phi_star * sigma_sq) /
                        (density * std::sqrt(static_cast<double>(n) * bandwidth));
    band.lower[k] = band.center.values[k] - half;
    band.upper[k] = band.center.values[k] + half;
    band.flags[k] = flags;
    band.plugins.flags[k] = flags;
  });
  return band;
}

PointwiseBand iqr_band(const UnitTimeSeries& series, double bandwidth25,
                       double bandwidth75, double bbar, double gamma,
                       const KernelSpec& kernel, const EvaluationGrid& grid,
                       const BandOptions& options) {
  check_band_args(bandwidth25, bbar, gamma);
  check_band_args(bandwidth75, bbar, gamma);
  const std::size_t n = series.size();
  const std::size_t m = grid.size();
  const double b_eff = std::min(bandwidth25, bandwidth75);
  const double b_max = std::max(bandwidth25, bandwidth75);
  const double cover_radius =
      std::max(bbar * kernel.support_radius(), b_max) +
      2.0 / static_cast<double>(n);
  JackknifeParts p25 = assemble_jackknife(series, 0.25, bandwidth25, bbar,
                                          kernel, grid, cover_radius,
                                          options.solver);
  JackknifeParts p75 = assemble_jackknife(series, 0.75, bandwidth75, bbar,
                                          kernel, grid, cover_radius,
                                          options.solver);
  const double phi_star = kernel_phi(jackknife_kernel(kernel));
  const double z = normal_quantile(1.0 - gamma / 2.0);

  PointwiseBand band;
  band.nominal = gamma;
  band.first_bandwidth = b_eff;
  band.center.alpha = kNan;  // IQR, not a single quantile level
  band.center.bandwidth = b_eff;
  band.center.second_bandwidth = bbar;
  band.center.stage = CurveStage::jackknifed;
  band.center.grid = grid;
  band.center.values.assign(m, kNan);
  band.center.flags.assign(m, 0u);
  band.lower.assign(m, kNan);
  band.upper.assign(m, kNan);
  band.flags.assign(m, 0u);
  band.plugins.sigma_sq.assign(m, kNan);
  band.plugins.density.assign(m, kNan);
  band.plugins.m_n.assign(m, 0);
  band.plugins.h_n.assign(m, kNan);
  band.plugins.qhat.assign(m, kNan);
  band.plugins.slope.assign(m, kNan);
  band.plugins.flags.assign(m, 0u);

  parallel_for(m, [&](std::size_t k) {
    const double t = grid[k];
    unsigned flags = p25.center.flags[k] | p75.center.flags[k];
    if (!p25.center.valid_at(k) || !p75.center.valid_at(k)) {
      band.center.flags[k] = flags | kFlagMissing;
      band.flags[k] = band.center.flags[k];
      band.plugins.flags[k] = band.flags[k];
      return;
    }
    double center = p75.center.values[k] - p25.center.values[k];
    if (center < 0) {
      center = 0;
      flags |= kFlagCrossing;
    }
    band.center.values[k] = center;
    band.center.flags[k] = flags;
    if (t < b_max || t > 1.0 - b_max) {
      band.flags[k] = flags | kFlagMissing | kFlagBoundary;
      band.plugins.flags[k] = band.flags[k];
      return;
    }

    const LocalNeighborhood nb = neighborhood(n, t, b_eff);
    const std::size_t m_n = block_length_for(nb.size(), options.lambda_star);
    band.plugins.m_n[k] = m_n;

    // Densities at the two quartiles, from raw fits at t.
    QuantileFit fit25, fit75;
    try {
      fit25 = fit_local_linear(series, t, 0.25, bandwidth25, kernel,
                               options.solver);
      fit75 = fit_local_linear(series, t, 0.75, bandwidth75, kernel,
                               options.solver);
    } catch (const InsufficientDataError&) {
      band.flags[k] = flags | kFlagMissing;
      band.plugins.flags[k] = band.flags[k];
      return;
    }
    band.plugins.qhat[k] = fit75.value - fit25.value;

    const WindowScale ws = window_scale(series, nb, options.c_star_scale);
    double f25 = 0, f75 = 0;
    if (ws.c_star > 0) {
      const double h =
          ws.c_star * std::pow(static_cast<double>(nb.size()), -0.2);
      band.plugins.h_n[k] = h;
      f25 = density_at_quantile(series, t, b_eff, fit25.value, h, kernel);
      f75 = density_at_quantile(series, t, b_eff, fit75.value, h, kernel);
    }
    if (!(f25 > options.density_floor)) {
      f25 = options.density_floor;
      flags |= kFlagDensityFloor;
    }
    if (!(f75 > options.density_floor)) {
      f75 = options.density_floor;
      flags |= kFlagDensityFloor;
    }

    // Score sequence whose block variance targets sigma_IQR^2.
    static thread_local std::vector<double> w;
    w.clear();
    bool gap = false;
    for (std::size_t i = nb.s; i <= nb.l; ++i) {
      bool ok25 = false, ok75 = false;
      const double q25 = raw_value_at_index(p25.raw_b, n, i, ok25);
      const double q75 = raw_value_at_index(p75.raw_b, n, i, ok75);
      if (!ok25 || !ok75) {
        gap = true;
        continue;
      }
      const double x = series.values[i - 1];
      w.push_back(psi(0.75, x - q75) / f75 - psi(0.25, x - q25) / f25);
    }
    double sigma_sq = 0;
    if (!gap && w.size() > m_n) sigma_sq = block_long_run_variance(w, m_n);
    if (!(sigma_sq > options.sigma_floor)) {
      sigma_sq = options.sigma_floor;
      flags |= kFlagSigmaFloor;
    }
    band.plugins.sigma_sq[k] = sigma_sq;

    const double half = z * std::sqrt(phi_star * sigma_sq) /
                        std::sqrt(static_cast<double>(n) * b_eff);
    band.lower[k] = center - half;
    band.upper[k] = center + half;
    band.center.flags[k] = flags;
    band.flags[k] = flags;
    band.plugins.flags[k] = flags;
  });
  return band;
}

std::string band_to_csv(const PointwiseBand& band) {
  std::ostringstream os;
  os << "t,center,lower,upper,sigma_sq,density,flags\n";
  for (std::size_t k = 0; k < band.center.grid.size(); ++k) {
    os << format_double(band.center.grid[k]) << ','
       << format_double(band.center.values[k]) << ','
       << format_double(band.lower[k]) << ',' << format_double(band.upper[k])
       << ',' << format_double(band.plugins.sigma_sq[k]) << ','
       << format_double(band.plugins.density[k]) << ','
       << flags_to_string(band.flags[k]) << '\n';
  }
  return os.str();
}

nlohmann::json band_to_json(const PointwiseBand& band) {
  nlohmann::json j;
  if (std::isfinite(band.center.alpha)) j["alpha"] = band.center.alpha;
  j["gamma"] = band.nominal;
  j["bandwidth"] = band.first_bandwidth;
  j["second_bandwidth"] = band.center.second_bandwidth;
  nlohmann::json pts = nlohmann::json::array();
  for (std::size_t k = 0; k < band.center.grid.size(); ++k) {
    nlohmann::json p;
    p["t"] = band.center.grid[k];
    if (std::isfinite(band.center.values[k])) {
      p["center"] = band.center.values[k];
      if (std::isfinite(band.lower[k])) {
        p["lower"] = band.lower[k];
        p["upper"] = band.upper[k];
        p["sigma_sq"] = band.plugins.sigma_sq[k];
        p["density"] = band.plugins.density[k];
      }
    }
    if (band.flags[k]) p["flags"] = flags_to_string(band.flags[k]);
    pts.push_back(std::move(p));
  }
  j["points"] = std::move(pts);
  return j;
}

}  // namespace nsquant
