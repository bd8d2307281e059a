#include "nsquant/curvefit.hpp"

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

#include <nlohmann/json.hpp>

namespace nsquant {

namespace {
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

void validate_grid(const std::vector<double>& pts) {
  if (pts.empty()) throw ValidationError("evaluation grid must be nonempty");
  double prev = -1.0;
  for (double p : pts) {
    if (!(p >= 0.0 && p <= 1.0))
      throw ValidationError("evaluation grid point " + std::to_string(p) +
                            " outside [0, 1]");
    if (!(p > prev))
      throw ValidationError("evaluation grid must be strictly increasing");
    prev = p;
  }
}
}  // namespace

EvaluationGrid EvaluationGrid::full(std::size_t n) {
  if (n == 0) throw ValidationError("grid needs n >= 1");
  EvaluationGrid g;
  g.points.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    g.points[i] = static_cast<double>(i + 1) / static_cast<double>(n);
  return g;
}

EvaluationGrid EvaluationGrid::uniform(std::size_t m) {
  if (m == 0) throw ValidationError("grid needs m >= 1");
  EvaluationGrid g;
  g.points.resize(m);
  if (m == 1) {
    g.points[0] = 0.5;
    return g;
  }
  for (std::size_t i = 0; i < m; ++i)
    g.points[i] = static_cast<double>(i) / static_cast<double>(m - 1);
  return g;
}

EvaluationGrid EvaluationGrid::default_for(std::size_t n) {
  return n <= 5000 ? full(n) : uniform(1000);
}

EvaluationGrid EvaluationGrid::from(std::vector<double> points) {
  validate_grid(points);
  EvaluationGrid g;
  g.points = std::move(points);
  return g;
}

EvaluationGrid raw_cover_grid(std::size_t n, const EvaluationGrid& targets,
                              double radius) {
  if (targets.size() == 0) throw ValidationError("cover grid: empty targets");
  const double nd = static_cast<double>(n);
  const double tmin = targets.points.front(), tmax = targets.points.back();
  auto lo = floor_index(nd * (tmin - radius));
  auto hi = floor_index(nd * (tmax + radius)) + 1;
  lo = std::max(lo, 1LL);
  hi = std::min(hi, static_cast<long long>(n));
  EvaluationGrid g;
  for (long long i = lo; i <= hi; ++i)
    g.points.push_back(static_cast<double>(i) / nd);
  return g;
}

std::string to_string(CurveStage stage) {
  switch (stage) {
    case CurveStage::raw:
      return "raw";
    case CurveStage::smoothed:
      return "smoothed";
    case CurveStage::jackknifed:
      return "jackknifed";
  }
  return "unknown";
}

bool QuantileCurve::valid_at(std::size_t k) const {
  return k < values.size() && !(flags[k] & kFlagMissing) &&
         std::isfinite(values[k]);
}

namespace {

QuantileCurve raw_curve_impl(const UnitTimeSeries& series, double alpha,
                             const std::vector<double>& bandwidths,
                             const KernelSpec& kernel,
                             const EvaluationGrid& grid,
                             const SolverOptions& options) {
  QuantileCurve curve;
  curve.alpha = alpha;
  curve.bandwidth = bandwidths.size() == 1 ? bandwidths[0] : 0;
  curve.second_bandwidth = 0;
  curve.stage = CurveStage::raw;
  curve.grid = grid;
  const std::size_t m = grid.size();
  curve.values.assign(m, kNan);
  curve.slopes.assign(m, kNan);
  curve.flags.assign(m, 0u);

  const double r = kernel.support_radius();
  parallel_for(m, [&](std::size_t k) {
    const double t = grid[k];
    const double b = bandwidths.size() == 1 ? bandwidths[0] : bandwidths[k];
    unsigned flags = 0;
    if (t < b * r || t > 1.0 - b * r) flags |= kFlagBoundary;
    try {
      QuantileFit fit =
          fit_local_linear(series, t, alpha, b, kernel, options);
      curve.values[k] = fit.value;
      curve.slopes[k] = fit.slope;
      curve.flags[k] = flags | fit.flags;
    } catch (const InsufficientDataError&) {
      curve.flags[k] = flags | kFlagMissing;
    }
  });
  return curve;
}

// Raw curves are a primitive: any bandwidth the pointwise fitter accepts is
// allowed, including the sqrt(2)-inflated ones the jackknife builds
// internally.  Pipeline entry points impose their own (0, 0.5] policy.
void check_curve_bandwidth(double b) {
  if (!(b > 0 && b < 1))
    throw ValidationError("curve bandwidth must lie in (0, 1), got " +
                          std::to_string(b));
}

void check_pipeline_bandwidth(double b) {
  if (!(b > 0 && b <= 0.5))
    throw ValidationError("first-stage bandwidth must lie in (0, 0.5], got " +
                          std::to_string(b));
}

}  // namespace

QuantileCurve estimate_raw_curve(const UnitTimeSeries& series, double alpha,
                                 double bandwidth, const KernelSpec& kernel,
                                 const EvaluationGrid& grid,
                                 const SolverOptions& options) {
  check_curve_bandwidth(bandwidth);
  return raw_curve_impl(series, alpha, {bandwidth}, kernel, grid, options);
}

QuantileCurve estimate_raw_curve(const UnitTimeSeries& series, double alpha,
                                 const std::vector<double>& bandwidths,
                                 const KernelSpec& kernel,
                                 const EvaluationGrid& grid,
                                 const SolverOptions& options) {
  if (bandwidths.size() != grid.size())
    throw ValidationError("bandwidth profile length must match the grid");
  for (double b : bandwidths) check_curve_bandwidth(b);
  QuantileCurve curve =
      raw_curve_impl(series, alpha, bandwidths, kernel, grid, options);
  if (grid.size() > 1) curve.bandwidth = 0;  // no single bandwidth applies
  return curve;
}

QuantileCurve second_stage_smooth(const QuantileCurve& raw, double bbar,
                                  const KernelSpec& kernel,
                                  const EvaluationGrid& target) {
  if (raw.stage != CurveStage::raw)
    throw ValidationError("second-stage smoothing expects a raw curve");
  if (!(bbar > 0 && bbar < 1))
    throw ValidationError("second-stage bandwidth must lie in (0, 1)");

  QuantileCurve out;
  out.alpha = raw.alpha;
  out.bandwidth = raw.bandwidth;
  out.second_bandwidth = bbar;
  out.stage = CurveStage::smoothed;
  out.grid = target;
  const std::size_t m = target.size();
  out.values.assign(m, kNan);
  out.flags.assign(m, 0u);

  const double r = kernel.support_radius();
  parallel_for(m, [&](std::size_t k) {
    const double t = target[k];
    // B_j(t) = sum_i (t - t_i)^j K_bbar(t - t_i) over valid raw points.
    double b0 = 0, b1 = 0, b2 = 0;
    for (std::size_t i = 0; i < raw.grid.size(); ++i) {
      if (!raw.valid_at(i)) continue;
      const double d = t - raw.grid[i];
      if (std::abs(d) >= bbar * r) continue;
      const double kb = kernel(d / bbar) / bbar;
      b0 += kb;
      b1 += d * kb;
      b2 += d * d * kb;
    }
    const double den = b2 * b0 - b1 * b1;
    if (!(den > 1e-14)) {
      out.flags[k] = kFlagMissing | kFlagDegenerateDesign;
      return;
    }
    double acc = 0;
    for (std::size_t i = 0; i < raw.grid.size(); ++i) {
      if (!raw.valid_at(i)) continue;
      const double d = t - raw.grid[i];
      if (std::abs(d) >= bbar * r) continue;
      const double kb = kernel(d / bbar) / bbar;
      acc += raw.values[i] * kb * (b2 - d * b1) / den;
    }
    out.values[k] = acc;
    if (t < bbar * r || t > 1.0 - bbar * r) out.flags[k] |= kFlagBoundary;
  });
  return out;
}

QuantileCurve second_stage_smooth(const QuantileCurve& raw, double bbar,
                                  const KernelSpec& kernel) {
  return second_stage_smooth(raw, bbar, kernel, raw.grid);
}

QuantileCurve jackknife_curve(const UnitTimeSeries& series, double alpha,
                              double bandwidth, double bbar,
                              const KernelSpec& kernel,
                              const EvaluationGrid& target,
                              const SolverOptions& options) {
  check_pipeline_bandwidth(bandwidth);
  const double b2 = bandwidth * std::sqrt(2.0);
  const double cover_radius =
      bbar * kernel.support_radius() + 2.0 / static_cast<double>(series.size());
  const EvaluationGrid cover =
      raw_cover_grid(series.size(), target, cover_radius);

  const QuantileCurve raw_b =
      raw_curve_impl(series, alpha, {bandwidth}, kernel, cover, options);
  const QuantileCurve raw_b2 =
      raw_curve_impl(series, alpha, {b2}, kernel, cover, options);
  const QuantileCurve sm_b = second_stage_smooth(raw_b, bbar, kernel, target);
  const QuantileCurve sm_b2 = second_stage_smooth(raw_b2, bbar, kernel, target);

  QuantileCurve out;
  out.alpha = alpha;
  out.bandwidth = bandwidth;
  out.second_bandwidth = bbar;
  out.stage = CurveStage::jackknifed;
  out.grid = target;
  const std::size_t m = target.size();
  out.values.assign(m, kNan);
  out.flags.assign(m, 0u);
  for (std::size_t k = 0; k < m; ++k) {
    out.flags[k] = sm_b.flags[k] | sm_b2.flags[k];
    if (!sm_b.valid_at(k) || !sm_b2.valid_at(k)) {
      out.flags[k] |= kFlagMissing;
      continue;
    }
    out.values[k] = 2.0 * sm_b.values[k] - sm_b2.values[k];
  }
  return out;
}

IqrCurve iqr_curve(const UnitTimeSeries& series, double bandwidth25,
                   double bandwidth75, double bbar, const KernelSpec& kernel,
                   const EvaluationGrid& target, const SolverOptions& options) {
  IqrCurve out;
  out.q25 = jackknife_curve(series, 0.25, bandwidth25, bbar, kernel, target,
                            options);
  out.q75 = jackknife_curve(series, 0.75, bandwidth75, bbar, kernel, target,
                            options);
  out.grid = target;
  const std::size_t m = target.size();
  out.values.assign(m, kNan);
  out.flags.assign(m, 0u);
  for (std::size_t k = 0; k < m; ++k) {
    out.flags[k] = out.q25.flags[k] | out.q75.flags[k];
    if (!out.q25.valid_at(k) || !out.q75.valid_at(k)) {
      out.flags[k] |= kFlagMissing;
      continue;
    }
    double v = out.q75.values[k] - out.q25.values[k];
    if (v < 0) {
      out.flags[k] |= kFlagCrossing;
      v = 0;
    }
    out.values[k] = v;
  }
  return out;
}

std::string curve_to_csv(const QuantileCurve& curve) {
  std::ostringstream os;
  os << "t,value,slope,stage,alpha,bandwidth\n";
  const std::string stage = to_string(curve.stage);
  for (std::size_t k = 0; k < curve.grid.size(); ++k) {
    os << format_double(curve.grid[k]) << ',' << format_double(curve.values[k])
       << ',';
    if (k < curve.slopes.size() && curve.stage == CurveStage::raw)
      os << format_double(curve.slopes[k]);
    os << ',' << stage << ',' << format_double(curve.alpha) << ','
       << format_double(curve.bandwidth) << '\n';
  }
  return os.str();
}

nlohmann::json curve_to_json(const QuantileCurve& curve) {
  nlohmann::json j;
  j["alpha"] = curve.alpha;
  j["bandwidth"] = curve.bandwidth;
  j["second_bandwidth"] = curve.second_bandwidth;
  j["stage"] = to_string(curve.stage);
  nlohmann::json pts = nlohmann::json::array();
  for (std::size_t k = 0; k < curve.grid.size(); ++k) {
    nlohmann::json p;
    p["t"] = curve.grid[k];
    if (std::isfinite(curve.values[k])) p["value"] = curve.values[k];
    if (curve.stage == CurveStage::raw && k < curve.slopes.size() &&
        std::isfinite(curve.slopes[k]))
      p["slope"] = curve.slopes[k];
    if (curve.flags[k]) p["flags"] = flags_to_string(curve.flags[k]);
    pts.push_back(std::move(p));
  }
  j["points"] = std::move(pts);
  return j;
}

}  // namespace nsquant
