#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "nsquant/kernel.hpp"
#include "nsquant/series.hpp"
#include "nsquant/solver.hpp"

#include <nlohmann/json_fwd.hpp>

namespace nsquant {

// Strictly increasing evaluation points in [0, 1].
struct EvaluationGrid {
  std::vector<double> points;

  std::size_t size() const { return points.size(); }
  double operator[](std::size_t k) const { return points[k]; }

  static EvaluationGrid full(std::size_t n);       // {1/n, ..., n/n}
  static EvaluationGrid uniform(std::size_t m);    // m points spanning [0, 1]
  static EvaluationGrid default_for(std::size_t n);
  static EvaluationGrid from(std::vector<double> points);  // validates
};

// Contiguous subset {i/n : lo <= i <= hi} of the observation grid covering
// every target point's radius-neighborhood.  Pipelines build their raw curves
// on this grid; public so tests can reproduce pipeline internals exactly.
EvaluationGrid raw_cover_grid(std::size_t n, const EvaluationGrid& targets,
                              double radius);

enum class CurveStage { raw, smoothed, jackknifed };

std::string to_string(CurveStage stage);

struct QuantileCurve {
  double alpha = 0.5;
  double bandwidth = 0;         // first-stage bandwidth b
  double second_bandwidth = 0;  // bbar (0 for raw curves)
  CurveStage stage = CurveStage::raw;
  EvaluationGrid grid;
  std::vector<double> values;
  std::vector<double> slopes;  // raw curves only, empty otherwise
  std::vector<unsigned> flags;

  bool valid_at(std::size_t k) const;
};

// Pointwise local linear fits over the grid.  Grid points whose window holds
// fewer than 2 observations are marked missing rather than failing the curve.
QuantileCurve estimate_raw_curve(const UnitTimeSeries& series, double alpha,
                                 double bandwidth, const KernelSpec& kernel,
                                 const EvaluationGrid& grid,
                                 const SolverOptions& options = {});

// Same, with a per-grid-point bandwidth profile (local bandwidth selection).
QuantileCurve estimate_raw_curve(const UnitTimeSeries& series, double alpha,
                                 const std::vector<double>& bandwidths,
                                 const KernelSpec& kernel,
                                 const EvaluationGrid& grid,
                                 const SolverOptions& options = {});

// Second-stage local linear kernel smoothing of a (raw) curve: weights
//   w(t, i) = K_bbar(t - t_i) [B2(t) - (t - t_i) B1(t)] / (B2 B0 - B1^2),
//   B_j(t) = sum_i (t - t_i)^j K_bbar(t - t_i),
// evaluated on the curve's own grid or on an explicit target grid.  Points
// where the denominator degenerates are marked missing.
QuantileCurve second_stage_smooth(const QuantileCurve& raw, double bbar,
                                  const KernelSpec& kernel);
QuantileCurve second_stage_smooth(const QuantileCurve& raw, double bbar,
                                  const KernelSpec& kernel,
                                  const EvaluationGrid& target);

// Jackknife bias reduction: 2 * smooth(raw_b) - smooth(raw_{sqrt2 b}), both
// smoothed with the same bbar.  Evaluates on `target`; raw curves are built
// internally on raw_cover_grid.
QuantileCurve jackknife_curve(const UnitTimeSeries& series, double alpha,
                              double bandwidth, double bbar,
                              const KernelSpec& kernel,
                              const EvaluationGrid& target,
                              const SolverOptions& options = {});

struct IqrCurve {
  EvaluationGrid grid;
  std::vector<double> values;  // q75 - q25, clamped at 0 with a crossing flag
  std::vector<unsigned> flags;
  QuantileCurve q25;  // jackknifed component curves on the same grid
  QuantileCurve q75;
};

IqrCurve iqr_curve(const UnitTimeSeries& series, double bandwidth25,
                   double bandwidth75, double bbar, const KernelSpec& kernel,
                   const EvaluationGrid& target,
                   const SolverOptions& options = {});

std::string curve_to_csv(const QuantileCurve& curve);
nlohmann::json curve_to_json(const QuantileCurve& curve);

}  // namespace nsquant
