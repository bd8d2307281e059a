#include "nsquant/experiments.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "nsquant/bandwidth.hpp"
#include "nsquant/csvio.hpp"
#include "nsquant/errors.hpp"
#include "nsquant/inference.hpp"
#include "nsquant/mathutil.hpp"
#include "nsquant/solver.hpp"

#include <nlohmann/json.hpp>

namespace nsquant {

BandwidthMode bandwidth_mode_from(const std::string& name) {
  if (name == "auto-static") return BandwidthMode::auto_static;
  if (name == "auto-local") return BandwidthMode::auto_local;
  if (name == "fixed") return BandwidthMode::fixed;
  throw ValidationError("unknown bandwidth mode '" + name +
                        "' (expected auto-static, auto-local or fixed)");
}

std::string to_string(BandwidthMode mode) {
  switch (mode) {
    case BandwidthMode::auto_static:
      return "auto-static";
    case BandwidthMode::auto_local:
      return "auto-local";
    case BandwidthMode::fixed:
      return "fixed";
  }
  return "unknown";
}

ExperimentSpec ExperimentSpec::from_json(const nlohmann::json& j) {
  ExperimentSpec spec;
  spec.process = ProcessSpec::from_json(j.at("process"));
  spec.n = j.at("n").get<std::size_t>();
  spec.alpha = j.at("alpha").get<double>();
  spec.gamma = j.value("gamma", 0.05);
  spec.replications = j.at("replications").get<std::size_t>();
  spec.test_points = j.at("test_points").get<std::vector<double>>();
  spec.seed = j.value("seed", std::uint64_t{1});
  if (j.contains("bandwidth_mode"))
    spec.bandwidth_mode = bandwidth_mode_from(j["bandwidth_mode"]);
  spec.fixed_bandwidth = j.value("bandwidth", 0.1);
  spec.second_bandwidth_factor = j.value("second_bandwidth_factor", 0.5);
  spec.oracle_draws = j.value("oracle_draws", std::size_t{100000});
  if (spec.replications < 1)
    throw ValidationError("experiment needs replications >= 1");
  if (spec.test_points.empty())
    throw ValidationError("experiment needs at least one test point");
  return spec;
}

namespace {

double oracle_at(const ProcessSpec& process, double t, double alpha,
                 std::size_t draws, std::uint64_t seed) {
  if (const auto* lin = std::get_if<LsLinearSpec>(&process.process)) {
    if (lin->innovation.kind == Innovation::Kind::normal)
      return oracle_quantile_linear_gaussian(*lin, t, alpha);
  }
  return oracle_quantile_mc(process, t, alpha, draws, seed).value;
}

}  // namespace

CoverageReport coverage_study(const ExperimentSpec& spec) {
  const KernelSpec kernel = KernelSpec::epanechnikov();
  const EvaluationGrid grid = EvaluationGrid::from(spec.test_points);
  const std::size_t npts = grid.size();

  CoverageReport report;
  report.test_points = spec.test_points;
  report.oracle.resize(npts);
  for (std::size_t k = 0; k < npts; ++k)
    report.oracle[k] = oracle_at(spec.process, grid[k], spec.alpha,
                                 spec.oracle_draws, mix_seed(spec.seed, 1u << 20));
  report.covered.assign(npts, 0);
  report.evaluated.assign(npts, 0);
  report.mean_width.assign(npts, 0.0);
  report.coverage.assign(npts, 0.0);
  report.replications = spec.replications;

  for (std::size_t r = 0; r < spec.replications; ++r) {
    try {
      const UnitTimeSeries series =
          generate(spec.process, spec.n, mix_seed(spec.seed, r));
      double b = spec.fixed_bandwidth;
      if (spec.bandwidth_mode != BandwidthMode::fixed)
        b = select_bandwidth(series, spec.alpha, kernel).b_star;
      const double bbar = spec.second_bandwidth_factor * b;
      const PointwiseBand band = pointwise_band(
          series, spec.alpha, b, bbar, spec.gamma, kernel, grid);
      for (std::size_t k = 0; k < npts; ++k) {
        if (!std::isfinite(band.lower[k]) || !std::isfinite(band.upper[k]))
          continue;
        ++report.evaluated[k];
        report.mean_width[k] += band.upper[k] - band.lower[k];
        if (report.oracle[k] >= band.lower[k] &&
            report.oracle[k] <= band.upper[k])
          ++report.covered[k];
      }
    } catch (const Error&) {
      ++report.failures;
    }
  }
  for (std::size_t k = 0; k < npts; ++k) {
    if (report.evaluated[k] > 0) {
      report.coverage[k] = static_cast<double>(report.covered[k]) /
                           static_cast<double>(report.evaluated[k]);
      report.mean_width[k] /= static_cast<double>(report.evaluated[k]);
    }
  }
  return report;
}

std::string CoverageReport::to_csv() const {
  std::ostringstream os;
  os << "t,oracle,coverage,mean_width,covered,evaluated\n";
  for (std::size_t k = 0; k < test_points.size(); ++k) {
    os << format_double(test_points[k]) << ',' << format_double(oracle[k])
       << ',' << format_double(coverage[k]) << ','
       << format_double(mean_width[k]) << ',' << covered[k] << ','
       << evaluated[k] << '\n';
  }
  return os.str();
}

nlohmann::json CoverageReport::to_json() const {
  nlohmann::json j;
  j["replications"] = replications;
  j["failures"] = failures;
  nlohmann::json pts = nlohmann::json::array();
  for (std::size_t k = 0; k < test_points.size(); ++k) {
    nlohmann::json p;
    p["t"] = test_points[k];
    p["oracle"] = oracle[k];
    p["coverage"] = coverage[k];
    p["mean_width"] = mean_width[k];
    p["covered"] = covered[k];
    p["evaluated"] = evaluated[k];
    pts.push_back(std::move(p));
  }
  j["points"] = std::move(pts);
  return j;
}

BoundaryReport boundary_experiment(const ProcessSpec& process, double alpha,
                                   std::size_t n, std::size_t replications,
                                   double bandwidth, std::uint64_t seed) {
  const KernelSpec kernel = KernelSpec::epanechnikov();
  const double oracle =
      oracle_at(process, 0.0, alpha, 200000, mix_seed(seed, 1u << 21));
  double sse_lin = 0, sse_con = 0;
  for (std::size_t r = 0; r < replications; ++r) {
    const UnitTimeSeries series = generate(process, n, mix_seed(seed, r));
    const double lin =
        fit_local_linear(series, 0.0, alpha, bandwidth, kernel).value;
    const double con =
        fit_local_constant(series, 0.0, alpha, bandwidth, kernel).value;
    sse_lin += (lin - oracle) * (lin - oracle);
    sse_con += (con - oracle) * (con - oracle);
  }
  BoundaryReport report;
  report.replications = replications;
  report.rmse_linear = std::sqrt(sse_lin / static_cast<double>(replications));
  report.rmse_constant = std::sqrt(sse_con / static_cast<double>(replications));
  report.ratio = report.rmse_linear / report.rmse_constant;
  return report;
}

nlohmann::json BoundaryReport::to_json() const {
  nlohmann::json j;
  j["rmse_local_linear"] = rmse_linear;
  j["rmse_local_constant"] = rmse_constant;
  j["ratio"] = ratio;
  j["replications"] = replications;
  return j;
}

BiasReport bias_experiment(const ProcessSpec& process, double alpha,
                           std::size_t n, std::size_t replications,
                           double bandwidth, double bbar, double t,
                           std::uint64_t seed) {
  const KernelSpec kernel = KernelSpec::epanechnikov();
  const double oracle =
      oracle_at(process, t, alpha, 200000, mix_seed(seed, 1u << 21));
  const EvaluationGrid target = EvaluationGrid::from({t});
  const double cover_radius =
      bbar * kernel.support_radius() + 2.0 / static_cast<double>(n);

  double sum_two = 0, sum_jack = 0, ss_two = 0, ss_jack = 0;
  for (std::size_t r = 0; r < replications; ++r) {
    const UnitTimeSeries series = generate(process, n, mix_seed(seed, r));
    const EvaluationGrid cover = raw_cover_grid(n, target, cover_radius);
    const QuantileCurve raw_b =
        estimate_raw_curve(series, alpha, bandwidth, kernel, cover);
    const QuantileCurve raw_b2 = estimate_raw_curve(
        series, alpha, bandwidth * std::sqrt(2.0), kernel, cover);
    const QuantileCurve sm_b = second_stage_smooth(raw_b, bbar, kernel, target);
    const QuantileCurve sm_b2 =
        second_stage_smooth(raw_b2, bbar, kernel, target);
    if (!sm_b.valid_at(0) || !sm_b2.valid_at(0))
      throw NumericError("bias experiment: smoothing failed at t");
    const double two_stage = sm_b.values[0];
    const double jack = 2.0 * sm_b.values[0] - sm_b2.values[0];
    const double e_two = two_stage - oracle;
    const double e_jack = jack - oracle;
    sum_two += e_two;
    sum_jack += e_jack;
    ss_two += e_two * e_two;
    ss_jack += e_jack * e_jack;
  }
  const auto R = static_cast<double>(replications);
  BiasReport report;
  report.replications = replications;
  report.mean_bias_two_stage = sum_two / R;
  report.mean_bias_jackknife = sum_jack / R;
  if (replications > 1) {
    report.se_two_stage = std::sqrt(
        (ss_two / R - report.mean_bias_two_stage * report.mean_bias_two_stage) /
        (R - 1));
    report.se_jackknife = std::sqrt(
        (ss_jack / R -
         report.mean_bias_jackknife * report.mean_bias_jackknife) /
        (R - 1));
  }
  return report;
}

nlohmann::json BiasReport::to_json() const {
  nlohmann::json j;
  j["mean_bias_two_stage"] = mean_bias_two_stage;
  j["mean_bias_jackknife"] = mean_bias_jackknife;
  j["se_two_stage"] = se_two_stage;
  j["se_jackknife"] = se_jackknife;
  j["replications"] = replications;
  return j;
}

}  // namespace nsquant
