// nsquant: time-varying quantile curves for locally stationary series.
// Subcommands cover the estimation pipeline (fit, iqr, bandwidth), data prep
// (deseasonalize), and simulation harnesses (simulate, coverage, boundary).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "nsquant/bandwidth.hpp"
#include "nsquant/csvio.hpp"
#include "nsquant/curvefit.hpp"
#include "nsquant/errors.hpp"
#include "nsquant/experiments.hpp"
#include "nsquant/flags.hpp"
#include "nsquant/inference.hpp"
#include "nsquant/kernel.hpp"
#include "nsquant/procsim.hpp"
#include "nsquant/series.hpp"

namespace fs = std::filesystem;
using nsquant::BandwidthMode;
using nsquant::Error;
using nsquant::ParseError;
using nsquant::ValidationError;

namespace {

struct RunConfig {
  std::vector<double> levels{0.05, 0.25, 0.5, 0.75, 0.95};
  double gamma = 0.05;
  BandwidthMode mode = BandwidthMode::auto_static;
  double bandwidth = 0.1;        // used when mode == fixed
  double second_bandwidth = 0;   // 0: half the first-stage bandwidth
  std::string kernel_name = "epanechnikov";
  std::uint64_t seed = 1;
  std::string output_dir = ".";
  std::size_t period = 12;
};

// Flag values shared by the estimation subcommands; presence is checked on the
// parsed subcommand so flags override the config file only when given.
struct Overrides {
  std::string input;
  std::string config;
  std::string output_dir;
  std::string mode;
  std::string kernel;
  std::vector<double> alphas;
  double bandwidth = 0;
  double second_bandwidth = 0;
  double gamma = 0;
  std::uint64_t seed = 0;
  std::size_t period = 0;
};

nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

void load_config_file(RunConfig& cfg, const std::string& path) {
  const nlohmann::json j = load_json_file(path);
  try {
    if (j.contains("levels")) cfg.levels = j["levels"].get<std::vector<double>>();
    if (j.contains("gamma")) cfg.gamma = j["gamma"].get<double>();
    if (j.contains("bandwidth_mode"))
      cfg.mode = nsquant::bandwidth_mode_from(j["bandwidth_mode"]);
    if (j.contains("bandwidth")) cfg.bandwidth = j["bandwidth"].get<double>();
    if (j.contains("second_bandwidth"))
      cfg.second_bandwidth = j["second_bandwidth"].get<double>();
    if (j.contains("kernel")) cfg.kernel_name = j["kernel"].get<std::string>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("output_dir"))
      cfg.output_dir = j["output_dir"].get<std::string>();
    if (j.contains("period")) cfg.period = j["period"].get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

// True when the subcommand has the flag and the user passed it.
bool flag_given(const CLI::App* sub, const std::string& name) {
  const CLI::Option* opt = sub->get_option_no_throw(name);
  return opt != nullptr && opt->count() > 0;
}

void apply_overrides(const CLI::App* sub, const Overrides& ov, RunConfig& cfg) {
  if (flag_given(sub, "--alpha")) cfg.levels = ov.alphas;
  if (flag_given(sub, "--gamma")) cfg.gamma = ov.gamma;
  if (flag_given(sub, "--bandwidth-mode"))
    cfg.mode = nsquant::bandwidth_mode_from(ov.mode);
  if (flag_given(sub, "--bandwidth")) cfg.bandwidth = ov.bandwidth;
  if (flag_given(sub, "--second-bandwidth"))
    cfg.second_bandwidth = ov.second_bandwidth;
  if (flag_given(sub, "--kernel")) cfg.kernel_name = ov.kernel;
  if (flag_given(sub, "--seed")) cfg.seed = ov.seed;
  if (flag_given(sub, "--output-dir")) cfg.output_dir = ov.output_dir;
  if (flag_given(sub, "--period")) cfg.period = ov.period;
}

void validate_levels(std::vector<double>& levels) {
  if (levels.empty()) throw ValidationError("no quantile levels configured");
  std::sort(levels.begin(), levels.end());
  for (std::size_t k = 0; k < levels.size(); ++k) {
    if (!(levels[k] > 0.0 && levels[k] < 1.0))
      throw ValidationError("quantile level " +
                            nsquant::format_double(levels[k]) +
                            " outside (0, 1)");
    if (k > 0 && levels[k] == levels[k - 1])
      throw ValidationError("duplicate quantile level " +
                            nsquant::format_double(levels[k]));
  }
}

std::string level_tag(double alpha) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", alpha);
  return buf;
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw Error("write failed for '" + path.string() + "'");
  std::cout << "wrote " << path.string() << '\n';
}

// Plot-ready table, one row per grid point.
std::string band_table_csv(const nsquant::PointwiseBand& band) {
  using nsquant::format_double;
  std::ostringstream os;
  os << "t,center,lower,upper,slope,sigma_sq,density,flags\n";
  const std::size_t m = band.center.grid.size();
  for (std::size_t k = 0; k < m; ++k) {
    const double slope =
        k < band.plugins.slope.size() ? band.plugins.slope[k] : NAN;
    os << format_double(band.center.grid[k]) << ','
       << format_double(band.center.values[k]) << ','
       << format_double(band.lower[k]) << ',' << format_double(band.upper[k])
       << ',' << format_double(slope) << ','
       << format_double(band.plugins.sigma_sq[k]) << ','
       << format_double(band.plugins.density[k]) << ','
       << nsquant::flags_to_string(band.flags[k]) << '\n';
  }
  return os.str();
}

unsigned combined_flags(const std::vector<unsigned>& flags) {
  unsigned all = 0;
  for (unsigned f : flags) all |= f;
  return all;
}

double profile_quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const std::size_t k = static_cast<std::size_t>(
      q * static_cast<double>(v.size() - 1) + 0.5);
  return v[std::min(k, v.size() - 1)];
}

// Local-bandwidth fit: quantize the profile to at most 9 representative
// bandwidths, run one full band per representative, take each point's row
// from its nearest representative.  Keeps the cost at a few full-grid passes
// instead of one band call per grid point.
nsquant::PointwiseBand fit_band_local(const nsquant::UnitTimeSeries& series,
                                      double alpha, const RunConfig& cfg,
                                      const nsquant::KernelSpec& kernel,
                                      const nsquant::EvaluationGrid& grid,
                                      const nsquant::LocalBandwidthProfile&
                                          profile) {
  std::vector<double> reps;
  for (int q = 1; q <= 9; ++q)
    reps.push_back(profile_quantile(profile.b_local, 0.1 * q));
  std::sort(reps.begin(), reps.end());
  reps.erase(std::unique(reps.begin(), reps.end()), reps.end());

  std::vector<nsquant::PointwiseBand> bands;
  bands.reserve(reps.size());
  for (double b : reps) {
    const double bbar =
        cfg.second_bandwidth > 0 ? cfg.second_bandwidth : 0.5 * b;
    bands.push_back(nsquant::pointwise_band(series, alpha, b, bbar, cfg.gamma,
                                            kernel, grid));
  }

  nsquant::PointwiseBand merged = bands.front();
  merged.first_bandwidth = 0;  // varies per point
  for (std::size_t k = 0; k < grid.size(); ++k) {
    std::size_t pick = 0;
    double best = std::abs(reps[0] - profile.b_local[k]);
    for (std::size_t r = 1; r < reps.size(); ++r) {
      const double d = std::abs(reps[r] - profile.b_local[k]);
      if (d < best) {
        best = d;
        pick = r;
      }
    }
    const nsquant::PointwiseBand& src = bands[pick];
    merged.center.values[k] = src.center.values[k];
    merged.center.flags[k] = src.center.flags[k];
    merged.lower[k] = src.lower[k];
    merged.upper[k] = src.upper[k];
    merged.flags[k] = src.flags[k];
    merged.plugins.sigma_sq[k] = src.plugins.sigma_sq[k];
    merged.plugins.density[k] = src.plugins.density[k];
    merged.plugins.m_n[k] = src.plugins.m_n[k];
    merged.plugins.h_n[k] = src.plugins.h_n[k];
    merged.plugins.qhat[k] = src.plugins.qhat[k];
    merged.plugins.slope[k] = src.plugins.slope[k];
    merged.plugins.flags[k] = src.plugins.flags[k];
  }
  return merged;
}

int run_fit(const Overrides& ov, RunConfig cfg) {
  const nsquant::DatasetFile data = nsquant::parse_dataset_file(ov.input);
  const nsquant::UnitTimeSeries series = data.to_series();
  const nsquant::KernelSpec kernel = nsquant::KernelSpec::by_name(cfg.kernel_name);
  const nsquant::EvaluationGrid grid =
      nsquant::EvaluationGrid::default_for(series.size());
  const fs::path dir(cfg.output_dir);
  fs::create_directories(dir);

  nlohmann::json summary;
  summary["command"] = "fit";
  summary["input"] = ov.input;
  summary["n"] = series.size();
  summary["kernel"] = cfg.kernel_name;
  summary["gamma"] = cfg.gamma;
  summary["bandwidth_mode"] = nsquant::to_string(cfg.mode);
  nlohmann::json levels = nlohmann::json::array();

  std::size_t failed = 0;
  for (double alpha : cfg.levels) {
    nlohmann::json entry;
    entry["alpha"] = alpha;
    try {
      nsquant::PointwiseBand band;
      if (cfg.mode == BandwidthMode::auto_local) {
        const nsquant::LocalBandwidthProfile profile =
            nsquant::local_bandwidth_profile(series, alpha, kernel, grid);
        band = fit_band_local(series, alpha, cfg, kernel, grid, profile);
        entry["bandwidth_min"] =
            *std::min_element(profile.b_local.begin(), profile.b_local.end());
        entry["bandwidth_median"] = profile_quantile(profile.b_local, 0.5);
        entry["bandwidth_max"] =
            *std::max_element(profile.b_local.begin(), profile.b_local.end());
      } else {
        double b = cfg.bandwidth;
        if (cfg.mode == BandwidthMode::auto_static) {
          const nsquant::BandwidthSelection sel =
              nsquant::select_bandwidth(series, alpha, kernel);
          b = sel.b_star;
          entry["b_yj"] = sel.b_yj;
          entry["rho_star"] = sel.rho_star;
          entry["sigma_tilde_sq"] = sel.sigma_tilde_sq;
          entry["selection_flags"] = nsquant::flags_to_string(sel.flags);
        }
        const double bbar =
            cfg.second_bandwidth > 0 ? cfg.second_bandwidth : 0.5 * b;
        entry["bandwidth"] = b;
        entry["second_bandwidth"] = bbar;
        band = nsquant::pointwise_band(series, alpha, b, bbar, cfg.gamma,
                                       kernel, grid);
      }
      const std::string file = "quantile_" + level_tag(alpha) + ".csv";
      write_text_file(dir / file, band_table_csv(band));
      entry["file"] = file;
      entry["point_flags"] = nsquant::flags_to_string(combined_flags(band.flags));
    } catch (const Error& e) {
      entry["error"] = e.what();
      std::cerr << "level " << level_tag(alpha) << ": " << e.what() << '\n';
      ++failed;
    }
    levels.push_back(std::move(entry));
  }
  summary["levels"] = std::move(levels);
  summary["failed_levels"] = failed;
  write_text_file(dir / "summary.json", summary.dump(2) + "\n");
  return failed == cfg.levels.size() ? 1 : 0;
}

int run_iqr(const Overrides& ov, RunConfig cfg) {
  const nsquant::DatasetFile data = nsquant::parse_dataset_file(ov.input);
  const nsquant::UnitTimeSeries series = data.to_series();
  const nsquant::KernelSpec kernel = nsquant::KernelSpec::by_name(cfg.kernel_name);
  const nsquant::EvaluationGrid grid =
      nsquant::EvaluationGrid::default_for(series.size());
  const fs::path dir(cfg.output_dir);
  fs::create_directories(dir);

  double b25 = cfg.bandwidth, b75 = cfg.bandwidth;
  nlohmann::json summary;
  summary["command"] = "iqr";
  summary["input"] = ov.input;
  summary["n"] = series.size();
  summary["kernel"] = cfg.kernel_name;
  summary["gamma"] = cfg.gamma;
  summary["bandwidth_mode"] = nsquant::to_string(cfg.mode);
  if (cfg.mode == BandwidthMode::auto_local)
    throw ValidationError(
        "iqr supports bandwidth modes fixed and auto-static only");
  if (cfg.mode == BandwidthMode::auto_static) {
    const auto sel25 = nsquant::select_bandwidth(series, 0.25, kernel);
    const auto sel75 = nsquant::select_bandwidth(series, 0.75, kernel);
    b25 = sel25.b_star;
    b75 = sel75.b_star;
    summary["rho_star_25"] = sel25.rho_star;
    summary["rho_star_75"] = sel75.rho_star;
  }
  const double bbar = cfg.second_bandwidth > 0 ? cfg.second_bandwidth
                                               : 0.5 * std::min(b25, b75);
  summary["bandwidth_25"] = b25;
  summary["bandwidth_75"] = b75;
  summary["second_bandwidth"] = bbar;

  const nsquant::PointwiseBand band =
      nsquant::iqr_band(series, b25, b75, bbar, cfg.gamma, kernel, grid);
  write_text_file(dir / "iqr.csv", band_table_csv(band));
  std::size_t crossings = 0;
  for (unsigned f : band.flags)
    if (f & nsquant::kFlagCrossing) ++crossings;
  summary["crossings"] = crossings;
  summary["point_flags"] = nsquant::flags_to_string(combined_flags(band.flags));
  write_text_file(dir / "iqr_summary.json", summary.dump(2) + "\n");
  return 0;
}

int run_deseasonalize(const Overrides& ov, RunConfig cfg) {
  const nsquant::DatasetFile data = nsquant::parse_dataset_file(ov.input);
  const nsquant::DatasetFile out = nsquant::deseasonalize(data, cfg.period);
  const fs::path dir(cfg.output_dir);
  fs::create_directories(dir);
  write_text_file(dir / "deseasonalized.csv", nsquant::write_dataset_csv(out));
  return 0;
}

int run_bandwidth(const Overrides& ov, RunConfig cfg) {
  const nsquant::DatasetFile data = nsquant::parse_dataset_file(ov.input);
  const nsquant::UnitTimeSeries series = data.to_series();
  const nsquant::KernelSpec kernel = nsquant::KernelSpec::by_name(cfg.kernel_name);
  const fs::path dir(cfg.output_dir);
  fs::create_directories(dir);

  nlohmann::json report;
  report["command"] = "bandwidth";
  report["input"] = ov.input;
  report["n"] = series.size();
  report["kernel"] = cfg.kernel_name;
  nlohmann::json levels = nlohmann::json::array();
  std::size_t failed = 0;
  for (double alpha : cfg.levels) {
    nlohmann::json entry;
    entry["alpha"] = alpha;
    try {
      const nsquant::BandwidthSelection sel =
          nsquant::select_bandwidth(series, alpha, kernel);
      entry["b_yj"] = sel.b_yj;
      entry["sigma_tilde_sq"] = sel.sigma_tilde_sq;
      entry["rho_star"] = sel.rho_star;
      entry["b_star"] = sel.b_star;
      entry["m_tilde"] = sel.m_tilde;
      entry["flags"] = nsquant::flags_to_string(sel.flags);
      if (cfg.mode == BandwidthMode::auto_local) {
        const nsquant::EvaluationGrid grid =
            nsquant::EvaluationGrid::default_for(series.size());
        const nsquant::LocalBandwidthProfile profile =
            nsquant::local_bandwidth_profile(series, alpha, kernel, grid);
        std::ostringstream os;
        os << "t,bandwidth,rho_star,flags\n";
        for (std::size_t k = 0; k < grid.size(); ++k)
          os << nsquant::format_double(grid[k]) << ','
             << nsquant::format_double(profile.b_local[k]) << ','
             << nsquant::format_double(profile.rho_star_local[k]) << ','
             << nsquant::flags_to_string(profile.flags[k]) << '\n';
        const std::string file =
            "bandwidth_profile_" + level_tag(alpha) + ".csv";
        write_text_file(dir / file, os.str());
        entry["profile_file"] = file;
      }
    } catch (const Error& e) {
      entry["error"] = e.what();
      std::cerr << "level " << level_tag(alpha) << ": " << e.what() << '\n';
      ++failed;
    }
    levels.push_back(std::move(entry));
  }
  report["levels"] = std::move(levels);
  write_text_file(dir / "bandwidth.json", report.dump(2) + "\n");
  return failed == cfg.levels.size() ? 1 : 0;
}

int run_simulate(const CLI::App* sub, const Overrides& ov, std::size_t n,
                 std::uint64_t seed, RunConfig cfg) {
  const nlohmann::json j = load_json_file(ov.config);
  const nsquant::ProcessSpec spec = nsquant::ProcessSpec::from_json(
      j.contains("process") ? j["process"] : j);
  if (!sub->count("--n") && j.contains("n")) n = j["n"].get<std::size_t>();
  if (!sub->count("--seed") && j.contains("seed"))
    seed = j["seed"].get<std::uint64_t>();
  const nsquant::UnitTimeSeries series = nsquant::generate(spec, n, seed);
  nsquant::DatasetFile out;
  out.values = series.values;
  out.labels.assign(series.size(), "");
  const fs::path dir(cfg.output_dir);
  fs::create_directories(dir);
  write_text_file(dir / "simulated.csv", nsquant::write_dataset_csv(out));
  return 0;
}

int run_coverage(const CLI::App* sub, const Overrides& ov, RunConfig cfg) {
  nlohmann::json j = load_json_file(ov.config);
  nsquant::ExperimentSpec spec;
  try {
    spec = nsquant::ExperimentSpec::from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(ov.config + ": " + e.what());
  }
  if (sub->count("--seed")) spec.seed = cfg.seed;
  const nsquant::CoverageReport report = nsquant::coverage_study(spec);
  const fs::path dir(cfg.output_dir);
  fs::create_directories(dir);
  write_text_file(dir / "coverage.csv", report.to_csv());
  write_text_file(dir / "coverage.json", report.to_json().dump(2) + "\n");
  return 0;
}

int run_boundary(const CLI::App* sub, const Overrides& ov, std::size_t n,
                 std::size_t replications, RunConfig cfg) {
  const nlohmann::json j = load_json_file(ov.config);
  const nsquant::ProcessSpec spec = nsquant::ProcessSpec::from_json(
      j.contains("process") ? j["process"] : j);
  double alpha = j.value("alpha", 0.9);
  if (sub->count("--alpha")) {
    if (ov.alphas.size() != 1)
      throw ValidationError("boundary takes a single --alpha");
    alpha = ov.alphas[0];
  }
  if (!sub->count("--n") && j.contains("n")) n = j["n"].get<std::size_t>();
  std::size_t reps = replications;
  if (!sub->count("--replications") && j.contains("replications"))
    reps = j["replications"].get<std::size_t>();
  double b = cfg.bandwidth;
  if (!sub->count("--bandwidth") && j.contains("bandwidth"))
    b = j["bandwidth"].get<double>();
  std::uint64_t seed = cfg.seed;
  if (!sub->count("--seed") && j.contains("seed"))
    seed = j["seed"].get<std::uint64_t>();

  const nsquant::BoundaryReport report =
      nsquant::boundary_experiment(spec, alpha, n, reps, b, seed);
  const fs::path dir(cfg.output_dir);
  fs::create_directories(dir);
  write_text_file(dir / "boundary.json", report.to_json().dump(2) + "\n");
  std::cout << "rmse_local_linear=" << nsquant::format_double(report.rmse_linear)
            << " rmse_local_constant="
            << nsquant::format_double(report.rmse_constant)
            << " ratio=" << nsquant::format_double(report.ratio) << '\n';
  return 0;
}

void add_io_options(CLI::App* sub, Overrides& ov, bool with_input) {
  if (with_input)
    sub->add_option("--input", ov.input, "input CSV (label,value or value rows)")
        ->required();
  sub->add_option("--config", ov.config, "JSON config file; flags override it");
  sub->add_option("--output-dir", ov.output_dir, "directory for output files");
}

void add_curve_options(CLI::App* sub, Overrides& ov, bool with_levels) {
  if (with_levels)
    sub->add_option("--alpha", ov.alphas, "quantile level, repeatable");
  sub->add_option("--bandwidth", ov.bandwidth,
                  "first-stage bandwidth for mode fixed");
  sub->add_option("--bandwidth-mode", ov.mode,
                  "auto-static, auto-local or fixed");
  sub->add_option("--second-bandwidth", ov.second_bandwidth,
                  "smoothing bandwidth (default: half the first stage)");
  sub->add_option("--gamma", ov.gamma, "band nominal level (default 0.05)");
  sub->add_option("--kernel", ov.kernel, "epanechnikov or triweight");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"time-varying quantile curve estimation"};
  app.require_subcommand(1);
  Overrides ov;
  std::size_t n = 1000;
  std::size_t replications = 100;

  CLI::App* fit = app.add_subcommand(
      "fit", "quantile curves with confidence bands, one CSV per level");
  add_io_options(fit, ov, true);
  add_curve_options(fit, ov, true);
  CLI::App* iqr = app.add_subcommand(
      "iqr", "interquartile range curve with confidence band");
  add_io_options(iqr, ov, true);
  add_curve_options(iqr, ov, false);
  CLI::App* deseason = app.add_subcommand(
      "deseasonalize", "subtract residue-class means (period p)");
  add_io_options(deseason, ov, true);
  deseason->add_option("--period", ov.period, "season length");
  CLI::App* bandwidth = app.add_subcommand(
      "bandwidth", "report selected bandwidths without fitting curves");
  add_io_options(bandwidth, ov, true);
  bandwidth->add_option("--alpha", ov.alphas, "quantile level, repeatable");
  bandwidth->add_option("--bandwidth-mode", ov.mode,
                        "auto-static or auto-local (auto-local adds "
                        "per-point profile CSVs)");
  bandwidth->add_option("--kernel", ov.kernel, "epanechnikov or triweight");
  CLI::App* simulate = app.add_subcommand(
      "simulate", "generate a series from a process spec JSON");
  add_io_options(simulate, ov, false);
  simulate->get_option("--config")->required();
  simulate->add_option("--n", n, "series length");
  simulate->add_option("--seed", ov.seed, "simulation seed");
  CLI::App* coverage = app.add_subcommand(
      "coverage", "Monte Carlo band coverage study from an experiment JSON");
  add_io_options(coverage, ov, false);
  coverage->get_option("--config")->required();
  coverage->add_option("--seed", ov.seed, "experiment seed");
  CLI::App* boundary = app.add_subcommand(
      "boundary", "local linear vs local constant error at t = 0");
  add_io_options(boundary, ov, false);
  boundary->get_option("--config")->required();
  boundary->add_option("--alpha", ov.alphas, "quantile level");
  boundary->add_option("--bandwidth", ov.bandwidth, "fit bandwidth at t = 0");
  boundary->add_option("--n", n, "series length");
  boundary->add_option("--replications", replications, "Monte Carlo runs");
  boundary->add_option("--seed", ov.seed, "experiment seed");

  CLI11_PARSE(app, argc, argv);

  try {
    const CLI::App* sub = app.get_subcommands().front();
    RunConfig cfg;
    if (sub->count("--config") && sub != simulate && sub != coverage &&
        sub != boundary)
      load_config_file(cfg, ov.config);
    apply_overrides(sub, ov, cfg);
    validate_levels(cfg.levels);

    if (sub == fit) return run_fit(ov, cfg);
    if (sub == iqr) return run_iqr(ov, cfg);
    if (sub == deseason) return run_deseasonalize(ov, cfg);
    if (sub == bandwidth) return run_bandwidth(ov, cfg);
    if (sub == simulate) return run_simulate(sub, ov, n, cfg.seed, cfg);
    if (sub == coverage) return run_coverage(sub, ov, cfg);
    if (sub == boundary) return run_boundary(sub, ov, n, replications, cfg);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
