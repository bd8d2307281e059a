#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nsquant/curvefit.hpp"
#include "nsquant/procsim.hpp"

#include <nlohmann/json_fwd.hpp>

namespace nsquant {

enum class BandwidthMode { auto_static, auto_local, fixed };

BandwidthMode bandwidth_mode_from(const std::string& name);
std::string to_string(BandwidthMode mode);

struct ExperimentSpec {
  ProcessSpec process;
  std::size_t n = 1000;
  double alpha = 0.5;
  double gamma = 0.05;
  std::size_t replications = 100;
  std::vector<double> test_points;
  std::uint64_t seed = 1;

  // Harness plumbing, not part of the statistical design.
  BandwidthMode bandwidth_mode = BandwidthMode::auto_static;
  double fixed_bandwidth = 0.1;
  double second_bandwidth_factor = 0.5;  // bbar = factor * b
  std::size_t oracle_draws = 100000;

  static ExperimentSpec from_json(const nlohmann::json& j);
};

struct CoverageReport {
  std::vector<double> test_points;
  std::vector<double> oracle;        // target quantile at each test point
  std::vector<double> coverage;      // covered / evaluated
  std::vector<double> mean_width;
  std::vector<std::size_t> covered;
  std::vector<std::size_t> evaluated;
  std::size_t replications = 0;
  std::size_t failures = 0;  // replications that errored out

  std::string to_csv() const;
  nlohmann::json to_json() const;
};

// Simulate R series, run the full bandwidth + jackknife + band pipeline on
// each, and tally how often the band captures the oracle quantile.
CoverageReport coverage_study(const ExperimentSpec& spec);

struct BoundaryReport {
  double rmse_linear = 0;
  double rmse_constant = 0;
  double ratio = 0;  // linear / constant
  std::size_t replications = 0;

  nlohmann::json to_json() const;
};

// RMSE at t = 0 of local linear vs local constant fits against the oracle
// quantile, over R replications at fixed bandwidth.
BoundaryReport boundary_experiment(const ProcessSpec& process, double alpha,
                                   std::size_t n, std::size_t replications,
                                   double bandwidth, std::uint64_t seed);

struct BiasReport {
  double mean_bias_two_stage = 0;   // mean(two-stage estimate - oracle)
  double mean_bias_jackknife = 0;   // mean(jackknifed estimate - oracle)
  double se_two_stage = 0;
  double se_jackknife = 0;
  std::size_t replications = 0;

  nlohmann::json to_json() const;
};

// Bias at a single interior point of the two-stage curve vs its jackknifed
// correction, over R replications at fixed bandwidths.
BiasReport bias_experiment(const ProcessSpec& process, double alpha,
                           std::size_t n, std::size_t replications,
                           double bandwidth, double bbar, double t,
                           std::uint64_t seed);

}  // namespace nsquant
