#include <doctest.h>

#include <cmath>
#include <string>

#include <nlohmann/json.hpp>

#include "nsquant/errors.hpp"
#include "nsquant/experiments.hpp"

using namespace nsquant;

namespace {

ProcessSpec iid_normal() {
  LsLinearSpec lin;
  lin.coefficients.push_back(CoefficientFn::constant(1.0));
  ProcessSpec spec;
  spec.process = lin;
  return spec;
}

ProcessSpec trending_normal() {
  // Scale a0(t) = 1 + t keeps every quantile curve linear in t.
  LsLinearSpec lin;
  lin.coefficients.push_back(CoefficientFn::poly({1.0, 1.0}));
  ProcessSpec spec;
  spec.process = lin;
  return spec;
}

}  // namespace

TEST_SUITE_BEGIN("experiments");

TEST_CASE("bandwidth mode names round trip") {
  for (auto mode : {BandwidthMode::auto_static, BandwidthMode::auto_local,
                    BandwidthMode::fixed})
    CHECK(bandwidth_mode_from(to_string(mode)) == mode);
  CHECK(to_string(BandwidthMode::fixed) == "fixed");
  CHECK_THROWS_AS(bandwidth_mode_from("adaptive"), ValidationError);
}

TEST_CASE("experiment spec parses json with defaults") {
  nlohmann::json j;
  j["process"] = iid_normal().to_json();
  j["n"] = 400;
  j["alpha"] = 0.75;
  j["replications"] = 12;
  j["test_points"] = {0.3, 0.7};
  const ExperimentSpec spec = ExperimentSpec::from_json(j);
  CHECK(spec.n == 400);
  CHECK(spec.alpha == 0.75);
  CHECK(spec.gamma == 0.05);
  CHECK(spec.seed == 1);
  CHECK(spec.replications == 12);
  CHECK(spec.test_points == std::vector<double>{0.3, 0.7});
  CHECK(spec.bandwidth_mode == BandwidthMode::auto_static);
  CHECK(spec.fixed_bandwidth == 0.1);
  CHECK(spec.second_bandwidth_factor == 0.5);
  CHECK(spec.oracle_draws == 100000);

  j["gamma"] = 0.1;
  j["seed"] = 7;
  j["bandwidth_mode"] = "fixed";
  j["bandwidth"] = 0.22;
  j["second_bandwidth_factor"] = 0.4;
  j["oracle_draws"] = 50000;
  const ExperimentSpec full = ExperimentSpec::from_json(j);
  CHECK(full.gamma == 0.1);
  CHECK(full.seed == 7);
  CHECK(full.bandwidth_mode == BandwidthMode::fixed);
  CHECK(full.fixed_bandwidth == 0.22);
  CHECK(full.second_bandwidth_factor == 0.4);
  CHECK(full.oracle_draws == 50000);
}

TEST_CASE("experiment spec rejects empty designs") {
  nlohmann::json j;
  j["process"] = iid_normal().to_json();
  j["n"] = 400;
  j["alpha"] = 0.5;
  j["replications"] = 0;
  j["test_points"] = {0.5};
  CHECK_THROWS_AS(ExperimentSpec::from_json(j), ValidationError);
  j["replications"] = 5;
  j["test_points"] = nlohmann::json::array();
  CHECK_THROWS_AS(ExperimentSpec::from_json(j), ValidationError);
}

TEST_CASE("coverage study tallies bands against the oracle") {
  ExperimentSpec spec;
  spec.process = iid_normal();
  spec.n = 200;
  spec.alpha = 0.5;
  spec.replications = 8;
  spec.test_points = {0.5};
  spec.seed = 11;
  spec.bandwidth_mode = BandwidthMode::fixed;
  spec.fixed_bandwidth = 0.2;
  const CoverageReport report = coverage_study(spec);
  REQUIRE(report.test_points.size() == 1);
  CHECK(report.replications == 8);
  CHECK(report.failures == 0);
  CHECK(report.evaluated[0] == 8);
  CHECK(report.covered[0] <= report.evaluated[0]);
  // Gaussian closed form: the iid N(0,1) median is exactly zero.
  CHECK(std::abs(report.oracle[0]) < 1e-12);
  CHECK(report.mean_width[0] > 0.0);
  CHECK(report.coverage[0] >= 0.0);
  CHECK(report.coverage[0] <= 1.0);
  CHECK(report.coverage[0] ==
        static_cast<double>(report.covered[0]) / 8.0);
}

TEST_CASE("coverage study is deterministic in the seed") {
  ExperimentSpec spec;
  spec.process = iid_normal();
  spec.n = 150;
  spec.alpha = 0.25;
  spec.replications = 4;
  spec.test_points = {0.4, 0.6};
  spec.seed = 3;
  spec.bandwidth_mode = BandwidthMode::fixed;
  spec.fixed_bandwidth = 0.25;
  const std::string once = coverage_study(spec).to_csv();
  const std::string twice = coverage_study(spec).to_csv();
  CHECK(once == twice);
  spec.seed = 4;
  CHECK(coverage_study(spec).to_csv() != once);
}

TEST_CASE("coverage report serializes to csv and json") {
  ExperimentSpec spec;
  spec.process = iid_normal();
  spec.n = 150;
  spec.alpha = 0.5;
  spec.replications = 3;
  spec.test_points = {0.5};
  spec.bandwidth_mode = BandwidthMode::fixed;
  spec.fixed_bandwidth = 0.25;
  const CoverageReport report = coverage_study(spec);
  const std::string csv = report.to_csv();
  CHECK(csv.rfind("t,oracle,coverage,mean_width,covered,evaluated\n", 0) == 0);
  const nlohmann::json j = report.to_json();
  CHECK(j.at("replications") == 3);
  CHECK(j.at("failures") == 0);
  REQUIRE(j.at("points").size() == 1);
  CHECK(j["points"][0].at("t") == 0.5);
  CHECK(j["points"][0].contains("coverage"));
  CHECK(j["points"][0].contains("mean_width"));
}

TEST_CASE("boundary experiment compares the two fits at t = 0") {
  const BoundaryReport report =
      boundary_experiment(trending_normal(), 0.75, 150, 6, 0.25, 5);
  CHECK(report.replications == 6);
  CHECK(report.rmse_linear > 0.0);
  CHECK(report.rmse_constant > 0.0);
  CHECK(report.ratio == report.rmse_linear / report.rmse_constant);
  const nlohmann::json j = report.to_json();
  CHECK(j.at("rmse_local_linear") == report.rmse_linear);
  CHECK(j.at("rmse_local_constant") == report.rmse_constant);
  CHECK(j.at("ratio") == report.ratio);
}

TEST_CASE("bias experiment reports both centerings at one point") {
  const BiasReport report =
      bias_experiment(trending_normal(), 0.75, 300, 4, 0.2, 0.08, 0.5, 9);
  CHECK(report.replications == 4);
  CHECK(std::isfinite(report.mean_bias_two_stage));
  CHECK(std::isfinite(report.mean_bias_jackknife));
  CHECK(report.se_two_stage >= 0.0);
  CHECK(report.se_jackknife >= 0.0);
  // The a0(t) = 1 + t quantile curve is linear, so both stay near zero bias.
  CHECK(std::abs(report.mean_bias_two_stage) < 0.5);
  CHECK(std::abs(report.mean_bias_jackknife) < 0.5);
  const nlohmann::json j = report.to_json();
  CHECK(j.at("mean_bias_two_stage") == report.mean_bias_two_stage);
  CHECK(j.at("se_jackknife") == report.se_jackknife);
}

TEST_SUITE_END();
