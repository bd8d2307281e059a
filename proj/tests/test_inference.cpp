#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nsquant/curvefit.hpp"
#include "nsquant/errors.hpp"
#include "nsquant/flags.hpp"
#include "nsquant/inference.hpp"
#include "nsquant/mathutil.hpp"
#include "oracles.hpp"

using namespace nsquant;

namespace {

double uniform01(SplitMix64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::vector<double> normal_draws(std::uint64_t seed, std::size_t n) {
  SplitMix64 rng(seed);
  std::vector<double> x(n);
  for (double& v : x) {
    double u = uniform01(rng);
    if (u <= 0.0) u = 0x1.0p-53;
    if (u >= 1.0) u = 1.0 - 0x1.0p-53;
    v = normal_quantile(u);
  }
  return x;
}

}  // namespace

TEST_SUITE_BEGIN("inference");

TEST_CASE("neighborhood index bounds") {
  LocalNeighborhood nb = neighborhood(100, 0.5, 0.1);
  CHECK(nb.s == 40);
  CHECK(nb.l == 60);
  CHECK(nb.size() == 21);

  nb = neighborhood(100, 0.05, 0.1);
  CHECK(nb.s == 1);
  CHECK(nb.l == 15);

  nb = neighborhood(100, 0.95, 0.1);
  CHECK(nb.s == 85);
  CHECK(nb.l == 100);

  // 300 * 0.7 rounds just below 210;  the index nudge must absorb that.
  nb = neighborhood(300, 0.7, 0.2);
  CHECK(nb.s == 150);
  CHECK(nb.l == 270);

  CHECK_THROWS_AS(neighborhood(100, 0.0, 0.1), ValidationError);
  CHECK_THROWS_AS(neighborhood(100, 1.0, 0.1), ValidationError);
  CHECK_THROWS_AS(neighborhood(100, 0.5, 0.0), ValidationError);
}

TEST_CASE("block variance matches the direct double loop") {
  SplitMix64 rng(301);
  for (std::size_t m : {std::size_t{2}, std::size_t{5}, std::size_t{17}}) {
    std::vector<double> z(150);
    for (double& v : z) v = uniform01(rng) - 0.3;
    CHECK(block_long_run_variance(z, m) ==
          doctest::Approx(oracles::block_variance_direct(z, m))
              .epsilon(1e-12));
  }
}

TEST_CASE("block variance of an alternating sequence") {
  std::vector<double> z(60);
  for (std::size_t i = 0; i < z.size(); ++i)
    z[i] = i % 2 == 0 ? 0.5 : -0.5;
  // Every length-2 block averages to the grand mean.
  CHECK(block_long_run_variance(z, 2) == doctest::Approx(0.0).epsilon(1e-14));
  // Length-3 block means are +-1/6, so the statistic is 3 * (1/6)^2 = 1/12.
  CHECK(block_long_run_variance(z, 3) ==
        doctest::Approx(1.0 / 12.0).epsilon(1e-12));
}

TEST_CASE("block variance argument validation") {
  std::vector<double> z(10, 1.0);
  CHECK_THROWS_AS(block_long_run_variance(z, 1), InsufficientDataError);
  CHECK_THROWS_AS(block_long_run_variance(z, 10), InsufficientDataError);
  CHECK_THROWS_AS(block_long_run_variance(z, 11), InsufficientDataError);
  CHECK(block_long_run_variance(z, 5) == 0.0);
}

TEST_CASE("independent quartile scores double the score variance") {
  // With separate uniforms for the two levels, the variance of
  // psi_.75(U)/f - psi_.25(V)/f is (0.1875 + 0.1875) / f^2.
  const std::size_t n = 20000;
  const double f = 0.4;
  SplitMix64 rng(307);
  std::vector<double> w_indep(n), w_same(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = uniform01(rng);
    const double v = uniform01(rng);
    const double b75u = 0.75 - (u <= 0.75 ? 1.0 : 0.0);
    const double b25v = 0.25 - (v <= 0.25 ? 1.0 : 0.0);
    const double b25u = 0.25 - (u <= 0.25 ? 1.0 : 0.0);
    w_indep[i] = (b75u - b25v) / f;
    // One observation feeding both levels: the indicators covary.
    w_same[i] = b75u - b25u;
  }
  const std::size_t m = 27;
  CHECK(block_long_run_variance(w_indep, m) ==
        doctest::Approx(0.375 / (f * f)).epsilon(0.15));
  // Cov(1{U<=3/4}, 1{U<=1/4}) = 1/16 knocks the same-draw variance to 1/4.
  CHECK(block_long_run_variance(w_same, m) ==
        doctest::Approx(0.25).epsilon(0.15));
}

TEST_CASE("windowed score variance equals a manual assembly") {
  const std::size_t n = 400;
  const UnitTimeSeries series = UnitTimeSeries::from(normal_draws(311, n));
  const KernelSpec kernel = KernelSpec::epanechnikov();
  const double alpha = 0.25, t = 0.5, b = 0.15;
  const EvaluationGrid cover =
      raw_cover_grid(n, EvaluationGrid::from({t}), b + 0.01);
  const QuantileCurve raw = estimate_raw_curve(series, alpha, b, kernel, cover);

  const std::size_t m_n = 4;
  const double got = long_run_variance(series, alpha, raw, t, b, m_n);

  const LocalNeighborhood nb = neighborhood(n, t, b);
  std::vector<double> z;
  const auto i0 = static_cast<std::size_t>(
      std::llround(cover.points.front() * static_cast<double>(n)));
  for (std::size_t i = nb.s; i <= nb.l; ++i) {
    const double q = raw.values[i - i0];
    const double r = series.values[i - 1] - q;
    z.push_back(r <= 0 ? alpha - 1.0 : alpha);
  }
  CHECK(got ==
        doctest::Approx(oracles::block_variance_direct(z, m_n)).epsilon(1e-12));
}

TEST_CASE("score variance rejects a misaligned raw grid") {
  const std::size_t n = 100;
  const UnitTimeSeries series = UnitTimeSeries::from(normal_draws(313, n));
  QuantileCurve raw;
  raw.stage = CurveStage::raw;
  raw.grid = EvaluationGrid::from({0.30, 0.45});
  raw.values = {0.0, 0.0};
  raw.slopes = {0.0, 0.0};
  raw.flags = {0u, 0u};
  CHECK_THROWS_WITH_AS(long_run_variance(series, 0.5, raw, 0.31, 0.01, 2),
                       "long_run_variance: raw curve grid is not aligned to "
                       "{i/n}",
                       ValidationError);
}

TEST_CASE("density estimate at an exact atom") {
  std::vector<double> x(50, 2.0);
  const UnitTimeSeries series = UnitTimeSeries::from(x);
  // Every observation sits at the evaluation height: K(0)/h.
  CHECK(density_at_quantile(series, 0.5, 0.2, 2.0, 0.25,
                            KernelSpec::epanechnikov()) ==
        doctest::Approx(0.75 / 0.25).epsilon(1e-12));
  CHECK_THROWS_AS(density_at_quantile(series, 0.5, 0.2, 2.0, 0.0,
                                      KernelSpec::epanechnikov()),
                  ValidationError);
}

TEST_CASE("density estimate approaches the normal density") {
  const std::size_t n = 2000;
  const UnitTimeSeries series = UnitTimeSeries::from(normal_draws(317, n));
  const double got = density_at_quantile(series, 0.5, 0.5, 0.0, 0.3,
                                         KernelSpec::epanechnikov());
  CHECK(got == doctest::Approx(normal_pdf(0.0)).epsilon(0.13));
}

TEST_CASE("half-width formula") {
  const double phi_star = kernel_phi(jackknife_kernel(KernelSpec::epanechnikov()));
  const double got = band_half_width(0.25, 0.4, 1000, 0.1, phi_star, 0.05);
  const double want =
      normal_quantile(0.975) * std::sqrt(phi_star * 0.25) / (0.4 * 10.0);
  CHECK(got == doctest::Approx(want).epsilon(1e-13));
  CHECK(got == doctest::Approx(0.23436).epsilon(1e-4));
  // Scaling: halving the density doubles the width.
  CHECK(band_half_width(0.25, 0.2, 1000, 0.1, phi_star, 0.05) ==
        doctest::Approx(2.0 * got).epsilon(1e-12));
}

TEST_CASE("pointwise band brackets the center symmetrically") {
  const std::size_t n = 500;
  const UnitTimeSeries series = UnitTimeSeries::from(normal_draws(331, n));
  const KernelSpec kernel = KernelSpec::epanechnikov();
  const EvaluationGrid grid = EvaluationGrid::from({0.3, 0.5, 0.7});
  const PointwiseBand band =
      pointwise_band(series, 0.5, 0.12, 0.08, 0.05, kernel, grid);
  const double phi_star = kernel_phi(jackknife_kernel(kernel));
  const double z = normal_quantile(0.975);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    REQUIRE(band.center.valid_at(k));
    CHECK(band.lower[k] < band.center.values[k]);
    CHECK(band.center.values[k] < band.upper[k]);
    const double up = band.upper[k] - band.center.values[k];
    const double dn = band.center.values[k] - band.lower[k];
    CHECK(up == doctest::Approx(dn).epsilon(1e-12));
    // The reported plug-ins reproduce the half-width exactly.
    const double half = z * std::sqrt(phi_star * band.plugins.sigma_sq[k]) /
                        (band.plugins.density[k] *
                         std::sqrt(static_cast<double>(n) * 0.12));
    CHECK(up == doctest::Approx(half).epsilon(1e-12));
    CHECK(band.flags[k] == 0u);
    CHECK(band.plugins.sigma_sq[k] > 0.05);
    CHECK(band.plugins.sigma_sq[k] < 0.7);
    CHECK(band.plugins.density[k] > 0.15);
    CHECK(band.plugins.density[k] < 0.7);
    CHECK(band.plugins.m_n[k] >= 2);
    CHECK(band.plugins.h_n[k] > 0);
  }
}

TEST_CASE("band center equals the jackknifed curve") {
  const std::size_t n = 300;
  const UnitTimeSeries series = UnitTimeSeries::from(normal_draws(337, n));
  const KernelSpec kernel = KernelSpec::epanechnikov();
  const EvaluationGrid grid = EvaluationGrid::from({0.35, 0.5, 0.6});
  const PointwiseBand band =
      pointwise_band(series, 0.75, 0.15, 0.1, 0.1, kernel, grid);
  const QuantileCurve jack =
      jackknife_curve(series, 0.75, 0.15, 0.1, kernel, grid);
  for (std::size_t k = 0; k < grid.size(); ++k)
    CHECK(band.center.values[k] ==
          doctest::Approx(jack.values[k]).epsilon(1e-14));
}

TEST_CASE("smaller gamma gives a strictly wider band") {
  const std::size_t n = 400;
  const UnitTimeSeries series = UnitTimeSeries::from(normal_draws(347, n));
  const KernelSpec kernel = KernelSpec::epanechnikov();
  const EvaluationGrid grid = EvaluationGrid::from({0.4, 0.6});
  const PointwiseBand wide =
      pointwise_band(series, 0.5, 0.15, 0.1, 0.01, kernel, grid);
  const PointwiseBand narrow =
      pointwise_band(series, 0.5, 0.15, 0.1, 0.10, kernel, grid);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    CHECK(wide.upper[k] > narrow.upper[k]);
    CHECK(wide.lower[k] < narrow.lower[k]);
    // Width ratio is exactly the normal quantile ratio.
    const double rw = (wide.upper[k] - wide.lower[k]) /
                      (narrow.upper[k] - narrow.lower[k]);
    CHECK(rw == doctest::Approx(normal_quantile(0.995) /
                                normal_quantile(0.95)).epsilon(1e-10));
  }
}

TEST_CASE("band excludes the boundary region") {
  const std::size_t n = 400;
  const UnitTimeSeries series = UnitTimeSeries::from(normal_draws(353, n));
  const EvaluationGrid grid = EvaluationGrid::from({0.05, 0.5, 0.97});
  const PointwiseBand band = pointwise_band(series, 0.5, 0.12, 0.08, 0.05,
                                            KernelSpec::epanechnikov(), grid);
  CHECK(std::isnan(band.lower[0]));
  CHECK((band.flags[0] & kFlagBoundary) != 0);
  CHECK((band.flags[0] & kFlagMissing) != 0);
  CHECK_FALSE(std::isnan(band.lower[1]));
  CHECK(std::isnan(band.upper[2]));
  CHECK((band.flags[2] & kFlagBoundary) != 0);
}

TEST_CASE("iqr band uses the pooled score variance and no density factor") {
  const std::size_t n = 600;
  const UnitTimeSeries series = UnitTimeSeries::from(normal_draws(359, n));
  const KernelSpec kernel = KernelSpec::epanechnikov();
  const EvaluationGrid grid = EvaluationGrid::from({0.4, 0.5, 0.6});
  const double b25 = 0.15, b75 = 0.12, bbar = 0.1, gamma = 0.05;
  const PointwiseBand band =
      iqr_band(series, b25, b75, bbar, gamma, kernel, grid);
  const double phi_star = kernel_phi(jackknife_kernel(kernel));
  const double z = normal_quantile(0.975);
  const double b_eff = std::min(b25, b75);
  REQUIRE(std::isnan(band.center.alpha));
  for (std::size_t k = 0; k < grid.size(); ++k) {
    REQUIRE(band.center.valid_at(k));
    CHECK(band.center.values[k] >= 0.0);
    const double up = band.upper[k] - band.center.values[k];
    const double half = z * std::sqrt(phi_star * band.plugins.sigma_sq[k] /
                                      (static_cast<double>(n) * b_eff));
    CHECK(up == doctest::Approx(half).epsilon(1e-12));
    // IQR of a standard normal is about 1.35; the estimate should be near it.
    CHECK(band.center.values[k] > 0.8);
    CHECK(band.center.values[k] < 2.0);
  }

  const IqrCurve direct = iqr_curve(series, b25, b75, bbar, kernel, grid);
  for (std::size_t k = 0; k < grid.size(); ++k)
    CHECK(band.center.values[k] ==
          doctest::Approx(direct.values[k]).epsilon(1e-14));
}

TEST_CASE("band serialization") {
  const std::size_t n = 200;
  const UnitTimeSeries series = UnitTimeSeries::from(normal_draws(367, n));
  const EvaluationGrid grid = EvaluationGrid::from({0.05, 0.5, 0.7});
  const PointwiseBand band = pointwise_band(series, 0.5, 0.15, 0.1, 0.05,
                                            KernelSpec::epanechnikov(), grid);
  const std::string csv = band_to_csv(band);
  CHECK(csv.rfind("t,center,lower,upper,sigma_sq,density,flags\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
  CHECK(csv.find("boundary") != std::string::npos);

  const nlohmann::json j = band_to_json(band);
  CHECK(j["alpha"] == 0.5);
  CHECK(j["gamma"] == 0.05);
  CHECK(j["points"].size() == 3);
  CHECK(j["points"][1].contains("lower"));
  CHECK_FALSE(j["points"][0].contains("lower"));
  CHECK(std::string(j["points"][0]["flags"]).find("boundary") !=
        std::string::npos);
}

TEST_CASE("band argument validation") {
  const UnitTimeSeries series = UnitTimeSeries::from(normal_draws(373, 100));
  const KernelSpec kernel = KernelSpec::epanechnikov();
  const EvaluationGrid grid = EvaluationGrid::from({0.5});
  CHECK_THROWS_AS(pointwise_band(series, 0.5, 0.6, 0.1, 0.05, kernel, grid),
                  ValidationError);
  CHECK_THROWS_AS(pointwise_band(series, 0.5, 0.1, 0.0, 0.05, kernel, grid),
                  ValidationError);
  CHECK_THROWS_AS(pointwise_band(series, 0.5, 0.1, 0.1, 1.0, kernel, grid),
                  ValidationError);
}

TEST_SUITE_END();
