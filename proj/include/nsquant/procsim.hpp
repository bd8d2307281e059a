#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "nsquant/series.hpp"

#include <nlohmann/json_fwd.hpp>

namespace nsquant {

// Time-varying coefficient on [0, 1]: either a polynomial in t or
// offset + amp * cos(freq * t + phase).
struct CoefficientFn {
  enum class Kind { poly, trig };
  Kind kind = Kind::poly;
  std::vector<double> params;  // poly: c0..cd; trig: {offset, amp, freq, phase}

  double operator()(double t) const;
  static CoefficientFn constant(double c);
  static CoefficientFn poly(std::vector<double> coeffs);
  static CoefficientFn trig(double offset, double amp, double freq,
                            double phase);
  static CoefficientFn from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct Innovation {
  enum class Kind { normal, student_t };
  Kind kind = Kind::normal;
  double mu = 0;
  double sigma = 1;
  double nu = 3;  // student_t degrees of freedom

  static Innovation from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

// Linear filter process X_i = sum_j a_j(i/n) eps_{i-j}, one shared innovation
// stream.
struct LsLinearSpec {
  std::vector<CoefficientFn> coefficients;  // a_0 .. a_J
  Innovation innovation;

  // Throws ValidationError unless min over a 1000-point grid of |a_0(t)| > 0.
  void validate() const;
  double scale_at(double t) const;  // sqrt(sum_j a_j(t)^2)
};

// Threshold autoregression zeta = a(t) [zeta]+ + b(t) [-zeta]+ + eps, sampled
// by frozen-coefficient backward iteration of depth burn_in per index.
struct TvtarSpec {
  CoefficientFn a_fn;
  CoefficientFn b_fn;
  Innovation innovation;
  int burn_in = 200;

  // Throws ValidationError unless sup over a 1000-point grid of
  // max(|a(t)|, |b(t)|) < 1 and burn_in >= 50.
  void validate() const;
};

struct ProcessSpec {
  std::variant<LsLinearSpec, TvtarSpec> process;

  void validate() const;
  static ProcessSpec from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

// Innovation k of the stream derived from seed; k may be negative (pre-sample
// draws for the filter tail).  Pure function of (innovation, seed, k).
double innovation_at(const Innovation& innov, std::uint64_t seed,
                     std::int64_t k);

UnitTimeSeries gen_ls_linear(const LsLinearSpec& spec, std::size_t n,
                             std::uint64_t seed);
UnitTimeSeries gen_tvtar(const TvtarSpec& spec, std::size_t n,
                         std::uint64_t seed);
UnitTimeSeries generate(const ProcessSpec& spec, std::size_t n,
                        std::uint64_t seed);

// Exact alpha-quantile of the frozen-t marginal for Gaussian linear specs:
// Phi^{-1}(alpha) * scale_at(t).  Throws ValidationError for other innovations.
double oracle_quantile_linear_gaussian(const LsLinearSpec& spec, double t,
                                       double alpha);

struct McQuantile {
  double value = 0;
  double stderr_est = 0;  // order-statistic spacing estimate
};

// Empirical alpha-quantile of `draws` independent frozen-t realizations.
McQuantile oracle_quantile_mc(const ProcessSpec& spec, double t, double alpha,
                              std::size_t draws, std::uint64_t seed);

}  // namespace nsquant
