#include "nsquant/procsim.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "nsquant/errors.hpp"
#include "nsquant/mathutil.hpp"

#include <nlohmann/json.hpp>

namespace nsquant {

double CoefficientFn::operator()(double t) const {
  if (kind == Kind::poly) {
    double v = 0;
    for (std::size_t j = params.size(); j-- > 0;) v = v * t + params[j];
    return v;
  }
  // trig: offset + amp * cos(freq * t + phase)
  return params[0] + params[1] * std::cos(params[2] * t + params[3]);
}

CoefficientFn CoefficientFn::constant(double c) {
  return poly({c});
}

CoefficientFn CoefficientFn::poly(std::vector<double> coeffs) {
  if (coeffs.empty())
    throw ValidationError("polynomial coefficient function needs parameters");
  CoefficientFn f;
  f.kind = Kind::poly;
  f.params = std::move(coeffs);
  return f;
}

CoefficientFn CoefficientFn::trig(double offset, double amp, double freq,
                                  double phase) {
  CoefficientFn f;
  f.kind = Kind::trig;
  f.params = {offset, amp, freq, phase};
  return f;
}

CoefficientFn CoefficientFn::from_json(const nlohmann::json& j) {
  const std::string type = j.at("type").get<std::string>();
  auto params = j.at("params").get<std::vector<double>>();
  if (type == "poly") return poly(std::move(params));
  if (type == "trig") {
    if (params.size() != 4)
      throw ValidationError(
          "trig coefficient function needs params [offset, amp, freq, phase]");
    return trig(params[0], params[1], params[2], params[3]);
  }
  throw ValidationError("unknown coefficient function type '" + type + "'");
}

nlohmann::json CoefficientFn::to_json() const {
  nlohmann::json j;
  j["type"] = kind == Kind::poly ? "poly" : "trig";
  j["params"] = params;
  return j;
}

Innovation Innovation::from_json(const nlohmann::json& j) {
  Innovation innov;
  const std::string type = j.at("type").get<std::string>();
  if (type == "normal") {
    innov.kind = Kind::normal;
    innov.mu = j.value("mu", 0.0);
    innov.sigma = j.value("sigma", 1.0);
  } else if (type == "student_t") {
    innov.kind = Kind::student_t;
    innov.nu = j.value("nu", 3.0);
    innov.mu = j.value("mu", 0.0);
    innov.sigma = j.value("sigma", 1.0);
  } else {
    throw ValidationError("unknown innovation type '" + type + "'");
  }
  if (!(innov.sigma > 0))
    throw ValidationError("innovation sigma must be > 0");
  if (innov.kind == Kind::student_t && !(innov.nu > 2))
    throw ValidationError("student_t innovations need nu > 2");
  return innov;
}

nlohmann::json Innovation::to_json() const {
  nlohmann::json j;
  if (kind == Kind::normal) {
    j["type"] = "normal";
    j["mu"] = mu;
    j["sigma"] = sigma;
  } else {
    j["type"] = "student_t";
    j["nu"] = nu;
    j["mu"] = mu;
    j["sigma"] = sigma;
  }
  return j;
}

namespace {
constexpr std::size_t kValidatorGrid = 1000;
}

void LsLinearSpec::validate() const {
  if (coefficients.empty())
    throw ValidationError("linear process needs at least a_0");
  double min_a0 = std::numeric_limits<double>::infinity();
  for (std::size_t g = 0; g <= kValidatorGrid; ++g) {
    const double t = static_cast<double>(g) / kValidatorGrid;
    min_a0 = std::min(min_a0, std::abs(coefficients[0](t)));
  }
  if (!(min_a0 > 0))
    throw ValidationError(
        "linear process spec invalid: min over t of |a_0(t)| must be > 0");
}

double LsLinearSpec::scale_at(double t) const {
  double ss = 0;
  for (const auto& a : coefficients) {
    const double v = a(t);
    ss += v * v;
  }
  return std::sqrt(ss);
}

void TvtarSpec::validate() const {
  if (burn_in < 50)
    throw ValidationError("tvtar burn-in must be >= 50");
  // The one-step map x -> a x^+ + b (-x)^+ has Lipschitz constant
  // max(|a|, |b|) exactly (slopes a on x > 0 and -b on x < 0).
  double chi = 0;
  for (std::size_t g = 0; g <= kValidatorGrid; ++g) {
    const double t = static_cast<double>(g) / kValidatorGrid;
    chi = std::max(chi, std::max(std::abs(a_fn(t)), std::abs(b_fn(t))));
  }
  if (!(chi < 1.0))
    throw ValidationError(
        "tvtar spec violates the contraction condition: sup over t of "
        "max(|a(t)|, |b(t)|) = " + std::to_string(chi) + " must be < 1");
}

void ProcessSpec::validate() const {
  std::visit([](const auto& s) { s.validate(); }, process);
}

ProcessSpec ProcessSpec::from_json(const nlohmann::json& j) {
  ProcessSpec spec;
  const std::string family = j.at("family").get<std::string>();
  if (family == "linear") {
    LsLinearSpec s;
    for (const auto& cj : j.at("coefficients"))
      s.coefficients.push_back(CoefficientFn::from_json(cj));
    if (j.contains("innovation"))
      s.innovation = Innovation::from_json(j.at("innovation"));
    spec.process = std::move(s);
  } else if (family == "tvtar") {
    TvtarSpec s;
    s.a_fn = CoefficientFn::from_json(j.at("a"));
    s.b_fn = CoefficientFn::from_json(j.at("b"));
    if (j.contains("innovation"))
      s.innovation = Innovation::from_json(j.at("innovation"));
    s.burn_in = j.value("burn_in", 200);
    spec.process = std::move(s);
  } else {
    throw ValidationError("unknown process family '" + family + "'");
  }
  spec.validate();
  return spec;
}

nlohmann::json ProcessSpec::to_json() const {
  nlohmann::json j;
  if (const auto* lin = std::get_if<LsLinearSpec>(&process)) {
    j["family"] = "linear";
    nlohmann::json cs = nlohmann::json::array();
    for (const auto& c : lin->coefficients) cs.push_back(c.to_json());
    j["coefficients"] = std::move(cs);
    j["innovation"] = lin->innovation.to_json();
  } else {
    const auto& tv = std::get<TvtarSpec>(process);
    j["family"] = "tvtar";
    j["a"] = tv.a_fn.to_json();
    j["b"] = tv.b_fn.to_json();
    j["innovation"] = tv.innovation.to_json();
    j["burn_in"] = tv.burn_in;
  }
  return j;
}

double innovation_at(const Innovation& innov, std::uint64_t seed,
                     std::int64_t k) {
  // Fresh substream per index: draws depend only on (seed, k), so changing
  // the series length or truncation depth never shifts shared innovations.
  SplitMix64 rng(mix_seed(seed, static_cast<std::uint64_t>(k)));
  double draw;
  if (innov.kind == Innovation::Kind::normal) {
    std::normal_distribution<double> dist(0.0, 1.0);
    draw = dist(rng);
  } else {
    std::student_t_distribution<double> dist(innov.nu);
    draw = dist(rng);
  }
  return innov.mu + innov.sigma * draw;
}

UnitTimeSeries gen_ls_linear(const LsLinearSpec& spec, std::size_t n,
                             std::uint64_t seed) {
  spec.validate();
  if (n == 0) throw ValidationError("simulation length must be >= 1");
  const std::size_t J = spec.coefficients.size() - 1;
  // One shared stream for eps_{1-J} .. eps_n.
  std::vector<double> eps(n + J);
  for (std::size_t idx = 0; idx < eps.size(); ++idx) {
    const auto k = static_cast<std::int64_t>(idx) + 1 -
                   static_cast<std::int64_t>(J);
    eps[idx] = innovation_at(spec.innovation, seed, k);
  }
  std::vector<double> x(n);
  std::vector<double> coeff(J + 1);
  for (std::size_t i = 1; i <= n; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(n);
    for (std::size_t j = 0; j <= J; ++j) coeff[j] = spec.coefficients[j](t);
    double v = 0;
    // eps_{i-j} sits at vector index (i-j) - (1-J).
    for (std::size_t j = 0; j <= J; ++j)
      v += coeff[j] * eps[i - j - 1 + J];
    x[i - 1] = v;
  }
  return UnitTimeSeries::from(std::move(x));
}

UnitTimeSeries gen_tvtar(const TvtarSpec& spec, std::size_t n,
                         std::uint64_t seed) {
  spec.validate();
  if (n == 0) throw ValidationError("simulation length must be >= 1");
  const auto M = static_cast<std::int64_t>(spec.burn_in);
  // Shared stream for eps_{2-M} .. eps_n.
  const std::int64_t k0 = 2 - M;
  std::vector<double> eps(static_cast<std::size_t>(
      static_cast<std::int64_t>(n) - k0 + 1));
  for (std::size_t idx = 0; idx < eps.size(); ++idx)
    eps[idx] = innovation_at(spec.innovation, seed,
                             k0 + static_cast<std::int64_t>(idx));
  std::vector<double> x(n);
  for (std::size_t i = 1; i <= n; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(n);
    const double a = spec.a_fn(t), b = spec.b_fn(t);
    // Frozen-coefficient backward iteration of depth M ending at index i.
    double z = 0;
    for (std::int64_t k = static_cast<std::int64_t>(i) - M + 1;
         k <= static_cast<std::int64_t>(i); ++k) {
      const double plus = z > 0 ? z : 0.0;
      const double minus = z < 0 ? -z : 0.0;
      z = a * plus + b * minus + eps[static_cast<std::size_t>(k - k0)];
    }
    x[i - 1] = z;
  }
  return UnitTimeSeries::from(std::move(x));
}

UnitTimeSeries generate(const ProcessSpec& spec, std::size_t n,
                        std::uint64_t seed) {
  if (const auto* lin = std::get_if<LsLinearSpec>(&spec.process))
    return gen_ls_linear(*lin, n, seed);
  return gen_tvtar(std::get<TvtarSpec>(spec.process), n, seed);
}

double oracle_quantile_linear_gaussian(const LsLinearSpec& spec, double t,
                                       double alpha) {
  if (spec.innovation.kind != Innovation::Kind::normal)
    throw ValidationError(
        "closed-form quantile oracle requires normal innovations");
  double sum_a = 0;
  for (const auto& a : spec.coefficients) sum_a += a(t);
  return spec.innovation.mu * sum_a +
         spec.innovation.sigma * spec.scale_at(t) * normal_quantile(alpha);
}

McQuantile oracle_quantile_mc(const ProcessSpec& spec, double t, double alpha,
                              std::size_t draws, std::uint64_t seed) {
  spec.validate();
  if (draws < 10000)
    throw ValidationError("Monte Carlo quantile oracle needs >= 10000 draws");
  if (!(alpha > 0 && alpha < 1))
    throw ValidationError("quantile level must be in (0, 1)");
  std::vector<double> sample(draws);
  if (const auto* lin = std::get_if<LsLinearSpec>(&spec.process)) {
    const std::size_t J = lin->coefficients.size() - 1;
    std::vector<double> coeff(J + 1);
    for (std::size_t j = 0; j <= J; ++j) coeff[j] = lin->coefficients[j](t);
    for (std::size_t d = 0; d < draws; ++d) {
      const std::uint64_t sub = mix_seed(seed, d);
      double v = 0;
      for (std::size_t j = 0; j <= J; ++j)
        v += coeff[j] *
             innovation_at(lin->innovation, sub, -static_cast<std::int64_t>(j));
      sample[d] = v;
    }
  } else {
    const auto& tv = std::get<TvtarSpec>(spec.process);
    const double a = tv.a_fn(t), b = tv.b_fn(t);
    const auto M = static_cast<std::int64_t>(tv.burn_in);
    for (std::size_t d = 0; d < draws; ++d) {
      const std::uint64_t sub = mix_seed(seed, d);
      double z = 0;
      for (std::int64_t k = -M + 1; k <= 0; ++k) {
        const double plus = z > 0 ? z : 0.0;
        const double minus = z < 0 ? -z : 0.0;
        z = a * plus + b * minus + innovation_at(tv.innovation, sub, k);
      }
      sample[d] = z;
    }
  }
  std::sort(sample.begin(), sample.end());
  const auto nd = static_cast<double>(draws);
  auto rank = static_cast<std::size_t>(std::ceil(alpha * nd - 1e-9));
  rank = std::min(std::max<std::size_t>(rank, 1), draws);

  McQuantile out;
  out.value = sample[rank - 1];
  // Order-statistic spacing: se of the sample quantile without a density fit.
  const auto spread = static_cast<std::size_t>(
      std::max(1.0, std::round(std::sqrt(nd * alpha * (1.0 - alpha)))));
  const std::size_t hi = std::min(rank + spread, draws);
  const std::size_t lo = rank > spread ? rank - spread : 1;
  out.stderr_est = (sample[hi - 1] - sample[lo - 1]) / 2.0;
  return out;
}

}  // namespace nsquant
