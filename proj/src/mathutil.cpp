#include "nsquant/mathutil.hpp"

#include <cmath>
#include <string>

#include "nsquant/errors.hpp"

namespace nsquant {

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014327;  // 1/sqrt(2*pi)
constexpr double kInvSqrt2 = 0.7071067811865476;

// 10-point Gauss-Legendre rule on [-1, 1], positive nodes.
constexpr double kGl10X[5] = {0.1488743389816312, 0.4333953941292472,
                              0.6794095682990244, 0.8650633666889845,
                              0.9739065285171717};
constexpr double kGl10W[5] = {0.2955242247147529, 0.2692667193099963,
                              0.2190863625159820, 0.1494513491505806,
                              0.0666713443086881};

// 20-point rule, positive nodes.
constexpr double kGl20X[10] = {0.0765265211334973, 0.2277858511416451,
                               0.3737060887154195, 0.5108670019508271,
                               0.6360536807265150, 0.7463319064601508,
                               0.8391169718222188, 0.9122344282513259,
                               0.9639719272779138, 0.9931285991850949};
constexpr double kGl20W[10] = {0.1527533871307258, 0.1491729864726037,
                               0.1420961093183820, 0.1316886384491766,
                               0.1181945319615184, 0.1019301198172404,
                               0.0832767415767048, 0.0626720483341091,
                               0.0406014298003869, 0.0176140071391521};

double gl10(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double sum = 0;
  for (int i = 0; i < 5; ++i)
    sum += kGl10W[i] * (f(c - h * kGl10X[i]) + f(c + h * kGl10X[i]));
  return h * sum;
}

double gl20(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double sum = 0;
  for (int i = 0; i < 10; ++i)
    sum += kGl20W[i] * (f(c - h * kGl20X[i]) + f(c + h * kGl20X[i]));
  return h * sum;
}

double integrate_panel(const std::function<double(double)>& f, double a,
                       double b, double tol, int depth) {
  const double coarse = gl10(f, a, b);
  const double fine = gl20(f, a, b);
  if (std::abs(fine - coarse) <= tol || b - a < 1e-14) return fine;
  if (depth > 60)
    throw NumericError("quadrature failed to converge on [" +
                       std::to_string(a) + ", " + std::to_string(b) + "]");
  const double mid = 0.5 * (a + b);
  return integrate_panel(f, a, mid, 0.5 * tol, depth + 1) +
         integrate_panel(f, mid, b, 0.5 * tol, depth + 1);
}

}  // namespace

double normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw ValidationError("normal_quantile: p must be in (0, 1), got " +
                          std::to_string(p));
  const double pmin = p < 0.5 ? p : 1.0 - p;
  // Crude tail start, |error| < 3e-3, then Newton against erfc-based Phi.
  const double u = std::sqrt(-2.0 * std::log(pmin));
  double x = u - (2.30753 + 0.27061 * u) / (1.0 + 0.99229 * u + 0.04481 * u * u);
  if (p < 0.5) x = -x;
  for (int it = 0; it < 4; ++it) {
    const double d = normal_pdf(x);
    if (d < 1e-300) break;
    x -= (normal_cdf(x) - p) / d;
  }
  return x;
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol) {
  if (!(abs_tol > 0)) throw ValidationError("integrate: tolerance must be > 0");
  if (a == b) return 0.0;
  if (a > b) return -integrate(f, b, a, abs_tol);
  return integrate_panel(f, a, b, abs_tol, 0);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t k) {
  // splitmix64 finalizer over the combined state; decorrelates nearby keys.
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (k + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

SplitMix64::result_type SplitMix64::operator()() {
  std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

long long floor_index(double x) {
  // Tolerates values a few ulps under an integer from t*n arithmetic.
  return static_cast<long long>(std::floor(x + 1e-9));
}

}  // namespace nsquant
