#pragma once

#include <cstdint>
#include <functional>
#include <limits>

namespace nsquant {

double normal_pdf(double x);
double normal_cdf(double x);

// Inverse standard normal CDF. Throws ValidationError unless 0 < p < 1.
double normal_quantile(double p);

// Adaptive composite Gauss-Legendre quadrature to absolute tolerance.
// Throws NumericError if the tolerance cannot be met.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol = 1e-12);

// Counter-based pseudo-random plumbing.  mix_seed(seed, k) gives the k-th
// substream key; SplitMix64 is a URBG over the mixed state.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t k);

class SplitMix64 {
 public:
  using result_type = std::uint64_t;
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }
  result_type operator()();

 private:
  std::uint64_t state_;
};

// floor(x) robust to values sitting a hair below an integer from rounding.
long long floor_index(double x);

}  // namespace nsquant
