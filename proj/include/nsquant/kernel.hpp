#pragma once

#include <functional>
#include <memory>
#include <string>

namespace nsquant {

// Weight kernels for local fitting.  Built-in kernels are symmetric densities
// supported on [-1, 1]; derived kernels (bias-reducing combinations) may have
// wider support and need not be nonnegative.
class KernelSpec {
 public:
  static KernelSpec epanechnikov();
  static KernelSpec triweight();
  // name must be "epanechnikov" or "triweight"; throws ValidationError otherwise.
  static KernelSpec by_name(const std::string& name);
  // Arbitrary evaluator; symmetric_density marks membership in the class used
  // for local fitting (symmetric, integrates to 1, support [-radius, radius]).
  static KernelSpec custom(std::string name, std::function<double(double)> fn,
                           double support_radius, bool symmetric_density);

  double operator()(double u) const;
  const std::string& name() const { return name_; }
  double support_radius() const { return radius_; }
  bool symmetric_density() const { return symmetric_density_; }

 private:
  enum class Builtin { none, epanechnikov, triweight };
  KernelSpec(Builtin b, std::string name, std::function<double(double)> fn,
             double radius, bool symmetric_density);

  Builtin builtin_;
  std::string name_;
  std::function<double(double)> fn_;
  double radius_;
  bool symmetric_density_;
};

// 2K(u) - 2^{-1/2} K(u / sqrt(2)): integrates to 1, kills the second moment.
KernelSpec jackknife_kernel(const KernelSpec& k);

// One-sided moment convention: mu_j = 2*int_0^1 u^j K(u) du for even j,
// int_0^1 u^j K(u) du for odd j.  phi = int K^2 over the support.
double kernel_moment(const KernelSpec& k, int j);
double kernel_phi(const KernelSpec& k);

struct BoundaryConstants {
  double bias;      // (mu2^2 - 4 mu1 mu3) / (mu2 - 4 mu1^2)
  double variance;  // 4 int_0^1 (mu2 - 2 mu1 u)^2 K^2 du / (mu2 - 4 mu1^2)^2
};

BoundaryConstants boundary_constants(const KernelSpec& k);

// Shared guts of boundary_constants, exposed so the degenerate-denominator
// guard is testable with synthetic moments.
BoundaryConstants boundary_constants_from(double mu1, double mu2, double mu3,
                                          double weighted_square_integral);

// Precomputed constants for one kernel.  Immutable after construction.
class KernelConstants {
 public:
  explicit KernelConstants(const KernelSpec& k);
  double mu(int j) const;
  double phi() const { return phi_; }
  const BoundaryConstants& boundary() const { return boundary_; }

 private:
  double mu_[5];
  double phi_;
  BoundaryConstants boundary_;
};

}  // namespace nsquant
