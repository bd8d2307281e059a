#include "nsquant/kernel.hpp"

#include <cmath>
#include <utility>

#include "nsquant/errors.hpp"
#include "nsquant/mathutil.hpp"

namespace nsquant {

namespace {

double epanechnikov_eval(double u) {
  const double a = std::abs(u);
  return a < 1.0 ? 0.75 * (1.0 - u * u) : 0.0;
}

double triweight_eval(double u) {
  const double a = std::abs(u);
  if (a >= 1.0) return 0.0;
  const double w = 1.0 - u * u;
  return (35.0 / 32.0) * w * w * w;
}

}  // namespace

KernelSpec::KernelSpec(Builtin b, std::string name,
                       std::function<double(double)> fn, double radius,
                       bool symmetric_density)
    : builtin_(b),
      name_(std::move(name)),
      fn_(std::move(fn)),
      radius_(radius),
      symmetric_density_(symmetric_density) {}

KernelSpec KernelSpec::epanechnikov() {
  return KernelSpec(Builtin::epanechnikov, "epanechnikov", nullptr, 1.0, true);
}

KernelSpec KernelSpec::triweight() {
  return KernelSpec(Builtin::triweight, "triweight", nullptr, 1.0, true);
}

KernelSpec KernelSpec::by_name(const std::string& name) {
  if (name == "epanechnikov") return epanechnikov();
  if (name == "triweight") return triweight();
  throw ValidationError("unknown kernel '" + name +
                        "' (expected epanechnikov or triweight)");
}

KernelSpec KernelSpec::custom(std::string name,
                              std::function<double(double)> fn,
                              double support_radius, bool symmetric_density) {
  if (!fn) throw ValidationError("custom kernel needs an evaluator");
  if (!(support_radius > 0))
    throw ValidationError("custom kernel needs a positive support radius");
  return KernelSpec(Builtin::none, std::move(name), std::move(fn),
                    support_radius, symmetric_density);
}

double KernelSpec::operator()(double u) const {
  switch (builtin_) {
    case Builtin::epanechnikov:
      return epanechnikov_eval(u);
    case Builtin::triweight:
      return triweight_eval(u);
    case Builtin::none:
      break;
  }
  return std::abs(u) <= radius_ ? fn_(u) : 0.0;
}

KernelSpec jackknife_kernel(const KernelSpec& k) {
  if (!k.symmetric_density())
    throw ValidationError("jackknife kernel requires a base kernel from the "
                          "symmetric-density class");
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  KernelSpec base = k;
  return KernelSpec::custom(
      k.name() + "*",
      [base, inv_sqrt2](double u) {
        return 2.0 * base(u) - inv_sqrt2 * base(u * inv_sqrt2);
      },
      k.support_radius() * std::sqrt(2.0), /*symmetric_density=*/false);
}

double kernel_moment(const KernelSpec& k, int j) {
  if (j < 0) throw ValidationError("kernel moment order must be >= 0");
  const double r = k.support_radius();
  const double one_sided =
      integrate([&k, j](double u) { return std::pow(u, j) * k(u); }, 0.0, r);
  return j % 2 == 0 ? 2.0 * one_sided : one_sided;
}

double kernel_phi(const KernelSpec& k) {
  const double r = k.support_radius();
  return integrate([&k](double u) { return k(u) * k(u); }, -r, r);
}

BoundaryConstants boundary_constants_from(double mu1, double mu2, double mu3,
                                          double weighted_square_integral) {
  const double den = mu2 - 4.0 * mu1 * mu1;
  if (std::abs(den) < 1e-10)
    throw NumericError(
        "degenerate boundary constants: mu2 - 4*mu1^2 vanishes");
  BoundaryConstants c;
  c.bias = (mu2 * mu2 - 4.0 * mu1 * mu3) / den;
  c.variance = 4.0 * weighted_square_integral / (den * den);
  return c;
}

BoundaryConstants boundary_constants(const KernelSpec& k) {
  if (!k.symmetric_density())
    throw ValidationError(
        "boundary constants are defined for symmetric-density kernels");
  const double mu1 = kernel_moment(k, 1);
  const double mu2 = kernel_moment(k, 2);
  const double mu3 = kernel_moment(k, 3);
  const double wsq = integrate(
      [&k, mu1, mu2](double u) {
        const double w = mu2 - 2.0 * mu1 * u;
        return w * w * k(u) * k(u);
      },
      0.0, k.support_radius());
  return boundary_constants_from(mu1, mu2, mu3, wsq);
}

KernelConstants::KernelConstants(const KernelSpec& k)
    : phi_(kernel_phi(k)), boundary_(boundary_constants(k)) {
  for (int j = 0; j <= 4; ++j) mu_[j] = kernel_moment(k, j);
}

double KernelConstants::mu(int j) const {
  if (j < 0 || j > 4) throw ValidationError("kernel moment cache covers j=0..4");
  return mu_[j];
}

}  // namespace nsquant
