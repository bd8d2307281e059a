#include <doctest.h>

#include <cmath>

#include "nsquant/errors.hpp"
#include "nsquant/kernel.hpp"
#include "nsquant/mathutil.hpp"
#include "oracles.hpp"

using namespace nsquant;

TEST_SUITE_BEGIN("kernel");

TEST_CASE("epanechnikov moments match closed forms") {
  const KernelSpec k = KernelSpec::epanechnikov();
  CHECK(kernel_moment(k, 0) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(kernel_moment(k, 1) == doctest::Approx(0.1875).epsilon(1e-10));
  CHECK(kernel_moment(k, 2) == doctest::Approx(0.2).epsilon(1e-10));
  CHECK(kernel_moment(k, 3) == doctest::Approx(0.0625).epsilon(1e-10));
  CHECK(kernel_phi(k) == doctest::Approx(0.6).epsilon(1e-10));
}

TEST_CASE("moments agree with an independent Simpson oracle") {
  for (const KernelSpec& k :
       {KernelSpec::epanechnikov(), KernelSpec::triweight()}) {
    for (int j = 0; j <= 4; ++j) {
      const double one_sided =
          oracles::simpson([&](double u) { return std::pow(u, j) * k(u); },
                           0.0, 1.0);
      const double want = j % 2 == 0 ? 2.0 * one_sided : one_sided;
      CHECK(kernel_moment(k, j) == doctest::Approx(want).epsilon(1e-9));
    }
    const double phi_want =
        oracles::simpson([&](double u) { return k(u) * k(u); }, -1.0, 1.0);
    CHECK(kernel_phi(k) == doctest::Approx(phi_want).epsilon(1e-9));
  }
}

TEST_CASE("uniform custom kernel") {
  const KernelSpec u = KernelSpec::custom(
      "uniform", [](double) { return 0.5; }, 1.0, true);
  CHECK(kernel_phi(u) == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(kernel_moment(u, 0) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(kernel_moment(u, 2) == doctest::Approx(1.0 / 3.0).epsilon(1e-10));
  CHECK(u(1.5) == 0.0);  // outside support
}

TEST_CASE("jackknife kernel integrates to one and kills the second moment") {
  const KernelSpec star = jackknife_kernel(KernelSpec::epanechnikov());
  const double r = star.support_radius();
  CHECK(r == doctest::Approx(std::sqrt(2.0)));
  const double total = integrate([&](double x) { return star(x); }, -r, r);
  const double second =
      integrate([&](double x) { return x * x * star(x); }, -r, r);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(second == doctest::Approx(0.0).epsilon(1e-10));
  // 2K(0) - K(0)/sqrt(2) for the Epanechnikov peak 0.75.
  CHECK(star(0.0) == doctest::Approx(0.9696699141100894).epsilon(1e-12));
  CHECK(kernel_phi(star) ==
        doctest::Approx(0.9150757595082504).epsilon(1e-9));
}

TEST_CASE("jackknife is the stated combination pointwise") {
  const KernelSpec base = KernelSpec::triweight();
  const KernelSpec star = jackknife_kernel(base);
  for (double u : {-1.3, -0.7, 0.0, 0.2, 0.9, 1.1}) {
    const double want = 2.0 * base(u) - base(u / std::sqrt(2.0)) / std::sqrt(2.0);
    CHECK(star(u) == doctest::Approx(want).epsilon(1e-14));
  }
}

TEST_CASE("boundary constants for the epanechnikov kernel") {
  const BoundaryConstants c = boundary_constants(KernelSpec::epanechnikov());
  CHECK(c.bias == doctest::Approx(-11.0 / 95.0).epsilon(1e-10));
  CHECK(c.variance == doctest::Approx(4.497981796596756).epsilon(1e-8));

  // Independent evaluation of both definitions.
  const KernelSpec k = KernelSpec::epanechnikov();
  const double mu1 = oracles::simpson([&](double u) { return u * k(u); }, 0, 1);
  const double mu2 =
      2 * oracles::simpson([&](double u) { return u * u * k(u); }, 0, 1);
  const double mu3 =
      oracles::simpson([&](double u) { return u * u * u * k(u); }, 0, 1);
  const double den = mu2 - 4 * mu1 * mu1;
  CHECK(c.bias == doctest::Approx((mu2 * mu2 - 4 * mu1 * mu3) / den)
                      .epsilon(1e-9));
  const double wsq = oracles::simpson(
      [&](double u) {
        const double w = mu2 - 2 * mu1 * u;
        return w * w * k(u) * k(u);
      },
      0, 1);
  CHECK(c.variance == doctest::Approx(4 * wsq / (den * den)).epsilon(1e-8));
}

TEST_CASE("degenerate boundary denominator is rejected") {
  // mu2 == 4*mu1^2 exactly: the two-spike limit of a symmetric density.
  CHECK_THROWS_AS(boundary_constants_from(0.5, 1.0, 0.1, 0.3), NumericError);
  CHECK_NOTHROW(boundary_constants_from(0.1875, 0.2, 0.0625, 0.0267));
}

TEST_CASE("odd moments of the symmetric density vanish two-sided") {
  for (const KernelSpec& k :
       {KernelSpec::epanechnikov(), KernelSpec::triweight()}) {
    const double two_sided =
        integrate([&](double u) { return u * k(u); }, -1.0, 1.0);
    CHECK(two_sided == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("constants cache matches the free functions") {
  const KernelSpec k = KernelSpec::triweight();
  const KernelConstants c(k);
  for (int j = 0; j <= 4; ++j)
    CHECK(c.mu(j) == kernel_moment(k, j));
  CHECK(c.phi() == kernel_phi(k));
  CHECK(c.boundary().bias == boundary_constants(k).bias);
}

TEST_CASE("kernel lookup by name") {
  CHECK(KernelSpec::by_name("epanechnikov").name() == "epanechnikov");
  CHECK(KernelSpec::by_name("triweight").name() == "triweight");
  CHECK_THROWS_AS(KernelSpec::by_name("gaussian"), ValidationError);
}

TEST_SUITE_END();
