#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "prhf/greens.hpp"
#include "prhf/verify.hpp"
#include "support/oracles.hpp"

using namespace prhf;

TEST(Bessel, ReferenceValues) {
  EXPECT_NEAR(bessel_k(0, 1.0), 0.42102443824070834, 1e-15);
  EXPECT_NEAR(bessel_k(1, 1.0), 0.60190723019723457, 1e-15);
  EXPECT_NEAR(bessel_k(2, 1.0), 1.6248388986351774, 1e-14);
  for (double t : {1e-3, 0.3, 5.0, 40.0}) {
    for (int order : {0, 1, 2}) {
      const double ref = oracle::bessel_k_integral(order, t);
      EXPECT_NEAR(bessel_k(order, t), ref, 1e-10 * ref) << "order " << order << ", t " << t;
    }
  }
}

TEST(Bessel, UnderflowAndDomain) {
  EXPECT_EQ(bessel_k(1, 701.0), 0.0);
  EXPECT_GT(bessel_k(1, 699.0), 0.0);
  EXPECT_THROW(bessel_k(0, 0.0), DomainError);
  EXPECT_THROW(bessel_k(1, -1.0), DomainError);
  EXPECT_THROW(bessel_k(3, 1.0), DomainError);
}

TEST(Bessel, RecurrenceAndSmallArgumentBound) {
  for (double t = 1e-3; t < 1e3; t *= 1.7) {
    EXPECT_NEAR(bessel_k(2, t), bessel_k(0, t) + 2.0 / t * bessel_k(1, t), 1e-12 * bessel_k(2, t));
    EXPECT_LE(t * bessel_k(1, t), 1.0);
  }
}

TEST(Greens, DecayRateIdentity) {
  const double alpha = 0.5, m = 2.0;
  for (double E : {-1.9, -1.0, -0.5, -1e-3}) {
    const double nu = nu_of_energy(E, alpha);
    EXPECT_NEAR((E + m) * (E + m), m * m - nu * nu, 1e-13);
    EXPECT_GT(nu, 0.0);
  }
  EXPECT_THROW(nu_of_energy(0.0, alpha), DomainError);
  EXPECT_THROW(nu_of_energy(-m, alpha), DomainError);
}

TEST(Greens, GaussianConvolution) {
  const auto mesh = make_kernel_mesh(1.0, 1e-9, 15.0);
  const auto c = radial_convolution([](double u) { return oracle::gaussian3(0.4, u); },
                                    [](double u) { return oracle::gaussian3(1.1, u); }, mesh);
  for (int j = 0; j < mesh.size(); ++j) {
    EXPECT_NEAR(c.values[j], oracle::gaussian3(1.5, mesh.node(j)), 1e-8);
  }
}

TEST(Greens, ConvolutionIsSymmetric) {
  const auto mesh = make_kernel_mesh(1.0, 1e-6, 20.0);
  const RadialFunction f = [](double u) { return std::exp(-u) / u; };
  const RadialFunction g = [](double u) { return std::exp(-0.5 * u * u); };
  for (double r : {0.01, 0.5, 2.0, 7.0}) {
    const double fg = convolve_at(f, g, mesh, r);
    EXPECT_NEAR(fg, convolve_at(g, f, mesh, r), 1e-9 * std::abs(fg)) << "r = " << r;
  }
}

TEST(Greens, ConvolutionMassIsProductOfMasses) {
  const auto mesh = make_kernel_mesh(1.0, 1e-9, 40.0);
  // both inputs carry unit mass under 4 pi u^2 du
  const RadialFunction f = [](double u) { return std::exp(-u) / (8.0 * std::numbers::pi); };
  const RadialFunction g = [](double u) { return oracle::gaussian3(0.5, u); };
  const auto& q = detail::gauss8();
  double mass = 0.0;
  for (int j = 0; j < mesh.intervals; ++j) {
    for (std::size_t i = 0; i < 8; ++i) {
      const double x = mesh.x_node(j) + q.t[i] * mesh.dx;
      const double u = mesh.u_of(x);
      mass += q.w[i] * mesh.dx * mesh.dudx(x) * convolve_at(f, g, mesh, u) * 4.0 * std::numbers::pi * u * u;
    }
  }
  EXPECT_NEAR(mass, 1.0, 1e-6);
}

TEST(Greens, BesselMomentClosedForm) {
  // I(m) = int_0^inf s K_1(m s) e^{nu s} ds = -d/dm [arccos(-nu/m) / sqrt(m^2 - nu^2)]
  const double nu = 0.8;
  for (double m : {1.0, 2.0, 5.0}) {
    const double s = std::sqrt(m * m - nu * nu);
    const double a = std::acos(-nu / m);
    const double da = -nu / (m * s);
    const double expected = -(da * s - a * m / s) / (s * s);
    EXPECT_NEAR(bessel_exponential_moment(m, nu), expected, 1e-9 * expected) << "m = " << m;
  }
  // frozen high-precision value at m = 1, nu = 0.8
  EXPECT_NEAR(bessel_exponential_moment(1.0, 0.8), 13.787460855539399, 1e-9);
}

TEST(Greens, KernelMassIsInverseEnergy) {
  // int G_E = (T(0) - E)^-1 = -1/E
  for (double E : {-0.5, -0.3}) {
    const auto k = greens_kernel(E, 0.5);
    EXPECT_NEAR(weighted_kernel_mass(k, 0.0), -1.0 / E, 1e-4 / -E) << "E = " << E;
  }
}

TEST(Greens, KernelPositiveAndMajorized) {
  const auto k = greens_kernel(-1.0, 0.4);
  const auto s = sample_kernel(k);
  for (Eigen::Index j = 0; j < s.u.size(); ++j) {
    ASSERT_GT(s.total[j], 0.0) << "u = " << s.u[j];
    ASSERT_LE(s.total[j], k.est1_bound(s.u[j]) * (1.0 + 1e-12)) << "u = " << s.u[j];
  }
}

TEST(Greens, ResolventInvertsShiftedKinetic) {
  const auto k = greens_kernel(-0.5, 0.5);
  const auto grid = build_grid(300, 20.0);
  for (const auto& c : resolvent_checks(k, grid)) {
    EXPECT_LT(c.round_trip, 1e-3);
    EXPECT_LT(c.dense, 1e-3);
  }
}
