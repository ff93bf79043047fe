#include <gtest/gtest.h>

#include <random>

#include "prhf/functional.hpp"
#include "support/oracles.hpp"

using namespace prhf;

namespace {

OneBodyOperators ops_for(const RadialGrid& g, double Z, int ell_max = 1) {
  AtomSystem sys;
  sys.Z = Z;
  sys.N = 3;
  return make_one_body(g, sys, ell_max);
}

}  // namespace

TEST(Functional, EmptyDensityHasZeroEnergy) {
  const auto g = build_grid(50, 10.0);
  const auto e = total_energy(DensityMatrix{}, ops_for(g, 3));
  EXPECT_EQ(e.total, 0.0);
}

TEST(Functional, SingleElectronIsOneBody) {
  std::mt19937_64 rng(1);
  const auto g = build_grid(200, 20.0);
  const auto ops = ops_for(g, 3);
  const Eigen::VectorXd u = oracle::random_orbitals(rng, g, 1).col(0);
  const auto e = total_energy(single_orbital_density(0, 0, u, 1.0), ops);
  Eigen::MatrixXd h = ops.T(0).matrix();
  h.diagonal() -= ops.nuclear;
  const double expected = g.h * u.dot(h * u) / ops.sys.alpha;
  EXPECT_NEAR(e.total, expected, 1e-10 * std::abs(expected));
  EXPECT_NEAR(e.direct, e.exchange, 1e-12 * e.direct);
}

TEST(Functional, LowerBoundGuard) {
  EXPECT_THROW(check_lower_bound(-2.1e6, 2.0, 1e-3), LowerBoundViolated);
  EXPECT_NO_THROW(check_lower_bound(-1.9e6, 2.0, 1e-3));
}

TEST(Functional, EnergyIsExactlyQuadraticOnSegments) {
  std::mt19937_64 rng(2);
  const auto g = build_grid(150, 15.0);
  const auto ops = ops_for(g, 3);
  for (int trial = 0; trial < 10; ++trial) {
    auto g0 = oracle::random_density(rng, g, 2, 1, 2);
    auto g1 = oracle::random_density(rng, g, 2, 1, 2);
    const double t = std::min(g0.trace(), g1.trace());
    g0 = oracle::with_trace(g0, t);
    g1 = oracle::with_trace(g1, t);
    const auto line = line_coefficients(g0, g1, ops);
    EXPECT_NEAR(line.start.total + line.a + line.b, line.end.total, 1e-12 * std::abs(line.end.total));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int k = 0; k < 5; ++k) {
      const double s = unit(rng);
      const auto mix = combine_densities({{1.0 - s, &g0}, {s, &g1}}, g);
      const double e = total_energy(mix, ops).total;
      EXPECT_NEAR(e, line.start.total + line.a * s + line.b * s * s, 1e-9 * (1.0 + std::abs(e))) << "s = " << s;
    }
  }
}

TEST(Functional, LineCoefficientsRequireEqualTraces) {
  std::mt19937_64 rng(3);
  const auto g = build_grid(60, 10.0);
  const auto g0 = oracle::random_density(rng, g, 2, 0, 1);
  const auto g1 = oracle::with_trace(g0, g0.trace() * 0.5);
  EXPECT_THROW(line_coefficients(g0, g1, ops_for(g, 3)), TraceMismatch);
}

TEST(Functional, OptimalStepMatchesScan) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> d(-3.0, 3.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double a = d(rng), b = d(rng);
    const double t = optimal_step(a, b);
    ASSERT_GE(t, 0.0);
    ASSERT_LE(t, 1.0);
    const double best = a * t + b * t * t;
    for (int k = 0; k <= 100; ++k) {
      const double s = k / 100.0;
      EXPECT_LE(best, a * s + b * s * s + 1e-15);
    }
  }
}

TEST(Functional, RankTwoIdentity) {
  std::mt19937_64 rng(5);
  const auto g = build_grid(150, 15.0);
  const auto ops = ops_for(g, 3);
  const auto gamma = oracle::random_density(rng, g, 2, 1, 1);
  // directions orthogonal to the occupied s orbitals of each spin
  const Eigen::MatrixXd extra = oracle::random_orbitals(rng, g, 4);
  RankOnePerturbation p1{0, Eigen::VectorXd(), 0.4}, p2{0, Eigen::VectorXd(), 0.7};
  for (auto* p : {&p1, &p2}) {
    Eigen::VectorXd u = extra.col(p == &p1 ? 0 : 1);
    for (int pass = 0; pass < 2; ++pass) {
      const auto* b = gamma.find(0, 0);
      u -= b->orbitals * (g.h * b->orbitals.transpose() * u);
      if (p == &p2) u -= p1.u * (g.h * p1.u.dot(u));
    }
    p->u = u / norm(g, u);
  }
  const double delta = rank2_delta(gamma, p1, p2, ops);
  const double direct = total_energy(perturbed_density(gamma, p1, p2, g), ops).total - total_energy(gamma, ops).total;
  EXPECT_NEAR(delta, direct, 1e-10 * std::abs(direct));
}

TEST(Functional, PerturbationOutsideAdmissibleSetIsRejected) {
  std::mt19937_64 rng(6);
  const auto g = build_grid(80, 10.0);
  const Eigen::MatrixXd u = oracle::random_orbitals(rng, g, 2);
  const auto gamma = single_orbital_density(0, 0, u.col(0), 1.0);
  // adding more of an already fully occupied orbital exceeds 1
  const RankOnePerturbation p1{0, u.col(0), 0.5}, p2{0, u.col(1), 0.5};
  EXPECT_THROW(perturbed_density(gamma, p1, p2, g), NotAdmissible);
}
