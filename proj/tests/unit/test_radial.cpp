#include <gtest/gtest.h>

#include <cmath>

#include "prhf/radial.hpp"

using namespace prhf;

TEST(Grid, UniformWithDirichletEnds) {
  const auto g = build_grid(9, 10.0);
  EXPECT_DOUBLE_EQ(g.h, 1.0);
  EXPECT_DOUBLE_EQ(g.r[0], 1.0);
  EXPECT_DOUBLE_EQ(g.r[8], 9.0);
  EXPECT_THROW(build_grid(0, 1.0), BadGrid);
  EXPECT_THROW(build_grid(10, -1.0), BadGrid);
  EXPECT_THROW(build_grid(10, INFINITY), BadGrid);
}

TEST(Grid, LengthChecks) {
  const auto g = build_grid(10, 1.0);
  EXPECT_THROW(integrate(g, Eigen::VectorXd::Ones(9)), LengthMismatch);
  EXPECT_NEAR(integrate(g, Eigen::VectorXd::Ones(10)), 10.0 / 11.0, 1e-15);
}

TEST(Kinetic, CancellationFreeForm) {
  const double alpha = 1e-6;
  // sqrt(mu + m^2) - m ~ mu / (2 m) for mu << m^2
  EXPECT_NEAR(relativistic_kinetic(1.0, alpha) / (0.5 * alpha), 1.0, 1e-11);
  EXPECT_DOUBLE_EQ(relativistic_kinetic(0.0, alpha), 0.0);
  // ultrarelativistic: T ~ |p| - m
  EXPECT_NEAR(relativistic_kinetic(1e8, 1.0), std::sqrt(1e8 + 1.0) - 1.0, 1e-8);
}

TEST(Kinetic, BoundedAboveByNonRelativisticAndByMomentum) {
  const auto g = build_grid(80, 10.0);
  const double alpha = 0.3;
  const auto t = kinetic_operator(g, 0, alpha);
  const auto nr = nonrelativistic_kinetic_operator(g, 0, alpha);
  const auto p = momentum_magnitude(g, 0);
  // T <= alpha L / 2 and T <= |p| as operators
  const auto d1 = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(nr.matrix() - t.matrix()).eigenvalues();
  const auto d2 = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(p.matrix() - t.matrix()).eigenvalues();
  EXPECT_GE(d1.minCoeff(), -1e-10);
  EXPECT_GE(d2.minCoeff(), -1e-10);
}

TEST(Kinetic, MonotoneInMomentum) {
  double prev = -1.0;
  for (double mu = 0.0; mu < 1e6; mu = mu * 3 + 0.1) {
    const double v = relativistic_kinetic(mu, 0.1);
    EXPECT_GT(v, prev);
    prev = v;
  }
}

TEST(Kinetic, CentrifugalTermRaisesChannels) {
  const auto g = build_grid(100, 10.0);
  const auto l0 = channel_laplacian(g, 0).spectrum().values.minCoeff();
  const auto l1 = channel_laplacian(g, 1).spectrum().values.minCoeff();
  const auto l2 = channel_laplacian(g, 2).spectrum().values.minCoeff();
  EXPECT_LT(l0, l1);
  EXPECT_LT(l1, l2);
}

TEST(Kinetic, HydrogenNonRelativisticLevels) {
  // alpha^-1 (alpha L / 2 - Z alpha / r) is the Schroedinger hydrogen operator
  const double alpha = 1.0 / 137.036;
  AtomSystem sys;
  sys.alpha = alpha;
  const auto ops = make_one_body(build_grid(1500, 40.0), sys, 1, KineticKind::NonRelativistic);
  for (int ell = 0; ell <= 1; ++ell) {
    Eigen::MatrixXd h = ops.T(ell).matrix();
    h.diagonal() -= ops.nuclear;
    const double ev = lowest_eigenpairs(h, 1).values[0] / alpha;
    const double expected = -0.5 / ((ell + 1) * (ell + 1));
    EXPECT_NEAR(ev, expected, 2e-3 * std::abs(expected)) << "ell = " << ell;
  }
}

TEST(Kinetic, RelativisticHydrogenBelowNonRelativistic) {
  AtomSystem sys;
  sys.Z = 40;
  const auto grid = build_grid(600, 10.0);
  const auto rel = make_one_body(grid, sys, 0);
  const auto nr = make_one_body(grid, sys, 0, KineticKind::NonRelativistic);
  auto lowest = [](const OneBodyOperators& ops) {
    Eigen::MatrixXd h = ops.T(0).matrix();
    h.diagonal() -= ops.nuclear;
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(h).eigenvalues()[0];
  };
  EXPECT_LT(lowest(rel), lowest(nr));
  EXPECT_THROW(rel.T(1), DomainError);
}
