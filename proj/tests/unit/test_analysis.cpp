#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "prhf/analysis.hpp"
#include "prhf/verify.hpp"

using namespace prhf;

namespace {

Eigen::VectorXd profile(const RadialGrid& g, double beta, double modulation) {
  Eigen::VectorXd p(g.n);
  for (int i = 0; i < g.n; ++i) {
    const double r = g.r[i];
    p[i] = r * std::exp(-beta * r) * (1.0 + modulation * std::cos(r));
  }
  return p;
}

SCFResult helium() {
  AtomSystem sys;
  sys.Z = 2;
  sys.N = 2;
  SolverOptions opt;
  opt.n = 300;
  opt.r_max = 20.0;
  return solve_scf(sys, opt);
}

}  // namespace

TEST(Decay, PureExponential) {
  const auto g = build_grid(1200, 60.0);
  const auto fit = decay_fit(profile(g, 0.5, 0.0), -0.1 * 1e-2, g, 1e-2);
  EXPECT_NEAR(fit.beta_hat, 0.5, 1e-3);
  EXPECT_NEAR(fit.window.r2, 42.0, 1e-12);
  EXPECT_NEAR(fit.window.r1, 24.0, 1e-12);
  EXPECT_GE(fit.e_folds, 6.0);
}

TEST(Decay, ModulatedExponential) {
  const auto g = build_grid(1200, 60.0);
  const auto fit = decay_fit(profile(g, 0.5, 0.1), -0.1 * 1e-2, g, 1e-2);
  EXPECT_NEAR(fit.beta_hat, 0.5, 2e-2);
}

TEST(Decay, NoisyWindowsAreRejected) {
  const auto g = build_grid(400, 20.0);
  const auto p = profile(g, 0.5, 0.0);
  // reaches past 0.75 r_max
  EXPECT_THROW(decay_fit(p, -1e-3, g, 1e-2, FitWindow{10.0, 19.5}), WindowTooNoisy);
  // too few e-folds
  EXPECT_THROW(decay_fit(p, -1e-3, g, 1e-2, FitWindow{5.0, 8.0}), WindowTooNoisy);
  EXPECT_THROW(decay_fit(p, -1e-3, g, 1e-2, FitWindow{8.0, 5.0}), DomainError);
  // a fast decay hits the noise floor inside the window
  EXPECT_THROW(decay_fit(profile(g, 3.0, 0.0), -1e-3, g, 1e-2, FitWindow{5.0, 14.0}), WindowTooNoisy);
}

TEST(Certificate, ConvergedHeliumPasses) {
  const auto res = helium();
  const auto cert = minimizer_certificate(res);
  EXPECT_TRUE(cert.passed());
  EXPECT_EQ(cert.clauses.size(), 5u);
  EXPECT_NO_THROW(enforce(cert));
}

TEST(Certificate, DeoccupiedHomoFailsAufbau) {
  const auto res = helium();
  DensityMatrix gamma = res.density;
  // move the spin-1 electron from 1s to 2s
  OrbitalBlock b = *gamma.find(0, 1);
  const auto& ch = res.spectrum.channels[1];
  b.orbitals.col(0) = ch.vectors.col(1);
  gamma.set_block(b);
  const auto fock = fock_build(gamma, res.ops);
  const auto spec = diagonalize(fock, 6, res.ops.grid);
  const auto cert = minimizer_certificate(gamma, fock, spec, res.report.sys, res.ops.grid);
  const auto failed = cert.failed();
  EXPECT_NE(std::find(failed.begin(), failed.end(), "aufbau"), failed.end());
  EXPECT_THROW(enforce(cert), CertificateFailure);
}

TEST(Certificate, FractionalOccupationFailsIdempotency) {
  const auto res = helium();
  DensityMatrix gamma = res.density;
  OrbitalBlock b = *gamma.find(0, 0);
  b.occupations[0] = 0.5;
  gamma.set_block(b);
  const auto fock = fock_build(gamma, res.ops);
  const auto spec = diagonalize(fock, 6, res.ops.grid);
  const auto cert = minimizer_certificate(gamma, fock, spec, res.report.sys, res.ops.grid);
  const auto failed = cert.failed();
  EXPECT_NE(std::find(failed.begin(), failed.end(), "idempotency"), failed.end());
  EXPECT_NE(std::find(failed.begin(), failed.end(), "trace"), failed.end());
}

TEST(Decay, HeliumSuitePasses) {
  AtomSystem sys;
  sys.Z = 2;
  sys.N = 2;
  SolverOptions opt;
  opt.n = 600;
  opt.r_max = 20.0;
  const auto suite = decay_suite(solve_scf(sys, opt));
  EXPECT_EQ(suite.status, SuiteStatus::Pass) << suite.details.dump();
}

TEST(Kato, InequalityHoldsForRandomFunctions) {
  std::mt19937_64 rng(9);
  const auto g = build_grid(300, 20.0);
  const auto abs_p = momentum_magnitude(g, 0);
  for (int k = 0; k < 20; ++k) {
    const auto probe = kato_probe(random_s_function(rng, g), g, abs_p);
    EXPECT_LE(probe.lhs, probe.rhs * (1.0 + 5e-3));
    EXPECT_GT(probe.lhs, 0.0);
  }
}

TEST(Herbst, BoundHoldsAcrossCharges) {
  const auto g = build_grid(400, 20.0);
  for (double Z : {1.0, 30.0, 80.0}) {
    AtomSystem sys;
    sys.Z = Z;
    const auto h = herbst_bound_check(sys, g, 1);
    EXPECT_TRUE(h.passed);
    EXPECT_GE(h.lowest, h.bound);
    EXPECT_LT(h.lowest, 0.0);
  }
}

TEST(Binding, HydrogenLikeLithiumIons) {
  SolverOptions opt;
  opt.n = 300;
  opt.r_max = 20.0;
  const auto rows = binding_monotonicity(3.0, 1.0 / 137.036, 2, opt);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_TRUE(rows[1].below_previous);
  EXPECT_LT(rows[1].energy, rows[0].energy);
  EXPECT_EQ(binding_suite(rows).status, SuiteStatus::Pass);
}
