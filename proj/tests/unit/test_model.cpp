#include <gtest/gtest.h>

#include "prhf/model.hpp"

using namespace prhf;

namespace {

AtomSystem atom(double Z, int N, double alpha = 1.0 / 137.036) {
  AtomSystem s;
  s.Z = Z;
  s.N = N;
  s.alpha = alpha;
  return s;
}

}  // namespace

TEST(Model, AcceptsCouplingJustBelowCritical) {
  const double alpha = 1.0 / 137.036;
  EXPECT_NO_THROW(validate_system(atom((kCriticalCoupling - 1e-12) / alpha, 1, alpha)));
}

TEST(Model, RejectsCriticalAndSupercriticalCoupling) {
  EXPECT_THROW(validate_system(atom(88, 1)), SubcriticalityViolated);
  EXPECT_THROW(validate_system(atom(1.0, 1, kCriticalCoupling)), SubcriticalityViolated);
  EXPECT_THROW(validate_system(atom(2.0, 1, kCriticalCoupling)), InvalidSystem);
}

TEST(Model, RejectsBadCountsAndParameters) {
  EXPECT_THROW(validate_system(atom(2, 0)), BadCount);
  EXPECT_THROW(validate_system(atom(2, -1)), BadCount);
  EXPECT_THROW(validate_system(atom(2, 2, 0.0)), InvalidSystem);
  EXPECT_THROW(validate_system(atom(-1, 1)), InvalidSystem);
  auto s = atom(2, 2);
  s.q = 0;
  EXPECT_THROW(validate_system(s), InvalidSystem);
}

TEST(Model, DefaultShellsHoldNElectrons) {
  for (int N = 1; N <= 10; ++N) {
    const auto shells = default_shells(atom(10, N), true);
    double total = 0.0;
    for (const auto& s : shells) total += s.occupation;
    EXPECT_DOUBLE_EQ(total, N);
    EXPECT_NO_THROW(validate_shells(atom(10, N), shells));
  }
}

TEST(Model, OptionsValidation) {
  SolverOptions o;
  EXPECT_NO_THROW(validate_options(o));
  o.n = 8;
  EXPECT_THROW(validate_options(o), BadOptions);
  o = SolverOptions{};
  o.r_max = -1;
  EXPECT_THROW(validate_options(o), BadOptions);
  o = SolverOptions{};
  o.energy_tol = 0;
  EXPECT_THROW(validate_options(o), BadOptions);
}
