#pragma once

// The Hartree-Fock energy functional on density matrices,
//   E(gamma) = alpha^-1 Tr[(T - V) gamma] + D(gamma) - Ex(gamma),
// the exact change under a rank-two perturbation, and the quadratic
// restriction of E to a segment used by the optimal-damping line search.

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "prhf/coulomb.hpp"
#include "prhf/fock.hpp"
#include "prhf/radial.hpp"

namespace prhf {

struct EnergyBreakdown {
  double kinetic = 0.0;  ///< alpha^-1 Tr[T gamma]
  double nuclear = 0.0;  ///< alpha^-1 Tr[V gamma]
  double direct = 0.0;
  double exchange = 0.0;
  double total = 0.0;
};

/// Throws LowerBoundViolated if E < -alpha^-2 Tr(gamma) beyond 1e-12
/// relative slack.
inline void check_lower_bound(double total, double trace, double alpha) {
  const double bound = -trace / (alpha * alpha);
  if (total < bound - 1e-12 * (1.0 + std::abs(bound))) {
    throw LowerBoundViolated("energy " + std::to_string(total) + " below -alpha^-2 Tr(gamma) = " +
                             std::to_string(bound));
  }
}

inline EnergyBreakdown total_energy(const DensityMatrix& gamma, const OneBodyOperators& ops) {
  const auto terms = energy_terms(gamma, ops);
  const double inv_alpha = ops.sys.inv_alpha();
  EnergyBreakdown e;
  e.kinetic = inv_alpha * terms.kinetic_trace;
  e.nuclear = inv_alpha * terms.potential_trace;
  e.direct = terms.direct;
  e.exchange = terms.exchange;
  e.total = e.kinetic - e.nuclear + e.direct - e.exchange;
  if (!std::isfinite(e.total)) throw NonFiniteEnergy("non-finite total energy");
  check_lower_bound(e.total, gamma.trace(), ops.sys.alpha);
  return e;
}

/// An s-channel orbital u added with weight eps: gamma + eps |u><u|.
struct RankOnePerturbation {
  int spin = 0;
  Eigen::VectorXd u;
  double eps = 0.0;
};

inline DensityMatrix single_orbital_density(int ell, int spin, const Eigen::VectorXd& u, double occupation) {
  DensityMatrix g;
  OrbitalBlock b;
  b.ell = ell;
  b.spin = spin;
  b.orbitals = u;
  b.occupations = Eigen::VectorXd::Constant(1, occupation);
  g.set_block(std::move(b));
  return g;
}

/// gamma + eps1 |u1><u1| + eps2 |u2><u2| in natural-orbital form; throws
/// NotAdmissible unless the result satisfies 0 <= gamma <= 1.
inline DensityMatrix perturbed_density(const DensityMatrix& gamma, const RankOnePerturbation& p1,
                                       const RankOnePerturbation& p2, const RadialGrid& grid) {
  const auto g1 = single_orbital_density(0, p1.spin, p1.u, 1.0);
  const auto g2 = single_orbital_density(0, p2.spin, p2.u, 1.0);
  const auto out = combine_densities({{1.0, &gamma}, {p1.eps, &g1}, {p2.eps, &g2}}, grid, 1e-15);
  for (const auto& b : out.blocks) {
    for (Eigen::Index a = 0; a < b.size(); ++a) {
      const double lam = b.lambda(a);
      if (lam < -1e-12 || lam > 1.0 + 1e-12) {
        throw NotAdmissible("perturbed density has eigenvalue " + std::to_string(lam) + " outside [0, 1]");
      }
    }
  }
  return out;
}

/// Antisymmetrized repulsion ½ ∫∫ |u1(x)u2(y) - u2(x)u1(y)|^2 / |x-y| of two
/// s-orbitals; the exchange part vanishes across spins.
inline double antisymmetrized_repulsion(const RankOnePerturbation& p1, const RankOnePerturbation& p2,
                                        const RadialGrid& grid) {
  const Eigen::VectorXd d1 = p1.u.cwiseAbs2();
  const Eigen::VectorXd d2 = p2.u.cwiseAbs2();
  double r = grid.h * d1.dot(multipole_potential(d2, 0, grid));
  if (p1.spin == p2.spin) {
    const Eigen::VectorXd x = p1.u.cwiseProduct(p2.u);
    r -= grid.h * x.dot(multipole_potential(x, 0, grid));
  }
  return r;
}

/// E(gamma~) - E(gamma) for gamma~ = gamma + eps1 u1 u1* + eps2 u2 u2*:
///   alpha^-1 eps1 <u1, h u1> + alpha^-1 eps2 <u2, h u2> + eps1 eps2 R_u.
/// Only s-channel perturbations are supported: the identity is for single
/// orbitals, while a column in an ell > 0 channel carries 2 ell + 1 of them.
inline double rank2_delta(const DensityMatrix& gamma, const RankOnePerturbation& p1, const RankOnePerturbation& p2,
                          const OneBodyOperators& ops, const FockOperator* prebuilt = nullptr) {
  const auto& grid = ops.grid;
  check_length(grid, p1.u.size());
  check_length(grid, p2.u.size());
  perturbed_density(gamma, p1, p2, grid);
  std::optional<FockOperator> built;
  if (!prebuilt) built = fock_build(gamma, ops);
  const FockOperator& h = prebuilt ? *prebuilt : *built;
  auto expect = [&](const RankOnePerturbation& p) {
    return grid.h * p.u.dot(h.channel(0, p.spin).matrix * p.u);
  };
  const double inv_alpha = ops.sys.inv_alpha();
  return inv_alpha * p1.eps * expect(p1) + inv_alpha * p2.eps * expect(p2) +
         p1.eps * p2.eps * antisymmetrized_repulsion(p1, p2, grid);
}

/// E((1-t) gamma + t target) = e0 + a t + b t^2.
struct LineCoefficients {
  double a = 0.0;
  double b = 0.0;
  EnergyBreakdown start;
  EnergyBreakdown end;
};

inline LineCoefficients line_coefficients(const DensityMatrix& gamma, const DensityMatrix& target,
                                          const OneBodyOperators& ops, const FockOperator* prebuilt = nullptr,
                                          const EnergyBreakdown* start_energy = nullptr) {
  if (std::abs(gamma.trace() - target.trace()) > 1e-9) {
    throw TraceMismatch("line search endpoints have traces " + std::to_string(gamma.trace()) + " and " +
                        std::to_string(target.trace()));
  }
  std::optional<FockOperator> built;
  if (!prebuilt) built = fock_build(gamma, ops);
  const FockOperator& h = prebuilt ? *prebuilt : *built;
  LineCoefficients out;
  out.start = start_energy ? *start_energy : total_energy(gamma, ops);
  out.end = total_energy(target, ops);
  out.a = ops.sys.inv_alpha() * (fock_trace(h, target, ops.grid) - fock_trace(h, gamma, ops.grid));
  out.b = out.end.total - out.start.total - out.a;
  return out;
}

/// Minimizer of a t + b t^2 over [0, 1].
inline double optimal_step(double a, double b) {
  if (b > 0.0) return std::clamp(-a / (2.0 * b), 0.0, 1.0);
  return a + b < 0.0 ? 1.0 : 0.0;
}

}  // namespace prhf
