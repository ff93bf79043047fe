#pragma once

// Independent reference computations used by the unit and acceptance tests.

#include <Eigen/Dense>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <cmath>
#include <numbers>
#include <random>

#include "prhf/coulomb.hpp"
#include "prhf/radial.hpp"

namespace prhf::oracle {

/// K_nu(t) = int_0^inf e^{-t cosh u} cosh(nu u) du by exp-sinh quadrature.
inline double bessel_k_integral(double nu, double t) {
  boost::math::quadrature::exp_sinh<double> integrator;
  return integrator.integrate([&](double u) {
    const double c = std::cosh(u);
    if (t * c > 745.0) return 0.0;
    return std::exp(-t * c) * std::cosh(nu * u);
  }, 1e-14);
}

/// Y^k(r_i) = r_i h sum_j min^k / max^(k+1) P_a(r_j) P_b(r_j), summed
/// directly over all pairs.
inline Eigen::VectorXd slater_yk_double_sum(const Eigen::VectorXd& pa, const Eigen::VectorXd& pb, int k,
                                            const RadialGrid& grid) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(grid.n);
  for (int i = 0; i < grid.n; ++i) {
    double s = 0.0;
    for (int j = 0; j < grid.n; ++j) {
      const double lo = std::min(grid.r[i], grid.r[j]);
      const double hi = std::max(grid.r[i], grid.r[j]);
      s += std::pow(lo, k) / std::pow(hi, k + 1) * pa[j] * pb[j];
    }
    out[i] = grid.r[i] * grid.h * s;
  }
  return out;
}

/// Normalized isotropic 3D Gaussian with variance s2 per axis.
inline double gaussian3(double s2, double u) {
  return std::pow(2.0 * std::numbers::pi * s2, -1.5) * std::exp(-u * u / (2.0 * s2));
}

/// Orthonormal (grid inner product) columns, each a random combination of
/// r^k e^{-b r} shapes, orthogonalized by QR.
inline Eigen::MatrixXd random_orbitals(std::mt19937_64& rng, const RadialGrid& grid, int count, int ell = 0) {
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  std::uniform_real_distribution<double> rate(0.5, 2.5);
  Eigen::MatrixXd raw(grid.n, count);
  for (int c = 0; c < count; ++c) {
    for (int i = 0; i < grid.n; ++i) raw(i, c) = 0.0;
    for (int term = 0; term < 3; ++term) {
      const double a = coef(rng), b = rate(rng);
      for (int i = 0; i < grid.n; ++i) raw(i, c) += a * std::pow(grid.r[i], ell + 1 + term) * std::exp(-b * grid.r[i]);
    }
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(raw);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(grid.n, count);
  return q / std::sqrt(grid.h);
}

/// Random admissible density: `per_block` orbitals in each (ell, spin) with
/// ell <= ell_max and occupations lambda uniform in [0, 1].
inline DensityMatrix random_density(std::mt19937_64& rng, const RadialGrid& grid, int q, int ell_max, int per_block) {
  std::uniform_real_distribution<double> occ(0.0, 1.0);
  DensityMatrix g;
  for (int ell = 0; ell <= ell_max; ++ell) {
    for (int spin = 0; spin < q; ++spin) {
      OrbitalBlock b;
      b.ell = ell;
      b.spin = spin;
      b.orbitals = random_orbitals(rng, grid, per_block, ell);
      b.occupations.resize(per_block);
      for (int a = 0; a < per_block; ++a) b.occupations[a] = occ(rng) * (2 * ell + 1);
      g.set_block(std::move(b));
    }
  }
  return g;
}

/// Rescales the occupations of gamma so that its trace equals `trace`
/// (callers keep the result admissible).
inline DensityMatrix with_trace(DensityMatrix g, double trace) {
  const double t = g.trace();
  for (auto& b : g.blocks) b.occupations *= trace / t;
  return g;
}

}  // namespace prhf::oracle
