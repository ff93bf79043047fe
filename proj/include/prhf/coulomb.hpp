#pragma once

// Coulomb machinery in the central-field reduction: density matrices as
// per-(ell, spin) orbital blocks, the Hartree potential by Newton's theorem,
// multipole Y^k sweeps, the exchange operator and the interaction energies.
//
// Every two-electron quantity uses the same discrete kernel
//   M^k_ij = min(r_i, r_j)^k / max(r_i, r_j)^(k+1)
// with weight h, so D and Ex are exact quadratic forms in gamma and the
// rank-one identity D = Ex holds to rounding.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "prhf/error.hpp"
#include "prhf/radial.hpp"

namespace prhf {

/// Orbitals of one (ell, spin) channel. `occupations` holds shell
/// occupations f = lambda * (2 ell + 1): a column with lambda = 1 stands for
/// all 2 ell + 1 degenerate m-orbitals of that spin.
struct OrbitalBlock {
  int ell = 0;
  int spin = 0;
  Eigen::MatrixXd orbitals;
  Eigen::VectorXd occupations;

  int capacity() const { return 2 * ell + 1; }
  Eigen::Index size() const { return orbitals.cols(); }
  double lambda(Eigen::Index a) const { return occupations[a] / capacity(); }
  double trace() const { return occupations.sum(); }
};

struct DensityMatrix {
  /// Sorted by (ell, spin); at most one block per channel.
  std::vector<OrbitalBlock> blocks;

  double trace() const {
    double t = 0.0;
    for (const auto& b : blocks) t += b.trace();
    return t;
  }

  const OrbitalBlock* find(int ell, int spin) const {
    for (const auto& b : blocks) {
      if (b.ell == ell && b.spin == spin) return &b;
    }
    return nullptr;
  }

  int max_ell() const {
    int m = 0;
    for (const auto& b : blocks) m = std::max(m, b.ell);
    return m;
  }

  /// Inserts or replaces the block for its channel, keeping the order.
  void set_block(OrbitalBlock block) {
    auto it = std::find_if(blocks.begin(), blocks.end(),
                           [&](const OrbitalBlock& b) { return b.ell == block.ell && b.spin == block.spin; });
    if (it != blocks.end()) {
      *it = std::move(block);
      return;
    }
    blocks.push_back(std::move(block));
    std::sort(blocks.begin(), blocks.end(),
              [](const OrbitalBlock& a, const OrbitalBlock& b) { return std::tie(a.ell, a.spin) < std::tie(b.ell, b.spin); });
  }
};

/// Throws NotAdmissible unless 0 <= lambda <= 1, columns are orthonormal and
/// the trace does not exceed `max_trace`.
inline void check_density(const DensityMatrix& gamma, const RadialGrid& grid, double max_trace) {
  for (const auto& b : gamma.blocks) {
    check_length(grid, b.orbitals.rows());
    if (b.occupations.size() != b.orbitals.cols()) throw NotAdmissible("occupation/orbital count mismatch");
    for (Eigen::Index a = 0; a < b.size(); ++a) {
      const double lam = b.lambda(a);
      if (!(lam >= -1e-12 && lam <= 1.0 + 1e-12)) {
        throw NotAdmissible("occupation outside [0, 1]: lambda = " + std::to_string(lam));
      }
    }
    const Eigen::MatrixXd gram = grid.h * b.orbitals.transpose() * b.orbitals;
    const double dev = (gram - Eigen::MatrixXd::Identity(b.size(), b.size())).cwiseAbs().maxCoeff();
    if (b.size() > 0 && dev > 1e-10) {
      throw NotAdmissible("orbitals not orthonormal (max deviation " + std::to_string(dev) + ")");
    }
  }
  if (gamma.trace() > max_trace + 1e-9) {
    throw NotAdmissible("trace " + std::to_string(gamma.trace()) + " exceeds " + std::to_string(max_trace));
  }
}

/// Radial charge density w(r) = sum f_a P_a(r)^2, so that integrate(w) = Tr gamma.
struct ReducedDensity {
  Eigen::VectorXd w;
};

inline ReducedDensity reduced_density(const DensityMatrix& gamma, const RadialGrid& grid) {
  ReducedDensity out{Eigen::VectorXd::Zero(grid.n)};
  for (const auto& b : gamma.blocks) {
    check_length(grid, b.orbitals.rows());
    out.w += b.orbitals.cwiseAbs2() * b.occupations;
  }
  return out;
}

/// Applies the discrete multipole kernel: out_i = h sum_j M^k_ij rho_j.
/// Two cumulative sweeps, O(n).
inline Eigen::VectorXd multipole_potential(const Eigen::VectorXd& rho, int k, const RadialGrid& grid) {
  check_length(grid, rho.size());
  const int n = grid.n;
  const auto& r = grid.r;
  Eigen::VectorXd out(n);
  // inner part: r_i^-(k+1) sum_{j<=i} r_j^k rho_j
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    acc += std::pow(r[i], k) * rho[i];
    out[i] = acc / std::pow(r[i], k + 1);
  }
  // outer part: r_i^k sum_{j>i} rho_j / r_j^(k+1)
  acc = 0.0;
  for (int i = n - 1; i >= 0; --i) {
    out[i] += std::pow(r[i], k) * acc;
    acc += rho[i] / std::pow(r[i], k + 1);
  }
  return grid.h * out;
}

/// Hartree potential R(r) = (1/r) int_0^r w + int_r^rmax w/s.
inline Eigen::VectorXd hartree_potential(const ReducedDensity& density, const RadialGrid& grid) {
  return multipole_potential(density.w, 0, grid);
}

/// Slater's Y^k(r) = r int min(r,s)^k / max(r,s)^(k+1) P_a(s) P_b(s) ds.
inline Eigen::VectorXd slater_yk(const Eigen::VectorXd& pa, const Eigen::VectorXd& pb, int k, const RadialGrid& grid) {
  if (k < 0) throw DomainError("multipole order k must be >= 0");
  check_length(grid, pa.size());
  check_length(grid, pb.size());
  return grid.r.cwiseProduct(multipole_potential(pa.cwiseProduct(pb), k, grid));
}

namespace detail {

inline double factorial(int n) { return std::tgamma(n + 1.0); }

}  // namespace detail

/// Squared Wigner 3j symbol (l1 l2 l3; 0 0 0)^2, zero unless the triangle and
/// parity rules hold.
inline double threej_zero_squared(int l1, int l2, int l3) {
  const int J = l1 + l2 + l3;
  if (l1 < 0 || l2 < 0 || l3 < 0 || J % 2 != 0) return 0.0;
  if (l3 < std::abs(l1 - l2) || l3 > l1 + l2) return 0.0;
  const int g = J / 2;
  using detail::factorial;
  const double delta = factorial(J - 2 * l1) * factorial(J - 2 * l2) * factorial(J - 2 * l3) / factorial(J + 1);
  const double ratio = factorial(g) / (factorial(g - l1) * factorial(g - l2) * factorial(g - l3));
  return delta * ratio * ratio;
}

/// c^k(l_a, l_b) = (2 l_b + 1) (l_a k l_b; 0 0 0)^2.
inline double angular_coefficient(int ell_a, int ell_b, int k) {
  return (2 * ell_b + 1) * threej_zero_squared(ell_a, k, ell_b);
}

/// Exchange operator K_gamma on channel (ell, spin) as an n x n matrix acting
/// on node values: (K u)_i = sum_j K_ij u_j. Only same-spin blocks couple.
inline Eigen::MatrixXd exchange_matrix(const DensityMatrix& gamma, int ell, int spin, const RadialGrid& grid) {
  const int n = grid.n;
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  for (const auto& b : gamma.blocks) {
    if (b.spin != spin || b.size() == 0) continue;
    check_length(grid, b.orbitals.rows());
    // sum_a (f_a / (2 l' + 1)) P_a P_a^T
    const Eigen::VectorXd weights = b.occupations / b.capacity();
    const Eigen::MatrixXd kernel_density = b.orbitals * weights.asDiagonal() * b.orbitals.transpose();
    for (int k = std::abs(ell - b.ell); k <= ell + b.ell; k += 2) {
      const double c = angular_coefficient(ell, b.ell, k);
      if (c == 0.0) continue;
      for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
          const double rl = std::min(grid.r[i], grid.r[j]);
          const double rg = std::max(grid.r[i], grid.r[j]);
          const double m = k == 0 ? 1.0 / rg : std::pow(rl, k) / std::pow(rg, k + 1);
          out(i, j) += c * m * kernel_density(i, j);
        }
      }
    }
  }
  out *= grid.h;
  return out;
}

/// Natural-orbital form of sum_i w_i gamma_i. Per channel the union of the
/// column spaces is orthonormalized (canonical orthogonalization, dropping
/// directions with relative Gram eigenvalue below 1e-12) and the combined
/// operator is diagonalized there. Occupations with |lambda| <= drop_tol are
/// discarded; out-of-range ones are kept so callers can detect them.
inline DensityMatrix combine_densities(const std::vector<std::pair<double, const DensityMatrix*>>& terms,
                                       const RadialGrid& grid, double drop_tol = 1e-14) {
  std::vector<std::pair<int, int>> channels;
  for (const auto& [w, g] : terms) {
    for (const auto& b : g->blocks) channels.emplace_back(b.ell, b.spin);
  }
  std::sort(channels.begin(), channels.end());
  channels.erase(std::unique(channels.begin(), channels.end()), channels.end());

  DensityMatrix out;
  for (const auto& [ell, spin] : channels) {
    Eigen::Index cols = 0;
    for (const auto& [w, g] : terms) {
      if (const auto* b = g->find(ell, spin)) cols += b->size();
    }
    Eigen::MatrixXd c(grid.n, cols);
    Eigen::VectorXd lam(cols);
    Eigen::Index at = 0;
    const int cap = 2 * ell + 1;
    for (const auto& [w, g] : terms) {
      if (const auto* b = g->find(ell, spin)) {
        c.middleCols(at, b->size()) = b->orbitals;
        lam.segment(at, b->size()) = w * b->occupations / cap;
        at += b->size();
      }
    }
    if (cols == 0) continue;
    const auto gram = symmetric_eigen(grid.h * c.transpose() * c);
    const double smax = gram.values.maxCoeff();
    Eigen::Index first = 0;
    while (first < cols && gram.values[first] <= 1e-12 * smax) ++first;
    const Eigen::Index keep = cols - first;
    if (keep == 0) continue;
    const Eigen::VectorXd s_half = gram.values.tail(keep).cwiseSqrt();
    const Eigen::MatrixXd v = gram.vectors.rightCols(keep);
    const Eigen::MatrixXd basis = c * v * s_half.cwiseInverse().asDiagonal();
    Eigen::MatrixXd a = s_half.asDiagonal() * v.transpose() * lam.asDiagonal() * v * s_half.asDiagonal();
    a = (0.5 * (a + a.transpose())).eval();
    const auto nat = symmetric_eigen(a);

    OrbitalBlock block;
    block.ell = ell;
    block.spin = spin;
    std::vector<Eigen::Index> kept;
    for (Eigen::Index k = keep - 1; k >= 0; --k) {
      if (std::abs(nat.values[k]) > drop_tol) kept.push_back(k);
    }
    block.orbitals.resize(grid.n, static_cast<Eigen::Index>(kept.size()));
    block.occupations.resize(static_cast<Eigen::Index>(kept.size()));
    for (std::size_t j = 0; j < kept.size(); ++j) {
      Eigen::VectorXd col = basis * nat.vectors.col(kept[j]);
      Eigen::Index idx = 0;
      col.cwiseAbs().maxCoeff(&idx);
      if (col[idx] < 0.0) col = -col;
      block.orbitals.col(static_cast<Eigen::Index>(j)) = col;
      block.occupations[static_cast<Eigen::Index>(j)] = nat.values[kept[j]] * cap;
    }
    if (!kept.empty()) out.set_block(std::move(block));
  }
  return out;
}

struct EnergyTerms {
  double kinetic_trace = 0.0;    ///< Tr[T gamma]
  double potential_trace = 0.0;  ///< Tr[V gamma] = Z alpha int rho / |x|
  double direct = 0.0;           ///< D(gamma)
  double exchange = 0.0;         ///< Ex(gamma)
};

/// Exchange energy ½ sum_sigma sum_{a,b} f_a f_b (l_a k l_b; 000)^2 R^k(ab;ba).
inline double exchange_energy(const DensityMatrix& gamma, const RadialGrid& grid) {
  double ex = 0.0;
  for (const auto& ba : gamma.blocks) {
    for (const auto& bb : gamma.blocks) {
      if (ba.spin != bb.spin) continue;
      for (Eigen::Index a = 0; a < ba.size(); ++a) {
        for (Eigen::Index b = 0; b < bb.size(); ++b) {
          const double fab = ba.occupations[a] * bb.occupations[b];
          if (fab == 0.0) continue;
          const Eigen::VectorXd pair = ba.orbitals.col(a).cwiseProduct(bb.orbitals.col(b));
          for (int k = std::abs(ba.ell - bb.ell); k <= ba.ell + bb.ell; k += 2) {
            const double w = angular_coefficient(ba.ell, bb.ell, k) / bb.capacity();
            if (w == 0.0) continue;
            ex += fab * w * grid.h * pair.dot(multipole_potential(pair, k, grid));
          }
        }
      }
    }
  }
  return 0.5 * ex;
}

inline EnergyTerms energy_terms(const DensityMatrix& gamma, const OneBodyOperators& ops) {
  const auto& grid = ops.grid;
  EnergyTerms e;
  for (const auto& b : gamma.blocks) {
    if (b.size() == 0) continue;
    const Eigen::MatrixXd tp = ops.T(b.ell).matrix() * b.orbitals;
    for (Eigen::Index a = 0; a < b.size(); ++a) {
      e.kinetic_trace += b.occupations[a] * grid.h * b.orbitals.col(a).dot(tp.col(a));
    }
  }
  const auto rho = reduced_density(gamma, grid);
  e.potential_trace = grid.h * rho.w.dot(ops.nuclear);
  e.direct = 0.5 * grid.h * rho.w.dot(hartree_potential(rho, grid));
  e.exchange = exchange_energy(gamma, grid);
  if (!std::isfinite(e.kinetic_trace) || !std::isfinite(e.potential_trace) || !std::isfinite(e.direct) ||
      !std::isfinite(e.exchange)) {
    throw NonFiniteEnergy("non-finite energy term");
  }
  return e;
}

}  // namespace prhf
