#pragma once

// The Hartree-Fock operator h_gamma = T - V + alpha (R_gamma - K_gamma), its
// low-lying spectrum per channel, and the aufbau projection built from it.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "prhf/coulomb.hpp"
#include "prhf/linalg.hpp"
#include "prhf/radial.hpp"

namespace prhf {

struct FockChannel {
  int ell = 0;
  int spin = 0;
  Eigen::MatrixXd matrix;
};

/// One dense symmetric matrix per (ell, spin), ell = 0..ell_max, spin = 0..q-1,
/// stored at index ell * q + spin.
struct FockOperator {
  std::vector<FockChannel> channels;
  DensityMatrix source;
  int q = 1;

  const FockChannel& channel(int ell, int spin) const {
    const auto idx = static_cast<std::size_t>(ell * q + spin);
    if (ell < 0 || spin < 0 || spin >= q || idx >= channels.size()) {
      throw DomainError("no Fock channel (" + std::to_string(ell) + ", " + std::to_string(spin) + ")");
    }
    return channels[idx];
  }
};

inline FockOperator fock_build(const DensityMatrix& gamma, const OneBodyOperators& ops) {
  const auto& grid = ops.grid;
  const double alpha = ops.sys.alpha;
  const auto rho = reduced_density(gamma, grid);
  const Eigen::VectorXd local = alpha * hartree_potential(rho, grid) - ops.nuclear;

  FockOperator f;
  f.q = ops.sys.q;
  f.source = gamma;
  for (int ell = 0; ell <= ops.ell_max(); ++ell) {
    for (int spin = 0; spin < ops.sys.q; ++spin) {
      FockChannel ch{ell, spin, ops.T(ell).matrix()};
      ch.matrix.diagonal() += local;
      bool has_same_spin = false;
      for (const auto& b : gamma.blocks) has_same_spin |= (b.spin == spin && b.size() > 0);
      if (has_same_spin) ch.matrix.noalias() -= alpha * exchange_matrix(gamma, ell, spin, grid);
      f.channels.push_back(std::move(ch));
    }
  }
  return f;
}

/// Tr[h gamma] = sum_a f_a <P_a, h P_a>.
inline double fock_trace(const FockOperator& fock, const DensityMatrix& gamma, const RadialGrid& grid) {
  double t = 0.0;
  for (const auto& b : gamma.blocks) {
    if (b.size() == 0) continue;
    const Eigen::MatrixXd hp = fock.channel(b.ell, b.spin).matrix * b.orbitals;
    for (Eigen::Index a = 0; a < b.size(); ++a) {
      t += b.occupations[a] * grid.h * b.orbitals.col(a).dot(hp.col(a));
    }
  }
  return t;
}

/// Lowest eigenpairs of one channel; eigenvectors normalized in the grid
/// inner product.
struct ChannelSpectrum {
  int ell = 0;
  int spin = 0;
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

struct FockSpectrum {
  std::vector<ChannelSpectrum> channels;
};

/// Diagonalizes every channel for its `count` lowest eigenpairs. Channels
/// whose matrices are identical (closed shells) share one decomposition.
inline FockSpectrum diagonalize(const FockOperator& fock, int count, const RadialGrid& grid) {
  FockSpectrum out;
  const double scale = 1.0 / std::sqrt(grid.h);
  for (std::size_t c = 0; c < fock.channels.size(); ++c) {
    const auto& ch = fock.channels[c];
    std::optional<std::size_t> twin;
    for (std::size_t p = 0; p < c; ++p) {
      if (fock.channels[p].ell == ch.ell && fock.channels[p].matrix == ch.matrix) {
        twin = p;
        break;
      }
    }
    ChannelSpectrum s;
    s.ell = ch.ell;
    s.spin = ch.spin;
    if (twin) {
      s.values = out.channels[*twin].values;
      s.vectors = out.channels[*twin].vectors;
    } else {
      auto dec = lowest_eigenpairs(ch.matrix, count);
      s.values = std::move(dec.values);
      s.vectors = scale * dec.vectors;
      // fix the sign so that the first significant entry is positive
      for (Eigen::Index k = 0; k < s.vectors.cols(); ++k) {
        Eigen::Index idx = 0;
        s.vectors.col(k).cwiseAbs().maxCoeff(&idx);
        if (s.vectors(idx, k) < 0.0) s.vectors.col(k) *= -1.0;
      }
    }
    out.channels.push_back(std::move(s));
  }
  return out;
}

/// Per-channel electron counts that the Fixed occupation mode preserves.
struct ChannelCount {
  int ell = 0;
  int spin = 0;
  double electrons = 0.0;
};

/// One entry of the merged, ordered spectrum.
struct LevelRef {
  double energy = 0.0;
  int ell = 0;
  int spin = 0;
  int index = 0;
};

/// All computed levels sorted ascending; levels within `tie_tol` of each
/// other are ordered by (ell, spin, index).
inline std::vector<LevelRef> ordered_levels(const FockSpectrum& spec, double tie_tol) {
  std::vector<LevelRef> levels;
  for (const auto& ch : spec.channels) {
    for (Eigen::Index k = 0; k < ch.values.size(); ++k) {
      levels.push_back({ch.values[k], ch.ell, ch.spin, static_cast<int>(k)});
    }
  }
  auto key = [](const LevelRef& l) { return std::tie(l.ell, l.spin, l.index); };
  std::stable_sort(levels.begin(), levels.end(), [](const LevelRef& a, const LevelRef& b) { return a.energy < b.energy; });
  for (std::size_t i = 0; i < levels.size();) {
    std::size_t j = i + 1;
    while (j < levels.size() && levels[j].energy - levels[j - 1].energy <= tie_tol) ++j;
    std::sort(levels.begin() + static_cast<std::ptrdiff_t>(i), levels.begin() + static_cast<std::ptrdiff_t>(j),
              [&](const LevelRef& a, const LevelRef& b) { return key(a) < key(b); });
    i = j;
  }
  return levels;
}

namespace detail {

inline void append_orbital(DensityMatrix& gamma, const ChannelSpectrum& ch, int index, double occupation) {
  OrbitalBlock block;
  if (const auto* existing = gamma.find(ch.ell, ch.spin)) block = *existing;
  block.ell = ch.ell;
  block.spin = ch.spin;
  const Eigen::Index m = block.size();
  block.orbitals.conservativeResize(ch.vectors.rows(), m + 1);
  block.occupations.conservativeResize(m + 1);
  block.orbitals.col(m) = ch.vectors.col(index);
  block.occupations[m] = occupation;
  gamma.set_block(std::move(block));
}

}  // namespace detail

/// Occupies eigenvectors in ascending order across channels, each column
/// taking up to 2 ell + 1 electrons, until `electrons` are placed. With
/// `fixed`, each channel instead receives exactly its listed count.
inline DensityMatrix aufbau_projection(const FockSpectrum& spec, double electrons,
                                       const std::vector<ChannelCount>* fixed = nullptr, double tie_tol = 1e-12) {
  DensityMatrix gamma;
  if (fixed) {
    for (const auto& want : *fixed) {
      const ChannelSpectrum* ch = nullptr;
      for (const auto& c : spec.channels) {
        if (c.ell == want.ell && c.spin == want.spin) ch = &c;
      }
      if (!ch) throw DomainError("fixed occupation names a channel outside ell_max");
      double remaining = want.electrons;
      for (int k = 0; remaining > 1e-14; ++k) {
        if (k >= ch->values.size()) throw DomainError("not enough eigenvectors for fixed occupation");
        const double take = std::min<double>(2 * ch->ell + 1, remaining);
        detail::append_orbital(gamma, *ch, k, take);
        remaining -= take;
      }
    }
    return gamma;
  }
  double remaining = electrons;
  for (const auto& level : ordered_levels(spec, tie_tol)) {
    if (remaining <= 1e-14) break;
    const double take = std::min<double>(2 * level.ell + 1, remaining);
    const ChannelSpectrum* ch = nullptr;
    for (const auto& c : spec.channels) {
      if (c.ell == level.ell && c.spin == level.spin) ch = &c;
    }
    detail::append_orbital(gamma, *ch, level.index, take);
    remaining -= take;
  }
  if (remaining > 1e-12) throw DomainError("spectrum too short to place all electrons");
  return gamma;
}

/// Number of eigenpairs per channel needed so that aufbau can place all
/// electrons in any single channel and still see the next level.
inline int eigenpair_count(double electrons, int n) {
  return std::min(n, static_cast<int>(std::ceil(electrons)) + 4);
}

inline DensityMatrix aufbau_projection(const FockOperator& fock, double electrons, const RadialGrid& grid) {
  return aufbau_projection(diagonalize(fock, eigenpair_count(electrons, grid.n), grid), electrons);
}

}  // namespace prhf
