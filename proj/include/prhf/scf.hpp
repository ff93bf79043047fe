#pragma once

// Self-consistent field minimization of the Hartree-Fock functional over
// {0 <= gamma <= 1, Tr gamma = N}: optimal damping with an exact quadratic
// line search, or a level-shifted Roothaan iteration.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "prhf/coulomb.hpp"
#include "prhf/fock.hpp"
#include "prhf/functional.hpp"
#include "prhf/model.hpp"
#include "prhf/radial.hpp"

namespace prhf {

/// alpha^-1-free commutator norm ||[h, gamma]||_F summed over channels, each
/// column counted with its 2 ell + 1 degenerate copies.
inline double commutator_norm(const FockOperator& fock, const DensityMatrix& gamma, const RadialGrid& grid) {
  double sq = 0.0;
  for (const auto& b : gamma.blocks) {
    if (b.size() == 0) continue;
    const Eigen::MatrixXd q = std::sqrt(grid.h) * b.orbitals;
    Eigen::VectorXd lam(b.size());
    for (Eigen::Index a = 0; a < b.size(); ++a) lam[a] = b.lambda(a);
    const Eigen::MatrixXd x = fock.channel(b.ell, b.spin).matrix * q;
    const Eigen::MatrixXd a = q.transpose() * x;
    const Eigen::MatrixXd resid = x - q * a;
    // [F, G] = Q (A L - L A) Q^T + R L Q^T - Q L R^T with Q^T R = 0
    const Eigen::MatrixXd inner_part = a * lam.asDiagonal() - lam.asDiagonal() * a;
    sq += b.capacity() * (inner_part.squaredNorm() + 2.0 * (resid * lam.asDiagonal()).squaredNorm());
  }
  return std::sqrt(sq);
}

/// max_a min(lambda_a, 1 - lambda_a).
inline double purification_defect(const DensityMatrix& gamma) {
  double d = 0.0;
  for (const auto& b : gamma.blocks) {
    for (Eigen::Index a = 0; a < b.size(); ++a) {
      const double lam = b.lambda(a);
      d = std::max(d, std::min(std::abs(lam), std::abs(1.0 - lam)));
    }
  }
  return d;
}

/// Per-channel electron counts of a shell list.
inline std::vector<ChannelCount> channel_counts(const std::vector<ShellSpec>& shells) {
  std::map<std::pair<int, int>, double> acc;
  for (const auto& s : shells) acc[{s.ell, s.spin}] += s.occupation;
  std::vector<ChannelCount> out;
  for (const auto& [key, e] : acc) {
    if (e > 0.0) out.push_back({key.first, key.second, e});
  }
  return out;
}

struct StepReport {
  double t = 0.0;
  double a = 0.0;
  double b = 0.0;
  double energy_before = 0.0;
  double energy_after = 0.0;
  double trial_energy = 0.0;
};

struct StepResult {
  DensityMatrix density;
  EnergyBreakdown energy;
  StepReport report;
};

/// One optimal-damping step from gamma, given h_gamma and E(gamma).
/// `fixed` restricts the aufbau trial to per-channel counts.
inline StepResult oda_step(const DensityMatrix& gamma, const FockOperator& fock, const EnergyBreakdown& energy,
                           const OneBodyOperators& ops, const std::vector<ChannelCount>* fixed = nullptr) {
  const auto& grid = ops.grid;
  const double electrons = gamma.trace();
  const auto spec = diagonalize(fock, eigenpair_count(electrons, grid.n), grid);
  const auto trial = aufbau_projection(spec, electrons, fixed);
  const auto line = line_coefficients(gamma, trial, ops, &fock, &energy);

  StepResult out;
  out.report.a = line.a;
  out.report.b = line.b;
  out.report.energy_before = energy.total;
  out.report.trial_energy = line.end.total;
  const double t = optimal_step(line.a, line.b);
  out.report.t = t;
  if (t == 0.0) {
    out.density = gamma;
    out.energy = energy;
  } else if (t == 1.0) {
    out.density = trial;
    out.energy = line.end;
  } else {
    out.density = combine_densities({{1.0 - t, &gamma}, {t, &trial}}, grid);
    out.energy = total_energy(out.density, ops);
  }
  out.report.energy_after = out.energy.total;
  if (out.energy.total > energy.total + 1e-12 * (1.0 + std::abs(energy.total))) {
    throw LineSearchFailure("optimal-damping step raised the energy from " + std::to_string(energy.total) + " to " +
                            std::to_string(out.energy.total));
  }
  return out;
}

/// Convenience overload that builds h_gamma and E(gamma) itself.
inline StepResult oda_step(const DensityMatrix& gamma, const OneBodyOperators& ops,
                           const std::vector<ChannelCount>* fixed = nullptr) {
  return oda_step(gamma, fock_build(gamma, ops), total_energy(gamma, ops), ops, fixed);
}

/// A computed Fock level and how much of it the final density holds.
struct LevelReport {
  int ell = 0;
  int spin = 0;
  int index = 0;
  double eps = 0.0;        ///< internal units, alpha^-1 eps in Hartree
  double occupation = 0.0;  ///< <v, gamma v> times 2 ell + 1
};

struct SCFReport {
  AtomSystem sys;
  Algorithm algorithm = Algorithm::OptimalDamping;
  std::vector<EnergyBreakdown> energy_trace;  ///< initial guess, then one entry per iteration
  std::vector<double> step_sizes;
  EnergyBreakdown energy;
  std::vector<LevelReport> levels;  ///< merged, ascending
  double commutator = 0.0;           ///< alpha^-1 ||[h_gamma, gamma]||_F
  double purification = 0.0;
  int iterations = 0;
  bool converged = false;
  /// N >= Z + 1, where existence of a minimizer is not guaranteed.
  bool anion_regime = false;
  double final_level_shift = 0.0;  ///< Roothaan only, Hartree
};

struct SCFResult {
  SCFReport report;
  DensityMatrix density;
  FockOperator fock;
  FockSpectrum spectrum;
  OneBodyOperators ops;
};

/// Highest channel the solver diagonalizes for the given options.
inline int resolved_ell_max(const std::vector<ShellSpec>& shells, const SolverOptions& opt) {
  if (opt.ell_max >= 0) return opt.ell_max;
  int m = 0;
  for (const auto& s : shells) m = std::max(m, s.ell);
  return m;
}

namespace detail {

/// F + shift (1 - Q Q^T) on every channel, Q the orbitals of gamma there.
inline FockOperator shifted_fock(const FockOperator& fock, const DensityMatrix& gamma, double shift,
                                 const RadialGrid& grid) {
  FockOperator out = fock;
  for (auto& ch : out.channels) {
    ch.matrix.diagonal().array() += shift;
    if (const auto* b = gamma.find(ch.ell, ch.spin); b && b->size() > 0) {
      const Eigen::MatrixXd q = std::sqrt(grid.h) * b->orbitals;
      ch.matrix.noalias() -= shift * q * q.transpose();
    }
  }
  return out;
}

inline std::vector<LevelReport> level_report(const FockSpectrum& spec, const DensityMatrix& gamma,
                                             const RadialGrid& grid) {
  std::vector<LevelReport> out;
  for (const auto& level : ordered_levels(spec, 1e-12)) {
    LevelReport r{level.ell, level.spin, level.index, level.energy, 0.0};
    if (const auto* b = gamma.find(level.ell, level.spin)) {
      const ChannelSpectrum* ch = nullptr;
      for (const auto& c : spec.channels) {
        if (c.ell == level.ell && c.spin == level.spin) ch = &c;
      }
      const Eigen::VectorXd overlap = grid.h * b->orbitals.transpose() * ch->vectors.col(level.index);
      r.occupation = overlap.cwiseAbs2().dot(b->occupations);
    }
    out.push_back(r);
  }
  return out;
}

}  // namespace detail

/// Runs the minimization and returns the last iterate whether or not it
/// converged.
inline SCFResult solve_scf_unchecked(const AtomSystem& sys_in, const SolverOptions& opt) {
  const AtomSystem sys = validate_system(sys_in);
  validate_options(opt);
  const auto shells = opt.shells.empty() ? default_shells(sys, opt.include_p) : opt.shells;
  validate_shells(sys, shells);
  const int ell_max = resolved_ell_max(shells, opt);
  for (const auto& s : shells) {
    if (s.ell > ell_max) throw BadOptions("shell ell exceeds ell_max");
  }

  const auto grid = build_grid(opt.n, opt.r_max);
  SCFResult res;
  res.ops = make_one_body(grid, sys, ell_max, opt.kinetic);
  const auto& ops = res.ops;
  const double electrons = sys.N;
  const auto counts = channel_counts(shells);
  const std::vector<ChannelCount>* fixed = opt.occupation_mode == OccupationMode::Fixed ? &counts : nullptr;
  const int count = eigenpair_count(electrons, grid.n);

  auto& rep = res.report;
  rep.sys = sys;
  rep.algorithm = opt.algorithm;
  rep.anion_regime = sys.N >= sys.Z + 1.0;

  // initial guess from the bare nuclear problem
  const auto h0 = fock_build(DensityMatrix{}, ops);
  const auto spec0 = diagonalize(h0, count, grid);
  DensityMatrix gamma = opt.initial_guess == InitialGuess::ShellSeed ? aufbau_projection(spec0, electrons, &counts)
                                                                     : aufbau_projection(spec0, electrons, fixed);
  EnergyBreakdown energy = total_energy(gamma, ops);
  rep.energy_trace.push_back(energy);

  const double inv_alpha = sys.inv_alpha();
  double shift = (opt.level_shift < 0.0 ? 0.5 : opt.level_shift) * sys.alpha;
  FockOperator fock = fock_build(gamma, ops);
  double previous = energy.total;
  bool have_previous = false;

  for (int it = 0; it < opt.max_iterations; ++it) {
    const double comm = inv_alpha * commutator_norm(fock, gamma, grid);
    if (have_previous && std::abs(energy.total - previous) < opt.energy_tol && comm < opt.commutator_tol) {
      rep.converged = true;
      break;
    }
    previous = energy.total;
    have_previous = true;
    ++rep.iterations;

    if (opt.algorithm == Algorithm::OptimalDamping) {
      auto step = oda_step(gamma, fock, energy, ops, fixed);
      gamma = std::move(step.density);
      energy = step.energy;
      rep.step_sizes.push_back(step.report.t);
    } else {
      // a rejected step doubles the shift and retries from the same density
      for (int attempt = 0;; ++attempt) {
        const auto spec = diagonalize(detail::shifted_fock(fock, gamma, shift, grid), count, grid);
        auto trial = aufbau_projection(spec, electrons, fixed);
        const auto e_trial = total_energy(trial, ops);
        if (e_trial.total <= energy.total + 1e-12 * (1.0 + std::abs(energy.total)) || attempt >= 30) {
          gamma = std::move(trial);
          energy = e_trial;
          break;
        }
        shift *= 2.0;
      }
      rep.step_sizes.push_back(1.0);
    }
    rep.energy_trace.push_back(energy);
    fock = fock_build(gamma, ops);
  }

  rep.final_level_shift = shift * inv_alpha;
  rep.energy = energy;
  rep.commutator = inv_alpha * commutator_norm(fock, gamma, grid);
  rep.purification = purification_defect(gamma);
  res.spectrum = diagonalize(fock, count, grid);
  rep.levels = detail::level_report(res.spectrum, gamma, grid);
  res.density = std::move(gamma);
  res.fock = std::move(fock);
  return res;
}

/// As solve_scf_unchecked, throwing NotConverged if the tolerances were not
/// met within max_iterations.
inline SCFResult solve_scf(const AtomSystem& sys, const SolverOptions& opt) {
  auto res = solve_scf_unchecked(sys, opt);
  if (!res.report.converged) {
    throw NotConverged("no convergence after " + std::to_string(res.report.iterations) +
                       " iterations (commutator " + std::to_string(res.report.commutator) + ")");
  }
  return res;
}

}  // namespace prhf
