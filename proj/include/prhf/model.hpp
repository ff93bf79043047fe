#pragma once

// Physical parameters and solver configuration.
//
// Units: hbar = e = m = 1. The one-body operator is alpha^-1 (T - V) with
// T(p) = sqrt(p^2 + alpha^-2) - alpha^-1 and V = Z alpha / |x|, so Fock
// eigenvalues live in (-alpha^-1, 0) and alpha^-1 * eps is in Hartree.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "prhf/error.hpp"

namespace prhf {

/// Z * alpha must stay strictly below this value.
inline constexpr double kCriticalCoupling = 2.0 / std::numbers::pi;

struct AtomSystem {
  double Z = 1.0;
  int N = 1;
  double alpha = 1.0 / 137.036;
  int q = 2;  ///< spin states per orbital

  double inv_alpha() const { return 1.0 / alpha; }
  double coupling() const { return Z * alpha; }
  friend bool operator==(const AtomSystem&, const AtomSystem&) = default;
};

/// One (ell, spin) shell of a configuration; `occupation` counts electrons of
/// this spin in the shell, at most 2 ell + 1.
struct ShellSpec {
  int ell = 0;
  int spin = 0;
  double occupation = 0.0;
  friend bool operator==(const ShellSpec&, const ShellSpec&) = default;
};

enum class Algorithm { OptimalDamping, RoothaanLevelShift };
enum class InitialGuess { BareNucleus, ShellSeed };
/// Aufbau fills across all channels; Fixed keeps the per-channel electron
/// counts of the shell seed and fills lowest orbitals inside each channel.
enum class OccupationMode { Aufbau, Fixed };
enum class KineticKind { Relativistic, NonRelativistic };

struct SolverOptions {
  int n = 1200;
  double r_max = 40.0;
  int max_iterations = 200;
  double energy_tol = 1e-10;
  /// Tolerance on alpha^-1 * ||[h_gamma, gamma]||_F (Hartree scale).
  double commutator_tol = 1e-6;
  Algorithm algorithm = Algorithm::OptimalDamping;
  /// Virtual-space shift for the Roothaan path in Hartree; negative selects
  /// the default of 0.5.
  double level_shift = -1.0;
  InitialGuess initial_guess = InitialGuess::BareNucleus;
  OccupationMode occupation_mode = OccupationMode::Aufbau;
  KineticKind kinetic = KineticKind::Relativistic;
  /// Highest angular momentum channel; negative means "from the shells".
  int ell_max = -1;
  /// Explicit configuration; empty means default_shells().
  std::vector<ShellSpec> shells;
  bool include_p = false;
};

inline AtomSystem validate_system(const AtomSystem& sys) {
  if (!std::isfinite(sys.Z) || !std::isfinite(sys.alpha) || sys.Z < 0.0 || sys.alpha <= 0.0) {
    throw InvalidSystem("Z must be finite and non-negative, alpha finite and positive");
  }
  if (sys.N < 1) throw BadCount("electron count N must be >= 1, got " + std::to_string(sys.N));
  if (sys.q < 1) throw BadCount("spin multiplicity q must be >= 1, got " + std::to_string(sys.q));
  if (!(sys.Z * sys.alpha < kCriticalCoupling)) {
    throw SubcriticalityViolated("SubcriticalityViolated: Z*alpha = " + std::to_string(sys.Z * sys.alpha) +
                                 " is not below 2/pi = " + std::to_string(kCriticalCoupling));
  }
  return sys;
}

/// Aufbau seed: 1s, 2s, 3s, ... (and 2p, 3p, ... when include_p), each
/// (shell, spin) slot taking at most 2 ell + 1 electrons, spin 0 first.
inline std::vector<ShellSpec> default_shells(const AtomSystem& sys, bool include_p = false) {
  std::vector<ShellSpec> out;
  double remaining = sys.N;
  for (int principal = 1; remaining > 0.0; ++principal) {
    const int max_ell = include_p ? std::min(principal - 1, 1) : 0;
    for (int ell = 0; ell <= max_ell && remaining > 0.0; ++ell) {
      for (int spin = 0; spin < sys.q && remaining > 0.0; ++spin) {
        const double take = std::min<double>(2 * ell + 1, remaining);
        out.push_back({ell, spin, take});
        remaining -= take;
      }
    }
  }
  return out;
}

inline void validate_shells(const AtomSystem& sys, const std::vector<ShellSpec>& shells) {
  double total = 0.0;
  for (const auto& s : shells) {
    if (s.ell < 0) throw BadOptions("shell ell must be >= 0");
    if (s.spin < 0 || s.spin >= sys.q) throw BadOptions("shell spin must lie in [0, q)");
    if (s.occupation < 0.0 || s.occupation > 2 * s.ell + 1) {
      throw BadOptions("shell occupation must lie in [0, 2 ell + 1]");
    }
    total += s.occupation;
  }
  if (std::abs(total - sys.N) > 1e-12) {
    throw BadOptions("shell occupations sum to " + std::to_string(total) + ", expected N = " +
                     std::to_string(sys.N));
  }
}

inline void validate_options(const SolverOptions& opt) {
  if (opt.n < 16) throw BadOptions("grid size n must be >= 16");
  if (!(opt.r_max > 0.0)) throw BadOptions("r_max must be positive");
  if (opt.max_iterations < 1) throw BadOptions("max_iterations must be >= 1");
  if (!(opt.energy_tol > 0.0) || !(opt.commutator_tol > 0.0)) {
    throw BadOptions("tolerances must be positive");
  }
}

inline std::string to_string(Algorithm a) {
  return a == Algorithm::OptimalDamping ? "oda" : "roothaan";
}

}  // namespace prhf
