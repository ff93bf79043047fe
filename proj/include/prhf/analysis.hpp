#pragma once

// Post-hoc checks on converged solutions: orbital decay rates, the
// minimizer certificate, the Kato and Herbst inequalities and monotone
// binding in the electron number.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "prhf/error.hpp"
#include "prhf/fock.hpp"
#include "prhf/greens.hpp"
#include "prhf/radial.hpp"
#include "prhf/scf.hpp"

namespace prhf {

struct FitWindow {
  double r1 = 0.0;
  double r2 = 0.0;
};

struct DecayFit {
  int ell = 0;
  int spin = 0;
  int index = 0;
  FitWindow window;
  double beta_hat = 0.0;
  double residual = 0.0;  ///< RMS deviation of log|P/r| from the fitted line
  double nu = 0.0;        ///< nu_of_energy(eps)
  double e_folds = 0.0;   ///< drop of log|P/r| across the window
  int points = 0;
};

/// Relative magnitude below which orbital values count as numerical noise.
inline constexpr double kDecayNoiseFloor = 1e-11;

/// [4/7 r2, r2] with r2 = min(0.7 r_max, first r beyond the peak where
/// |P/r| drops below the noise floor).
inline FitWindow auto_decay_window(const Eigen::VectorXd& p, const RadialGrid& grid) {
  check_length(grid, p.size());
  const Eigen::VectorXd phi = p.cwiseQuotient(grid.r).cwiseAbs();
  Eigen::Index peak = 0;
  const double top = phi.maxCoeff(&peak);
  double r2 = 0.7 * grid.r_max;
  for (Eigen::Index i = peak; i < phi.size(); ++i) {
    if (phi[i] < kDecayNoiseFloor * top) {
      r2 = std::min(r2, grid.r[i - 1]);
      break;
    }
  }
  return {4.0 / 7.0 * r2, r2};
}

/// Least-squares slope of log|P(r)/r| over the window; beta_hat is minus the
/// slope. Throws WindowTooNoisy if the window reaches past 0.75 r_max, hits
/// the noise floor, or spans fewer than 6 e-folds.
inline DecayFit decay_fit(const Eigen::VectorXd& p, double eps, const RadialGrid& grid, double alpha,
                          std::optional<FitWindow> window = std::nullopt) {
  check_length(grid, p.size());
  const FitWindow w = window ? *window : auto_decay_window(p, grid);
  if (!(w.r1 > 0.0 && w.r2 > w.r1)) throw DomainError("decay window needs 0 < r1 < r2");
  if (w.r2 > 0.75 * grid.r_max) {
    throw WindowTooNoisy("decay window ends at " + std::to_string(w.r2) + ", beyond 0.75 r_max");
  }
  const Eigen::VectorXd phi = p.cwiseQuotient(grid.r).cwiseAbs();
  const double top = phi.maxCoeff();
  std::vector<double> xs, ys;
  for (int i = 0; i < grid.n; ++i) {
    if (grid.r[i] < w.r1 || grid.r[i] > w.r2) continue;
    if (!(phi[i] > kDecayNoiseFloor * top)) {
      throw WindowTooNoisy("orbital reaches the noise floor at r = " + std::to_string(grid.r[i]));
    }
    xs.push_back(grid.r[i]);
    ys.push_back(std::log(phi[i]));
  }
  if (xs.size() < 3) throw WindowTooNoisy("decay window holds fewer than 3 nodes");
  const auto m = static_cast<Eigen::Index>(xs.size());
  Eigen::MatrixXd a(m, 2);
  Eigen::VectorXd b(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    a(i, 0) = 1.0;
    a(i, 1) = xs[i];
    b[i] = ys[i];
  }
  const Eigen::Vector2d coef = a.colPivHouseholderQr().solve(b);
  DecayFit fit;
  fit.window = w;
  fit.beta_hat = -coef[1];
  fit.residual = std::sqrt((a * coef - b).squaredNorm() / static_cast<double>(m));
  fit.e_folds = ys.front() - ys.back();
  fit.points = static_cast<int>(m);
  fit.nu = nu_of_energy(eps, alpha);
  if (fit.e_folds < 6.0) {
    throw WindowTooNoisy("decay window spans only " + std::to_string(fit.e_folds) + " e-folds");
  }
  return fit;
}

/// Ritz pairs of a Fock channel inside the span of a block's orbitals.
struct RitzOrbital {
  int ell = 0;
  int spin = 0;
  double eps = 0.0;
  double lambda = 0.0;
  Eigen::VectorXd p;  ///< normalized in the grid inner product
};

/// Occupied orbitals as eigenvectors of h within each occupied block
/// (natural orbitals are only defined up to rotation among equal occupations).
inline std::vector<RitzOrbital> occupied_orbitals(const DensityMatrix& gamma, const FockOperator& fock,
                                                  const RadialGrid& grid, double min_lambda = 0.5) {
  std::vector<RitzOrbital> out;
  for (const auto& b : gamma.blocks) {
    std::vector<Eigen::Index> cols;
    for (Eigen::Index a = 0; a < b.size(); ++a) {
      if (b.lambda(a) > min_lambda) cols.push_back(a);
    }
    if (cols.empty()) continue;
    Eigen::MatrixXd q(grid.n, static_cast<Eigen::Index>(cols.size()));
    Eigen::VectorXd lam(q.cols());
    for (std::size_t j = 0; j < cols.size(); ++j) {
      q.col(static_cast<Eigen::Index>(j)) = b.orbitals.col(cols[j]);
      lam[static_cast<Eigen::Index>(j)] = b.lambda(cols[j]);
    }
    const Eigen::MatrixXd& h = fock.channel(b.ell, b.spin).matrix;
    Eigen::MatrixXd small = grid.h * q.transpose() * h * q;
    small = (0.5 * (small + small.transpose())).eval();
    const auto dec = symmetric_eigen(small);
    for (Eigen::Index j = 0; j < dec.values.size(); ++j) {
      RitzOrbital o;
      o.ell = b.ell;
      o.spin = b.spin;
      o.eps = dec.values[j];
      o.p = q * dec.vectors.col(j);
      Eigen::Index idx = 0;
      o.p.cwiseAbs().maxCoeff(&idx);
      if (o.p[idx] < 0.0) o.p = -o.p;
      o.lambda = dec.vectors.col(j).cwiseAbs2().dot(lam);
      out.push_back(std::move(o));
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const RitzOrbital& a, const RitzOrbital& b) { return a.eps < b.eps; });
  return out;
}

struct CertificateClause {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct MinimizerCertificate {
  std::vector<CertificateClause> clauses;

  bool passed() const {
    return std::all_of(clauses.begin(), clauses.end(), [](const CertificateClause& c) { return c.passed; });
  }
  std::vector<std::string> failed() const {
    std::vector<std::string> out;
    for (const auto& c : clauses) {
      if (!c.passed) out.push_back(c.name);
    }
    return out;
  }
};

/// Clauses (a) idempotency, (b) trace, (c) aufbau, (d) negativity and
/// (e) HF-equation residual for gamma against its own Fock operator.
/// `spectrum` must hold enough eigenpairs per channel to see the first
/// unoccupied level.
inline MinimizerCertificate minimizer_certificate(const DensityMatrix& gamma, const FockOperator& fock,
                                                  const FockSpectrum& spectrum, const AtomSystem& sys,
                                                  const RadialGrid& grid) {
  const double inv_alpha = sys.inv_alpha();
  MinimizerCertificate cert;

  const double defect = purification_defect(gamma);
  cert.clauses.push_back({"idempotency", defect <= 1e-6, defect, 1e-6, "max min(lambda, 1 - lambda)"});

  const double trace_err = std::abs(gamma.trace() - sys.N);
  cert.clauses.push_back({"trace", trace_err <= 1e-9, trace_err, 1e-9, "|Tr gamma - N|"});

  // occupation of each computed eigenvector: <v, gamma v> on its channel
  const double tie = 1e-8 * inv_alpha;
  double max_occ = -std::numeric_limits<double>::infinity();
  double min_unocc = std::numeric_limits<double>::infinity();
  double max_abs_occ = -std::numeric_limits<double>::infinity();
  double min_occ = std::numeric_limits<double>::infinity();
  for (const auto& ch : spectrum.channels) {
    const auto* b = gamma.find(ch.ell, ch.spin);
    for (Eigen::Index k = 0; k < ch.values.size(); ++k) {
      double lam = 0.0;
      if (b && b->size() > 0) {
        const Eigen::VectorXd overlap = grid.h * b->orbitals.transpose() * ch.vectors.col(k);
        for (Eigen::Index a = 0; a < b->size(); ++a) lam += overlap[a] * overlap[a] * b->lambda(a);
      }
      if (lam > 0.5) {
        max_occ = std::max(max_occ, ch.values[k]);
        min_occ = std::min(min_occ, ch.values[k]);
        max_abs_occ = std::max(max_abs_occ, ch.values[k]);
      } else {
        min_unocc = std::min(min_unocc, ch.values[k]);
      }
    }
  }
  const double aufbau_gap = max_occ - min_unocc;
  cert.clauses.push_back({"aufbau", aufbau_gap <= tie, aufbau_gap, tie,
                          "highest occupied minus lowest unoccupied eigenvalue"});

  const bool negative = max_abs_occ < 0.0 && min_occ > -inv_alpha;
  cert.clauses.push_back({"negativity", negative, max_abs_occ, 0.0,
                          "occupied eigenvalues in (-alpha^-1, 0); measured is the largest"});

  double worst = 0.0;
  for (const auto& o : occupied_orbitals(gamma, fock, grid)) {
    const Eigen::VectorXd res = fock.channel(o.ell, o.spin).matrix * o.p - o.eps * o.p;
    worst = std::max(worst, std::sqrt(grid.h) * res.norm());
  }
  cert.clauses.push_back({"hf_residual", worst <= 1e-7 * inv_alpha, worst, 1e-7 * inv_alpha,
                          "max ||h P - eps P|| over occupied orbitals"});
  return cert;
}

inline MinimizerCertificate minimizer_certificate(const SCFResult& res) {
  return minimizer_certificate(res.density, res.fock, res.spectrum, res.report.sys, res.ops.grid);
}

/// Throws CertificateFailure naming every violated clause.
inline void enforce(const MinimizerCertificate& cert) {
  const auto bad = cert.failed();
  if (bad.empty()) return;
  std::string msg = "certificate clauses failed:";
  for (const auto& b : bad) msg += " " + b;
  throw CertificateFailure(msg);
}

struct KatoProbe {
  double lhs = 0.0;  ///< int u^2 / r
  double rhs = 0.0;  ///< (pi/2) <u, |p| u>
};

/// Compares int u^2/r with (pi/2) <u, |p| u> for a normalized s-channel u;
/// `abs_p` is momentum_magnitude(grid, 0).
inline KatoProbe kato_probe(const Eigen::VectorXd& u, const RadialGrid& grid, const ChannelOperator& abs_p) {
  check_length(grid, u.size());
  KatoProbe k;
  k.lhs = grid.h * u.cwiseAbs2().cwiseQuotient(grid.r).sum();
  k.rhs = 0.5 * std::numbers::pi * grid.h * u.dot(abs_p.matrix() * u);
  return k;
}

inline KatoProbe kato_probe(const Eigen::VectorXd& u, const RadialGrid& grid) {
  return kato_probe(u, grid, momentum_magnitude(grid, 0));
}

struct HerbstCheck {
  double lowest = 0.0;  ///< lowest eigenvalue of h_0 over the channels, internal units
  double bound = 0.0;   ///< alpha^-1 (sqrt(1 - (pi Z alpha / 2)^2) - 1)
  int ell = 0;
  bool passed = false;
};

/// Lowest eigenvalue of the discretized T - Z alpha / r over ell <= ell_max
/// against the closed-form lower bound; throws BoundViolated if it falls
/// more than 1e-8 alpha^-1 below.
inline HerbstCheck herbst_bound_check(const AtomSystem& sys_in, const RadialGrid& grid, int ell_max = 0) {
  const AtomSystem sys = validate_system(sys_in);
  const double x = 0.5 * std::numbers::pi * sys.coupling();
  HerbstCheck out;
  out.bound = sys.inv_alpha() * (std::sqrt(1.0 - x * x) - 1.0);
  out.lowest = std::numeric_limits<double>::infinity();
  const Eigen::VectorXd v = (sys.Z * sys.alpha) * grid.r.cwiseInverse();
  for (int ell = 0; ell <= ell_max; ++ell) {
    Eigen::MatrixXd h = kinetic_operator(grid, ell, sys.alpha).matrix();
    h.diagonal() -= v;
    const double e = lowest_eigenpairs(h, 1).values[0];
    if (e < out.lowest) {
      out.lowest = e;
      out.ell = ell;
    }
  }
  out.passed = out.lowest >= out.bound - 1e-8 * sys.inv_alpha();
  if (!out.passed) {
    throw BoundViolated("lowest eigenvalue " + std::to_string(out.lowest) + " below bound " +
                        std::to_string(out.bound));
  }
  return out;
}

struct BindingRow {
  int N = 0;
  double energy = 0.0;    ///< Hartree
  double eps_homo = 0.0;  ///< alpha^-1 eps_N, Hartree
  int iterations = 0;
  bool converged = false;
  /// E(N) < E(N-1) - |alpha^-1 eps_N| / 2; always true for the first row.
  bool below_previous = true;
};

/// E^HF(N) for N = 1..N_max at fixed Z. Each run uses `opt`; NotConverged
/// propagates.
inline std::vector<BindingRow> binding_monotonicity(double Z, double alpha, int N_max, const SolverOptions& opt = {}) {
  if (N_max < 1) throw BadCount("N_max must be >= 1");
  std::vector<BindingRow> rows;
  for (int N = 1; N <= N_max; ++N) {
    AtomSystem sys;
    sys.Z = Z;
    sys.N = N;
    sys.alpha = alpha;
    const auto res = solve_scf(sys, opt);
    BindingRow row;
    row.N = N;
    row.energy = res.report.energy.total;
    double homo = -std::numeric_limits<double>::infinity();
    for (const auto& l : res.report.levels) {
      if (l.occupation > 0.5 * (2 * l.ell + 1)) homo = std::max(homo, l.eps);
    }
    row.eps_homo = homo * sys.inv_alpha();
    row.iterations = res.report.iterations;
    row.converged = res.report.converged;
    if (!rows.empty()) row.below_previous = row.energy < rows.back().energy - 0.5 * std::abs(row.eps_homo);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace prhf
