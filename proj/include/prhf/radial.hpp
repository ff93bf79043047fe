#pragma once

// Radial discretization: uniform Dirichlet grid, per-channel Laplacian and
// spectral functions of it (|p|, E(p), T).
//
// Functions on the grid are reduced radial functions P(r) = r * phi(r) sampled
// at the interior nodes r_i = i h, i = 1..n; P vanishes at r = 0 and r_max.

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "prhf/error.hpp"
#include "prhf/linalg.hpp"
#include "prhf/model.hpp"

namespace prhf {

struct RadialGrid {
  int n = 0;
  double h = 0.0;
  double r_max = 0.0;
  Eigen::VectorXd r;

  double node(int i) const { return r[i]; }
};

inline RadialGrid build_grid(int n, double r_max) {
  if (n < 1 || !(r_max > 0.0) || !std::isfinite(r_max)) {
    throw BadGrid("grid needs n >= 1 and finite r_max > 0 (got n = " + std::to_string(n) + ")");
  }
  RadialGrid g;
  g.n = n;
  g.r_max = r_max;
  g.h = r_max / (n + 1);
  g.r.resize(n);
  for (int i = 0; i < n; ++i) g.r[i] = (i + 1) * g.h;
  return g;
}

inline void check_length(const RadialGrid& grid, Eigen::Index size) {
  if (size != grid.n) {
    throw LengthMismatch("expected " + std::to_string(grid.n) + " node values, got " + std::to_string(size));
  }
}

inline double integrate(const RadialGrid& grid, const Eigen::VectorXd& values) {
  check_length(grid, values.size());
  return grid.h * values.sum();
}

inline double inner(const RadialGrid& grid, const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  check_length(grid, a.size());
  check_length(grid, b.size());
  return grid.h * a.dot(b);
}

inline double norm(const RadialGrid& grid, const Eigen::VectorXd& a) { return std::sqrt(inner(grid, a, a)); }

/// A symmetric operator on one angular-momentum channel with a lazily
/// computed eigendecomposition. Copies share the decomposition.
class ChannelOperator {
 public:
  ChannelOperator() = default;

  ChannelOperator(int ell, Eigen::MatrixXd matrix, bool tridiagonal = false)
      : ell_(ell), matrix_(std::move(matrix)), cache_(std::make_shared<Cache>()) {
    cache_->tridiagonal = tridiagonal;
  }

  ChannelOperator(int ell, Eigen::MatrixXd matrix, SpectralDecomposition known)
      : ChannelOperator(ell, std::move(matrix)) {
    std::call_once(cache_->once, [&] { cache_->value = std::move(known); });
  }

  int ell() const { return ell_; }
  const Eigen::MatrixXd& matrix() const { return matrix_; }
  Eigen::Index size() const { return matrix_.rows(); }

  const SpectralDecomposition& spectrum() const {
    std::call_once(cache_->once, [this] {
      if (cache_->tridiagonal) {
        const Eigen::Index n = matrix_.rows();
        Eigen::VectorXd off = n > 1 ? Eigen::VectorXd(matrix_.diagonal(-1)) : Eigen::VectorXd::Zero(1);
        cache_->value = tridiagonal_eigen(matrix_.diagonal(), off);
      } else {
        cache_->value = symmetric_eigen(matrix_);
      }
    });
    return *cache_->value;
  }

 private:
  struct Cache {
    std::once_flag once;
    std::optional<SpectralDecomposition> value;
    bool tridiagonal = false;
  };
  int ell_ = 0;
  Eigen::MatrixXd matrix_;
  std::shared_ptr<Cache> cache_ = std::make_shared<Cache>();
};

/// -d^2/dr^2 + ell(ell+1)/r^2 by second-order central differences.
inline ChannelOperator channel_laplacian(const RadialGrid& grid, int ell) {
  if (ell < 0) throw BadGrid("ell must be >= 0");
  const int n = grid.n;
  const double inv_h2 = 1.0 / (grid.h * grid.h);
  const double centrifugal = ell * (ell + 1.0);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    m(i, i) = 2.0 * inv_h2 + centrifugal / (grid.r[i] * grid.r[i]);
    if (i + 1 < n) {
      m(i, i + 1) = -inv_h2;
      m(i + 1, i) = -inv_h2;
    }
  }
  return ChannelOperator(ell, std::move(m), /*tridiagonal=*/true);
}

/// U f(D) U^T from the eigendecomposition of `op`.
inline ChannelOperator spectral_function(const ChannelOperator& op, const std::function<double(double)>& f) {
  const auto& s = op.spectrum();
  Eigen::VectorXd fv(s.values.size());
  for (Eigen::Index i = 0; i < fv.size(); ++i) fv[i] = f(s.values[i]);

  Eigen::MatrixXd scaled = s.vectors * fv.asDiagonal();
  Eigen::MatrixXd m = scaled * s.vectors.transpose();
  m = (0.5 * (m + m.transpose())).eval();

  // f need not be monotone; keep the cached decomposition ascending.
  std::vector<Eigen::Index> order(fv.size());
  for (Eigen::Index i = 0; i < fv.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return fv[a] < fv[b]; });
  SpectralDecomposition known;
  known.values.resize(fv.size());
  known.vectors.resize(s.vectors.rows(), s.vectors.cols());
  for (Eigen::Index i = 0; i < fv.size(); ++i) {
    known.values[i] = fv[order[i]];
    known.vectors.col(i) = s.vectors.col(order[i]);
  }
  return ChannelOperator(op.ell(), std::move(m), std::move(known));
}

/// sqrt(mu + alpha^-2) - alpha^-1 written without cancellation.
inline double relativistic_kinetic(double mu, double alpha) {
  const double m = 1.0 / alpha;
  const double mu_pos = std::max(mu, 0.0);
  return mu_pos / (std::sqrt(mu_pos + m * m) + m);
}

inline ChannelOperator kinetic_operator(const RadialGrid& grid, int ell, double alpha) {
  if (!(alpha > 0.0)) throw DomainError("alpha must be positive");
  return spectral_function(channel_laplacian(grid, ell), [alpha](double mu) { return relativistic_kinetic(mu, alpha); });
}

/// alpha * L / 2: the kinetic operator whose alpha^-1 multiple is the
/// Schroedinger -Delta/2.
inline ChannelOperator nonrelativistic_kinetic_operator(const RadialGrid& grid, int ell, double alpha) {
  const auto lap = channel_laplacian(grid, ell);
  return spectral_function(lap, [alpha](double mu) { return 0.5 * alpha * mu; });
}

/// |p| restricted to a channel: the square root of the Laplacian.
inline ChannelOperator momentum_magnitude(const RadialGrid& grid, int ell) {
  return spectral_function(channel_laplacian(grid, ell), [](double mu) { return std::sqrt(std::max(mu, 0.0)); });
}

/// Everything one-body that the functional and the Fock builder need: the
/// grid, the system, kinetic operators for ell = 0..ell_max and Z alpha / r.
struct OneBodyOperators {
  RadialGrid grid;
  AtomSystem sys;
  KineticKind kind = KineticKind::Relativistic;
  std::vector<ChannelOperator> kinetic;
  Eigen::VectorXd nuclear;

  int ell_max() const { return static_cast<int>(kinetic.size()) - 1; }

  const ChannelOperator& T(int ell) const {
    if (ell < 0 || ell > ell_max()) {
      throw DomainError("no kinetic operator for ell = " + std::to_string(ell));
    }
    return kinetic[ell];
  }
};

inline OneBodyOperators make_one_body(const RadialGrid& grid, const AtomSystem& sys, int ell_max,
                                      KineticKind kind = KineticKind::Relativistic) {
  OneBodyOperators ops;
  ops.grid = grid;
  ops.sys = sys;
  ops.kind = kind;
  for (int ell = 0; ell <= ell_max; ++ell) {
    ops.kinetic.push_back(kind == KineticKind::Relativistic ? kinetic_operator(grid, ell, sys.alpha)
                                                            : nonrelativistic_kinetic_operator(grid, ell, sys.alpha));
  }
  ops.nuclear = (sys.Z * sys.alpha) * grid.r.cwiseInverse();
  return ops;
}

}  // namespace prhf
