#pragma once

// Thin LAPACK wrappers for the symmetric eigenproblems used throughout.

#include <lapacke.h>

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "prhf/error.hpp"

namespace prhf {

/// Eigenvalues ascending, orthonormal eigenvectors as columns.
struct SpectralDecomposition {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;

  Eigen::MatrixXd reconstruct() const {
    return vectors * values.asDiagonal() * vectors.transpose();
  }
};

inline SpectralDecomposition symmetric_eigen(const Eigen::MatrixXd& a) {
  const auto n = static_cast<lapack_int>(a.rows());
  SpectralDecomposition out;
  out.vectors = a;
  out.values.resize(n);
  if (n == 0) return out;
  const lapack_int info =
      LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', n, out.vectors.data(), n, out.values.data());
  if (info != 0) throw EigFailure("dsyevd failed with info = " + std::to_string(info));
  return out;
}

/// Full decomposition of the symmetric tridiagonal matrix with the given
/// diagonal and off-diagonal.
inline SpectralDecomposition tridiagonal_eigen(const Eigen::VectorXd& diag, const Eigen::VectorXd& off) {
  const auto n = static_cast<lapack_int>(diag.size());
  SpectralDecomposition out;
  out.values = diag;
  out.vectors.resize(n, n);
  if (n == 0) return out;
  Eigen::VectorXd e = off;
  e.conservativeResize(std::max<lapack_int>(n - 1, 1));
  const lapack_int info =
      LAPACKE_dstevd(LAPACK_COL_MAJOR, 'V', n, out.values.data(), e.data(), out.vectors.data(), n);
  if (info != 0) throw EigFailure("dstevd failed with info = " + std::to_string(info));
  return out;
}

/// The `count` lowest eigenpairs of a symmetric matrix (MRRR).
inline SpectralDecomposition lowest_eigenpairs(const Eigen::MatrixXd& a, int count) {
  const auto n = static_cast<lapack_int>(a.rows());
  const lapack_int k = std::min<lapack_int>(count, n);
  SpectralDecomposition out;
  if (k <= 0) {
    out.vectors.resize(n, 0);
    return out;
  }
  Eigen::MatrixXd work = a;
  Eigen::VectorXd w(n);
  out.vectors.resize(n, k);
  std::vector<lapack_int> support(2 * static_cast<std::size_t>(k));
  lapack_int found = 0;
  const lapack_int info = LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', 'I', 'L', n, work.data(), n, 0.0, 0.0, 1, k,
                                         0.0, &found, w.data(), out.vectors.data(), n, support.data());
  if (info != 0 || found != k) {
    throw EigFailure("dsyevr failed with info = " + std::to_string(info));
  }
  out.values = w.head(k);
  return out;
}

}  // namespace prhf
