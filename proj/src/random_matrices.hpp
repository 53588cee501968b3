#pragma once

#include <Eigen/QR>
#include <cmath>

#include "matcore.hpp"
#include "rng.hpp"

namespace lrsense {

inline DenseMatrix gaussian_matrix(int rows, int cols, Rng& rng) {
  DenseMatrix g(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) g(i, j) = rng.gaussian();
  }
  return g;
}

// Orthonormal basis of a random k-dimensional subspace: thin Q factor of an
// m x k Gaussian matrix.
inline DenseMatrix orthonormal_columns(int m, int k, Rng& rng) {
  const DenseMatrix g = gaussian_matrix(m, k, rng);
  Eigen::HouseholderQR<DenseMatrix> qr(g);
  DenseMatrix q = qr.householderQ() * DenseMatrix::Identity(m, k);
  return q;
}

// Uniform point on the probability simplex (k exponential draws, normalized).
inline Vector simplex_weights(int k, Rng& rng) {
  Vector w(k);
  for (int i = 0; i < k; ++i) w(i) = -std::log(rng.uniform_open());
  w /= w.sum();
  return w;
}

// Simplex draw rescaled to unit Euclidean norm; covers both flat and spiked
// spectra for rank-constrained probes.
inline Vector simplex_unit_l2(int k, Rng& rng) {
  Vector w = simplex_weights(k, rng);
  return w / w.norm();
}

// Random rank-s matrix with unit Frobenius norm: U diag(w) V^T with U, V
// orthonormalized Gaussian factors and w a unit-l2 simplex spectrum.
inline DenseMatrix random_low_rank_unit(int m, int s, Rng& rng) {
  const DenseMatrix u = orthonormal_columns(m, s, rng);
  const DenseMatrix v = orthonormal_columns(m, s, rng);
  const Vector w = simplex_unit_l2(s, rng);
  return u * w.asDiagonal() * v.transpose();
}

}  // namespace lrsense
