#pragma once

// Seeded generators for random quantum test data: unitaries, density
// matrices and projections. Deterministic for a fixed engine state.

#include <Eigen/Dense>

#include <random>

#include "ccc/quantum_space.hpp"

namespace ccc {

template <class Rng>
Matrix random_gaussian_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = Complex(normal(rng), normal(rng));
  }
  return m;
}

/// Haar-ish unitary from the QR factorization of a complex Gaussian matrix.
template <class Rng>
Matrix random_unitary(Eigen::Index dim, Rng& rng) {
  Eigen::HouseholderQR<Matrix> qr(random_gaussian_matrix(dim, dim, rng));
  return qr.householderQ() * Matrix::Identity(dim, dim);
}

/// G G* / Tr(G G*) with G of shape dim x rank.
template <class Rng>
QuantumSpace random_density(Eigen::Index dim, Eigen::Index rank, Rng& rng) {
  const Matrix g = random_gaussian_matrix(dim, rank, rng);
  Matrix w = g * g.adjoint();
  w /= w.trace().real();
  w = (w + w.adjoint()) / 2.0;
  return QuantumSpace(std::move(w));
}

/// U diag(mask) U* for the given unitary and 0/1 mask.
inline Projection projection_in_basis(const Matrix& unitary, std::uint64_t mask) {
  const Eigen::Index d = unitary.rows();
  Matrix diag = Matrix::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    if ((mask >> i) & 1U) diag(i, i) = 1.0;
  }
  Matrix p = unitary * diag * unitary.adjoint();
  p = (p + p.adjoint()) / 2.0;
  return Projection(std::move(p), 1e-8);
}

/// Random projection of uniformly random rank in a random basis.
template <class Rng>
Projection random_projection(Eigen::Index dim, Rng& rng) {
  const Matrix u = random_unitary(dim, rng);
  std::uniform_int_distribution<std::uint64_t> pick(0, (std::uint64_t{1} << dim) - 1);
  return projection_in_basis(u, pick(rng));
}

}  // namespace ccc
