#pragma once

// Common-cause completion of quantum probability spaces.
//
// The source space (C^d, W) is first doubled to C^d ⊕ C^d with state
// ½W ⊕ ½W, and X ↦ X ⊕ X. Writing ½W ⊕ ½W = Σ_k λ_k |ψ_k⟩⟨ψ_k|, the extension
// is the K-fold direct sum of C^{2d} with density blockdiag(λ_k |ψ_k⟩⟨ψ_k|)
// and X ↦ blockdiag(X ⊕ X, ..., X ⊕ X). In each block the common cause
// contains, for every cell Q of the pair (a, b), the rank-one projection onto
// cos ω v¹ + sin ω v², where v¹ ∝ (Q ⊕ Q)ψ_k and v² ⊥ v¹ lies in the range of
// Q ⊕ Q.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ccc/errors.hpp"
#include "ccc/quantum_space.hpp"
#include "ccc/reichenbach.hpp"

namespace ccc {

struct SpectralTerm {
  double weight = 0.0;
  Vector vector;
};

namespace detail {
// Multiplies v by a unit phase so its first non-negligible entry is real > 0.
inline void fix_phase(Vector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > 1e-12) {
      v *= std::conj(v[i]) / std::abs(v[i]);
      return;
    }
  }
}
}  // namespace detail

/// Decomposition of ½W ⊕ ½W into weighted one-dimensional projections.
/// Eigenvalues of W at or below the psd tolerance are dropped; each retained
/// eigenpair (μ, u) of W contributes (μ/2, u ⊕ 0) followed by (μ/2, 0 ⊕ u), in
/// order of descending μ.
inline std::vector<SpectralTerm> spectral_decompose(const QuantumSpace& qs,
                                                    const Tolerances& tol = {}) {
  const Eigen::Index d = qs.dim();
  Eigen::SelfAdjointEigenSolver<Matrix> es(Matrix((qs.density() + qs.density().adjoint()) / 2.0));
  if (es.info() != Eigen::Success) fail(ErrorCode::NotPositive, "eigendecomposition failed");
  const auto& values = es.eigenvalues();
  if (values.minCoeff() < -tol.psd) fail(ErrorCode::NotPositive, "density matrix is not positive");

  std::vector<SpectralTerm> terms;
  for (Eigen::Index j = d; j-- > 0;) {  // Eigen sorts ascending
    if (values[j] <= tol.psd) continue;
    Vector u = es.eigenvectors().col(j);
    u.normalize();
    detail::fix_phase(u);
    Vector first = Vector::Zero(2 * d);
    Vector second = Vector::Zero(2 * d);
    first.head(d) = u;
    second.tail(d) = u;
    terms.push_back({values[j] / 2.0, std::move(first)});
    terms.push_back({values[j] / 2.0, std::move(second)});
  }
  return terms;
}

/// X ↦ blockdiag(X ⊕ X, ..., X ⊕ X) into the extension built from the blocks.
struct QEmbedding {
  std::vector<double> block_weights;
  std::vector<Vector> block_vectors;
  Eigen::Index source_dim = 0;
  Eigen::Index target_dim = 0;

  Eigen::Index block_dim() const noexcept { return 2 * source_dim; }
  std::size_t blocks() const noexcept { return block_weights.size(); }

  Matrix doubled(const Matrix& x) const {
    detail::check_dims(x.rows(), source_dim);
    Matrix out = Matrix::Zero(block_dim(), block_dim());
    out.topLeftCorner(source_dim, source_dim) = x;
    out.bottomRightCorner(source_dim, source_dim) = x;
    return out;
  }

  Matrix map(const Matrix& x) const {
    const Matrix dx = doubled(x);
    Matrix out = Matrix::Zero(target_dim, target_dim);
    for (std::size_t k = 0; k < blocks(); ++k) {
      const auto off = static_cast<Eigen::Index>(k) * block_dim();
      out.block(off, off, block_dim(), block_dim()) = dx;
    }
    return out;
  }

  Projection map(const Projection& p) const { return Projection(map(p.matrix())); }
};

struct QExtension {
  QuantumSpace space;
  QEmbedding embedding;
};

inline QExtension build_extension(const QuantumSpace& qs, const Tolerances& tol = {}) {
  const auto terms = spectral_decompose(qs, tol);
  QEmbedding emb;
  emb.source_dim = qs.dim();
  emb.target_dim = static_cast<Eigen::Index>(terms.size()) * emb.block_dim();

  // Retained weights sum to 1 minus the dropped eigenvalues; renormalize so W′
  // has unit trace.
  double total = 0.0;
  for (const auto& t : terms) total += t.weight;
  Matrix w = Matrix::Zero(emb.target_dim, emb.target_dim);
  for (std::size_t k = 0; k < terms.size(); ++k) {
    const double lambda = terms[k].weight / total;
    emb.block_weights.push_back(lambda);
    emb.block_vectors.push_back(terms[k].vector);
    const auto off = static_cast<Eigen::Index>(k) * emb.block_dim();
    w.block(off, off, emb.block_dim(), emb.block_dim()) =
        lambda * terms[k].vector * terms[k].vector.adjoint();
  }
  return {QuantumSpace(std::move(w), tol), std::move(emb)};
}

/// Largest |φ′(h(X)) − φ(X)| over the given test projections.
inline double extension_fidelity_error(const QuantumSpace& source, const QExtension& ext,
                                       std::span<const Projection> tests,
                                       const Tolerances& tol = {}) {
  double worst = 0.0;
  for (const auto& x : tests) {
    const double lhs = state_value(ext.space, ext.embedding.map(x), tol);
    worst = std::max(worst, std::abs(lhs - state_value(source, x, tol)));
  }
  return worst;
}

enum class Cell { AnotB, AB, NotAB, NotANotB };

inline constexpr std::array<Cell, 4> kCells = {Cell::AnotB, Cell::AB, Cell::NotAB, Cell::NotANotB};

constexpr const char* cell_name(Cell c) noexcept {
  switch (c) {
    case Cell::AnotB: return "a&~b";
    case Cell::AB: return "a&b";
    case Cell::NotAB: return "~a&b";
    case Cell::NotANotB: return "~a&~b";
  }
  return "?";
}

/// ρ_Q: the probability the requested type assigns to C ∧ Q.
template <class T>
T cell_weight(const BasicCcType<T>& ct, Cell cell) {
  const T& rc = ct.r_c;
  const T& t = ct.r_a_given_c;
  const T& s = ct.r_b_given_c;
  switch (cell) {
    case Cell::AnotB: return t * (T(1) - s) * rc;
    case Cell::AB: return t * s * rc;
    case Cell::NotAB: return s * (T(1) - t) * rc;
    case Cell::NotANotB: return rc * (T(1) - t - s + t * s);
  }
  return T(0);
}

/// Per-cell construction record, kept for verification.
struct CellConstruction {
  Cell cell = Cell::AB;
  double rho = 0.0;          ///< ρ_Q
  double source_value = 0.0; ///< φ(Q)
  double cos2 = 0.0;         ///< cos²ω, identical across blocks
  std::vector<double> overlaps;  ///< ⟨ψ_k, (Q⊕Q) ψ_k⟩ per block
  std::vector<Vector> vectors;   ///< unit cell vector per block (empty when unused)
  Matrix projection;             ///< P_Q on the extension

  /// Σ_k λ_k cos²ω ⟨ψ_k,(Q⊕Q)ψ_k⟩, which the construction makes equal to ρ_Q.
  double telescoped(std::span<const double> lambdas) const {
    double sum = 0.0;
    for (std::size_t k = 0; k < overlaps.size(); ++k) {
      if (vectors[k].size() != 0) sum += lambdas[k] * cos2 * overlaps[k];
    }
    return sum;
  }
};

struct QCommonCause {
  Projection cause;
  std::array<CellConstruction, 4> cells;
};

namespace detail {
inline Matrix cell_matrix(const Projection& a, const Projection& b, Cell cell) {
  const Eigen::Index d = a.dim();
  const Matrix id = Matrix::Identity(d, d);
  const Matrix& am = a.matrix();
  const Matrix& bm = b.matrix();
  switch (cell) {
    case Cell::AnotB: return am * (id - bm);
    case Cell::AB: return am * bm;
    case Cell::NotAB: return (id - am) * bm;
    case Cell::NotANotB: return (id - am) * (id - bm);
  }
  return Matrix::Zero(d, d);
}

// First canonical basis vector whose component in range(q) ∩ v1⊥ is large
// enough, normalized. The threshold is at most the mean squared norm, so
// some basis vector always passes when range(q) has dimension ≥ 2.
inline Vector orthogonal_in_range(const Matrix& q, const Vector& v1) {
  const Eigen::Index n = q.rows();
  const double threshold = 1.0 / (2.0 * static_cast<double>(n));
  for (Eigen::Index j = 0; j < n; ++j) {
    Vector u = q.col(j);
    u -= v1 * v1.dot(u);  // dot() conjugates the first argument
    if (u.squaredNorm() >= threshold) return u.normalized();
  }
  fail(ErrorCode::CellDimensionTooSmall, "no direction orthogonal to v1 in the cell");
}
}  // namespace detail

/// Builds the common cause of type `ct` for the commuting correlated pair
/// (a, b) of the source space inside `ext`.
inline QCommonCause construct_common_cause(const QExtension& ext, const Projection& a,
                                           const Projection& b, const QCcType& ct,
                                           const Tolerances& tol = {}) {
  const QEmbedding& emb = ext.embedding;
  detail::check_dims(a.dim(), emb.source_dim);
  detail::check_dims(b.dim(), emb.source_dim);
  detail::require_commuting(a, b, tol, "a and b");

  const double mu_a = state_value(ext.space, emb.map(a), tol);
  const double mu_b = state_value(ext.space, emb.map(b), tol);
  const double mu_ab = state_value(ext.space, emb.map(meet_commuting(a, b, tol)), tol);
  if (!(mu_ab - mu_a * mu_b > tol.eq)) fail(ErrorCode::NotCorrelated, "pair is not correlated");
  if (!is_admissible(ct, mu_a, mu_b, mu_ab, Slack<double>{tol.eq, tol.gt})) {
    fail(ErrorCode::NotAdmissible, "type is not admissible for this correlation");
  }

  const Eigen::Index bd = emb.block_dim();
  const std::size_t blocks = emb.blocks();
  Matrix total = Matrix::Zero(emb.target_dim, emb.target_dim);
  std::array<CellConstruction, 4> cells;
  for (std::size_t ci = 0; ci < kCells.size(); ++ci) {
    CellConstruction& cc = cells[ci];
    cc.cell = kCells[ci];
    cc.rho = cell_weight(ct, cc.cell);
    cc.projection = Matrix::Zero(emb.target_dim, emb.target_dim);
    cc.overlaps.assign(blocks, 0.0);
    cc.vectors.assign(blocks, Vector());

    const Matrix q = emb.doubled(detail::cell_matrix(a, b, cc.cell));
    for (std::size_t k = 0; k < blocks; ++k) {
      cc.overlaps[k] = emb.block_vectors[k].dot(q * emb.block_vectors[k]).real();
      cc.source_value += emb.block_weights[k] * cc.overlaps[k];
    }
    if (cc.source_value <= tol.eq) {
      if (cc.rho > tol.gt) {
        fail(ErrorCode::CosineOutOfRange,
             std::string("cell ") + cell_name(cc.cell) + " is null but the type needs weight there");
      }
      continue;
    }
    cc.cos2 = cc.rho / cc.source_value;
    if (cc.cos2 < -tol.eq || cc.cos2 > 1.0 + tol.eq) {
      fail(ErrorCode::CosineOutOfRange, std::string("cos^2 for cell ") + cell_name(cc.cell) +
                                            " is " + std::to_string(cc.cos2));
    }
    cc.cos2 = std::clamp(cc.cos2, 0.0, 1.0);
    const double cos_w = std::sqrt(cc.cos2);
    const double sin_w = std::sqrt(1.0 - cc.cos2);

    for (std::size_t k = 0; k < blocks; ++k) {
      if (cc.overlaps[k] <= tol.eq) continue;
      const Vector qpsi = q * emb.block_vectors[k];
      const Vector v1 = qpsi.normalized();
      Vector v = cos_w * v1;
      if (sin_w > tol.eq) v += sin_w * detail::orthogonal_in_range(q, v1);
      v.normalize();
      const auto off = static_cast<Eigen::Index>(k) * bd;
      cc.projection.block(off, off, bd, bd) += v * v.adjoint();
      cc.vectors[k] = std::move(v);
    }
    total += cc.projection;
  }
  return {Projection(std::move(total), std::max(tol.projection, 1e-8)), std::move(cells)};
}

struct QRequest {
  Projection a;
  Projection b;
  QCcType type;
};

struct QCauseResult {
  std::size_t request_index = 0;
  QCommonCause construction;
  CcVerdict verdict;
  QCcType measured;
  double type_error = 0.0;  ///< max deviation of `measured` from the request
  bool type_matches = false;
};

struct QCompletionReport {
  QExtension extension;
  std::vector<QCauseResult> causes;
  std::vector<std::vector<bool>> causes_commute;  ///< pairwise commutation of the C's
};

inline double type_distance(const QCcType& x, const QCcType& y) {
  return std::max({std::abs(x.r_c - y.r_c), std::abs(x.r_a_given_c - y.r_a_given_c),
                   std::abs(x.r_b_given_c - y.r_b_given_c),
                   std::abs(x.r_a_given_cperp - y.r_a_given_cperp),
                   std::abs(x.r_b_given_cperp - y.r_b_given_cperp)});
}

/// One extension hosting a common cause for every request.
inline QCompletionReport complete_quantum(const QuantumSpace& qs,
                                          const std::vector<QRequest>& requests,
                                          const Tolerances& tol = {}) {
  QCompletionReport report{build_extension(qs, tol), {}, {}};
  const QExtension& ext = report.extension;
  for (std::size_t i = 0; i < requests.size(); ++i) {
    const auto& req = requests[i];
    QCauseResult r;
    r.request_index = i;
    r.construction = construct_common_cause(ext, req.a, req.b, req.type, tol);
    const Projection ha = ext.embedding.map(req.a);
    const Projection hb = ext.embedding.map(req.b);
    r.verdict = check_quantum_common_cause(ext.space, ha, hb, r.construction.cause, tol);
    r.measured = measured_type_q(ext.space, ha, hb, r.construction.cause, tol);
    r.type_error = type_distance(r.measured, req.type);
    r.type_matches = r.type_error <= tol.eq;
    report.causes.push_back(std::move(r));
  }
  const std::size_t n = report.causes.size();
  report.causes_commute.assign(n, std::vector<bool>(n, true));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool c = commutes(report.causes[i].construction.cause,
                              report.causes[j].construction.cause, tol);
      report.causes_commute[i][j] = report.causes_commute[j][i] = c;
    }
  }
  return report;
}

}  // namespace ccc
