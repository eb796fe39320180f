#pragma once

// Finite-dimensional quantum probability spaces: a density matrix W on C^d
// and the state φ(P) = Tr(W P) on the projection lattice. Lattice operations
// are only provided for commuting projections.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#include "ccc/errors.hpp"
#include "ccc/reichenbach.hpp"

namespace ccc {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Absolute tolerances on unit-scale matrices.
struct Tolerances {
  double hermitian = 1e-9;
  double projection = 1e-9;
  double commute = 1e-9;
  double eq = 1e-9;   ///< equalities of the common-cause conditions
  double gt = 1e-7;   ///< margin required by strict inequalities
  double trace = 1e-12;
  double psd = 1e-9;  ///< most negative eigenvalue still accepted
  double clamp = 1e-9;
};

inline double max_abs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

/// An orthogonal projection P = P* = P².
class Projection {
 public:
  Projection() = default;
  explicit Projection(Matrix m, double tol = Tolerances{}.projection) : m_(std::move(m)) {
    if (m_.rows() != m_.cols()) fail(ErrorCode::DimensionMismatch, "projection must be square");
    if (max_abs(m_ - m_.adjoint()) > tol) fail(ErrorCode::InvalidSpace, "projection is not self-adjoint");
    if (max_abs(m_ * m_ - m_) > tol) fail(ErrorCode::InvalidSpace, "projection is not idempotent");
  }

  static Projection zero(Eigen::Index dim) { return Projection(Matrix::Zero(dim, dim)); }
  static Projection identity(Eigen::Index dim) { return Projection(Matrix::Identity(dim, dim)); }

  /// Projection onto the span of a non-zero vector.
  static Projection onto(const Vector& v) {
    const double n2 = v.squaredNorm();
    if (n2 == 0.0) fail(ErrorCode::InvalidSpace, "cannot project onto the zero vector");
    return Projection(v * v.adjoint() / n2);
  }

  Eigen::Index dim() const noexcept { return m_.rows(); }
  const Matrix& matrix() const noexcept { return m_; }
  /// I − P; inherits the accuracy of P, so it is not re-validated.
  Projection complement() const {
    Projection out;
    out.m_ = Matrix::Identity(dim(), dim()) - m_;
    return out;
  }

 private:
  Matrix m_;
};

class QuantumSpace {
 public:
  explicit QuantumSpace(Matrix density, const Tolerances& tol = {}) : w_(std::move(density)) {
    if (w_.rows() == 0 || w_.rows() != w_.cols()) {
      fail(ErrorCode::InvalidSpace, "density matrix must be square and non-empty");
    }
    if (max_abs(w_ - w_.adjoint()) > tol.hermitian) {
      fail(ErrorCode::InvalidSpace, "density matrix is not Hermitian");
    }
    if (std::abs(w_.trace() - Complex(1.0)) > tol.trace) {
      fail(ErrorCode::InvalidSpace, "density matrix trace is not 1");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(Matrix((w_ + w_.adjoint()) / 2.0),
                                             Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -tol.psd) {
      fail(ErrorCode::NotPositive, "density matrix has a negative eigenvalue");
    }
  }

  /// Pure state |v⟩⟨v| for a non-zero vector v.
  static QuantumSpace pure(const Vector& v) {
    return QuantumSpace(Matrix(v * v.adjoint() / v.squaredNorm()));
  }

  Eigen::Index dim() const noexcept { return w_.rows(); }
  const Matrix& density() const noexcept { return w_; }

 private:
  Matrix w_;
};

namespace detail {
inline void check_dims(Eigen::Index x, Eigen::Index y) {
  if (x != y) {
    fail(ErrorCode::DimensionMismatch,
         "dimensions " + std::to_string(x) + " and " + std::to_string(y) + " differ");
  }
}
}  // namespace detail

/// Re Tr(W P), snapped to 0 or 1 when within the clamp tolerance of either.
inline double state_value(const QuantumSpace& qs, const Projection& p,
                          const Tolerances& tol = {}) {
  detail::check_dims(qs.dim(), p.dim());
  double v = (qs.density() * p.matrix()).trace().real();
  if (v < 0.0 && v > -tol.clamp) v = 0.0;
  if (v > 1.0 && v < 1.0 + tol.clamp) v = 1.0;
  return v;
}

inline bool commutes(const Projection& p, const Projection& q, const Tolerances& tol = {}) {
  detail::check_dims(p.dim(), q.dim());
  return max_abs(p.matrix() * q.matrix() - q.matrix() * p.matrix()) <= tol.commute;
}

namespace detail {
inline void require_commuting(const Projection& p, const Projection& q, const Tolerances& tol,
                              const char* what) {
  if (!commutes(p, q, tol)) fail(ErrorCode::NonCommuting, std::string(what) + " do not commute");
}
inline Projection symmetrized(const Matrix& m, const Tolerances& tol) {
  return Projection(Matrix((m + m.adjoint()) / 2.0), std::max(tol.projection, 1e-8));
}
}  // namespace detail

/// p ∧ q = pq for commuting projections.
inline Projection meet_commuting(const Projection& p, const Projection& q,
                                 const Tolerances& tol = {}) {
  detail::require_commuting(p, q, tol, "meet arguments");
  return detail::symmetrized(p.matrix() * q.matrix(), tol);
}

/// p ∨ q = p + q − pq for commuting projections.
inline Projection join_commuting(const Projection& p, const Projection& q,
                                 const Tolerances& tol = {}) {
  detail::require_commuting(p, q, tol, "join arguments");
  return detail::symmetrized(p.matrix() + q.matrix() - p.matrix() * q.matrix(), tol);
}

/// (p ∨ q) − (p ∧ q) = p + q − 2pq for commuting projections.
inline Projection symmetric_difference(const Projection& p, const Projection& q,
                                       const Tolerances& tol = {}) {
  detail::require_commuting(p, q, tol, "symmetric difference arguments");
  return detail::symmetrized(p.matrix() + q.matrix() - 2.0 * p.matrix() * q.matrix(), tol);
}

/// p ≤ q in the projection lattice (qp = p).
inline bool leq(const Projection& p, const Projection& q, const Tolerances& tol = {}) {
  detail::check_dims(p.dim(), q.dim());
  return max_abs(q.matrix() * p.matrix() - p.matrix()) <= tol.projection;
}

/// φ(a ∧ b) − φ(a)φ(b) for commuting a, b.
inline double correlation_q(const QuantumSpace& qs, const Projection& a, const Projection& b,
                            const Tolerances& tol = {}) {
  const Projection ab = meet_commuting(a, b, tol);
  return state_value(qs, ab, tol) - state_value(qs, a, tol) * state_value(qs, b, tol);
}

using QCcType = BasicCcType<double>;

/// (φ(c), φ(a|c), φ(b|c), φ(a|c⊥), φ(b|c⊥)) with φ(x|y) = φ(x ∧ y)/φ(y).
inline QCcType measured_type_q(const QuantumSpace& qs, const Projection& a, const Projection& b,
                               const Projection& c, const Tolerances& tol = {}) {
  const Projection cp = c.complement();
  const double pc = state_value(qs, c, tol);
  const double pcp = state_value(qs, cp, tol);
  if (pc <= tol.eq || pcp <= tol.eq) {
    fail(ErrorCode::ZeroProbabilityCondition, pc <= tol.eq ? "phi(c) is zero" : "phi(c_perp) is zero");
  }
  return {pc, state_value(qs, meet_commuting(a, c, tol), tol) / pc,
          state_value(qs, meet_commuting(b, c, tol), tol) / pc,
          state_value(qs, meet_commuting(a, cp, tol), tol) / pcp,
          state_value(qs, meet_commuting(b, cp, tol), tol) / pcp};
}

inline CcVerdict check_quantum_common_cause(const QuantumSpace& qs, const Projection& a,
                                            const Projection& b, const Projection& c,
                                            const Tolerances& tol = {}) {
  detail::require_commuting(a, b, tol, "a and b");
  detail::require_commuting(c, a, tol, "c and a");
  detail::require_commuting(c, b, tol, "c and b");
  const Projection cp = c.complement();
  const std::pair<const char*, const Projection*> items[] = {
      {"phi(a)", &a}, {"phi(b)", &b}, {"phi(c)", &c}, {"phi(c_perp)", &cp}};
  for (const auto& [label, p] : items) {
    if (state_value(qs, *p, tol) <= tol.eq) {
      fail(ErrorCode::ZeroProbabilityCondition, std::string(label) + " is zero");
    }
  }

  const double pc = state_value(qs, c, tol);
  const double pcp = state_value(qs, cp, tol);
  const Projection ab = meet_commuting(a, b, tol);
  const double a_c = state_value(qs, meet_commuting(a, c, tol), tol) / pc;
  const double b_c = state_value(qs, meet_commuting(b, c, tol), tol) / pc;
  const double ab_c = state_value(qs, meet_commuting(ab, c, tol), tol) / pc;
  const double a_cp = state_value(qs, meet_commuting(a, cp, tol), tol) / pcp;
  const double b_cp = state_value(qs, meet_commuting(b, cp, tol), tol) / pcp;
  const double ab_cp = state_value(qs, meet_commuting(ab, cp, tol), tol) / pcp;

  CcVerdict v;
  if (std::abs(ab_c - a_c * b_c) > tol.eq) v.failed_conditions.push_back(Condition::ScreenOffC);
  if (std::abs(ab_cp - a_cp * b_cp) > tol.eq) {
    v.failed_conditions.push_back(Condition::ScreenOffCperp);
  }
  if (!(a_c - a_cp > tol.gt)) v.failed_conditions.push_back(Condition::RelevanceA);
  if (!(b_c - b_cp > tol.gt)) v.failed_conditions.push_back(Condition::RelevanceB);
  v.is_common_cause = v.failed_conditions.empty();
  if (!v.is_common_cause) return v;

  const double diff_a = state_value(qs, symmetric_difference(c, a, tol), tol);
  const double diff_b = state_value(qs, symmetric_difference(c, b, tol), tol);
  if (diff_a > tol.gt && diff_b > tol.gt) v.classification.push_back(CcClass::Proper);
  if (leq(c, ab, tol)) v.classification.push_back(CcClass::Strong);
  if (!leq(c, a, tol) && !leq(c, b, tol)) {
    v.classification.push_back(CcClass::GenuinelyProbabilistic);
  }
  if (std::abs(a_c - 1.0) <= tol.eq && std::abs(b_c - 1.0) <= tol.eq && std::abs(a_cp) <= tol.eq &&
      std::abs(b_cp) <= tol.eq) {
    v.classification.push_back(CcClass::Deterministic);
  }
  return v;
}

}  // namespace ccc
