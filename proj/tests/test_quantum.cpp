#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "ccc/quantum_completion.hpp"
#include "ccc/random.hpp"

namespace {

using namespace ccc;

template <class F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::ParseError;
}

Matrix diag(std::initializer_list<double> v) {
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(v.size()), static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) m(i, i) = x, ++i;
  return m;
}

struct Demo {
  QuantumSpace space{diag({0.3, 0.2, 0.2, 0.3})};
  Projection a{diag({1, 1, 0, 0})};
  Projection b{diag({1, 0, 1, 0})};
};

TEST(Projection, Validation) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 1) = 1.0;
  EXPECT_EQ(code_of([&] { Projection p(m); }), ErrorCode::InvalidSpace);
  EXPECT_EQ(code_of([] { Projection p(Matrix(diag({0.5, 0}))); }), ErrorCode::InvalidSpace);
  EXPECT_EQ(code_of([] { Projection p(Matrix::Zero(2, 3)); }), ErrorCode::DimensionMismatch);
  const Projection p(diag({1, 0}));
  EXPECT_NEAR(max_abs(p.complement().matrix() - diag({0, 1})), 0.0, 1e-15);
}

TEST(QuantumSpace, Validation) {
  EXPECT_EQ(code_of([] { QuantumSpace s(diag({0.5, 0.4})); }), ErrorCode::InvalidSpace);
  EXPECT_EQ(code_of([] { QuantumSpace s(diag({1.2, -0.2})); }), ErrorCode::NotPositive);
  Matrix h = diag({0.5, 0.5});
  h(0, 1) = 0.1;
  EXPECT_EQ(code_of([&] { QuantumSpace s(h); }), ErrorCode::InvalidSpace);
}

TEST(StateValue, DemoAndCorrelation) {
  const Demo d;
  EXPECT_NEAR(state_value(d.space, d.a), 0.5, 1e-15);
  EXPECT_NEAR(state_value(d.space, meet_commuting(d.a, d.b)), 0.3, 1e-15);
  EXPECT_NEAR(correlation_q(d.space, d.a, d.b), 0.05, 1e-15);
  EXPECT_EQ(code_of([&] { state_value(d.space, Projection(diag({1, 0}))); }),
            ErrorCode::DimensionMismatch);
}

TEST(Lattice, NonCommutingMeetIsRefused) {
  Vector zero(2), plus(2);
  zero << 1, 0;
  plus << 1, 1;
  const Projection p0 = Projection::onto(zero);
  const Projection pp = Projection::onto(plus);
  EXPECT_FALSE(commutes(p0, pp));
  EXPECT_EQ(code_of([&] { meet_commuting(p0, pp); }), ErrorCode::NonCommuting);
  EXPECT_TRUE(leq(Projection::zero(2), p0));
  EXPECT_TRUE(leq(p0, Projection::identity(2)));
  EXPECT_FALSE(leq(pp, p0));
}

TEST(Spectral, MixedQubitGivesFourDoubledTerms) {
  const QuantumSpace s(diag({0.7, 0.3}));
  const auto terms = spectral_decompose(s);
  ASSERT_EQ(terms.size(), 4U);
  EXPECT_NEAR(terms[0].weight, 0.35, 1e-15);
  EXPECT_NEAR(terms[2].weight, 0.15, 1e-15);
  for (const auto& t : terms) EXPECT_EQ(t.vector.size(), 4);
  const QExtension ext = build_extension(s);
  EXPECT_EQ(ext.embedding.target_dim, 16);
  EXPECT_EQ(ext.embedding.block_dim(), 4);
}

TEST(Spectral, PureStateGivesTwoTerms) {
  Vector v(4);
  v << 0, 1, -1, 0;
  const QExtension ext = build_extension(QuantumSpace::pure(v));
  EXPECT_EQ(ext.embedding.blocks(), 2U);
  EXPECT_EQ(ext.embedding.target_dim, 16);
}

TEST(Extension, PreservesStateOnRandomProjections) {
  std::mt19937_64 rng(11);
  for (Eigen::Index dim = 2; dim <= 4; ++dim) {
    const QuantumSpace s = random_density(dim, dim, rng);
    const QExtension ext = build_extension(s);
    std::vector<Projection> tests;
    for (int i = 0; i < 50; ++i) tests.push_back(random_projection(dim, rng));
    EXPECT_LT(extension_fidelity_error(s, ext, tests), 1e-9);
    // h is a lattice embedding: h(a)h(b) = h(ab) for commuting pairs.
    const Matrix u = random_unitary(dim, rng);
    const Projection p = projection_in_basis(u, 1);
    const Projection r = projection_in_basis(u, 3);
    EXPECT_LT(max_abs(ext.embedding.map(p).matrix() * ext.embedding.map(r).matrix() -
                      ext.embedding.map(meet_commuting(p, r)).matrix()),
              1e-9);
  }
}

TEST(Construct, DemoCause) {
  const Demo d;
  const QExtension ext = build_extension(d.space);
  const QCcType ct = type_from_params(0.5, 0.5, 0.3, 0.9, 0.8);
  const QCommonCause cc = construct_common_cause(ext, d.a, d.b, ct);
  const Projection ha = ext.embedding.map(d.a);
  const Projection hb = ext.embedding.map(d.b);
  EXPECT_TRUE(commutes(cc.cause, ha));
  EXPECT_TRUE(commutes(cc.cause, hb));
  const CcVerdict v = check_quantum_common_cause(ext.space, ha, hb, cc.cause);
  EXPECT_TRUE(v.is_common_cause);
  EXPECT_TRUE(v.has(CcClass::Proper));
  EXPECT_LT(type_distance(measured_type_q(ext.space, ha, hb, cc.cause), ct), 1e-9);
  for (const auto& cell : cc.cells) {
    EXPECT_NEAR(cell.telescoped(ext.embedding.block_weights), cell.rho, 1e-9) << cell_name(cell.cell);
  }
}

TEST(Construct, Errors) {
  const Demo d;
  const QExtension ext = build_extension(d.space);
  const QCcType ct = type_from_params(0.5, 0.5, 0.3, 0.9, 0.8);
  QCcType bad = ct;
  bad.r_c += 0.01;
  EXPECT_EQ(code_of([&] { construct_common_cause(ext, d.a, d.b, bad); }), ErrorCode::NotAdmissible);
  EXPECT_EQ(code_of([&] { construct_common_cause(ext, d.a, d.b.complement(), ct); }),
            ErrorCode::NotCorrelated);
  Vector plus(4);
  plus << 1, 1, 0, 0;
  EXPECT_EQ(code_of([&] { construct_common_cause(ext, d.b, Projection::onto(plus), ct); }),
            ErrorCode::NonCommuting);
  EXPECT_EQ(code_of([&] { construct_common_cause(ext, Projection(diag({1, 0})), d.b, ct); }),
            ErrorCode::DimensionMismatch);
}

// Diagonal embedding of a classical hidden-coin space: the quantum verdict
// must agree with the exact classical one.
TEST(CheckQuantum, AgreesWithClassicalOnDiagonalStates) {
  std::vector<double> w(8);
  std::vector<double> ia(8), ib(8), ic(8);
  for (std::size_t i = 0; i < 8; ++i) {
    const bool c = i & 1U;
    const double p = c ? 0.75 : 0.25;
    w[i] = 0.5 * ((i & 2U) ? p : 1 - p) * ((i & 4U) ? p : 1 - p);
    ic[i] = c;
    ia[i] = (i & 2U) ? 1 : 0;
    ib[i] = (i & 4U) ? 1 : 0;
  }
  auto dm = [](const std::vector<double>& v) {
    Matrix m = Matrix::Zero(8, 8);
    for (int i = 0; i < 8; ++i) m(i, i) = v[static_cast<std::size_t>(i)];
    return m;
  };
  const QuantumSpace s(dm(w));
  const CcVerdict v = check_quantum_common_cause(s, Projection(dm(ia)), Projection(dm(ib)),
                                                 Projection(dm(ic)));
  EXPECT_TRUE(v.is_common_cause);
  EXPECT_TRUE(v.has(CcClass::Proper));
  EXPECT_TRUE(v.has(CcClass::GenuinelyProbabilistic));
  EXPECT_FALSE(v.has(CcClass::Strong));
}

TEST(CompleteQuantum, TwoRequests) {
  const Demo d;
  const std::vector<QRequest> reqs = {{d.a, d.b, type_from_params(0.5, 0.5, 0.3, 1.0, 1.0)},
                                      {d.a, d.b, type_from_params(0.5, 0.5, 0.3, 0.7, 0.65)}};
  const QCompletionReport rep = complete_quantum(d.space, reqs);
  ASSERT_EQ(rep.causes.size(), 2U);
  for (const auto& r : rep.causes) {
    EXPECT_TRUE(r.verdict.is_common_cause);
    EXPECT_TRUE(r.type_matches) << r.type_error;
  }
  EXPECT_EQ(rep.causes_commute.size(), 2U);
}

}  // namespace
