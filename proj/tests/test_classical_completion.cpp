#include <gtest/gtest.h>

#include <vector>

#include "ccc/classical_completion.hpp"

namespace {

using namespace ccc;

Rational q(long n, long d) { return make_rational(n, d); }

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

struct Demo {
  AtomicSpace space{{{"ab", q(3, 10)}, {"ab'", q(1, 5)}, {"a'b", q(1, 5)}, {"a'b'", q(3, 10)}}};
  Event a = space.event_from_indices({0, 1});
  Event b = space.event_from_indices({0, 2});
  CcType type(const Rational& t, const Rational& s) const {
    return type_from_params(measure(space, a), measure(space, b), measure(space, a & b), t, s);
  }
};

TEST(CellCoefficients, DemoTopCorner) {
  const Demo d;
  const auto r = cell_coefficients(d.space, d.a, d.b, d.type(1, 1));
  // r2 = r_C·t·s / μ(A∧B) = (1/6) / (3/10).
  EXPECT_EQ(r.r2, q(5, 9));
  EXPECT_EQ(r.r1, Rational(0));
  EXPECT_EQ(r.r3, Rational(0));
  EXPECT_EQ(r.r4, Rational(0));
}

TEST(CellCoefficients, NullCellGivesZero) {
  const AtomicSpace s({{"ab", q(1, 2)}, {"ab'", Rational(0)}, {"a'b", Rational(0)}, {"a'b'", q(1, 2)}});
  const Event a = s.event_from_indices({0, 1});
  const Event b = s.event_from_indices({0, 2});
  const CcType ct = type_from_params(q(1, 2), q(1, 2), q(1, 2), Rational(1), Rational(1));
  const auto r = cell_coefficients(s, a, b, ct);
  EXPECT_EQ(r.r1, Rational(0));
  EXPECT_EQ(r.r3, Rational(0));
}

TEST(ExtendOnce, DemoTopCorner) {
  const Demo d;
  const CcType ct = d.type(1, 1);
  const CompletionReport rep = extend_once(d.space, d.a, d.b, ct);
  const AtomicSpace& t = rep.extended_space;
  ASSERT_EQ(t.size(), 8U);
  EXPECT_EQ(t.atom(0).name, "(ab,1)");
  EXPECT_EQ(t.atom(4).name, "(ab,2)");
  EXPECT_EQ(t.weight(0), q(1, 6));
  EXPECT_EQ(t.weight(4), q(2, 15));
  EXPECT_EQ(t.weight(5), q(1, 5));
  ASSERT_EQ(rep.common_causes.size(), 1U);
  const auto& c = rep.common_causes.front();
  EXPECT_TRUE(c.type_matches);
  EXPECT_TRUE(c.verdict.is_common_cause);
  EXPECT_TRUE(c.verdict.has(CcClass::Proper));
  EXPECT_TRUE(c.verdict.has(CcClass::GenuinelyProbabilistic));
  EXPECT_FALSE(c.verdict.has(CcClass::Deterministic));
  EXPECT_EQ(measure(t, c.cause), q(1, 6));
  EXPECT_TRUE(rep.extension_check.ok);
  EXPECT_EQ(rep.verification_mode, "exhaustive");
}

TEST(ExtendOnce, DemoLowCorner) {
  const Demo d;
  const CompletionReport rep = extend_once(d.space, d.a, d.b, d.type(q(3, 5), q(3, 5)));
  const auto& c = rep.common_causes.front();
  EXPECT_TRUE(c.type_matches);
  EXPECT_TRUE(c.verdict.has(CcClass::Proper));
  EXPECT_EQ(measure(rep.extended_space, c.cause), q(5, 6));
}

TEST(ExtendOnce, Errors) {
  const Demo d;
  EXPECT_EQ(code_of([&] { extend_once(d.space, d.a, ~d.b, d.type(1, 1)); }), ErrorCode::NotCorrelated);
  CcType bad = d.type(1, 1);
  bad.r_c = q(1, 2);
  EXPECT_EQ(code_of([&] { extend_once(d.space, d.a, d.b, bad); }), ErrorCode::NotAdmissible);
  const AtomicSpace foreign({{"x", q(1, 2)}, {"y", q(1, 2)}});
  EXPECT_EQ(code_of([&] { extend_once(d.space, foreign.atom_event(0), d.b, d.type(1, 1)); }),
            ErrorCode::ForeignEvent);
}

TEST(VerifyExtension, DetectsBrokenEmbeddings) {
  const Demo d;
  const CompletionReport rep = extend_once(d.space, d.a, d.b, d.type(1, 1));
  Embedding broken = rep.embedding;
  std::swap(broken.atom_image[0], broken.atom_image[3]);  // 3/10 ↔ 3/10: still measure-preserving
  EXPECT_TRUE(verify_extension(d.space, rep.extended_space, broken).ok);
  std::swap(broken.atom_image[0], broken.atom_image[1]);  // 3/10 ↔ 1/5
  const ExtensionCheck c = verify_extension(d.space, rep.extended_space, broken);
  EXPECT_FALSE(c.ok);
  EXPECT_FALSE(c.diagnostics.empty());

  Embedding overlap = rep.embedding;
  overlap.atom_image[1] = overlap.atom_image[0];
  EXPECT_FALSE(verify_extension(d.space, rep.extended_space, overlap).ok);
}

TEST(VerifyExtension, IdentityAndComposition) {
  const Demo d;
  const Embedding id = identity_embedding(d.space);
  EXPECT_TRUE(verify_extension(d.space, d.space, id).ok);
  const CompletionReport rep = extend_once(d.space, d.a, d.b, d.type(1, 1));
  const Embedding e = compose(id, rep.embedding);
  EXPECT_EQ(e.map(d.a), rep.embedding.map(d.a));
}

TEST(Complete, ThreeRequestsArePushedForward) {
  const Demo d;
  const std::vector<CompletionRequest> reqs = {
      {d.a, d.b, d.type(1, 1)},
      {d.a, d.b, d.type(q(3, 5), q(3, 5))},
      {d.a, d.b, d.type(q(4, 5), q(7, 10))},
  };
  const CompletionReport rep = complete(d.space, reqs);
  EXPECT_EQ(rep.extended_space.size(), 32U);
  ASSERT_EQ(rep.common_causes.size(), 3U);
  for (const auto& c : rep.common_causes) {
    EXPECT_TRUE(c.verdict.is_common_cause) << c.request_index;
    EXPECT_TRUE(c.verdict.has(CcClass::Proper)) << c.request_index;
    EXPECT_TRUE(c.type_matches) << c.request_index;
  }
  EXPECT_TRUE(rep.extension_check.ok);
}

TEST(Complete, RequestLimit) {
  const Demo d;
  std::vector<CompletionRequest> reqs(3, {d.a, d.b, d.type(1, 1)});
  CompletionOptions opts;
  opts.max_atoms = 16;
  EXPECT_EQ(code_of([&] { complete(d.space, reqs, opts); }), ErrorCode::RequestLimit);
}

TEST(Complete, SpotCheckBeyondLimit) {
  const Demo d;
  const std::vector<CompletionRequest> reqs = {{d.a, d.b, d.type(1, 1)}};
  CompletionOptions opts;
  opts.verify.limit = 3;
  const CompletionReport rep = complete(d.space, reqs, opts);
  EXPECT_EQ(rep.verification_mode, "spot-check");
  EXPECT_TRUE(rep.extension_check.ok);
}

}  // namespace
