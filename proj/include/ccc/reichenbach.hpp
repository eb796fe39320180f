#pragma once

// Reichenbach's common-cause conditions on classical spaces, the admissible
// common-cause types of a correlation, and brute-force common-cause search.

#include <algorithm>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "ccc/errors.hpp"
#include "ccc/event_algebra.hpp"
#include "ccc/rational.hpp"

namespace ccc {

/// The five probabilities characterizing a common cause C of (A, B):
/// (μ(C), μ(A|C), μ(B|C), μ(A|C⊥), μ(B|C⊥)).
template <class T>
struct BasicCcType {
  T r_c{};
  T r_a_given_c{};
  T r_b_given_c{};
  T r_a_given_cperp{};
  T r_b_given_cperp{};

  friend bool operator==(const BasicCcType&, const BasicCcType&) = default;
};

using CcType = BasicCcType<Rational>;

enum class Condition { ScreenOffC, ScreenOffCperp, RelevanceA, RelevanceB };
enum class CcClass { Proper, Strong, GenuinelyProbabilistic, Deterministic };

constexpr const char* condition_name(Condition c) noexcept {
  switch (c) {
    case Condition::ScreenOffC: return "ScreenOffC";
    case Condition::ScreenOffCperp: return "ScreenOffCperp";
    case Condition::RelevanceA: return "RelevanceA";
    case Condition::RelevanceB: return "RelevanceB";
  }
  return "?";
}

constexpr const char* class_name(CcClass c) noexcept {
  switch (c) {
    case CcClass::Proper: return "Proper";
    case CcClass::Strong: return "Strong";
    case CcClass::GenuinelyProbabilistic: return "GenuinelyProbabilistic";
    case CcClass::Deterministic: return "Deterministic";
  }
  return "?";
}

struct CcVerdict {
  bool is_common_cause = false;
  std::vector<Condition> failed_conditions;
  std::vector<CcClass> classification;

  bool failed(Condition c) const {
    return std::find(failed_conditions.begin(), failed_conditions.end(), c) !=
           failed_conditions.end();
  }
  bool has(CcClass c) const {
    return std::find(classification.begin(), classification.end(), c) != classification.end();
  }
};

/// Tolerances for the generic (rational or floating) formulas. Zero means
/// exact comparison, which is what the rational instantiations use.
template <class T>
struct Slack {
  T eq{};  ///< |x - y| <= eq counts as equal
  T gt{};  ///< x > y requires x - y > gt
};

namespace detail {
template <class T>
T abs_value(const T& x) {
  return x < T(0) ? T(-x) : x;
}
template <class T>
bool near(const T& x, const T& y, const T& tol) {
  return abs_value(T(x - y)) <= tol;
}
template <class T>
bool greater(const T& x, const T& y, const T& tol) {
  return x - y > tol;
}
}  // namespace detail

template <class T>
struct ParamBounds {
  T t_min{};
  T s_min{};
};

/// Lower ends of the two-parameter family: t = r_{A|C} ∈ [μ(AB)/μ(B), 1],
/// s = r_{B|C} ∈ [μ(AB)/μ(A), 1].
template <class T>
ParamBounds<T> parameter_bounds(const T& mu_a, const T& mu_b, const T& mu_ab) {
  if (!(mu_a > T(0) && mu_a < T(1) && mu_b > T(0) && mu_b < T(1))) {
    fail(ErrorCode::OutOfBounds, "marginals must lie strictly between 0 and 1");
  }
  if (!(mu_ab > mu_a * mu_b)) fail(ErrorCode::NotCorrelated, "mu_ab <= mu_a * mu_b");
  if (mu_ab > std::min(mu_a, mu_b)) {
    fail(ErrorCode::InconsistentJoint, "joint probability exceeds a marginal");
  }
  return {mu_ab / mu_b, mu_ab / mu_a};
}

/// Solves the total-probability system for (r_C, r_{A|C⊥}, r_{B|C⊥}) with
/// r_{A|C} = t and r_{B|C} = s.
template <class T>
BasicCcType<T> type_from_params(const T& mu_a, const T& mu_b, const T& mu_ab, const T& t,
                                const T& s) {
  const auto bounds = parameter_bounds(mu_a, mu_b, mu_ab);
  if (t < bounds.t_min || t > T(1) || s < bounds.s_min || s > T(1)) {
    fail(ErrorCode::OutOfBounds, "(t, s) outside [t_min, 1] x [s_min, 1]");
  }
  if (s == mu_b || t == mu_a) {
    fail(ErrorCode::DegenerateParams, "t = mu_a or s = mu_b makes the system singular");
  }
  const T corr = mu_ab - mu_a * mu_b;
  BasicCcType<T> ct;
  ct.r_c = corr / ((mu_a - t) * (mu_b - s) + corr);
  ct.r_a_given_c = t;
  ct.r_b_given_c = s;
  ct.r_a_given_cperp = (mu_ab - mu_a * s) / (mu_b - s);
  ct.r_b_given_cperp = (mu_ab - mu_b * t) / (mu_a - t);
  return ct;
}

/// Range constraints, the three total-probability identities, 0 < r_C < 1 and
/// the two relevance inequalities.
template <class T>
bool is_admissible(const BasicCcType<T>& ct, const T& mu_a, const T& mu_b, const T& mu_ab,
                   const Slack<T>& slack = {}) {
  using detail::greater;
  using detail::near;
  const T zero(0);
  const T one(1);
  for (const T* r : {&ct.r_a_given_c, &ct.r_b_given_c, &ct.r_a_given_cperp, &ct.r_b_given_cperp}) {
    if (*r < zero - slack.eq || *r > one + slack.eq) return false;
  }
  if (!greater(ct.r_c, zero, slack.gt) || !greater(one, ct.r_c, slack.gt)) return false;
  const T rcp = one - ct.r_c;
  if (!near(T(ct.r_a_given_c * ct.r_c + ct.r_a_given_cperp * rcp), mu_a, slack.eq)) return false;
  if (!near(T(ct.r_b_given_c * ct.r_c + ct.r_b_given_cperp * rcp), mu_b, slack.eq)) return false;
  if (!near(T(ct.r_a_given_c * ct.r_b_given_c * ct.r_c +
              ct.r_a_given_cperp * ct.r_b_given_cperp * rcp),
            mu_ab, slack.eq)) {
    return false;
  }
  return greater(ct.r_a_given_c, ct.r_a_given_cperp, slack.gt) &&
         greater(ct.r_b_given_c, ct.r_b_given_cperp, slack.gt);
}


/// The measured type of c for the pair (a, b). Requires μ(c), μ(c⊥) > 0.
inline CcType measured_type(const AtomicSpace& space, const Event& a, const Event& b,
                            const Event& c) {
  const Event cp = c.complement();
  return {measure(space, c), conditional(space, a, c), conditional(space, b, c),
          conditional(space, a, cp), conditional(space, b, cp)};
}

namespace detail {
// Measures of the events entering the four conditions, in any common unit,
// plus the set relations the classification needs.
template <class T>
struct CauseMeasures {
  T a, b, c, cp, ac, bc, acp, bcp, abc, abcp;
  bool c_is_a, c_is_b;          // c == a, c == b as sets
  bool c_comparable_a, c_comparable_b;  // strict inclusion either way
  bool c_in_ab, c_in_a, c_in_b;
};

template <class T>
CcVerdict verdict_from(const CauseMeasures<T>& m) {
  const std::pair<const char*, const T*> items[] = {
      {"mu(a)", &m.a}, {"mu(b)", &m.b}, {"mu(c)", &m.c}, {"mu(c_perp)", &m.cp}};
  for (const auto& [label, v] : items) {
    if (*v == 0) fail(ErrorCode::ZeroProbabilityCondition, std::string(label) + " is zero");
  }
  // Screening off, cross-multiplied: μ(ABC)μ(C) = μ(AC)μ(BC).
  CcVerdict v;
  if (m.abc * m.c != m.ac * m.bc) v.failed_conditions.push_back(Condition::ScreenOffC);
  if (m.abcp * m.cp != m.acp * m.bcp) v.failed_conditions.push_back(Condition::ScreenOffCperp);
  if (!(m.ac * m.cp > m.acp * m.c)) v.failed_conditions.push_back(Condition::RelevanceA);
  if (!(m.bc * m.cp > m.bcp * m.c)) v.failed_conditions.push_back(Condition::RelevanceB);
  v.is_common_cause = v.failed_conditions.empty();
  if (!v.is_common_cause) return v;

  // Improper: c coincides with x, or is strictly comparable to x with equal measure.
  const bool improper_a = m.c_is_a || (m.c_comparable_a && m.c == m.a);
  const bool improper_b = m.c_is_b || (m.c_comparable_b && m.c == m.b);
  if (!improper_a && !improper_b) v.classification.push_back(CcClass::Proper);
  if (m.c_in_ab) v.classification.push_back(CcClass::Strong);
  if (!m.c_in_a && !m.c_in_b) v.classification.push_back(CcClass::GenuinelyProbabilistic);
  if (m.ac == m.c && m.bc == m.c && m.acp == 0 && m.bcp == 0) {
    v.classification.push_back(CcClass::Deterministic);
  }
  return v;
}
}  // namespace detail

inline CcVerdict check_common_cause(const AtomicSpace& space, const Event& a, const Event& b,
                                    const Event& c) {
  space.check_owns(a);
  space.check_owns(b);
  space.check_owns(c);
  if (space.integer_scaled() && space.size() < 64) {
    const std::uint64_t full =
        space.size() == 0 ? 0 : (~std::uint64_t{0} >> (64 - space.size()));
    const std::uint64_t ma = a.mask();
    const std::uint64_t mb = b.mask();
    const std::uint64_t mc = c.mask();
    const std::uint64_t mcp = ~mc & full;
    auto mu = [&](std::uint64_t m) -> __int128 { return space.scaled_mask_measure(m); };
    auto sub = [](std::uint64_t x, std::uint64_t y) { return (x & ~y) == 0; };
    return detail::verdict_from(detail::CauseMeasures<__int128>{
        mu(ma), mu(mb), mu(mc), mu(mcp), mu(ma & mc), mu(mb & mc), mu(ma & mcp), mu(mb & mcp),
        mu(ma & mb & mc), mu(ma & mb & mcp), mc == ma, mc == mb,
        mc != ma && (sub(mc, ma) || sub(ma, mc)), mc != mb && (sub(mc, mb) || sub(mb, mc)),
        sub(mc, ma & mb), sub(mc, ma), sub(mc, mb)});
  }
  const Event cp = c.complement();
  const Event ab = a & b;
  auto comparable = [](const Event& x, const Event& y) {
    return x.proper_subset_of(y) || y.proper_subset_of(x);
  };
  return detail::verdict_from(detail::CauseMeasures<Rational>{
      measure(space, a), measure(space, b), measure(space, c), measure(space, cp),
      measure(space, a & c), measure(space, b & c), measure(space, a & cp), measure(space, b & cp),
      measure(space, ab & c), measure(space, ab & cp), c == a, c == b, comparable(c, a),
      comparable(c, b), c.subset_of(ab), c.subset_of(a), c.subset_of(b)});
}

struct FoundCause {
  Event cause;
  CcVerdict verdict;
};

struct SearchOptions {
  bool proper_only = false;
  std::size_t limit = kDefaultEnumerationLimit;
};

/// Every event c with μ(c), μ(c⊥) > 0 that is a common cause of (a, b), in
/// mask order.
inline std::vector<FoundCause> find_common_causes(const AtomicSpace& space, const Event& a,
                                                  const Event& b, SearchOptions opts = {}) {
  space.check_enumerable(opts.limit);
  if (!(correlation(space, a, b) > 0)) fail(ErrorCode::NotCorrelated, "pair is not correlated");
  std::vector<FoundCause> out;
  const std::uint64_t count = std::uint64_t{1} << space.size();
  for (std::uint64_t m = 1; m + 1 < count; ++m) {
    Event c = space.event_from_mask(m);
    const Rational mc = measure(space, c);
    if (mc == 0 || mc == 1) continue;
    CcVerdict v = check_common_cause(space, a, b, c);
    if (!v.is_common_cause) continue;
    if (opts.proper_only && !v.has(CcClass::Proper)) continue;
    out.push_back({std::move(c), std::move(v)});
  }
  return out;
}

struct Closedness {
  bool closed = true;
  std::vector<std::pair<Event, Event>> incomplete_pairs;
};

/// Closed iff every correlated pair has a proper common cause inside the space.
inline Closedness common_cause_closed(const AtomicSpace& space,
                                      std::size_t limit = kDefaultEnumerationLimit) {
  Closedness result;
  for (auto& [a, b] : list_correlated_pairs(space, limit)) {
    if (find_common_causes(space, a, b, {.proper_only = true, .limit = limit}).empty()) {
      result.closed = false;
      result.incomplete_pairs.emplace_back(a, b);
    }
  }
  return result;
}

}  // namespace ccc
