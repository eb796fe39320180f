#pragma once

// Common common causes and the probability-form CHSH combination
//   φ(A1∧B1) + φ(A1∧B2) + φ(A2∧B1) − φ(A2∧B2),
// which a single common cause of all four pairs bounds by 2 in absolute value.

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "ccc/errors.hpp"
#include "ccc/event_algebra.hpp"
#include "ccc/quantum_space.hpp"
#include "ccc/rational.hpp"
#include "ccc/reichenbach.hpp"

namespace ccc {

template <class T>
struct ChshReport {
  T value{};
  bool satisfied = true;
  std::array<T, 4> terms{};  ///< φ(A1B1), φ(A1B2), φ(A2B1), φ(A2B2)
};

namespace detail {
template <class T>
ChshReport<T> chsh_from_terms(const std::array<T, 4>& terms, const T& slack) {
  ChshReport<T> r;
  r.terms = terms;
  r.value = terms[0] + terms[1] + terms[2] - terms[3];
  r.satisfied = abs_value(r.value) <= T(2) + slack;
  return r;
}
}  // namespace detail

inline ChshReport<Rational> chsh_classical(const AtomicSpace& space, const Event& a1,
                                           const Event& a2, const Event& b1, const Event& b2) {
  return detail::chsh_from_terms<Rational>({measure(space, a1 & b1), measure(space, a1 & b2),
                                            measure(space, a2 & b1), measure(space, a2 & b2)},
                                           Rational(0));
}

/// Each a_i must commute with each b_j; a1 and a2 need not commute.
inline ChshReport<double> chsh_quantum(const QuantumSpace& qs, const Projection& a1,
                                       const Projection& a2, const Projection& b1,
                                       const Projection& b2, const Tolerances& tol = {}) {
  auto joint = [&](const Projection& x, const Projection& y) {
    return state_value(qs, meet_commuting(x, y, tol), tol);
  };
  return detail::chsh_from_terms<double>(
      {joint(a1, b1), joint(a1, b2), joint(a2, b1), joint(a2, b2)}, tol.eq);
}

struct CommonCommonCause {
  Event cause;
  std::vector<CcVerdict> verdicts;  ///< one per input pair
};

/// First event in mask order that is a common cause (not necessarily proper)
/// of every listed pair.
inline std::optional<CommonCommonCause> find_common_common_cause(
    const AtomicSpace& space, const std::vector<std::pair<Event, Event>>& pairs,
    std::size_t limit = kDefaultEnumerationLimit) {
  space.check_enumerable(limit);
  for (const auto& [a, b] : pairs) {
    if (!(correlation(space, a, b) > 0)) fail(ErrorCode::NotCorrelated, "pair is not correlated");
  }
  const std::uint64_t count = std::uint64_t{1} << space.size();
  for (std::uint64_t m = 1; m + 1 < count; ++m) {
    Event c = space.event_from_mask(m);
    const Rational mc = measure(space, c);
    if (mc == 0 || mc == 1) continue;
    std::vector<CcVerdict> verdicts;
    verdicts.reserve(pairs.size());
    bool all = true;
    for (const auto& [a, b] : pairs) {
      CcVerdict v = check_common_cause(space, a, b, c);
      if (!v.is_common_cause) {
        all = false;
        break;
      }
      verdicts.push_back(std::move(v));
    }
    if (all) return CommonCommonCause{std::move(c), std::move(verdicts)};
  }
  return std::nullopt;
}

/// Joint probabilities φ(A_i∧B_j) rebuilt from the conditionals on c and c⊥,
/// in the order of ChshReport::terms. Equal to the measured joints whenever c
/// screens off all four pairs.
inline std::array<Rational, 4> joints_from_common_cause(const AtomicSpace& space,
                                                        const Event& a1, const Event& a2,
                                                        const Event& b1, const Event& b2,
                                                        const Event& c) {
  const Event cp = c.complement();
  const Rational mc = measure(space, c);
  const Rational mcp = measure(space, cp);
  auto joint = [&](const Event& a, const Event& b) {
    return conditional(space, a, c) * conditional(space, b, c) * mc +
           conditional(space, a, cp) * conditional(space, b, cp) * mcp;
  };
  return {joint(a1, b1), joint(a1, b2), joint(a2, b1), joint(a2, b2)};
}

/// If the four pairs (a_i, b_j) share a common cause, the CHSH combination is
/// within [-2, 2]. Returns whether that implication holds here; vacuously
/// true when some pair is uncorrelated or no common common cause exists.
inline bool ccc_implies_chsh_check(const AtomicSpace& space, const Event& a1, const Event& a2,
                                   const Event& b1, const Event& b2,
                                   std::size_t limit = kDefaultEnumerationLimit) {
  const std::vector<std::pair<Event, Event>> pairs = {{a1, b1}, {a1, b2}, {a2, b1}, {a2, b2}};
  for (const auto& [a, b] : pairs) {
    if (!(correlation(space, a, b) > 0)) return true;
  }
  if (!find_common_common_cause(space, pairs, limit)) return true;
  return chsh_classical(space, a1, a2, b1, b2).satisfied;
}

}  // namespace ccc
