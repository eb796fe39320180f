#pragma once

// Common-cause completion of classical spaces by the doubling construction:
// every atom x splits into (x,1) and (x,2), the measure is redistributed cell
// by cell, and the copy-1 atoms form a proper common cause of the requested
// type.

#include <algorithm>
#include <array>
#include <iterator>
#include <cstddef>
#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ccc/errors.hpp"
#include "ccc/event_algebra.hpp"
#include "ccc/rational.hpp"
#include "ccc/reichenbach.hpp"

namespace ccc {

/// Boolean-algebra embedding of a finite space, stored as the image of every
/// source atom. The image of an event is the union of the images of its atoms.
struct Embedding {
  SpaceId source_id = 0;
  SpaceId target_id = 0;
  std::vector<Event> atom_image;

  Event map(const Event& x) const {
    if (x.space_id() != source_id || x.universe_size() != atom_image.size()) {
      fail(ErrorCode::ForeignEvent, "event is not in the embedding's source space");
    }
    if (atom_image.empty()) fail(ErrorCode::InvalidSpace, "empty embedding");
    Event::Bits bits(atom_image.front().universe_size());
    for (auto i : x.indices()) bits |= atom_image[i].bits();
    return Event(target_id, std::move(bits));
  }
};

inline Embedding identity_embedding(const AtomicSpace& space) {
  Embedding e{space.id(), space.id(), {}};
  for (std::size_t i = 0; i < space.size(); ++i) e.atom_image.push_back(space.atom_event(i));
  return e;
}

/// outer ∘ inner, flattened to a single atom-image map.
inline Embedding compose(const Embedding& inner, const Embedding& outer) {
  if (inner.target_id != outer.source_id) {
    fail(ErrorCode::ForeignEvent, "embeddings do not compose");
  }
  Embedding e{inner.source_id, outer.target_id, {}};
  e.atom_image.reserve(inner.atom_image.size());
  for (const auto& img : inner.atom_image) e.atom_image.push_back(outer.map(img));
  return e;
}

/// Coefficients r₁..r₄ of the redistributed measure: the fraction of each
/// cell's weight that goes to copy 1. Cells: A∧B⊥, A∧B, A⊥∧B, A⊥∧B⊥.
struct CellCoefficients {
  Rational r1;  ///< A∧B⊥
  Rational r2;  ///< A∧B
  Rational r3;  ///< A⊥∧B
  Rational r4;  ///< A⊥∧B⊥
};

namespace detail {
inline Rational ratio_or_zero(const Rational& num, const Rational& den) {
  return den == 0 ? Rational(0) : Rational(num / den);
}

inline std::array<Event, 4> cells(const Event& a, const Event& b) {
  return {a & ~b, a & b, ~a & b, ~a & ~b};
}
}  // namespace detail

inline CellCoefficients cell_coefficients(const AtomicSpace& space, const Event& a,
                                          const Event& b, const CcType& ct) {
  const auto cell = detail::cells(a, b);
  const Rational& rc = ct.r_c;
  const Rational& t = ct.r_a_given_c;
  const Rational& s = ct.r_b_given_c;
  return {
      detail::ratio_or_zero(rc * t * (1 - s), measure(space, cell[0])),
      detail::ratio_or_zero(rc * t * s, measure(space, cell[1])),
      detail::ratio_or_zero(rc * s * (1 - t), measure(space, cell[2])),
      detail::ratio_or_zero(rc * (1 - t - s + t * s), measure(space, cell[3])),
  };
}

struct ConstructedCause {
  std::size_t request_index = 0;
  Event cause;
  CcType type;
  CcVerdict verdict;
  bool type_matches = false;  ///< measured quintuple equals `type` exactly
};

struct ExtensionCheck {
  bool ok = true;
  std::string mode = "exhaustive";  ///< or "spot-check"
  std::vector<std::string> diagnostics;

  explicit operator bool() const noexcept { return ok; }
};

struct CompletionReport {
  AtomicSpace extended_space;
  Embedding embedding;
  std::vector<ConstructedCause> common_causes;
  ExtensionCheck extension_check;
  std::string verification_mode = "exhaustive";
};

struct VerifyOptions {
  std::size_t limit = kDefaultEnumerationLimit;
  std::size_t samples = 4096;  ///< sampled events when the source is too large
  std::uint64_t seed = 0;
};

/// Checks that `emb` is a measure-preserving Boolean-algebra embedding of
/// `source` into `target`. Exhaustive over source events when the source is
/// within the enumeration limit, otherwise over a seeded random sample.
inline ExtensionCheck verify_extension(const AtomicSpace& source, const AtomicSpace& target,
                                       const Embedding& emb, VerifyOptions opts = {}) {
  ExtensionCheck check;
  auto report = [&](std::string msg) {
    check.ok = false;
    check.diagnostics.push_back(std::move(msg));
  };
  if (emb.source_id != source.id() || emb.target_id != target.id() ||
      emb.atom_image.size() != source.size()) {
    report("embedding does not connect these spaces");
    return check;
  }
  Event::Bits seen(target.size());
  for (std::size_t i = 0; i < source.size(); ++i) {
    const Event& img = emb.atom_image[i];
    if (img.space_id() != target.id() || img.universe_size() != target.size()) {
      report("image of atom '" + source.atom(i).name + "' is not a target event");
      return check;
    }
    if (img.empty()) report("image of atom '" + source.atom(i).name + "' is empty");
    if ((seen & img.bits()).any()) {
      report("image of atom '" + source.atom(i).name + "' overlaps an earlier image");
    }
    seen |= img.bits();
  }
  if (!seen.all()) report("atom images do not cover the target space");

  auto describe = [&](const Event& x) {
    std::string s = "{";
    for (auto& n : source.names_of(x)) s += (s.size() > 1 ? "," : "") + n;
    return s + "}";
  };

  std::vector<Event> events;
  const bool exhaustive = source.size() <= opts.limit && source.size() < 64;
  if (exhaustive) {
    events = all_events(source, opts.limit);
  } else {
    check.mode = "spot-check";
    std::mt19937_64 rng(opts.seed);
    events.push_back(source.empty_event());
    events.push_back(source.full_event());
    for (std::size_t k = 0; k < opts.samples; ++k) {
      Event::Bits bits(source.size());
      for (std::size_t i = 0; i < source.size(); ++i) {
        if (rng() & 1U) bits.set(i);
      }
      events.emplace_back(source.id(), std::move(bits));
    }
  }

  std::vector<Event> images;
  images.reserve(events.size());
  std::set<std::vector<std::uint64_t>> distinct;
  std::size_t unique_sources = 0;
  std::set<std::vector<std::uint64_t>> distinct_sources;
  for (const auto& x : events) {
    Event hx = emb.map(x);
    if (measure(target, hx) != measure(source, x)) {
      report("measure not preserved on " + describe(x));
    }
    if (!(emb.map(x.complement()) == hx.complement())) {
      report("complement not preserved on " + describe(x));
    }
    std::vector<std::uint64_t> key;
    boost::to_block_range(x.bits(), std::back_inserter(key));
    if (distinct_sources.insert(key).second) {
      ++unique_sources;
      std::vector<std::uint64_t> hkey;
      boost::to_block_range(hx.bits(), std::back_inserter(hkey));
      distinct.insert(std::move(hkey));
    }
    images.push_back(std::move(hx));
  }
  if (distinct.size() != unique_sources) report("event map is not injective");

  // Meets and joins: all pairs for small sources, a seeded subset otherwise.
  constexpr std::size_t kPairEvents = 256;
  std::vector<std::size_t> pick(events.size());
  for (std::size_t i = 0; i < pick.size(); ++i) pick[i] = i;
  if (pick.size() > kPairEvents) {
    check.mode = "spot-check";
    std::mt19937_64 rng(opts.seed ^ 0x9e3779b97f4a7c15ULL);
    std::shuffle(pick.begin(), pick.end(), rng);
    pick.resize(kPairEvents);
  }
  for (std::size_t i = 0; i < pick.size() && check.diagnostics.size() < 16; ++i) {
    for (std::size_t j = i; j < pick.size(); ++j) {
      const Event& x = events[pick[i]];
      const Event& y = events[pick[j]];
      if (!(emb.map(x & y) == (images[pick[i]] & images[pick[j]]))) {
        report("meet not preserved on " + describe(x) + ", " + describe(y));
      }
      if (!(emb.map(x | y) == (images[pick[i]] | images[pick[j]]))) {
        report("join not preserved on " + describe(x) + ", " + describe(y));
      }
    }
  }
  return check;
}

/// One doubling step: a type-`ct` common cause for the correlated pair (a, b).
inline CompletionReport extend_once(const AtomicSpace& space, const Event& a, const Event& b,
                                    const CcType& ct) {
  space.check_owns(a);
  space.check_owns(b);
  const Rational mu_a = measure(space, a);
  const Rational mu_b = measure(space, b);
  const Rational mu_ab = measure(space, a & b);
  if (!(mu_ab > mu_a * mu_b)) fail(ErrorCode::NotCorrelated, "pair is not correlated");
  if (!is_admissible(ct, mu_a, mu_b, mu_ab)) {
    fail(ErrorCode::NotAdmissible, "type is not admissible for this correlation");
  }

  const auto r = cell_coefficients(space, a, b, ct);
  const std::size_t n = space.size();
  std::vector<Atom> atoms(2 * n);
  for (std::size_t x = 0; x < n; ++x) {
    const bool in_a = a.contains(x);
    const bool in_b = b.contains(x);
    const Rational& coeff = in_a ? (in_b ? r.r2 : r.r1) : (in_b ? r.r3 : r.r4);
    const Atom& src = space.atom(x);
    atoms[x] = {"(" + src.name + ",1)", coeff * src.weight};
    atoms[n + x] = {"(" + src.name + ",2)", (1 - coeff) * src.weight};
  }
  AtomicSpace target(std::move(atoms));

  Embedding emb{space.id(), target.id(), {}};
  for (std::size_t x = 0; x < n; ++x) emb.atom_image.push_back(target.event_from_indices({x, n + x}));

  Event::Bits copy1(2 * n);
  for (std::size_t x = 0; x < n; ++x) copy1.set(x);
  Event cause(target.id(), std::move(copy1));

  const Event ha = emb.map(a);
  const Event hb = emb.map(b);
  CcVerdict verdict = check_common_cause(target, ha, hb, cause);
  const bool matches = measured_type(target, ha, hb, cause) == ct;

  ExtensionCheck ext = verify_extension(space, target, emb);
  std::string mode = ext.mode;
  CompletionReport report{std::move(target), std::move(emb), {}, std::move(ext), std::move(mode)};
  report.common_causes.push_back({0, std::move(cause), ct, std::move(verdict), matches});
  return report;
}

struct CompletionRequest {
  Event a;
  Event b;
  CcType type;
};

struct CompletionOptions {
  VerifyOptions verify{};
  std::size_t max_atoms = std::size_t{1} << 20;
};

/// Folds extend_once over the requests. Causes built earlier are pushed
/// forward through each later doubling and then re-verified in the final
/// space against the embedded pairs.
inline CompletionReport complete(const AtomicSpace& space,
                                 const std::vector<CompletionRequest>& requests,
                                 CompletionOptions opts = {}) {
  const std::size_t n = space.size();
  if (requests.size() >= 63 || (n << requests.size()) > opts.max_atoms ||
      ((n << requests.size()) >> requests.size()) != n) {
    fail(ErrorCode::RequestLimit, std::to_string(requests.size()) +
                                      " requests would exceed the atom cap of " +
                                      std::to_string(opts.max_atoms));
  }
  for (const auto& req : requests) {
    space.check_owns(req.a);
    space.check_owns(req.b);
  }

  AtomicSpace current = space;
  Embedding total = identity_embedding(space);
  std::vector<ConstructedCause> causes;
  for (std::size_t k = 0; k < requests.size(); ++k) {
    const auto& req = requests[k];
    CompletionReport step = extend_once(current, total.map(req.a), total.map(req.b), req.type);
    for (auto& prev : causes) prev.cause = step.embedding.map(prev.cause);
    ConstructedCause fresh = std::move(step.common_causes.front());
    fresh.request_index = k;
    causes.push_back(std::move(fresh));
    total = compose(total, step.embedding);
    current = std::move(step.extended_space);
  }

  for (auto& c : causes) {
    const auto& req = requests[c.request_index];
    const Event ha = total.map(req.a);
    const Event hb = total.map(req.b);
    c.verdict = check_common_cause(current, ha, hb, c.cause);
    c.type_matches = measured_type(current, ha, hb, c.cause) == c.type;
  }

  ExtensionCheck ext = verify_extension(space, current, total, opts.verify);
  std::string mode = ext.mode;
  return CompletionReport{std::move(current), std::move(total), std::move(causes), std::move(ext),
                          std::move(mode)};
}

}  // namespace ccc
