#pragma once

// Finite classical probability spaces: a list of weighted atoms, events as
// subsets of atoms, and the measure-level queries built on them.

#include <boost/dynamic_bitset.hpp>

#include <atomic>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "ccc/errors.hpp"
#include "ccc/rational.hpp"

namespace ccc {

using SpaceId = std::uint64_t;

/// Brute-force operations enumerate all 2^n events; spaces with more atoms
/// than this are refused unless the caller raises the limit.
inline constexpr std::size_t kDefaultEnumerationLimit = 16;

/// An event of an AtomicSpace: a set of atom indices tagged with the identity
/// of the space it belongs to.
class Event {
 public:
  using Bits = boost::dynamic_bitset<std::uint64_t>;

  Event() = default;
  Event(SpaceId space, Bits bits) : space_(space), bits_(std::move(bits)) {}

  SpaceId space_id() const noexcept { return space_; }
  const Bits& bits() const noexcept { return bits_; }
  std::size_t universe_size() const noexcept { return bits_.size(); }

  bool contains(std::size_t atom) const { return bits_.test(atom); }
  bool empty() const { return bits_.none(); }
  bool full() const { return bits_.all(); }
  std::size_t count() const { return bits_.count(); }

  Event complement() const { return Event(space_, ~bits_); }

  /// Set inclusion (not necessarily strict).
  bool subset_of(const Event& other) const { return bits_.is_subset_of(other.bits_); }
  bool proper_subset_of(const Event& other) const {
    return bits_.is_proper_subset_of(other.bits_);
  }

  std::vector<std::size_t> indices() const {
    std::vector<std::size_t> out;
    for (auto i = bits_.find_first(); i != Bits::npos; i = bits_.find_next(i)) out.push_back(i);
    return out;
  }

  /// Integer value of the membership mask, atom 0 as the least significant bit.
  std::uint64_t mask() const {
    std::uint64_t m = 0;
    if (bits_.num_blocks() == 1) {
      boost::to_block_range(bits_, &m);
      return m;
    }
    for (auto i = bits_.find_first(); i != Bits::npos && i < 64; i = bits_.find_next(i)) {
      m |= std::uint64_t{1} << i;
    }
    return m;
  }

  friend Event operator&(const Event& x, const Event& y) {
    check_same(x, y);
    return Event(x.space_, x.bits_ & y.bits_);
  }
  friend Event operator|(const Event& x, const Event& y) {
    check_same(x, y);
    return Event(x.space_, x.bits_ | y.bits_);
  }
  friend Event operator~(const Event& x) { return x.complement(); }
  friend bool operator==(const Event& x, const Event& y) {
    return x.space_ == y.space_ && x.bits_ == y.bits_;
  }

  /// Orders events by their mask read as an integer (highest atom most
  /// significant), which is the enumeration order of all brute-force searches.
  friend bool mask_less(const Event& x, const Event& y) {
    for (std::size_t i = x.bits_.size(); i-- > 0;) {
      const bool xi = x.bits_.test(i);
      const bool yi = y.bits_.test(i);
      if (xi != yi) return yi;
    }
    return false;
  }

 private:
  static void check_same(const Event& x, const Event& y) {
    if (x.space_ != y.space_ || x.bits_.size() != y.bits_.size()) {
      fail(ErrorCode::ForeignEvent, "events belong to different spaces");
    }
  }

  SpaceId space_ = 0;
  Bits bits_;
};

struct Atom {
  std::string name;
  Rational weight;
};

/// A finite classical probability space. Immutable; copies share the identity
/// tag, so events remain valid for copies of the space they were made from.
class AtomicSpace {
 public:
  explicit AtomicSpace(std::vector<Atom> atoms) : atoms_(std::move(atoms)), id_(next_id()) {
    if (atoms_.empty()) fail(ErrorCode::InvalidSpace, "a space needs at least one atom");
    std::unordered_set<std::string> seen;
    Rational total = 0;
    for (const auto& atom : atoms_) {
      if (atom.name.empty()) fail(ErrorCode::InvalidSpace, "atom names must be non-empty");
      if (!seen.insert(atom.name).second) {
        fail(ErrorCode::InvalidSpace, "duplicate atom name '" + atom.name + "'");
      }
      if (atom.weight < 0 || atom.weight > 1) {
        fail(ErrorCode::InvalidSpace, "weight of '" + atom.name + "' outside [0,1]");
      }
      total += atom.weight;
    }
    if (total != 1) {
      fail(ErrorCode::InvalidSpace, "weights sum to " + to_string(total) + ", not 1");
    }
    build_scaled();
  }

  /// Convenience: atoms named w0, w1, ... with the given weights.
  static AtomicSpace from_weights(std::span<const Rational> weights) {
    std::vector<Atom> atoms;
    atoms.reserve(weights.size());
    for (std::size_t i = 0; i < weights.size(); ++i) {
      atoms.push_back({"w" + std::to_string(i), weights[i]});
    }
    return AtomicSpace(std::move(atoms));
  }
  static AtomicSpace from_weights(std::initializer_list<Rational> weights) {
    return from_weights(std::span<const Rational>(weights.begin(), weights.size()));
  }

  SpaceId id() const noexcept { return id_; }
  std::size_t size() const noexcept { return atoms_.size(); }
  const std::vector<Atom>& atoms() const noexcept { return atoms_; }
  const Atom& atom(std::size_t i) const { return atoms_.at(i); }
  const Rational& weight(std::size_t i) const { return atoms_.at(i).weight; }

  std::optional<std::size_t> index_of(std::string_view name) const {
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
      if (atoms_[i].name == name) return i;
    }
    return std::nullopt;
  }

  Event empty_event() const { return Event(id_, Event::Bits(size())); }
  Event full_event() const { return ~empty_event(); }
  Event atom_event(std::size_t i) const {
    Event::Bits bits(size());
    bits.set(i);
    return Event(id_, std::move(bits));
  }
  Event event_from_mask(std::uint64_t mask) const {
    Event::Bits bits(size());
    for (std::size_t i = 0; i < size() && i < 64; ++i) {
      if ((mask >> i) & 1U) bits.set(i);
    }
    return Event(id_, std::move(bits));
  }
  Event event_from_indices(std::span<const std::size_t> indices) const {
    Event::Bits bits(size());
    for (auto i : indices) {
      if (i >= size()) fail(ErrorCode::InvalidSpace, "atom index out of range");
      bits.set(i);
    }
    return Event(id_, std::move(bits));
  }
  Event event_from_indices(std::initializer_list<std::size_t> indices) const {
    return event_from_indices(std::span<const std::size_t>(indices.begin(), indices.size()));
  }

  std::vector<std::string> names_of(const Event& e) const {
    check_owns(e);
    std::vector<std::string> out;
    for (auto i : e.indices()) out.push_back(atoms_[i].name);
    return out;
  }

  void check_owns(const Event& e) const {
    if (e.space_id() != id_ || e.universe_size() != size()) {
      fail(ErrorCode::ForeignEvent, "event does not belong to this space");
    }
  }

  /// Weights as integers over a common denominator, when that denominator
  /// fits in 63 bits. Searches use these for exact comparisons without
  /// allocating rationals.
  bool integer_scaled() const noexcept { return scale_ > 0; }
  std::int64_t scale() const noexcept { return scale_; }
  std::int64_t scaled_weight(std::size_t i) const { return scaled_.at(i); }
  /// Σ of scaled weights over the atoms in `mask`; requires integer_scaled()
  /// and size() < 64.
  std::int64_t scaled_mask_measure(std::uint64_t mask) const {
    if (table_) return (*table_)[mask];
    std::int64_t sum = 0;
    while (mask != 0) {
      sum += scaled_[static_cast<std::size_t>(std::countr_zero(mask))];
      mask &= mask - 1;
    }
    return sum;
  }

  void check_enumerable(std::size_t limit) const {
    if (size() > limit || size() >= 64) {
      fail(ErrorCode::AtomCountTooLarge, std::to_string(size()) +
                                             " atoms exceed the enumeration limit of " +
                                             std::to_string(limit));
    }
  }

 private:
  friend Rational measure(const AtomicSpace& space, const Event& e);

  // Spaces up to this size with an integer scale keep μ of every event,
  // indexed by mask.
  static constexpr std::size_t kTabulatedAtoms = 16;

  void build_scaled() {
    using Int = boost::multiprecision::number<boost::multiprecision::gmp_int,
                                              boost::multiprecision::et_off>;
    Int lcm = 1;
    for (const auto& atom : atoms_) {
      lcm = boost::multiprecision::lcm(lcm, Int(boost::multiprecision::denominator(atom.weight)));
      if (lcm > Int(std::numeric_limits<std::int64_t>::max())) return;
    }
    std::vector<std::int64_t> scaled;
    scaled.reserve(atoms_.size());
    for (const auto& atom : atoms_) {
      const Int n = boost::multiprecision::numerator(atom.weight) * lcm /
                    Int(boost::multiprecision::denominator(atom.weight));
      scaled.push_back(n.convert_to<std::int64_t>());
    }
    scale_ = lcm.convert_to<std::int64_t>();
    scale_rational_ = Rational(scale_);
    scaled_ = std::move(scaled);
    if (atoms_.size() <= kTabulatedAtoms) {
      auto table = std::make_shared<std::vector<std::int64_t>>(std::size_t{1} << atoms_.size());
      for (std::size_t m = 1; m < table->size(); ++m) {
        const auto low = static_cast<std::size_t>(std::countr_zero(m));
        (*table)[m] = (*table)[m & (m - 1)] + scaled_[low];
      }
      table_ = std::move(table);
    }
  }

  static SpaceId next_id() {
    static std::atomic<SpaceId> counter{1};
    return counter.fetch_add(1, std::memory_order_relaxed);
  }

  std::vector<Atom> atoms_;
  SpaceId id_;
  std::int64_t scale_ = 0;
  Rational scale_rational_;
  std::vector<std::int64_t> scaled_;
  std::shared_ptr<const std::vector<std::int64_t>> table_;
};

inline Rational measure(const AtomicSpace& space, const Event& e) {
  space.check_owns(e);
  if (space.integer_scaled() && space.size() < 64) {
    return Rational(space.scaled_mask_measure(e.mask())) / space.scale_rational_;
  }
  Rational sum = 0;
  const auto& bits = e.bits();
  for (auto i = bits.find_first(); i != Event::Bits::npos; i = bits.find_next(i)) {
    sum += space.weight(i);
  }
  return sum;
}

/// μ(x | y) = μ(x ∧ y) / μ(y).
inline Rational conditional(const AtomicSpace& space, const Event& x, const Event& y) {
  const Rational my = measure(space, y);
  if (my == 0) fail(ErrorCode::ConditionOnNull, "conditioning event has probability 0");
  return measure(space, x & y) / my;
}

/// μ(a ∧ b) − μ(a)μ(b); positive iff the pair is (positively) correlated.
inline Rational correlation(const AtomicSpace& space, const Event& a, const Event& b) {
  return measure(space, a & b) - measure(space, a) * measure(space, b);
}

/// All 2^n events in mask order.
inline std::vector<Event> all_events(const AtomicSpace& space,
                                     std::size_t limit = kDefaultEnumerationLimit) {
  space.check_enumerable(limit);
  const std::uint64_t count = std::uint64_t{1} << space.size();
  std::vector<Event> out;
  out.reserve(count);
  for (std::uint64_t m = 0; m < count; ++m) out.push_back(space.event_from_mask(m));
  return out;
}

/// Unordered correlated pairs (a, b), a < b in mask order, neither trivial.
inline std::vector<std::pair<Event, Event>> list_correlated_pairs(
    const AtomicSpace& space, std::size_t limit = kDefaultEnumerationLimit) {
  const auto events = all_events(space, limit);
  std::vector<Rational> mu;
  mu.reserve(events.size());
  for (const auto& e : events) mu.push_back(measure(space, e));

  std::vector<std::pair<Event, Event>> out;
  const std::uint64_t full = events.size() - 1;
  for (std::uint64_t i = 1; i < full; ++i) {
    for (std::uint64_t j = i + 1; j < full; ++j) {
      if (mu[i & j] > mu[i] * mu[j]) out.emplace_back(events[i], events[j]);
    }
  }
  return out;
}

/// Two complement-closed families are logically independent when every pair
/// of non-empty members has a non-empty meet.
inline bool logically_independent(const AtomicSpace& space, std::span<const Event> l1,
                                   std::span<const Event> l2) {
  auto check_closed = [&](std::span<const Event> family, const char* which) {
    for (const auto& e : family) {
      space.check_owns(e);
      const Event c = e.complement();
      bool found = false;
      for (const auto& f : family) {
        if (f == c) {
          found = true;
          break;
        }
      }
      if (!found) {
        fail(ErrorCode::NotComplementClosed,
             std::string(which) + " is not closed under complement");
      }
    }
  };
  check_closed(l1, "first family");
  check_closed(l2, "second family");
  for (const auto& a : l1) {
    if (a.empty()) continue;
    for (const auto& b : l2) {
      if (b.empty()) continue;
      if ((a & b).empty()) return false;
    }
  }
  return true;
}

}  // namespace ccc
