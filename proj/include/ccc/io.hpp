#pragma once

// JSON documents for classical and quantum spaces and for the reports.
//
// Classical: {"atoms":[{"name":"w1","weight":"3/10"},...],
//             "events":{"A":["w1","w2"],...}}
// Quantum:   {"dim":2,"density":[[[re,im],...],...],
//             "projections":{"A":[[[re,im],...],...]}}
// Unknown top-level keys are ignored, so report documents that embed a space
// can be read back as inputs.

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ccc/bell_ccc.hpp"
#include "ccc/classical_completion.hpp"
#include "ccc/errors.hpp"
#include "ccc/event_algebra.hpp"
#include "ccc/quantum_completion.hpp"
#include "ccc/quantum_space.hpp"
#include "ccc/rational.hpp"
#include "ccc/reichenbach.hpp"

namespace ccc {

using json = nlohmann::json;

struct ClassicalDocument {
  AtomicSpace space;
  std::vector<std::pair<std::string, Event>> events;

  const Event& event(const std::string& name) const {
    for (const auto& [n, e] : events) {
      if (n == name) return e;
    }
    fail(ErrorCode::ParseError, "unknown event name '" + name + "'");
  }
};

struct QuantumDocument {
  QuantumSpace space;
  std::vector<std::pair<std::string, Projection>> projections;

  const Projection& projection(const std::string& name) const {
    for (const auto& [n, p] : projections) {
      if (n == name) return p;
    }
    fail(ErrorCode::ParseError, "unknown projection name '" + name + "'");
  }
};

enum class DocumentKind { Classical, Quantum };

inline DocumentKind detect_kind(const json& doc) {
  if (!doc.is_object()) fail(ErrorCode::ParseError, "top level must be an object");
  if (doc.contains("atoms")) return DocumentKind::Classical;
  if (doc.contains("dim")) return DocumentKind::Quantum;
  fail(ErrorCode::ParseError, "expected key 'atoms' (classical) or 'dim' (quantum)");
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::ParseError, "cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::ParseError, "invalid JSON in '" + path + "': " + e.what());
  }
}

namespace detail {
inline const json& require(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) {
    fail(ErrorCode::ParseError, "missing key '" + key + "' in " + where);
  }
  return obj.at(key);
}

inline Complex parse_complex(const json& v, const std::string& where) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
    return {v[0].get<double>(), v[1].get<double>()};
  }
  fail(ErrorCode::ParseError, "expected [re, im] in " + where);
}

inline Matrix parse_matrix(const json& v, Eigen::Index dim, const std::string& where) {
  if (!v.is_array() || static_cast<Eigen::Index>(v.size()) != dim) {
    fail(ErrorCode::ParseError, where + " must have " + std::to_string(dim) + " rows");
  }
  Matrix m(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    const json& row = v[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != dim) {
      fail(ErrorCode::ParseError, where + " row " + std::to_string(i) + " must have " +
                                      std::to_string(dim) + " entries");
    }
    for (Eigen::Index j = 0; j < dim; ++j) {
      m(i, j) = parse_complex(row[static_cast<std::size_t>(j)], where);
    }
  }
  return m;
}

// Errors raised while validating parsed values are input errors.
template <class F>
auto as_parse_error(const std::string& where, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ParseError) throw;
    fail(ErrorCode::ParseError, where + ": " + e.what());
  }
}
}  // namespace detail

inline ClassicalDocument parse_classical(const json& doc) {
  const json& atoms = detail::require(doc, "atoms", "classical space");
  if (!atoms.is_array()) fail(ErrorCode::ParseError, "'atoms' must be an array");
  std::vector<Atom> list;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const std::string where = "atoms[" + std::to_string(i) + "]";
    const json& name = detail::require(atoms[i], "name", where);
    const json& weight = detail::require(atoms[i], "weight", where);
    if (!name.is_string()) fail(ErrorCode::ParseError, where + ".name must be a string");
    if (!weight.is_string()) {
      fail(ErrorCode::ParseError, where + ".weight must be an exact rational string like \"3/10\"");
    }
    list.push_back({name.get<std::string>(), parse_rational(weight.get<std::string>())});
  }
  AtomicSpace space = detail::as_parse_error("atoms", [&] { return AtomicSpace(std::move(list)); });

  ClassicalDocument out{std::move(space), {}};
  if (doc.contains("events")) {
    const json& events = doc.at("events");
    if (!events.is_object()) fail(ErrorCode::ParseError, "'events' must be an object");
    for (const auto& [name, members] : events.items()) {
      if (!members.is_array()) {
        fail(ErrorCode::ParseError, "event '" + name + "' must be an array of atom names");
      }
      std::vector<std::size_t> idx;
      for (const auto& m : members) {
        if (!m.is_string()) fail(ErrorCode::ParseError, "event '" + name + "' lists a non-string");
        auto i = out.space.index_of(m.get<std::string>());
        if (!i) {
          fail(ErrorCode::ParseError,
               "event '" + name + "' names unknown atom '" + m.get<std::string>() + "'");
        }
        idx.push_back(*i);
      }
      out.events.emplace_back(name, out.space.event_from_indices(idx));
    }
  }
  return out;
}

inline QuantumDocument parse_quantum(const json& doc, const Tolerances& tol = {}) {
  const json& dim_v = detail::require(doc, "dim", "quantum space");
  if (!dim_v.is_number_integer() || dim_v.get<long>() <= 0) {
    fail(ErrorCode::ParseError, "'dim' must be a positive integer");
  }
  const auto dim = static_cast<Eigen::Index>(dim_v.get<long>());
  Matrix w = detail::parse_matrix(detail::require(doc, "density", "quantum space"), dim, "density");
  QuantumSpace space = detail::as_parse_error("density", [&] { return QuantumSpace(w, tol); });
  QuantumDocument out{std::move(space), {}};
  if (doc.contains("projections")) {
    const json& ps = doc.at("projections");
    if (!ps.is_object()) fail(ErrorCode::ParseError, "'projections' must be an object");
    for (const auto& [name, value] : ps.items()) {
      Matrix m = detail::parse_matrix(value, dim, "projection '" + name + "'");
      out.projections.emplace_back(
          name, detail::as_parse_error("projection '" + name + "'",
                                       [&] { return Projection(m, tol.projection); }));
    }
  }
  return out;
}

// ---- serialization ----

inline json to_json(const Rational& r) { return to_string(r); }

inline json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

inline json vector_to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back({v[i].real(), v[i].imag()});
  return out;
}

inline json event_to_json(const AtomicSpace& space, const Event& e) { return space.names_of(e); }

inline json space_to_json(const AtomicSpace& space,
                          const std::vector<std::pair<std::string, Event>>& events = {}) {
  json atoms = json::array();
  for (const auto& a : space.atoms()) atoms.push_back({{"name", a.name}, {"weight", to_string(a.weight)}});
  json ev = json::object();
  for (const auto& [name, e] : events) ev[name] = event_to_json(space, e);
  return {{"atoms", std::move(atoms)}, {"events", std::move(ev)}};
}

inline json quantum_space_to_json(const QuantumSpace& qs,
                                  const std::vector<std::pair<std::string, Projection>>& ps = {}) {
  json proj = json::object();
  for (const auto& [name, p] : ps) proj[name] = matrix_to_json(p.matrix());
  return {{"dim", qs.dim()}, {"density", matrix_to_json(qs.density())}, {"projections", std::move(proj)}};
}

inline json to_json(const CcVerdict& v) {
  json failed = json::array();
  for (auto c : v.failed_conditions) failed.push_back(condition_name(c));
  json cls = json::array();
  for (auto c : v.classification) cls.push_back(class_name(c));
  return {{"is_common_cause", v.is_common_cause}, {"failed", std::move(failed)},
          {"classification", std::move(cls)}};
}

template <class T>
json to_json(const BasicCcType<T>& ct) {
  auto conv = [](const T& x) -> json {
    if constexpr (std::is_same_v<T, Rational>) {
      return to_string(x);
    } else {
      return x;
    }
  };
  return {{"r_c", conv(ct.r_c)},
          {"r_a_given_c", conv(ct.r_a_given_c)},
          {"r_b_given_c", conv(ct.r_b_given_c)},
          {"r_a_given_cperp", conv(ct.r_a_given_cperp)},
          {"r_b_given_cperp", conv(ct.r_b_given_cperp)}};
}

template <class T>
json to_json(const ChshReport<T>& r) {
  auto conv = [](const T& x) -> json {
    if constexpr (std::is_same_v<T, Rational>) {
      return to_string(x);
    } else {
      return x;
    }
  };
  json terms = json::array();
  for (const auto& t : r.terms) terms.push_back(conv(t));
  return {{"value", conv(r.value)}, {"satisfied", r.satisfied}, {"terms", std::move(terms)}};
}

inline json to_json(const ExtensionCheck& c) {
  return {{"ok", c.ok}, {"mode", c.mode}, {"diagnostics", c.diagnostics}};
}

inline json tolerances_to_json(const Tolerances& t) {
  return {{"hermitian", t.hermitian}, {"projection", t.projection}, {"commute", t.commute},
          {"eq", t.eq},               {"gt", t.gt},                 {"trace", t.trace},
          {"psd", t.psd},             {"clamp", t.clamp}};
}

inline json embedding_to_json(const AtomicSpace& source, const AtomicSpace& target,
                              const Embedding& emb) {
  json images = json::object();
  for (std::size_t i = 0; i < source.size(); ++i) {
    images[source.atom(i).name] = event_to_json(target, emb.atom_image[i]);
  }
  return {{"atom_image", std::move(images)}};
}

inline json qembedding_to_json(const QEmbedding& emb) {
  json vectors = json::array();
  for (const auto& v : emb.block_vectors) vectors.push_back(vector_to_json(v));
  return {{"source_dim", emb.source_dim},
          {"target_dim", emb.target_dim},
          {"block_weights", emb.block_weights},
          {"block_vectors", std::move(vectors)}};
}

}  // namespace ccc
