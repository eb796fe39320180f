#pragma once

// Batch front end: argument parsing, subcommand dispatch and report assembly.
// Every report is a JSON document; the text written to the output is its
// two-space-indented dump, so equal inputs give byte-identical output.

#include <CLI11.hpp>

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "ccc/bell_ccc.hpp"
#include "ccc/classical_completion.hpp"
#include "ccc/errors.hpp"
#include "ccc/event_algebra.hpp"
#include "ccc/io.hpp"
#include "ccc/quantum_completion.hpp"
#include "ccc/quantum_space.hpp"
#include "ccc/random.hpp"
#include "ccc/rational.hpp"
#include "ccc/reichenbach.hpp"

namespace ccc::cli {

inline constexpr const char* kToolName = "ccc";
inline constexpr const char* kVersion = "0.1.0";
/// Random test projections used to spot-check φ′∘h = φ in `qcomplete`.
inline constexpr int kFidelitySamples = 100;

struct RunConfig {
  std::string subcommand;
  std::string input_path;
  std::string output_path;  ///< empty means stdout
  std::vector<std::string> pairs;   ///< "A,B"
  std::vector<std::string> t_values;
  std::vector<std::string> s_values;
  std::vector<std::string> types;   ///< "r_c,r_ac,r_bc,r_acp,r_bcp"
  std::vector<std::string> names;   ///< bell: A1 A2 B1 B2
  std::optional<double> tolerance;
  std::size_t limit = kDefaultEnumerationLimit;
  std::uint64_t seed = 0;
};

/// Raised for malformed command lines; carries the exit status CLI11 chose
/// (0 for --help and --version).
class UsageError : public std::runtime_error {
 public:
  UsageError(int status, std::string text)
      : std::runtime_error(text), status_(status), text_(std::move(text)) {}
  int status() const noexcept { return status_; }
  const std::string& text() const noexcept { return text_; }

 private:
  int status_;
  std::string text_;
};

inline std::uint64_t seed_from_env() {
  const char* raw = std::getenv("CCC_SEED");
  if (raw == nullptr || *raw == '\0') return 0;
  const std::string s(raw);
  if (s.find_first_not_of("0123456789") != std::string::npos || s.size() > 20) {
    throw UsageError(2, "CCC_SEED must be a non-negative integer, got '" + s + "'");
  }
  try {
    return std::stoull(s);
  } catch (const std::exception&) {
    throw UsageError(2, "CCC_SEED out of range: '" + s + "'");
  }
}

inline RunConfig parse_args(int argc, const char* const* argv) {
  RunConfig cfg;
  CLI::App app{"Common-cause analysis and completion of finite probability spaces", kToolName};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1, 1);

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("input", cfg.input_path, "Space file (classical or quantum JSON)")->required();
    sub->add_option("--output,-o", cfg.output_path, "Write the report here instead of stdout");
    sub->add_option("--tolerance", cfg.tolerance, "Override the floating-point tolerances")
        ->check(CLI::PositiveNumber);
    sub->add_option("--limit", cfg.limit, "Enumeration limit in atoms")
        ->check(CLI::Range(1, 62));
  };
  auto add_types = [&](CLI::App* sub) {
    sub->add_option("--pair", cfg.pairs, "Correlated pair as NAME_A,NAME_B")->required();
    auto* t = sub->add_option("--t", cfg.t_values, "r_{A|C} of the requested type");
    auto* s = sub->add_option("--s", cfg.s_values, "r_{B|C} of the requested type");
    auto* q = sub->add_option("--type", cfg.types, "Full type r_c,r_ac,r_bc,r_acp,r_bcp");
    q->excludes(t)->excludes(s);
  };

  auto* analyze = app.add_subcommand("analyze", "List correlations and existing common causes");
  add_common(analyze);
  auto* complete = app.add_subcommand("complete", "Extend a classical space with common causes");
  add_common(complete);
  add_types(complete);
  auto* qcomplete = app.add_subcommand("qcomplete", "Extend a quantum space with common causes");
  add_common(qcomplete);
  add_types(qcomplete);
  auto* bell = app.add_subcommand("bell", "Evaluate the CHSH combination for four named events");
  add_common(bell);
  bell->add_option("names", cfg.names, "A1 A2 B1 B2")->expected(4)->required();
  auto* closed = app.add_subcommand("closed", "Check common-cause closedness of a classical space");
  add_common(closed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream out;
    std::ostringstream err;
    const int status = app.exit(e, out, err);
    throw UsageError(status == 0 ? 0 : 2, out.str() + err.str());
  }
  for (auto* sub : app.get_subcommands()) cfg.subcommand = sub->get_name();
  cfg.seed = seed_from_env();
  return cfg;
}

inline Tolerances effective_tolerances(const RunConfig& cfg) {
  Tolerances tol;
  if (cfg.tolerance) {
    const double v = *cfg.tolerance;
    tol.hermitian = tol.projection = tol.commute = tol.eq = tol.psd = tol.clamp = v;
    tol.gt = std::max(tol.gt, v);
  }
  return tol;
}

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

inline std::pair<std::string, std::string> split_pair(const std::string& text) {
  auto parts = split(text, ',');
  if (parts.size() != 2 || parts[0].empty() || parts[1].empty()) {
    fail(ErrorCode::ParseError, "--pair expects NAME_A,NAME_B, got '" + text + "'");
  }
  return {parts[0], parts[1]};
}

/// Value i of a per-pair option: indexed, broadcast from a single value, or
/// the fallback when absent.
inline std::string nth(const std::vector<std::string>& values, std::size_t i,
                       std::size_t pairs, const std::string& option,
                       const std::string& fallback) {
  if (values.empty()) return fallback;
  if (values.size() == 1) return values.front();
  if (values.size() != pairs) {
    fail(ErrorCode::ParseError, option + " must be given once or once per --pair");
  }
  return values[i];
}

/// Rational text "p/q", or for floating requests also a decimal literal.
inline double parse_real(const std::string& s) {
  try {
    return to_double(parse_rational(s));
  } catch (const Error&) {
  }
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) fail(ErrorCode::ParseError, "not a number: '" + s + "'");
  return v;
}

template <class T>
BasicCcType<T> quintuple(const std::string& text) {
  auto parts = split(text, ',');
  if (parts.size() != 5) {
    fail(ErrorCode::ParseError, "--type expects five comma-separated values, got '" + text + "'");
  }
  std::array<T, 5> v;
  for (std::size_t i = 0; i < 5; ++i) {
    if constexpr (std::is_same_v<T, Rational>) {
      v[i] = parse_rational(parts[i]);
    } else {
      v[i] = parse_real(parts[i]);
    }
  }
  return {v[0], v[1], v[2], v[3], v[4]};
}

inline std::string fresh_name(const std::string& base,
                              const std::vector<std::pair<std::string, Event>>& taken) {
  std::string name = base;
  auto used = [&](const std::string& n) {
    for (const auto& [k, e] : taken) {
      if (k == n) return true;
    }
    return false;
  };
  while (used(name)) name += "'";
  return name;
}

inline json envelope(const RunConfig& cfg, const Tolerances& tol) {
  return {{"tool", {{"name", kToolName}, {"version", kVersion}}},
          {"command", cfg.subcommand},
          {"tolerances", tolerances_to_json(tol)},
          {"enumeration_limit", cfg.limit},
          {"seed", cfg.seed}};
}

inline std::vector<std::string> names_equal_to(
    const std::vector<std::pair<std::string, Event>>& named, const Event& e) {
  std::vector<std::string> out;
  for (const auto& [n, x] : named) {
    if (x == e) out.push_back(n);
  }
  return out;
}

// ---- analyze ----

inline json analyze_classical(const RunConfig& cfg, const ClassicalDocument& doc) {
  const AtomicSpace& space = doc.space;
  const bool enumerable = space.size() <= cfg.limit && space.size() < 64;

  // Named pairs when the document names events, all event pairs otherwise.
  std::vector<std::pair<std::string, Event>> named = doc.events;
  std::vector<std::tuple<json, Event, Event>> pairs;
  if (!named.empty()) {
    for (std::size_t i = 0; i < named.size(); ++i) {
      for (std::size_t j = i + 1; j < named.size(); ++j) {
        if (correlation(space, named[i].second, named[j].second) > 0) {
          pairs.emplace_back(json::array({named[i].first, named[j].first}), named[i].second,
                             named[j].second);
        }
      }
    }
  } else {
    for (auto& [a, b] : list_correlated_pairs(space, cfg.limit)) {
      pairs.emplace_back(json::array({space.names_of(a), space.names_of(b)}), a, b);
    }
  }

  json list = json::array();
  bool complete = true;
  for (auto& [label, a, b] : pairs) {
    std::vector<FoundCause> found;
    if (enumerable) {
      found = find_common_causes(space, a, b, {.proper_only = false, .limit = cfg.limit});
    } else {
      for (const auto& [n, c] : named) {
        const Rational mc = measure(space, c);
        if (mc == 0 || mc == 1) continue;
        CcVerdict v = check_common_cause(space, a, b, c);
        if (v.is_common_cause) found.push_back({c, std::move(v)});
      }
    }
    json causes = json::array();
    bool proper = false;
    for (const auto& f : found) {
      proper = proper || f.verdict.has(CcClass::Proper);
      causes.push_back({{"atoms", space.names_of(f.cause)},
                        {"names", names_equal_to(named, f.cause)},
                        {"verdict", to_json(f.verdict)}});
    }
    complete = complete && proper;
    list.push_back({{"pair", label},
                    {"correlation", to_json(correlation(space, a, b))},
                    {"has_proper_common_cause", proper},
                    {"common_causes", std::move(causes)}});
  }
  return {{"kind", "classical"},
          {"candidates", enumerable ? "all-events" : "named-events"},
          {"correlated_pairs", std::move(list)},
          {"completeness", complete ? "complete" : "incomplete"}};
}

inline json analyze_quantum(const QuantumDocument& doc, const Tolerances& tol) {
  const auto& ps = doc.projections;
  json list = json::array();
  bool complete = true;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    for (std::size_t j = i + 1; j < ps.size(); ++j) {
      const auto& [na, a] = ps[i];
      const auto& [nb, b] = ps[j];
      if (!commutes(a, b, tol)) continue;
      const double corr = correlation_q(doc.space, a, b, tol);
      if (!(corr > tol.eq)) continue;
      json causes = json::array();
      bool proper = false;
      for (std::size_t k = 0; k < ps.size(); ++k) {
        const auto& [nc, c] = ps[k];
        if (k == i || k == j || !commutes(c, a, tol) || !commutes(c, b, tol)) continue;
        CcVerdict v;
        try {
          v = check_quantum_common_cause(doc.space, a, b, c, tol);
        } catch (const Error& e) {
          if (e.code() == ErrorCode::ZeroProbabilityCondition) continue;
          throw;
        }
        if (!v.is_common_cause) continue;
        proper = proper || v.has(CcClass::Proper);
        causes.push_back({{"name", nc}, {"verdict", to_json(v)}});
      }
      complete = complete && proper;
      list.push_back({{"pair", {na, nb}},
                      {"correlation", corr},
                      {"has_proper_common_cause", proper},
                      {"common_causes", std::move(causes)}});
    }
  }
  return {{"kind", "quantum"},
          {"candidates", "named-projections"},
          {"correlated_pairs", std::move(list)},
          {"completeness", complete ? "complete" : "incomplete"}};
}

// ---- complete ----

inline json complete_classical(const RunConfig& cfg, const ClassicalDocument& doc) {
  const AtomicSpace& space = doc.space;
  std::vector<CompletionRequest> requests;
  std::vector<std::pair<std::string, std::string>> labels;
  const std::size_t n = cfg.pairs.size();
  for (std::size_t i = 0; i < n; ++i) {
    auto [na, nb] = split_pair(cfg.pairs[i]);
    const Event& a = doc.event(na);
    const Event& b = doc.event(nb);
    CcType ct;
    if (!cfg.types.empty()) {
      ct = quintuple<Rational>(nth(cfg.types, i, n, "--type", ""));
    } else {
      const Rational t = parse_rational(nth(cfg.t_values, i, n, "--t", "1"));
      const Rational s = parse_rational(nth(cfg.s_values, i, n, "--s", "1"));
      if (!(correlation(space, a, b) > 0)) {
        fail(ErrorCode::NotCorrelated, "pair (" + na + ", " + nb + ") is not correlated");
      }
      ct = type_from_params(measure(space, a), measure(space, b), measure(space, a & b), t, s);
    }
    requests.push_back({a, b, ct});
    labels.emplace_back(std::move(na), std::move(nb));
  }

  CompletionOptions opts;
  opts.verify.limit = cfg.limit;
  opts.verify.seed = cfg.seed;
  CompletionReport rep = complete(space, requests, opts);

  std::vector<std::pair<std::string, Event>> events;
  for (const auto& [name, e] : doc.events) events.emplace_back(name, rep.embedding.map(e));
  json causes = json::array();
  for (const auto& c : rep.common_causes) {
    std::string name = fresh_name("C" + std::to_string(c.request_index + 1), events);
    causes.push_back({{"request", c.request_index},
                      {"pair", {labels[c.request_index].first, labels[c.request_index].second}},
                      {"event", name},
                      {"type", to_json(c.type)},
                      {"verdict", to_json(c.verdict)},
                      {"type_matches", c.type_matches}});
    events.emplace_back(std::move(name), c.cause);
  }

  json out = space_to_json(rep.extended_space, events);
  out["source_atoms"] = space.size();
  out["embedding"] = embedding_to_json(space, rep.extended_space, rep.embedding);
  out["common_causes"] = std::move(causes);
  out["verification"] = to_json(rep.extension_check);
  return out;
}

inline json complete_quantum_doc(const RunConfig& cfg, const QuantumDocument& doc,
                                 const Tolerances& tol) {
  std::vector<QRequest> requests;
  std::vector<std::pair<std::string, std::string>> labels;
  const std::size_t n = cfg.pairs.size();
  for (std::size_t i = 0; i < n; ++i) {
    auto [na, nb] = split_pair(cfg.pairs[i]);
    const Projection& a = doc.projection(na);
    const Projection& b = doc.projection(nb);
    QCcType ct;
    if (!cfg.types.empty()) {
      ct = quintuple<double>(nth(cfg.types, i, n, "--type", ""));
    } else {
      const double t = parse_real(nth(cfg.t_values, i, n, "--t", "1"));
      const double s = parse_real(nth(cfg.s_values, i, n, "--s", "1"));
      ::ccc::detail::require_commuting(a, b, tol, "a and b");
      const double mu_a = state_value(doc.space, a, tol);
      const double mu_b = state_value(doc.space, b, tol);
      double mu_ab = state_value(doc.space, meet_commuting(a, b, tol), tol);
      // For nested projections the joint equals a marginal up to rounding.
      if (const double cap = std::min(mu_a, mu_b); mu_ab > cap && mu_ab - cap <= tol.eq) mu_ab = cap;
      if (!(mu_ab - mu_a * mu_b > tol.eq)) {
        fail(ErrorCode::NotCorrelated, "pair (" + na + ", " + nb + ") is not correlated");
      }
      ct = type_from_params(mu_a, mu_b, mu_ab, t, s);
    }
    requests.push_back({a, b, ct});
    labels.emplace_back(std::move(na), std::move(nb));
  }

  QCompletionReport rep = complete_quantum(doc.space, requests, tol);
  const QEmbedding& emb = rep.extension.embedding;

  std::vector<std::pair<std::string, Projection>> projections;
  for (const auto& [name, p] : doc.projections) projections.emplace_back(name, emb.map(p));
  auto taken = [&](const std::string& s) {
    for (const auto& [k, p] : projections) {
      if (k == s) return true;
    }
    return false;
  };
  json causes = json::array();
  for (const auto& r : rep.causes) {
    std::string name = "C" + std::to_string(r.request_index + 1);
    while (taken(name)) name += "'";
    json cells = json::array();
    for (const auto& cell : r.construction.cells) {
      cells.push_back({{"cell", cell_name(cell.cell)},
                       {"rho", cell.rho},
                       {"source_value", cell.source_value},
                       {"cos2", cell.cos2},
                       {"telescoped", cell.telescoped(emb.block_weights)}});
    }
    causes.push_back({{"request", r.request_index},
                      {"pair", {labels[r.request_index].first, labels[r.request_index].second}},
                      {"projection", name},
                      {"type", to_json(requests[r.request_index].type)},
                      {"measured", to_json(r.measured)},
                      {"type_error", r.type_error},
                      {"type_matches", r.type_matches},
                      {"verdict", to_json(r.verdict)},
                      {"cells", std::move(cells)}});
    projections.emplace_back(std::move(name), r.construction.cause);
  }

  std::mt19937_64 rng(cfg.seed);
  std::vector<Projection> tests;
  tests.reserve(kFidelitySamples);
  for (int i = 0; i < kFidelitySamples; ++i) tests.push_back(random_projection(doc.space.dim(), rng));
  const double fidelity = extension_fidelity_error(doc.space, rep.extension, tests);

  json out = quantum_space_to_json(rep.extension.space, projections);
  out["embedding"] = qembedding_to_json(emb);
  out["common_causes"] = std::move(causes);
  out["causes_commute"] = rep.causes_commute;
  out["extension_fidelity"] = {{"samples", kFidelitySamples},
                               {"max_error", fidelity},
                               {"ok", fidelity <= tol.eq}};
  return out;
}

// ---- bell, closed ----

inline json bell_report(const RunConfig& cfg, const json& raw, const Tolerances& tol) {
  if (detect_kind(raw) == DocumentKind::Classical) {
    const ClassicalDocument doc = parse_classical(raw);
    const Event& a1 = doc.event(cfg.names[0]);
    const Event& a2 = doc.event(cfg.names[1]);
    const Event& b1 = doc.event(cfg.names[2]);
    const Event& b2 = doc.event(cfg.names[3]);
    json out = {{"kind", "classical"},
                {"names", cfg.names},
                {"chsh", to_json(chsh_classical(doc.space, a1, a2, b1, b2))}};
    const std::vector<std::pair<Event, Event>> pairs = {{a1, b1}, {a1, b2}, {a2, b1}, {a2, b2}};
    bool all_correlated = true;
    for (const auto& [a, b] : pairs) all_correlated = all_correlated && correlation(doc.space, a, b) > 0;
    json ccc = nullptr;
    if (all_correlated && doc.space.size() <= cfg.limit) {
      if (auto found = find_common_common_cause(doc.space, pairs, cfg.limit)) {
        ccc = {{"atoms", doc.space.names_of(found->cause)},
               {"names", names_equal_to(doc.events, found->cause)}};
      }
    }
    out["all_pairs_correlated"] = all_correlated;
    out["common_common_cause"] = std::move(ccc);
    return out;
  }
  const QuantumDocument doc = parse_quantum(raw, tol);
  return {{"kind", "quantum"},
          {"names", cfg.names},
          {"chsh", to_json(chsh_quantum(doc.space, doc.projection(cfg.names[0]),
                                        doc.projection(cfg.names[1]), doc.projection(cfg.names[2]),
                                        doc.projection(cfg.names[3]), tol))}};
}

inline json closed_report(const RunConfig& cfg, const ClassicalDocument& doc) {
  const Closedness c = common_cause_closed(doc.space, cfg.limit);
  json pairs = json::array();
  for (const auto& [a, b] : c.incomplete_pairs) {
    pairs.push_back({doc.space.names_of(a), doc.space.names_of(b)});
  }
  return {{"kind", "classical"}, {"closed", c.closed}, {"incomplete_pairs", std::move(pairs)}};
}

inline ClassicalDocument require_classical(const json& raw, const std::string& command) {
  if (detect_kind(raw) != DocumentKind::Classical) {
    fail(ErrorCode::ParseError, "'" + command + "' needs a classical space file");
  }
  return parse_classical(raw);
}

inline QuantumDocument require_quantum(const json& raw, const std::string& command,
                                       const Tolerances& tol) {
  if (detect_kind(raw) != DocumentKind::Quantum) {
    fail(ErrorCode::ParseError, "'" + command + "' needs a quantum space file");
  }
  return parse_quantum(raw, tol);
}

}  // namespace detail

struct RunResult {
  int exit_code = 0;
  json report;
};

inline int exit_code_for(ErrorCode code) {
  return code == ErrorCode::ParseError ? 2 : 1;
}

inline RunResult run(const RunConfig& cfg) {
  const Tolerances tol = effective_tolerances(cfg);
  json report = detail::envelope(cfg, tol);
  try {
    const json raw = read_json_file(cfg.input_path);
    json body;
    if (cfg.subcommand == "analyze") {
      if (detect_kind(raw) == DocumentKind::Classical) {
        body = detail::analyze_classical(cfg, parse_classical(raw));
      } else {
        body = detail::analyze_quantum(parse_quantum(raw, tol), tol);
      }
    } else if (cfg.subcommand == "complete") {
      body = detail::complete_classical(cfg, detail::require_classical(raw, cfg.subcommand));
    } else if (cfg.subcommand == "qcomplete") {
      body = detail::complete_quantum_doc(cfg, detail::require_quantum(raw, cfg.subcommand, tol), tol);
    } else if (cfg.subcommand == "bell") {
      body = detail::bell_report(cfg, raw, tol);
    } else if (cfg.subcommand == "closed") {
      body = detail::closed_report(cfg, detail::require_classical(raw, cfg.subcommand));
    } else {
      fail(ErrorCode::ParseError, "unknown subcommand '" + cfg.subcommand + "'");
    }
    report.update(body);
    return {0, std::move(report)};
  } catch (const Error& e) {
    report["error"] = {{"name", e.name()}, {"message", e.detail()}};
    return {exit_code_for(e.code()), std::move(report)};
  } catch (const json::exception& e) {
    report["error"] = {{"name", error_name(ErrorCode::ParseError)}, {"message", e.what()}};
    return {2, std::move(report)};
  }
}

inline std::string render(const json& report) { return report.dump(2) + "\n"; }

/// Full program: parse, run, write. Returns the process exit status.
inline int main_entry(int argc, const char* const* argv) {
  RunConfig cfg;
  try {
    cfg = parse_args(argc, argv);
  } catch (const UsageError& e) {
    (e.status() == 0 ? std::cout : std::cerr) << e.text();
    return e.status();
  }
  RunResult result = run(cfg);
  const std::string text = render(result.report);
  if (cfg.output_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(cfg.output_path, std::ios::binary);
    if (!out || !(out << text) || !out.flush()) {
      std::cerr << kToolName << ": cannot write '" << cfg.output_path << "'\n";
      return 2;
    }
  }
  if (result.exit_code != 0) {
    std::cerr << kToolName << ": " << result.report["error"]["name"].get<std::string>() << ": "
              << result.report["error"]["message"].get<std::string>() << "\n";
  }
  return result.exit_code;
}

}  // namespace ccc::cli
