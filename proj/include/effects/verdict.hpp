#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "effects/memory.hpp"
#include "effects/reducer.hpp"
#include "effects/syntax.hpp"

namespace effects {

enum class VerdictKind { Holds, Fails, Unknown };

inline const char* to_string(VerdictKind k) {
  switch (k) {
    case VerdictKind::Holds: return "HOLDS";
    case VerdictKind::Fails: return "FAILS";
    case VerdictKind::Unknown: return "UNKNOWN";
  }
  return "?";
}

/// A concrete counterexample: starting memory, use, closing substitution and
/// the programs that were run, with their outcomes.
struct Witness {
  Memory memory;
  std::optional<Context> use;
  Substitution subst;
  std::vector<Expr> programs;
  std::vector<Outcome> outcomes;
  std::string note;

  /// Closed program that reproduces side `i` from the empty memory.
  Expr replay(std::size_t i) const { return plug(canonicalize(memory), programs.at(i)); }
};

inline std::string witness_sexp(const Witness& w) {
  std::string out = "(witness " + memory_literal(w.memory);
  if (w.use) out += " (use " + to_string(w.use->expr()) + ")";
  out += " (subst";
  for (const auto& [x, v] : w.subst) out += " (" + x + " " + to_string(v) + ")";
  out += ")";
  for (std::size_t i = 0; i < w.programs.size(); ++i) {
    out += " (run " + to_string(w.programs[i]);
    if (i < w.outcomes.size()) out += " " + outcome_sexp(w.outcomes[i]);
    out += ")";
  }
  if (!w.note.empty()) out += " (note " + quote(w.note) + ")";
  out += ")";
  return out;
}

/// Three-valued result of a bounded check. `holds` is relative to the
/// enumeration that produced it.
struct Verdict {
  VerdictKind kind = VerdictKind::Holds;
  std::string reason;
  std::optional<Witness> witness;
  std::size_t cases = 0;
  std::size_t definite = 0;
  std::size_t indeterminate = 0;

  static Verdict holds() { return Verdict{}; }

  static Verdict fails(std::string reason, std::optional<Witness> w = std::nullopt) {
    Verdict v;
    v.kind = VerdictKind::Fails;
    v.reason = std::move(reason);
    v.witness = std::move(w);
    return v;
  }

  static Verdict unknown(std::string reason) {
    Verdict v;
    v.kind = VerdictKind::Unknown;
    v.reason = std::move(reason);
    return v;
  }

  static Verdict of(bool b, std::string reason_if_false = {}) {
    return b ? holds() : fails(std::move(reason_if_false));
  }

  bool is_holds() const { return kind == VerdictKind::Holds; }
  bool is_fails() const { return kind == VerdictKind::Fails; }
  bool is_unknown() const { return kind == VerdictKind::Unknown; }
};

/// First line of a report: `HOLDS`, `FAILS <witness>` or `UNKNOWN <reason>`.
inline std::string headline(const Verdict& v) {
  switch (v.kind) {
    case VerdictKind::Holds:
      return "HOLDS";
    case VerdictKind::Fails:
      if (v.witness) return "FAILS " + witness_sexp(*v.witness);
      return "FAILS " + v.reason;
    case VerdictKind::Unknown:
      return "UNKNOWN " + v.reason;
  }
  return "?";
}

/// Strong Kleene negation.
inline Verdict negate(Verdict v) {
  if (v.is_holds()) {
    v.kind = VerdictKind::Fails;
  } else if (v.is_fails()) {
    v.kind = VerdictKind::Holds;
    v.witness.reset();
  }
  return v;
}

/// Worst-case merge: fails dominates unknown dominates holds; the first
/// witness is kept and case counters add up.
inline void merge_into(Verdict& acc, const Verdict& v) {
  acc.cases += v.cases;
  acc.definite += v.definite;
  acc.indeterminate += v.indeterminate;
  if (acc.is_fails()) return;
  if (v.is_fails() || (v.is_unknown() && acc.is_holds())) {
    acc.kind = v.kind;
    acc.reason = v.reason;
    acc.witness = v.witness;
  }
}

/// Strong Kleene conjunction (fails wins, then unknown).
inline Verdict kleene_and(const Verdict& a, const Verdict& b) {
  if (a.is_fails()) return a;
  if (b.is_fails()) return b;
  if (a.is_unknown()) return a;
  if (b.is_unknown()) return b;
  return a;
}

/// Strong Kleene disjunction (holds wins, then unknown).
inline Verdict kleene_or(const Verdict& a, const Verdict& b) {
  if (a.is_holds()) return a;
  if (b.is_holds()) return b;
  if (a.is_unknown()) return a;
  if (b.is_unknown()) return b;
  return a;
}

}  // namespace effects
