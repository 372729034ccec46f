#pragma once

#include <set>
#include <string>
#include <vector>

#include "effects/enumerate.hpp"
#include "effects/memory.hpp"
#include "effects/reducer.hpp"
#include "effects/syntax.hpp"
#include "effects/verdict.hpp"

namespace effects {

enum class CaseResult { Agree, Disagree, Indeterminate };

/// Atoms and numerals: values any use can tell apart with eq.
inline bool is_ground(const Expr& v) { return v.is(Op::Nil) || v.is(Op::True) || v.is(Op::Nat); }

/// Equi-definedness, three-valued. Two different ground results also
/// disagree: the use if(eq(•,a), Ω, nil) turns them into a definedness split.
inline CaseResult ciu_compare(const Outcome& a, const Outcome& b) {
  if (a.is_indeterminate() || b.is_indeterminate()) return CaseResult::Indeterminate;
  if (a.is_value() != b.is_value()) return CaseResult::Disagree;
  if (a.is_value() && is_ground(a.value()) && is_ground(b.value()) && !eq_values(a.value(), b.value()))
    return CaseResult::Disagree;
  return CaseResult::Agree;
}

/// Equal values in memories identical modulo garbage, rooted at the
/// starting memory.
inline CaseResult iso_compare(const Outcome& a, const Outcome& b, const Memory& start) {
  if (a.is_indeterminate() || b.is_indeterminate()) return CaseResult::Indeterminate;
  if (a.is_value() != b.is_value()) return CaseResult::Disagree;
  if (!a.is_value()) return CaseResult::Agree;
  return equal_mod_garbage(a.memory(), a.value(), b.memory(), b.value(), RootSet::of_cells(start))
             ? CaseResult::Agree
             : CaseResult::Disagree;
}

inline EvalOptions oracle_eval_options(const EnumConfig& cfg) {
  EvalOptions opts;
  opts.max_steps = cfg.max_steps;
  opts.detect_loops = true;
  return opts;
}

inline std::vector<std::string> joint_free_vars(const Expr& e0, const Expr& e1) {
  std::vector<std::string> out;
  std::set_union(e0.free_vars().begin(), e0.free_vars().end(), e1.free_vars().begin(),
                 e1.free_vars().end(), std::back_inserter(out));
  return out;
}

namespace detail {

template <class Compare>
Verdict compare_over_cases(const Expr& e0, const Expr& e1, const EnumConfig& cfg,
                           std::vector<Context> uses, Compare&& compare, const char* what) {
  cfg.validate();
  std::set<std::string> avoid;
  collect_names(e0, avoid);
  collect_names(e1, avoid);
  for (const Context& u : uses) collect_names(u.expr(), avoid);
  CaseSpace space(cfg, joint_free_vars(e0, e1), std::move(uses), avoid);
  const EvalOptions opts = oracle_eval_options(cfg);
  Verdict v;
  space.for_each([&](const Case& c) {
    const Expr p0 = plug(*c.use, substitute(e0, c.subst));
    const Expr p1 = plug(*c.use, substitute(e1, c.subst));
    Outcome o0 = eval(Description{*c.memory, p0}, opts);
    Outcome o1 = eval(Description{*c.memory, p1}, opts);
    ++v.cases;
    switch (compare(o0, o1, *c.memory)) {
      case CaseResult::Agree:
        ++v.definite;
        return true;
      case CaseResult::Indeterminate:
        ++v.indeterminate;
        return true;
      case CaseResult::Disagree:
        break;
    }
    ++v.definite;
    Witness w;
    w.memory = *c.memory;
    w.use = *c.use;
    w.subst = c.subst;
    w.programs = {p0, p1};
    w.outcomes = {std::move(o0), std::move(o1)};
    w.note = what;
    v.kind = VerdictKind::Fails;
    v.reason = what;
    v.witness = std::move(w);
    return false;
  });
  if (!v.is_fails() && v.indeterminate > 0) {
    v.kind = VerdictKind::Unknown;
    v.reason = "timeout in " + std::to_string(v.indeterminate) + " of " + std::to_string(v.cases) +
               " cases at " + std::to_string(cfg.max_steps) + " steps";
  }
  return v;
}

}  // namespace detail

/// e0 ≃ e1 over enumerated starting memories and closing substitutions.
inline Verdict strong_iso(const Expr& e0, const Expr& e1, const EnumConfig& cfg) {
  std::vector<Context> uses{Context::make(Expr::hole(), ContextSort::Reduction)};
  return detail::compare_over_cases(
      e0, e1, cfg, std::move(uses),
      [](const Outcome& a, const Outcome& b, const Memory& start) { return iso_compare(a, b, start); },
      "results differ modulo garbage");
}

/// Bounded CIU: equi-definedness of Γ[R[e^σ]] over enumerated Γ, σ and R.
inline Verdict ciu_test(const Expr& e0, const Expr& e1, const EnumConfig& cfg) {
  return detail::compare_over_cases(
      e0, e1, cfg, enumerate_uses(cfg),
      [](const Outcome& a, const Outcome& b, const Memory&) { return ciu_compare(a, b); },
      "use separates the two expressions");
}

/// Replays a witness and checks it still shows the same outcomes.
inline bool witness_replays(const Witness& w, const EnumConfig& cfg) {
  const EvalOptions opts = oracle_eval_options(cfg);
  for (std::size_t i = 0; i < w.programs.size() && i < w.outcomes.size(); ++i) {
    const Outcome o = eval(Description{w.memory, w.programs[i]}, opts);
    if (o.kind != w.outcomes[i].kind || o.steps != w.outcomes[i].steps) return false;
    if (o.is_value() && !(o.last == w.outcomes[i].last)) return false;
  }
  return true;
}

}  // namespace effects
