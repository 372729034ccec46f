#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "effects/enumerate.hpp"
#include "effects/equivalence.hpp"
#include "effects/generate.hpp"
#include "effects/programs.hpp"
#include "effects/reducer.hpp"
#include "effects/syntax.hpp"
#include "effects/verdict.hpp"

namespace effects {

enum class LawOracle { StrongIso, Ciu };
enum class LawKind { Schema, CommonReduct, ReductionPreservation };

struct MetaVar {
  enum class Sort { Expr, Value, Context, Closure };
  std::string name;
  Sort sort = Sort::Expr;
  /// Object variables the instance may mention freely.
  std::vector<std::string> scope;
};

struct SideCondition {
  enum class Kind { NotFree, Distinct };
  Kind kind = Kind::NotFree;
  std::vector<std::string> args;
};

/// A named equivalence schema. `lhs`/`rhs` stay as s-expressions and are
/// parsed per instance with the metavariables substituted.
struct Law {
  std::string name;
  LawKind kind = LawKind::Schema;
  LawOracle oracle = LawOracle::Ciu;
  bool expect_holds = true;
  bool first_order = false;
  std::vector<MetaVar> metas;
  std::vector<SideCondition> sides;
  Sexp lhs;
  Sexp rhs;
  /// For expected failures: the use the witness must exhibit.
  std::optional<Expr> witness_use;

  bool has_metas() const { return !metas.empty() || kind != LawKind::Schema; }
};

struct LawOptions {
  std::size_t instances = 100;
  std::size_t cases_per_instance = 200;
  std::uint64_t seed = 0;
};

struct LawResult {
  Verdict verdict;
  std::size_t instances = 0;
  bool as_expected = false;
};

namespace detail {

inline std::vector<std::string> atom_list(const Sexp& s, std::size_t from) {
  std::vector<std::string> out;
  for (std::size_t i = from; i < s.items.size(); ++i) {
    if (!s.items[i].is_atom()) s.items[i].fail("expected a name");
    out.push_back(s.items[i].atom);
  }
  return out;
}

}  // namespace detail

/// Reads one `(law NAME clause...)` form.
inline Law parse_law(const Sexp& s) {
  if (!s.has_head("law") || s.items.size() < 2 || !s.items[1].is_atom())
    s.fail("expected (law NAME ...)");
  Law law;
  law.name = s.items[1].atom;
  bool have_lhs = false;
  bool have_rhs = false;
  for (std::size_t i = 2; i < s.items.size(); ++i) {
    const Sexp& c = s.items[i];
    if (!c.is_list() || c.items.empty() || !c.items[0].is_atom()) c.fail("malformed law clause");
    const std::string& head = c.items[0].atom;
    auto arg = [&](std::size_t k) -> const Sexp& {
      if (c.items.size() <= k) c.fail("missing argument in (" + head + " ...)");
      return c.items[k];
    };
    if (head == "oracle") {
      const std::string o = arg(1).atom;
      if (o == "ciu") law.oracle = LawOracle::Ciu;
      else if (o == "strong-iso") law.oracle = LawOracle::StrongIso;
      else c.fail("unknown oracle '" + o + "'");
    } else if (head == "kind") {
      const std::string k = arg(1).atom;
      if (k == "schema") law.kind = LawKind::Schema;
      else if (k == "common-reduct") law.kind = LawKind::CommonReduct;
      else if (k == "reduction-preservation") law.kind = LawKind::ReductionPreservation;
      else c.fail("unknown law kind '" + k + "'");
    } else if (head == "expect") {
      const std::string e = arg(1).atom;
      if (e != "holds" && e != "fails") c.fail("expect must be holds or fails");
      law.expect_holds = e == "holds";
    } else if (head == "domain") {
      if (arg(1).atom != "first-order") c.fail("unknown domain '" + arg(1).atom + "'");
      law.first_order = true;
    } else if (head == "meta") {
      for (std::size_t k = 1; k < c.items.size(); ++k) {
        const Sexp& m = c.items[k];
        if (!m.is_list() || m.items.size() < 2 || !m.items[0].is_atom() || !m.items[1].is_atom())
          m.fail("expected (NAME SORT var...)");
        MetaVar mv;
        mv.name = m.items[0].atom;
        const std::string sort = m.items[1].atom;
        if (sort == "expr") mv.sort = MetaVar::Sort::Expr;
        else if (sort == "value") mv.sort = MetaVar::Sort::Value;
        else if (sort == "context") mv.sort = MetaVar::Sort::Context;
        else if (sort == "closure") mv.sort = MetaVar::Sort::Closure;
        else m.fail("unknown metavariable sort '" + sort + "'");
        mv.scope = detail::atom_list(m, 2);
        law.metas.push_back(std::move(mv));
      }
    } else if (head == "side") {
      for (std::size_t k = 1; k < c.items.size(); ++k) {
        const Sexp& sc = c.items[k];
        if (!sc.is_list() || sc.items.empty()) sc.fail("malformed side condition");
        SideCondition cond;
        if (sc.has_head("not-free")) cond.kind = SideCondition::Kind::NotFree;
        else if (sc.has_head("distinct")) cond.kind = SideCondition::Kind::Distinct;
        else sc.fail("unknown side condition");
        cond.args = detail::atom_list(sc, 1);
        if (cond.kind == SideCondition::Kind::NotFree && cond.args.size() != 2)
          sc.fail("not-free takes a variable and a metavariable");
        if (cond.kind == SideCondition::Kind::Distinct) {
          std::set<std::string> seen(cond.args.begin(), cond.args.end());
          if (seen.size() != cond.args.size()) sc.fail("distinct variables share a name");
        }
        law.sides.push_back(std::move(cond));
      }
    } else if (head == "lhs") {
      law.lhs = arg(1);
      have_lhs = true;
    } else if (head == "rhs") {
      law.rhs = arg(1);
      have_rhs = true;
    } else if (head == "witness-use") {
      ParseHooks hooks;
      hooks.allow_hole = true;
      law.witness_use = parse_expr(arg(1), &hooks);
    } else {
      c.fail("unknown law clause '" + head + "'");
    }
  }
  if (law.kind == LawKind::Schema && (!have_lhs || !have_rhs)) s.fail("law needs lhs and rhs");
  return law;
}

inline std::vector<Law> parse_laws(std::string_view text) {
  std::vector<Law> out;
  for (const Sexp& s : read_sexps(text)) out.push_back(parse_law(s));
  return out;
}

/// The built-in catalog.
inline const std::vector<Law>& builtin_laws() {
  static const std::vector<Law> laws = parse_laws(R"(
(law eq-refl (oracle strong-iso) (expect holds) (domain first-order)
  (lhs (eq x x)) (rhs t))

(law set-absorption (oracle strong-iso) (expect holds)
  (lhs (seq (set x v) (set x w))) (rhs (set x w)))

(law mk-garbage (oracle strong-iso) (expect holds)
  (lhs (seq (mk x) (mk u))) (rhs (mk u)))

(law mk-let-fusion (oracle strong-iso) (expect holds)
  (meta (e expr z w x))
  (side (distinct z w) (distinct z x))
  (lhs (let ((z (mk x))) (seq (set z w) e)))
  (rhs (let ((z (mk w))) e)))

(law moggi-i (oracle ciu) (expect holds)
  (meta (e expr x y) (v value y))
  (lhs (app (lambda (x) e) v))
  (rhs (subst e x v)))

(law moggi-ii (oracle ciu) (expect holds)
  (meta (e expr y) (R context y))
  (side (not-free x R))
  (lhs (plug R e))
  (rhs (let ((x e)) (plug R x))))

(law moggi-iii (oracle ciu) (expect holds)
  (meta (e0 expr y) (e1 expr x y) (R context y))
  (side (not-free x R))
  (lhs (plug R (let ((x e0)) e1)))
  (rhs (let ((x e0)) (plug R e1))))

(law eta-general (oracle ciu) (expect fails)
  (meta (f closure))
  (lhs (lambda (x) (app f x)))
  (rhs f)
  (witness-use (let ((f _)) (seq (app f 1) (app f 2)))))

(law subst-into-equals (oracle ciu) (expect fails)
  (lhs (eq (mk x) (mk x)))
  (rhs t)
  (witness-use _))

(law values-not-strongly-isomorphic (oracle strong-iso) (expect fails)
  (lhs (lambda (x) x))
  (rhs (lambda (x) (seq (mk 0) x))))

(law values-operationally-equivalent (oracle ciu) (expect holds)
  (lhs (lambda (x) x))
  (rhs (lambda (x) (seq (mk 0) x))))

(law common-reduct (kind common-reduct) (oracle ciu) (expect holds))

(law reduction-preservation (kind reduction-preservation) (oracle ciu) (expect holds))
)");
  return laws;
}

inline const Law* find_law(const std::vector<Law>& laws, std::string_view name) {
  for (const Law& l : laws)
    if (l.name == name) return &l;
  return nullptr;
}

/// Whether `redex` contracts the same way for every value its variables
/// might stand for.
inline bool contracts_symbolically(const Expr& redex) {
  switch (redex.op()) {
    case Op::Mk:
    case Op::Get:
    case Op::Set:
    case Op::CellP:
    case Op::NatP:
      return false;
    case Op::Eq:
      return !redex.kid(0).is(Op::Var) && !redex.kid(1).is(Op::Var);
    case Op::If:
      return !redex.kid(0).is(Op::Var);
    default:
      return true;
  }
}

/// Terms reached from `e` by functional steps, treating every variable as a
/// value. Stops at values, stuck terms, memory operations or `limit`.
inline std::vector<Expr> functional_reducts(const Expr& e, std::size_t limit = 64) {
  std::vector<Expr> out{e};
  Expr cur = e;
  for (std::size_t i = 0; i < limit; ++i) {
    std::vector<Frame> path;
    if (detail::find_focus(cur, all_vars_are_values(), path) != DecompKind::Redex) break;
    if (!contracts_symbolically(focus_of(cur, path))) break;
    auto next = contract(focus_of(cur, path), nullptr, cur);
    if (!next) break;
    cur = rebuild(path, std::move(*next));
    out.push_back(cur);
  }
  return out;
}

inline bool have_common_reduct(const Expr& a, const Expr& b) {
  const auto ra = functional_reducts(a);
  const auto rb = functional_reducts(b);
  for (const Expr& x : ra)
    for (const Expr& y : rb)
      if (alpha_equal(x, y)) return true;
  return false;
}

namespace detail {

/// Memory closures Γ[λx.e]: the known η counterexample first, then variants.
inline std::vector<Expr> closure_pool() {
  return {
      programs::eta_thunk(),
      programs::counter(),
      parse("(let ((z (mk nil))) (lambda (x) (seq (set z x) x)))"),
      parse("(let ((z (mk 1))) (lambda (x) (get z)))"),
      parse("(let ((z (mk 0))) (lambda (x) (seq (set z (add1 (get z))) (eq (get z) 2))))"),
  };
}

struct Instance {
  std::map<std::string, Expr, std::less<>> exprs;
  std::map<std::string, Expr, std::less<>> contexts;
};

inline Expr instantiate(const Sexp& schema, const Instance& inst) {
  ParseHooks hooks;
  hooks.rewrite = [&](const Sexp& s) -> std::optional<Expr> {
    if (s.is_atom()) {
      if (auto it = inst.exprs.find(s.atom); it != inst.exprs.end()) return it->second;
      if (inst.contexts.count(s.atom)) s.fail("context metavariable '" + s.atom + "' outside plug");
      return std::nullopt;
    }
    if (s.has_head("plug")) {
      if (s.items.size() != 3 || !s.items[1].is_atom()) s.fail("expected (plug R e)");
      auto it = inst.contexts.find(s.items[1].atom);
      if (it == inst.contexts.end()) s.fail("unknown context metavariable '" + s.items[1].atom + "'");
      return plug_expr(it->second, instantiate(s.items[2], inst));
    }
    if (s.has_head("subst")) {
      if (s.items.size() != 4 || !s.items[2].is_atom()) s.fail("expected (subst e x v)");
      return substitute(instantiate(s.items[1], inst), s.items[2].atom, instantiate(s.items[3], inst));
    }
    return std::nullopt;
  };
  return parse_expr(schema, &hooks);
}

inline std::set<std::string> object_names(const Law& law) {
  std::set<std::string> names;
  for (const auto& m : law.metas) {
    names.insert(m.name);
    for (const auto& v : m.scope) names.insert(v);
  }
  for (const auto& s : law.sides)
    for (const auto& a : s.args) names.insert(a);
  std::function<void(const Sexp&)> walk = [&](const Sexp& s) {
    if (s.is_atom()) {
      if (!s.is_numeral()) names.insert(s.atom);
      return;
    }
    for (const Sexp& k : s.items) walk(k);
  };
  walk(law.lhs);
  walk(law.rhs);
  return names;
}

inline bool sides_hold(const Law& law, const Instance& inst) {
  for (const auto& side : law.sides) {
    if (side.kind != SideCondition::Kind::NotFree) continue;
    const std::string& x = side.args[0];
    const std::string& m = side.args[1];
    if (auto it = inst.contexts.find(m); it != inst.contexts.end() && it->second.has_free(x)) return false;
    if (auto it = inst.exprs.find(m); it != inst.exprs.end() && it->second.has_free(x)) return false;
  }
  return true;
}

inline Instance draw_instance(const Law& law, TermGen& gen, std::size_t index) {
  static const std::vector<Expr> closures = closure_pool();
  for (int attempt = 0;; ++attempt) {
    Instance inst;
    for (const MetaVar& m : law.metas) {
      switch (m.sort) {
        case MetaVar::Sort::Expr:
          inst.exprs[m.name] = gen.expr(3, m.scope);
          break;
        case MetaVar::Sort::Value:
          inst.exprs[m.name] = gen.value(2, m.scope);
          break;
        case MetaVar::Sort::Context:
          inst.contexts[m.name] = gen.reduction_context(3, m.scope);
          break;
        case MetaVar::Sort::Closure:
          if (index < closures.size()) {
            inst.exprs[m.name] = closures[index];
          } else {
            std::vector<std::string> inner{"z", "x"};
            Expr body = gen.expr(3, inner);
            inst.exprs[m.name] =
                Expr::let("z", Expr::mk(gen.leaf({})), Expr::lambda("x", body));
          }
          break;
      }
    }
    if (sides_hold(law, inst) || attempt > 1000) return inst;
  }
}

inline EnumConfig instance_config(const Law& law, const EnumConfig& base, std::size_t cases,
                                  std::uint64_t seed) {
  EnumConfig cfg = base;
  cfg.first_order = base.first_order || law.first_order;
  cfg.max_cases = cases;
  cfg.seed = seed;
  return cfg;
}

inline Verdict run_oracle(LawOracle o, const Expr& lhs, const Expr& rhs, const EnumConfig& cfg) {
  return o == LawOracle::StrongIso ? strong_iso(lhs, rhs, cfg) : ciu_test(lhs, rhs, cfg);
}

}  // namespace detail

/// Instantiates the law and aggregates the per-instance verdicts.
inline LawResult law_check(const Law& law, const EnumConfig& cfg, const LawOptions& opts) {
  LawResult result;
  Verdict& acc = result.verdict;
  const std::uint64_t seed = opts.seed;
  TermGen gen(seed, detail::object_names(law));
  auto done = [&](const Verdict& v) {
    ++result.instances;
    merge_into(acc, v);
    return acc.is_fails();
  };

  if (law.kind == LawKind::Schema && law.metas.empty()) {
    EnumConfig c = detail::instance_config(law, cfg, cfg.max_cases, seed);
    done(detail::run_oracle(law.oracle, detail::instantiate(law.lhs, {}),
                            detail::instantiate(law.rhs, {}), c));
  } else if (law.kind == LawKind::Schema) {
    for (std::size_t i = 0; i < opts.instances; ++i) {
      const detail::Instance inst = detail::draw_instance(law, gen, i);
      const Expr lhs = detail::instantiate(law.lhs, inst);
      const Expr rhs = detail::instantiate(law.rhs, inst);
      EnumConfig c = detail::instance_config(law, cfg, opts.cases_per_instance, seed + i);
      if (done(detail::run_oracle(law.oracle, lhs, rhs, c))) break;
    }
  } else if (law.kind == LawKind::CommonReduct) {
    // R1 is R0 behind an administrative redex; both reduce to R0[x].
    for (std::size_t i = 0; i < opts.instances; ++i) {
      const Expr r0 = gen.reduction_context(2, {"y"});
      const std::string v = "v";
      Expr r1;
      switch (i % 3) {
        case 0: r1 = Expr::let(v, Expr::hole(), plug_expr(r0, Expr::var(v))); break;
        case 1: r1 = Expr::app(Expr::lambda(v, plug_expr(r0, Expr::var(v))), Expr::hole()); break;
        default: r1 = plug_expr(r0, Expr::fst(Expr::pair(Expr::hole(), Expr::nil()))); break;
      }
      const Expr fresh = Expr::var("x'");
      Verdict v_i;
      if (r0.has_free(v) || !have_common_reduct(plug_expr(r0, fresh), plug_expr(r1, fresh))) {
        v_i = Verdict::unknown("no common reduct for " + to_string(r0) + " and " + to_string(r1));
      } else {
        const Expr e = gen.expr(3, {"y"});
        EnumConfig c = detail::instance_config(law, cfg, opts.cases_per_instance, seed + i);
        v_i = ciu_test(plug_expr(r0, e), plug_expr(r1, e), c);
      }
      if (done(v_i)) break;
    }
  } else {
    // Γ;e ↦ Γ';e' and compare the closed programs Γ[e] and Γ'[e'].
    EnumConfig mem_cfg = cfg;
    mem_cfg.max_cells = std::min<std::size_t>(cfg.max_cells, 2);
    const auto memories = enumerate_memories(mem_cfg, {"a", "b", "c", "d", "g", "h", "k", "n", "f", "x"});
    std::size_t drawn = 0;
    while (drawn < opts.instances) {
      const Memory& m = memories[gen.below(memories.size())];
      const Expr e = gen.expr(4, m.names());
      Description d{m, e};
      if (step_in_place(d) != StepStatus::Stepped) continue;
      ++drawn;
      EnumConfig c = detail::instance_config(law, cfg, opts.cases_per_instance, seed + drawn);
      const Expr before = plug(canonicalize(m), e);
      const Expr after = plug(canonicalize(d.memory), d.expr);
      if (done(ciu_test(before, after, c))) break;
    }
  }

  if (law.expect_holds) {
    result.as_expected = !acc.is_fails();
  } else {
    result.as_expected = acc.is_fails();
    if (result.as_expected && law.witness_use) {
      result.as_expected =
          acc.witness && acc.witness->use && alpha_equal(acc.witness->use->expr(), *law.witness_use);
    }
  }
  return result;
}

}  // namespace effects
