#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "effects/enumerate.hpp"
#include "effects/equivalence.hpp"
#include "effects/generate.hpp"
#include "effects/memory.hpp"
#include "effects/reducer.hpp"
#include "effects/syntax.hpp"
#include "effects/verdict.hpp"

namespace effects {

struct Formula;
struct ClassTerm;
using FormulaPtr = std::shared_ptr<const Formula>;
using ClassPtr = std::shared_ptr<const ClassTerm>;

/// Class terms: constants, Cell[K], comprehensions, function spaces and
/// class variables (which also name registered classes).
struct ClassTerm {
  enum class Kind { Val, Nat, Nil, Cell, CellOf, Comprehension, Arrow, PArrow, MuArrow, StrictPartial, Var };
  Kind kind = Kind::Val;
  std::string name;  // bound variable of a comprehension, or class variable
  FormulaPtr body;
  std::vector<ClassPtr> args;
  ClassPtr result;  // codomain, or K in Cell[K]

  static ClassPtr named(Kind k) {
    auto c = std::make_shared<ClassTerm>();
    c->kind = k;
    return c;
  }
  static ClassPtr var(std::string name) {
    auto c = std::make_shared<ClassTerm>();
    c->kind = Kind::Var;
    c->name = std::move(name);
    return c;
  }
  static ClassPtr cell_of(ClassPtr k) {
    auto c = std::make_shared<ClassTerm>();
    c->kind = Kind::CellOf;
    c->result = std::move(k);
    return c;
  }
  static ClassPtr comprehension(std::string x, FormulaPtr body) {
    auto c = std::make_shared<ClassTerm>();
    c->kind = Kind::Comprehension;
    c->name = std::move(x);
    c->body = std::move(body);
    return c;
  }
  static ClassPtr function_space(Kind k, std::vector<ClassPtr> args, ClassPtr result) {
    if (args.empty()) throw Error("function space needs at least one argument class");
    auto c = std::make_shared<ClassTerm>();
    c->kind = k;
    c->args = std::move(args);
    c->result = std::move(result);
    return c;
  }
};

/// VTLoE formulas, plus `defined` and the two effect predicates as atoms.
struct Formula {
  enum class Kind {
    True,
    False,
    Equiv,
    Member,
    Defined,
    NotExpand,
    NotWrite,
    Not,
    And,
    Or,
    Implies,
    Forall,
    Exists,
    ForallClass,
    Ctx,
    Subset,
    ClassEquiv,
  };
  Kind kind = Kind::True;
  Expr e0;
  Expr e1;
  ClassPtr k0;
  ClassPtr k1;
  std::vector<FormulaPtr> kids;
  std::string var;
  ClassPtr range;  // bounded quantifier (x ∈ K)
  Context context;

  static FormulaPtr make(Kind k) {
    auto f = std::make_shared<Formula>();
    f->kind = k;
    return f;
  }
  static FormulaPtr equiv(Expr a, Expr b) {
    auto f = std::make_shared<Formula>();
    f->kind = Kind::Equiv;
    f->e0 = std::move(a);
    f->e1 = std::move(b);
    return f;
  }
  static FormulaPtr member(Expr e, ClassPtr k) {
    auto f = std::make_shared<Formula>();
    f->kind = Kind::Member;
    f->e0 = std::move(e);
    f->k0 = std::move(k);
    return f;
  }
  static FormulaPtr unary_expr(Kind k, Expr e) {
    auto f = std::make_shared<Formula>();
    f->kind = k;
    f->e0 = std::move(e);
    return f;
  }
  static FormulaPtr connective(Kind k, std::vector<FormulaPtr> kids) {
    auto f = std::make_shared<Formula>();
    f->kind = k;
    f->kids = std::move(kids);
    return f;
  }
  static FormulaPtr negation(FormulaPtr a) { return connective(Kind::Not, {std::move(a)}); }
  static FormulaPtr quantifier(Kind k, std::string x, FormulaPtr body, ClassPtr range = nullptr) {
    auto f = std::make_shared<Formula>();
    f->kind = k;
    f->var = std::move(x);
    f->kids = {std::move(body)};
    f->range = std::move(range);
    return f;
  }
  static FormulaPtr ctx(Context u, FormulaPtr body) {
    if (!is_univalent(u)) throw Error("contextual assertion needs a univalent context: " + to_string(u.expr()));
    auto f = std::make_shared<Formula>();
    f->kind = Kind::Ctx;
    f->context = std::move(u);
    f->kids = {std::move(body)};
    return f;
  }
  static FormulaPtr classes(Kind k, ClassPtr a, ClassPtr b) {
    auto f = std::make_shared<Formula>();
    f->kind = k;
    f->k0 = std::move(a);
    f->k1 = std::move(b);
    return f;
  }
};

// ---------------------------------------------------------------------------
// Surface syntax

inline std::string to_string(const ClassPtr& k);
inline std::string to_string(const FormulaPtr& f);

inline std::string to_string(const ClassPtr& k) {
  using K = ClassTerm::Kind;
  auto list = [&](const char* head) {
    std::string out = std::string("(") + head;
    for (const auto& a : k->args) out += " " + to_string(a);
    return out + " " + to_string(k->result) + ")";
  };
  switch (k->kind) {
    case K::Val: return "Val";
    case K::Nat: return "Nat";
    case K::Nil: return "Nil";
    case K::Cell: return "Cell";
    case K::CellOf: return "(Cell " + to_string(k->result) + ")";
    case K::Comprehension: return "(set-of " + k->name + " " + to_string(k->body) + ")";
    case K::Arrow: return list("->");
    case K::PArrow: return list("-p>");
    case K::MuArrow: return list("-mu>");
    case K::StrictPartial: return list("strict-partial");
    case K::Var: return k->name;
  }
  return "?";
}

inline std::string to_string(const FormulaPtr& f) {
  using K = Formula::Kind;
  auto kids = [&](const char* head) {
    std::string out = std::string("(") + head;
    for (const auto& k : f->kids) out += " " + to_string(k);
    return out + ")";
  };
  auto binder = [&](const char* head) {
    std::string b = f->range ? "(" + f->var + " " + to_string(f->range) + ")" : f->var;
    return std::string("(") + head + " " + b + " " + to_string(f->kids[0]) + ")";
  };
  switch (f->kind) {
    case K::True: return "true";
    case K::False: return "false";
    case K::Equiv: return "(equiv " + to_string(f->e0) + " " + to_string(f->e1) + ")";
    case K::Member: return "(member " + to_string(f->e0) + " " + to_string(f->k0) + ")";
    case K::Defined: return "(defined " + to_string(f->e0) + ")";
    case K::NotExpand: return "(not-expand " + to_string(f->e0) + ")";
    case K::NotWrite: return "(not-write " + to_string(f->e0) + ")";
    case K::Not: return kids("not");
    case K::And: return kids("and");
    case K::Or: return kids("or");
    case K::Implies: return kids("implies");
    case K::Forall: return binder("forall");
    case K::Exists: return binder("exists");
    case K::ForallClass: return binder("forall-class");
    case K::Ctx: return "(ctx " + to_string(f->context.expr()) + " " + to_string(f->kids[0]) + ")";
    case K::Subset: return "(subset " + to_string(f->k0) + " " + to_string(f->k1) + ")";
    case K::ClassEquiv: return "(class-equiv " + to_string(f->k0) + " " + to_string(f->k1) + ")";
  }
  return "?";
}

inline FormulaPtr parse_formula(const Sexp& s);

inline ClassPtr parse_class(const Sexp& s) {
  using K = ClassTerm::Kind;
  if (s.is_atom()) {
    if (s.atom == "Val") return ClassTerm::named(K::Val);
    if (s.atom == "Nat") return ClassTerm::named(K::Nat);
    if (s.atom == "Nil") return ClassTerm::named(K::Nil);
    if (s.atom == "Cell") return ClassTerm::named(K::Cell);
    if (s.is_numeral() || is_reserved_word(s.atom)) s.fail("expected a class");
    return ClassTerm::var(s.atom);
  }
  if (s.items.empty() || !s.items[0].is_atom()) s.fail("expected a class term");
  const std::string& head = s.items[0].atom;
  if (head == "Cell") {
    if (s.items.size() != 2) s.fail("expected (Cell K)");
    return ClassTerm::cell_of(parse_class(s.items[1]));
  }
  if (head == "set-of") {
    if (s.items.size() != 3 || !s.items[1].is_atom()) s.fail("expected (set-of x formula)");
    return ClassTerm::comprehension(s.items[1].atom, parse_formula(s.items[2]));
  }
  K kind;
  if (head == "->") kind = K::Arrow;
  else if (head == "-p>") kind = K::PArrow;
  else if (head == "-mu>") kind = K::MuArrow;
  else if (head == "strict-partial") kind = K::StrictPartial;
  else s.fail("unknown class former '" + head + "'");
  if (s.items.size() < 3) s.fail("function space needs argument classes and a result class");
  std::vector<ClassPtr> args;
  for (std::size_t i = 1; i + 1 < s.items.size(); ++i) args.push_back(parse_class(s.items[i]));
  return ClassTerm::function_space(kind, std::move(args), parse_class(s.items.back()));
}

inline FormulaPtr parse_formula(const Sexp& s) {
  using K = Formula::Kind;
  if (s.is_atom()) {
    if (s.atom == "true") return Formula::make(K::True);
    if (s.atom == "false") return Formula::make(K::False);
    s.fail("expected a formula");
  }
  if (s.items.empty() || !s.items[0].is_atom()) s.fail("expected a formula");
  const std::string& head = s.items[0].atom;
  auto need = [&](std::size_t n) {
    if (s.items.size() != n + 1) s.fail("'" + head + "' expects " + std::to_string(n) + " argument(s)");
  };
  auto expr = [&](std::size_t i) { return parse_expr(s.items[i]); };
  if (head == "equiv") {
    need(2);
    return Formula::equiv(expr(1), expr(2));
  }
  if (head == "member" || head == "in") {
    need(2);
    return Formula::member(expr(1), parse_class(s.items[2]));
  }
  if (head == "defined") {
    need(1);
    return Formula::unary_expr(K::Defined, expr(1));
  }
  if (head == "not-expand") {
    need(1);
    return Formula::unary_expr(K::NotExpand, expr(1));
  }
  if (head == "not-write") {
    need(1);
    return Formula::unary_expr(K::NotWrite, expr(1));
  }
  if (head == "not") {
    need(1);
    return Formula::negation(parse_formula(s.items[1]));
  }
  if (head == "and" || head == "or") {
    std::vector<FormulaPtr> kids;
    for (std::size_t i = 1; i < s.items.size(); ++i) kids.push_back(parse_formula(s.items[i]));
    return Formula::connective(head == "and" ? K::And : K::Or, std::move(kids));
  }
  if (head == "implies") {
    need(2);
    return Formula::connective(K::Implies, {parse_formula(s.items[1]), parse_formula(s.items[2])});
  }
  if (head == "forall" || head == "exists" || head == "forall-class") {
    need(2);
    const Sexp& b = s.items[1];
    const K kind = head == "forall" ? K::Forall : head == "exists" ? K::Exists : K::ForallClass;
    if (b.is_atom()) return Formula::quantifier(kind, b.atom, parse_formula(s.items[2]));
    if (kind == K::ForallClass || b.items.size() != 2 || !b.items[0].is_atom())
      b.fail("expected a variable or (variable Class)");
    return Formula::quantifier(kind, b.items[0].atom, parse_formula(s.items[2]), parse_class(b.items[1]));
  }
  if (head == "ctx") {
    need(2);
    ParseHooks hooks;
    hooks.allow_hole = true;
    Expr u = parse_expr(s.items[1], &hooks);
    if (u.hole_count() != 1) s.items[1].fail("context must contain exactly one hole");
    if (!is_univalent(u)) s.items[1].fail("contextual assertion needs a univalent context (hole under lambda)");
    return Formula::ctx(Context::make(u, ContextSort::Univalent), parse_formula(s.items[2]));
  }
  if (head == "subset" || head == "class-equiv") {
    need(2);
    return Formula::classes(head == "subset" ? K::Subset : K::ClassEquiv, parse_class(s.items[1]),
                            parse_class(s.items[2]));
  }
  s.fail("unknown formula '" + head + "'");
}

inline FormulaPtr parse_formula(std::string_view text) { return parse_formula(read_sexp(text)); }
inline ClassPtr parse_class(std::string_view text) { return parse_class(read_sexp(text)); }

/// Free object variables of a formula (class variables excluded).
inline void formula_free_vars(const FormulaPtr& f, std::set<std::string>& bound, std::set<std::string>& out);

inline void class_free_vars(const ClassPtr& k, std::set<std::string>& bound, std::set<std::string>& out) {
  if (!k) return;
  if (k->kind == ClassTerm::Kind::Comprehension) {
    const bool fresh = bound.insert(k->name).second;
    formula_free_vars(k->body, bound, out);
    if (fresh) bound.erase(k->name);
    return;
  }
  for (const auto& a : k->args) class_free_vars(a, bound, out);
  class_free_vars(k->result, bound, out);
}

inline void formula_free_vars(const FormulaPtr& f, std::set<std::string>& bound, std::set<std::string>& out) {
  using K = Formula::Kind;
  auto expr = [&](const Expr& e) {
    for (const auto& x : e.free_vars())
      if (!bound.count(x)) out.insert(x);
  };
  switch (f->kind) {
    case K::Equiv:
      expr(f->e0);
      expr(f->e1);
      return;
    case K::Member:
      expr(f->e0);
      class_free_vars(f->k0, bound, out);
      return;
    case K::Defined:
    case K::NotExpand:
    case K::NotWrite:
      expr(f->e0);
      return;
    case K::Forall:
    case K::Exists: {
      class_free_vars(f->range, bound, out);
      const bool fresh = bound.insert(f->var).second;
      formula_free_vars(f->kids[0], bound, out);
      if (fresh) bound.erase(f->var);
      return;
    }
    case K::Ctx: {
      expr(f->context.expr());
      // Names bound on the path to the hole scope over the body.
      std::vector<std::string> added;
      Expr cur = f->context.expr();
      while (!cur.is(Op::Hole)) {
        std::size_t next = 0;
        for (std::size_t i = 0; i < cur.arity(); ++i)
          if (cur.kid(i).has_hole()) next = i;
        if ((cur.is(Op::Let) || cur.is(Op::LetActor)) && detail::binds_in_kid(cur.op(), next) &&
            bound.insert(cur.name()).second)
          added.push_back(cur.name());
        cur = cur.kid(next);
      }
      formula_free_vars(f->kids[0], bound, out);
      for (const auto& x : added) bound.erase(x);
      return;
    }
    case K::Subset:
    case K::ClassEquiv:
      class_free_vars(f->k0, bound, out);
      class_free_vars(f->k1, bound, out);
      return;
    default:
      for (const auto& k : f->kids) formula_free_vars(k, bound, out);
      return;
  }
}

inline std::vector<std::string> free_vars(const FormulaPtr& f) {
  std::set<std::string> bound;
  std::set<std::string> out;
  formula_free_vars(f, bound, out);
  return {out.begin(), out.end()};
}

// ---------------------------------------------------------------------------
// Checking

struct LogicConfig {
  EnumConfig enums;
  /// Naturals 0..nat_range are tried as arguments for Nat-typed parameters.
  std::uint64_t nat_range = 10;
  /// Cap on argument tuples tested per function-space membership.
  std::size_t max_tuples = 64;
};

/// Registered classes and extra quantifier values.
struct Theory {
  std::map<std::string, ClassPtr> classes;
  std::vector<Expr> pool;

  void define(const std::string& name, const std::string& var, FormulaPtr body) {
    classes[name] = ClassTerm::comprehension(var, std::move(body));
  }
};

struct EffectProfile {
  Verdict not_expand;
  Verdict not_write;
};

/// Bounded satisfaction Γ ⊨ Φ[σ] and the class machinery behind it.
class Checker {
 public:
  explicit Checker(LogicConfig cfg = {}, Theory theory = {})
      : cfg_(std::move(cfg)), theory_(std::move(theory)) {
    cfg_.enums.validate();
  }

  const LogicConfig& config() const { return cfg_; }
  Theory& theory() { return theory_; }

  Verdict satisfies(const Memory& m, const FormulaPtr& phi, const Substitution& s) const {
    ClassEnv env;
    return sat(m, phi, s, env);
  }

  Verdict class_member(const Expr& v, const ClassPtr& k, const Memory& m, const Substitution& s = {}) const {
    ClassEnv env;
    return member_value(v, k, m, s, env);
  }

  /// ⊨ Φ: every enumerated memory, free variables closed by enumerated values.
  Verdict valid(const FormulaPtr& phi0) const {
    // Variables a contextual assertion's context never mentions are
    // quantified explicitly, so the context runs once per remaining tuple.
    FormulaPtr phi = phi0;
    std::vector<std::string> vars;
    for (const auto& x : free_vars(phi0)) {
      if (phi0->kind == Formula::Kind::Ctx && !mentions(phi0->context.expr(), x))
        phi = Formula::quantifier(Formula::Kind::Forall, x, phi);
      else
        vars.push_back(x);
    }
    std::set<std::string> avoid(vars.begin(), vars.end());
    collect_formula_names(phi, avoid);
    Verdict acc;
    for (const Memory& m : enumerate_memories(cfg_.enums, avoid)) {
      const auto vals = quantifier_range(m);
      bool stop = false;
      for_each_tuple(vals, vars.size(), [&](const std::vector<const Expr*>& tuple) {
        Substitution s;
        for (std::size_t i = 0; i < vars.size(); ++i) s.emplace(vars[i], *tuple[i]);
        Verdict v = satisfies(m, phi, s);
        v.cases = 1;
        v.definite = v.is_unknown() ? 0 : 1;
        v.indeterminate = v.is_unknown() ? 1 : 0;
        if (v.is_fails() && !v.witness) {
          Witness w;
          w.memory = m;
          w.subst = s;
          w.note = v.reason;
          v.witness = std::move(w);
        }
        merge_into(acc, v);
        stop = acc.is_fails();
        return !stop;
      });
      if (stop) break;
    }
    return acc;
  }

  /// Φ¬expand and Φ¬write for one closed instance.
  EffectProfile effect_predicates(const Expr& e, const Memory& m, const Substitution& s) const {
    const Expr p = substitute(e, s);
    const Outcome o = eval(Description{m, p}, opts());
    EffectProfile r;
    if (o.is_indeterminate()) {
      r.not_expand = r.not_write = Verdict::unknown("timeout after " + std::to_string(o.steps) + " steps");
      return r;
    }
    if (!o.is_value()) return r;  // never completes: no final memory to compare
    RootSet roots = RootSet::of_cells(m);
    roots.result = o.value();
    bool expands = false;
    for (const auto& c : reachable(o.memory(), roots))
      if (!m.contains(c)) expands = true;
    bool writes = false;
    for (const auto& [c, before] : m)
      if (!(o.memory().get(c) == before)) writes = true;
    auto fail = [&](const char* what) {
      Witness w;
      w.memory = m;
      w.subst = s;
      w.programs = {p};
      w.outcomes = {o};
      w.note = what;
      return Verdict::fails(what, std::move(w));
    };
    r.not_expand = expands ? fail("evaluation expands reachable memory") : Verdict::holds();
    r.not_write = writes ? fail("evaluation changes an existing cell") : Verdict::holds();
    return r;
  }

  /// Effect predicates aggregated over every enumerated model.
  EffectProfile effect_profile(const Expr& e) const {
    EffectProfile acc;
    const auto& vars = e.free_vars();
    std::set<std::string> avoid;
    collect_names(e, avoid);
    for (const Memory& m : enumerate_memories(cfg_.enums, avoid)) {
      const auto vals = quantifier_range(m);
      for_each_tuple(vals, vars.size(), [&](const std::vector<const Expr*>& tuple) {
        Substitution s;
        for (std::size_t i = 0; i < vars.size(); ++i) s.emplace(vars[i], *tuple[i]);
        EffectProfile p = effect_predicates(e, m, s);
        merge_into(acc.not_expand, p.not_expand);
        merge_into(acc.not_write, p.not_write);
        return !(acc.not_expand.is_fails() && acc.not_write.is_fails());
      });
    }
    return acc;
  }

  /// Values the quantifiers range over in memory `m`.
  std::vector<Expr> quantifier_range(const Memory& m) const {
    auto vals = enumerate_values(cfg_.enums, m);
    for (const Expr& v : theory_.pool) vals.push_back(v);
    return vals;
  }

 private:
  using ClassEnv = std::map<std::string, ClassPtr>;

  EvalOptions opts() const {
    EvalOptions o;
    o.max_steps = cfg_.enums.max_steps;
    o.detect_loops = true;
    return o;
  }

  template <class Visit>
  static void for_each_tuple(const std::vector<Expr>& vals, std::size_t arity, Visit&& visit) {
    std::vector<std::size_t> idx(arity, 0);
    std::vector<const Expr*> tuple(arity);
    if (arity > 0 && vals.empty()) return;
    for (;;) {
      for (std::size_t i = 0; i < arity; ++i) tuple[i] = &vals[idx[i]];
      if (!visit(tuple)) return;
      std::size_t i = arity;
      bool carry = true;
      while (carry && i > 0) {
        --i;
        if (++idx[i] < vals.size())
          carry = false;
        else
          idx[i] = 0;
      }
      if (carry) return;
    }
  }

  static void collect_formula_names(const FormulaPtr& f, std::set<std::string>& out) {
    if (!f) return;
    out.insert(f->var);
    collect_names(f->e0, out);
    collect_names(f->e1, out);
    collect_names(f->context.expr(), out);
    for (const auto& k : f->kids) collect_formula_names(k, out);
  }

  // Under a negation a failure turns into success, so its witness is dropped.
  Witness witness_of(const Memory& m, const Substitution& s, std::string note) const {
    Witness w;
    if (quiet_ > 0) return w;
    w.memory = m;
    w.subst = s;
    w.note = std::move(note);
    return w;
  }

  // --- equivalence atoms ------------------------------------------------

  /// Uses for separating two expressions in memory `m`: depth-1 uses plus
  /// probes that read or compare against the cells of `m`.
  std::vector<Context> shallow_uses(const Memory& m) const {
    EnumConfig c = cfg_.enums;
    c.ctx_depth = 1;
    std::vector<Context> uses = enumerate_uses(c);
    const Expr h = Expr::hole();
    for (const auto& [cell, v] : m) {
      (void)v;
      const Expr z = Expr::var(cell);
      for (const Expr& u : {Expr::eq(h, z), Expr::seq({h, Expr::get(z)}),
                            Expr::seq({Expr::app(h, Expr::natural(0)), Expr::get(z)}),
                            Expr::eq(Expr::app(h, Expr::natural(0)), z)})
        uses.push_back(Context::make(u, ContextSort::Reduction));
    }
    return uses;
  }

  /// Looks for a use separating p0 and p1 from memory m.
  std::optional<Witness> separate(const Expr& p0, const Expr& p1, const Memory& m, const Substitution& s) const {
    for (const Context& u : shallow_uses(m)) {
      std::set<std::string> names;
      collect_names(u.expr(), names);
      bool clash = false;
      for (const auto& x : p0.free_vars()) clash = clash || (names.count(x) && !m.contains(x));
      for (const auto& x : p1.free_vars()) clash = clash || (names.count(x) && !m.contains(x));
      if (clash) continue;
      const Expr q0 = plug(u, p0);
      const Expr q1 = plug(u, p1);
      Outcome o0 = eval(Description{m, q0}, opts());
      Outcome o1 = eval(Description{m, q1}, opts());
      if (ciu_compare(o0, o1) == CaseResult::Disagree) {
        Witness w = witness_of(m, s, "use separates the two sides");
        w.use = u;
        w.programs = {q0, q1};
        w.outcomes = {std::move(o0), std::move(o1)};
        return w;
      }
    }
    return std::nullopt;
  }

  /// Equivalence of two values living in the same memory.
  Verdict value_equiv(const Expr& a, const Expr& b, const Memory& m, const Substitution& s) const {
    if (alpha_equal(a, b)) return Verdict::holds();
    const bool ca = a.is(Op::Var) && m.contains(a.name());
    const bool cb = b.is(Op::Var) && m.contains(b.name());
    auto differ = [&](const char* why) { return Verdict::fails(why, witness_of(m, s, why)); };
    if (ca || cb) return differ(ca && cb ? "distinct cells" : "cell against non-cell");
    if (is_ground(a) || is_ground(b)) return differ("different data");
    if (a.is(Op::Pair) && b.is(Op::Pair))
      return kleene_and(value_equiv(a.kid(0), b.kid(0), m, s), value_equiv(a.kid(1), b.kid(1), m, s));
    if (a.is(Op::Pair) != b.is(Op::Pair)) return differ("pair against lambda");
    if (auto w = separate(a, b, m, s)) return Verdict::fails("use separates the two lambdas", std::move(*w));
    return Verdict::unknown("lambdas not identical and no separating use found");
  }

  Verdict equiv_atom(const Memory& m, const Expr& e0, const Expr& e1, const Substitution& s) const {
    const Expr p0 = substitute(e0, s);
    const Expr p1 = substitute(e1, s);
    const VarPredicate cells = m.cell_predicate();
    if (is_value(p0, cells) && is_value(p1, cells)) return value_equiv(p0, p1, m, s);
    Outcome o0 = eval(Description{m, p0}, opts());
    Outcome o1 = eval(Description{m, p1}, opts());
    if (o0.is_indeterminate() || o1.is_indeterminate())
      return Verdict::unknown("timeout evaluating an equivalence atom");
    if (o0.is_undefined() && o1.is_undefined()) return Verdict::holds();
    if (o0.is_value() && o1.is_value() &&
        equal_mod_garbage(o0.memory(), o0.value(), o1.memory(), o1.value(), RootSet::of_cells(m)))
      return Verdict::holds();
    if (o0.is_value() != o1.is_value()) {
      Witness w = witness_of(m, s, "one side is undefined");
      w.programs = {p0, p1};
      w.outcomes = {std::move(o0), std::move(o1)};
      return Verdict::fails("one side is undefined", std::move(w));
    }
    if (auto w = separate(p0, p1, m, s)) return Verdict::fails("use separates the two sides", std::move(*w));
    return Verdict::unknown("not strongly isomorphic and no separating use found");
  }

  // --- classes ------------------------------------------------------------

  ClassPtr resolve(const ClassPtr& k, const ClassEnv& env) const {
    if (k->kind != ClassTerm::Kind::Var) return k;
    if (auto it = env.find(k->name); it != env.end()) return it->second;
    if (auto it = theory_.classes.find(k->name); it != theory_.classes.end()) return it->second;
    throw Error("unknown class '" + k->name + "'");
  }

  /// Candidate arguments for a parameter of class `k`.
  std::vector<Expr> argument_pool(const Memory& m, const ClassPtr& k, const Substitution& s,
                                  const ClassEnv& env, bool* inconclusive) const {
    std::vector<Expr> cands = quantifier_range(m);
    for (std::uint64_t n = 0; n <= cfg_.nat_range; ++n) {
      Expr e = Expr::natural(n);
      if (std::none_of(cands.begin(), cands.end(), [&](const Expr& c) { return c == e; })) cands.push_back(e);
    }
    std::vector<Expr> out;
    for (const Expr& c : cands) {
      const Verdict v = member_value(c, k, m, s, env);
      if (v.is_holds()) out.push_back(c);
      else if (v.is_unknown()) *inconclusive = true;
    }
    return out;
  }

  /// e ∈ K for an arbitrary expression: e must evaluate without visible
  /// effect to a member.
  Verdict member_expr(const Memory& m, const Expr& e, const ClassPtr& k, const Substitution& s,
                      const ClassEnv& env) const {
    const Expr p = substitute(e, s);
    if (is_value(p, m.cell_predicate())) return member_value(p, k, m, s, env);
    Outcome o = eval(Description{m, p}, opts());
    if (o.is_indeterminate()) return Verdict::unknown("timeout evaluating member expression");
    if (o.is_undefined()) {
      Witness w = witness_of(m, s, "expression is undefined");
      w.programs = {p};
      w.outcomes = {o};
      return Verdict::fails("expression is undefined", std::move(w));
    }
    for (const auto& [c, before] : m) {
      const Expr& after = o.memory().get(c);
      if (after == before) continue;
      const Verdict same = value_equiv(before, after, o.memory(), s);
      if (same.is_fails()) {
        Witness w = witness_of(m, s, "evaluation changes cell " + c);
        w.programs = {p};
        w.outcomes = {o};
        return Verdict::fails("evaluation changes an existing cell", std::move(w));
      }
      return Verdict::unknown("evaluation rewrites an existing cell");
    }
    RootSet roots = RootSet::of_cells(m);
    roots.result = o.value();
    for (const auto& c : reachable(o.memory(), roots))
      if (!m.contains(c)) return Verdict::unknown("evaluation expands reachable memory");
    return member_value(o.value(), k, o.memory(), s, env);
  }

  Verdict member_value(const Expr& v, const ClassPtr& k0, const Memory& m, const Substitution& s,
                       const ClassEnv& env) const {
    using K = ClassTerm::Kind;
    const ClassPtr k = resolve(k0, env);
    auto no = [&](const std::string& why) { return Verdict::fails(why, witness_of(m, s, why + ": " + to_string(v))); };
    switch (k->kind) {
      case K::Val:
        return Verdict::holds();
      case K::Nat:
        return v.is(Op::Nat) ? Verdict::holds() : no("not a natural number");
      case K::Nil:
        return v.is(Op::Nil) ? Verdict::holds() : no("not nil");
      case K::Cell:
        return v.is(Op::Var) && m.contains(v.name()) ? Verdict::holds() : no("not a cell");
      case K::CellOf:
        if (!(v.is(Op::Var) && m.contains(v.name()))) return no("not a cell");
        return member_value(m.get(v.name()), k->result, m, s, env);
      case K::Comprehension: {
        Substitution inner = s;
        inner[k->name] = v;
        ClassEnv local = env;
        return sat(m, k->body, inner, local);
      }
      case K::Arrow:
      case K::PArrow:
      case K::MuArrow:
      case K::StrictPartial:
        return member_function(v, *k, m, s, env);
      case K::Var:
        break;
    }
    throw Error("unresolved class");
  }

  Verdict member_function(const Expr& f, const ClassTerm& k, const Memory& m, const Substitution& s,
                          const ClassEnv& env) const {
    using K = ClassTerm::Kind;
    bool inconclusive_pool = false;
    std::vector<std::vector<Expr>> pools;
    for (const auto& a : k.args) pools.push_back(argument_pool(m, a, s, env, &inconclusive_pool));
    Verdict acc;
    bool diverging_arg = false;
    bool timed_out_arg = false;
    std::string timed_out_note;
    std::vector<std::size_t> idx(pools.size(), 0);
    for (const auto& p : pools)
      if (p.empty()) return inconclusive_pool ? Verdict::unknown("no definite arguments") : membership_vacuous(k);
    for (std::size_t tested = 0; tested < cfg_.max_tuples; ++tested) {
      Expr call = f;
      for (std::size_t i = 0; i < pools.size(); ++i) call = Expr::app(call, pools[i][idx[i]]);
      Outcome o = eval(Description{m, call}, opts());
      Verdict v;
      if (o.is_indeterminate()) {
        timed_out_arg = true;
        timed_out_note = to_string(call);
        v = Verdict::unknown("timeout applying " + to_string(call));
        if (k.kind == K::StrictPartial) v = Verdict::holds();
      } else if (o.is_undefined()) {
        diverging_arg = true;
        if (k.kind == K::Arrow) {
          Witness w = witness_of(m, s, "application is undefined");
          w.programs = {call};
          w.outcomes = {o};
          v = Verdict::fails("application is undefined", std::move(w));
        }
      } else if (k.kind == K::MuArrow) {
        v = member_value(o.value(), k.result, o.memory(), s, env);
      } else if (k.kind == K::Arrow) {
        v = member_expr(m, call, k.result, {}, env);
      } else {
        v = member_value(o.value(), k.result, o.memory(), s, env);
        if (v.is_fails() && !(o.memory() == m)) v = Verdict::unknown("result outside codomain after effects");
      }
      if (v.is_fails() && v.witness && v.witness->programs.empty()) {
        v.witness->programs = {call};
        v.witness->outcomes = {o};
      }
      merge_into(acc, v);
      if (acc.is_fails()) return acc;
      std::size_t i = pools.size();
      bool carry = true;
      while (carry && i > 0) {
        --i;
        if (++idx[i] < pools[i].size())
          carry = false;
        else
          idx[i] = 0;
      }
      if (carry) break;
    }
    if (k.kind == K::StrictPartial) {
      if (acc.is_unknown()) return acc;
      if (diverging_arg) return acc;
      if (timed_out_arg) {
        Verdict v = Verdict::holds();
        v.reason = "modulo budget: " + timed_out_note + " did not finish within " +
                   std::to_string(cfg_.enums.max_steps) + " steps";
        return v;
      }
      return Verdict::unknown("no tested argument diverges within the budget");
    }
    if (acc.is_holds() && inconclusive_pool) return Verdict::unknown("argument class membership undecided");
    return acc;
  }

  static bool mentions(const Expr& e, const std::string& x) {
    std::set<std::string> names;
    collect_names(e, names);
    return names.count(x) > 0;
  }

  static Verdict membership_vacuous(const ClassTerm& k) {
    if (k.kind == ClassTerm::Kind::StrictPartial) return Verdict::unknown("no arguments to diverge on");
    return Verdict::holds();
  }

  // --- contextual assertions ---------------------------------------------

  struct HoleResult {
    enum class Kind { Reached, NotReached, Timeout } kind = Kind::NotReached;
    Memory memory;
    Substitution env;
  };

  /// Runs m; U^σ until control reaches the hole.
  HoleResult run_to_hole(const Memory& m, const Context& u, const Substitution& s) const {
    Description d{m, substitute(u.expr(), s)};
    if (!s.empty() && !d.expr.has_hole()) throw Error("hole lost during substitution");
    // The hole records σ and every let binding crossed on the way.
    std::vector<Frame> path;
    Description snapshot;
    bool have_snapshot = false;
    std::size_t power = 1;
    for (std::size_t steps = 0;; ++steps) {
      path.clear();
      const VarPredicate cells = d.memory.cell_predicate();
      const DecompKind kind = detail::find_focus(d.expr, cells, path);
      if (kind != DecompKind::Redex) return HoleResult{HoleResult::Kind::NotReached, {}, {}};
      const Expr& focus = focus_of(d.expr, path);
      if (focus.is(Op::Hole)) return HoleResult{HoleResult::Kind::Reached, d.memory, focus.hole_env()};
      if (steps >= cfg_.enums.max_steps) return HoleResult{HoleResult::Kind::Timeout, {}, {}};
      auto next = contract(focus, &d.memory, d.expr);
      if (!next) return HoleResult{HoleResult::Kind::NotReached, {}, {}};
      d.expr = rebuild(path, std::move(*next));
      if (have_snapshot && d == snapshot) return HoleResult{HoleResult::Kind::NotReached, {}, {}};
      if (steps + 1 == power) {
        snapshot = d;
        have_snapshot = true;
        power *= 2;
      }
    }
  }

  // --- formulas -----------------------------------------------------------

  Verdict sat(const Memory& m, const FormulaPtr& f, const Substitution& s, ClassEnv& env) const {
    using K = Formula::Kind;
    switch (f->kind) {
      case K::True:
        return Verdict::holds();
      case K::False:
        return Verdict::fails("false", witness_of(m, s, "false"));
      case K::Equiv:
        return equiv_atom(m, f->e0, f->e1, s);
      case K::Member:
        return member_expr(m, f->e0, f->k0, s, env);
      case K::Defined: {
        const Expr p = substitute(f->e0, s);
        const Outcome o = eval(Description{m, p}, opts());
        if (o.is_indeterminate()) return Verdict::unknown("timeout");
        if (o.is_value()) return Verdict::holds();
        Witness w = witness_of(m, s, "undefined");
        w.programs = {p};
        w.outcomes = {o};
        return Verdict::fails("undefined", std::move(w));
      }
      case K::NotExpand:
        return effect_predicates(f->e0, m, s).not_expand;
      case K::NotWrite:
        return effect_predicates(f->e0, m, s).not_write;
      case K::Not: {
        ++quiet_;
        Verdict v = sat(m, f->kids[0], s, env);
        --quiet_;
        return negate(v);
      }
      case K::And: {
        Verdict acc = Verdict::holds();
        for (const auto& k : f->kids) {
          acc = kleene_and(acc, sat(m, k, s, env));
          if (acc.is_fails()) break;
        }
        return acc;
      }
      case K::Or: {
        Verdict acc = Verdict::fails("empty disjunction", witness_of(m, s, "no disjunct holds"));
        for (const auto& k : f->kids) {
          acc = kleene_or(acc, sat(m, k, s, env));
          if (acc.is_holds()) break;
        }
        return acc;
      }
      case K::Implies: {
        const Verdict a = sat(m, f->kids[0], s, env);
        if (a.is_fails()) return Verdict::holds();
        const Verdict b = sat(m, f->kids[1], s, env);
        return kleene_or(negate(a), b);
      }
      case K::Forall:
      case K::Exists: {
        const bool all = f->kind == K::Forall;
        Verdict acc = all ? Verdict::holds() : Verdict::fails("no witness value", witness_of(m, s, "no witness value"));
        const FormulaPtr& body = f->kids[0];
        if (!f->range && body->kind == K::Ctx && !mentions(body->context.expr(), f->var)) {
          // The context does not depend on the quantified variable, so run it
          // once; the range is still the values of the outer memory.
          Substitution outer = s;
          outer.erase(f->var);
          const HoleResult r = run_to_hole(m, body->context, outer);
          if (r.kind == HoleResult::Kind::NotReached) return Verdict::holds();
          if (r.kind == HoleResult::Kind::Timeout) return Verdict::unknown("timeout before reaching the hole");
          Substitution at_hole = r.env;
          for (const auto& [x, v] : outer) at_hole.emplace(x, v);
          // Conjuncts that do not mention the variable are checked once.
          const FormulaPtr& phi = body->kids[0];
          std::vector<FormulaPtr> dependent;
          std::optional<Verdict> fixed;
          if (phi->kind == K::And) {
            std::vector<FormulaPtr> independent;
            for (const auto& k : phi->kids) {
              std::set<std::string> none;
              std::set<std::string> fv;
              formula_free_vars(k, none, fv);
              (fv.count(f->var) ? dependent : independent).push_back(k);
            }
            if (!independent.empty())
              fixed = sat(r.memory, Formula::connective(K::And, std::move(independent)), at_hole, env);
          }
          const FormulaPtr per_value =
              fixed ? Formula::connective(K::And, std::move(dependent)) : phi;
          for (const Expr& v : quantifier_range(m)) {
            Substitution inner = at_hole;
            inner[f->var] = v;
            Verdict b = sat(r.memory, per_value, inner, env);
            if (fixed) b = kleene_and(b, *fixed);
            acc = all ? kleene_and(acc, b) : kleene_or(acc, b);
            if (all ? acc.is_fails() : acc.is_holds()) break;
          }
          return acc;
        }
        for (const Expr& v : quantifier_range(m)) {
          if (f->range) {
            const Verdict in = member_value(v, f->range, m, s, env);
            if (in.is_fails()) continue;
            if (in.is_unknown()) {
              acc = all ? kleene_and(acc, in) : kleene_or(acc, in);
              continue;
            }
          }
          Substitution inner = s;
          inner[f->var] = v;
          const Verdict b = sat(m, f->kids[0], inner, env);
          acc = all ? kleene_and(acc, b) : kleene_or(acc, b);
          if (all ? acc.is_fails() : acc.is_holds()) break;
        }
        return acc;
      }
      case K::ForallClass: {
        Verdict acc = Verdict::holds();
        const auto saved = env.find(f->var) == env.end() ? nullptr : env[f->var];
        for (const ClassPtr& c : class_pool()) {
          env[f->var] = c;
          acc = kleene_and(acc, sat(m, f->kids[0], s, env));
          if (acc.is_fails()) {
            if (acc.witness) acc.witness->note += " with " + f->var + " = " + to_string(c);
            break;
          }
        }
        if (saved) env[f->var] = saved;
        else env.erase(f->var);
        return acc;
      }
      case K::Ctx: {
        const HoleResult r = run_to_hole(m, f->context, s);
        switch (r.kind) {
          case HoleResult::Kind::NotReached:
            return Verdict::holds();
          case HoleResult::Kind::Timeout:
            return Verdict::unknown("timeout before reaching the hole");
          case HoleResult::Kind::Reached:
            break;
        }
        Substitution inner = r.env;
        for (const auto& [x, v] : s) inner.emplace(x, v);
        return sat(r.memory, f->kids[0], inner, env);
      }
      case K::Subset:
        return subset(m, f->k0, f->k1, s, env);
      case K::ClassEquiv:
        return kleene_and(subset(m, f->k0, f->k1, s, env), subset(m, f->k1, f->k0, s, env));
    }
    return Verdict::unknown("unsupported formula");
  }

  Verdict subset(const Memory& m, const ClassPtr& a, const ClassPtr& b, const Substitution& s,
                 const ClassEnv& env) const {
    Verdict acc = Verdict::holds();
    for (const Expr& v : quantifier_range(m)) {
      const Verdict in_a = member_value(v, a, m, s, env);
      if (in_a.is_fails()) continue;
      const Verdict in_b = member_value(v, b, m, s, env);
      acc = kleene_and(acc, kleene_or(negate(in_a), in_b));
      if (acc.is_fails()) {
        acc.witness = witness_of(m, s, "value in the first class but not the second: " + to_string(v));
        break;
      }
    }
    return acc;
  }

  std::vector<ClassPtr> class_pool() const {
    using K = ClassTerm::Kind;
    std::vector<ClassPtr> out = {ClassTerm::named(K::Val), ClassTerm::named(K::Nat), ClassTerm::named(K::Nil),
                                 ClassTerm::named(K::Cell), ClassTerm::cell_of(ClassTerm::named(K::Nat)),
                                 ClassTerm::cell_of(ClassTerm::named(K::Nil))};
    for (const auto& [name, c] : theory_.classes) out.push_back(c);
    return out;
  }

  LogicConfig cfg_;
  Theory theory_;
  mutable int quiet_ = 0;
};

/// Reads formula files: `(defclass Name x F)`, `(pool v ...)`, `(assert NAME F)`
/// or a bare formula.
struct FormulaFile {
  Theory theory;
  std::vector<std::pair<std::string, FormulaPtr>> assertions;
};

inline FormulaFile parse_formula_file(std::string_view text) {
  FormulaFile out;
  std::size_t anonymous = 0;
  for (const Sexp& s : read_sexps(text)) {
    if (s.has_head("defclass")) {
      if (s.items.size() != 4 || !s.items[1].is_atom() || !s.items[2].is_atom())
        s.fail("expected (defclass Name x formula)");
      out.theory.define(s.items[1].atom, s.items[2].atom, parse_formula(s.items[3]));
    } else if (s.has_head("pool")) {
      for (std::size_t i = 1; i < s.items.size(); ++i) {
        Expr v = parse_expr(s.items[i]);
        if (!is_value(v) || !v.free_vars().empty()) s.items[i].fail("pool entries must be closed values");
        out.theory.pool.push_back(std::move(v));
      }
    } else if (s.has_head("assert")) {
      if (s.items.size() != 3 || !s.items[1].is_atom()) s.fail("expected (assert NAME formula)");
      out.assertions.emplace_back(s.items[1].atom, parse_formula(s.items[2]));
    } else {
      out.assertions.emplace_back("formula-" + std::to_string(++anonymous), parse_formula(s));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Principles of contextual assertions

struct PrincipleReport {
  std::string name;
  std::size_t instances = 0;
  std::size_t applicable = 0;  // instances whose premise held
  std::size_t violations = 0;
  std::string first_violation;
};

struct PrincipleOptions {
  std::size_t instances = 100;
  std::uint64_t seed = 0;
};

/// Random formulas over a small set of free variables, biased toward
/// families that are valid so the principles' premises fire often.
class FormulaGen {
 public:
  FormulaGen(TermGen& gen, std::vector<std::string> vars) : gen_(gen), vars_(std::move(vars)) {}

  Expr term(std::size_t depth = 2) { return gen_.expr(depth, vars_); }

  /// An expression equivalent to `e` by construction.
  Expr rewrite(const Expr& e) {
    std::set<std::string> avoid;
    collect_names(e, avoid);
    const std::string w = fresh_name("w", [&](const std::string& n) { return avoid.count(n) > 0; });
    switch (gen_.below(5)) {
      case 0: return Expr::seq({Expr::nil(), e});
      case 1: return Expr::let(w, e, Expr::var(w));
      case 2: return Expr::if_(Expr::t(), e, Expr::nil());
      case 3: return Expr::fst(Expr::pair(e, Expr::nil()));
      default: return Expr::app(Expr::lambda(w, Expr::var(w)), e);
    }
  }

  FormulaPtr formula(std::size_t depth = 2) {
    using K = Formula::Kind;
    const std::size_t pick = gen_.below(depth == 0 ? 5 : 9);
    switch (pick) {
      case 0: {
        Expr e = term();
        return Formula::equiv(e, rewrite(e));
      }
      case 1: return Formula::equiv(term(), term());
      case 2: {
        static const ClassTerm::Kind named[] = {ClassTerm::Kind::Val, ClassTerm::Kind::Nat, ClassTerm::Kind::Nil,
                                                ClassTerm::Kind::Cell};
        return Formula::member(gen_.leaf(vars_), ClassTerm::named(named[gen_.below(4)]));
      }
      case 3: return Formula::unary_expr(K::Defined, term());
      case 4: {
        Expr v = gen_.leaf(vars_);
        return Formula::equiv(Expr::eq(v, v), Expr::t());
      }
      case 5: return Formula::negation(formula(depth - 1));
      case 6: return Formula::connective(K::And, {formula(depth - 1), formula(depth - 1)});
      case 7: {
        FormulaPtr a = formula(depth - 1);
        return Formula::connective(K::Or, {a, gen_.chance(50) ? Formula::negation(a) : formula(depth - 1)});
      }
      default: return Formula::connective(K::Implies, {formula(depth - 1), formula(depth - 1)});
    }
  }

  Context context(std::size_t depth = 2) {
    for (;;) {
      Expr u = gen_.univalent_context(depth, vars_);
      if (u.hole_count() == 1 && is_univalent(u)) return Context::make(u, ContextSort::Univalent);
    }
  }

 private:
  TermGen& gen_;
  std::vector<std::string> vars_;
};

/// Meta-tests of the three principles of contextual assertions:
///   1. if Φ is valid then U[[Φ]] is valid;
///   2. if U[[e0 ≅ e1]] is valid then U[e0] and U[e1] are not separated by CIU testing;
///   3. U0[[U1[[Φ]]]] and (U0[U1])[[Φ]] get the same verdict in every model.
inline PrincipleReport check_principle(int which, const Checker& checker, const PrincipleOptions& opts = {}) {
  if (which < 1 || which > 3) throw Error("principle index must be 1, 2 or 3");
  static const char* names[] = {"", "necessitation", "ctx-equivalence", "ctx-composition"};
  PrincipleReport report;
  report.name = names[which];
  const EnumConfig& ec = checker.config().enums;
  for (std::size_t i = 0; i < opts.instances; ++i) {
    TermGen gen(opts.seed * 1000003ULL + static_cast<std::uint64_t>(which) * 7919ULL + i);
    FormulaGen fg(gen, {"a", "b"});
    ++report.instances;
    auto violation = [&](std::string what) {
      if (report.violations++ == 0) report.first_violation = std::move(what);
    };
    if (which == 1) {
      const FormulaPtr phi = fg.formula();
      const Context u = fg.context();
      if (!checker.valid(phi).is_holds()) continue;
      ++report.applicable;
      const FormulaPtr boxed = Formula::ctx(u, phi);
      const Verdict v = checker.valid(boxed);
      if (v.is_fails()) violation(to_string(boxed) + ": " + headline(v));
    } else if (which == 2) {
      const Context u = fg.context();
      const Expr e0 = fg.term();
      const Expr e1 = gen.chance(60) ? fg.rewrite(e0) : fg.term();
      const FormulaPtr boxed = Formula::ctx(u, Formula::equiv(e0, e1));
      if (!checker.valid(boxed).is_holds()) continue;
      ++report.applicable;
      EnumConfig c = ec;
      c.max_cases = std::min<std::size_t>(c.max_cases, 2000);
      c.seed = opts.seed + i;
      const Verdict v = ciu_test(plug(u, e0), plug(u, e1), c);
      if (v.is_fails()) violation(to_string(boxed) + ": " + headline(v));
    } else {
      const Context u0 = fg.context(1);
      const Context u1 = fg.context(1);
      const FormulaPtr phi = fg.formula(1);
      const FormulaPtr nested = Formula::ctx(u0, Formula::ctx(u1, phi));
      const FormulaPtr composed = Formula::ctx(compose(u0, u1), phi);
      const auto vars = free_vars(Formula::connective(Formula::Kind::And, {nested, composed}));
      std::set<std::string> avoid(vars.begin(), vars.end());
      collect_names(compose(u0, u1).expr(), avoid);
      ++report.applicable;
      bool bad = false;
      for (const Memory& m : enumerate_memories(ec, avoid)) {
        const auto vals = checker.quantifier_range(m);
        // One closing substitution per value index keeps the cost linear.
        for (std::size_t k = 0; k < vals.size() && !bad; ++k) {
          Substitution s;
          for (std::size_t j = 0; j < vars.size(); ++j) s.emplace(vars[j], vals[(k + j) % vals.size()]);
          const Verdict a = checker.satisfies(m, nested, s);
          const Verdict b = checker.satisfies(m, composed, s);
          if (a.kind != b.kind) {
            bad = true;
            violation(to_string(nested) + " in " + render_memory(m) + ": " + headline(a) + " vs " + headline(b));
          }
        }
        if (bad) break;
      }
    }
  }
  return report;
}

}  // namespace effects
