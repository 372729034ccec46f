#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "effects/sexp.hpp"

namespace effects {

/// Expression constructors. `Hole` only occurs inside contexts.
enum class Op : std::uint8_t {
  Var,
  Nil,
  True,
  Nat,
  Lambda,
  App,
  Let,
  Seq,
  If,
  Mk,
  Get,
  Set,
  Eq,
  CellP,
  Pair,
  Fst,
  Snd,
  Add1,
  Sub1,
  NatP,
  Send,
  Become,
  LetActor,
  Event,
  Hole,
};

class Expr;
struct ExprNode;

/// Finite map from variable names to (value) expressions.
using Substitution = std::map<std::string, Expr, std::less<>>;

/// Decides which variables count as values (cell names, actor names, or any
/// variable when computing symbolically).
using VarPredicate = std::function<bool(const std::string&)>;

inline const VarPredicate& all_vars_are_values() {
  static const VarPredicate pred = [](const std::string&) { return true; };
  return pred;
}

/// Immutable, shared expression tree. Copies are cheap.
class Expr {
 public:
  Expr();

  Op op() const;
  const std::string& name() const;
  std::uint64_t nat() const;
  const std::vector<Expr>& kids() const;
  const Expr& kid(std::size_t i) const { return kids()[i]; }
  std::size_t arity() const { return kids().size(); }

  /// Sorted, duplicate-free free variables.
  const std::vector<std::string>& free_vars() const;
  bool has_free(std::string_view x) const;
  std::size_t hole_count() const;
  bool has_hole() const { return hole_count() != 0; }
  std::size_t size() const;
  /// Pending bindings carried by a hole (see logic::satisfies).
  const Substitution& hole_env() const;

  bool is(Op o) const { return op() == o; }
  bool same_node(const Expr& other) const { return node_ == other.node_; }

  static Expr var(std::string name);
  static Expr nil();
  static Expr t();
  static Expr natural(std::uint64_t n);
  static Expr lambda(std::string param, Expr body);
  static Expr app(Expr fn, Expr arg);
  static Expr let(std::string var, Expr bound, Expr body);
  static Expr seq(std::vector<Expr> items);
  static Expr if_(Expr test, Expr then, Expr otherwise);
  static Expr mk(Expr arg) { return unary(Op::Mk, std::move(arg)); }
  static Expr get(Expr arg) { return unary(Op::Get, std::move(arg)); }
  static Expr set(Expr cell, Expr val) { return binary(Op::Set, std::move(cell), std::move(val)); }
  static Expr eq(Expr a, Expr b) { return binary(Op::Eq, std::move(a), std::move(b)); }
  static Expr cellp(Expr arg) { return unary(Op::CellP, std::move(arg)); }
  static Expr pair(Expr a, Expr b) { return binary(Op::Pair, std::move(a), std::move(b)); }
  static Expr fst(Expr arg) { return unary(Op::Fst, std::move(arg)); }
  static Expr snd(Expr arg) { return unary(Op::Snd, std::move(arg)); }
  static Expr add1(Expr arg) { return unary(Op::Add1, std::move(arg)); }
  static Expr sub1(Expr arg) { return unary(Op::Sub1, std::move(arg)); }
  static Expr natp(Expr arg) { return unary(Op::NatP, std::move(arg)); }
  static Expr send(Expr target, Expr payload) {
    return binary(Op::Send, std::move(target), std::move(payload));
  }
  static Expr become(Expr behavior) { return unary(Op::Become, std::move(behavior)); }
  static Expr letactor(std::string var, Expr behavior, Expr body);
  static Expr event(std::string tag = {});
  static Expr hole(Substitution env = {});

  /// Rebuilds a node of the same shape with new children.
  Expr with_kids(std::vector<Expr> kids) const;
  Expr with_name(std::string name, std::vector<Expr> kids) const;

  static Expr unary(Op op, Expr arg);
  static Expr binary(Op op, Expr a, Expr b);

 private:
  explicit Expr(std::shared_ptr<const ExprNode> node) : node_(std::move(node)) {}
  static Expr make(Op op, std::string name, std::uint64_t nat, std::vector<Expr> kids,
                   Substitution env = {});

  std::shared_ptr<const ExprNode> node_;
};

struct ExprNode {
  Op op = Op::Nil;
  std::string name;
  std::uint64_t nat = 0;
  std::vector<Expr> kids;
  Substitution env;
  std::vector<std::string> free;
  std::size_t holes = 0;
  std::size_t size = 1;
};

namespace detail {

inline std::vector<std::string> merge_sorted(const std::vector<std::string>& a,
                                             const std::vector<std::string>& b) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  std::vector<std::string> out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

inline std::vector<std::string> without(std::vector<std::string> v, const std::string& x) {
  auto it = std::lower_bound(v.begin(), v.end(), x);
  if (it != v.end() && *it == x) v.erase(it);
  return v;
}

inline bool binds_in_kid(Op op, std::size_t index) {
  switch (op) {
    case Op::Lambda:
      return true;
    case Op::Let:
      return index == 1;
    case Op::LetActor:
      return true;
    default:
      return false;
  }
}

inline const std::shared_ptr<const ExprNode>& nil_node() {
  static const std::shared_ptr<const ExprNode> node = [] {
    auto n = std::make_shared<ExprNode>();
    n->op = Op::Nil;
    return std::shared_ptr<const ExprNode>(n);
  }();
  return node;
}

}  // namespace detail

inline Expr::Expr() : node_(detail::nil_node()) {}

inline Op Expr::op() const { return node_->op; }
inline const std::string& Expr::name() const { return node_->name; }
inline std::uint64_t Expr::nat() const { return node_->nat; }
inline const std::vector<Expr>& Expr::kids() const { return node_->kids; }
inline const std::vector<std::string>& Expr::free_vars() const { return node_->free; }
inline bool Expr::has_free(std::string_view x) const {
  return std::binary_search(node_->free.begin(), node_->free.end(), x, std::less<>{});
}
inline std::size_t Expr::hole_count() const { return node_->holes; }
inline std::size_t Expr::size() const { return node_->size; }
inline const Substitution& Expr::hole_env() const { return node_->env; }

inline Expr Expr::make(Op op, std::string name, std::uint64_t nat, std::vector<Expr> kids,
                       Substitution env) {
  auto n = std::make_shared<ExprNode>();
  n->op = op;
  n->name = std::move(name);
  n->nat = nat;
  n->kids = std::move(kids);
  n->env = std::move(env);
  for (std::size_t i = 0; i < n->kids.size(); ++i) {
    const ExprNode& k = *n->kids[i].node_;
    n->holes += k.holes;
    n->size += k.size;
    if (detail::binds_in_kid(op, i))
      n->free = detail::merge_sorted(n->free, detail::without(k.free, n->name));
    else
      n->free = detail::merge_sorted(n->free, k.free);
  }
  if (op == Op::Var) n->free = {n->name};
  if (op == Op::Hole) {
    n->holes = 1;
    for (const auto& [x, v] : n->env) n->free = detail::merge_sorted(n->free, v.free_vars());
  }
  return Expr(std::shared_ptr<const ExprNode>(std::move(n)));
}

inline Expr Expr::var(std::string name) { return make(Op::Var, std::move(name), 0, {}); }
inline Expr Expr::nil() { return Expr(); }
inline Expr Expr::t() {
  static const Expr e = make(Op::True, {}, 0, {});
  return e;
}
inline Expr Expr::natural(std::uint64_t n) { return make(Op::Nat, {}, n, {}); }
inline Expr Expr::lambda(std::string param, Expr body) {
  return make(Op::Lambda, std::move(param), 0, {std::move(body)});
}
inline Expr Expr::app(Expr fn, Expr arg) { return binary(Op::App, std::move(fn), std::move(arg)); }
inline Expr Expr::let(std::string var, Expr bound, Expr body) {
  return make(Op::Let, std::move(var), 0, {std::move(bound), std::move(body)});
}
inline Expr Expr::seq(std::vector<Expr> items) {
  if (items.empty()) throw Error("seq requires at least one subexpression");
  return make(Op::Seq, {}, 0, std::move(items));
}
inline Expr Expr::if_(Expr test, Expr then, Expr otherwise) {
  return make(Op::If, {}, 0, {std::move(test), std::move(then), std::move(otherwise)});
}
inline Expr Expr::letactor(std::string var, Expr behavior, Expr body) {
  return make(Op::LetActor, std::move(var), 0, {std::move(behavior), std::move(body)});
}
inline Expr Expr::event(std::string tag) { return make(Op::Event, std::move(tag), 0, {}); }
inline Expr Expr::hole(Substitution env) { return make(Op::Hole, {}, 0, {}, std::move(env)); }
inline Expr Expr::unary(Op op, Expr arg) { return make(op, {}, 0, {std::move(arg)}); }
inline Expr Expr::binary(Op op, Expr a, Expr b) {
  return make(op, {}, 0, {std::move(a), std::move(b)});
}
inline Expr Expr::with_kids(std::vector<Expr> kids) const {
  return make(op(), name(), nat(), std::move(kids), hole_env());
}
inline Expr Expr::with_name(std::string name, std::vector<Expr> kids) const {
  return make(op(), std::move(name), nat(), std::move(kids), hole_env());
}

/// Exact structural equality (bound names significant).
inline bool operator==(const Expr& a, const Expr& b) {
  if (a.same_node(b)) return true;
  if (a.op() != b.op() || a.nat() != b.nat() || a.name() != b.name() || a.arity() != b.arity() ||
      a.size() != b.size())
    return false;
  for (std::size_t i = 0; i < a.arity(); ++i)
    if (!(a.kid(i) == b.kid(i))) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Surface syntax

inline std::string_view keyword(Op op) {
  switch (op) {
    case Op::Lambda: return "lambda";
    case Op::App: return "app";
    case Op::Let: return "let";
    case Op::Seq: return "seq";
    case Op::If: return "if";
    case Op::Mk: return "mk";
    case Op::Get: return "get";
    case Op::Set: return "set";
    case Op::Eq: return "eq";
    case Op::CellP: return "cell?";
    case Op::Pair: return "pair";
    case Op::Fst: return "fst";
    case Op::Snd: return "snd";
    case Op::Add1: return "add1";
    case Op::Sub1: return "sub1";
    case Op::NatP: return "nat?";
    case Op::Send: return "send";
    case Op::Become: return "become";
    case Op::LetActor: return "letactor";
    case Op::Event: return "event";
    case Op::Nil: return "nil";
    case Op::True: return "t";
    case Op::Hole: return "_";
    case Op::Var:
    case Op::Nat:
      return "";
  }
  return "";
}

inline std::optional<Op> op_for_keyword(std::string_view word) {
  static const std::map<std::string, Op, std::less<>> table = [] {
    std::map<std::string, Op, std::less<>> m;
    for (Op op : {Op::Lambda, Op::App, Op::Let, Op::Seq, Op::If, Op::Mk, Op::Get, Op::Set, Op::Eq,
                  Op::CellP, Op::Pair, Op::Fst, Op::Snd, Op::Add1, Op::Sub1, Op::NatP, Op::Send,
                  Op::Become, Op::LetActor, Op::Event})
      m.emplace(std::string(keyword(op)), op);
    return m;
  }();
  auto it = table.find(word);
  if (it == table.end()) return std::nullopt;
  return it->second;
}

inline bool is_reserved_word(std::string_view word) {
  return word == "nil" || word == "t" || word == "_" || op_for_keyword(word).has_value();
}

inline void print_expr(const Expr& e, std::string& out) {
  switch (e.op()) {
    case Op::Var:
      out += e.name();
      return;
    case Op::Nil:
      out += "nil";
      return;
    case Op::True:
      out += "t";
      return;
    case Op::Nat:
      out += std::to_string(e.nat());
      return;
    case Op::Hole:
      out += "_";
      return;
    case Op::Event:
      out += "(event";
      if (!e.name().empty()) {
        out += ' ';
        out += e.name();
      }
      out += ')';
      return;
    case Op::Lambda:
      out += "(lambda (";
      out += e.name();
      out += ") ";
      print_expr(e.kid(0), out);
      out += ')';
      return;
    case Op::Let:
    case Op::LetActor:
      out += '(';
      out += keyword(e.op());
      out += " ((";
      out += e.name();
      out += ' ';
      print_expr(e.kid(0), out);
      out += ")) ";
      print_expr(e.kid(1), out);
      out += ')';
      return;
    default:
      out += '(';
      out += keyword(e.op());
      for (const Expr& k : e.kids()) {
        out += ' ';
        print_expr(k, out);
      }
      out += ')';
      return;
  }
}

inline std::string to_string(const Expr& e) {
  std::string out;
  print_expr(e, out);
  return out;
}

/// Extension points used by schema and formula readers layered on the
/// expression grammar.
struct ParseHooks {
  /// Consulted first on every sub-s-expression; a value short-circuits parsing.
  std::function<std::optional<Expr>(const Sexp&)> rewrite;
  bool allow_hole = false;
};

inline Expr parse_expr(const Sexp& s, const ParseHooks* hooks = nullptr);

namespace detail {

inline std::string parse_binder_name(const Sexp& s) {
  if (!s.is_atom() || s.is_numeral() || is_reserved_word(s.atom)) s.fail("expected a variable name");
  return s.atom;
}

inline std::pair<std::string, const Sexp*> parse_single_binding(const Sexp& s) {
  // ((x e))
  if (!s.is_list() || s.items.size() != 1 || !s.items[0].is_list() ||
      s.items[0].items.size() != 2)
    s.fail("expected a binding list of the form ((var expr))");
  return {parse_binder_name(s.items[0].items[0]), &s.items[0].items[1]};
}

inline std::uint64_t parse_numeral(const Sexp& s) {
  try {
    return std::stoull(s.atom);
  } catch (const std::exception&) {
    s.fail("numeral out of range");
  }
}

}  // namespace detail

inline Expr parse_expr(const Sexp& s, const ParseHooks* hooks) {
  if (hooks && hooks->rewrite)
    if (auto r = hooks->rewrite(s)) return *r;
  auto sub = [&](const Sexp& k) { return parse_expr(k, hooks); };
  if (s.is_atom()) {
    if (s.is_numeral()) return Expr::natural(detail::parse_numeral(s));
    if (s.atom == "nil") return Expr::nil();
    if (s.atom == "t") return Expr::t();
    if (s.atom == "_") {
      if (!hooks || !hooks->allow_hole) s.fail("hole '_' is only allowed in contexts");
      return Expr::hole();
    }
    if (op_for_keyword(s.atom)) s.fail("keyword '" + s.atom + "' used as a variable");
    if (s.atom.empty() || std::isdigit(static_cast<unsigned char>(s.atom[0])))
      s.fail("malformed atom '" + s.atom + "'");
    return Expr::var(s.atom);
  }
  if (s.items.empty()) s.fail("empty form");
  const Sexp& head = s.items.front();
  const std::size_t argc = s.items.size() - 1;
  if (head.is_list()) {
    // Implicit application: ((lambda (x) x) nil).
    if (argc != 1) s.fail("implicit application takes exactly one argument");
    return Expr::app(sub(head), sub(s.items[1]));
  }
  const auto op = op_for_keyword(head.atom);
  if (!op) head.fail("unknown operator '" + head.atom + "'");
  auto need = [&](std::size_t n) {
    if (argc != n)
      s.fail("'" + head.atom + "' expects " + std::to_string(n) + " argument(s), got " +
             std::to_string(argc));
  };
  switch (*op) {
    case Op::Lambda: {
      need(2);
      const Sexp& params = s.items[1];
      if (!params.is_list() || params.items.size() != 1)
        params.fail("lambda takes exactly one parameter: (lambda (x) body)");
      return Expr::lambda(detail::parse_binder_name(params.items[0]), sub(s.items[2]));
    }
    case Op::Let:
    case Op::LetActor: {
      need(2);
      auto [x, bound] = detail::parse_single_binding(s.items[1]);
      if (*op == Op::Let) return Expr::let(x, sub(*bound), sub(s.items[2]));
      return Expr::letactor(x, sub(*bound), sub(s.items[2]));
    }
    case Op::Seq: {
      if (argc == 0) s.fail("seq requires at least one subexpression");
      std::vector<Expr> items;
      for (std::size_t i = 1; i < s.items.size(); ++i) items.push_back(sub(s.items[i]));
      return Expr::seq(std::move(items));
    }
    case Op::If:
      need(3);
      return Expr::if_(sub(s.items[1]), sub(s.items[2]), sub(s.items[3]));
    case Op::Event:
      if (argc > 1) s.fail("event takes at most one tag");
      if (argc == 1) {
        if (!s.items[1].is_atom() || s.items[1].is_numeral()) s.items[1].fail("event tag must be a symbol");
        return Expr::event(s.items[1].atom);
      }
      return Expr::event();
    case Op::App:
    case Op::Set:
    case Op::Eq:
    case Op::Pair:
    case Op::Send:
      need(2);
      return Expr::binary(*op, sub(s.items[1]), sub(s.items[2]));
    default:
      need(1);
      return Expr::unary(*op, sub(s.items[1]));
  }
}

/// Parses one expression of the surface grammar.
inline Expr parse(std::string_view text) { return parse_expr(read_sexp(text)); }

// ---------------------------------------------------------------------------
// Binding

inline std::string fresh_name(std::string base, const std::function<bool(const std::string&)>& taken) {
  if (base.empty()) base = "v";
  std::string candidate = base + "'";
  while (taken(candidate)) candidate += "'";
  return candidate;
}

namespace detail {

inline bool touches(const Expr& e, const Substitution& s) {
  if (s.empty()) return false;
  if (e.has_hole()) return true;
  const auto& fv = e.free_vars();
  if (fv.size() < s.size()) {
    for (const auto& x : fv)
      if (s.count(x)) return true;
    return false;
  }
  for (const auto& [x, v] : s)
    if (e.has_free(x)) return true;
  return false;
}

inline Expr substitute_rec(const Expr& e, const Substitution& s);

// Substitutes under binder `x` in `body`, renaming x if a range value
// mentions it. Returns the (possibly renamed) binder and the new body.
inline std::string substitute_under(const std::string& x, const std::vector<const Expr*>& bodies,
                                    std::vector<Expr>& out_bodies, const Substitution& s) {
  Substitution inner;
  bool capture = false;
  for (const auto& [y, v] : s) {
    if (y == x) continue;
    bool used = false;
    for (const Expr* b : bodies) used = used || b->has_hole() || b->has_free(y);
    if (!used) continue;
    inner.emplace(y, v);
    if (v.has_free(x)) capture = true;
  }
  std::string binder = x;
  if (capture) {
    binder = fresh_name(x, [&](const std::string& n) {
      if (inner.count(n)) return true;
      for (const auto& [y, v] : inner)
        if (v.has_free(n)) return true;
      for (const Expr* b : bodies)
        if (b->has_free(n)) return true;
      return false;
    });
    inner.emplace(x, Expr::var(binder));
  }
  out_bodies.clear();
  for (const Expr* b : bodies) out_bodies.push_back(substitute_rec(*b, inner));
  return binder;
}

inline Expr substitute_rec(const Expr& e, const Substitution& s) {
  if (!touches(e, s)) return e;
  switch (e.op()) {
    case Op::Var: {
      auto it = s.find(e.name());
      return it == s.end() ? e : it->second;
    }
    case Op::Hole: {
      Substitution env;
      for (const auto& [y, v] : e.hole_env()) env.emplace(y, substitute_rec(v, s));
      for (const auto& [y, v] : s) env.emplace(y, v);  // no-op where already bound
      return Expr::hole(std::move(env));
    }
    case Op::Lambda: {
      std::vector<Expr> bodies;
      std::string binder = substitute_under(e.name(), {&e.kid(0)}, bodies, s);
      return e.with_name(std::move(binder), {bodies[0]});
    }
    case Op::Let: {
      Expr bound = substitute_rec(e.kid(0), s);
      std::vector<Expr> bodies;
      std::string binder = substitute_under(e.name(), {&e.kid(1)}, bodies, s);
      return e.with_name(std::move(binder), {bound, bodies[0]});
    }
    case Op::LetActor: {
      std::vector<Expr> bodies;
      std::string binder = substitute_under(e.name(), {&e.kid(0), &e.kid(1)}, bodies, s);
      return e.with_name(std::move(binder), {bodies[0], bodies[1]});
    }
    default: {
      std::vector<Expr> kids;
      kids.reserve(e.arity());
      for (const Expr& k : e.kids()) kids.push_back(substitute_rec(k, s));
      return e.with_kids(std::move(kids));
    }
  }
}

}  // namespace detail

/// Capture-avoiding simultaneous substitution.
inline Expr substitute(const Expr& e, const Substitution& s) { return detail::substitute_rec(e, s); }

inline Expr substitute(const Expr& e, const std::string& x, const Expr& v) {
  if (!e.has_hole() && !e.has_free(x)) return e;
  return detail::substitute_rec(e, Substitution{{x, v}});
}

namespace detail {

template <class FreeMatch>
bool alpha_rec(const Expr& a, const Expr& b, std::vector<std::string>& bound_a,
               std::vector<std::string>& bound_b, FreeMatch& free_match) {
  if (a.op() != b.op()) return false;
  switch (a.op()) {
    case Op::Var: {
      auto find = [](const std::vector<std::string>& stack, const std::string& x) -> long {
        for (std::size_t i = stack.size(); i-- > 0;)
          if (stack[i] == x) return static_cast<long>(i);
        return -1;
      };
      const long ia = find(bound_a, a.name());
      const long ib = find(bound_b, b.name());
      if (ia >= 0 || ib >= 0) return ia == ib;
      return free_match(a.name(), b.name());
    }
    case Op::Nat:
      return a.nat() == b.nat();
    case Op::Event:
      return a.name() == b.name();
    case Op::Nil:
    case Op::True:
    case Op::Hole:
      return true;
    default:
      break;
  }
  if (a.arity() != b.arity()) return false;
  for (std::size_t i = 0; i < a.arity(); ++i) {
    const bool binds = binds_in_kid(a.op(), i);
    if (binds) {
      bound_a.push_back(a.name());
      bound_b.push_back(b.name());
    }
    const bool ok = alpha_rec(a.kid(i), b.kid(i), bound_a, bound_b, free_match);
    if (binds) {
      bound_a.pop_back();
      bound_b.pop_back();
    }
    if (!ok) return false;
  }
  return true;
}

}  // namespace detail

/// Alpha-equality where free variables are related by `free_match(name0, name1)`.
/// The matcher may be stateful (memory isomorphism extends a bijection through it).
template <class FreeMatch>
bool alpha_equal_with(const Expr& a, const Expr& b, FreeMatch&& free_match) {
  std::vector<std::string> bound_a;
  std::vector<std::string> bound_b;
  return detail::alpha_rec(a, b, bound_a, bound_b, free_match);
}

/// Identity up to consistent renaming of bound variables.
inline bool alpha_equal(const Expr& a, const Expr& b) {
  if (a.same_node(b)) return true;
  return alpha_equal_with(a, b, [](const std::string& x, const std::string& y) { return x == y; });
}

/// Every variable name occurring in `e`, bound or free.
inline void collect_names(const Expr& e, std::set<std::string>& out) {
  if (e.is(Op::Var) || e.is(Op::Lambda) || e.is(Op::Let) || e.is(Op::LetActor)) out.insert(e.name());
  for (const Expr& k : e.kids()) collect_names(k, out);
}

// ---------------------------------------------------------------------------
// Values and contexts

/// Value predicate: lambdas, atoms, numerals, value variables, pairs of values.
inline bool is_value(const Expr& e, const VarPredicate& vars = all_vars_are_values()) {
  switch (e.op()) {
    case Op::Nil:
    case Op::True:
    case Op::Nat:
    case Op::Lambda:
      return true;
    case Op::Var:
      return vars(e.name());
    case Op::Pair:
      return is_value(e.kid(0), vars) && is_value(e.kid(1), vars);
    default:
      return false;
  }
}

enum class ContextSort { General, Reduction, Univalent };

/// An expression with exactly one hole.
class Context {
 public:
  Context() : expr_(Expr::hole()) {}

  /// Validates the hole count and the sort's shape constraint.
  static Context make(Expr with_hole, ContextSort sort = ContextSort::General);

  const Expr& expr() const { return expr_; }
  ContextSort sort() const { return sort_; }

 private:
  Context(Expr e, ContextSort sort) : expr_(std::move(e)), sort_(sort) {}

  Expr expr_;
  ContextSort sort_ = ContextSort::General;
};

/// Textual replacement of the hole (captures free variables of `e`).
inline Expr plug_expr(const Expr& with_hole, const Expr& e) {
  if (with_hole.is(Op::Hole)) return e;
  if (!with_hole.has_hole()) return with_hole;
  std::vector<Expr> kids;
  kids.reserve(with_hole.arity());
  for (const Expr& k : with_hole.kids()) kids.push_back(plug_expr(k, e));
  return with_hole.with_kids(std::move(kids));
}

inline Expr plug(const Context& c, const Expr& e) { return plug_expr(c.expr(), e); }

/// Context composition C0[C1].
inline Context compose(const Context& outer, const Context& inner) {
  ContextSort sort = outer.sort() == inner.sort() ? outer.sort() : ContextSort::General;
  return Context::make(plug_expr(outer.expr(), inner.expr()), sort);
}

/// True iff no lambda binder lies on the path from the root to the hole.
inline bool is_univalent(const Expr& with_hole) {
  if (with_hole.is(Op::Hole)) return true;
  if (with_hole.is(Op::Lambda)) return !with_hole.has_hole();
  for (const Expr& k : with_hole.kids())
    if (k.has_hole()) return is_univalent(k);
  return true;
}

inline bool is_univalent(const Context& c) { return is_univalent(c.expr()); }

/// Child positions evaluated left-to-right before the node itself is a redex.
inline std::size_t evaluated_prefix(Op op, std::size_t arity) {
  switch (op) {
    case Op::App:
    case Op::Set:
    case Op::Eq:
    case Op::Pair:
    case Op::Send:
      return 2;
    case Op::Let:
    case Op::Seq:
    case Op::If:
    case Op::Mk:
    case Op::Get:
    case Op::CellP:
    case Op::Fst:
    case Op::Snd:
    case Op::Add1:
    case Op::Sub1:
    case Op::NatP:
    case Op::Become:
    case Op::LetActor:
      return 1;
    default:
      (void)arity;
      return 0;
  }
}

/// Checks the left-first call-by-value reduction-context grammar.
inline bool is_reduction_context(const Expr& with_hole,
                                 const VarPredicate& vars = all_vars_are_values()) {
  if (with_hole.is(Op::Hole)) return true;
  if (with_hole.hole_count() != 1) return false;
  const std::size_t prefix = evaluated_prefix(with_hole.op(), with_hole.arity());
  for (std::size_t i = 0; i < with_hole.arity(); ++i) {
    const Expr& k = with_hole.kid(i);
    if (k.has_hole()) return i < prefix && is_reduction_context(k, vars);
    if (!is_value(k, vars)) return false;
  }
  return false;
}

inline Context Context::make(Expr with_hole, ContextSort sort) {
  if (with_hole.hole_count() != 1)
    throw Error("context must contain exactly one hole, found " +
                std::to_string(with_hole.hole_count()));
  if (sort == ContextSort::Reduction && !is_reduction_context(with_hole))
    throw Error("not a reduction context: " + to_string(with_hole));
  if (sort == ContextSort::Univalent && !is_univalent(with_hole))
    throw Error("not a univalent context (hole under lambda): " + to_string(with_hole));
  return Context(std::move(with_hole), sort);
}

/// Parses a context; `_` marks the hole.
inline Context parse_context(std::string_view text, ContextSort sort = ContextSort::General) {
  ParseHooks hooks;
  hooks.allow_hole = true;
  return Context::make(parse_expr(read_sexp(text), &hooks), sort);
}

/// One step of the path from the root to the focus: `parent` with the focus
/// at child `index`.
struct Frame {
  Expr parent;
  std::size_t index = 0;
};

enum class DecompKind { Value, Redex, Stuck };

namespace detail {

inline DecompKind find_focus(const Expr& e, const VarPredicate& vars, std::vector<Frame>& path) {
  const Expr* cur = &e;
  for (;;) {
    if (path.empty() && is_value(*cur, vars)) return DecompKind::Value;
    if (cur->is(Op::Var)) return DecompKind::Stuck;
    const std::size_t prefix = evaluated_prefix(cur->op(), cur->arity());
    std::size_t next = prefix;
    for (std::size_t i = 0; i < prefix; ++i) {
      if (!is_value(cur->kid(i), vars)) {
        next = i;
        break;
      }
    }
    if (next == prefix) return DecompKind::Redex;
    path.push_back(Frame{*cur, next});
    cur = &path.back().parent.kid(next);
  }
}

}  // namespace detail

/// Rebuilds the spine of `path` around `focus`.
inline Expr rebuild(const std::vector<Frame>& path, Expr focus) {
  for (std::size_t i = path.size(); i-- > 0;) {
    std::vector<Expr> kids = path[i].parent.kids();
    kids[path[i].index] = std::move(focus);
    focus = path[i].parent.with_kids(std::move(kids));
  }
  return focus;
}

/// Focus of the path (the redex position).
inline const Expr& focus_of(const Expr& root, const std::vector<Frame>& path) {
  if (path.empty()) return root;
  return path.back().parent.kid(path.back().index);
}

struct Decomposition {
  DecompKind kind = DecompKind::Value;
  Context context;
  Expr redex;
};

/// Splits `e` into a reduction context and its redex (left-first call-by-value).
/// A non-value variable in evaluation position makes the term stuck.
inline Decomposition decompose(const Expr& e, const VarPredicate& vars = all_vars_are_values()) {
  std::vector<Frame> path;
  Decomposition d;
  d.kind = detail::find_focus(e, vars, path);
  if (d.kind == DecompKind::Redex) {
    d.redex = focus_of(e, path);
    d.context = Context::make(rebuild(path, Expr::hole()), ContextSort::Reduction);
  } else if (d.kind == DecompKind::Stuck) {
    d.redex = focus_of(e, path);
    if (!path.empty()) d.context = Context::make(rebuild(path, Expr::hole()), ContextSort::Reduction);
  }
  return d;
}

}  // namespace effects
