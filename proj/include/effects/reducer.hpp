#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "effects/memory.hpp"
#include "effects/syntax.hpp"

namespace effects {

/// A memory context paired with the running expression.
struct Description {
  Memory memory;
  Expr expr;

  friend bool operator==(const Description& a, const Description& b) {
    return a.expr == b.expr && a.memory == b.memory;
  }
};

inline std::string to_string(const Description& d) {
  return render_memory(d.memory) + " ⊢ " + to_string(d.expr);
}

enum class StepStatus { Stepped, Done, Stuck };

/// `Diverged` is only reported when loop detection is requested: the run
/// revisited an identical description, so it can never terminate.
enum class OutcomeKind { Value, Stuck, Timeout, Diverged };

inline const char* to_string(OutcomeKind k) {
  switch (k) {
    case OutcomeKind::Value: return "value";
    case OutcomeKind::Stuck: return "stuck";
    case OutcomeKind::Timeout: return "timeout";
    case OutcomeKind::Diverged: return "diverged";
  }
  return "?";
}

struct Outcome {
  OutcomeKind kind = OutcomeKind::Stuck;
  /// Final description: the value and final memory, or where it got stuck.
  Description last;
  std::size_t steps = 0;

  bool is_value() const { return kind == OutcomeKind::Value; }
  /// Definitely undefined: stuck, or a detected infinite loop.
  bool is_undefined() const { return kind == OutcomeKind::Stuck || kind == OutcomeKind::Diverged; }
  bool is_indeterminate() const { return kind == OutcomeKind::Timeout; }
  const Expr& value() const { return last.expr; }
  const Memory& memory() const { return last.memory; }
};

/// `(value v)`, `(stuck e)`, `(timeout n)`, `(diverged)`
inline std::string outcome_sexp(const Outcome& o) {
  switch (o.kind) {
    case OutcomeKind::Value: return "(value " + to_string(o.value()) + ")";
    case OutcomeKind::Stuck: return "(stuck " + to_string(o.last.expr) + ")";
    case OutcomeKind::Timeout: return "(timeout " + std::to_string(o.steps) + ")";
    case OutcomeKind::Diverged: return "(diverged)";
  }
  return "()";
}

struct EvalOptions {
  std::size_t max_steps = 2000;
  /// Report exact description repetition as `Diverged` instead of timing out.
  bool detect_loops = false;
};

/// `prefix` + smallest k such that the name is unused by `m` and not free in `e`.
inline std::string fresh_cell_name(const Memory& m, const Expr& e, const std::string& prefix = "z") {
  for (std::size_t k = 0;; ++k) {
    std::string name = prefix + std::to_string(k);
    if (!m.contains(name) && !e.has_free(name)) return name;
  }
}

/// eq on values: identical atoms, numerals or cell names; nil otherwise
/// (lambdas and pairs are never eq).
inline bool eq_values(const Expr& a, const Expr& b) {
  if (a.op() != b.op()) return false;
  switch (a.op()) {
    case Op::Nil:
    case Op::True:
      return true;
    case Op::Nat:
      return a.nat() == b.nat();
    case Op::Var:
      return a.name() == b.name();
    default:
      return false;
  }
}

inline Expr truth(bool b) { return b ? Expr::t() : Expr::nil(); }

/// Contracts a functional or memory redex. `root` is the whole expression
/// (fresh cells must not clash with its free variables). Returns nullopt when
/// the redex is ill-sorted or belongs to the actor extension.
inline std::optional<Expr> contract(const Expr& redex, Memory* memory, const Expr& root) {
  auto is_cell = [&](const Expr& v) {
    return memory && v.is(Op::Var) && memory->contains(v.name());
  };
  switch (redex.op()) {
    case Op::App: {
      const Expr& fn = redex.kid(0);
      if (!fn.is(Op::Lambda)) return std::nullopt;
      return substitute(fn.kid(0), fn.name(), redex.kid(1));
    }
    case Op::Let:
      return substitute(redex.kid(1), redex.name(), redex.kid(0));
    case Op::Seq: {
      if (redex.arity() == 1) return redex.kid(0);
      if (redex.arity() == 2) return redex.kid(1);
      return Expr::seq(std::vector<Expr>(redex.kids().begin() + 1, redex.kids().end()));
    }
    case Op::If:
      return redex.kid(0).is(Op::Nil) ? redex.kid(2) : redex.kid(1);
    case Op::Mk: {
      if (!memory) return std::nullopt;
      std::string z = fresh_cell_name(*memory, root);
      memory->bind(z, redex.kid(0));
      return Expr::var(std::move(z));
    }
    case Op::Get:
      if (!is_cell(redex.kid(0))) return std::nullopt;
      return memory->get(redex.kid(0).name());
    case Op::Set:
      if (!is_cell(redex.kid(0))) return std::nullopt;
      memory->set(redex.kid(0).name(), redex.kid(1));
      return Expr::nil();
    case Op::Eq:
      return truth(eq_values(redex.kid(0), redex.kid(1)));
    case Op::CellP:
      return truth(is_cell(redex.kid(0)));
    case Op::Fst:
    case Op::Snd:
      if (!redex.kid(0).is(Op::Pair)) return std::nullopt;
      return redex.kid(0).kid(redex.is(Op::Fst) ? 0 : 1);
    case Op::Add1:
      if (!redex.kid(0).is(Op::Nat)) return std::nullopt;
      return Expr::natural(redex.kid(0).nat() + 1);
    case Op::Sub1:
      if (!redex.kid(0).is(Op::Nat) || redex.kid(0).nat() == 0) return std::nullopt;
      return Expr::natural(redex.kid(0).nat() - 1);
    case Op::NatP:
      return truth(redex.kid(0).is(Op::Nat));
    default:
      return std::nullopt;
  }
}

/// Single deterministic step, in place.
inline StepStatus step_in_place(Description& d) {
  std::vector<Frame> path;
  const VarPredicate cells = d.memory.cell_predicate();
  switch (detail::find_focus(d.expr, cells, path)) {
    case DecompKind::Value:
      return StepStatus::Done;
    case DecompKind::Stuck:
      return StepStatus::Stuck;
    case DecompKind::Redex:
      break;
  }
  const Expr redex = focus_of(d.expr, path);
  Memory next = d.memory;
  auto result = contract(redex, &next, d.expr);
  if (!result) return StepStatus::Stuck;
  d.memory = std::move(next);
  d.expr = rebuild(path, std::move(*result));
  return StepStatus::Stepped;
}

struct StepResult {
  StepStatus status = StepStatus::Done;
  Description next;
};

inline StepResult step(const Description& d) {
  StepResult r;
  r.next = d;
  r.status = step_in_place(r.next);
  if (r.status != StepStatus::Stepped) r.next = d;
  return r;
}

namespace detail {

template <class OnState>
Outcome run(Description d, const EvalOptions& opts, OnState&& on_state) {
  Outcome out;
  Description snapshot;
  std::size_t power = 1;
  bool have_snapshot = false;
  std::vector<Frame> path;
  for (;;) {
    path.clear();
    const VarPredicate cells = d.memory.cell_predicate();
    const DecompKind kind = find_focus(d.expr, cells, path);
    if (kind == DecompKind::Value) {
      out.kind = OutcomeKind::Value;
      break;
    }
    if (kind == DecompKind::Stuck) {
      out.kind = OutcomeKind::Stuck;
      break;
    }
    if (out.steps >= opts.max_steps) {
      out.kind = OutcomeKind::Timeout;
      break;
    }
    const Expr redex = focus_of(d.expr, path);
    Memory before;
    const bool mutates = redex.is(Op::Mk) || redex.is(Op::Set);
    if (mutates) before = d.memory;
    auto result = contract(redex, &d.memory, d.expr);
    if (!result) {
      if (mutates) d.memory = std::move(before);
      out.kind = OutcomeKind::Stuck;
      break;
    }
    on_state(d, before, mutates);
    d.expr = rebuild(path, std::move(*result));
    ++out.steps;
    if (opts.detect_loops) {
      // Brent: compare against a snapshot refreshed at powers of two.
      if (have_snapshot && d == snapshot) {
        out.kind = OutcomeKind::Diverged;
        break;
      }
      if (out.steps == power) {
        snapshot = d;
        have_snapshot = true;
        power *= 2;
      }
    }
  }
  out.last = std::move(d);
  return out;
}

}  // namespace detail

/// Iterates `step` until a value, stuck state or the step budget.
inline Outcome eval(Description d, const EvalOptions& opts) {
  return detail::run(std::move(d), opts, [](const Description&, const Memory&, bool) {});
}

inline Outcome eval(Description d, std::size_t max_steps) {
  EvalOptions opts;
  opts.max_steps = max_steps;
  return eval(std::move(d), opts);
}

inline Outcome eval(const Expr& e, std::size_t max_steps = 2000) { return eval(Description{{}, e}, max_steps); }

struct Trace {
  Outcome outcome;
  /// Each description that was reduced, in order; consecutive entries (and the
  /// last entry with the final description) are related by one step.
  std::vector<Description> visited;
};

inline Trace eval_with_trace(Description d, std::size_t max_steps) {
  Trace t;
  EvalOptions opts;
  opts.max_steps = max_steps;
  t.outcome = detail::run(std::move(d), opts, [&](const Description& cur, const Memory& before, bool mutated) {
    t.visited.push_back(Description{mutated ? before : cur.memory, cur.expr});
  });
  return t;
}

}  // namespace effects
