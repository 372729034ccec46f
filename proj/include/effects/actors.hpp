#pragma once

// Actor configurations <rho, alpha, mu, xi>: receptionists, actor states,
// pending messages and external names.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "effects/reducer.hpp"
#include "effects/sexp.hpp"
#include "effects/syntax.hpp"

namespace effects {

struct ActorState {
  enum class Tag { Ready, Busy, Inert };
  Tag tag = Tag::Inert;
  Expr expr;          // behavior when ready, running expression when busy
  std::string error;  // set when the actor went inert by getting stuck
  bool anonymous = false;

  static ActorState ready(Expr b) { return ActorState{Tag::Ready, std::move(b), {}, false}; }
  static ActorState busy(Expr e) { return ActorState{Tag::Busy, std::move(e), {}, false}; }
  static ActorState inert(std::string error = {}) { return ActorState{Tag::Inert, {}, std::move(error), false}; }
};

struct Message {
  std::uint64_t id = 0;
  std::string receiver;
  Expr contents;
};

struct Configuration {
  std::set<std::string> receptionists;
  std::map<std::string, ActorState> actors;
  std::vector<Message> messages;  // a multiset; order is bookkeeping only
  std::set<std::string> externals;
  std::uint64_t next_message = 0;
  std::uint64_t next_anonymous = 0;

  bool knows(const std::string& name) const { return actors.count(name) || externals.count(name); }

  const Message* message(std::uint64_t id) const {
    for (const auto& m : messages)
      if (m.id == id) return &m;
    return nullptr;
  }

  std::uint64_t post(std::string receiver, Expr contents) {
    messages.push_back(Message{next_message, std::move(receiver), std::move(contents)});
    return next_message++;
  }

  /// Checks the interface and naming invariants; throws on violation.
  void validate() const {
    for (const auto& r : receptionists)
      if (!actors.count(r)) throw Error("receptionist '" + r + "' is not an actor");
    for (const auto& x : externals)
      if (actors.count(x)) throw Error("external name '" + x + "' is also an actor");
    auto names_ok = [&](const Expr& e, const std::string& where) {
      for (const auto& x : e.free_vars())
        if (!knows(x)) throw Error("unknown actor name '" + x + "' in " + where);
    };
    for (const auto& [a, s] : actors) {
      if (s.tag == ActorState::Tag::Ready) {
        if (!s.expr.is(Op::Lambda)) throw Error("behavior of '" + a + "' is not a lambda");
        names_ok(s.expr, "behavior of " + a);
      } else if (s.tag == ActorState::Tag::Busy) {
        names_ok(s.expr, "expression of " + a);
      }
    }
    for (const auto& m : messages) {
      if (!knows(m.receiver)) throw Error("message to unknown actor '" + m.receiver + "'");
      if (!is_value(m.contents)) throw Error("message contents must be a value");
      names_ok(m.contents, "message " + std::to_string(m.id));
    }
  }
};

// ---------------------------------------------------------------------------
// Transitions

struct Choice {
  enum class Kind { Internal, Deliver, In, Out };
  Kind kind = Kind::Internal;
  std::string actor;  // internal: the stepping actor; in: the receiver
  std::uint64_t message = 0;
  Expr contents;  // in only

  static Choice internal(std::string a) { return Choice{Kind::Internal, std::move(a), 0, {}}; }
  static Choice deliver(std::uint64_t id) { return Choice{Kind::Deliver, {}, id, {}}; }
  static Choice out(std::uint64_t id) { return Choice{Kind::Out, {}, id, {}}; }
  static Choice in(std::string a, Expr v) { return Choice{Kind::In, std::move(a), 0, std::move(v)}; }
};

struct Label {
  enum class Kind { Internal, Event, Error, Deliver, In, Out };
  Kind kind = Kind::Internal;
  std::string actor;  // stepping actor, or receiver of a message
  std::uint64_t message = 0;
  Expr contents;
  std::string tag;  // event tag or error text
};

inline std::string to_string(const Label& l) {
  switch (l.kind) {
    case Label::Kind::Internal: return "(internal " + l.actor + ")";
    case Label::Kind::Event: return "(event " + l.actor + (l.tag.empty() ? "" : " " + l.tag) + ")";
    case Label::Kind::Error: return "(error " + l.actor + " " + quote(l.tag) + ")";
    case Label::Kind::Deliver:
      return "(deliver " + std::to_string(l.message) + " " + l.actor + " " + to_string(l.contents) + ")";
    case Label::Kind::In: return "(in " + l.actor + " " + to_string(l.contents) + ")";
    case Label::Kind::Out:
      return "(out " + std::to_string(l.message) + " " + l.actor + " " + to_string(l.contents) + ")";
  }
  return "?";
}

/// Choices enabled in `c`; in-transitions only come from scripts.
inline std::vector<Choice> enabled(const Configuration& c) {
  std::vector<Choice> out;
  for (const auto& [a, s] : c.actors)
    if (s.tag == ActorState::Tag::Busy && !is_value(s.expr)) out.push_back(Choice::internal(a));
  for (const auto& m : c.messages) {
    if (c.externals.count(m.receiver)) {
      out.push_back(Choice::out(m.id));
      continue;
    }
    auto it = c.actors.find(m.receiver);
    if (it != c.actors.end() && it->second.tag == ActorState::Tag::Ready) out.push_back(Choice::deliver(m.id));
  }
  return out;
}

inline bool is_enabled(const Configuration& c, const Choice& ch) {
  switch (ch.kind) {
    case Choice::Kind::Internal: {
      auto it = c.actors.find(ch.actor);
      return it != c.actors.end() && it->second.tag == ActorState::Tag::Busy && !is_value(it->second.expr);
    }
    case Choice::Kind::Deliver: {
      const Message* m = c.message(ch.message);
      if (!m) return false;
      auto it = c.actors.find(m->receiver);
      return it != c.actors.end() && it->second.tag == ActorState::Tag::Ready;
    }
    case Choice::Kind::Out: {
      const Message* m = c.message(ch.message);
      return m && c.externals.count(m->receiver);
    }
    case Choice::Kind::In:
      return c.receptionists.count(ch.actor) && is_value(ch.contents);
  }
  return false;
}

namespace detail {

inline std::string fresh_actor_name(const Configuration& c, const std::string& base) {
  if (!c.knows(base)) return base;
  for (std::size_t k = 1;; ++k) {
    std::string name = base + std::to_string(k);
    if (!c.knows(name)) return name;
  }
}

inline void settle(ActorState& s) {
  if (s.tag == ActorState::Tag::Busy && is_value(s.expr)) {
    const bool anonymous = s.anonymous;
    s = ActorState::inert();
    s.anonymous = anonymous;
  }
}

/// One step of the busy actor `a`.
inline Label internal_step(Configuration& c, const std::string& a) {
  Label label;
  label.kind = Label::Kind::Internal;
  label.actor = a;
  const Expr e = c.actors.at(a).expr;
  auto fail = [&](std::string why) {
    const bool anonymous = c.actors[a].anonymous;
    c.actors[a] = ActorState::inert(why);
    c.actors[a].anonymous = anonymous;
    label.kind = Label::Kind::Error;
    label.tag = std::move(why);
    return label;
  };
  std::vector<Frame> path;
  if (find_focus(e, all_vars_are_values(), path) != DecompKind::Redex)
    return fail("stuck at " + to_string(focus_of(e, path)));
  const Expr redex = focus_of(e, path);
  switch (redex.op()) {
    case Op::Send: {
      const Expr& target = redex.kid(0);
      if (!target.is(Op::Var) || !c.knows(target.name())) return fail("send to a non-actor " + to_string(target));
      c.post(target.name(), redex.kid(1));
      c.actors[a].expr = rebuild(path, Expr::nil());
      break;
    }
    case Op::LetActor: {
      if (!redex.kid(0).is(Op::Lambda)) return fail("letactor behavior is not a lambda");
      const std::string name = fresh_actor_name(c, redex.name());
      const Expr self = Expr::var(name);
      c.actors[name] = ActorState::ready(substitute(redex.kid(0), redex.name(), self));
      c.actors[a].expr = rebuild(path, substitute(redex.kid(1), redex.name(), self));
      break;
    }
    case Op::Become: {
      if (!redex.kid(0).is(Op::Lambda)) return fail("become with a non-lambda behavior");
      Expr rest = rebuild(path, Expr::nil());
      const bool was_anonymous = c.actors[a].anonymous;
      c.actors[a] = ActorState::ready(redex.kid(0));
      c.actors[a].anonymous = was_anonymous;
      // The continuation runs under a name nobody can learn. When it has
      // nothing left to do no actor is created.
      if (!is_value(rest)) {
        std::string anon;
        do anon = "anon" + std::to_string(++c.next_anonymous);
        while (c.knows(anon));
        c.actors[anon] = ActorState::busy(std::move(rest));
        c.actors[anon].anonymous = true;
      }
      return label;
    }
    case Op::Event:
      label.kind = Label::Kind::Event;
      label.tag = redex.name();
      c.actors[a].expr = rebuild(path, Expr::nil());
      break;
    default: {
      auto next = contract(redex, nullptr, e);
      if (!next) return fail("stuck at " + to_string(redex));
      c.actors[a].expr = rebuild(path, std::move(*next));
      break;
    }
  }
  settle(c.actors[a]);
  return label;
}

}  // namespace detail

/// Applies an enabled choice and returns its label.
inline Label actor_step(Configuration& c, const Choice& ch) {
  if (!is_enabled(c, ch)) throw Error("choice is not enabled");
  switch (ch.kind) {
    case Choice::Kind::Internal:
      return detail::internal_step(c, ch.actor);
    case Choice::Kind::Deliver: {
      auto it = std::find_if(c.messages.begin(), c.messages.end(), [&](const Message& m) { return m.id == ch.message; });
      Message m = *it;
      c.messages.erase(it);
      ActorState& s = c.actors.at(m.receiver);
      const bool anonymous = s.anonymous;
      s = ActorState::busy(Expr::app(s.expr, m.contents));
      s.anonymous = anonymous;
      return Label{Label::Kind::Deliver, m.receiver, m.id, m.contents, {}};
    }
    case Choice::Kind::Out: {
      auto it = std::find_if(c.messages.begin(), c.messages.end(), [&](const Message& m) { return m.id == ch.message; });
      Message m = *it;
      c.messages.erase(it);
      for (const auto& x : m.contents.free_vars())
        if (c.actors.count(x)) c.receptionists.insert(x);
      return Label{Label::Kind::Out, m.receiver, m.id, m.contents, {}};
    }
    case Choice::Kind::In: {
      for (const auto& x : ch.contents.free_vars())
        if (!c.actors.count(x)) c.externals.insert(x);
      const std::uint64_t id = c.post(ch.actor, ch.contents);
      return Label{Label::Kind::In, ch.actor, id, ch.contents, {}};
    }
  }
  throw Error("unknown choice");
}

/// The choice a label records; replaying labels reproduces a run.
inline Choice choice_of(const Label& l) {
  switch (l.kind) {
    case Label::Kind::Internal:
    case Label::Kind::Event:
    case Label::Kind::Error:
      return Choice::internal(l.actor);
    case Label::Kind::Deliver:
      return Choice::deliver(l.message);
    case Label::Kind::Out:
      return Choice::out(l.message);
    case Label::Kind::In:
      return Choice::in(l.actor, l.contents);
  }
  throw Error("unknown label");
}

// ---------------------------------------------------------------------------
// Schedulers and runs

struct TraceEntry {
  Label label;
  std::set<std::string> receptionists;  // after the step
  std::set<std::string> externals;
};

using ActorTrace = std::vector<TraceEntry>;

class Scheduler {
 public:
  virtual ~Scheduler() = default;
  /// Picks the next choice, or nullopt to stop.
  virtual std::optional<Choice> pick(const Configuration& c, const std::vector<Choice>& choices) = 0;
};

/// Takes the choice that has been waiting longest; a choice re-queues after
/// it is taken, so every continuously enabled delivery is taken within as
/// many steps as there are competing choices.
class RoundRobinScheduler : public Scheduler {
 public:
  explicit RoundRobinScheduler(std::size_t window = 8) : window_(window) {}

  std::optional<Choice> pick(const Configuration&, const std::vector<Choice>& choices) override {
    if (choices.empty()) return std::nullopt;
    ++clock_;
    std::map<std::string, std::uint64_t> seen;
    std::size_t best = 0;
    std::uint64_t best_since = UINT64_MAX;
    for (std::size_t i = 0; i < choices.size(); ++i) {
      const std::string k = key(choices[i]);
      auto it = since_.find(k);
      const std::uint64_t t = it == since_.end() ? clock_ : it->second;
      seen[k] = t;
      if (t < best_since) {
        best_since = t;
        best = i;
      }
    }
    seen.erase(key(choices[best]));
    since_ = std::move(seen);
    return choices[best];
  }

  std::size_t window() const { return window_; }

 private:
  static std::string key(const Choice& c) {
    return c.kind == Choice::Kind::Internal ? "i:" + c.actor : "m:" + std::to_string(c.message);
  }
  std::size_t window_;
  std::uint64_t clock_ = 0;
  std::map<std::string, std::uint64_t> since_;
};

class RandomScheduler : public Scheduler {
 public:
  explicit RandomScheduler(std::uint64_t seed) : rng_(seed) {}
  std::optional<Choice> pick(const Configuration&, const std::vector<Choice>& choices) override {
    if (choices.empty()) return std::nullopt;
    return choices[rng_() % choices.size()];
  }

 private:
  std::mt19937_64 rng_;
};

/// One script entry. `receiver` selects the oldest message to that actor when
/// no explicit id is given.
struct ScriptStep {
  Choice::Kind kind = Choice::Kind::Deliver;
  std::optional<std::uint64_t> id;
  std::string actor;
  Expr contents;
  int line = 0;
};

struct ScriptError : Error {
  std::size_t position;
  ScriptError(const std::string& what, std::size_t pos)
      : Error("script step " + std::to_string(pos + 1) + ": " + what), position(pos) {}
};

/// Follows a script. Busy actors are run to completion (lowest name first)
/// before each scripted delivery, input or output, so scripts only need to
/// name the externally visible choices; explicit internal steps are allowed.
class ScriptedScheduler : public Scheduler {
 public:
  explicit ScriptedScheduler(std::vector<ScriptStep> script) : script_(std::move(script)) {}

  std::optional<Choice> pick(const Configuration& c, const std::vector<Choice>& choices) override {
    if (pos_ < script_.size() && script_[pos_].kind == Choice::Kind::Internal) {
      const Choice ch = Choice::internal(script_[pos_].actor);
      if (!is_enabled(c, ch)) throw ScriptError("internal step of " + ch.actor + " is not enabled", pos_);
      ++pos_;
      return ch;
    }
    for (const auto& ch : choices)
      if (ch.kind == Choice::Kind::Internal) return ch;
    if (pos_ >= script_.size()) return std::nullopt;
    const ScriptStep& st = script_[pos_];
    Choice ch;
    if (st.kind == Choice::Kind::In) {
      ch = Choice::in(st.actor, st.contents);
    } else {
      std::optional<std::uint64_t> id = st.id;
      if (!id)
        for (const auto& m : c.messages)
          if (m.receiver == st.actor) {
            id = m.id;
            break;
          }
      if (!id) throw ScriptError("no pending message for " + st.actor, pos_);
      ch = st.kind == Choice::Kind::Deliver ? Choice::deliver(*id) : Choice::out(*id);
    }
    if (!is_enabled(c, ch)) throw ScriptError("scripted choice is not enabled", pos_);
    ++pos_;
    return ch;
  }

  bool finished() const { return pos_ >= script_.size(); }

 private:
  std::vector<ScriptStep> script_;
  std::size_t pos_ = 0;
};

struct RunResult {
  ActorTrace trace;
  Configuration final;
  bool quiescent = false;
  bool stopped = false;  // the scheduler declined to continue
  /// Longest wait of a continuously deliverable message, in steps.
  std::size_t max_delivery_wait = 0;
};

/// Runs until quiescence, the scheduler stops, or `budget` transitions.
inline RunResult run(Configuration c, Scheduler& sched, std::size_t budget) {
  RunResult r;
  std::map<std::uint64_t, std::size_t> waiting;  // deliverable message -> steps waited
  for (std::size_t n = 0; n < budget; ++n) {
    const auto choices = enabled(c);
    if (choices.empty()) {
      r.quiescent = true;
      break;
    }
    std::map<std::uint64_t, std::size_t> still;
    for (const auto& ch : choices)
      if (ch.kind == Choice::Kind::Deliver) still[ch.message] = waiting.count(ch.message) ? waiting[ch.message] : 0;
    waiting = std::move(still);
    auto pick = sched.pick(c, choices);
    if (!pick) {
      r.stopped = true;
      break;
    }
    Label l = actor_step(c, *pick);
    for (auto& [id, w] : waiting) {
      if (pick->kind == Choice::Kind::Deliver && pick->message == id) continue;
      r.max_delivery_wait = std::max(r.max_delivery_wait, ++w);
    }
    if (pick->kind == Choice::Kind::Deliver) waiting.erase(pick->message);
    r.trace.push_back(TraceEntry{std::move(l), c.receptionists, c.externals});
  }
  if (!r.quiescent && enabled(c).empty()) r.quiescent = true;
  r.final = std::move(c);
  return r;
}

/// Re-applies the choices recorded in a trace.
inline Configuration replay(Configuration c, const ActorTrace& t) {
  for (const auto& e : t) actor_step(c, choice_of(e.label));
  return c;
}

// ---------------------------------------------------------------------------
// Audits

/// ρ and ξ never shrink along the trace.
inline bool audit_interface_monotone(const Configuration& initial, const ActorTrace& t) {
  std::set<std::string> rho = initial.receptionists;
  std::set<std::string> xi = initial.externals;
  for (const auto& e : t) {
    if (!std::includes(e.receptionists.begin(), e.receptionists.end(), rho.begin(), rho.end())) return false;
    if (!std::includes(e.externals.begin(), e.externals.end(), xi.begin(), xi.end())) return false;
    rho = e.receptionists;
    xi = e.externals;
  }
  return true;
}

/// No message is ever addressed to an anonymous continuation actor.
inline bool audit_anonymous_privacy(const RunResult& r) {
  std::set<std::string> anonymous;
  for (const auto& [a, s] : r.final.actors)
    if (s.anonymous) anonymous.insert(a);
  for (const auto& e : r.trace) {
    const Label& l = e.label;
    if ((l.kind == Label::Kind::Deliver || l.kind == Label::Kind::In) && anonymous.count(l.actor)) return false;
  }
  for (const auto& m : r.final.messages)
    if (anonymous.count(m.receiver)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Event observation

enum class Observation { None, Some, AllSampled };

inline const char* observation_name(Observation o) {
  switch (o) {
    case Observation::None: return "none";
    case Observation::Some: return "some";
    case Observation::AllSampled: return "all-sampled";
  }
  return "?";
}

struct ObserveResult {
  Observation observation = Observation::None;
  std::size_t samples = 0;
  std::size_t runs_with_event = 0;
  std::map<std::string, std::size_t> runs_per_tag;  // number of runs emitting the tag
};

/// Samples `samples` random runs, seeds taken from `seeds` or counting up
/// from `base_seed`.
inline ObserveResult observe_event(const Configuration& c, std::size_t samples, std::size_t budget,
                                   const std::vector<std::uint64_t>& seeds = {}, std::uint64_t base_seed = 0) {
  if (samples == 0) throw Error("observe needs at least one sample");
  ObserveResult r;
  r.samples = samples;
  for (std::size_t i = 0; i < samples; ++i) {
    RandomScheduler sched(i < seeds.size() ? seeds[i] : base_seed + i);
    const RunResult run_result = run(c, sched, budget);
    std::set<std::string> tags;
    for (const auto& e : run_result.trace)
      if (e.label.kind == Label::Kind::Event) tags.insert(e.label.tag.empty() ? "event" : e.label.tag);
    if (!tags.empty()) ++r.runs_with_event;
    for (const auto& t : tags) ++r.runs_per_tag[t];
  }
  r.observation = r.runs_with_event == 0         ? Observation::None
                  : r.runs_with_event == samples ? Observation::AllSampled
                                                 : Observation::Some;
  return r;
}

// ---------------------------------------------------------------------------
// Files

/// `(config (receptionists a ...) (externals x ...) (actors (a (ready E)) ...) (messages (a E) ...))`
inline Configuration parse_config(const Sexp& s) {
  if (!s.has_head("config")) s.fail("expected (config ...)");
  Configuration c;
  for (std::size_t i = 1; i < s.items.size(); ++i) {
    const Sexp& clause = s.items[i];
    if (!clause.is_list() || clause.items.empty() || !clause.items[0].is_atom()) clause.fail("bad config clause");
    const std::string& head = clause.items[0].atom;
    for (std::size_t j = 1; j < clause.items.size(); ++j) {
      const Sexp& item = clause.items[j];
      if (head == "receptionists" || head == "externals") {
        if (!item.is_atom()) item.fail("expected an actor name");
        (head == "receptionists" ? c.receptionists : c.externals).insert(item.atom);
      } else if (head == "actors") {
        if (!item.is_list() || item.items.size() != 2 || !item.items[0].is_atom() || !item.items[1].is_list() ||
            item.items[1].items.size() != 2 || !item.items[1].items[0].is_atom())
          item.fail("expected (name (ready EXPR)) or (name (busy EXPR))");
        const std::string& state = item.items[1].items[0].atom;
        Expr e = parse_expr(item.items[1].items[1]);
        if (state == "ready" && !is_value(e)) {
          // A behavior may be given as an expression; it is reduced here.
          const Outcome o = eval(e);
          if (!o.is_value() || !o.memory().names().empty() || !o.value().is(Op::Lambda))
            item.items[1].fail("behavior does not reduce to a lambda without cells");
          e = o.value();
        }
        if (state == "ready") c.actors[item.items[0].atom] = ActorState::ready(std::move(e));
        else if (state == "busy") c.actors[item.items[0].atom] = ActorState::busy(std::move(e));
        else item.items[1].fail("actor state must be ready or busy");
      } else if (head == "messages") {
        if (!item.is_list() || item.items.size() != 2 || !item.items[0].is_atom())
          item.fail("expected (receiver EXPR)");
        c.post(item.items[0].atom, parse_expr(item.items[1]));
      } else {
        clause.fail("unknown config clause '" + head + "'");
      }
    }
  }
  for (auto& [a, st] : c.actors) detail::settle(st);
  c.validate();
  return c;
}

inline Configuration parse_config(std::string_view text) { return parse_config(read_sexp(text)); }

/// Script labels: `(deliver ID|NAME) (internal NAME) (in NAME EXPR) (out ID|NAME)`.
inline std::vector<ScriptStep> parse_script(std::string_view text) {
  std::vector<ScriptStep> out;
  for (const Sexp& s : read_sexps(text)) {
    if (!s.is_list() || s.items.empty() || !s.items[0].is_atom()) s.fail("expected a script label");
    const std::string& head = s.items[0].atom;
    ScriptStep st;
    st.line = s.line;
    auto target = [&](const Sexp& t) {
      if (!t.is_atom()) t.fail("expected a message id or receiver name");
      if (t.is_numeral()) st.id = std::stoull(t.atom);
      else st.actor = t.atom;
    };
    if (head == "deliver" || head == "out") {
      if (s.items.size() != 2) s.fail("'" + head + "' takes one argument");
      st.kind = head == "deliver" ? Choice::Kind::Deliver : Choice::Kind::Out;
      target(s.items[1]);
    } else if (head == "internal") {
      if (s.items.size() != 2 || !s.items[1].is_atom()) s.fail("expected (internal NAME)");
      st.kind = Choice::Kind::Internal;
      st.actor = s.items[1].atom;
    } else if (head == "in") {
      if (s.items.size() != 3 || !s.items[1].is_atom()) s.fail("expected (in NAME EXPR)");
      st.kind = Choice::Kind::In;
      st.actor = s.items[1].atom;
      st.contents = parse_expr(s.items[2]);
      if (!is_value(st.contents)) s.items[2].fail("input contents must be a value");
    } else {
      s.fail("unknown script label '" + head + "'");
    }
    out.push_back(std::move(st));
  }
  return out;
}

inline std::string render_config(const Configuration& c) {
  std::string out = "(config (receptionists";
  for (const auto& r : c.receptionists) out += " " + r;
  out += ") (externals";
  for (const auto& x : c.externals) out += " " + x;
  out += ") (actors";
  for (const auto& [a, s] : c.actors) {
    out += " (" + a + " ";
    switch (s.tag) {
      case ActorState::Tag::Ready: out += "(ready " + to_string(s.expr) + ")"; break;
      case ActorState::Tag::Busy: out += "(busy " + to_string(s.expr) + ")"; break;
      case ActorState::Tag::Inert: out += s.error.empty() ? "(inert)" : "(inert " + quote(s.error) + ")"; break;
    }
    out += ")";
  }
  out += ") (messages";
  for (const auto& m : c.messages) out += " (" + m.receiver + " " + to_string(m.contents) + ")";
  return out + "))";
}

// ---------------------------------------------------------------------------
// Ticker

namespace programs {

/// Call-by-value fixed point without cells (actor code has no mk/get/set).
inline Expr z_combinator() {
  static const Expr e = parse(
      "(lambda (f) (app (lambda (x) (app f (lambda (v) (app (app x x) v))))"
      "                 (lambda (x) (app f (lambda (v) (app (app x x) v))))))");
  return e;
}

/// Ticker behavior with counter `c`: `t` is the tick message, a request is
/// (pair nil customer).
inline Expr ticker_behavior(const std::string& self, std::uint64_t counter = 0) {
  const Expr f = parse(
      "(lambda (b) (lambda (c) (lambda (m)"
      "  (if (eq m t)"
      "      (seq (send SELF t) (become (app b (add1 c))))"
      "      (seq (send (snd m) c) (become (app b c)))))))");
  return Expr::app(Expr::app(z_combinator(), substitute(f, "SELF", Expr::var(self))), Expr::natural(counter));
}

/// letactor{τ := b_Ticker} seq(send(τ, tick), τ)
inline Expr ticker_program() {
  return Expr::letactor("tau", ticker_behavior("tau"), Expr::seq({Expr::send(Expr::var("tau"), Expr::t()), Expr::var("tau")}));
}

}  // namespace programs

/// A Ticker already primed with its tick, exposed as receptionist `tau`.
/// With `customer` set, a request from that external actor is pending too.
inline Configuration ticker_config(const std::string& customer = {}) {
  Configuration c;
  c.actors["main"] = ActorState::busy(programs::ticker_program());
  while (c.actors["main"].tag == ActorState::Tag::Busy) detail::internal_step(c, "main");
  c.receptionists.insert("tau");
  if (!customer.empty()) {
    c.externals.insert(customer);
    c.post("tau", Expr::pair(Expr::nil(), Expr::var(customer)));
  }
  c.validate();
  return c;
}

/// n tick deliveries, then a request from `customer`, then its reply.
/// Meant for ticker_config() without a pending request.
inline std::vector<ScriptStep> ticker_script(std::size_t n, const std::string& customer) {
  std::vector<ScriptStep> s;
  for (std::size_t i = 0; i < n; ++i) s.push_back(ScriptStep{Choice::Kind::Deliver, std::nullopt, "tau", {}, 0});
  s.push_back(ScriptStep{Choice::Kind::In, std::nullopt, "tau", Expr::pair(Expr::nil(), Expr::var(customer)), 0});
  // Message ids: the primed tick is 0 and each delivered tick posts the
  // next, so the request gets id n + 1.
  s.push_back(ScriptStep{Choice::Kind::Deliver, n + 1, {}, {}, 0});
  s.push_back(ScriptStep{Choice::Kind::Out, std::nullopt, customer, {}, 0});
  return s;
}

/// The first value sent to `customer` in a trace.
inline std::optional<Expr> first_reply(const ActorTrace& t, const std::string& customer) {
  for (const auto& e : t)
    if (e.label.kind == Label::Kind::Out && e.label.actor == customer) return e.label.contents;
  return std::nullopt;
}

}  // namespace effects
