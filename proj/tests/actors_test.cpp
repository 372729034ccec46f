#include <gtest/gtest.h>

#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "effects/actors.hpp"
#include "effects/generate.hpp"

namespace {

using namespace effects;

std::string slurp(const std::string& name) {
  std::ifstream in(std::string(EFFECTS_SAMPLES_DIR) + "/" + name);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Interleavings {
  std::size_t maximal = 0;
  std::size_t with_event = 0;
  std::set<std::string> finals;
};

// Depth-first walk over every enabled choice.
void explore(const Configuration& c, bool saw_event, Interleavings& out, std::size_t depth = 0) {
  ASSERT_LT(depth, 200u);
  const auto choices = enabled(c);
  if (choices.empty()) {
    ++out.maximal;
    if (saw_event) ++out.with_event;
    out.finals.insert(render_config(c));
    return;
  }
  for (const auto& ch : choices) {
    Configuration next = c;
    const Label l = actor_step(next, ch);
    explore(next, saw_event || l.kind == Label::Kind::Event, out, depth + 1);
  }
}

TEST(Actors, EventRaceHasBothOutcomes) {
  const Configuration c = parse_config(slurp("event-race.config"));
  Interleavings all;
  explore(c, false, all);
  EXPECT_EQ(all.maximal, 2u);
  EXPECT_EQ(all.with_event, 1u);
  const ObserveResult o = observe_event(c, 32, 100);
  EXPECT_EQ(o.observation, Observation::Some);
  EXPECT_GT(o.runs_with_event, 0u);
  EXPECT_LT(o.runs_with_event, 32u);
}

TEST(Actors, EventInEveryRunIsAllSampled) {
  const Configuration c =
      parse_config("(config (receptionists a) (actors (a (ready (lambda (m) (event ping))))) (messages (a 1)))");
  Interleavings all;
  explore(c, false, all);
  EXPECT_EQ(all.maximal, all.with_event);
  const ObserveResult o = observe_event(c, 8, 50);
  EXPECT_EQ(o.observation, Observation::AllSampled);
  EXPECT_EQ(o.runs_per_tag.at("ping"), 8u);
}

TEST(Actors, SequentialStepsMatchTheReducer) {
  TermGen gen(61);
  std::size_t compared = 0;
  for (int i = 0; i < 400; ++i) {
    const Expr e = gen.expr(4, {});
    if (is_value(e)) continue;
    const Outcome o = eval(e, 500);
    if (o.kind == OutcomeKind::Timeout || !o.memory().empty()) continue;
    ++compared;
    Configuration c;
    c.actors["a"] = ActorState::busy(e);
    RoundRobinScheduler rr;
    const RunResult r = run(c, rr, 1000);
    ASSERT_TRUE(r.quiescent);
    ASSERT_EQ(r.trace.size(), o.is_value() ? o.steps : o.steps + 1) << to_string(e);
    const bool errored = !r.trace.empty() && r.trace.back().label.kind == Label::Kind::Error;
    EXPECT_EQ(errored, o.kind == OutcomeKind::Stuck) << to_string(e);
    EXPECT_EQ(r.final.actors.at("a").tag, ActorState::Tag::Inert);
  }
  EXPECT_GT(compared, 100u);
}

TEST(Actors, TickerReplyCountsScriptedTicks) {
  const Configuration base = ticker_config();
  for (std::size_t n : {0u, 1u, 3u, 7u}) {
    ScriptedScheduler s(ticker_script(n, "k"));
    const RunResult r = run(base, s, 100000);
    const auto reply = first_reply(r.trace, "k");
    ASSERT_TRUE(reply) << n;
    ASSERT_TRUE(reply->is(Op::Nat));
    EXPECT_EQ(reply->nat(), n);
    EXPECT_TRUE(s.finished());
    EXPECT_TRUE(audit_interface_monotone(base, r.trace));
    EXPECT_TRUE(audit_anonymous_privacy(r));
  }
}

TEST(Actors, TickerSampleFilesAgree) {
  const Configuration c = parse_config(slurp("ticker-idle.config"));
  ScriptedScheduler s(parse_script(slurp("ticker-3.script")));
  const RunResult r = run(c, s, 10000);
  const auto reply = first_reply(r.trace, "k");
  ASSERT_TRUE(reply);
  EXPECT_EQ(to_string(*reply), "3");
}

TEST(Actors, RandomRunsReplyWithSomeCountAndReplay) {
  const Configuration c = ticker_config("k");
  std::set<std::uint64_t> replies;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    RandomScheduler s(seed);
    const RunResult r = run(c, s, 3000);
    const auto reply = first_reply(r.trace, "k");
    ASSERT_TRUE(reply) << seed;
    ASSERT_TRUE(reply->is(Op::Nat));
    replies.insert(reply->nat());
    EXPECT_TRUE(audit_interface_monotone(c, r.trace));
    EXPECT_TRUE(audit_anonymous_privacy(r));
    EXPECT_EQ(render_config(replay(c, r.trace)), render_config(r.final));
  }
  EXPECT_GT(replies.size(), 2u);
  EXPECT_TRUE(replies.count(0));
}

TEST(Actors, RoundRobinIsFair) {
  const Configuration c = ticker_config("k");
  RoundRobinScheduler rr;
  const RunResult r = run(c, rr, 2000);
  EXPECT_TRUE(first_reply(r.trace, "k").has_value());
  EXPECT_LE(r.max_delivery_wait, rr.window());
}

TEST(Actors, BecomeSpawnsAnonymousContinuation) {
  const Configuration c = parse_config(
      "(config (receptionists a) (externals o)"
      " (actors (a (ready (lambda (m) (seq (become (lambda (n) nil)) (send o m))))))"
      " (messages (a 5)))");
  RoundRobinScheduler rr;
  const RunResult r = run(c, rr, 100);
  EXPECT_TRUE(r.quiescent);
  bool anon = false;
  for (const auto& [name, s] : r.final.actors) anon |= s.anonymous;
  EXPECT_TRUE(anon);
  EXPECT_TRUE(audit_anonymous_privacy(r));
  EXPECT_EQ(to_string(*first_reply(r.trace, "o")), "5");
  EXPECT_EQ(r.final.actors.at("a").tag, ActorState::Tag::Ready);
}

TEST(Actors, OutputExportsActorNames) {
  const Configuration c = parse_config(
      "(config (receptionists a) (externals o)"
      " (actors (a (ready (lambda (m) (letactor ((b (lambda (x) nil))) (send o b))))))"
      " (messages (a nil)))");
  RoundRobinScheduler rr;
  const RunResult r = run(c, rr, 100);
  EXPECT_TRUE(r.final.receptionists.count("b"));
  EXPECT_TRUE(audit_interface_monotone(c, r.trace));
}

TEST(Actors, StuckActorsGoInert) {
  Configuration c = parse_config("(config (actors (a (busy (send 3 nil)))))");
  const Label l = actor_step(c, Choice::internal("a"));
  EXPECT_EQ(l.kind, Label::Kind::Error);
  EXPECT_EQ(c.actors.at("a").tag, ActorState::Tag::Inert);
  EXPECT_THROW(actor_step(c, Choice::internal("a")), Error);
}

TEST(Actors, ConfigAndScriptErrors) {
  EXPECT_THROW(parse_config("(config (receptionists q))"), Error);
  EXPECT_THROW(parse_config("(config (actors (a (ready 3))))"), Error);
  EXPECT_THROW(parse_config("(config (actors (a (ready (lambda (m) (send zz m))))))"), Error);
  EXPECT_THROW(parse_config("(config (messages (nobody 1)))"), Error);
  EXPECT_THROW(parse_script("(teleport a)"), ParseError);
  EXPECT_THROW(parse_script("(in a (mk 1))"), ParseError);
  ScriptedScheduler s(parse_script("(deliver 9)"));
  EXPECT_THROW(run(ticker_config(), s, 100), ScriptError);
}

}  // namespace
