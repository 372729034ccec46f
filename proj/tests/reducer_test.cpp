#include <gtest/gtest.h>

#include <cstdint>
#include <string>

#include "effects/generate.hpp"
#include "effects/programs.hpp"
#include "effects/reducer.hpp"

namespace {

using namespace effects;

std::uint64_t factorial(std::uint64_t n) { return n == 0 ? 1 : n * factorial(n - 1); }

Outcome run(const char* text, std::size_t budget = 2000) { return eval(parse(text), budget); }

std::string value_of(const char* text) {
  const Outcome o = run(text);
  EXPECT_EQ(o.kind, OutcomeKind::Value) << text << " -> " << outcome_sexp(o);
  return to_string(o.value());
}

TEST(Reducer, DeltaRules) {
  EXPECT_EQ(value_of("(add1 4)"), "5");
  EXPECT_EQ(value_of("(sub1 4)"), "3");
  EXPECT_EQ(value_of("(nat? 0)"), "t");
  EXPECT_EQ(value_of("(nat? nil)"), "nil");
  EXPECT_EQ(value_of("(eq 2 2)"), "t");
  EXPECT_EQ(value_of("(eq 2 3)"), "nil");
  EXPECT_EQ(value_of("(eq nil nil)"), "t");
  EXPECT_EQ(value_of("(eq (lambda (x) x) (lambda (x) x))"), "nil");
  EXPECT_EQ(value_of("(eq (pair 1 1) (pair 1 1))"), "nil");
  EXPECT_EQ(value_of("(fst (pair 1 2))"), "1");
  EXPECT_EQ(value_of("(snd (pair 1 2))"), "2");
  EXPECT_EQ(value_of("(if nil 1 2)"), "2");
  EXPECT_EQ(value_of("(if 0 1 2)"), "1");
  EXPECT_EQ(value_of("(let ((x 3)) (add1 x))"), "4");
  EXPECT_EQ(value_of("(seq 1 2 3)"), "3");
}

TEST(Reducer, MemoryRules) {
  EXPECT_EQ(value_of("(let ((z (mk 1))) (seq (set z 2) (get z)))"), "2");
  EXPECT_EQ(value_of("(cell? (mk nil))"), "t");
  EXPECT_EQ(value_of("(cell? 0)"), "nil");
  EXPECT_EQ(value_of("(let ((a (mk 0))) (let ((b (mk 0))) (eq a b)))"), "nil");
  EXPECT_EQ(value_of("(let ((a (mk 0))) (eq a a))"), "t");
  const Outcome o = run("(mk (mk nil))");
  ASSERT_TRUE(o.is_value());
  EXPECT_EQ(o.memory().size(), 2u);
  EXPECT_EQ(to_string(o.value()), "z1");
  EXPECT_EQ(to_string(o.memory().get("z1")), "z0");
}

TEST(Reducer, FreshCellsAvoidFreeNames) {
  Description d{Memory{{"z0", Expr::nil()}}, parse("(pair (lambda (q) z1) (mk t))")};
  const Outcome o = eval(d, 100);
  ASSERT_TRUE(o.is_value());
  EXPECT_EQ(to_string(o.value()), "(pair (lambda (q) z1) z2)");
}

TEST(Reducer, StuckStates) {
  for (const char* s : {"(sub1 0)", "(add1 nil)", "(get 1)", "(set t 1)", "(fst 3)", "(app 1 2)",
                        "(send 1 2)", "(event e)"}) {
    const Outcome o = run(s);
    EXPECT_EQ(o.kind, OutcomeKind::Stuck) << s;
  }
  // Stuck in context keeps the surrounding term.
  const Outcome o = run("(pair 1 (add1 (get 2)))");
  EXPECT_EQ(o.kind, OutcomeKind::Stuck);
  EXPECT_EQ(to_string(o.last.expr), "(pair 1 (add1 (get 2)))");
}

TEST(Reducer, LeftFirstOrder) {
  // The left argument's write is visible to the right argument.
  EXPECT_EQ(value_of("(let ((z (mk 0))) (pair (set z 1) (get z)))"), "(pair nil 1)");
  EXPECT_EQ(value_of("(let ((z (mk 0))) (eq (seq (set z 5) 5) (get z)))"), "t");
}

TEST(Reducer, FactorialMatchesOracle) {
  const Expr fact = programs::fix(programs::f_fact());
  for (std::uint64_t n = 0; n <= 6; ++n) {
    const Outcome o = eval(Description{{}, Expr::app(fact, Expr::natural(n))}, 200000);
    ASSERT_EQ(o.kind, OutcomeKind::Value) << n;
    ASSERT_TRUE(o.value().is(Op::Nat));
    EXPECT_EQ(o.value().nat(), factorial(n)) << n;
  }
}

TEST(Reducer, CounterCounts) {
  const Expr prog = Expr::let("c", programs::counter(),
                              parse("(pair (app c nil) (pair (app c nil) (app c nil)))"));
  const Outcome ok = eval(prog, 1000);
  ASSERT_TRUE(ok.is_value());
  EXPECT_EQ(to_string(ok.value()), "(pair 0 (pair 1 2))");
}

TEST(Reducer, OmegaTimesOutOrDiverges) {
  const Expr omega = parse("(app (lambda (x) (app x x)) (lambda (x) (app x x)))");
  const Outcome t = eval(omega, 100);
  EXPECT_EQ(t.kind, OutcomeKind::Timeout);
  EXPECT_EQ(t.steps, 100u);
  EvalOptions opts;
  opts.max_steps = 100;
  opts.detect_loops = true;
  const Outcome d = eval(Description{{}, omega}, opts);
  EXPECT_EQ(d.kind, OutcomeKind::Diverged);
  EXPECT_LT(d.steps, 100u);
}

TEST(Reducer, LoopDetectionIgnoresGrowingStates) {
  // Allocates forever; no state repeats, so detection must not fire.
  const Expr grow = Expr::app(programs::fix(parse("(lambda (f) (lambda (n) (seq (mk n) (app f n))))")),
                              Expr::natural(0));
  EvalOptions opts;
  opts.max_steps = 500;
  opts.detect_loops = true;
  EXPECT_EQ(eval(Description{{}, grow}, opts).kind, OutcomeKind::Timeout);
}

TEST(Reducer, TraceIsAChainOfSteps) {
  TermGen gen(17);
  for (int i = 0; i < 200; ++i) {
    const Expr e = gen.expr(4, {});
    const Trace t = eval_with_trace(Description{{}, e}, 300);
    ASSERT_EQ(t.visited.size(), t.outcome.steps);
    if (!t.visited.empty()) EXPECT_EQ(t.visited.front().expr, e);
    for (std::size_t k = 0; k < t.visited.size(); ++k) {
      const StepResult r = step(t.visited[k]);
      ASSERT_EQ(r.status, StepStatus::Stepped);
      const Description& expected = k + 1 < t.visited.size() ? t.visited[k + 1] : t.outcome.last;
      EXPECT_EQ(r.next.expr, expected.expr) << to_string(e);
      EXPECT_EQ(r.next.memory, expected.memory) << to_string(e);
    }
  }
}

TEST(Reducer, StepIsDeterministicAndAgreesWithEval) {
  TermGen gen(29);
  for (int i = 0; i < 200; ++i) {
    Description d{{}, gen.expr(4, {})};
    const Outcome o = eval(d, 300);
    std::size_t n = 0;
    for (; n < 300; ++n) {
      const StepResult r = step(d);
      if (r.status != StepStatus::Stepped) break;
      d = r.next;
    }
    EXPECT_EQ(n, o.steps);
    EXPECT_EQ(d.expr, o.last.expr);
  }
}

}  // namespace
