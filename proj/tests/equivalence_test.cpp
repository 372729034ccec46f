#include <gtest/gtest.h>

#include <cstdint>
#include <set>
#include <string>

#include "effects/equivalence.hpp"
#include "effects/generate.hpp"
#include "effects/programs.hpp"

namespace {

using namespace effects;

// Number of first-order values of nesting depth <= d over b base values.
std::size_t data_values(std::size_t b, std::size_t d) {
  return d == 1 ? b : b + data_values(b, d - 1) * data_values(b, d - 1);
}

std::size_t value_count(const EnumConfig& cfg, std::size_t cells) {
  const std::size_t b = cfg.atoms.size() + cells;
  return data_values(b, cfg.value_depth) + cfg.probe_pool.size() + 2 * cells;
}

std::uint64_t pow(std::uint64_t b, std::uint64_t e) {
  std::uint64_t r = 1;
  while (e--) r *= b;
  return r;
}

TEST(Enumerate, ValueCountsMatchRecurrence) {
  EnumConfig cfg;
  EXPECT_EQ(enumerate_values(cfg, {}).size(), 38u);
  for (std::size_t depth = 1; depth <= 3; ++depth) {
    cfg.value_depth = depth;
    for (const Memory& m : {Memory{}, Memory{{"z0", Expr::nil()}},
                            Memory{{"z0", Expr::nil()}, {"z1", Expr::t()}, {"z2", Expr::var("z0")}}}) {
      const auto vals = enumerate_values(cfg, m);
      EXPECT_EQ(vals.size(), value_count(cfg, m.size())) << depth << " " << m.size();
      std::set<std::string> distinct;
      for (const auto& v : vals) {
        EXPECT_TRUE(is_value(v));
        distinct.insert(to_string(v));
      }
      EXPECT_EQ(distinct.size(), vals.size());
    }
  }
  cfg.value_depth = 2;
  EXPECT_EQ(enumerate_values(cfg, Memory{{"z0", Expr::nil()}, {"z1", Expr::nil()}, {"z2", Expr::nil()}}).size(),
            86u);
  cfg.first_order = true;
  EXPECT_EQ(enumerate_values(cfg, Memory{{"z0", Expr::nil()}}).size(), 6u);
}

TEST(Enumerate, MemoryCountsMatchFormula) {
  EnumConfig cfg;
  for (std::size_t c = 0; c <= 3; ++c) {
    cfg.max_cells = c;
    std::uint64_t expected = 0;
    for (std::uint64_t k = 0; k <= c; ++k) expected += pow(cfg.atoms.size() + k, k);
    const auto ms = enumerate_memories(cfg);
    EXPECT_EQ(ms.size(), expected);
    std::set<std::string> distinct;
    for (const auto& m : ms) distinct.insert(memory_literal(m));
    EXPECT_EQ(distinct.size(), ms.size());
  }
  cfg.max_cells = 3;
  EXPECT_EQ(enumerate_memories(cfg).size(), 568u);
  EXPECT_TRUE(enumerate_memories(cfg).front().empty());
  // Cell names skip anything to avoid.
  for (const auto& m : enumerate_memories(cfg, {"z0"}))
    EXPECT_FALSE(m.contains("z0"));
}

TEST(Enumerate, UseCountsMatchFormula) {
  EnumConfig cfg;
  const std::size_t frames = 29;
  EXPECT_EQ(enumerate_uses(cfg).size(), 1 + frames + frames * frames);
  EXPECT_EQ(enumerate_uses(cfg).size(), 871u);
  cfg.first_order = true;
  const std::size_t fo = 16;
  EXPECT_EQ(enumerate_uses(cfg).size(), 1 + fo + fo * fo);
  cfg.first_order = false;
  cfg.ctx_depth = 1;
  for (const auto& u : enumerate_uses(cfg)) EXPECT_TRUE(is_reduction_context(u.expr()));
}

EnumConfig small() {
  EnumConfig cfg;
  cfg.value_depth = 1;
  cfg.max_cells = 1;
  cfg.ctx_depth = 1;
  cfg.max_steps = 400;
  cfg.max_cases = 3000;
  return cfg;
}

Verdict iso(const char* a, const char* b, const EnumConfig& cfg = EnumConfig{}) {
  return strong_iso(parse(a), parse(b), cfg);
}
Verdict ciu(const char* a, const char* b, const EnumConfig& cfg = small()) {
  return ciu_test(parse(a), parse(b), cfg);
}

TEST(StrongIso, KnownPairs) {
  EXPECT_TRUE(iso("(let ((x 1)) (pair x x))", "(pair 1 1)").is_holds());
  EXPECT_TRUE(iso("(seq (mk 1) 2)", "2").is_holds());
  EXPECT_TRUE(iso("(mk nil)", "(seq (mk t) (mk nil))").is_holds());
  EXPECT_TRUE(iso("(let ((z (mk 0))) (seq (set z 1) z))", "(mk 1)").is_holds());
  EXPECT_TRUE(iso("(if (cell? x) (get x) nil)", "(if (cell? x) (get x) nil)").is_holds());
  EXPECT_TRUE(iso("(sub1 0)", "(fst 1)").is_holds());
  EXPECT_TRUE(iso("(mk 0)", "(mk 1)").is_fails());
  EXPECT_TRUE(iso("(mk nil)", "nil").is_fails());
  EXPECT_TRUE(iso("(pair (mk 0) (mk 0))", "(let ((z (mk 0))) (pair z z))").is_fails());
}

TEST(StrongIso, WritesToExistingCellsMatter) {
  const Verdict v = iso("(seq (if (cell? x) (set x 1) nil) nil)", "nil");
  ASSERT_TRUE(v.is_fails());
  ASSERT_TRUE(v.witness);
  EXPECT_TRUE(v.witness->memory.size() >= 1);
  EXPECT_TRUE(witness_replays(*v.witness, EnumConfig{}));
}

TEST(Ciu, KnownPairs) {
  EXPECT_TRUE(ciu("(lambda (x) x)", "(lambda (y) y)").is_holds());
  EXPECT_TRUE(ciu("(app (lambda (x) (add1 x)) 1)", "2").is_holds());
  EXPECT_TRUE(ciu("(mk 0)", "(mk 0)").is_holds());
  EXPECT_TRUE(ciu("1", "2").is_fails());
  EXPECT_TRUE(ciu("(eq (mk x) (mk x))", "t").is_fails());
  EXPECT_TRUE(ciu("(eq (mk x) (mk x))", "nil").is_holds());
  EXPECT_TRUE(ciu("(lambda (x) nil)", "(lambda (x) (sub1 0))").is_fails());
}

TEST(Ciu, LocalStateSeparatesEtaExpansion) {
  EnumConfig cfg = small();
  const Verdict v = ciu_test(programs::eta_thunk(), programs::eta_expanded_thunk(), cfg);
  ASSERT_TRUE(v.is_fails());
  ASSERT_TRUE(v.witness && v.witness->use);
  EXPECT_TRUE(witness_replays(*v.witness, cfg));
  EXPECT_EQ(ciu_compare(v.witness->outcomes[0], v.witness->outcomes[1]), CaseResult::Disagree);
}

TEST(Ciu, TimeoutsGiveUnknown) {
  EnumConfig cfg = small();
  cfg.max_steps = 30;
  const Expr slow = Expr::app(programs::fix(programs::f_zero()), Expr::natural(50));
  const Verdict v = ciu_test(slow, Expr::natural(0), cfg);
  EXPECT_TRUE(v.is_unknown()) << headline(v);
  EXPECT_GT(v.indeterminate, 0u);
}

TEST(Ciu, SamplingIsSeedDeterministic) {
  EnumConfig cfg;
  cfg.max_cases = 400;
  cfg.seed = 3;
  const Verdict a = ciu_test(parse("(pair x y)"), parse("(pair x y)"), cfg);
  const Verdict b = ciu_test(parse("(pair x y)"), parse("(pair x y)"), cfg);
  EXPECT_TRUE(a.is_holds());
  EXPECT_EQ(a.cases, 400u);
  EXPECT_EQ(a.cases, b.cases);
  EXPECT_EQ(a.definite, b.definite);
}

// Rewrites that only add administrative steps.
Expr pad(TermGen& gen, const Expr& e) {
  switch (gen.below(4)) {
    case 0: return Expr::seq({Expr::nil(), e});
    case 1: return Expr::let("w", e, Expr::var("w"));
    case 2: return Expr::if_(Expr::t(), e, Expr::nil());
    default: return Expr::fst(Expr::pair(e, Expr::nil()));
  }
}

TEST(Oracles, ReflexiveAndAdministrativeStepsNeverSeparate) {
  TermGen gen(41, {"w"});
  const EnumConfig cfg = small();
  for (int i = 0; i < 40; ++i) {
    const Expr e = gen.expr(3, {"p"});
    EXPECT_FALSE(ciu_test(e, e, cfg).is_fails()) << to_string(e);
    const Expr padded = pad(gen, e);
    EXPECT_FALSE(strong_iso(e, padded, cfg).is_fails()) << to_string(e);
    EXPECT_FALSE(ciu_test(e, padded, cfg).is_fails()) << to_string(e);
  }
}

TEST(Oracles, StrongIsoImpliesCiu) {
  TermGen gen(43);
  const EnumConfig cfg = small();
  std::size_t both = 0;
  for (int i = 0; i < 150; ++i) {
    const Expr a = gen.expr(2, {});
    const Expr b = gen.expr(2, {});
    const Verdict s = strong_iso(a, b, cfg);
    if (!s.is_holds()) continue;
    ++both;
    EXPECT_FALSE(ciu_test(a, b, cfg).is_fails()) << to_string(a) << " vs " << to_string(b);
  }
  EXPECT_GT(both, 5u);
}

}  // namespace
