#include <gtest/gtest.h>

#include <fstream>
#include <sstream>
#include <string>

#include "effects/laws.hpp"

namespace {

using namespace effects;

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

LawResult check(const Law& law, std::size_t instances = 15, std::size_t cases = 150, std::uint64_t seed = 1) {
  EnumConfig cfg;
  cfg.max_steps = 1000;
  LawOptions opts;
  opts.instances = instances;
  opts.cases_per_instance = cases;
  opts.seed = seed;
  return law_check(law, cfg, opts);
}

TEST(Laws, CatalogParses) {
  const auto& laws = builtin_laws();
  EXPECT_GE(laws.size(), 13u);
  for (const char* name : {"eq-refl", "set-absorption", "mk-garbage", "mk-let-fusion", "moggi-i", "moggi-ii",
                           "moggi-iii", "eta-general", "subst-into-equals", "common-reduct",
                           "reduction-preservation"})
    EXPECT_NE(find_law(laws, name), nullptr) << name;
  EXPECT_EQ(find_law(laws, "no-such-law"), nullptr);
}

TEST(Laws, MemoryLawsHoldUnderStrongIso) {
  const auto& laws = builtin_laws();
  for (const char* name : {"eq-refl", "set-absorption", "mk-garbage", "mk-let-fusion"}) {
    const LawResult r = check(*find_law(laws, name), 10, 2000);
    EXPECT_TRUE(r.verdict.is_holds()) << name << ": " << headline(r.verdict);
  }
}

TEST(Laws, EqReflexivityNeedsFirstOrderDomain) {
  // eq on two copies of a lambda answers nil, so the law fails once lambdas
  // are substituted for x.
  Law law = *find_law(builtin_laws(), "eq-refl");
  law.first_order = false;
  const LawResult r = check(law, 1, 20000);
  EXPECT_TRUE(r.verdict.is_fails());
}

TEST(Laws, LetLawsHoldUnderCiu) {
  const auto& laws = builtin_laws();
  for (const char* name : {"moggi-i", "moggi-ii", "moggi-iii"}) {
    const LawResult r = check(*find_law(laws, name));
    EXPECT_FALSE(r.verdict.is_fails()) << name << ": " << headline(r.verdict);
    EXPECT_TRUE(r.as_expected) << name;
    EXPECT_EQ(r.instances, 15u) << name;
  }
}

TEST(Laws, ExpectedFailuresComeWithTheirWitnessUse) {
  const auto& laws = builtin_laws();
  for (const char* name : {"eta-general", "subst-into-equals", "values-not-strongly-isomorphic"}) {
    const LawResult r = check(*find_law(laws, name), 5, 20000);
    EXPECT_TRUE(r.verdict.is_fails()) << name;
    EXPECT_TRUE(r.as_expected) << name << ": " << headline(r.verdict);
    ASSERT_TRUE(r.verdict.witness) << name;
    EnumConfig cfg;
    cfg.max_steps = 1000;
    EXPECT_TRUE(witness_replays(*r.verdict.witness, cfg)) << name;
  }
}

TEST(Laws, ValuesCanBeEquivalentWithoutBeingIsomorphic) {
  const LawResult r = check(*find_law(builtin_laws(), "values-operationally-equivalent"), 1, 3000);
  EXPECT_TRUE(r.verdict.is_holds()) << headline(r.verdict);
}

TEST(Laws, ReductionLawsHold) {
  const auto& laws = builtin_laws();
  for (const char* name : {"common-reduct", "reduction-preservation"}) {
    const LawResult r = check(*find_law(laws, name), 20, 100);
    EXPECT_FALSE(r.verdict.is_fails()) << name << ": " << headline(r.verdict);
  }
}

TEST(Laws, CommonReducts) {
  EXPECT_TRUE(have_common_reduct(parse("(let ((v y)) (add1 v))"), parse("(app (lambda (v) (add1 v)) y)")));
  EXPECT_FALSE(have_common_reduct(parse("(add1 1)"), parse("(add1 2)")));
  EXPECT_TRUE(contracts_symbolically(parse("(app (lambda (x) x) y)")));
  EXPECT_FALSE(contracts_symbolically(parse("(mk 1)")));
}

TEST(Laws, SampleFileLawsBehaveAsDeclared) {
  const auto laws = parse_laws(slurp(std::string(EFFECTS_SAMPLES_DIR) + "/laws.sexp"));
  ASSERT_EQ(laws.size(), 4u);
  for (const Law& law : laws) {
    const LawResult r = check(law, 10, 300);
    EXPECT_TRUE(r.as_expected) << law.name << ": " << headline(r.verdict);
  }
}

TEST(Laws, ParseErrors) {
  EXPECT_THROW(parse_laws("(law x (oracle magic) (lhs 1) (rhs 1))"), ParseError);
  EXPECT_THROW(parse_laws("(law x (lhs 1))"), ParseError);
  EXPECT_THROW(parse_laws("(law x (meta (e sort)) (lhs 1) (rhs 1))"), ParseError);
  EXPECT_THROW(parse_laws("(law x (side (distinct a a)) (lhs 1) (rhs 1))"), ParseError);
  EXPECT_THROW(parse_laws("(rule x)"), ParseError);
}

TEST(Laws, SameSeedSameResult) {
  const Law& law = *find_law(builtin_laws(), "moggi-iii");
  const LawResult a = check(law, 5, 100, 9);
  const LawResult b = check(law, 5, 100, 9);
  EXPECT_EQ(a.verdict.kind, b.verdict.kind);
  EXPECT_EQ(a.verdict.cases, b.verdict.cases);
  EXPECT_EQ(a.verdict.definite, b.verdict.definite);
}

}  // namespace
