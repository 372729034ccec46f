#include <gtest/gtest.h>

#include <fstream>
#include <sstream>
#include <string>

#include "effects/logic.hpp"
#include "effects/programs.hpp"

namespace {

using namespace effects;

LogicConfig small_config() {
  LogicConfig lc;
  lc.enums.value_depth = 1;
  lc.enums.max_cells = 1;
  lc.enums.max_steps = 500;
  return lc;
}

Verdict sat(const Checker& ck, const char* f, const Memory& m = {}, const Substitution& s = {}) {
  return ck.satisfies(m, parse_formula(f), s);
}

TEST(Formulas, PrintParseRoundTrip) {
  for (const char* f : {
           "(equiv (get x) 1)",
           "(member x (Cell Nat))",
           "(forall y (not (equiv x y)))",
           "(exists (c (Cell Nat)) (equiv (get c) 0))",
           "(ctx (let ((x (mk v))) _) (and (equiv (cell? x) t) (defined (get x))))",
           "(implies (not-expand e) (or (not-write e) false))",
           "(subset Nat Val)",
           "(member f (-> Nat (set-of n (not (equiv n 0)))))",
       }) {
    const FormulaPtr phi = parse_formula(f);
    EXPECT_EQ(to_string(parse_formula(to_string(phi))), to_string(phi)) << f;
  }
}

TEST(Formulas, ParseErrors) {
  EXPECT_THROW(parse_formula("(equiv 1)"), ParseError);
  EXPECT_THROW(parse_formula("(frobnicate x)"), ParseError);
  EXPECT_THROW(parse_class("(-> Nat)"), ParseError);
  // Contexts must not put the hole under a lambda.
  EXPECT_THROW(parse_formula("(ctx (lambda (x) _) true)"), Error);
}

TEST(Formulas, FreeVariables) {
  const FormulaPtr phi = parse_formula("(forall y (ctx (let ((x (mk v))) _) (not (equiv x y))))");
  EXPECT_EQ(free_vars(phi), std::vector<std::string>{"v"});
  const FormulaPtr psi = parse_formula("(member f (set-of n (equiv n k)))");
  EXPECT_EQ(free_vars(psi), (std::vector<std::string>{"f", "k"}));
}

// Strong Kleene tables written out by hand.
enum class K { H, F, U };
K k_and(K a, K b) {
  if (a == K::F || b == K::F) return K::F;
  if (a == K::U || b == K::U) return K::U;
  return K::H;
}
K k_or(K a, K b) {
  if (a == K::H || b == K::H) return K::H;
  if (a == K::U || b == K::U) return K::U;
  return K::F;
}
K k_not(K a) { return a == K::H ? K::F : a == K::F ? K::H : K::U; }
K kind_of(const Verdict& v) { return v.is_holds() ? K::H : v.is_fails() ? K::F : K::U; }

TEST(Formulas, ConnectivesAreStrongKleene) {
  LogicConfig lc = small_config();
  lc.enums.max_steps = 50;
  const Checker ck(lc);
  // An evaluation that runs out of budget gives an unknown atom.
  const std::string slow =
      "(equiv " + to_string(Expr::app(programs::fix(programs::f_zero()), Expr::natural(500))) + " 0)";
  const std::string atoms[] = {"true", "false", slow};
  const K truth[] = {K::H, K::F, K::U};
  ASSERT_EQ(kind_of(sat(ck, slow.c_str())), K::U);
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(kind_of(sat(ck, ("(not " + atoms[i] + ")").c_str())), k_not(truth[i]));
    for (int j = 0; j < 3; ++j) {
      const std::string a = atoms[i], b = atoms[j];
      EXPECT_EQ(kind_of(sat(ck, ("(and " + a + " " + b + ")").c_str())), k_and(truth[i], truth[j])) << i << j;
      EXPECT_EQ(kind_of(sat(ck, ("(or " + a + " " + b + ")").c_str())), k_or(truth[i], truth[j])) << i << j;
      EXPECT_EQ(kind_of(sat(ck, ("(implies " + a + " " + b + ")").c_str())), k_or(k_not(truth[i]), truth[j]))
          << i << j;
    }
  }
}

TEST(Atoms, Equivalence) {
  const Checker ck(small_config());
  const Memory m{{"z0", Expr::natural(3)}, {"z1", Expr::natural(3)}};
  EXPECT_TRUE(sat(ck, "(equiv (get z0) (get z1))", m).is_holds());
  EXPECT_TRUE(sat(ck, "(equiv z0 z1)", m).is_fails());
  EXPECT_TRUE(sat(ck, "(equiv (pair 1 z0) (pair 1 z0))", m).is_holds());
  EXPECT_TRUE(sat(ck, "(equiv (add1 2) 3)").is_holds());
  EXPECT_TRUE(sat(ck, "(equiv (sub1 0) (fst 1))").is_holds());
  EXPECT_TRUE(sat(ck, "(equiv (sub1 0) 0)").is_fails());
  EXPECT_TRUE(sat(ck, "(equiv (lambda (x) x) (lambda (y) y))").is_holds());
  EXPECT_TRUE(sat(ck, "(equiv (lambda (x) x) (lambda (x) nil))").is_fails());
  EXPECT_TRUE(sat(ck, "(defined (get z0))", m).is_holds());
  EXPECT_TRUE(sat(ck, "(defined (get 0))").is_fails());
  EXPECT_TRUE(sat(ck, "(equiv x 2)", {}, {{"x", Expr::natural(2)}}).is_holds());
}

TEST(Contexts, AllocationAxiomOnSmallDomain) {
  const Checker ck(small_config());
  const Verdict v = ck.valid(parse_formula(
      "(forall y (ctx (let ((x (mk v))) _)"
      " (and (not (equiv x y)) (equiv (cell? x) t) (equiv (get x) v))))"));
  EXPECT_TRUE(v.is_holds()) << headline(v);
  // Claiming the new cell equals an old value must fail.
  const Verdict w = ck.valid(parse_formula("(exists y (ctx (let ((x (mk v))) _) (equiv x y)))"));
  EXPECT_TRUE(w.is_fails());
}

TEST(Contexts, AssignmentIsVisibleInTheHole) {
  const Checker ck(small_config());
  EXPECT_TRUE(sat(ck, "(ctx (let ((x (mk 0))) (seq (set x 1) _)) (equiv (get x) 1))").is_holds());
  EXPECT_TRUE(sat(ck, "(ctx (let ((x (mk 0))) (seq (set x 1) _)) (equiv (get x) 0))").is_fails());
  // A hole that is never reached makes any assertion hold.
  EXPECT_TRUE(sat(ck, "(ctx (if nil _ nil) (equiv 0 1))").is_holds());
  EXPECT_TRUE(sat(ck, "(ctx (seq (sub1 0) _) false)").is_holds());
}

TEST(Classes, Membership) {
  const Checker ck(small_config());
  const Memory m{{"z0", Expr::natural(3)}, {"z1", Expr::nil()}};
  auto member = [&](const char* v, const char* k) { return ck.class_member(parse(v), parse_class(k), m); };
  EXPECT_TRUE(member("3", "Nat").is_holds());
  EXPECT_TRUE(member("nil", "Nat").is_fails());
  EXPECT_TRUE(member("nil", "Nil").is_holds());
  EXPECT_TRUE(member("z0", "(Cell Nat)").is_holds());
  EXPECT_TRUE(member("z1", "(Cell Nat)").is_fails());
  EXPECT_TRUE(member("z1", "Cell").is_holds());
  EXPECT_TRUE(member("4", "(set-of n (not (equiv n 0)))").is_holds());
  EXPECT_TRUE(member("0", "(set-of n (not (equiv n 0)))").is_fails());
  EXPECT_TRUE(member("(lambda (n) (add1 n))", "(-> Nat Nat)").is_holds());
  EXPECT_TRUE(member("(lambda (n) (sub1 n))", "(-> Nat Nat)").is_fails());
  EXPECT_TRUE(member("(lambda (x) (mk x))", "(-mu> Nat (Cell Nat))").is_holds());
  EXPECT_TRUE(member("(lambda (x) (get x))", "(-> (Cell Nat) Nat)").is_holds());
}

TEST(Classes, StrictPartialFunctions) {
  const Checker ck(small_config());
  const ClassPtr k = parse_class("(strict-partial Nat Nat)");
  const Expr partial = parse(
      "(lambda (n) (if (eq n 0) 0 (app (lambda (x) (app x x)) (lambda (x) (app x x)))))");
  EXPECT_TRUE(ck.class_member(partial, k, {}).is_holds());
  // Total on every tested argument: membership cannot be confirmed.
  EXPECT_TRUE(ck.class_member(parse("(lambda (n) n)"), k, {}).is_unknown());
  EXPECT_TRUE(ck.class_member(parse("(lambda (n) nil)"), k, {}).is_fails());
}

TEST(Classes, FixedPointOfZeroFunctional) {
  const Checker ck(small_config());
  const Expr g = Expr::app(programs::yv(), programs::f_zero());
  EXPECT_TRUE(ck.class_member(g, parse_class("(-> Nat Nat)"), {}).is_holds());
}

TEST(Effects, TaxonomyOnSmallDomain) {
  const Checker ck(small_config());
  const bool expect_write[] = {true, true, false, false};
  const bool expect_expand[] = {true, false, true, false};
  for (int j = 0; j < 4; ++j) {
    const EffectProfile p = ck.effect_profile(programs::taxonomy(j));
    EXPECT_EQ(p.not_write.is_holds(), expect_write[j]) << j << " " << headline(p.not_write);
    EXPECT_EQ(p.not_write.is_fails(), !expect_write[j]) << j;
    EXPECT_EQ(p.not_expand.is_holds(), expect_expand[j]) << j << " " << headline(p.not_expand);
    EXPECT_EQ(p.not_expand.is_fails(), !expect_expand[j]) << j;
  }
}

TEST(Files, SampleFormulasParse) {
  std::ifstream in(std::string(EFFECTS_SAMPLES_DIR) + "/classes.formulas");
  std::stringstream ss;
  ss << in.rdbuf();
  const FormulaFile file = parse_formula_file(ss.str());
  EXPECT_EQ(file.assertions.size(), 6u);
  EXPECT_EQ(file.theory.classes.count("Pos"), 1u);
  EXPECT_EQ(file.theory.pool.size(), 2u);
  const Checker ck(small_config(), file.theory);
  EXPECT_TRUE(ck.valid(parse_formula("(member (lambda (n) (add1 n)) (-> Nat Pos))")).is_holds());
  EXPECT_THROW(parse_formula_file("(pool x)"), ParseError);
}

TEST(Principles, NoViolationsOnSmallDomain) {
  const Checker ck(small_config());
  for (int which = 1; which <= 3; ++which) {
    const PrincipleReport r = check_principle(which, ck, {20, 5});
    EXPECT_EQ(r.instances, 20u);
    EXPECT_EQ(r.violations, 0u) << r.name << ": " << r.first_violation;
    EXPECT_GT(r.applicable, 0u) << r.name;
  }
}

}  // namespace
