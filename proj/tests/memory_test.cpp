#include <gtest/gtest.h>

#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "effects/enumerate.hpp"
#include "effects/memory.hpp"
#include "effects/reducer.hpp"

namespace {

using namespace effects;

// Values here are first-order: atoms, cell names and pairs.
Expr random_value(std::mt19937_64& rng, const std::vector<std::string>& cells, int depth) {
  const std::size_t pick = rng() % 8;
  if (depth > 0 && pick < 2)
    return Expr::pair(random_value(rng, cells, depth - 1), random_value(rng, cells, depth - 1));
  if (!cells.empty() && pick < 5) return Expr::var(cells[rng() % cells.size()]);
  const auto atoms = default_atoms();
  return atoms[rng() % atoms.size()];
}

void cells_of(const Expr& v, const Memory& m, std::set<std::string>& out) {
  if (v.is(Op::Var) && m.contains(v.name())) out.insert(v.name());
  for (const auto& k : v.kids()) cells_of(k, m, out);
}

std::set<std::string> live(const Memory& m, const Expr& v, const std::set<std::string>& roots) {
  std::set<std::string> seen = roots;
  cells_of(v, m, seen);
  for (bool grew = true; grew;) {
    grew = false;
    for (const auto& c : std::set<std::string>(seen)) {
      std::set<std::string> next;
      cells_of(m.get(c), m, next);
      for (const auto& n : next) grew |= seen.insert(n).second;
    }
  }
  return seen;
}

Expr rename(const Expr& v, const std::map<std::string, std::string>& f) {
  if (v.is(Op::Var)) {
    auto it = f.find(v.name());
    return it == f.end() ? v : Expr::var(it->second);
  }
  if (v.arity() == 0) return v;
  std::vector<Expr> kids;
  for (const auto& k : v.kids()) kids.push_back(rename(k, f));
  return v.with_kids(std::move(kids));
}

// Tries every map from the live cells of side 0 into the cells of side 1.
bool brute_force_match(const Memory& m0, const Expr& v0, const Memory& m1, const Expr& v1,
                       const std::set<std::string>& roots) {
  for (const auto& r : roots)
    if (!m0.contains(r) || !m1.contains(r)) return false;
  const auto l0 = live(m0, v0, roots);
  const auto l1 = live(m1, v1, roots);
  if (l0.size() != l1.size()) return false;
  const std::vector<std::string> dom(l0.begin(), l0.end());
  const std::vector<std::string> cod(l1.begin(), l1.end());
  std::vector<std::size_t> choice(dom.size(), 0);
  for (;;) {
    std::map<std::string, std::string> f;
    std::set<std::string> image;
    for (std::size_t i = 0; i < dom.size(); ++i) {
      f[dom[i]] = cod[choice[i]];
      image.insert(cod[choice[i]]);
    }
    bool ok = image.size() == dom.size();
    for (const auto& r : roots) ok = ok && f[r] == r;
    ok = ok && rename(v0, f) == v1;
    for (const auto& a : dom) ok = ok && rename(m0.get(a), f) == m1.get(f[a]);
    if (ok) return true;
    std::size_t i = 0;
    while (i < choice.size() && ++choice[i] == cod.size()) choice[i++] = 0;
    if (i == choice.size()) return false;
  }
}

Memory random_memory(std::mt19937_64& rng, const std::vector<std::string>& names) {
  Memory m;
  for (const auto& n : names) m.bind(n, Expr::nil());
  for (const auto& n : names) m.set(n, random_value(rng, names, 0));
  return m;
}

TEST(Memory, BasicOperations) {
  Memory m{{"z0", Expr::nil()}, {"z1", Expr::natural(2)}};
  EXPECT_EQ(m.size(), 2u);
  EXPECT_TRUE(m.contains("z1"));
  m.set("z0", Expr::t());
  EXPECT_EQ(m.get("z0"), Expr::t());
  EXPECT_THROW(m.bind("z0", Expr::nil()), Error);
  EXPECT_THROW(m.get("z9"), Error);
  EXPECT_EQ(m.names(), (std::vector<std::string>{"z0", "z1"}));
}

TEST(Memory, LargeMemoriesKeepLookup) {
  Memory m;
  for (int i = 0; i < 40; ++i) m.bind("c" + std::to_string(i), Expr::natural(i));
  for (int i = 0; i < 40; ++i) EXPECT_EQ(m.get("c" + std::to_string(i)).nat(), static_cast<std::uint64_t>(i));
}

TEST(Memory, ParseAndRenderRoundTrip) {
  const Memory m = parse_memory("(memory (z0 nil) (z1 (pair z0 3)))");
  EXPECT_EQ(memory_literal(m), "(memory (z0 nil) (z1 (pair z0 3)))");
  EXPECT_EQ(parse_memory(memory_literal(m)), m);
}

TEST(Memory, MatchAgreesWithBruteForce) {
  std::mt19937_64 rng(99);
  const std::vector<std::string> names0{"z0", "z1", "z2"};
  const std::vector<std::string> names1{"z2", "z0", "z1"};
  std::size_t matched = 0;
  for (int i = 0; i < 3000; ++i) {
    const std::size_t k0 = rng() % 4;
    const std::size_t k1 = rng() % 4;
    const std::vector<std::string> n0(names0.begin(), names0.begin() + k0);
    const std::vector<std::string> n1(names1.begin(), names1.begin() + k1);
    const Memory m0 = random_memory(rng, n0);
    Memory m1 = random_memory(rng, n1);
    const Expr v0 = random_value(rng, n0, 2);
    Expr v1 = random_value(rng, n1, 2);
    // Half the time side 1 is a renaming of side 0, so matches are common.
    if (rng() % 2 == 0 && k0 == k1) {
      std::map<std::string, std::string> f;
      for (std::size_t j = 0; j < k0; ++j) f[n0[j]] = n1[j];
      Memory r;
      for (const auto& [c, v] : m0) r.bind(f[c], rename(v, f));
      m1 = r;
      v1 = rename(v0, f);
    }
    std::set<std::string> roots;
    for (const auto& c : n0)
      if (m1.contains(c) && rng() % 3 == 0) roots.insert(c);
    const bool expected = brute_force_match(m0, v0, m1, v1, roots);
    const auto got = match_mod_garbage(m0, v0, m1, v1, roots);
    EXPECT_EQ(got.has_value(), expected)
        << render_memory(m0) << " " << to_string(v0) << " vs " << render_memory(m1) << " " << to_string(v1);
    if (got) {
      ++matched;
      for (const auto& r : roots) EXPECT_EQ(got->at(r), r);
    }
  }
  EXPECT_GT(matched, 300u);
}

TEST(Memory, GarbageIsIgnored) {
  const Memory m0{{"z0", Expr::natural(1)}, {"z1", Expr::t()}};
  const Memory m1{{"z5", Expr::natural(1)}};
  EXPECT_TRUE(equal_mod_garbage(m0, Expr::var("z0"), m1, Expr::var("z5"), RootSet{}));
  EXPECT_FALSE(equal_mod_garbage(m0, Expr::var("z1"), m1, Expr::var("z5"), RootSet{}));
  // Roots must map to themselves.
  EXPECT_FALSE(equal_mod_garbage(m0, Expr::nil(), Memory{{"z0", Expr::natural(2)}}, Expr::nil(),
                                 RootSet{{"z0"}, std::nullopt}));
}

TEST(Memory, GcKeepsOrderAndIsIdempotent) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 500; ++i) {
    const std::vector<std::string> names{"z0", "z1", "z2", "z3"};
    const Memory m = random_memory(rng, names);
    RootSet roots;
    if (rng() % 2) roots.cells.insert(names[rng() % names.size()]);
    roots.result = random_value(rng, names, 1);
    const Memory g = gc(m, roots);
    EXPECT_EQ(gc(g, roots), g);
    const auto keep = live(m, *roots.result, roots.cells);
    EXPECT_EQ(g.size(), keep.size());
    std::vector<std::string> expected;
    for (const auto& c : m.names())
      if (keep.count(c)) expected.push_back(c);
    EXPECT_EQ(g.names(), expected);
    for (const auto& c : g.names()) EXPECT_EQ(g.get(c), m.get(c));
  }
}

TEST(Memory, CanonicalFormRebuildsTheMemory) {
  EnumConfig cfg;
  cfg.max_cells = 2;
  for (const Memory& m : enumerate_memories(cfg)) {
    Expr all = Expr::nil();
    for (const auto& c : m.names()) all = Expr::pair(Expr::var(c), all);
    const Outcome o = eval(plug(canonicalize(m), all), 200);
    ASSERT_TRUE(o.is_value()) << render_memory(m);
    EXPECT_EQ(o.memory().size(), m.size());
    EXPECT_TRUE(match_mod_garbage(o.memory(), o.value(), m, all, {}).has_value()) << render_memory(m);
    EXPECT_TRUE(alpha_equal_memory(o.memory(), m)) << render_memory(m) << " vs " << render_memory(o.memory());
  }
}

}  // namespace
