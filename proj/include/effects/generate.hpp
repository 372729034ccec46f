#pragma once

#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "effects/syntax.hpp"

namespace effects {

/// Seeded generator of well-scoped random terms and contexts.
class TermGen {
 public:
  explicit TermGen(std::uint64_t seed, std::set<std::string> reserved = {})
      : rng_(seed), reserved_(std::move(reserved)) {}

  std::mt19937_64& rng() { return rng_; }

  std::size_t below(std::size_t n) { return n == 0 ? 0 : static_cast<std::size_t>(rng_() % n); }
  bool chance(unsigned percent) { return below(100) < percent; }

  /// Leaves: atoms (nil, t, 0..2) or a variable in scope.
  Expr leaf(const std::vector<std::string>& scope) {
    if (!scope.empty() && chance(45)) return Expr::var(scope[below(scope.size())]);
    switch (below(5)) {
      case 0: return Expr::nil();
      case 1: return Expr::t();
      default: return Expr::natural(below(3));
    }
  }

  Expr value(std::size_t depth, const std::vector<std::string>& scope) {
    if (depth == 0 || chance(55)) return leaf(scope);
    if (chance(50)) return Expr::pair(value(depth - 1, scope), value(depth - 1, scope));
    std::string x = binder();
    auto inner = scope;
    inner.push_back(x);
    return Expr::lambda(x, expr(depth - 1, inner));
  }

  /// Random expression over the constructs of the sequential language.
  Expr expr(std::size_t depth, const std::vector<std::string>& scope) {
    if (depth == 0 || chance(25)) return leaf(scope);
    const std::size_t d = depth - 1;
    auto sub = [&] { return expr(d, scope); };
    switch (below(17)) {
      case 0: {
        std::string x = binder();
        auto inner = scope;
        inner.push_back(x);
        return Expr::lambda(x, expr(d, inner));
      }
      case 1: return Expr::app(value(d, scope), sub());
      case 2: {
        std::string x = binder();
        auto inner = scope;
        inner.push_back(x);
        Expr bound = sub();
        return Expr::let(x, bound, expr(d, inner));
      }
      case 3: {
        std::vector<Expr> items{sub(), sub()};
        if (chance(30)) items.push_back(sub());
        return Expr::seq(std::move(items));
      }
      case 4: return Expr::if_(sub(), sub(), sub());
      case 5: return Expr::mk(sub());
      case 6: return Expr::get(sub());
      case 7: return Expr::set(sub(), sub());
      case 8: return Expr::eq(sub(), sub());
      case 9: return Expr::cellp(sub());
      case 10: return Expr::pair(sub(), sub());
      case 11: return Expr::fst(sub());
      case 12: return Expr::snd(sub());
      case 13: return Expr::add1(sub());
      case 14: return Expr::sub1(sub());
      case 15: return Expr::natp(sub());
      default: {
        // Allocation followed by use, a shape random choice rarely produces.
        std::string x = binder();
        auto inner = scope;
        inner.push_back(x);
        return Expr::let(x, Expr::mk(leaf(scope)),
                         Expr::seq({Expr::set(Expr::var(x), leaf(inner)), expr(d, inner)}));
      }
    }
  }

  /// Random reduction context: a stack of 1..depth evaluation frames.
  Expr reduction_context(std::size_t depth, const std::vector<std::string>& scope) {
    Expr ctx = Expr::hole();
    const std::size_t n = 1 + below(depth);
    for (std::size_t i = 0; i < n; ++i) ctx = plug_expr(reduction_frame(scope), ctx);
    return ctx;
  }

  Expr reduction_frame(const std::vector<std::string>& scope) {
    const Expr h = Expr::hole();
    auto e = [&] { return expr(1, scope); };
    auto v = [&] { return value(1, scope); };
    switch (below(16)) {
      case 0: return Expr::app(h, e());
      case 1: return Expr::app(v(), h);
      case 2: return Expr::mk(h);
      case 3: return Expr::get(h);
      case 4: return Expr::set(h, e());
      case 5: return Expr::set(v(), h);
      case 6: return Expr::eq(h, e());
      case 7: return Expr::eq(v(), h);
      case 8: return Expr::if_(h, e(), e());
      case 9: {
        std::string x = binder();
        auto inner = scope;
        inner.push_back(x);
        return Expr::let(x, h, expr(1, inner));
      }
      case 10: return Expr::seq({h, e()});
      case 11: return Expr::fst(h);
      case 12: return Expr::snd(h);
      case 13: return Expr::add1(h);
      case 14: return Expr::sub1(h);
      default: return Expr::pair(h, e());
    }
  }

  /// Random univalent context: the hole may sit anywhere except under a lambda.
  Expr univalent_context(std::size_t depth, const std::vector<std::string>& scope) {
    if (depth == 0) return Expr::hole();
    const std::size_t d = depth - 1;
    auto e = [&] { return expr(1, scope); };
    switch (below(8)) {
      case 0:
      case 1: {
        // let{x:=mk(v)}U: the allocation shape contextual assertions talk about.
        std::string x = binder();
        auto inner = scope;
        inner.push_back(x);
        return Expr::let(x, Expr::mk(leaf(scope)), univalent_context(d, inner));
      }
      case 2: {
        std::string x = binder();
        auto inner = scope;
        inner.push_back(x);
        return Expr::let(x, e(), univalent_context(d, inner));
      }
      case 3: return Expr::seq({e(), univalent_context(d, scope)});
      case 4:
        if (chance(50)) return Expr::if_(e(), univalent_context(d, scope), e());
        return Expr::if_(e(), e(), univalent_context(d, scope));
      case 5: return Expr::pair(e(), univalent_context(d, scope));
      case 6: return plug_expr(reduction_frame(scope), univalent_context(d, scope));
      default: return Expr::hole();
    }
  }

  /// Binder names come from a small pool that avoids reserved names.
  std::string binder() {
    static const char* pool[] = {"a", "b", "c", "d", "g", "h", "k", "n"};
    for (;;) {
      std::string name = pool[below(std::size(pool))];
      if (!reserved_.count(name)) return name;
    }
  }

 private:
  std::mt19937_64 rng_;
  std::set<std::string> reserved_;
};

}  // namespace effects
