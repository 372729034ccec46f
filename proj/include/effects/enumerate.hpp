#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "effects/memory.hpp"
#include "effects/syntax.hpp"

namespace effects {

/// app(λx.app(x,x), λx.app(x,x))
inline Expr omega() {
  static const Expr w = Expr::lambda("x", Expr::app(Expr::var("x"), Expr::var("x")));
  static const Expr e = Expr::app(w, w);
  return e;
}

inline std::vector<Expr> default_atoms() {
  return {Expr::nil(), Expr::t(), Expr::natural(0), Expr::natural(1), Expr::natural(2)};
}

/// λx.if(eq(x,a), Ω, nil): diverges exactly on `a`.
inline Expr discriminator(const Expr& a) {
  return Expr::lambda("x", Expr::if_(Expr::eq(Expr::var("x"), a), omega(), Expr::nil()));
}

/// Identity, constant nil, self-application, and a discriminator per atom.
inline std::vector<Expr> default_probes(const std::vector<Expr>& atoms) {
  std::vector<Expr> out = {
      Expr::lambda("x", Expr::var("x")),
      Expr::lambda("x", Expr::nil()),
      Expr::lambda("x", Expr::app(Expr::var("x"), Expr::var("x"))),
  };
  for (const Expr& a : atoms) out.push_back(discriminator(a));
  return out;
}

struct EnumConfig {
  std::size_t value_depth = 2;
  std::size_t max_cells = 3;
  std::size_t ctx_depth = 2;
  std::size_t max_steps = 2000;
  std::vector<Expr> atoms = default_atoms();
  std::vector<Expr> probe_pool = default_probes(default_atoms());
  std::uint64_t seed = 0;
  /// Case budget per check; larger spaces are covered by a structured
  /// prefix followed by seeded sampling.
  std::size_t max_cases = 20000;
  /// Restrict values to atoms and cells and drop higher-order uses.
  bool first_order = false;

  void validate() const {
    if (value_depth < 1 || ctx_depth < 1 || max_steps < 1)
      throw Error("value depth, context depth and step budget must be at least 1");
    for (const Expr& p : probe_pool)
      if (!p.free_vars().empty() || !is_value(p)) throw Error("probe is not a closed value: " + to_string(p));
  }
};

/// Values whose behaviour depends on the cells of `m`: a writer λx.set(c,x)
/// and a discriminator for each cell.
inline std::vector<Expr> memory_probes(const Memory& m) {
  std::vector<Expr> out;
  for (const auto& [c, v] : m) {
    (void)v;
    out.push_back(Expr::lambda("x", Expr::set(Expr::var(c), Expr::var("x"))));
    out.push_back(discriminator(Expr::var(c)));
  }
  return out;
}

/// Values for closing substitutions in memory `m`: first-order data built
/// from atoms and the cells of `m` (pairs nested up to value_depth), then the
/// probe pool and the memory probes.
inline std::vector<Expr> enumerate_values(const EnumConfig& cfg, const Memory& m) {
  std::vector<Expr> base = cfg.atoms;
  for (const auto& [c, v] : m) {
    (void)v;
    base.push_back(Expr::var(c));
  }
  if (cfg.first_order) return base;
  std::vector<Expr> level = base;
  for (std::size_t d = 2; d <= cfg.value_depth; ++d) {
    std::vector<Expr> next = base;
    for (const Expr& a : level)
      for (const Expr& b : level) next.push_back(Expr::pair(a, b));
    level = std::move(next);
  }
  std::vector<Expr> out = std::move(level);
  for (const Expr& p : cfg.probe_pool) out.push_back(p);
  for (const Expr& p : memory_probes(m)) out.push_back(p);
  return out;
}

/// Cell names z0, z1, ... skipping anything in `avoid`.
inline std::vector<std::string> cell_names(std::size_t n, const std::set<std::string>& avoid) {
  std::vector<std::string> out;
  for (std::size_t k = 0; out.size() < n; ++k) {
    std::string name = "z" + std::to_string(k);
    if (!avoid.count(name)) out.push_back(std::move(name));
  }
  return out;
}

/// Every memory with at most max_cells cells whose contents are atoms or
/// cells of the same memory; the empty memory comes first.
inline std::vector<Memory> enumerate_memories(const EnumConfig& cfg,
                                              const std::set<std::string>& avoid = {}) {
  const auto names = cell_names(cfg.max_cells, avoid);
  std::vector<Memory> out;
  for (std::size_t k = 0; k <= cfg.max_cells; ++k) {
    std::vector<Expr> pool = cfg.atoms;
    for (std::size_t i = 0; i < k; ++i) pool.push_back(Expr::var(names[i]));
    std::vector<std::size_t> digits(k, 0);
    for (;;) {
      Memory m;
      for (std::size_t i = 0; i < k; ++i) m.bind(names[i], pool[digits[i]]);
      out.push_back(std::move(m));
      std::size_t i = k;
      bool carry = true;
      while (carry && i > 0) {
        --i;
        if (++digits[i] < pool.size())
          carry = false;
        else
          digits[i] = 0;
      }
      if (carry) break;
    }
  }
  return out;
}

namespace detail {

struct UseFrame {
  Expr with_hole;
  bool higher_order = false;
};

inline std::vector<UseFrame> use_frames(const EnumConfig& cfg) {
  using E = Expr;
  const E h = E::hole();
  const E f = E::var("f");
  std::vector<UseFrame> out;
  auto add = [&](E e, bool ho = false) { out.push_back(UseFrame{std::move(e), ho}); };
  add(E::app(h, E::nil()), true);
  add(E::app(h, E::natural(0)), true);
  add(E::app(h, E::natural(1)), true);
  for (const E& p : cfg.probe_pool) add(E::app(p, h), true);
  add(E::mk(h));
  add(E::get(h));
  add(E::cellp(h));
  add(E::natp(h));
  add(E::fst(h));
  add(E::snd(h));
  add(E::add1(h));
  add(E::sub1(h));
  add(E::set(h, E::natural(0)));
  add(E::eq(h, E::nil()));
  add(E::eq(h, E::natural(0)));
  add(E::if_(h, E::natural(0), E::natural(1)));
  add(E::if_(h, omega(), E::nil()));
  // Calls the hole's value twice; the second result shows state kept
  // between calls.
  add(E::let("f", h, E::seq({E::app(f, E::natural(1)), E::app(f, E::natural(2))})), true);
  add(E::let("f", h, E::app(f, f)), true);
  add(E::seq({h, E::natural(0)}));
  add(E::pair(h, E::natural(0)));
  add(E::pair(E::natural(0), h));
  return out;
}

}  // namespace detail

/// Reduction contexts up to ctx_depth nested frames; • first, then depth 1, ...
inline std::vector<Context> enumerate_uses(const EnumConfig& cfg) {
  std::vector<Expr> frames;
  for (const auto& fr : detail::use_frames(cfg))
    if (!cfg.first_order || !fr.higher_order) frames.push_back(fr.with_hole);
  std::vector<Context> out{Context::make(Expr::hole(), ContextSort::Reduction)};
  std::vector<Expr> level{Expr::hole()};
  for (std::size_t d = 1; d <= cfg.ctx_depth; ++d) {
    std::vector<Expr> next;
    for (const Expr& inner : level)
      for (const Expr& frame : frames) next.push_back(plug_expr(frame, inner));
    for (const Expr& u : next) out.push_back(Context::make(u, ContextSort::Reduction));
    level = std::move(next);
  }
  return out;
}

/// Names bound by the use frames; cell names must avoid them.
inline std::set<std::string> use_binders() { return {"f", "x"}; }

/// One closing instantiation: memory, substitution and use.
struct Case {
  std::size_t memory_index = 0;
  const Memory* memory = nullptr;
  Substitution subst;
  const Context* use = nullptr;
};

/// The space memories × substitutions × uses, walked exhaustively when it
/// fits the case budget, otherwise as a structured prefix (empty memory,
/// substitutions and uses in order) followed by seeded uniform sampling.
class CaseSpace {
 public:
  CaseSpace(const EnumConfig& cfg, std::vector<std::string> vars, std::vector<Context> uses,
            const std::set<std::string>& avoid)
      : cfg_(cfg), vars_(std::move(vars)), uses_(std::move(uses)) {
    std::set<std::string> all = avoid;
    for (const auto& b : use_binders()) all.insert(b);
    for (const auto& x : vars_) all.insert(x);
    memories_ = enumerate_memories(cfg_, all);
    values_.resize(memories_.size());
  }

  static constexpr std::uint64_t kSaturated = std::numeric_limits<std::uint64_t>::max() / 4;

  /// |space|, saturating.
  std::uint64_t size() {
    std::uint64_t total = 0;
    for (std::size_t i = 0; i < memories_.size(); ++i) {
      total = sat_add(total, sat_mul(substitutions(i), uses_.size()));
    }
    return total;
  }

  bool exhaustive() { return size() <= cfg_.max_cases; }

  const std::vector<Memory>& memories() const { return memories_; }
  const std::vector<Context>& uses() const { return uses_; }

  /// Calls visit(case) until it returns false or the budget is spent.
  template <class Visit>
  void for_each(Visit&& visit) {
    std::size_t done = 0;
    if (exhaustive()) {
      for (std::size_t mi = 0; mi < memories_.size(); ++mi) {
        const std::uint64_t ns = substitutions(mi);
        for (std::uint64_t si = 0; si < ns; ++si) {
          Substitution s = decode(mi, si);
          for (const Context& u : uses_) {
            ++done;
            if (!visit(Case{mi, &memories_[mi], s, &u})) return;
          }
        }
      }
      return;
    }
    const std::size_t prefix = cfg_.max_cases / 2;
    const std::uint64_t ns0 = substitutions(0);
    for (std::uint64_t si = 0; si < ns0 && done < prefix; ++si) {
      Substitution s = decode(0, si);
      for (const Context& u : uses_) {
        if (done >= prefix) break;
        ++done;
        if (!visit(Case{0, &memories_[0], s, &u})) return;
      }
    }
    std::mt19937_64 rng(cfg_.seed);
    while (done < cfg_.max_cases) {
      const std::size_t mi = rng() % memories_.size();
      const auto& vals = values(mi);
      Substitution s;
      for (const auto& x : vars_) s.emplace(x, vals[rng() % vals.size()]);
      const Context& u = uses_[rng() % uses_.size()];
      ++done;
      if (!visit(Case{mi, &memories_[mi], std::move(s), &u})) return;
    }
  }

  const std::vector<Expr>& values(std::size_t mi) {
    if (!values_[mi]) values_[mi] = enumerate_values(cfg_, memories_[mi]);
    return *values_[mi];
  }

 private:
  static std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) {
    return a + b > kSaturated ? kSaturated : a + b;
  }
  static std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
    if (a == 0 || b == 0) return 0;
    if (a > kSaturated / b) return kSaturated;
    return a * b;
  }

  std::uint64_t substitutions(std::size_t mi) {
    std::uint64_t n = 1;
    const std::uint64_t nv = values(mi).size();
    for (std::size_t i = 0; i < vars_.size(); ++i) n = sat_mul(n, nv);
    return n;
  }

  Substitution decode(std::size_t mi, std::uint64_t index) {
    const auto& vals = values(mi);
    Substitution s;
    for (std::size_t i = vars_.size(); i-- > 0;) {
      s.emplace(vars_[i], vals[index % vals.size()]);
      index /= vals.size();
    }
    return s;
  }

  const EnumConfig& cfg_;
  std::vector<std::string> vars_;
  std::vector<Context> uses_;
  std::vector<Memory> memories_;
  std::vector<std::optional<std::vector<Expr>>> values_;
};

}  // namespace effects
