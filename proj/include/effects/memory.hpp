#pragma once

#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "effects/syntax.hpp"

namespace effects {

/// Memory context: an insertion-ordered binding of cell names to value
/// contents. Cycles are allowed; names are pairwise distinct.
class Memory {
 public:
  using Binding = std::pair<std::string, Expr>;

  Memory() = default;
  Memory(std::initializer_list<Binding> cells) {
    for (const auto& [name, v] : cells) bind(name, v);
  }

  bool contains(const std::string& name) const { return find(name) != npos; }

  const Expr& get(const std::string& name) const {
    const std::size_t i = find(name);
    if (i == npos) throw Error("unbound cell '" + name + "'");
    return cells_[i].second;
  }

  void set(const std::string& name, Expr v) {
    const std::size_t i = find(name);
    if (i == npos) throw Error("unbound cell '" + name + "'");
    cells_[i].second = std::move(v);
  }

  /// Appends a new cell; the name must be unused.
  void bind(std::string name, Expr v) {
    if (contains(name)) throw Error("cell '" + name + "' is already bound");
    cells_.emplace_back(std::move(name), std::move(v));
    if (cells_.size() > kIndexThreshold) {
      if (index_.empty())
        for (std::size_t i = 0; i < cells_.size(); ++i) index_.emplace(cells_[i].first, i);
      else
        index_.emplace(cells_.back().first, cells_.size() - 1);
    }
  }

  std::size_t size() const { return cells_.size(); }
  bool empty() const { return cells_.empty(); }
  auto begin() const { return cells_.begin(); }
  auto end() const { return cells_.end(); }
  const Binding& at(std::size_t i) const { return cells_[i]; }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    out.reserve(cells_.size());
    for (const auto& c : cells_) out.push_back(c.first);
    return out;
  }

  VarPredicate cell_predicate() const {
    return [this](const std::string& n) { return contains(n); };
  }

  friend bool operator==(const Memory& a, const Memory& b) {
    if (a.cells_.size() != b.cells_.size()) return false;
    for (std::size_t i = 0; i < a.cells_.size(); ++i)
      if (a.cells_[i].first != b.cells_[i].first || !(a.cells_[i].second == b.cells_[i].second))
        return false;
    return true;
  }

 private:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  static constexpr std::size_t kIndexThreshold = 12;

  std::size_t find(const std::string& name) const {
    if (!index_.empty()) {
      auto it = index_.find(name);
      return it == index_.end() ? npos : it->second;
    }
    for (std::size_t i = 0; i < cells_.size(); ++i)
      if (cells_[i].first == name) return i;
    return npos;
  }

  std::vector<Binding> cells_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Roots of the garbage definition: pre-existing cells plus an optional result.
struct RootSet {
  std::set<std::string> cells;
  std::optional<Expr> result;

  static RootSet of_cells(const Memory& m) {
    RootSet r;
    for (const auto& [name, v] : m) r.cells.insert(name);
    return r;
  }
};

/// Cell names of `m` occurring free in `e` (including inside lambda bodies).
inline std::vector<std::string> cells_in(const Expr& e, const Memory& m) {
  std::vector<std::string> out;
  for (const auto& x : e.free_vars())
    if (m.contains(x)) out.push_back(x);
  return out;
}

inline std::set<std::string> reachable(const Memory& m, const RootSet& roots) {
  std::set<std::string> seen;
  std::deque<std::string> work;
  auto visit = [&](const std::string& c) {
    if (m.contains(c) && seen.insert(c).second) work.push_back(c);
  };
  for (const auto& c : roots.cells) visit(c);
  if (roots.result)
    for (const auto& c : cells_in(*roots.result, m)) visit(c);
  while (!work.empty()) {
    const std::string c = work.front();
    work.pop_front();
    for (const auto& d : cells_in(m.get(c), m)) visit(d);
  }
  return seen;
}

/// Restriction of `m` to its reachable cells, order preserved.
inline Memory gc(const Memory& m, const RootSet& roots) {
  const auto live = reachable(m, roots);
  Memory out;
  for (const auto& [name, v] : m)
    if (live.count(name)) out.bind(name, v);
  return out;
}

/// Cell correspondence found by `match_mod_garbage`.
using CellBijection = std::map<std::string, std::string>;

/// Searches for the bijection between the live parts of (m0, v0) and (m1, v1)
/// that fixes `roots`. Every live cell is reached by a syntactic path from a
/// root or the result, so the correspondence is forced and found by
/// propagation.
inline std::optional<CellBijection> match_mod_garbage(const Memory& m0, const Expr& v0,
                                                      const Memory& m1, const Expr& v1,
                                                      const std::set<std::string>& roots) {
  CellBijection fwd;
  std::map<std::string, std::string> back;
  std::deque<std::pair<std::string, std::string>> work;
  for (const auto& r : roots) {
    if (!m0.contains(r) || !m1.contains(r)) return std::nullopt;
    fwd.emplace(r, r);
    back.emplace(r, r);
    work.emplace_back(r, r);
  }
  auto match = [&](const std::string& a, const std::string& b) {
    const bool ca = m0.contains(a);
    const bool cb = m1.contains(b);
    if (!ca && !cb) return a == b;
    if (ca != cb) return false;
    if (auto it = fwd.find(a); it != fwd.end()) return it->second == b;
    if (back.count(b)) return false;
    fwd.emplace(a, b);
    back.emplace(b, a);
    work.emplace_back(a, b);
    return true;
  };
  if (!alpha_equal_with(v0, v1, match)) return std::nullopt;
  while (!work.empty()) {
    auto [a, b] = work.front();
    work.pop_front();
    if (!alpha_equal_with(m0.get(a), m1.get(b), match)) return std::nullopt;
  }
  return fwd;
}

/// Equal values in memories identical modulo garbage and renaming of fresh cells.
inline bool equal_mod_garbage(const Memory& m0, const Expr& v0, const Memory& m1, const Expr& v1,
                              const RootSet& roots) {
  std::set<std::string> r = roots.cells;
  if (roots.result) {
    for (const auto& c : cells_in(*roots.result, m0))
      if (m1.contains(c)) r.insert(c);
  }
  return match_mod_garbage(m0, v0, m1, v1, r).has_value();
}

/// Alpha-equality of memory contexts: same length, cells matched by position.
inline bool alpha_equal_memory(const Memory& m0, const Memory& m1) {
  if (m0.size() != m1.size()) return false;
  std::map<std::string, std::string> fwd;
  for (std::size_t i = 0; i < m0.size(); ++i) fwd.emplace(m0.at(i).first, m1.at(i).first);
  auto match = [&](const std::string& a, const std::string& b) {
    auto it = fwd.find(a);
    if (it != fwd.end()) return it->second == b;
    return a == b && !m1.contains(b);
  };
  for (std::size_t i = 0; i < m0.size(); ++i)
    if (!alpha_equal_with(m0.at(i).second, m1.at(i).second, match)) return false;
  return true;
}

/// Renders `m` as allocate-then-assign:
/// let{z1:=mk(nil)} ... seq(set(z1,v1), ..., _).
inline Context canonicalize(const Memory& m) {
  if (m.empty()) return Context::make(Expr::hole(), ContextSort::Univalent);
  std::vector<Expr> assigns;
  for (const auto& [name, v] : m) assigns.push_back(Expr::set(Expr::var(name), v));
  assigns.push_back(Expr::hole());
  Expr body = Expr::seq(std::move(assigns));
  for (std::size_t i = m.size(); i-- > 0;) body = Expr::let(m.at(i).first, Expr::mk(Expr::nil()), body);
  return Context::make(body, ContextSort::Univalent);
}

/// `{z0:=v0, z1:=v1}`
inline std::string render_memory(const Memory& m) {
  std::string out = "{";
  bool first = true;
  for (const auto& [name, v] : m) {
    if (!first) out += ", ";
    first = false;
    out += name;
    out += ":=";
    out += to_string(v);
  }
  out += "}";
  return out;
}

/// `(memory (z0 nil) (z1 z0))`
inline std::string memory_literal(const Memory& m) {
  std::string out = "(memory";
  for (const auto& [name, v] : m) {
    out += " (";
    out += name;
    out += ' ';
    out += to_string(v);
    out += ')';
  }
  out += ')';
  return out;
}

inline Memory parse_memory(const Sexp& s) {
  if (!s.has_head("memory")) s.fail("expected (memory (name value) ...)");
  Memory m;
  for (std::size_t i = 1; i < s.items.size(); ++i) {
    const Sexp& b = s.items[i];
    if (!b.is_list() || b.items.size() != 2 || !b.items[0].is_atom() || b.items[0].is_numeral() ||
        is_reserved_word(b.items[0].atom))
      b.fail("expected a cell binding (name value)");
    if (m.contains(b.items[0].atom)) b.fail("duplicate cell '" + b.items[0].atom + "'");
    m.bind(b.items[0].atom, parse_expr(b.items[1]));
  }
  for (const auto& [name, v] : m) {
    if (!is_value(v, m.cell_predicate()))
      throw Error("contents of cell '" + name + "' are not a value: " + to_string(v));
  }
  return m;
}

inline Memory parse_memory(std::string_view text) { return parse_memory(read_sexp(text)); }

}  // namespace effects
