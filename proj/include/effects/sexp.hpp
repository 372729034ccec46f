#pragma once

#include <cctype>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace effects {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed surface syntax. Carries the 1-based source position.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line, int column)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

/// A parenthesized s-expression: either an atom (symbol or numeral) or a list.
struct Sexp {
  enum class Kind { Atom, List };

  Kind kind = Kind::Atom;
  std::string atom;
  std::vector<Sexp> items;
  int line = 1;
  int column = 1;

  static Sexp make_atom(std::string text, int line = 1, int column = 1) {
    Sexp s;
    s.kind = Kind::Atom;
    s.atom = std::move(text);
    s.line = line;
    s.column = column;
    return s;
  }

  static Sexp make_list(std::vector<Sexp> items, int line = 1, int column = 1) {
    Sexp s;
    s.kind = Kind::List;
    s.items = std::move(items);
    s.line = line;
    s.column = column;
    return s;
  }

  bool is_atom() const { return kind == Kind::Atom; }
  bool is_list() const { return kind == Kind::List; }
  bool is_atom(std::string_view text) const { return is_atom() && atom == text; }

  bool is_numeral() const {
    if (!is_atom() || atom.empty()) return false;
    for (char c : atom)
      if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
  }

  /// True for a list whose first item is the given symbol.
  bool has_head(std::string_view head) const {
    return is_list() && !items.empty() && items.front().is_atom(head);
  }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, line, column); }
};

namespace detail {

class SexpReader {
 public:
  explicit SexpReader(std::string_view text) : text_(text) {}

  bool at_end() {
    skip_blank();
    return pos_ >= text_.size();
  }

  Sexp read() {
    skip_blank();
    if (pos_ >= text_.size()) throw ParseError("unexpected end of input", line_, column_);
    const int line = line_;
    const int column = column_;
    const char c = text_[pos_];
    if (c == ')') throw ParseError("unexpected ')'", line, column);
    if (c == '(' || c == '[') {
      const char close = c == '(' ? ')' : ']';
      advance();
      std::vector<Sexp> items;
      for (;;) {
        skip_blank();
        if (pos_ >= text_.size()) throw ParseError("unterminated list", line, column);
        if (text_[pos_] == close) {
          advance();
          break;
        }
        if (text_[pos_] == ')' || text_[pos_] == ']')
          throw ParseError("mismatched closing bracket", line_, column_);
        items.push_back(read());
      }
      return Sexp::make_list(std::move(items), line, column);
    }
    std::string atom;
    while (pos_ < text_.size() && !delimiter(text_[pos_])) {
      atom.push_back(text_[pos_]);
      advance();
    }
    return Sexp::make_atom(std::move(atom), line, column);
  }

 private:
  static bool delimiter(char c) {
    return std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')' || c == '[' ||
           c == ']' || c == ';';
  }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  void skip_blank() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
};

}  // namespace detail

/// Reads every top-level s-expression in `text`. `;` starts a line comment.
inline std::vector<Sexp> read_sexps(std::string_view text) {
  detail::SexpReader reader(text);
  std::vector<Sexp> out;
  while (!reader.at_end()) out.push_back(reader.read());
  return out;
}

/// Reads exactly one s-expression; trailing input is an error.
inline Sexp read_sexp(std::string_view text) {
  detail::SexpReader reader(text);
  Sexp s = reader.read();
  if (!reader.at_end()) {
    Sexp extra = reader.read();
    extra.fail("trailing input after expression");
  }
  return s;
}

inline void print_sexp(const Sexp& s, std::string& out) {
  if (s.is_atom()) {
    out += s.atom;
    return;
  }
  out += '(';
  for (std::size_t i = 0; i < s.items.size(); ++i) {
    if (i) out += ' ';
    print_sexp(s.items[i], out);
  }
  out += ')';
}

inline std::string to_string(const Sexp& s) {
  std::string out;
  print_sexp(s, out);
  return out;
}

/// Double-quoted string literal for notes and error texts in output records.
inline std::string quote(std::string_view text) {
  std::string out = "\"";
  for (char ch : text) {
    if (ch == '"' || ch == '\\') out += '\\';
    out += ch == '\n' ? ' ' : ch;
  }
  return out + '"';
}

}  // namespace effects
