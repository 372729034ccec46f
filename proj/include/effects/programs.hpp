#pragma once

// Reference programs used by tests, the law catalog and the command line.

#include <string>

#include "effects/syntax.hpp"

namespace effects::programs {

/// Cell-based call-by-value fixed point combinator (Landin's knot).
inline Expr yv() {
  static const Expr e = parse(
      "(lambda (y) (let ((z (mk nil)))"
      "  (seq (set z (lambda (x) (app (app y (get z)) x))) (get z))))");
  return e;
}

inline Expr fix(const Expr& functional) { return Expr::app(yv(), functional); }

/// Curried addition by recursion on the first argument.
inline Expr plus() {
  static const Expr e = fix(parse(
      "(lambda (p) (lambda (a) (lambda (b)"
      "  (if (eq a 0) b (add1 (app (app p (sub1 a)) b))))))"));
  return e;
}

/// Curried multiplication by repeated addition.
inline Expr times() {
  static const Expr e = [] {
    const Expr body = parse(
        "(lambda (m) (lambda (a) (lambda (b)"
        "  (if (eq a 0) 0 (app (app PLUS b) (app (app m (sub1 a)) b))))))");
    return fix(substitute(body, "PLUS", plus()));
  }();
  return e;
}

/// λf.λn.if(eq(n,0), 1, n * f(n-1))
inline Expr f_fact() {
  static const Expr e = [] {
    const Expr body = parse(
        "(lambda (f) (lambda (n)"
        "  (if (eq n 0) 1 (app (app TIMES n) (app f (sub1 n))))))");
    return substitute(body, "TIMES", times());
  }();
  return e;
}

/// λp.λn.if(eq(n,0), n, p(n-1)): every fixed point maps naturals to 0.
inline Expr f_zero() {
  static const Expr e = parse("(lambda (p) (lambda (n) (if (eq n 0) n (app p (sub1 n)))))");
  return e;
}

/// Decides cell identity by writing one cell and reading the other, then
/// restores both.
inline Expr eq_via_mutation() {
  static const Expr e = parse(
      "(lambda (x) (lambda (y)"
      "  (let ((x0 (get x))) (let ((y0 (get y)))"
      "    (seq (set x nil) (set y t)"
      "         (let ((z (get x))) (seq (set x x0) (set y y0) z)))))))");
  return e;
}

/// A closure over a private counter; returns 0, 1, 2, ... on successive calls.
inline Expr counter() {
  static const Expr e =
      parse("(let ((x (mk 0))) (lambda (y) (let ((z (get x))) (seq (set x (add1 z)) z))))");
  return e;
}

/// Local-memory closure that returns the argument of its previous call.
inline Expr eta_thunk() {
  static const Expr e =
      parse("(let ((z (mk 0))) (lambda (x) (let ((y (get z))) (seq (set z x) y))))");
  return e;
}

/// λx.app(e, x) for the thunk above: allocates a fresh cell on every call.
inline Expr eta_expanded_thunk() { return Expr::lambda("x", Expr::app(eta_thunk(), Expr::var("x"))); }

/// Expansiveness taxonomy e0..e3; `y` is free in e2 and e3.
inline Expr taxonomy(int j) {
  static const Expr e[4] = {
      parse("(lambda (x) (mk nil))"),
      parse("(let ((z (mk nil))) (lambda (x) z))"),
      parse("(seq (if (cell? y) (set y nil) nil) (lambda (x) (mk nil)))"),
      parse("(seq (if (cell? y) (set y nil) nil) (let ((z (mk nil))) (lambda (x) z)))"),
  };
  if (j < 0 || j > 3) throw Error("taxonomy index out of range");
  return e[j];
}

}  // namespace effects::programs
