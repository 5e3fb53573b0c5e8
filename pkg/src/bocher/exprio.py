"""Textual expression grammar: parser and canonical printer.

Grammar (EBNF, documented in the README):

    expr    := term (("+" | "-") term)*
    term    := factor (("*" | "/") factor)*
    factor  := ("-" | "+")* power
    power   := atom ("^" integer)?
    atom    := integer | "I" | "sqrt" "(" expr ")" | name | "(" expr ")"
              | "d/d" name                                  (operators only)

``I`` is the imaginary unit, ``sqrt(n)`` adjoins the radical of a rational
constant, names come from the session symbol table.  Printing is
deterministic: terms in graded-lex order, fixed symbol order, so
parse(print(e)) == e structurally.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .scalars import Scalar, I as SI, adjoin_radical
from .symbols import TABLE, Symbol
from .poly import Poly
from .rational import RatFun, RZERO, RONE

_TOKEN = re.compile(r"\s*(d/d[A-Za-z_][A-Za-z0-9_]*|[0-9]+|[A-Za-z_][A-Za-z0-9_]*|\^|\+|-|\*|/|\(|\)|,)")


class ParseError(ValueError):
    def __init__(self, msg: str, pos: int, text: str):
        super().__init__(f"{msg} at position {pos}: {text[max(0, pos - 10):pos + 10]!r}")
        self.pos = pos


def _tokenize(text: str) -> list[tuple[str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            if text[pos:].strip() == "":
                break
            raise ParseError("lexical error", pos, text)
        tokens.append((m.group(1), m.start(1)))
        pos = m.end()
    tokens.append(("", len(text)))
    return tokens


class _Parser:
    """Recursive-descent parser producing RatFun values (and derivative
    markers when operator mode is on)."""

    def __init__(self, text: str, operators: bool = False):
        self.text = text
        self.tokens = _tokenize(text)
        self.k = 0
        self.operators = operators

    def peek(self) -> str:
        return self.tokens[self.k][0]

    def next(self) -> tuple[str, int]:
        tok = self.tokens[self.k]
        self.k += 1
        return tok

    def expect(self, want: str):
        tok, pos = self.next()
        if tok != want:
            raise ParseError(f"expected {want!r}, got {tok!r}", pos, self.text)

    # value representation in operator mode: list of (coeff RatFun, dmap)
    # where dmap is a dict symbol-index -> derivative order.

    def parse(self):
        val = self.expr()
        tok, pos = self.next()
        if tok != "":
            raise ParseError(f"trailing input {tok!r}", pos, self.text)
        return val

    def expr(self):
        val = self.term()
        while self.peek() in ("+", "-"):
            op, _ = self.next()
            rhs = self.term()
            val = self._add(val, rhs if op == "+" else self._neg(rhs))
        return val

    def term(self):
        val = self.factor()
        while self.peek() in ("*", "/"):
            op, pos = self.next()
            rhs = self.factor()
            if op == "*":
                val = self._mul(val, rhs, pos)
            else:
                val = self._div(val, rhs, pos)
        return val

    def factor(self):
        sign = 1
        while self.peek() in ("+", "-"):
            tok, _ = self.next()
            if tok == "-":
                sign = -sign
        val = self.power()
        return val if sign > 0 else self._neg(val)

    def power(self):
        val = self.atom()
        if self.peek() == "^":
            self.next()
            neg = False
            if self.peek() == "-":
                self.next()
                neg = True
            tok, pos = self.next()
            if not tok.isdigit():
                raise ParseError("exponent must be an integer", pos, self.text)
            n = int(tok)
            val = self._pow(val, -n if neg else n, pos)
        return val

    def atom(self):
        tok, pos = self.next()
        if tok == "(":
            val = self.expr()
            self.expect(")")
            return val
        if tok.isdigit():
            return self._scalar(Scalar.of(int(tok)))
        if tok == "I":
            return self._scalar(SI)
        if tok == "sqrt":
            self.expect("(")
            arg = self.expr()
            self.expect(")")
            if self.operators:
                arg = _require_function(arg, pos, self.text)
            if not arg.is_constant():
                raise ParseError("sqrt argument must be a rational constant", pos, self.text)
            val = arg.constant_value()
            if not val.is_rational():
                raise ParseError("sqrt argument must be rational", pos, self.text)
            return self._scalar(adjoin_radical(val.to_fraction()))
        if tok.startswith("d/d"):
            if not self.operators:
                raise ParseError("derivative token outside operator context", pos, self.text)
            name = tok[3:]
            if name not in TABLE:
                raise ParseError(f"unknown symbol {name!r}", pos, self.text)
            return [(RONE, {TABLE[name].index: 1})]
        if tok == "":
            raise ParseError("unexpected end of input", pos, self.text)
        if tok in TABLE:
            return self._scalar_var(TABLE[tok])
        raise ParseError(f"unknown symbol {tok!r}", pos, self.text)

    # -- mode-dependent combinators ----------------------------------------

    def _scalar(self, s: Scalar):
        f = RatFun.of(s)
        return [(f, {})] if self.operators else f

    def _scalar_var(self, sym: Symbol):
        f = RatFun.var(sym)
        return [(f, {})] if self.operators else f

    def _add(self, a, b):
        if not self.operators:
            return a + b
        return a + b  # list concatenation

    def _neg(self, a):
        if not self.operators:
            return -a
        return [(-c, dict(d)) for c, d in a]

    def _mul(self, a, b, pos):
        if not self.operators:
            return a * b
        out = []
        for c1, d1 in a:
            for c2, d2 in b:
                if d1 and not c2.is_constant():
                    raise ParseError("operator terms must be normal ordered "
                                     "(coefficients left of derivatives)", pos, self.text)
                d = dict(d1)
                for i, e in d2.items():
                    d[i] = d.get(i, 0) + e
                out.append((c1 * c2, d))
        return out

    def _div(self, a, b, pos):
        if not self.operators:
            return a / b
        f = _require_function(b, pos, self.text)
        return [(c / f, dict(d)) for c, d in a]

    def _pow(self, a, n, pos):
        if not self.operators:
            return a ** n
        if len(a) == 1 and not a[0][1]:
            return [(a[0][0] ** n, {})]
        if n < 0:
            raise ParseError("negative power of an operator", pos, self.text)
        out = [(RONE, {})]
        for _ in range(n):
            out = self._mul(out, a, pos)
        return out


def _require_function(val, pos, text) -> RatFun:
    for _c, d in val:
        if d:
            raise ParseError("derivative not allowed here", pos, text)
    out = RZERO
    for c, _d in val:
        out = out + c
    return out


def parse_expr(text: str) -> RatFun:
    return _Parser(text).parse()


def parse_operator_terms(text: str) -> list[tuple[RatFun, dict[int, int]]]:
    """Parse an operator expression into (coefficient, derivative-map) terms."""
    terms = _Parser(text, operators=True).parse()
    merged: dict[tuple, RatFun] = {}
    for c, d in terms:
        key = tuple(sorted(d.items()))
        merged[key] = merged.get(key, RZERO) + c
    return [(c, dict(k)) for k, c in sorted(merged.items()) if not c.is_zero()]


# ---------------------------------------------------------------------------
# printing
# ---------------------------------------------------------------------------


def format_scalar(s: Scalar, product_context: bool = False) -> str:
    text = str(s)
    if product_context and ("+" in text[1:] or "-" in text[1:]):
        return f"({text})"
    return text


def _format_term(m, c: Scalar) -> str:
    syms = [f"{TABLE.by_index(i).name}" + (f"^{e}" if e > 1 else "") for i, e in m]
    if not syms:
        return format_scalar(c)
    cs = format_scalar(c, product_context=True)
    if cs == "1":
        return "*".join(syms)
    if cs == "-1":
        return "-" + "*".join(syms)
    return cs + "*" + "*".join(syms)


def format_poly(p: Poly) -> str:
    if p.is_zero():
        return "0"
    parts = [_format_term(m, c) for m, c in p.sorted_terms()]
    out = parts[0]
    for t in parts[1:]:
        out += "-" + t[1:] if t.startswith("-") else "+" + t
    return out


def format_expr(f: RatFun) -> str:
    if f.den == Poly.constant(1):
        return format_poly(f.num)
    num = format_poly(f.num)
    den = format_poly(f.den)
    if len(f.num.terms) > 1:
        num = f"({num})"
    if any(c in den[1:] for c in "*+-") or den.startswith("-"):
        den = f"({den})"
    return f"{num}/{den}"


def print_expr(f: RatFun) -> str:
    return format_expr(f)


def format_operator(terms: list[tuple[RatFun, dict[int, int]]]) -> str:
    if not terms:
        return "0"
    parts = []
    for c, d in sorted(terms, key=lambda t: sorted(t[1].items())):
        dstr = "*".join(
            f"d/d{TABLE.by_index(i).name}" + (f"^{e}" if e > 1 else "")
            for i, e in sorted(d.items())
        )
        cstr = format_expr(c)
        if not dstr:
            parts.append(cstr)
        elif cstr == "1":
            parts.append(dstr)
        else:
            if "+" in cstr[1:] or "-" in cstr[1:]:
                cstr = f"({cstr})"
            parts.append(f"{cstr}*{dstr}")
    out = parts[0]
    for t in parts[1:]:
        out += "-" + t[1:] if t.startswith("-") else "+" + t
    return out
