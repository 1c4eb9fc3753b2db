"""Recursive-descent parser for the expression grammar.

Grammar (EBNF)::

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := ('+' | '-') unary | power
    power   := primary ('^' unary)?
    primary := NUMBER | 'i' | NAME '(' expr ')' | NAME | '(' expr ')'
    NUMBER  := digits ['.' digits] [('e'|'E') ['+'|'-'] digits]

Exponents must constant-fold to an integer or half-integer rational.
Numeric literals are exact (decimals become rationals).  Functions are
sin, cos, cot, exp, sqrt; `i` is the imaginary unit.  Any other name must
be a declared coordinate or parameter.
"""

from __future__ import annotations

from fractions import Fraction

from . import expr as ex
from .cnum import CNum

_FUNCTION_NAMES = ("sin", "cos", "cot", "exp", "sqrt")


class ParseError(Exception):
    """Syntax or symbol error; carries the 0-based position in the input."""

    def __init__(self, message: str, pos: int, text: str = ""):
        super().__init__(f"{message} (at position {pos})")
        self.pos = pos
        self.text = text


class _Token:
    __slots__ = ("kind", "value", "pos")

    def __init__(self, kind, value, pos):
        self.kind = kind
        self.value = value
        self.pos = pos


def _tokenize(text: str) -> list[_Token]:
    out = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch.isdigit() or (ch == "." and i + 1 < n and text[i + 1].isdigit()):
            j = i
            while j < n and text[j].isdigit():
                j += 1
            if j < n and text[j] == ".":
                j += 1
                while j < n and text[j].isdigit():
                    j += 1
            if j < n and text[j] in "eE":
                k = j + 1
                if k < n and text[k] in "+-":
                    k += 1
                if k < n and text[k].isdigit():
                    j = k
                    while j < n and text[j].isdigit():
                        j += 1
            out.append(_Token("num", text[i:j], i))
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            out.append(_Token("name", text[i:j], i))
            i = j
            continue
        if ch in "+-*/^()":
            out.append(_Token(ch, ch, i))
            i += 1
            continue
        raise ParseError(f"unexpected character {ch!r}", i, text)
    out.append(_Token("end", "", n))
    return out


def _number_fraction(text: str) -> Fraction:
    mant, _, expo = text.lower().partition("e")
    if "." in mant:
        whole, frac = mant.split(".")
        base = Fraction(int(whole or "0")) + Fraction(int(frac or "0"), 10 ** len(frac))
    else:
        base = Fraction(int(mant))
    if expo:
        base *= Fraction(10) ** int(expo)
    return base


class _Parser:
    def __init__(self, text: str, names: set[str]):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.names = names

    def peek(self) -> _Token:
        return self.toks[self.i]

    def take(self) -> _Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, kind: str) -> _Token:
        t = self.take()
        if t.kind != kind:
            raise ParseError(f"expected {kind!r}, found {t.value!r}", t.pos, self.text)
        return t

    def parse(self) -> ex.Expr:
        e = self.expr()
        t = self.peek()
        if t.kind != "end":
            raise ParseError(f"unexpected {t.value!r}", t.pos, self.text)
        return e

    def expr(self) -> ex.Expr:
        e = self.term()
        while self.peek().kind in ("+", "-"):
            op = self.take().kind
            rhs = self.term()
            e = ex.add(e, rhs) if op == "+" else ex.sub(e, rhs)
        return e

    def term(self) -> ex.Expr:
        e = self.unary()
        while self.peek().kind in ("*", "/"):
            op = self.take().kind
            rhs = self.unary()
            e = ex.mul(e, rhs) if op == "*" else ex.div(e, rhs)
        return e

    def unary(self) -> ex.Expr:
        t = self.peek()
        if t.kind == "-":
            self.take()
            return ex.neg(self.unary())
        if t.kind == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self) -> ex.Expr:
        base = self.primary()
        if self.peek().kind == "^":
            op = self.take()
            e = self.unary()
            frac = _const_rational(e)
            if frac is None or frac.denominator not in (1, 2):
                raise ParseError(
                    "exponent must be an integer or half-integer constant", op.pos, self.text
                )
            try:
                return ex.power(base, frac)
            except ex.ExprError as err:
                raise ParseError(str(err), op.pos, self.text) from None
        return base

    def primary(self) -> ex.Expr:
        t = self.take()
        if t.kind == "num":
            return ex.num(_number_fraction(t.value))
        if t.kind == "(":
            e = self.expr()
            self.expect(")")
            return e
        if t.kind == "name":
            if t.value == "i":
                return ex.I
            if self.peek().kind == "(":
                if t.value not in _FUNCTION_NAMES:
                    raise ParseError(f"unknown function {t.value!r}", t.pos, self.text)
                self.take()
                arg = self.expr()
                self.expect(")")
                return ex.fun(t.value, arg)
            if t.value not in self.names:
                raise ParseError(
                    f"unknown symbol {t.value!r} (declared: {sorted(self.names)})",
                    t.pos,
                    self.text,
                )
            return ex.sym(t.value)
        raise ParseError(f"unexpected {t.value!r}", t.pos, self.text)


def _const_rational(e: ex.Expr):
    if type(e) is ex.Num and e.val.is_real():
        return e.val.re
    return None


def parse(text: str, coords, params=()) -> ex.Expr:
    """Parse an expression over the given coordinates and parameters."""
    names = set(coords) | set(params)
    if "i" in names:
        raise ParseError("'i' is reserved for the imaginary unit", 0, text)
    return _Parser(text, names).parse()
