"""Symbolic scalar expressions over named chart coordinates.

A deliberately small kernel: exact complex-rational coefficients, flattened
and sorted sums/products, integer and half-integer powers, and the function
set sin/cos/exp (cot and sqrt are rewritten on input).  Construction keeps
expressions in an expanded normal form:

* products distribute over sums; positive integer powers of sums expand;
* even powers of sin collapse to polynomials in cos, so the Pythagorean
  identity is built into the representation;
* half-integer and negative powers of polynomial bases are kept as atoms,
  with the base factored over its rational roots so that e.g. the inverse
  of 1 - cos^2 and the product of the inverses of 1 -/+ cos coincide.

Half-integer powers assume a positive base on the working domain, which all
built-in charts guarantee; ``simplify`` adds one sum-level normalization
(lowering same-base power atoms to a common exponent) and is idempotent.
Anything the kernel cannot prove zero falls back to numeric sampling in
:mod:`casimir.numcheck`.
"""

from __future__ import annotations

import cmath
from fractions import Fraction

from .cnum import CN_I, CN_ONE, CNum, fraction_gcd, fraction_sqrt

HALF = Fraction(1, 2)

_FUNCTIONS = ("sin", "cos", "exp")
_INPUT_FUNCTIONS = ("sin", "cos", "cot", "exp", "sqrt")


class ExprError(Exception):
    """Malformed expression construction or use."""


class EvalError(ExprError):
    """Evaluation hit an undefined point (pole, missing symbol)."""

    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point


class Expr:
    """Immutable expression node; compare and hash by canonical key."""

    __slots__ = ("_key", "_hash")

    def __eq__(self, other):
        if self is other:
            return True
        return (
            isinstance(other, Expr)
            and self._hash == other._hash
            and self._key == other._key
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"<expr {unparse(self)}>"

    # arithmetic sugar; right variants cover int/Fraction on the left
    def __add__(self, other):
        return add(self, as_expr(other))

    __radd__ = __add__

    def __sub__(self, other):
        return add(self, neg(as_expr(other)))

    def __rsub__(self, other):
        return add(as_expr(other), neg(self))

    def __mul__(self, other):
        return mul(self, as_expr(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return div(self, as_expr(other))

    def __rtruediv__(self, other):
        return div(as_expr(other), self)

    def __pow__(self, e):
        return power(self, e)

    def __neg__(self):
        return neg(self)


class Num(Expr):
    __slots__ = ("val",)

    def __init__(self, val: CNum):
        self.val = val
        self._key = (0, val.re, val.im)
        re, im = val.re, val.im
        self._hash = hash((0, re.numerator, re.denominator, im.numerator, im.denominator))

    # hashes must be cheap: every composite node combines the cached child
    # hashes instead of rehashing whole subtrees


class Sym(Expr):
    __slots__ = ("name",)

    def __init__(self, name: str):
        self.name = name
        self._key = (1, name)
        self._hash = hash(self._key)


class Fun(Expr):
    __slots__ = ("fname", "arg")

    def __init__(self, fname: str, arg: Expr):
        self.fname = fname
        self.arg = arg
        self._key = (2, fname, arg._key)
        self._hash = hash((2, fname, arg._hash))


class Pow(Expr):
    __slots__ = ("base", "exp")

    def __init__(self, base: Expr, exp: Fraction):
        self.base = base
        self.exp = exp
        self._key = (3, base._key, exp)
        self._hash = hash((3, base._hash, exp.numerator, exp.denominator))


class Mul(Expr):
    """coef * f1 * f2 * ...; factors are sorted Sym/Fun/Pow atoms."""

    __slots__ = ("coef", "factors")

    def __init__(self, coef: CNum, factors: tuple):
        self.coef = coef
        self.factors = factors
        self._key = (4, tuple(f._key for f in factors), coef.re, coef.im)
        self._hash = hash(
            (4, tuple(f._hash for f in factors),
             coef.re.numerator, coef.re.denominator, coef.im.numerator, coef.im.denominator)
        )


class Add(Expr):
    """Sorted sum of terms with distinct monomial parts."""

    __slots__ = ("terms",)

    def __init__(self, terms: tuple):
        self.terms = terms
        self._key = (5, tuple(t._key for t in terms))
        self._hash = hash((5, tuple(t._hash for t in terms)))


ZERO = Num(CNum(0))
ONE = Num(CN_ONE)
I = Num(CN_I)


def num(re, im=0) -> Num:
    if isinstance(re, CNum):
        return Num(re)
    return Num(CNum(re, im))


def sym(name: str) -> Sym:
    if not name or not name[0].isalpha():
        raise ExprError(f"bad symbol name {name!r}")
    return Sym(name)


def syms(names: str) -> list:
    return [sym(n) for n in names.replace(",", " ").split()]


def as_expr(x) -> Expr:
    if isinstance(x, Expr):
        return x
    if isinstance(x, (int, Fraction)):
        return Num(CNum(x))
    raise TypeError(f"cannot coerce {type(x).__name__} to Expr")


def _as_exp(e) -> Fraction:
    if isinstance(e, int):
        e = Fraction(e)
    elif isinstance(e, Num):
        if e.val.im != 0:
            raise ExprError("exponent must be a real rational")
        e = e.val.re
    if not isinstance(e, Fraction):
        raise ExprError(f"bad exponent {e!r}")
    if e.denominator not in (1, 2):
        raise ExprError(f"only integer and half-integer exponents are supported, got {e}")
    return e


def _coef_mono(t: Expr) -> tuple[CNum, tuple]:
    """Split a canonical term into (coefficient, monomial factor tuple)."""
    tt = type(t)
    if tt is Num:
        return t.val, ()
    if tt is Mul:
        return t.coef, t.factors
    return CN_ONE, (t,)


def _lead_cnum(e: Expr) -> CNum:
    tt = type(e)
    if tt is Num:
        return e.val
    if tt is Mul:
        return e.coef
    if tt is Add:
        return _lead_cnum(e.terms[0])
    return CN_ONE


# ---------------------------------------------------------------------------
# sums


def _term_expr(c: CNum, mono: tuple) -> Expr:
    if not mono:
        return Num(c)
    if c.is_one() and len(mono) == 1:
        return mono[0]
    return Mul(c, mono)


def _mono_key(t: Expr) -> tuple:
    return tuple(f._key for f in _coef_mono(t)[1])


def add(*items) -> Expr:
    acc: dict[tuple, list] = {}
    stack = list(items)
    while stack:
        e = stack.pop()
        if type(e) is Add:
            stack.extend(e.terms)
            continue
        c, mono = _coef_mono(e)
        ent = acc.get(mono)
        if ent is None:
            acc[mono] = [c, mono]
        else:
            ent[0] = ent[0] + c
    terms = [_term_expr(c, mono) for c, mono in acc.values() if not c.is_zero()]
    if not terms:
        return ZERO
    if len(terms) == 1:
        return terms[0]
    terms.sort(key=_mono_key)
    return Add(tuple(terms))


def neg(e) -> Expr:
    return mul(Num(CNum(-1)), as_expr(e))


def sub(a, b) -> Expr:
    return add(as_expr(a), neg(b))


# ---------------------------------------------------------------------------
# products

_ONE_MINUS_COS = "B-"
_ONE_PLUS_COS = "B+"


def _classify_cos_base(b: Expr):
    """Recognize 1 - cos(u) and 1 + cos(u); returns (tag, u) or None."""
    if type(b) is not Add or len(b.terms) != 2:
        return None
    t0, t1 = b.terms
    if type(t0) is not Num or t0.val != CN_ONE:
        return None
    c, mono = _coef_mono(t1)
    if len(mono) != 1 or type(mono[0]) is not Fun or mono[0].fname != "cos":
        return None
    if c == CN_ONE:
        return (_ONE_PLUS_COS, mono[0].arg)
    if c == CNum(-1):
        return (_ONE_MINUS_COS, mono[0].arg)
    return None


def _cos_bases(u: Expr) -> tuple[Expr, Expr]:
    cos_u = Fun("cos", u)
    minus = Add((ONE, Mul(CNum(-1), (cos_u,))))
    plus = Add((ONE, cos_u))
    return minus, plus


def _padd(pmap: dict, base: Expr, e: Fraction):
    cur = pmap.get(base)
    if cur is None:
        pmap[base] = e
    else:
        tot = cur + e
        if tot == 0:
            del pmap[base]
        else:
            pmap[base] = tot


def mul(*items) -> Expr:
    coef = CN_ONE
    pmap: dict[Expr, Fraction] = {}
    pend: list[Add] = []
    stack = list(items)
    while stack:
        e = stack.pop()
        tt = type(e)
        if tt is Num:
            coef = coef * e.val
        elif tt is Mul:
            coef = coef * e.coef
            stack.extend(e.factors)
        elif tt is Add:
            pend.append(e)
        elif tt is Pow:
            _padd(pmap, e.base, e.exp)
        elif tt is Sym or tt is Fun:
            _padd(pmap, e, Fraction(1))
        else:
            raise TypeError(f"cannot multiply {e!r}")
    if coef.is_zero():
        return ZERO

    # merge exp factors: exp(u)^a * exp(w)^b -> exp(a*u + b*w)
    exp_parts = []
    for b in [b for b in pmap if type(b) is Fun and b.fname == "exp"]:
        e = pmap.pop(b)
        exp_parts.append(b.arg if e == 1 else mul(Num(CNum(e)), b.arg))
    if exp_parts:
        s = add(*exp_parts)
        if s is not ZERO:
            _padd(pmap, Fun("exp", s), Fraction(1))

    # normalization rules on the power map
    changed = True
    while changed:
        changed = False
        # pair half powers of 1 -/+ cos(u) back into sin(u)
        cos_pairs: dict[tuple, dict] = {}
        if any(type(b) is Add and e.denominator == 2 for b, e in pmap.items()):
            for b, e in pmap.items():
                if e.denominator != 2:
                    continue
                tag = _classify_cos_base(b)
                if tag is not None:
                    cos_pairs.setdefault(tag[1]._key, {"u": tag[1]})[tag[0]] = (b, e)
        for ent in cos_pairs.values():
            if _ONE_MINUS_COS in ent and _ONE_PLUS_COS in ent:
                bm, hm = ent[_ONE_MINUS_COS]
                bp, hp = ent[_ONE_PLUS_COS]
                m = min(hm, hp)
                del pmap[bm]
                del pmap[bp]
                _padd(pmap, Fun("sin", ent["u"]), 2 * m)
                if hm > m:
                    _padd(pmap, bm, hm - m)
                elif hp > m:
                    _padd(pmap, bp, hp - m)
                changed = True
        if changed:
            continue
        # sin(u)^e with |e| >= 2 (or e <= -1): peel even part into 1 - cos^2
        for b, e in list(pmap.items()):
            if type(b) is Fun and b.fname == "sin" and e.denominator == 1 and (e >= 2 or e <= -1):
                r = int(e) % 2
                k = (int(e) - r) // 2
                if r:
                    pmap[b] = Fraction(r)
                else:
                    del pmap[b]
                bm, bp = _cos_bases(b.arg)
                _padd(pmap, bm, Fraction(k))
                _padd(pmap, bp, Fraction(k))
                changed = True
        if changed:
            continue
        # polynomial powers of sums expand; half powers >= 3/2 shed one copy
        for b, e in list(pmap.items()):
            if type(b) is Add:
                if e.denominator == 1 and e > 0:
                    del pmap[b]
                    pend.extend([b] * int(e))
                    changed = True
                elif e.denominator == 2 and e >= Fraction(3, 2):
                    pmap[b] = e - 1
                    pend.append(b)
                    changed = True

    # a pending sum equal to an atom base with low exponent multiplies into it
    if pend:
        remaining = []
        for a in pend:
            e = pmap.get(a)
            if e is not None and e <= Fraction(-1, 2):
                if e == -1:
                    del pmap[a]
                else:
                    pmap[a] = e + 1
            else:
                remaining.append(a)
        pend = remaining

    base_expr = _assemble(coef, pmap)
    if not pend:
        return base_expr
    exprs = [base_expr]
    for a in pend:
        exprs = [mul(x, t) for x in exprs for t in a.terms]
    return add(*exprs)


def _assemble(coef: CNum, pmap: dict) -> Expr:
    factors = []
    radicand = Fraction(1)
    for b, e in pmap.items():
        if type(b) is Num and b.val.is_real():
            if e.denominator == 1:
                coef = coef * (b.val ** int(e))
                continue
            k = int(e - HALF)
            coef = coef * (b.val ** k)
            r = b.val.re
            if r < 0:
                coef = coef * CN_I
                r = -r
            radicand *= r
        else:
            factors.append(b if e == 1 else Pow(b, e))
    if radicand != 1:
        q, f = fraction_sqrt(radicand)
        coef = coef * CNum(q)
        if f != 1:
            factors.append(Pow(Num(CNum(f)), HALF))
    if coef.is_zero():
        return ZERO
    if not factors:
        return Num(coef)
    factors.sort(key=lambda f: f._key)
    if coef.is_one() and len(factors) == 1:
        return factors[0]
    return Mul(coef, tuple(factors))


def div(a, b) -> Expr:
    return mul(as_expr(a), power(as_expr(b), -1))


# ---------------------------------------------------------------------------
# powers


def power(b, e) -> Expr:
    b = as_expr(b)
    e = _as_exp(e)
    if e == 0:
        return ONE  # bases are assumed nonzero on the working domain
    if e == 1:
        return b
    tt = type(b)
    if tt is Num:
        return _num_power(b.val, e)
    if tt is Mul:
        return mul(_num_power(b.coef, e), *[power(f, e) for f in b.factors])
    if tt is Pow:
        return power(b.base, b.exp * e)
    if tt is Add:
        if e.denominator == 1 and e > 0:
            return mul(*([b] * int(e)))
        return _add_power(b, e)
    if tt is Fun and b.fname == "exp":
        return fun("exp", mul(Num(CNum(e)), b.arg))
    if tt is Fun and b.fname == "sin" and e.denominator == 1 and (e >= 2 or e <= -1):
        return mul(Pow(b, e))
    return Pow(b, e)


def _num_power(v: CNum, e: Fraction) -> Expr:
    if e.denominator == 1:
        return Num(v ** int(e))
    if v.is_zero():
        if e > 0:
            return ZERO
        raise ExprError("0 raised to a negative half-integer power")
    if not v.is_real():
        # exact complex roots are out of scope; keep an opaque atom
        return Pow(Num(v), e)
    k = int(e - HALF)
    out = v ** k
    r = v.re
    if r < 0:
        out = out * CN_I
        r = -r
    q, f = fraction_sqrt(r)
    out = out * CNum(q)
    if f == 1:
        return Num(out)
    return mul(Num(out), Pow(Num(CNum(f)), HALF))


_ADD_POWER_CACHE: dict = {}


def _add_power(b: Add, e: Fraction) -> Expr:
    key = (b, e)
    hit = _ADD_POWER_CACHE.get(key)
    if hit is not None:
        return hit
    out = _add_power_uncached(b, e)
    if len(_ADD_POWER_CACHE) > 100_000:
        _ADD_POWER_CACHE.clear()
    _ADD_POWER_CACHE[key] = out
    return out


def _add_power_uncached(b: Add, e: Fraction) -> Expr:
    scale, prim = _primitive_sum(b)
    parts = _factor_poly(prim)
    out = [_num_power(scale, e)]
    if parts is None:
        out.append(_atom_power(prim, e))
    else:
        lead, factors = parts
        out.append(_num_power(lead, e))
        for base, mult in factors:
            fe = mult * e
            if isinstance(base, Add):
                if fe.denominator == 1 and fe > 0:
                    out.append(mul(*([base] * int(fe))))
                else:
                    out.append(_atom_power(base, fe))
            else:
                out.append(power(base, fe))
    return mul(*out)


def _atom_power(prim: Add, e: Fraction) -> Expr:
    # route through mul so the >=3/2 shedding and cos pairing rules apply
    return mul(Pow(prim, e))


def _primitive_sum(b: Add) -> tuple[CNum, Add]:
    """Extract content and orientation sign: b == scale * primitive."""
    content = None
    for t in b.terms:
        c, _ = _coef_mono(t)
        for part in (abs(c.re), abs(c.im)):
            if part != 0:
                content = part if content is None else fraction_gcd(content, part)
    if content is None:
        raise ExprError("empty sum")
    scale = CNum(content)
    if _lead_cnum(b).negative_lead():
        scale = -scale
    if scale.is_one():
        return CN_ONE, b
    inv = Num(scale.inverse())
    prim = add(*[mul(inv, t) for t in b.terms])
    return scale, prim


def _factor_poly(b: Add):
    """Factor a primitive univariate polynomial over its rational roots.

    Returns (leading rational, [(factor, multiplicity), ...]) or None when b
    is not a real univariate polynomial in a single kernel atom, has degree
    < 2, or simply has no rational roots worth splitting off.
    """
    kernel = None
    coeffs: dict[int, Fraction] = {}
    for t in b.terms:
        c, mono = _coef_mono(t)
        if not c.is_real():
            return None
        if len(mono) == 0:
            deg = 0
        elif len(mono) == 1:
            f = mono[0]
            if type(f) is Pow:
                if not (type(f.base) in (Sym, Fun) and f.exp.denominator == 1 and f.exp > 0):
                    return None
                k, deg = f.base, int(f.exp)
            elif type(f) in (Sym, Fun):
                k, deg = f, 1
            else:
                return None
            if type(k) is Fun and k.fname == "exp":
                return None
            if kernel is None:
                kernel = k
            elif kernel != k:
                return None
        else:
            return None
        coeffs[deg] = coeffs.get(deg, Fraction(0)) + c.re
    degree = max(coeffs)
    if degree < 2 or kernel is None:
        return None
    poly = [coeffs.get(d, Fraction(0)) for d in range(degree + 1)]

    factors: list[tuple[Expr, int]] = []
    # strip kernel^m
    low = 0
    while poly[low] == 0:
        low += 1
    if low:
        poly = poly[low:]
        factors.append((kernel, low))
    roots = _rational_roots(poly)
    if not roots and not factors:
        return None
    lead = Fraction(1)
    for r, mult in roots:
        # orient the linear factor so its constant (or leading) part is positive
        if r > 0:
            base = add(Num(CNum(r)), neg(kernel))  # (r - k)
            lead *= Fraction(-1) ** mult
        elif r < 0:
            base = add(kernel, Num(CNum(-r)))  # (k + |r|)
        else:  # pragma: no cover - zero roots stripped above
            continue
        factors.append((base, mult))
    # remainder polynomial
    rem_deg = len(poly) - 1
    if rem_deg == 0:
        lead *= poly[0]
    else:
        rem_terms = []
        for d, c in enumerate(poly):
            if c:
                rem_terms.append(mul(Num(CNum(c)), power(kernel, d)))
        rem = add(*rem_terms)
        scale, prim = _primitive_sum(rem) if isinstance(rem, Add) else (CN_ONE, rem)
        if isinstance(scale, CNum) and not scale.is_one():
            lead *= scale.re
        if isinstance(prim, Add):
            factors.append((prim, 1))
        else:
            factors.append((prim, 1))
    if len(factors) == 1 and factors[0][1] == 1 and isinstance(factors[0][0], Add):
        return None
    return CNum(lead), factors


def _rational_roots(poly: list[Fraction]) -> list[tuple[Fraction, int]]:
    """Rational roots (with multiplicity) of poly, destructively deflating it."""
    from math import gcd

    found: list[tuple[Fraction, int]] = []

    def record(r):
        if found and found[-1][0] == r:
            found[-1] = (r, found[-1][1] + 1)
        else:
            found.append((r, 1))

    while len(poly) > 1:
        den = 1
        for c in poly:
            den = den * c.denominator // gcd(den, c.denominator)
        ints = [int(c * den) for c in poly]
        a0, an = ints[0], ints[-1]
        if a0 == 0:
            poly[:] = poly[1:]
            record(Fraction(0))
            continue
        root = None
        for p in _divisors(abs(a0)):
            for q in _divisors(abs(an)):
                for s in (1, -1):
                    r = Fraction(s * p, q)
                    if _poly_eval(poly, r) == 0:
                        root = r
                        break
                if root is not None:
                    break
            if root is not None:
                break
        if root is None:
            break
        poly[:] = _deflate(poly, root)
        record(root)
    return found


def _divisors(n: int) -> list[int]:
    out = [d for d in range(1, n + 1) if n % d == 0]
    return out


def _poly_eval(poly: list[Fraction], x: Fraction) -> Fraction:
    out = Fraction(0)
    for c in reversed(poly):
        out = out * x + c
    return out


def _deflate(poly: list[Fraction], r: Fraction) -> list[Fraction]:
    # poly = (kernel - r) * out, ascending coefficients
    n = len(poly) - 1
    out = [Fraction(0)] * n
    out[n - 1] = poly[n]
    for d in range(n - 2, -1, -1):
        out[d] = poly[d + 1] + r * out[d + 1]
    return out


# ---------------------------------------------------------------------------
# functions


def fun(name: str, arg) -> Expr:
    arg = as_expr(arg)
    if name == "sqrt":
        return power(arg, HALF)
    if name == "cot":
        return mul(fun("cos", arg), power(fun("sin", arg), -1))
    if name not in _FUNCTIONS:
        raise ExprError(f"unknown function {name!r}")
    if name == "exp":
        if arg == ZERO:
            return ONE
        return Fun("exp", arg)
    if arg == ZERO:
        return ZERO if name == "sin" else ONE
    if _lead_cnum(arg).negative_lead():
        inner = Fun(name, neg(arg))
        return mul(Num(CNum(-1)), inner) if name == "sin" else inner
    return Fun(name, arg)


def sin(arg) -> Expr:
    return fun("sin", arg)


def cos(arg) -> Expr:
    return fun("cos", arg)


def exp(arg) -> Expr:
    return fun("exp", arg)


def cot(arg) -> Expr:
    return fun("cot", arg)


def sqrt(arg) -> Expr:
    return power(as_expr(arg), HALF)


# ---------------------------------------------------------------------------
# calculus, evaluation, structure


_DIFF_CACHE: dict = {}


def diff(e: Expr, x: str) -> Expr:
    key = (e, x)
    hit = _DIFF_CACHE.get(key)
    if hit is not None:
        return hit
    out = _diff(e, x)
    if len(_DIFF_CACHE) > 400_000:
        _DIFF_CACHE.clear()
    _DIFF_CACHE[key] = out
    return out


def _diff(e: Expr, x: str) -> Expr:
    tt = type(e)
    if tt is Num:
        return ZERO
    if tt is Sym:
        return ONE if e.name == x else ZERO
    if tt is Fun:
        da = diff(e.arg, x)
        if da is ZERO:
            return ZERO
        if e.fname == "sin":
            d = fun("cos", e.arg)
        elif e.fname == "cos":
            d = neg(fun("sin", e.arg))
        else:
            d = e
        return mul(d, da)
    if tt is Pow:
        db = diff(e.base, x)
        if db is ZERO:
            return ZERO
        return mul(Num(CNum(e.exp)), power(e.base, e.exp - 1), db)
    if tt is Mul:
        parts = []
        fs = e.factors
        for i, f in enumerate(fs):
            df = diff(f, x)
            if df is ZERO:
                continue
            parts.append(mul(Num(e.coef), df, *fs[:i], *fs[i + 1:]))
        return add(*parts)
    return add(*[diff(t, x) for t in e.terms])


def free_symbols(e: Expr) -> set:
    out: set[str] = set()
    stack = [e]
    while stack:
        n = stack.pop()
        tt = type(n)
        if tt is Sym:
            out.add(n.name)
        elif tt is Fun:
            stack.append(n.arg)
        elif tt is Pow:
            stack.append(n.base)
        elif tt is Mul:
            stack.extend(n.factors)
        elif tt is Add:
            stack.extend(n.terms)
    return out


def subs(e: Expr, mapping: dict) -> Expr:
    """Substitute symbols by expressions (values coerced via as_expr)."""
    m = {k: as_expr(v) for k, v in mapping.items()}

    def go(n):
        tt = type(n)
        if tt is Num:
            return n
        if tt is Sym:
            return m.get(n.name, n)
        if tt is Fun:
            return fun(n.fname, go(n.arg))
        if tt is Pow:
            return power(go(n.base), n.exp)
        if tt is Mul:
            return mul(Num(n.coef), *[go(f) for f in n.factors])
        return add(*[go(t) for t in n.terms])

    return go(e)


def _cpow(v: complex, e: Fraction) -> complex:
    if e.denominator == 1:
        k = int(e)
    else:
        k = int(e - HALF)
        root = cmath.sqrt(v)
        return _ipow(v, k) * root
    return _ipow(v, k)


def _ipow(v: complex, k: int) -> complex:
    if k < 0:
        if v == 0:
            raise ZeroDivisionError("pole in expression evaluation")
        return 1.0 / _ipow(v, -k)
    out = complex(1.0)
    base = v
    while k:
        if k & 1:
            out *= base
        base *= base
        k >>= 1
    return out


def evaluate(e: Expr, env: dict) -> complex:
    """Evaluate at a point; deterministic given the canonical node order."""
    tt = type(e)
    if tt is Num:
        return e.val.to_complex()
    if tt is Sym:
        try:
            return complex(env[e.name])
        except KeyError:
            raise EvalError(f"unbound symbol {e.name!r}", dict(env)) from None
    if tt is Fun:
        v = evaluate(e.arg, env)
        if e.fname == "sin":
            return cmath.sin(v)
        if e.fname == "cos":
            return cmath.cos(v)
        return cmath.exp(v)
    if tt is Pow:
        return _cpow(evaluate(e.base, env), e.exp)
    if tt is Mul:
        out = e.coef.to_complex()
        for f in e.factors:
            out *= evaluate(f, env)
        return out
    out = complex(0.0)
    for t in e.terms:
        out += evaluate(t, env)
    return out


# ---------------------------------------------------------------------------
# simplification


def simplify(e: Expr) -> Expr:
    tt = type(e)
    if tt is Num or tt is Sym:
        return e
    if tt is Fun:
        return fun(e.fname, simplify(e.arg))
    if tt is Pow:
        return power(simplify(e.base), e.exp)
    if tt is Mul:
        return mul(Num(e.coef), *[simplify(f) for f in e.factors])
    s = add(*[simplify(t) for t in e.terms])
    for _ in range(64):
        if type(s) is not Add:
            return s
        s2 = _common_exponent_pass(s)
        if s2 is s:
            return s
        s = s2
    raise ExprError("simplify did not reach a fixed point")


def _term_atom_exp(mono: tuple, base: Expr) -> tuple[Fraction | None, tuple]:
    """Exponent of `base` in the monomial and the remaining factors."""
    rest = []
    found = None
    for f in mono:
        if type(f) is Pow and f.base == base:
            found = f.exp
        elif f == base:
            found = Fraction(1)
        else:
            rest.append(f)
    return found, tuple(rest)


def _common_exponent_pass(s: Add) -> Expr:
    """Lower same-base power atoms across a sum to one exponent per parity.

    Powers of the same polynomial base that differ by an integer are brought
    to the minimum exponent present (multiplying the complementary expanded
    polynomial back in), which lets collection cancel algebraic combinations
    such as sqrt-type derivatives and inverse-square potentials.
    """
    decomp = [_coef_mono(t) for t in s.terms]
    spots: dict[Expr, dict[int, set]] = {}
    plain: dict[Expr, int] = {}
    for c, mono in decomp:
        for f in mono:
            base = f.base if type(f) is Pow else f
            if type(base) is Add:
                e = f.exp if type(f) is Pow else Fraction(1)
                spots.setdefault(base, {}).setdefault(e.denominator, set()).add(e)
    for base in spots:
        plain[base] = sum(1 for c, mono in decomp if _term_atom_exp(mono, base)[0] is None)
    for base in sorted(spots, key=lambda b: b._key):
        classes = spots[base]
        for den in (1, 2):
            exps = classes.get(den, set())
            if den == 1:
                # integer-class atoms are always negative powers; bare
                # polynomial terms can cancel against them after inflation
                fire = bool(exps) and (len(exps) > 1 or plain.get(base, 0) > 0)
            else:
                fire = len(exps) > 1
            if not fire:
                continue
            target = min(exps)
            new_terms = []
            for c, mono in decomp:
                cur, rest = _term_atom_exp(mono, base)
                if cur is None and den == 1:
                    cur, rest = Fraction(0), mono
                if cur is None or cur.denominator != den or cur == target:
                    new_terms.append(_term_expr(c, mono))
                    continue
                delta = cur - target
                polyterm = power(base, delta)
                polyterms = polyterm.terms if type(polyterm) is Add else (polyterm,)
                atom = Pow(base, target)
                for pt in polyterms:
                    new_terms.append(mul(Num(c), *rest, atom, pt))
            return add(*new_terms)
    return s


def is_zero_expr(e: Expr) -> bool:
    return simplify(e) == ZERO


# ---------------------------------------------------------------------------
# printing


def _num_str(v: CNum) -> str:
    if v.im == 0:
        return str(v.re)
    if v.re == 0:
        if v.im == 1:
            return "i"
        if v.im == -1:
            return "-i"
        return f"{v.im}*i"
    im = f"{v.im}*i" if v.im not in (1, -1) else ("i" if v.im == 1 else "-i")
    if v.im > 0 or im.startswith("-"):
        joined = f"{v.re}+{im}" if not im.startswith("-") else f"{v.re}{im}"
    else:  # pragma: no cover
        joined = f"{v.re}{im}"
    return f"({joined})"


def _pow_str(p: Pow) -> str:
    b = p.base
    tb = type(b)
    if tb is Sym:
        bs = b.name
    elif tb is Fun:
        bs = _fun_str(b)
    elif tb is Num and b.val.is_real() and b.val.re.denominator == 1 and b.val.re >= 0:
        bs = _num_str(b.val)
    else:
        bs = f"({unparse(b)})"
    e = p.exp
    if e.denominator == 1 and e > 0:
        return f"{bs}^{int(e)}"
    return f"{bs}^({e})"


def _fun_str(f: Fun) -> str:
    return f"{f.fname}({unparse(f.arg)})"


def _factor_str(f: Expr) -> str:
    tf = type(f)
    if tf is Sym:
        return f.name
    if tf is Fun:
        return _fun_str(f)
    if tf is Pow:
        return _pow_str(f)
    raise ExprError(f"unexpected factor {f!r}")  # pragma: no cover


def _term_parts(t: Expr) -> tuple[str, str]:
    """(sign, body) with the sign pulled out of the coefficient."""
    c, mono = _coef_mono(t)
    sign = ""
    if c.negative_lead():
        sign = "-"
        c = -c
    if not mono:
        return sign, _num_str(c)
    body = "*".join(_factor_str(f) for f in mono)
    if not c.is_one():
        body = f"{_num_str(c)}*{body}"
    return sign, body


def unparse(e: Expr) -> str:
    """Canonical string form; reparses to a structurally equal expression."""
    tt = type(e)
    if tt is Add:
        sign, body = _term_parts(e.terms[0])
        out = [f"{sign}{body}"]
        for t in e.terms[1:]:
            sign, body = _term_parts(t)
            out.append(f" - {body}" if sign else f" + {body}")
        return "".join(out)
    sign, body = _term_parts(e)
    return f"{sign}{body}"
