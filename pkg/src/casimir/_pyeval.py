"""Pure-Python evaluation backend.

Mirrors the compiled `_fasteval` extension instruction for instruction so the
two backends are interchangeable; selected at import time by `evalcore`.
"""

from __future__ import annotations

import cmath

BACKEND = "python"

# opcodes shared with the compiled backend
OP_CONST = 0
OP_VAR = 1
OP_ADD = 2
OP_MUL = 3
OP_POW = 4
OP_SIN = 5
OP_COS = 6
OP_EXP = 7


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


def run_program(code, consts, nvars, points):
    """Evaluate one compiled expression at many points.

    code: flat int list; consts: complex list; points: sequence of
    per-variable complex tuples.  Returns a list of complex values.
    """
    out = []
    stack = [0j] * 64
    for pt in points:
        sp = 0
        i = 0
        n = len(code)
        while i < n:
            op = code[i]
            if op == OP_CONST:
                stack[sp] = consts[code[i + 1]]
                sp += 1
                i += 2
            elif op == OP_VAR:
                stack[sp] = complex(pt[code[i + 1]])
                sp += 1
                i += 2
            elif op == OP_ADD:
                k = code[i + 1]
                acc = 0j
                for j in range(sp - k, sp):
                    acc += stack[j]
                sp -= k
                stack[sp] = acc
                sp += 1
                i += 2
            elif op == OP_MUL:
                k = code[i + 1]
                acc = complex(1.0)
                for j in range(sp - k, sp):
                    acc *= stack[j]
                sp -= k
                stack[sp] = acc
                sp += 1
                i += 2
            elif op == OP_POW:
                pnum, pden = code[i + 1], code[i + 2]
                v = stack[sp - 1]
                if pden == 1:
                    stack[sp - 1] = _ipow(v, pnum)
                else:
                    stack[sp - 1] = _ipow(v, (pnum - 1) // 2) * cmath.sqrt(v)
                i += 3
            elif op == OP_SIN:
                stack[sp - 1] = cmath.sin(stack[sp - 1])
                i += 1
            elif op == OP_COS:
                stack[sp - 1] = cmath.cos(stack[sp - 1])
                i += 1
            elif op == OP_EXP:
                stack[sp - 1] = cmath.exp(stack[sp - 1])
                i += 1
            else:  # pragma: no cover
                raise ValueError(f"bad opcode {op}")
        out.append(stack[0])
    return out


def hyp2f1_many(a: complex, b: complex, c: complex, zs, tol=1e-15, max_terms=20000):
    """Gauss hypergeometric series sum_k (a)_k (b)_k / ((c)_k k!) z^k, |z|<1."""
    out = []
    for z in zs:
        if abs(z) >= 1.0:
            raise ValueError(f"series argument outside the unit disk: |z|={abs(z):.3f}")
        term = complex(1.0)
        total = complex(1.0)
        k = 0
        while k < max_terms:
            term = term * (a + k) * (b + k) / ((c + k) * (k + 1)) * z
            total += term
            k += 1
            if abs(term) <= tol * (1.0 + abs(total)):
                break
        else:  # pragma: no cover
            raise ValueError("hypergeometric series did not converge")
        out.append(total)
    return out
