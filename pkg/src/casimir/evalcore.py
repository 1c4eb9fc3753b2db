"""Expression-to-program compilation and evaluation backend selection.

Numeric verification samples every residual at dozens of points and grid
export evaluates whole component tables, so batch evaluation is the hot path.
Expressions compile once into a flat stack program which either the Cython
extension (`casimir._fasteval`) or the pure-Python twin (`casimir._pyeval`)
executes.  Set CASIMIR_PURE_EVAL=1 to force the fallback.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

from . import expr as ex

if os.environ.get("CASIMIR_PURE_EVAL"):
    from . import _pyeval as _backend
else:
    try:
        from . import _fasteval as _backend  # type: ignore[attr-defined]
    except ImportError:
        from . import _pyeval as _backend

OP_CONST = 0
OP_VAR = 1
OP_ADD = 2
OP_MUL = 3
OP_POW = 4
OP_FUN = {"sin": 5, "cos": 6, "exp": 7}


def backend_name() -> str:
    return _backend.BACKEND


@dataclass(frozen=True)
class Program:
    code: tuple
    consts: tuple
    varnames: tuple

    def run(self, points) -> list:
        """points: sequence of tuples aligned with varnames."""
        return _backend.run_program(self.code, self.consts, len(self.varnames), points)

    def run_env(self, envs) -> list:
        pts = [tuple(env[n] for n in self.varnames) for env in envs]
        return self.run(pts)


def compile_expr(e: ex.Expr, varnames) -> Program:
    varnames = tuple(varnames)
    index = {n: i for i, n in enumerate(varnames)}
    code: list[int] = []
    consts: list[complex] = []
    cpool: dict[complex, int] = {}

    def emit_const(v: complex):
        k = cpool.get(v)
        if k is None:
            k = len(consts)
            consts.append(v)
            cpool[v] = k
        code.extend((OP_CONST, k))

    def go(n: ex.Expr):
        tt = type(n)
        if tt is ex.Num:
            emit_const(n.val.to_complex())
        elif tt is ex.Sym:
            try:
                code.extend((OP_VAR, index[n.name]))
            except KeyError:
                raise ex.EvalError(f"unbound symbol {n.name!r} in compiled program") from None
        elif tt is ex.Fun:
            go(n.arg)
            code.append(OP_FUN[n.fname])
        elif tt is ex.Pow:
            go(n.base)
            code.extend((OP_POW, n.exp.numerator, n.exp.denominator))
        elif tt is ex.Mul:
            count = len(n.factors)
            if not n.coef.is_one():
                emit_const(n.coef.to_complex())
                count += 1
            for f in n.factors:
                go(f)
            code.extend((OP_MUL, count))
        else:
            for t in n.terms:
                go(t)
            code.extend((OP_ADD, len(n.terms)))

    go(e)
    return Program(tuple(code), tuple(consts), varnames)


def hyp2f1(a: complex, b: complex, c: complex, zs, tol: float = 1e-15, max_terms: int = 20000):
    """Batch Gauss hypergeometric series on |z| < 1 via the active backend."""
    return _backend.hyp2f1_many(complex(a), complex(b), complex(c), list(map(complex, zs)), tol, max_terms)
