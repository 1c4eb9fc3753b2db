"""Tri-state zero verification: symbolic first, numeric sampling as fallback.

The numeric stage evaluates the simplified expression at quasi-random points
of a caller-supplied coordinate box (Halton sequence, offset by a seed so CLI
reports are reproducible) and compares against the largest term magnitude, so
cancellation noise does not mask a genuinely nonzero expression.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from . import evalcore
from . import expr as ex

REL_TOL = 1e-9
NUM_POINTS = 32

_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53)


class Verdict(Enum):
    SYMBOLIC_ZERO = "symbolically-zero"
    NUMERIC_ZERO = "numerically-zero"
    NONZERO = "nonzero"

    @property
    def is_zero(self) -> bool:
        return self is not Verdict.NONZERO


class UndefinedPointError(ex.EvalError):
    """A sample point hit a pole; the caller should shrink the box."""


@dataclass(frozen=True)
class ZeroReport:
    verdict: Verdict
    witness: dict | None = None
    max_abs: float = 0.0
    scale: float = 0.0
    detail: str = ""

    @property
    def is_zero(self) -> bool:
        return self.verdict.is_zero

    def to_json(self) -> dict:
        out = {"verdict": self.verdict.value}
        if self.witness is not None:
            out["witness"] = {k: repr(v) for k, v in self.witness.items()}
        if self.verdict is not Verdict.SYMBOLIC_ZERO:
            out["max_abs"] = self.max_abs
            out["scale"] = self.scale
        if self.detail:
            out["detail"] = self.detail
        return out


def _radical_inverse(index: int, base: int) -> float:
    out, f = 0.0, 1.0 / base
    while index > 0:
        out += (index % base) * f
        index //= base
        f /= base
    return out


def halton_points(dim: int, n: int, seed: int = 0) -> list[tuple[float, ...]]:
    """Deterministic low-discrepancy points in [0,1)^dim, offset by seed."""
    if dim > len(_PRIMES):
        raise ValueError(f"too many dimensions for the Halton table ({dim})")
    start = 13 + (seed % 1009) * 17
    return [
        tuple(_radical_inverse(start + j, _PRIMES[d]) for d in range(dim))
        for j in range(n)
    ]


def sample_box(box: dict, n: int, seed: int = 0) -> list[dict]:
    """n points inside the box {name: (lo, hi)}, slightly inset from the edges."""
    names = sorted(box)
    unit = halton_points(len(names), n, seed)
    out = []
    for row in unit:
        env = {}
        for d, name in enumerate(names):
            lo, hi = box[name]
            u = 0.02 + 0.96 * row[d]
            env[name] = lo + (hi - lo) * u
        out.append(env)
    return out


def is_zero(e: ex.Expr, box: dict | None = None, seed: int = 0, points: int = NUM_POINTS,
            rel_tol: float = REL_TOL) -> ZeroReport:
    """Decide whether `e` vanishes on the box.

    Symbolically zero when simplification reaches the 0 literal; otherwise
    numerically zero when max |e| < rel_tol * (1 + max term magnitude) over
    the sample; otherwise nonzero with a witness point.
    """
    s = ex.simplify(e)
    if s == ex.ZERO:
        return ZeroReport(Verdict.SYMBOLIC_ZERO)
    names = sorted(ex.free_symbols(s))
    if box is None:
        box = {}
    missing = [n for n in names if n not in box]
    if missing:
        raise ex.EvalError(f"no sampling interval for symbols {missing}")
    if not names:
        v = abs(ex.evaluate(s, {}))
        if v < rel_tol:
            return ZeroReport(Verdict.NUMERIC_ZERO, max_abs=v, scale=1.0)
        return ZeroReport(Verdict.NONZERO, witness={}, max_abs=v, scale=1.0)

    envs = sample_box({n: box[n] for n in names}, points, seed)
    terms = s.terms if type(s) is ex.Add else (s,)
    progs = [evalcore.compile_expr(t, names) for t in terms]
    pts = [tuple(env[n] for n in names) for env in envs]
    try:
        per_term = [p.run(pts) for p in progs]
    except ZeroDivisionError:
        bad = _locate_pole(progs, pts, envs)
        raise UndefinedPointError(
            f"sample point hit a pole at {bad}; shrink the domain box", bad
        ) from None

    max_total, scale, witness = 0.0, 0.0, None
    for j, env in enumerate(envs):
        tot = 0j
        for vals in per_term:
            v = vals[j]
            tot += v
            scale = max(scale, abs(v))
        a = abs(tot)
        if a > max_total:
            max_total, witness = a, env
    if max_total < rel_tol * (1.0 + scale):
        return ZeroReport(Verdict.NUMERIC_ZERO, max_abs=max_total, scale=scale)
    return ZeroReport(Verdict.NONZERO, witness=witness, max_abs=max_total, scale=scale)


def _locate_pole(progs, pts, envs) -> dict:
    for j, pt in enumerate(pts):
        for p in progs:
            try:
                p.run([pt])
            except ZeroDivisionError:
                return envs[j]
    return {}  # pragma: no cover - pole vanished on retry


def all_zero(exprs, box: dict | None = None, seed: int = 0, **kw) -> tuple[bool, list[ZeroReport]]:
    reports = [is_zero(e, box, seed, **kw) for e in exprs]
    return all(r.is_zero for r in reports), reports
