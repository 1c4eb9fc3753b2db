"""Benchmark: compiled evaluation core vs the pure-Python fallback.

Times batch evaluation of representative expressions (a weight-3 harmonic
component, an invariant-metric entry, a radial residual combination) and
the hypergeometric series, on both backends.

Run:  python3 benchmarks/bench_eval.py [npoints]
"""

from __future__ import annotations

import importlib
import sys
import time

from casimir import _pyeval
from casimir import evalcore
from casimir import expr as ex
from casimir.models import bianchi2_model, so3_model

try:
    from casimir import _fasteval
except ImportError:
    _fasteval = None


def cases():
    so3 = so3_model()
    b2 = bianchi2_model()
    t32 = so3.ladder_family(3, 2)[1]
    out = [
        ("harmonic l=3 n=2 m=1", t32, ("theta", "phi"), [(0.3 + 0.07 * (i % 37), 0.1 + 0.05 * (i % 101)) for i in range(1000)]),
        ("metric g^{11}", b2.metric.g[0][0], ("v", "y", "z"), [(0.8 * ((i % 17) / 17 - 0.5), 0.5, 0.1) for i in range(1000)]),
        (
            "point-series profile n=3 m=0",
            b2.point_series_profile(3, 0),
            ("v",),
            [(-0.9 + 1.8 * i / 999,) for i in range(1000)],
        ),
    ]
    return out


def run_backend(backend, reps: int, npoints: int):
    rows = []
    for name, e, names, pts in cases():
        pts = (pts * (npoints // len(pts) + 1))[:npoints]
        prog = evalcore.compile_expr(e, names)
        t0 = time.perf_counter()
        for _ in range(reps):
            backend.run_program(prog.code, prog.consts, len(prog.varnames), pts)
        dt = (time.perf_counter() - t0) / reps
        rows.append((name, dt))
    zs = [complex(-0.81 * i / (npoints - 1)) for i in range(npoints)]
    t0 = time.perf_counter()
    for _ in range(reps):
        backend.hyp2f1_many(complex(-0.5), complex(0.5), complex(0.5), zs, 1e-15, 20000)
    rows.append(("hypergeometric series", (time.perf_counter() - t0) / reps))
    return rows


def main():
    npoints = int(sys.argv[1]) if len(sys.argv) > 1 else 20000
    reps = 3
    print(f"batch size {npoints}, best of {reps} runs\n")
    py_rows = run_backend(_pyeval, reps, npoints)
    if _fasteval is None:
        print("compiled backend not built; showing pure-Python timings only\n")
        for name, dt in py_rows:
            print(f"{name:34s} python {dt * 1e3:9.2f} ms")
        return
    c_rows = run_backend(_fasteval, reps, npoints)
    # agreement check before timing claims
    for name, e, names, pts in cases():
        prog = evalcore.compile_expr(e, names)
        a = _pyeval.run_program(prog.code, prog.consts, len(prog.varnames), pts[:50])
        b = _fasteval.run_program(prog.code, prog.consts, len(prog.varnames), pts[:50])
        worst = max(abs(x - y) for x, y in zip(a, b))
        assert worst < 1e-12, f"backend mismatch on {name}: {worst}"
    print(f"{'case':34s} {'python':>12s} {'compiled':>12s} {'speedup':>9s}")
    for (name, dpy), (_, dc) in zip(py_rows, c_rows):
        print(f"{name:34s} {dpy * 1e3:9.2f} ms {dc * 1e3:9.2f} ms {dpy / dc:8.1f}x")


if __name__ == "__main__":
    main()
