"""Built-in model for the three-parameter solvable group with one bracket.

Generators on the (v, y, z) chart (after straightening the first generator
with v = x e^{-y}): xi_1 = e^{-y} d/dv, xi_2 = d/dy, xi_3 = d/dz, with
[xi_1, xi_2] = xi_1.  The Cartan tensor is degenerate, so the invariant
metric comes from the solved invariant frame; that frame is itself
invariant (all scale factors vanish), so the reduced operator on any
monomial is the plain scalar Casimir operator.

Two harmonic constructions ship built in:

* point series at sigma = n^2: closed-form profiles
  d^{n-m-1}/dv^{n-m-1} (1+v^2)^(n-1/2), certified symbolically;
* the continuous-spectrum hypergeometric branch, certified numerically
  on |v| <= 0.9 (series domain).
"""

from __future__ import annotations

import functools
from fractions import Fraction

from .. import expr as ex
from .. import numcheck as nc
from ..lie_algebra import bianchi2 as bianchi2_constants
from ..operator import (
    CasimirOperator,
    ScalarOperator,
    TensorMonomial,
    assemble,
    certify_eigen,
    reduce_to_scalar,
    scalar_casimir,
)
from ..parser import parse
from ..split_structure import compute_mu, metric_from_frame_solution, solve_invariant_frame
from ..tensor_fields import Chart, TensorField, VectorField, lie_derivative
from .family import Certificate, HarmonicFamily
from .hypergeom import RadialProfile

GENERATOR_COMPONENTS = (("exp(-y)", "0", "0"), ("0", "1", "0"), ("0", "0", "1"))
FRAME_NAMES = ("1", "2", "3")
AMPLITUDE_NAMES = ("a_1", "a_2", "a_3")
SERIES_BOX = (-0.9, 0.9)


class Bianchi2Model:
    def __init__(self, seed: int = 0):
        self.name = "bianchi2"
        amp_box = {a: (0.3, 1.6) for a in AMPLITUDE_NAMES}
        self.chart = Chart(
            "solvable3",
            ("v", "y", "z"),
            {"v": SERIES_BOX, "y": (-1.0, 1.0), "z": (-1.0, 1.0)},
            params=amp_box,
        )
        self.constants = bianchi2_constants()
        self.generators = tuple(
            VectorField(self.chart, tuple(parse(s, self.chart.coords) for s in comps))
            for comps in GENERATOR_COMPONENTS
        )
        self.frame_solution = solve_invariant_frame(self.constants, self.generators, seed=seed)
        self.frame = self.frame_solution.frame
        self.metric = metric_from_frame_solution(
            self.frame_solution, self.constants, self.generators, seed=seed
        )
        self.mu = compute_mu(self.frame, self.generators, self.constants, seed=seed)
        self.op = CasimirOperator(
            "bianchi2", self.chart, self.generators, self.metric.g, self.frame, self.mu
        )

    def scalar_operator(self) -> ScalarOperator:
        return scalar_casimir(self.op)

    def reduced_operator(self, upper: tuple = (), lower: tuple = ()) -> ScalarOperator:
        return reduce_to_scalar(self.op, upper, lower)

    # -- point series ---------------------------------------------------------

    def point_series_profile(self, n: int, m: int) -> ex.Expr:
        """d^(n-m-1)/dv^(n-m-1) (1+v^2)^(n-1/2), exact."""
        if not (isinstance(n, int) and isinstance(m, int) and n >= 1 and m < n):
            raise ValueError(f"point series needs integers m < n with n >= 1, got n={n}, m={m}")
        base = ex.power(ex.add(ex.ONE, ex.power(ex.sym("v"), 2)), Fraction(2 * n - 1, 2))
        out = base
        for _ in range(n - m - 1):
            out = ex.diff(out, "v")
        return out

    def point_series(self, n: int, m: int, nu, seed: int = 0) -> HarmonicFamily:
        """Discrete family t = e^(m y + nu z) * profile(v); all certificates symbolic."""
        nu = Fraction(nu)
        profile = self.point_series_profile(n, m)
        t = ex.mul(
            ex.exp(ex.add(ex.mul(ex.num(m), ex.sym("y")), ex.mul(ex.num(nu), ex.sym("z")))),
            profile,
        )
        lam = ex.num(nu * nu + n * n)
        box = self.chart.full_box()
        k_op = self.scalar_operator()
        certs = [
            Certificate(
                "casimir-eigenvalue",
                nc.is_zero(ex.sub(k_op.apply(t), ex.mul(lam, t)), box, seed),
            ),
            Certificate(
                "y-translation-eigenvalue",
                nc.is_zero(ex.sub(self.generators[1].apply(t), ex.mul(ex.num(m), t)), box, seed),
            ),
            Certificate(
                "z-translation-eigenvalue",
                nc.is_zero(ex.sub(self.generators[2].apply(t), ex.mul(ex.num(nu), t)), box, seed),
            ),
        ]
        if m - 1 < n:  # lowering: xi_1 t_m = t_{m-1}
            lower_t = ex.simplify(
                ex.mul(
                    ex.exp(
                        ex.add(ex.mul(ex.num(m - 1), ex.sym("y")), ex.mul(ex.num(nu), ex.sym("z")))
                    ),
                    self.point_series_profile(n, m - 1),
                )
            )
            certs.append(
                Certificate(
                    "lowering-relation",
                    nc.is_zero(ex.sub(self.generators[0].apply(t), lower_t), box, seed),
                )
            )
        return HarmonicFamily(
            model=self.name,
            kind="point-series",
            labels={"n": n, "m": m, "nu": str(nu)},
            eigenvalues={"G": lam, "y-translation": ex.num(m), "z-translation": ex.num(nu)},
            components={f"n={n},m={m},nu={nu}": t},
            certificates=certs,
        )

    # -- covector harmonics -----------------------------------------------------

    def covector_harmonic(self, n: int, m: int, nu, amplitudes=None, seed: int = 0) -> HarmonicFamily:
        """One-form harmonic on the invariant coframe with point-series scalar."""
        scalar_fam = self.point_series(n, m, nu, seed=seed)
        t = next(iter(scalar_fam.components.values()))
        lam = scalar_fam.eigenvalues["G"]
        if amplitudes is None:
            amps = [ex.sym(a) for a in AMPLITUDE_NAMES]
        else:
            amps = [ex.as_expr(Fraction(a)) for a in amplitudes]
        monos = [
            TensorMonomial((), (leg,), ex.mul(amps[leg], t)) for leg in range(3)
        ]
        tens = assemble(self.frame, monos, 0, 1)
        box = self.chart.full_box()
        ly = lie_derivative(self.generators[1], tens)
        certs = [
            Certificate("casimir-eigenvalue", certify_eigen(self.op, tens, lam, seed)),
            Certificate(
                "y-translation-eigenvalue",
                _all_components_zero(
                    [ex.sub(a, ex.mul(ex.num(m), b)) for a, b in zip(ly.comps, tens.comps)],
                    box,
                    seed,
                ),
            ),
        ] + scalar_fam.certificates
        assembly = [
            {
                "upper": [],
                "lower": [FRAME_NAMES[leg]],
                "scalar": ex.unparse(mono.scalar),
            }
            for leg, mono in enumerate(monos)
        ]
        return HarmonicFamily(
            model=self.name,
            kind="covector",
            labels={"n": n, "m": m, "nu": str(Fraction(nu))},
            eigenvalues=dict(scalar_fam.eigenvalues),
            components=dict(scalar_fam.components),
            amplitudes=tuple(AMPLITUDE_NAMES) if amplitudes is None else (),
            assemblies={"covector": assembly},
            certificates=certs,
            notes=("coframe legs: e^1 = dv + v dy, e^2 = dy, e^3 = dz",),
        )

    def assemble_from_json(self, monomials: list) -> TensorField:
        name_to_idx = {n: i for i, n in enumerate(FRAME_NAMES)}
        monos = []
        p = q = 0
        for mo in monomials:
            upper = tuple(name_to_idx[a] for a in mo["upper"])
            lower = tuple(name_to_idx[b] for b in mo["lower"])
            scalar = parse(mo["scalar"], self.chart.coords, AMPLITUDE_NAMES)
            monos.append(TensorMonomial(upper, lower, scalar))
            p, q = len(upper), len(lower)
        return assemble(self.frame, monos, p, q)

    # -- hypergeometric branch ---------------------------------------------------

    def radial_profile(self, mu, nu, lam, amp_even=1.0, amp_odd=0.0) -> RadialProfile:
        return RadialProfile(mu, nu, lam, amp_even, amp_odd)

    def hypergeometric_harmonic(self, mu, nu, lam, amp_even=1.0, amp_odd=0.0,
                                points: int = 16, tol: float = 1e-8,
                                seed: int = 0) -> HarmonicFamily:
        """Continuous-spectrum family; numeric residual certificate on the
        series domain (restricted to v > 0 when the odd branch is present)."""
        prof = self.radial_profile(mu, nu, lam, amp_even, amp_odd)
        lo, hi = SERIES_BOX
        if amp_odd:
            lo = 0.05
        vs = [lo + (hi - lo) * row[0] for row in nc.halton_points(1, points, seed)]
        resid = prof.residuals(vs)
        fvals = prof.values(vs)
        scale = max(1.0, max(abs(f) for f in fvals))
        worst = max(abs(r) for r in resid)
        ok = worst < tol * scale
        notes = ["series evaluation valid on |v| < 1; no analytic continuation"]
        if amp_odd:
            notes.append("odd branch certified on v > 0 (|v| prefactor)")
        payload = {
            "ok": ok,
            "verdict": "numerically-zero" if ok else "nonzero",
            "max_abs": worst,
            "scale": scale,
            "points": len(vs),
            "tolerance": tol,
        }
        return HarmonicFamily(
            model=self.name,
            kind="hypergeometric",
            labels={
                "mu": float(mu),
                "nu": float(nu),
                "lambda": float(lam),
                "sigma": float(lam) - float(nu) ** 2,
                "A": complex(amp_even).real,
                "B": complex(amp_odd).real,
            },
            eigenvalues={"G": ex.num(Fraction(str(float(lam))))},
            components={},
            certificates=[Certificate("radial-equation-residual", payload)],
            notes=tuple(notes),
        )


def _all_components_zero(exprs, box, seed) -> dict:
    reports = [nc.is_zero(e, box, seed) for e in exprs]
    return {
        "ok": all(r.is_zero for r in reports),
        "components": [r.to_json() for r in reports],
    }


@functools.lru_cache(maxsize=1)
def bianchi2_model() -> Bianchi2Model:
    return Bianchi2Model()
