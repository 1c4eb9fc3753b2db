"""Containers for certified harmonic families."""

from __future__ import annotations

from dataclasses import dataclass, field

from .. import expr as ex


@dataclass(frozen=True)
class Certificate:
    name: str
    payload: object  # ZeroReport, EigenResult, or a plain dict

    @property
    def ok(self) -> bool:
        p = self.payload
        if hasattr(p, "is_zero"):
            return bool(p.is_zero)
        if hasattr(p, "ok"):
            return bool(p.ok)
        return bool(p.get("ok", False))

    def to_json(self) -> dict:
        p = self.payload
        body = p.to_json() if hasattr(p, "to_json") else dict(p)
        return {"name": self.name, "ok": self.ok, **body}


@dataclass
class HarmonicFamily:
    """A labeled set of eigenfunction scalars/tensors with residual certificates."""

    model: str
    kind: str
    labels: dict
    eigenvalues: dict  # name -> Expr
    components: dict  # label -> Expr (the family content)
    amplitudes: tuple = ()
    assemblies: dict = field(default_factory=dict)  # tag -> list of monomial dicts
    certificates: list = field(default_factory=list)
    notes: tuple = ()

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.certificates)

    def certificate(self, name: str) -> Certificate:
        for c in self.certificates:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_json(self) -> dict:
        return {
            "model": self.model,
            "kind": self.kind,
            "labels": self.labels,
            "eigenvalues": {k: ex.unparse(v) for k, v in self.eigenvalues.items()},
            "amplitudes": list(self.amplitudes),
            "components": {k: ex.unparse(v) for k, v in self.components.items()},
            "assemblies": self.assemblies,
            "certificates": [c.to_json() for c in self.certificates],
            "notes": list(self.notes),
            "certified": self.ok,
        }
