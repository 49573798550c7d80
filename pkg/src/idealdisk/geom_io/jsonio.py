"""JSON documents: meshes, edge patterns and solutions.

Floats are written with ``repr`` precision, so ``parse(serialize(doc))``
reproduces every value bit for bit.  Edge arrays follow the canonical edge
order of :func:`idealdisk.complex.build_decomposition` (by lowest flat side).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

import numpy as np

from ..complex import Gluing, TriangularDecomposition, _parse_gluing, build_decomposition
from ..errors import InputError, WrongLength

MESH_KEYS = ("triangles", "gluings", "vertex_targets", "angles")


def _float_list(values, name: str, n: int | None = None) -> list[float]:
    try:
        out = [float(v) for v in values]
    except (TypeError, ValueError):
        raise InputError(f"{name} must be a list of numbers") from None
    if not all(math.isfinite(v) for v in out):
        raise InputError(f"{name} contains non-finite values")
    if n is not None and len(out) != n:
        raise WrongLength(f"{name} has {len(out)} entries, expected {n}")
    return out


@dataclass
class MeshDocument:
    triangles: int
    gluings: list[Gluing]
    vertex_targets: dict[str, float] | None = None
    angles: list[float] | None = None

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> "MeshDocument":
        if not isinstance(doc, Mapping):
            raise InputError("mesh document must be a JSON object")
        try:
            F = doc["triangles"]
        except KeyError:
            raise InputError("mesh document needs a 'triangles' count") from None
        if isinstance(F, bool) or not isinstance(F, int) or F < 0:
            raise InputError(f"'triangles' must be a nonnegative integer, got {F!r}")
        gluings = [_parse_gluing(g) for g in doc.get("gluings", [])]
        targets = doc.get("vertex_targets")
        if targets is not None:
            if not isinstance(targets, Mapping):
                raise InputError("'vertex_targets' must map vertex ids to radians")
            targets = {str(k): float(v) for k, v in targets.items()}
        angles = doc.get("angles")
        if angles is not None:
            angles = _float_list(angles, "angles", 3 * F)
        return cls(F, gluings, targets, angles)

    def to_dict(self) -> dict:
        out: dict[str, Any] = {
            "triangles": self.triangles,
            "gluings": [
                {"a": list(g.a), "b": list(g.b), **({"flip": True} if g.flip else {})}
                for g in self.gluings
            ],
        }
        if self.vertex_targets is not None:
            out["vertex_targets"] = dict(self.vertex_targets)
        if self.angles is not None:
            out["angles"] = list(self.angles)
        return out

    def decomposition(self, *, strict: bool = True) -> TriangularDecomposition:
        return build_decomposition(self.triangles, self.gluings, self.vertex_targets, strict=strict)

    @classmethod
    def from_decomposition(cls, td: TriangularDecomposition, angles=None) -> "MeshDocument":
        spec = td.to_spec()
        return cls(
            td.F,
            list(td.gluings),
            spec.get("vertex_targets"),
            None if angles is None else [float(a) for a in np.asarray(angles).ravel()],
        )


@dataclass
class PatternDocument:
    """A mesh together with one intersection angle per edge."""

    mesh: MeshDocument
    theta: list[float]

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> "PatternDocument":
        if not isinstance(doc, Mapping) or "theta" not in doc:
            raise InputError("pattern document needs a 'theta' list")
        mesh = MeshDocument.from_dict({k: doc[k] for k in MESH_KEYS if k in doc})
        return cls(mesh, _float_list(doc["theta"], "theta"))

    def to_dict(self) -> dict:
        out = self.mesh.to_dict()
        out["theta"] = list(self.theta)
        return out

    def decomposition(self) -> TriangularDecomposition:
        td = self.mesh.decomposition()
        if len(self.theta) != td.E:
            raise WrongLength(f"theta has {len(self.theta)} entries, the mesh has {td.E} edges")
        return td


@dataclass
class SolutionDocument:
    mesh: MeshDocument
    angles: list[float]
    lengths: list[list[float]]
    theta: list[float]
    residual: float
    objective: float
    iterations: int
    conformal_coords: list[float] = field(default_factory=list)

    @classmethod
    def from_structure(cls, td: TriangularDecomposition, u) -> "SolutionDocument":
        from ..angles import theta_edges

        return cls(
            mesh=MeshDocument.from_decomposition(td),
            angles=[float(a) for a in u.angles],
            lengths=[[float(v) for v in row] for row in u.lengths],
            theta=[float(v) for v in theta_edges(td, u.angles)],
            residual=float(u.residual),
            objective=float(u.objective),
            iterations=int(u.iterations),
            conformal_coords=[float(c) for c in u.conformal_coords],
        )

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> "SolutionDocument":
        if not isinstance(doc, Mapping):
            raise InputError("solution document must be a JSON object")
        mesh = MeshDocument.from_dict({k: doc[k] for k in MESH_KEYS if k in doc and k != "angles"})
        try:
            angles = _float_list(doc["angles"], "angles", 3 * mesh.triangles)
            lengths = [_float_list(row, "lengths", 3) for row in doc["lengths"]]
            return cls(
                mesh=mesh,
                angles=angles,
                lengths=lengths,
                theta=_float_list(doc["theta"], "theta"),
                residual=float(doc["residual"]),
                objective=float(doc["objective"]),
                iterations=int(doc["iterations"]),
                conformal_coords=_float_list(doc.get("conformal_coords", []), "conformal_coords"),
            )
        except KeyError as exc:
            raise InputError(f"solution document missing key {exc}") from None

    def to_dict(self) -> dict:
        out = self.mesh.to_dict()
        out.update(
            angles=list(self.angles),
            lengths=[list(r) for r in self.lengths],
            theta=list(self.theta),
            residual=self.residual,
            objective=self.objective,
            iterations=self.iterations,
            conformal_coords=list(self.conformal_coords),
        )
        return out

    def decomposition(self) -> TriangularDecomposition:
        return self.mesh.decomposition()


def dumps(doc) -> str:
    data = doc.to_dict() if hasattr(doc, "to_dict") else doc
    return json.dumps(data, indent=2, ensure_ascii=False) + "\n"


def loads(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON: {exc}") from None


def read_json(path) -> Any:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    return loads(text)


def write_json(path, doc) -> None:
    Path(path).write_text(dumps(doc), encoding="utf-8")


def parse_mesh(text: str) -> MeshDocument:
    return MeshDocument.from_dict(loads(text))


def parse_pattern(text: str) -> PatternDocument:
    return PatternDocument.from_dict(loads(text))


def parse_solution(text: str) -> SolutionDocument:
    return SolutionDocument.from_dict(loads(text))
