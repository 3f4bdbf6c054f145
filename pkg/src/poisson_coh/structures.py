"""Built-in example structures and the JSON structure/deformation formats.

Structure schema::

    {"name": str, "variables": [str], "weights": [int > 0], "l": int,
     "bivector": {"i,j": polynomial text}, "relation": polynomial text (optional)}

``"i,j"`` names the component on ``∂_i∧∂_j`` with zero-based ``i < j``.
A deformation file carries ``{"psi": {"i,j": text}}`` (a bivector) and
optionally ``"phi"``, which is not supported from files yet.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Optional

from .cartan import Polyvector
from .gradedpoly import Polynomial, QuotientPresentation, WeightedContext, parse_polynomial
from .poisson_core import PoissonStructure


class StructureError(ValueError):
    """Malformed structure description (bad schema, bad polynomial text, bad indices)."""


@dataclass
class StructureDescription:
    name: str
    variables: list
    weights: list
    l: int
    bivector: dict  # "i,j" -> polynomial text
    relation: Optional[str] = None
    notes: str = ""
    extra: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {"name": self.name, "variables": list(self.variables), "weights": list(self.weights),
               "l": self.l, "bivector": dict(sorted(self.bivector.items()))}
        if self.relation is not None:
            out["relation"] = self.relation
        return out

    def canonical_bytes(self) -> bytes:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":")).encode()

    def sha256(self) -> str:
        return hashlib.sha256(self.canonical_bytes()).hexdigest()


BUILTINS = {
    "symplectic2": StructureDescription("symplectic2", ["x", "y"], [1, 1], 2, {"0,1": "1"}),
    "symplectic4": StructureDescription("symplectic4", ["x1", "x2", "x3", "x4"], [1, 1, 1, 1], 2,
                                        {"0,1": "1", "2,3": "1"}),
    "sl2star": StructureDescription("sl2star", ["e", "f", "h"], [2, 2, 2], 2,
                                    {"0,1": "h", "0,2": "-2*e", "1,2": "2*f"}),
    "a1cone": StructureDescription("a1cone", ["e", "f", "h"], [2, 2, 2], 2,
                                   {"0,1": "h", "0,2": "-2*e", "1,2": "2*f"}, relation="h^2 + 4*e*f"),
}


def description_from_json(doc) -> StructureDescription:
    if not isinstance(doc, dict):
        raise StructureError("structure document must be a JSON object")
    try:
        variables = doc["variables"]
        weights = doc["weights"]
        l = doc["l"]
        biv = doc.get("bivector", {})
    except KeyError as exc:
        raise StructureError(f"missing field {exc.args[0]!r}") from None
    if not (isinstance(variables, list) and all(isinstance(v, str) for v in variables)):
        raise StructureError("'variables' must be a list of strings")
    if not (isinstance(weights, list) and all(isinstance(w, int) and not isinstance(w, bool) for w in weights)):
        raise StructureError("'weights' must be a list of integers")
    if not isinstance(l, int) or isinstance(l, bool):
        raise StructureError("'l' must be an integer")
    if not isinstance(biv, dict) or not all(isinstance(v, str) for v in biv.values()):
        raise StructureError("'bivector' must map \"i,j\" to polynomial text")
    rel = doc.get("relation")
    if rel is not None and not isinstance(rel, str):
        raise StructureError("'relation' must be polynomial text")
    return StructureDescription(str(doc.get("name", "")), variables, weights, l, dict(biv), rel,
                                str(doc.get("notes", "")))


def load_description(path: str) -> StructureDescription:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise StructureError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise StructureError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}") from None
    return description_from_json(doc)


def _parse_index(key: str, n: int) -> tuple:
    try:
        i, j = (int(t) for t in key.split(","))
    except ValueError:
        raise StructureError(f"bad bivector key {key!r}; expected \"i,j\"") from None
    if not (0 <= i < j < n):
        raise StructureError(f"bivector key {key!r} needs 0 <= i < j < {n}")
    return i, j


def _parse(text: str, ctx: WeightedContext, where: str) -> Polynomial:
    try:
        return parse_polynomial(text, ctx)
    except ValueError as exc:
        raise StructureError(f"{where}: {exc}") from None


def parse_bivector(entries: dict, ctx: WeightedContext, where: str = "bivector") -> Polyvector:
    comps = {}
    for key in sorted(entries):
        comps[_parse_index(key, ctx.nvars)] = _parse(entries[key], ctx, f"{where} {key}")
    return Polyvector(2, ctx.nvars, comps)


def build_context(desc: StructureDescription) -> WeightedContext:
    try:
        return WeightedContext(tuple(desc.variables), tuple(desc.weights), desc.l)
    except ValueError as exc:
        raise StructureError(str(exc)) from None


def build_structure(desc: StructureDescription, defer_jacobi: bool = False) -> PoissonStructure:
    """Parse a description. Jacobi failures propagate as ``JacobiFailure``."""
    ctx = build_context(desc)
    theta = parse_bivector(desc.bivector, ctx)
    quotient = None
    if desc.relation is not None:
        rel = _parse(desc.relation, ctx, "relation")
        try:
            quotient = QuotientPresentation(rel, ctx)
        except ValueError as exc:
            raise StructureError(f"relation: {exc}") from None
    return PoissonStructure(ctx, theta, quotient, defer_jacobi=defer_jacobi, name=desc.name)


def example(name: str, defer_jacobi: bool = False) -> PoissonStructure:
    try:
        desc = BUILTINS[name]
    except KeyError:
        raise StructureError(f"unknown example {name!r}; choose from {', '.join(sorted(BUILTINS))}") from None
    return build_structure(desc, defer_jacobi)


def load_deformation_bivector(path: str, ctx: WeightedContext) -> Polyvector:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise StructureError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise StructureError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}") from None
    if not isinstance(doc, dict) or not isinstance(doc.get("psi"), dict):
        raise StructureError("deformation file needs a 'psi' object mapping \"i,j\" to polynomial text")
    if doc.get("phi"):
        # TODO: accept tabulated phi values once a file format for Hom(ch_2, A) is settled
        raise StructureError("'phi' in deformation files is not supported; give psi only")
    return parse_bivector(doc["psi"], ctx, "psi")
