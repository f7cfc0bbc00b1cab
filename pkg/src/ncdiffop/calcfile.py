"""Calculus files: a JSON document with every coefficient as an expression string.

Layout::

    {
      "name": "...",
      "field": {"parameters": ["q", ...]},
      "algebra": {"type": "constants" | "commutative_polynomial",
                  "vars": ["x", ...], "d_table": [["1", "0"], ...]},
      "omega1": {"basis": ["e+", ...]},
      "omega2": {"basis": ["w0", ...]},
      "vec": {"basis": ["u+", ...]},                 # optional
      "wedge": [[i, j, k, "expr"], ...],              # ξ_i∧ξ_j = Σ expr ω_k
      "d1": [[i, k, "expr"], ...],                    # dξ_i = Σ expr ω_k
      "connection": {"gamma": [[k, i, j, "expr"], ...],        # □ξ_k
                     "sigma_inv": [[i, j, a, b, "expr"], ...]},  # optional
      "complex": {"J": [[i, j, "expr"], ...]}                    # optional
    }

Entries are sparse; anything absent is zero.  ``connection`` may be omitted
entirely for a calculus without Γ.
"""

from __future__ import annotations

import json
from itertools import product
from pathlib import Path
from typing import Any

from .calculus import CalculusSpec, CoeffAlgebra, SpecError
from .scalar import ParseError, Scalar, parse_scalar, render


def _expr(text: Any, allowed: list[str], where: str) -> Scalar:
    if not isinstance(text, str):
        raise SpecError(f"{where}: coefficients must be expression strings, got {text!r}")
    try:
        return parse_scalar(text, allowed)
    except ParseError as exc:
        raise SpecError(f"{where}: {exc}") from None


def _entries(rows: Any, arity: int, bounds: tuple[int, ...], allowed: list[str], where: str) -> dict:
    if not isinstance(rows, list):
        raise SpecError(f"{where} must be a list")
    out: dict = {}
    for n, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != arity + 1:
            raise SpecError(f"{where}[{n}]: expected {arity} indices and an expression")
        idx = row[:arity]
        for i, b in zip(idx, bounds):
            if not isinstance(i, int) or isinstance(i, bool) or not 0 <= i < b:
                raise SpecError(f"{where}[{n}]: index {i!r} out of range")
        key = tuple(idx)
        if key in out:
            raise SpecError(f"{where}[{n}]: duplicate entry {key}")
        out[key] = _expr(row[arity], allowed, f"{where}[{n}]")
    return out


def spec_from_dict(doc: dict) -> CalculusSpec:
    if not isinstance(doc, dict):
        raise SpecError("a calculus file is a JSON object")
    try:
        params = list(doc.get("field", {}).get("parameters", []))
        alg = doc.get("algebra", {"type": "constants"})
        kind = alg.get("type", "constants")
        coords = list(alg.get("vars", []))
        n1 = len(doc["omega1"]["basis"])
        n2 = len(doc["omega2"]["basis"])
    except (KeyError, AttributeError, TypeError) as exc:
        raise SpecError(f"malformed calculus file: missing {exc}") from None
    allowed = params + coords
    table = alg.get("d_table", [])
    if len(table) != len(coords) or any(len(r) != n1 for r in table):
        raise SpecError("algebra.d_table needs one row of n1 expressions per coordinate")
    algebra = CoeffAlgebra(
        kind,
        tuple(coords),
        tuple(tuple(_expr(x, allowed, "algebra.d_table") for x in r) for r in table),
    )
    conn = doc.get("connection")
    gamma = sigma = None
    if conn is not None:
        gamma = _entries(conn.get("gamma", []), 3, (n1, n1, n1), allowed, "connection.gamma")
        if "sigma_inv" in conn:
            sigma = _entries(conn["sigma_inv"], 4, (n1,) * 4, allowed, "connection.sigma_inv")
    J = None
    if "complex" in doc and "J" in doc["complex"]:
        J = _entries(doc["complex"]["J"], 2, (n1, n1), allowed, "complex.J")
    return CalculusSpec.build(
        n1,
        n2,
        _entries(doc.get("wedge", []), 3, (n1, n1, n2), allowed, "wedge"),
        _entries(doc.get("d1", []), 2, (n1, n2), allowed, "d1"),
        algebra=algebra,
        christoffel=gamma,
        sigma_inv=sigma,
        J=J,
        parameters=params,
        omega1_names=doc["omega1"]["basis"],
        omega2_names=doc["omega2"]["basis"],
        vec_names=doc.get("vec", {}).get("basis", ()),
        name=doc.get("name", ""),
    )


def _sparse(grid, shape: tuple[int, ...]) -> list:
    out = []
    for idx in product(*(range(n) for n in shape)):
        x = grid
        for i in idx:
            x = x[i]
        if x:
            out.append([*idx, render(x)])
    return out


def spec_to_dict(spec: CalculusSpec) -> dict:
    n1, n2 = spec.n1, spec.n2
    doc: dict = {
        "name": spec.name,
        "field": {"parameters": list(spec.parameters)},
        "algebra": {
            "type": spec.algebra.kind,
            "vars": list(spec.algebra.coordinate_vars),
            "d_table": [[render(x) for x in row] for row in spec.algebra.derivation_table],
        },
        "omega1": {"basis": list(spec.omega1_names)},
        "omega2": {"basis": list(spec.omega2_names)},
        "vec": {"basis": list(spec.vec_names)},
        "wedge": _sparse(spec.wedge, (n1, n1, n2)),
        "d1": _sparse(spec.d1, (n1, n2)),
    }
    if spec.christoffel is not None:
        doc["connection"] = {"gamma": _sparse(spec.christoffel, (n1, n1, n1))}
        if spec.sigma_inv is not None:
            doc["connection"]["sigma_inv"] = _sparse(spec.sigma_inv, (n1,) * 4)
    if spec.J is not None:
        doc["complex"] = {"J": _sparse(spec.J, (n1, n1))}
    return doc


def loads(text: str) -> CalculusSpec:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"not valid JSON: {exc}") from None
    return spec_from_dict(doc)


def dumps(spec: CalculusSpec) -> str:
    return json.dumps(spec_to_dict(spec), indent=2, ensure_ascii=False) + "\n"


def load(path: str | Path) -> CalculusSpec:
    return loads(Path(path).read_text(encoding="utf-8"))


def save(spec: CalculusSpec, path: str | Path) -> None:
    Path(path).write_text(dumps(spec), encoding="utf-8")
