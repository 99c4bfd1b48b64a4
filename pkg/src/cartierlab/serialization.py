"""Exact JSON encoding of algebras, tensors, bundles, operators and reports.

Every number is a string ("p/q" or "p/q+r/si"); ħ-polynomials are arrays of
such strings ordered by degree.  Term lists are sorted by index tuple so the
output is deterministic.
"""

from __future__ import annotations

import json
from typing import Any

from .operators import LinearOperator
from .precartier import PreCartierData
from .quasibialgebra import CheckEntry, CheckReport, QuasiBialgebraData, QuasiTriangularData
from .scalars import GaussRat, HPoly
from .tensor_algebra import AlgebraMorphismData, FiniteAlgebra, TensorElement

SCHEMA_VERSION = 1


class BundleFormatError(ValueError):
    """Malformed bundle JSON."""


def _req(d: dict, key: str):
    if not isinstance(d, dict) or key not in d:
        raise BundleFormatError(f"missing field {key!r}")
    return d[key]


# ------------------------------------------------------------------ algebra
def algebra_to_json(alg: FiniteAlgebra) -> dict:
    return {
        "name": alg.name,
        "labels": list(alg.basis_labels),
        "truncation_order": alg.order,
        "structure_constants": [
            {"left": i, "right": j, "terms": [[k, c.to_json()] for k, c in sorted(row.items())]}
            for (i, j), row in sorted(alg.structure_constants.items())
        ],
        "unit": [[k, c.to_json()] for k, c in sorted(alg.unit.items())],
    }


def _poly(data, order: int | None = None) -> HPoly:
    if isinstance(data, str):
        data = [data]
    p = HPoly.from_json(data)
    if order is not None and p.truncation_order != order:
        if p.truncation_order > order:
            raise BundleFormatError("coefficient has more ħ-degrees than the truncation order")
        p = p.with_order(order)
    return p


def algebra_from_json(d: dict) -> FiniteAlgebra:
    labels = _req(d, "labels")
    order = int(d.get("truncation_order", 0))
    sc = {}
    for entry in _req(d, "structure_constants"):
        i, j = int(_req(entry, "left")), int(_req(entry, "right"))
        sc[(i, j)] = {int(k): _poly(c, order) for k, c in _req(entry, "terms")}
    unit = {int(k): _poly(c, order) for k, c in _req(d, "unit")}
    for (i, j), row in sc.items():
        if not (0 <= i < len(labels) and 0 <= j < len(labels)) or any(not 0 <= k < len(labels) for k in row):
            raise BundleFormatError("structure constant index out of range")
    return FiniteAlgebra(labels, sc, unit, order=order, name=d.get("name", ""))


# ------------------------------------------------------------------ tensors
def tensor_to_json(T: TensorElement) -> dict:
    return {"arity": T.arity,
            "terms": [{"indices": list(k), "coefficient": c.to_json()} for k, c in T.sorted_terms()]}


def tensor_from_json(d: dict, alg: FiniteAlgebra) -> TensorElement:
    arity = int(_req(d, "arity"))
    terms = {}
    for t in _req(d, "terms"):
        key = tuple(int(x) for x in _req(t, "indices"))
        if len(key) != arity or any(not 0 <= x < alg.dim for x in key):
            raise BundleFormatError(f"bad index tuple {key}")
        c = _poly(_req(t, "coefficient"), alg.order)
        terms[key] = terms[key] + c if key in terms else c
    return TensorElement(alg, arity, terms)


def morphism_to_json(m: AlgebraMorphismData) -> list[dict]:
    return [tensor_to_json(t) for t in m.images]


def morphism_from_json(data: list, alg: FiniteAlgebra, arity: int, name: str) -> AlgebraMorphismData:
    images = [tensor_from_json(t, alg) for t in data]
    if any(t.arity != arity for t in images):
        raise BundleFormatError(f"{name} images must have arity {arity}")
    return AlgebraMorphismData(alg, arity, images, name=name)


# ------------------------------------------------------------------ bundles
def _jsonable(meta: dict) -> dict:
    return {k: (v if isinstance(v, (int, str, float, bool, type(None), list, dict)) else str(v))
            for k, v in meta.items()}


def bundle_to_json(obj: QuasiBialgebraData | QuasiTriangularData | PreCartierData) -> dict:
    chi = rmatrix = None
    meta: dict = {}
    if isinstance(obj, PreCartierData):
        chi = obj.chi
        obj = obj.qt
        kind = "precartier"
    else:
        kind = "quasitriangular" if isinstance(obj, QuasiTriangularData) else "quasibialgebra"
    if isinstance(obj, QuasiTriangularData):
        rmatrix = obj.rmatrix
        meta = dict(obj.metadata)
        obj = obj.base
    B: QuasiBialgebraData = obj
    meta.setdefault("truncation_order", B.order)
    out: dict[str, Any] = {
        "schema": SCHEMA_VERSION,
        "kind": kind,
        "algebra": algebra_to_json(B.algebra),
        "coproduct": morphism_to_json(B.coproduct),
        "counit": morphism_to_json(B.counit),
        "reassociator": tensor_to_json(B.reassociator),
        "ell": tensor_to_json(B.ell),
        "r": tensor_to_json(B.r_elt),
    }
    if rmatrix is not None:
        out["rmatrix"] = tensor_to_json(rmatrix)
    if chi is not None:
        out["chi"] = tensor_to_json(chi)
    out["metadata"] = _jsonable(meta)
    return out


def bundle_from_json(d: dict):
    """Inverse of bundle_to_json; the kind is inferred from which fields exist."""
    if not isinstance(d, dict):
        raise BundleFormatError("bundle must be a JSON object")
    alg = algebra_from_json(_req(d, "algebra"))
    base = QuasiBialgebraData(
        alg,
        morphism_from_json(_req(d, "coproduct"), alg, 2, "coproduct"),
        morphism_from_json(_req(d, "counit"), alg, 0, "counit"),
        tensor_from_json(_req(d, "reassociator"), alg),
        tensor_from_json(_req(d, "ell"), alg),
        tensor_from_json(_req(d, "r"), alg),
    )
    if "rmatrix" not in d:
        if "chi" in d:
            raise BundleFormatError("χ needs an R-matrix")
        return base
    meta = dict(d.get("metadata", {}))
    qt = QuasiTriangularData(base, tensor_from_json(d["rmatrix"], alg), meta)
    if "chi" not in d:
        return qt
    return PreCartierData(qt, tensor_from_json(d["chi"], alg))


def dumps(obj) -> str:
    return json.dumps(obj, indent=1, sort_keys=False)


# ---------------------------------------------------------------- operators
def operator_to_json(op: LinearOperator) -> dict:
    return {"dim": op.dim, "truncation_order": op.order,
            "entries": [{"row": r, "col": c, "value": v.to_json()}
                        for (r, c), v in op.nonzero_entries().items()]}


def operator_from_json(d: dict) -> LinearOperator:
    dim, order = int(_req(d, "dim")), int(d.get("truncation_order", 0))
    entries = {(int(_req(e, "row")), int(_req(e, "col"))): _poly(_req(e, "value"), order)
               for e in _req(d, "entries")}
    if any(not (0 <= r < dim and 0 <= c < dim) for r, c in entries):
        raise BundleFormatError("operator entry out of range")
    return LinearOperator.from_entries(dim, entries, order)


def module_to_json(V) -> dict:
    return {"name": V.name, "dim_v": V.dim_v, "action": [operator_to_json(op) for op in V.action]}


def module_from_json(d: dict, alg: FiniteAlgebra):
    from .cartier_ring import ModuleRep

    action = [operator_from_json(op) for op in _req(d, "action")]
    return ModuleRep(alg, int(_req(d, "dim_v")), action, name=d.get("name", ""))


# ------------------------------------------------------------------ reports
def _witness_json(w) -> Any:
    if w is None:
        return None
    if isinstance(w, TensorElement):
        return tensor_to_json(w)
    if isinstance(w, LinearOperator):
        return operator_to_json(w)
    return str(w)


def report_to_json(rep: CheckReport, witnesses: bool = True) -> dict:
    checks = []
    for e in rep.entries:
        item = {"name": e.name, "tag": e.tag, "passed": e.passed}
        if e.detail:
            item["detail"] = e.detail
        if not e.passed and witnesses:
            item["witness"] = _witness_json(e.witness)
        checks.append(item)
    return {"passed": rep.passed, "checks": checks}


def report_from_json(d: dict, alg: FiniteAlgebra | None = None) -> CheckReport:
    """Rebuild a report; tensor witnesses need the algebra, otherwise they stay as JSON."""
    entries = []
    for c in _req(d, "checks"):
        w = c.get("witness")
        if w is not None and alg is not None and "arity" in w:
            w = tensor_from_json(w, alg)
        elif w is not None and "dim" in w:
            w = operator_from_json(w)
        if not c["passed"] and w is None:
            w = "witness omitted"
        entries.append(CheckEntry(c["name"], c["passed"], w, c.get("tag", ""), c.get("detail", "")))
    return CheckReport(entries)


def gaussrat_matrix(data) -> list[list[GaussRat]]:
    """Parse a matrix given as nested lists of strings or integers."""
    if not isinstance(data, list) or not all(isinstance(r, list) for r in data):
        raise BundleFormatError("matrix must be a list of lists")
    out = []
    for row in data:
        parsed = []
        for x in row:
            if isinstance(x, bool) or not isinstance(x, (int, str)):
                raise BundleFormatError(f"matrix entry {x!r} must be an integer or an exact string")
            parsed.append(GaussRat(x) if isinstance(x, int) else GaussRat.parse(x))
        out.append(parsed)
    return out
