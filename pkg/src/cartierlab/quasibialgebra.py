"""Quasi-bialgebras, quasitriangular structures, axiom checks and gauge twisting.

Axioms that hold "for all h in H" are checked on every basis element, which is
enough because both sides are linear in h.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable

from .tensor_algebra import (
    AlgebraMorphismData,
    FiniteAlgebra,
    NotInvertibleError,
    TensorElement,
    apply_morphism_leg,
    embed_legs,
    flip_op,
    tensor_invert,
)


@dataclass
class CheckEntry:
    name: str
    passed: bool
    witness: object = None
    tag: str = ""
    detail: str = ""

    def __post_init__(self) -> None:
        if self.passed:
            self.witness = None
        elif self.witness is None:
            raise ValueError(f"failed check {self.name!r} needs a witness")


@dataclass
class CheckReport:
    """Outcome of a batch of identity checks; failed entries carry LHS - RHS."""

    entries: list[CheckEntry] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries)

    def __bool__(self) -> bool:
        return self.passed

    def __iter__(self):
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, name: str) -> CheckEntry:
        for e in self.entries:
            if e.name == name or e.tag == name:
                return e
        raise KeyError(name)

    def failures(self) -> list[CheckEntry]:
        return [e for e in self.entries if not e.passed]

    def add(self, name: str, lhs, rhs, tag: str = "", detail: str = "") -> CheckEntry:
        diff = lhs - rhs
        entry = CheckEntry(name, diff.is_zero(), diff, tag, detail)
        self.entries.append(entry)
        return entry

    def extend(self, other: "CheckReport") -> "CheckReport":
        self.entries.extend(other.entries)
        return self

    def summary(self) -> str:
        lines = []
        for e in self.entries:
            mark = "PASS" if e.passed else "FAIL"
            tag = f" [{e.tag}]" if e.tag else ""
            lines.append(f"{mark}  {e.name}{tag}" + (f"  ({e.detail})" if e.detail else ""))
        return "\n".join(lines)


def _first_failure(report: CheckReport, name: str, pairs: Iterable, tag: str = "") -> None:
    """One entry for a family of per-basis-element equalities."""
    for label, lhs, rhs in pairs:
        diff = lhs - rhs
        if not diff.is_zero():
            report.entries.append(CheckEntry(name, False, diff, tag, f"fails on basis element {label}"))
            return
    report.entries.append(CheckEntry(name, True, None, tag))


def _factor_positions(label: tuple[int, ...]) -> tuple[int, ...]:
    """Invert a permutation label into the leg each factor lands on."""
    if not label:
        return (1, 2, 3)
    if sorted(label) != [1, 2, 3]:
        raise ValueError(f"{label} is not a permutation of 1, 2, 3")
    out = [0, 0, 0]
    for leg, factor in enumerate(label, start=1):
        out[factor - 1] = leg
    return tuple(out)


@dataclass(eq=False)
class QuasiBialgebraData:
    algebra: FiniteAlgebra
    coproduct: AlgebraMorphismData
    counit: AlgebraMorphismData
    reassociator: TensorElement
    ell: TensorElement
    r_elt: TensorElement

    def __post_init__(self) -> None:
        if self.coproduct.target_arity != 2 or self.counit.target_arity != 0:
            raise ValueError("coproduct must land in arity 2 and counit in arity 0")
        if self.reassociator.arity != 3 or self.ell.arity != 1 or self.r_elt.arity != 1:
            raise ValueError("reassociator has arity 3, ell and r arity 1")

    @cached_property
    def reassociator_inv(self) -> TensorElement:
        return tensor_invert(self.reassociator)

    @cached_property
    def ell_inv(self) -> TensorElement:
        return tensor_invert(self.ell)

    @cached_property
    def r_inv(self) -> TensorElement:
        return tensor_invert(self.r_elt)

    @property
    def order(self) -> int:
        return self.algebra.order

    def has_trivial_reassociator(self) -> bool:
        return self.reassociator == TensorElement.unit(self.algebra, 3)

    def delta(self, x: TensorElement, leg: int = 1) -> TensorElement:
        return apply_morphism_leg(x, leg, self.coproduct)

    def eps(self, x: TensorElement, leg: int = 1) -> TensorElement:
        return apply_morphism_leg(x, leg, self.counit)

    def phi(self, *label: int) -> TensorElement:
        """Φ_{label}: leg p carries tensor factor ``label[p]``, so Φ_{312} = Σ Z⊗X⊗Y for Φ = Σ X⊗Y⊗Z."""
        return embed_legs(self.reassociator, _factor_positions(label), 3)

    def phi_inv(self, *label: int) -> TensorElement:
        return embed_legs(self.reassociator_inv, _factor_positions(label), 3)

    def with_order(self, order: int) -> "QuasiBialgebraData":
        return QuasiBialgebraData(self.algebra.with_order(order), self.coproduct.with_order(order),
                                  self.counit.with_order(order), self.reassociator.with_order(order),
                                  self.ell.with_order(order), self.r_elt.with_order(order))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, QuasiBialgebraData):
            return NotImplemented
        return (self.algebra == other.algebra and self.coproduct == other.coproduct
                and self.counit == other.counit and self.reassociator == other.reassociator
                and self.ell == other.ell and self.r_elt == other.r_elt)


@dataclass(eq=False)
class QuasiTriangularData:
    base: QuasiBialgebraData
    rmatrix: TensorElement
    metadata: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.rmatrix.arity != 2:
            raise ValueError("R-matrix has arity 2")

    @cached_property
    def rmatrix_inv(self) -> TensorElement:
        return tensor_invert(self.rmatrix)

    @property
    def algebra(self) -> FiniteAlgebra:
        return self.base.algebra

    @property
    def order(self) -> int:
        return self.base.order

    def R(self, i: int, j: int, m: int = 3) -> TensorElement:
        return embed_legs(self.rmatrix, (i, j), m)

    def R_inv(self, i: int, j: int, m: int = 3) -> TensorElement:
        return embed_legs(self.rmatrix_inv, (i, j), m)

    def with_order(self, order: int) -> "QuasiTriangularData":
        return QuasiTriangularData(self.base.with_order(order), self.rmatrix.with_order(order),
                                   dict(self.metadata))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, QuasiTriangularData):
            return NotImplemented
        return self.base == other.base and self.rmatrix == other.rmatrix


def verify_quasibialgebra(B: QuasiBialgebraData) -> CheckReport:
    alg = B.algebra
    rep = CheckReport()
    labels = alg.basis_labels

    bad = B.coproduct.multiplicativity_failures()
    ok = not bad and B.coproduct.is_unital()
    if ok:
        rep.entries.append(CheckEntry("coproduct_is_algebra_map", True, tag="qb-hom"))
    else:
        i, j = bad[0] if bad else (0, 0)
        lhs = B.delta(alg.element(i) * alg.element(j))
        rhs = B.coproduct.images[i] * B.coproduct.images[j]
        if not bad:
            lhs, rhs = B.delta(alg.one()), TensorElement.unit(alg, 2)
        rep.add("coproduct_is_algebra_map", lhs, rhs, tag="qb-hom", detail=f"pair {labels[i]},{labels[j]}")
    bad = B.counit.multiplicativity_failures()
    if not bad and B.counit.is_unital():
        rep.entries.append(CheckEntry("counit_is_algebra_map", True, tag="qb-hom"))
    else:
        i, j = bad[0] if bad else (0, 0)
        lhs = B.eps(alg.element(i) * alg.element(j))
        rhs = B.counit.images[i] * B.counit.images[j]
        if not bad:
            lhs, rhs = B.eps(alg.one()), TensorElement.unit(alg, 0)
        rep.add("counit_is_algebra_map", lhs, rhs, tag="qb-hom", detail=f"pair {labels[i]},{labels[j]}")

    phi, phi_inv = B.reassociator, B.reassociator_inv

    def coassoc():
        for i in range(alg.dim):
            d = B.coproduct.images[i]
            yield labels[i], B.delta(d, 2), phi * B.delta(d, 1) * phi_inv
    _first_failure(rep, "quasi_coassociativity", coassoc(), tag="qb1")

    def left_counit():
        for i in range(alg.dim):
            e = alg.element(i)
            yield labels[i], B.eps(B.coproduct.images[i], 1), B.ell_inv * e * B.ell
    _first_failure(rep, "left_counit", left_counit(), tag="qb2")

    def right_counit():
        for i in range(alg.dim):
            e = alg.element(i)
            yield labels[i], B.eps(B.coproduct.images[i], 2), B.r_inv * e * B.r_elt
    _first_failure(rep, "right_counit", right_counit(), tag="qb3")

    lhs = B.delta(phi, 3) * B.delta(phi, 1)
    rhs = embed_legs(phi, (2, 3, 4), 4) * B.delta(phi, 2) * embed_legs(phi, (1, 2, 3), 4)
    rep.add("pentagon", lhs, rhs, tag="qb4")
    rep.add("counit_reassociator", B.eps(phi, 2), TensorElement.outer(B.r_elt, B.ell_inv), tag="qb5")
    return rep


def delta_op(Q: QuasiTriangularData | QuasiBialgebraData, x: TensorElement) -> TensorElement:
    base = Q.base if isinstance(Q, QuasiTriangularData) else Q
    return flip_op(base.delta(x))


def verify_quasitriangular(Q: QuasiTriangularData) -> CheckReport:
    B, alg = Q.base, Q.algebra
    R, Rinv = Q.rmatrix, Q.rmatrix_inv
    rep = CheckReport()

    def intertwine():
        for i in range(alg.dim):
            d = B.coproduct.images[i]
            yield alg.basis_labels[i], flip_op(d), R * d * Rinv
    _first_failure(rep, "r_intertwines_coproduct", intertwine(), tag="qtqb1")

    lhs = B.delta(R, 2)
    rhs = B.phi_inv(3, 1, 2) * Q.R(1, 3) * B.phi(2, 1, 3) * Q.R(1, 2) * B.phi_inv()
    rep.add("hexagon_right_leg", lhs, rhs, tag="qtqb2")
    lhs = B.delta(R, 1)
    rhs = B.phi(2, 3, 1) * Q.R(1, 3) * B.phi_inv(1, 3, 2) * Q.R(2, 3) * B.phi()
    rep.add("hexagon_left_leg", lhs, rhs, tag="qtqb3")
    return rep


def check_triangular(Q: QuasiTriangularData) -> bool:
    return flip_op(Q.rmatrix) * Q.rmatrix == TensorElement.unit(Q.algebra, 2)


def gauge_twist_base(B: QuasiBialgebraData, F: TensorElement,
                     F_inv: TensorElement | None = None) -> QuasiBialgebraData:
    """Twist Δ, Φ, ℓ, r by an invertible F ∈ H⊗H.

    F need not be counital: ℓ and r absorb u = (ε⊗id)(F) and v = (id⊗ε)(F).
    """
    if F.arity != 2:
        raise ValueError("gauge transformation has arity 2")
    if F_inv is None:
        F_inv = tensor_invert(F)
    alg = B.algebra
    images = [F * d * F_inv for d in B.coproduct.images]
    coproduct = AlgebraMorphismData(alg, 2, images, name="twisted coproduct")
    phi = (embed_legs(F, (2, 3), 3) * B.delta(F, 2) * B.reassociator
           * B.delta(F_inv, 1) * embed_legs(F_inv, (1, 2), 3))
    u = B.eps(F, 1)
    v = B.eps(F, 2)
    ell = B.ell * tensor_invert(u)
    r = B.r_elt * tensor_invert(v)
    return QuasiBialgebraData(alg, coproduct, B.counit, phi, ell, r)


def gauge_twist(Q: QuasiTriangularData, F: TensorElement) -> QuasiTriangularData:
    try:
        F_inv = tensor_invert(F)
    except NotInvertibleError as exc:
        raise NotInvertibleError(f"gauge transformation is not invertible: {exc}") from exc
    base = gauge_twist_base(Q.base, F, F_inv)
    R = flip_op(F) * Q.rmatrix * F_inv
    out = QuasiTriangularData(base, R, dict(Q.metadata))
    out.__dict__["rmatrix_inv"] = F * Q.rmatrix_inv * flip_op(F_inv)
    return out
