"""Infinitesimal R-matrices χ: pre-Cartier axioms, twisting, braid identities, quantization."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from .quasibialgebra import (
    CheckEntry,
    CheckReport,
    QuasiBialgebraData,
    QuasiTriangularData,
    _first_failure,
    gauge_twist,
)
from .scalars import HPoly
from .tensor_algebra import (
    AlgebraMismatchError,
    FiniteAlgebra,
    TensorElement,
    embed_legs,
    exp_element,
    flip_op,
    tensor_commutator,
    tensor_invert,
)


class QuantizationError(ArithmeticError):
    """Base class for refusals of ``quantize``."""


class QuantizationObstructionError(QuantizationError):
    """None of the commutator conditions needed for exp(ħχ) holds."""

    def __init__(self, failing: list[str], report: CheckReport | None = None):
        self.failing = failing
        self.report = report
        super().__init__("quantization obstructed; nonzero commutators: " + ", ".join(failing))


class AssociatorOutOfScopeError(QuantizationError):
    """The Drinfeld associator would be evaluated on non-commuting arguments."""


class TrivialAssociatorRequired(ValueError):
    """Operation only defined when Φ = 1⊗1⊗1."""


@dataclass(eq=False)
class PreCartierData:
    qt: QuasiTriangularData
    chi: TensorElement

    def __post_init__(self) -> None:
        if self.chi.arity != 2:
            raise ValueError("χ has arity 2")
        if self.chi.algebra != self.qt.algebra:
            raise AlgebraMismatchError("χ lives over a different algebra")

    @property
    def base(self) -> QuasiBialgebraData:
        return self.qt.base

    @property
    def algebra(self) -> FiniteAlgebra:
        return self.qt.algebra

    def chi_legs(self, i: int, j: int, m: int = 3) -> TensorElement:
        return embed_legs(self.chi, (i, j), m)

    def with_chi(self, chi: TensorElement) -> "PreCartierData":
        return PreCartierData(self.qt, chi)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PreCartierData):
            return NotImplemented
        return self.qt == other.qt and self.chi == other.chi


@dataclass
class BraidSet:
    """Elements A^{ij} indexed by pair labels such as "13"."""

    elements: dict[str, TensorElement]
    arity: int = field(init=False)

    def __post_init__(self) -> None:
        if not self.elements:
            raise ValueError("empty braid set")
        arities = {e.arity for e in self.elements.values()}
        algebras = {e.algebra for e in self.elements.values()}
        if len(arities) != 1 or len(algebras) != 1:
            raise ValueError("braid set elements must share arity and algebra")
        self.arity = arities.pop()
        if self.arity not in (3, 4):
            raise ValueError("braid sets live in arity 3 or 4")
        want = {f"{i}{j}" for i, j in itertools.combinations(range(1, self.arity + 1), 2)}
        if set(self.elements) != want:
            raise ValueError(f"braid set of arity {self.arity} needs exactly the labels {sorted(want)}")

    def __getitem__(self, label: str) -> TensorElement:
        return self.elements[label]

    def get(self, i: int, j: int) -> TensorElement:
        return self.elements[f"{min(i, j)}{max(i, j)}"]


# ------------------------------------------------------------------- axioms
def _conj_13_right(P: PreCartierData) -> TensorElement:
    """Φ R₁₂⁻¹ Φ₂₁₃⁻¹ χ₁₃ Φ₂₁₃ R₁₂ Φ⁻¹."""
    B, Q = P.base, P.qt
    inner = B.phi_inv(2, 1, 3) * P.chi_legs(1, 3) * B.phi(2, 1, 3)
    return B.phi() * Q.R_inv(1, 2) * inner * Q.R(1, 2) * B.phi_inv()


def _conj_13_left(P: PreCartierData) -> TensorElement:
    """Φ⁻¹ R₂₃⁻¹ Φ₁₃₂ χ₁₃ Φ₁₃₂⁻¹ R₂₃ Φ."""
    B, Q = P.base, P.qt
    inner = B.phi(1, 3, 2) * P.chi_legs(1, 3) * B.phi_inv(1, 3, 2)
    return B.phi_inv() * Q.R_inv(2, 3) * inner * Q.R(2, 3) * B.phi()


def verify_precartier(P: PreCartierData) -> CheckReport:
    B, alg, chi = P.base, P.algebra, P.chi
    rep = CheckReport()

    def central():
        for i in range(alg.dim):
            d = B.coproduct.images[i]
            yield alg.basis_labels[i], chi * d, d * chi
    _first_failure(rep, "chi_commutes_with_coproduct", central(), tag="pC1")

    phi, phi_inv = B.reassociator, B.reassociator_inv
    lhs = B.delta(chi, 2)
    rhs = _conj_13_right(P) + phi * P.chi_legs(1, 2) * phi_inv
    rep.add("chi_right_leg", lhs, rhs, tag="pC2")
    lhs = B.delta(chi, 1)
    rhs = _conj_13_left(P) + phi_inv * P.chi_legs(2, 3) * phi
    rep.add("chi_left_leg", lhs, rhs, tag="pC3")
    return rep


def verify_cartier(P: PreCartierData) -> bool:
    R = P.qt.rmatrix
    return R * P.chi == flip_op(P.chi) * R


def cartier_report(P: PreCartierData) -> CheckReport:
    R = P.qt.rmatrix
    rep = CheckReport()
    rep.add("r_chi_symmetry", R * P.chi, flip_op(P.chi) * R, tag="pC4")
    return rep


def twist_chi(P: PreCartierData, F: TensorElement) -> PreCartierData:
    qt = gauge_twist(P.qt, F)
    F_inv = tensor_invert(F)
    return PreCartierData(qt, F * P.chi * F_inv)


# ----------------------------------------------------- χ₁₃ in the bialgebra
def _require_trivial(P: PreCartierData, what: str) -> None:
    if not P.base.has_trivial_reassociator():
        raise TrivialAssociatorRequired(f"{what} needs a trivial re-associator")


def chi13_bar(P: PreCartierData) -> TensorElement:
    _require_trivial(P, "chi13_bar")
    Q = P.qt
    return Q.R_inv(1, 2) * P.chi_legs(1, 3) * Q.R(1, 2)


def chi13_bialgebra_report(P: PreCartierData) -> CheckReport:
    _require_trivial(P, "chi13 identity")
    Q = P.qt
    rep = CheckReport()
    rep.add("chi13_conjugates_agree", Q.R_inv(2, 3) * P.chi_legs(1, 3) * Q.R(2, 3), chi13_bar(P),
            tag="chi13")
    return rep


def check_chi13_bialgebra(P: PreCartierData) -> bool:
    return chi13_bialgebra_report(P).passed


def chi13_quasi_report(P: PreCartierData) -> CheckReport:
    B, Q = P.base, P.qt
    rhs = Q.R_inv(1, 2) * B.phi_inv(2, 1, 3) * P.chi_legs(1, 3) * B.phi(2, 1, 3) * Q.R(1, 2)
    rep = CheckReport()
    rep.add("chi13_quasi_conjugates_agree", _conj_13_left(P), rhs, tag="chi13-quasi")
    return rep


def check_chi13_quasi(P: PreCartierData) -> bool:
    return chi13_quasi_report(P).passed


# ------------------------------------------------------ braid relation sets
def theta_set(P: PreCartierData) -> BraidSet:
    B = P.base
    return BraidSet({
        "12": P.chi_legs(1, 2),
        "23": B.phi_inv() * P.chi_legs(2, 3) * B.phi(),
        "13": _conj_13_left(P),
    })


def upsilon_set(P: PreCartierData) -> BraidSet:
    B = P.base
    return BraidSet({
        "12": B.phi() * P.chi_legs(1, 2) * B.phi_inv(),
        "23": P.chi_legs(2, 3),
        "13": _conj_13_right(P),
    })


def bialgebra_braid_set(P: PreCartierData) -> BraidSet:
    """{χ₁₂, χ₂₃, χ̄₁₃} for a trivial re-associator."""
    return BraidSet({"12": P.chi_legs(1, 2), "23": P.chi_legs(2, 3), "13": chi13_bar(P)})


def braid_relation_report(get, m: int, zero) -> CheckReport:
    """Infinitesimal braid relations for elements ``get(i, j)`` (i < j) among m legs.

    Works for anything with ``*``, ``+``, ``-`` and ``is_zero``: tensors or operators.
    """
    rep = CheckReport()
    for i, j in itertools.combinations(range(1, m + 1), 2):
        for k in range(1, m + 1):
            if k in (i, j):
                continue
            A = get(i, j)
            B = get(min(i, k), max(i, k)) + get(min(j, k), max(j, k))
            rep.add(f"[A{i}{j}, A{min(i, k)}{max(i, k)} + A{min(j, k)}{max(j, k)}]",
                    A * B - B * A, zero, tag="infbraid1")
    if m == 4:
        for (i, j), (k, l) in [((1, 2), (3, 4)), ((1, 3), (2, 4)), ((1, 4), (2, 3))]:
            A, B = get(i, j), get(k, l)
            rep.add(f"[A{i}{j}, A{k}{l}]", A * B - B * A, zero, tag="infbraid2")
    return rep


def check_infinitesimal_braid(S: BraidSet) -> CheckReport:
    """[A^{ij}, A^{ik} + A^{jk}] = 0 for distinct i, j, k, and [A^{ij}, A^{kl}] = 0 for disjoint pairs."""
    if not isinstance(S, BraidSet):
        raise TypeError("expected a BraidSet")
    alg = next(iter(S.elements.values())).algebra
    return braid_relation_report(S.get, S.arity, TensorElement.zero(alg, S.arity))


# ------------------------------------------------------------ Yang-Baxter
def _qybe_words(Q: QuasiTriangularData):
    B = Q.base
    left = [Q.R(1, 2), B.phi(2, 3, 1), Q.R(1, 3), B.phi_inv(1, 3, 2), Q.R(2, 3), B.phi()]
    right = [B.phi(3, 2, 1), Q.R(2, 3), B.phi_inv(3, 1, 2), Q.R(1, 3), B.phi(2, 1, 3), Q.R(1, 2)]
    return left, right


def _prod(factors: list[TensorElement]) -> TensorElement:
    out = factors[0]
    for f in factors[1:]:
        out = out * f
    return out


def qybe_report(Q: QuasiTriangularData) -> CheckReport:
    left, right = _qybe_words(Q)
    rep = CheckReport()
    rep.add("quasi_yang_baxter", _prod(left), _prod(right), tag="QYBE")
    return rep


def check_qybe(Q: QuasiTriangularData) -> bool:
    return qybe_report(Q).passed


def qqybe_report(P: PreCartierData) -> CheckReport:
    """Derivative of the quasi-QYBE: χ inserted after each R factor on both sides."""
    left, right = _qybe_words(P.qt)
    c12, c13, c23 = P.chi_legs(1, 2), P.chi_legs(1, 3), P.chi_legs(2, 3)
    # left word R12 Φ231 R13 Φ132⁻¹ R23 Φ: χ after R12 (slot 0), R13 (slot 2), R23 (slot 4)
    lhs = sum_terms([_insert(left, 0, c12), _insert(left, 2, c13), _insert(left, 4, c23)])
    # right word Φ321 R23 Φ312⁻¹ R13 Φ213 R12: χ after R23 (1), R13 (3), R12 (5)
    rhs = sum_terms([_insert(right, 1, c23), _insert(right, 3, c13), _insert(right, 5, c12)])
    rep = CheckReport()
    rep.add("infinitesimal_quasi_yang_baxter", lhs, rhs, tag="QQYBE")
    return rep


def _insert(word: list[TensorElement], after: int, x: TensorElement) -> TensorElement:
    return _prod(word[: after + 1] + [x] + word[after + 1:])


def sum_terms(terms: list[TensorElement]) -> TensorElement:
    out = terms[0]
    for t in terms[1:]:
        out = out + t
    return out


def check_infinitesimal_qqybe(P: PreCartierData) -> bool:
    return qqybe_report(P).passed


# ------------------------------------------------------------ quantization
def check_quantization_preconditions(P: PreCartierData) -> CheckReport:
    _require_trivial(P, "quantization preconditions")
    Q = P.qt
    c12, c13, c23 = P.chi_legs(1, 2), P.chi_legs(1, 3), P.chi_legs(2, 3)
    zero = TensorElement.zero(P.algebra, 3)
    rep = CheckReport()
    rep.add("[chi12, R12^-1 chi13 R12]",
            tensor_commutator(c12, Q.R_inv(1, 2) * c13 * Q.R(1, 2)), zero, tag="com1")
    rep.add("[chi23, R23^-1 chi13 R23]",
            tensor_commutator(c23, Q.R_inv(2, 3) * c13 * Q.R(2, 3)), zero, tag="com2")
    rep.add("[chi12, chi23]", tensor_commutator(c12, c23), zero, tag="com3")
    return rep


def associator_commutator(P: PreCartierData) -> TensorElement:
    """[χ₁₂, Φ⁻¹χ₂₃Φ], the obstruction to evaluating the Drinfeld associator as 1."""
    B = P.base
    return tensor_commutator(P.chi_legs(1, 2), B.phi_inv() * P.chi_legs(2, 3) * B.phi())


def quantize(P: PreCartierData, scale, order: int) -> QuasiTriangularData:
    """R̃ = R·exp(scale·ħ·χ) over Q(i)[ħ]/ħ^{order+1}.

    ``scale`` is 1 for the bialgebra exponential and 1/2 for the quasi-bialgebra
    formulae.  With a nontrivial re-associator the associator Ψ(χ₁₂, Φ⁻¹χ₂₃Φ)
    is only evaluated when its arguments commute, where it equals 1, so Φ is kept.
    """
    if order < 1:
        raise ValueError("truncation order must be at least 1")
    scale = Fraction(scale)
    if scale == 0:
        raise ValueError("scale must be nonzero")
    if P.base.has_trivial_reassociator():
        pre = check_quantization_preconditions(P)
        fails = pre.failures()
        if len(fails) == len(pre):
            raise QuantizationObstructionError([e.name for e in fails], pre)
    else:
        comm = associator_commutator(P)
        if not comm.is_zero():
            raise AssociatorOutOfScopeError(
                "[chi12, Phi^-1 chi23 Phi] != 0: the Drinfeld associator is not evaluated "
                "on non-commuting arguments")
    lifted = P.qt.with_order(order)
    chi = P.chi.with_order(order)
    hbar = HPoly.hbar(order)
    exponent = chi.scale(hbar * HPoly.constant(scale, order))
    R_new = lifted.rmatrix * exp_element(exponent)
    meta = dict(P.qt.metadata)
    meta.update({"scale": str(scale), "truncation_order": order})
    return QuasiTriangularData(lifted.base, R_new, meta)


def quantized_first_order(Q_tilde: QuasiTriangularData) -> TensorElement:
    """The ħ¹ coefficient of R^{-1}R̃, where R is the ħ⁰ part of R̃."""
    R_tilde = Q_tilde.rmatrix
    R0 = R_tilde.degree0()
    return (tensor_invert(R0) * R_tilde).hbar_coefficient(1)
