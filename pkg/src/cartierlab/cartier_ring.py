"""Representations of the Cartier ring C_n on V^{⊗n} and module-level t^{ij} checks.

β_i acts as v_i ⊗ v_{i+1} ↦ R^op·(v_{i+1} ⊗ v_i), γ_i as χ on legs i, i+1.
The braiding σ of the module category on adjacent legs is exactly β_i, so the
categorical formulas for t^{13}, t^{14}, ... become words in β^{±1} and γ.
Everything here assumes a trivial re-associator (strict module category).
"""

from __future__ import annotations

import itertools
import re
from collections import OrderedDict
from dataclasses import dataclass, field

from .operators import LinearOperator
from .precartier import PreCartierData, TrivialAssociatorRequired, braid_relation_report
from .quasibialgebra import CheckReport
from .scalars import HPoly
from .tensor_algebra import AlgebraMismatchError, FiniteAlgebra, TensorElement, flip_op


class OutOfRangeError(IndexError):
    """Strand index outside 1..n-1."""


@dataclass
class ModuleRep:
    """Left H-module: one dim_v × dim_v operator per basis element of H."""

    algebra: FiniteAlgebra
    dim_v: int
    action: list[LinearOperator]
    name: str = ""

    def __post_init__(self) -> None:
        if len(self.action) != self.algebra.dim:
            raise ValueError("need one action matrix per basis element")
        for op in self.action:
            if op.dim != self.dim_v or op.order != self.algebra.order:
                raise ValueError("action matrices must be dim_v × dim_v at the algebra's order")

    def act(self, x: TensorElement) -> LinearOperator:
        if x.arity != 1:
            raise ValueError("module action takes arity-1 elements")
        out = LinearOperator.zero(self.dim_v, self.algebra.order)
        for (k,), c in x.terms.items():
            out = out + self._scaled(self.action[k], c)
        return out

    @staticmethod
    def _scaled(op: LinearOperator, c: HPoly) -> LinearOperator:
        if c.is_constant():
            return op.scale(c.degree0())
        diag = LinearOperator.from_entries(op.dim, {(r, r): c for r in range(op.dim)}, op.order)
        return diag @ op

    def morphism_failures(self) -> list[tuple[int, int]]:
        """Basis pairs (i, j) with action(e_i)·action(e_j) ≠ action(e_i e_j)."""
        alg = self.algebra
        bad = []
        for i in range(alg.dim):
            for j in range(alg.dim):
                if self.action[i] @ self.action[j] != self.act(alg.element(i) * alg.element(j)):
                    bad.append((i, j))
        return bad

    def is_unital(self) -> bool:
        return self.act(self.algebra.one()) == LinearOperator.identity(self.dim_v, self.algebra.order)

    def columns(self) -> list[list[list[tuple[int, HPoly]]]]:
        """columns()[k][j] lists the nonzero (row, value) of column j of action(e_k)."""
        out = []
        for op in self.action:
            cols: list[list[tuple[int, HPoly]]] = [[] for _ in range(self.dim_v)]
            for (r, c), v in op.nonzero_entries().items():
                cols[c].append((r, v))
            out.append(cols)
        return out


def regular_module(H: FiniteAlgebra) -> ModuleRep:
    """H acting on itself by left multiplication."""
    action = []
    for i in range(H.dim):
        entries = {}
        for j in range(H.dim):
            for k, c in H.basis_product(i, j).items():
                entries[(k, j)] = c
        action.append(LinearOperator.from_entries(H.dim, entries, H.order))
    return ModuleRep(H, H.dim, action, name=f"regular({H.name})")


# ------------------------------------------------------ tensor-power actions
def tensor_action(T: TensorElement, V: ModuleRep) -> LinearOperator:
    """The action of T ∈ H^{⊗m} on V^{⊗m}; leg 1 is the most significant index."""
    if T.algebra != V.algebra:
        raise AlgebraMismatchError("tensor and module live over different algebras")
    m, d = T.arity, V.dim_v
    cols = V.columns()
    entries: dict[tuple[int, int], HPoly] = {}
    for multi in itertools.product(range(d), repeat=m):
        col = 0
        for j in multi:
            col = col * d + j
        for key, c in T.terms.items():
            partial = [(0, c)]
            for leg, k in enumerate(key):
                column = cols[k][multi[leg]]
                partial = [(r * d + rr, v * vv) for r, v in partial for rr, vv in column]
                if not partial:
                    break
            for r, v in partial:
                rc = (r, col)
                entries[rc] = entries[rc] + v if rc in entries else v
    return LinearOperator.from_entries(d ** m, entries, T.order)


def flip_operator(d: int, order: int = 0) -> LinearOperator:
    """τ(v ⊗ w) = w ⊗ v on V ⊗ V."""
    return LinearOperator.permutation(d * d, [(j % d) * d + j // d for j in range(d * d)], order)


def lift_operator(op: LinearOperator, left_dim: int, right_dim: int) -> LinearOperator:
    """id_{left} ⊗ op ⊗ id_{right}."""
    if left_dim == 1 and right_dim == 1:
        return op
    n = op.dim
    entries = {}
    for (r, c), v in op.nonzero_entries().items():
        for lft in range(left_dim):
            for rgt in range(right_dim):
                entries[((lft * n + r) * right_dim + rgt, (lft * n + c) * right_dim + rgt)] = v
    return LinearOperator.from_entries(left_dim * n * right_dim, entries, op.order)


class CartierRepresentation:
    """ρ_n : C_n → End(V^{⊗n}) with generator images cached."""

    def __init__(self, P: PreCartierData, V: ModuleRep, n: int):
        if n < 2:
            raise ValueError("the Cartier ring needs n >= 2 strands")
        if not P.base.has_trivial_reassociator():
            raise TrivialAssociatorRequired("module-level representation needs a trivial re-associator")
        if P.algebra != V.algebra:
            raise AlgebraMismatchError("module and bundle live over different algebras")
        self.P, self.V, self.n = P, V, n
        self.order = P.algebra.order
        self.dim = V.dim_v ** n
        self._cache: dict[tuple[str, int], LinearOperator] = {}
        self._local: dict[str, LinearOperator] = {}

    def _local_op(self, kind: str) -> LinearOperator:
        if kind not in self._local:
            d, Q = self.V.dim_v, self.P.qt
            tau = flip_operator(d, self.order)
            if kind == "b":
                op = tensor_action(flip_op(Q.rmatrix), self.V) @ tau
            elif kind == "B":
                op = tau @ tensor_action(flip_op(Q.rmatrix_inv), self.V)
            else:
                op = tensor_action(self.P.chi, self.V)
            self._local[kind] = op
        return self._local[kind]

    def generator(self, kind: str, i: int) -> LinearOperator:
        """kind 'b' = β_i, 'B' = β_i^{-1}, 'g' = γ_i."""
        if kind not in ("b", "B", "g"):
            raise ValueError(f"unknown generator kind {kind!r}")
        if not 1 <= i <= self.n - 1:
            raise OutOfRangeError(f"strand index {i} outside 1..{self.n - 1}")
        key = (kind, i)
        if key not in self._cache:
            d = self.V.dim_v
            self._cache[key] = lift_operator(self._local_op(kind), d ** (i - 1), d ** (self.n - i - 1))
        return self._cache[key]

    def beta(self, i: int) -> LinearOperator:
        return self.generator("b", i)

    def beta_inv(self, i: int) -> LinearOperator:
        return self.generator("B", i)

    def gamma(self, i: int) -> LinearOperator:
        return self.generator("g", i)

    def identity(self) -> LinearOperator:
        return LinearOperator.identity(self.dim, self.order)

    def zero(self) -> LinearOperator:
        return LinearOperator.zero(self.dim, self.order)


_REPS: "OrderedDict[tuple[int, int, int], tuple[PreCartierData, ModuleRep, CartierRepresentation]]" = OrderedDict()


def representation(P: PreCartierData, V: ModuleRep, n: int) -> CartierRepresentation:
    """Cached CartierRepresentation for (P, V, n), keyed on object identity."""
    key = (id(P), id(V), n)
    hit = _REPS.get(key)
    if hit is not None and hit[0] is P and hit[1] is V:
        _REPS.move_to_end(key)
        return hit[2]
    rep = CartierRepresentation(P, V, n)
    _REPS[key] = (P, V, rep)
    while len(_REPS) > 16:
        _REPS.popitem(last=False)
    return rep


def rep_beta(P: PreCartierData, V: ModuleRep, i: int, n: int) -> LinearOperator:
    return representation(P, V, n).beta(i)


def rep_beta_inv(P: PreCartierData, V: ModuleRep, i: int, n: int) -> LinearOperator:
    return representation(P, V, n).beta_inv(i)


def rep_gamma(P: PreCartierData, V: ModuleRep, i: int, n: int) -> LinearOperator:
    return representation(P, V, n).gamma(i)


# -------------------------------------------------------------- relations
def _prod(*ops: LinearOperator) -> LinearOperator:
    out = ops[0]
    for op in ops[1:]:
        out = out @ op
    return out


def check_cartier_ring_relations(P: PreCartierData, V: ModuleRep, n: int) -> CheckReport:
    rho = representation(P, V, n)
    b, g = rho.beta, rho.gamma
    rep = CheckReport()
    for i in range(1, n):
        for j in range(1, n):
            if abs(i - j) < 2:
                continue
            if i < j:
                rep.add(f"b{i} b{j} = b{j} b{i}", b(i) @ b(j), b(j) @ b(i), tag="distant-beta")
                rep.add(f"g{i} g{j} = g{j} g{i}", g(i) @ g(j), g(j) @ g(i), tag="distant-gamma")
            rep.add(f"b{i} g{j} = g{j} b{i}", b(i) @ g(j), g(j) @ b(i), tag="distant-mixed")
    for i in range(1, n - 1):
        j = i + 1
        rep.add(f"b{i} b{j} b{i} = b{j} b{i} b{j}", _prod(b(i), b(j), b(i)), _prod(b(j), b(i), b(j)),
                tag="braid")
        lhs = _prod(b(i), g(i) @ b(j) + b(j) @ g(j), b(i)) + _prod(b(i), b(j), b(i), g(i))
        rhs = _prod(b(j), g(j) @ b(i) + b(i) @ g(i), b(j)) + _prod(b(j), b(i), b(j), g(j))
        rep.add(f"mixed relation at {i}", lhs, rhs, tag="mixed")
    return rep


@dataclass(frozen=True)
class CartierWord:
    """Letters (kind, index, exponent): kind 'b' (β, exponent ±1) or 'g' (γ, exponent +1)."""

    letters: tuple[tuple[str, int, int], ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        for kind, idx, e in self.letters:
            if kind not in ("b", "g") or idx < 1 or e not in (1, -1):
                raise ValueError(f"malformed letter {(kind, idx, e)}")
            if kind == "g" and e != 1:
                raise ValueError("γ generators are not invertible")

    _TOKEN = re.compile(r"^([bBg])(\d+)$")

    @classmethod
    def parse(cls, text: str) -> "CartierWord":
        """Parse e.g. "b1 b2 g1 B1"; capital B is β^{-1}."""
        letters = []
        for tok in text.split():
            m = cls._TOKEN.match(tok)
            if not m:
                raise ValueError(f"cannot parse letter {tok!r}")
            ch, idx = m.group(1), int(m.group(2))
            letters.append(("b", idx, -1) if ch == "B" else (ch, idx, 1))
        return cls(tuple(letters))

    def __str__(self) -> str:
        return " ".join(("B" if e < 0 else k) + str(i) for k, i, e in self.letters)

    def __add__(self, other: "CartierWord") -> "CartierWord":
        return CartierWord(self.letters + other.letters)

    def max_index(self) -> int:
        return max((i for _, i, _ in self.letters), default=0)


def evaluate_word(w: CartierWord, P: PreCartierData, V: ModuleRep, n: int) -> LinearOperator:
    rho = representation(P, V, n)
    if w.max_index() > n - 1:
        raise OutOfRangeError(f"word {w} uses a strand index beyond {n - 1}")
    out = rho.identity()
    for kind, i, e in w.letters:
        out = out @ rho.generator("B" if (kind == "b" and e < 0) else kind, i)
    return out


# ------------------------------------------------------- t^{ij} operators
def t13_presentations(P: PreCartierData, V: ModuleRep) -> dict[str, LinearOperator]:
    """The four braid conjugates of t on V^{⊗3} that should all equal t^{13}."""
    rho = representation(P, V, 3)
    b, B, g = rho.beta, rho.beta_inv, rho.gamma
    return {
        "I": _prod(B(2), g(1), b(2)),
        "II": _prod(B(1), g(2), b(1)),
        "III": _prod(b(1), g(2), B(1)),
        "IV": _prod(b(2), g(1), B(2)),
    }


def t14_presentations(P: PreCartierData, V: ModuleRep) -> dict[str, LinearOperator]:
    rho = representation(P, V, 4)
    b, B, g = rho.beta, rho.beta_inv, rho.gamma
    return {
        "I": _prod(B(1), B(3), g(2), b(3), b(1)),
        "II": _prod(B(3), B(1), g(2), b(1), b(3)),
        "III": _prod(B(1), B(2), g(3), b(2), b(1)),
        "IV": _prod(B(3), B(2), g(1), b(2), b(3)),
    }


def _pairwise(ops: dict[str, LinearOperator], prefix: str, tag: str) -> CheckReport:
    rep = CheckReport()
    for x, y in itertools.combinations(ops, 2):
        rep.add(f"{prefix}-{x} = {prefix}-{y}", ops[x], ops[y], tag=tag)
    return rep


def check_t13_presentations(P: PreCartierData, V: ModuleRep) -> CheckReport:
    return _pairwise(t13_presentations(P, V), "t13", "t13")


def check_t14_presentations(P: PreCartierData, V: ModuleRep) -> CheckReport:
    return _pairwise(t14_presentations(P, V), "t14", "t14")


def tij_operators(P: PreCartierData, V: ModuleRep, m: int) -> dict[str, LinearOperator]:
    """t^{ij} on V^{⊗m} (m = 3 or 4), built from braidings and the χ action."""
    rho = representation(P, V, m)
    b, B, g = rho.beta, rho.beta_inv, rho.gamma
    ops = {"12": g(1), "23": g(2), "13": _prod(B(2), g(1), b(2))}
    if m == 4:
        ops.update({
            "34": g(3),
            "24": _prod(B(3), g(2), b(3)),
            # σ_{Y⊗Z,W} = (σ_{Y,W} ⊗ id)(id ⊗ σ_{Z,W}) = β_2 β_3
            "14": _prod(B(3), B(2), g(1), b(2), b(3)),
        })
    elif m != 3:
        raise ValueError("t^{ij} operators are defined for 3 or 4 legs")
    return ops


def braid_report_for_operators(ops: dict[str, LinearOperator], m: int) -> CheckReport:
    zero = LinearOperator.zero(next(iter(ops.values())).dim, next(iter(ops.values())).order)
    return braid_relation_report(lambda i, j: ops[f"{i}{j}"], m, zero)


def check_tij_braid_relations(P: PreCartierData, V: ModuleRep) -> CheckReport:
    rep = CheckReport()
    for m in (3, 4):
        sub = braid_report_for_operators(tij_operators(P, V, m), m)
        for e in sub.entries:
            e.name = f"V^{m}: {e.name}"
        rep.extend(sub)
    return rep
