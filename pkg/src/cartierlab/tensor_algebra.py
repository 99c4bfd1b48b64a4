"""Finite-dimensional algebras by structure constants and sparse tensors in H^{⊗k}.

Leg positions are 1-based: ``embed_legs(X, (1, 3), 3)`` is X_{13}, with the
first factor of X on leg 1 and the second on leg 3.  A permuted re-associator
Φ_{312} = Σ Z⊗X⊗Y (Φ = Σ X⊗Y⊗Z) therefore is ``embed_legs(Φ, (2, 3, 1), 3)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .scalars import GaussRat, HPoly, NonUnitError, OrderMismatchError, as_hpoly

Key = tuple[int, ...]


class AlgebraMismatchError(ValueError):
    """Binary operation on tensors of different arity or over different algebras."""


class NotInvertibleError(ArithmeticError):
    """The constant (hbar^0) part of a tensor has a singular multiplication matrix."""


class NotNilpotentError(ArithmeticError):
    """Exponential requested of an element that is not provably nilpotent."""


class FiniteAlgebra:
    """Associative unital algebra given by a basis and sparse structure constants.

    ``structure_constants[(i, j)] = {k: c}`` means ``e_i e_j = sum_k c e_k``.
    """

    def __init__(self, basis_labels: Sequence[str],
                 structure_constants: Mapping[tuple[int, int], Mapping[int, object]],
                 unit: Mapping[int, object], order: int = 0, name: str = ""):
        self.dim = len(basis_labels)
        if self.dim < 1:
            raise ValueError("algebra needs at least one basis element")
        self.basis_labels = tuple(basis_labels)
        self.order = order
        self.name = name
        sc: dict[tuple[int, int], dict[int, HPoly]] = {}
        for (i, j), row in structure_constants.items():
            clean = {k: as_hpoly(c, order) for k, c in row.items()}
            clean = {k: c for k, c in sorted(clean.items()) if c}
            if clean:
                sc[(i, j)] = clean
        self.structure_constants = dict(sorted(sc.items()))
        u = {k: as_hpoly(c, order) for k, c in sorted(unit.items())}
        self.unit = {k: c for k, c in u.items() if c}
        self._index = {lab: n for n, lab in enumerate(self.basis_labels)}
        self._build_tables()
        self._key = (self.basis_labels, order,
                     tuple((ij, tuple(row.items())) for ij, row in self.structure_constants.items()),
                     tuple(self.unit.items()))
        self._hash = hash(self._key)
        self._lifts: dict[int, FiniteAlgebra] = {order: self}

    def _build_tables(self) -> None:
        d = self.dim
        one = HPoly.one(self.order)
        signed = True
        table: list = [None] * (d * d)
        for (i, j), row in self.structure_constants.items():
            if len(row) == 1:
                (k, c), = row.items()
                if c == one:
                    table[i * d + j] = (k, 1)
                    continue
                if c == -one:
                    table[i * d + j] = (k, -1)
                    continue
            signed = False
        self.signed_monomial = signed
        self._signed_table = table
        self._general_table = [tuple(self.structure_constants.get((i, j), {}).items())
                               for i in range(d) for j in range(d)]
        self._unit_single = None
        if len(self.unit) == 1:
            (k, c), = self.unit.items()
            if c == one:
                self._unit_single = k

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if not isinstance(other, FiniteAlgebra):
            return NotImplemented
        return self._hash == other._hash and self._key == other._key

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"FiniteAlgebra({self.name or 'anonymous'}, dim={self.dim}, order={self.order})"

    def index(self, label: str) -> int:
        return self._index[label]

    def with_order(self, order: int) -> "FiniteAlgebra":
        """The same algebra with coefficients in Q(i)[hbar]/(hbar^{order+1})."""
        if order not in self._lifts:
            lifted = FiniteAlgebra(
                self.basis_labels,
                {ij: {k: c.with_order(order) for k, c in row.items()}
                 for ij, row in self.structure_constants.items()},
                {k: c.with_order(order) for k, c in self.unit.items()},
                order=order, name=self.name)
            lifted._lifts = self._lifts
            self._lifts[order] = lifted
        return self._lifts[order]

    def element(self, label_or_index, coeff=1) -> "TensorElement":
        """Basis element (arity 1) with an optional coefficient."""
        k = label_or_index if isinstance(label_or_index, int) else self.index(label_or_index)
        return TensorElement(self, 1, {(k,): as_hpoly(coeff, self.order)})

    def one(self, arity: int = 1) -> "TensorElement":
        return TensorElement.unit(self, arity)

    def basis_product(self, i: int, j: int) -> dict[int, HPoly]:
        return dict(self.structure_constants.get((i, j), {}))

    def check_associativity(self) -> list[tuple[int, int, int]]:
        """All basis triples violating associativity (empty when associative)."""
        bad = []
        for i in range(self.dim):
            ei = self.element(i)
            for j in range(self.dim):
                eij = ei * self.element(j)
                for k in range(self.dim):
                    ek = self.element(k)
                    if eij * ek != ei * (self.element(j) * ek):
                        bad.append((i, j, k))
        return bad

    def check_unit(self) -> list[int]:
        u = self.one()
        return [i for i in range(self.dim)
                if u * self.element(i) != self.element(i) or self.element(i) * u != self.element(i)]


class TensorElement:
    """Sparse element of H^{⊗k}: a map from basis-index k-tuples to nonzero HPoly.

    Arity 0 is allowed and stands for a scalar (the values of a counit).
    """

    __slots__ = ("algebra", "arity", "terms")

    def __init__(self, algebra: FiniteAlgebra, arity: int, terms: Mapping[Key, HPoly] | None = None):
        self.algebra = algebra
        self.arity = arity
        clean = {}
        if terms:
            for key, c in terms.items():
                key = tuple(key)
                if len(key) != arity:
                    raise ValueError(f"index tuple {key} does not have arity {arity}")
                if c:
                    clean[key] = c
        self.terms = clean

    @classmethod
    def _trusted(cls, algebra: FiniteAlgebra, arity: int, terms: dict) -> "TensorElement":
        obj = object.__new__(cls)
        obj.algebra = algebra
        obj.arity = arity
        obj.terms = {k: c for k, c in terms.items() if c}
        return obj

    @classmethod
    def zero(cls, algebra: FiniteAlgebra, arity: int) -> "TensorElement":
        return cls._trusted(algebra, arity, {})

    @classmethod
    def unit(cls, algebra: FiniteAlgebra, arity: int) -> "TensorElement":
        if algebra._unit_single is not None:
            return cls._trusted(algebra, arity, {(algebra._unit_single,) * arity: HPoly.one(algebra.order)})
        terms: dict[Key, HPoly] = {}
        for combo in itertools.product(algebra.unit.items(), repeat=arity):
            key = tuple(k for k, _ in combo)
            c = HPoly.one(algebra.order)
            for _, ck in combo:
                c = c * ck
            terms[key] = terms.get(key, HPoly.zero(algebra.order)) + c
        return cls(algebra, arity, terms)

    @classmethod
    def scalar(cls, algebra: FiniteAlgebra, value) -> "TensorElement":
        return cls._trusted(algebra, 0, {(): as_hpoly(value, algebra.order)})

    @staticmethod
    def outer(*factors: "TensorElement") -> "TensorElement":
        """Tensor product a ⊗ b ⊗ ... (arities add)."""
        if not factors:
            raise ValueError("need at least one factor")
        alg = factors[0].algebra
        out = {(): HPoly.one(alg.order)}
        arity = 0
        for f in factors:
            if f.algebra != alg:
                raise AlgebraMismatchError("factors live over different algebras")
            nxt: dict[Key, HPoly] = {}
            for k1, c1 in out.items():
                for k2, c2 in f.terms.items():
                    key = k1 + k2
                    v = c1 * c2
                    nxt[key] = nxt[key] + v if key in nxt else v
            out = nxt
            arity += f.arity
        return TensorElement._trusted(alg, arity, out)

    # ------------------------------------------------------------------ basics
    def __repr__(self) -> str:
        return f"TensorElement(arity={self.arity}, terms={len(self.terms)})"

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        labels = self.algebra.basis_labels
        parts = []
        for key, c in sorted(self.terms.items()):
            parts.append(f"({c})*" + "⊗".join(labels[i] for i in key))
        return " + ".join(parts)

    @property
    def order(self) -> int:
        return self.algebra.order

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def _compat(self, other: "TensorElement") -> None:
        if not isinstance(other, TensorElement):
            raise TypeError(f"expected TensorElement, got {type(other).__name__}")
        if other.arity != self.arity:
            raise AlgebraMismatchError(f"arity mismatch: {self.arity} vs {other.arity}")
        if other.algebra != self.algebra:
            if other.algebra.order != self.algebra.order:
                raise OrderMismatchError("tensors have different truncation orders")
            raise AlgebraMismatchError("tensors live over different algebras")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TensorElement):
            return NotImplemented
        return (self.arity == other.arity and self.algebra == other.algebra
                and self.terms == other.terms)

    def __hash__(self) -> int:
        return hash((self.arity, frozenset(self.terms.items())))

    def sorted_terms(self) -> list[tuple[Key, HPoly]]:
        return sorted(self.terms.items())

    def coefficient(self, key: Key) -> HPoly:
        return self.terms.get(tuple(key), HPoly.zero(self.order))

    def __add__(self, other: "TensorElement") -> "TensorElement":
        self._compat(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out[k] + c if k in out else c
        return TensorElement._trusted(self.algebra, self.arity, out)

    def __neg__(self) -> "TensorElement":
        return TensorElement._trusted(self.algebra, self.arity, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other: "TensorElement") -> "TensorElement":
        return self + (-other)

    def scale(self, c) -> "TensorElement":
        if isinstance(c, int):
            return TensorElement._trusted(self.algebra, self.arity,
                                          {k: v.scale_int(c) for k, v in self.terms.items()})
        c = as_hpoly(c, self.order)
        return TensorElement._trusted(self.algebra, self.arity, {k: v * c for k, v in self.terms.items()})

    def __rmul__(self, c) -> "TensorElement":
        return self.scale(c)

    def __mul__(self, other) -> "TensorElement":
        if not isinstance(other, TensorElement):
            return self.scale(other)
        return tensor_mul(self, other)

    def __pow__(self, k: int) -> "TensorElement":
        if k < 0:
            return tensor_invert(self) ** (-k)
        out = TensorElement.unit(self.algebra, self.arity)
        base = self
        while k:
            if k & 1:
                out = out * base
            k >>= 1
            if k:
                base = base * base
        return out

    # ------------------------------------------------------------ hbar grading
    def degree0(self) -> "TensorElement":
        """The hbar^0 part, still over the same truncation order."""
        return self.hbar_coefficient(0) if self.order else self

    def _copy_with(self, f) -> "TensorElement":
        return TensorElement._trusted(self.algebra, self.arity, {k: f(c) for k, c in self.terms.items()})

    def hbar_coefficient(self, n: int) -> "TensorElement":
        """Coefficient tensor of hbar^n, embedded as a constant tensor of the same order."""
        N = self.order
        return self._copy_with(lambda c: HPoly.constant(c.coeff(n), N))

    def min_hbar_valuation(self) -> int | None:
        vals = [c.valuation() for c in self.terms.values()]
        return min(vals) if vals else None

    def with_order(self, order: int) -> "TensorElement":
        alg = self.algebra.with_order(order)
        return TensorElement._trusted(alg, self.arity,
                                      {k: c.with_order(order) for k, c in self.terms.items()})

    # ------------------------------------------------------------- leg moves
    def embed(self, positions: Sequence[int], m: int) -> "TensorElement":
        return embed_legs(self, positions, m)

    def op(self) -> "TensorElement":
        return flip_op(self)


def tensor_mul(A: TensorElement, B: TensorElement) -> TensorElement:
    """Componentwise product in H^{⊗k}."""
    A._compat(B)
    alg = A.algebra
    if not A.terms or not B.terms:
        return TensorElement.zero(alg, A.arity)
    d = alg.dim
    out: dict[Key, HPoly] = {}
    b_items = list(B.terms.items())
    if alg.signed_monomial:
        tab = alg._signed_table
        for ka, ca in A.terms.items():
            rows = [x * d for x in ka]
            for kb, cb in b_items:
                sign = 1
                key = []
                for r, y in zip(rows, kb):
                    e = tab[r + y]
                    if e is None:
                        break
                    key.append(e[0])
                    sign *= e[1]
                else:
                    key = tuple(key)
                    v = ca * cb
                    if sign < 0:
                        v = -v
                    if key in out:
                        out[key] = out[key] + v
                    else:
                        out[key] = v
        return TensorElement._trusted(alg, A.arity, out)
    tab = alg._general_table
    for ka, ca in A.terms.items():
        for kb, cb in b_items:
            partial: list[tuple[Key, HPoly]] = [((), ca * cb)]
            for x, y in zip(ka, kb):
                entries = tab[x * d + y]
                if not entries:
                    partial = []
                    break
                partial = [(key + (k,), c * ck) for key, c in partial for k, ck in entries]
            for key, v in partial:
                out[key] = out[key] + v if key in out else v
    return TensorElement._trusted(alg, A.arity, out)


def _check_positions(positions: Sequence[int], m: int, arity: int) -> tuple[int, ...]:
    positions = tuple(positions)
    if len(positions) != arity:
        raise ValueError(f"need {arity} positions, got {len(positions)}")
    if len(set(positions)) != len(positions):
        raise ValueError(f"repeated leg position in {positions}")
    if any(p < 1 or p > m for p in positions):
        raise ValueError(f"leg positions {positions} out of range 1..{m}")
    return positions


def embed_legs(T: TensorElement, positions: Sequence[int], m: int) -> TensorElement:
    """Place leg ``j`` of ``T`` at position ``positions[j]`` of H^{⊗m}; units elsewhere."""
    positions = _check_positions(positions, m, T.arity)
    alg = T.algebra
    free = [p for p in range(1, m + 1) if p not in positions]
    if alg._unit_single is not None:
        u = alg._unit_single
        out = {}
        for key, c in T.terms.items():
            new = [u] * m
            for p, k in zip(positions, key):
                new[p - 1] = k
            out[tuple(new)] = c
        return TensorElement._trusted(alg, m, out)
    out: dict[Key, HPoly] = {}
    unit_items = list(alg.unit.items())
    for key, c in T.terms.items():
        for combo in itertools.product(unit_items, repeat=len(free)):
            new = [0] * m
            for p, k in zip(positions, key):
                new[p - 1] = k
            v = c
            for p, (k, ck) in zip(free, combo):
                new[p - 1] = k
                v = v * ck
            nk = tuple(new)
            out[nk] = out[nk] + v if nk in out else v
    return TensorElement._trusted(alg, m, out)


def permute_legs(T: TensorElement, positions: Sequence[int]) -> TensorElement:
    return embed_legs(T, positions, T.arity)


def flip_op(T: TensorElement) -> TensorElement:
    """``T^op = τ(T)`` for arity 2."""
    if T.arity != 2:
        raise ValueError(f"flip_op needs arity 2, got {T.arity}")
    return TensorElement._trusted(T.algebra, 2, {(b, a): c for (a, b), c in T.terms.items()})


def tensor_commutator(A: TensorElement, B: TensorElement) -> TensorElement:
    return A * B - B * A


@dataclass
class AlgebraMorphismData:
    """An algebra map H -> H^{⊗m}, given by the image of every basis element.

    ``target_arity == 0`` encodes a map to the scalars (a counit).
    """

    source: FiniteAlgebra
    target_arity: int
    images: list[TensorElement]
    name: str = ""

    def __post_init__(self) -> None:
        if len(self.images) != self.source.dim:
            raise ValueError("need one image per basis element")
        for img in self.images:
            if img.arity != self.target_arity or img.algebra != self.source:
                raise AlgebraMismatchError("image has wrong arity or algebra")

    def __call__(self, x: TensorElement) -> TensorElement:
        if x.arity != 1:
            raise ValueError("morphisms apply to arity-1 elements; use apply_morphism_leg")
        return apply_morphism_leg(x, 1, self)

    def with_order(self, order: int) -> "AlgebraMorphismData":
        return AlgebraMorphismData(self.source.with_order(order), self.target_arity,
                                   [img.with_order(order) for img in self.images], self.name)

    def multiplicativity_failures(self) -> list[tuple[int, int]]:
        alg = self.source
        bad = []
        for i in range(alg.dim):
            for j in range(alg.dim):
                lhs = self(alg.element(i) * alg.element(j))
                if lhs != self.images[i] * self.images[j]:
                    bad.append((i, j))
        return bad

    def is_unital(self) -> bool:
        return self(self.source.one()) == TensorElement.unit(self.source, self.target_arity)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AlgebraMorphismData):
            return NotImplemented
        return (self.source == other.source and self.target_arity == other.target_arity
                and self.images == other.images)


def apply_morphism_leg(T: TensorElement, leg: int, phi: AlgebraMorphismData) -> TensorElement:
    """Apply ``phi`` to leg ``leg`` (1-based): e.g. (id ⊗ Δ)(χ) is leg 2 with Δ."""
    if not 1 <= leg <= T.arity:
        raise ValueError(f"leg {leg} out of range 1..{T.arity}")
    if phi.source != T.algebra:
        raise AlgebraMismatchError("morphism defined on a different algebra")
    j = leg - 1
    out: dict[Key, HPoly] = {}
    images = phi.images
    for key, c in T.terms.items():
        head, tail = key[:j], key[j + 1:]
        for ik, ic in images[key[j]].terms.items():
            nk = head + ik + tail
            v = c * ic
            out[nk] = out[nk] + v if nk in out else v
    return TensorElement._trusted(T.algebra, T.arity - 1 + phi.target_arity, out)


# ---------------------------------------------------------------- inversion
def _basis_keys(alg: FiniteAlgebra, arity: int) -> list[Key]:
    return list(itertools.product(range(alg.dim), repeat=arity))


def _solve_sparse(rows: list[dict], n_cols: int) -> dict[int, GaussRat] | None:
    """Gauss-Jordan over Q(i) on sparse rows; the key ``-1`` holds the right-hand side.

    Returns the unique solution, or ``None`` when the system is singular.
    """
    pivots: dict[int, dict] = {}
    for row in rows:
        row = dict(row)
        for c in [c for c in row if c in pivots]:
            f = row.get(c)
            if f is None or f.is_zero():
                continue
            for k, v in pivots[c].items():
                nv = row.get(k, GaussRat(0)) - f * v
                if nv.is_zero():
                    row.pop(k, None)
                else:
                    row[k] = nv
        cols = [c for c in row if c >= 0 and not row[c].is_zero()]
        if not cols:
            if -1 in row and not row[-1].is_zero():
                return None
            continue
        pc = min(cols, key=lambda c: (len(row), c))
        inv = row[pc].inverse()
        row = {k: v * inv for k, v in row.items() if not v.is_zero()}
        for c, prow in pivots.items():
            f = prow.get(pc)
            if f is None:
                continue
            for k, v in row.items():
                nv = prow.get(k, GaussRat(0)) - f * v
                if nv.is_zero():
                    prow.pop(k, None)
                else:
                    prow[k] = nv
        pivots[pc] = row
    if len(pivots) != n_cols:
        return None
    return {c: prow.get(-1, GaussRat(0)) for c, prow in pivots.items()}


def _invert_degree0(T0: TensorElement) -> TensorElement:
    alg, k = T0.algebra, T0.arity
    keys = _basis_keys(alg, k)
    col_of = {key: n for n, key in enumerate(keys)}
    # column J of the left-multiplication matrix is T0 * e_J
    rows: dict[Key, dict[int, GaussRat]] = {}
    one = HPoly.one(alg.order)
    for J, key in enumerate(keys):
        prod = T0 * TensorElement._trusted(alg, k, {key: one})
        for K, c in prod.terms.items():
            rows.setdefault(K, {})[J] = c.degree0()
    unit = TensorElement.unit(alg, k)
    for K, c in unit.terms.items():
        rows.setdefault(K, {})[-1] = c.degree0()
    if len(rows) < len(keys):
        raise NotInvertibleError("left multiplication by the constant part is singular")
    sol = _solve_sparse(list(rows.values()), len(keys))
    if sol is None:
        raise NotInvertibleError("left multiplication by the constant part is singular")
    N = alg.order
    return TensorElement._trusted(alg, k, {keys[J]: HPoly.constant(v, N) for J, v in sol.items()})


def tensor_invert(T: TensorElement) -> TensorElement:
    """Two-sided inverse mod hbar^{N+1}: exact solve at hbar^0, then Neumann corrections."""
    if T.arity == 0:
        c = T.terms.get((), HPoly.zero(T.order))
        try:
            return TensorElement.scalar(T.algebra, c.inverse())
        except NonUnitError as exc:
            raise NotInvertibleError(str(exc)) from exc
    T0 = T.degree0()
    Y = _invert_degree0(T0)
    unit = TensorElement.unit(T.algebra, T.arity)
    if Y * T0 != unit or T0 * Y != unit:
        raise NotInvertibleError("constant part has only a one-sided inverse")
    rest = T - T0
    if rest.is_zero():
        return Y
    # T^{-1} = sum_j (-Y rest)^j Y ; (Y rest) has positive hbar valuation
    q = -(Y * rest)
    out = unit
    power = unit
    for _ in range(T.order):
        power = power * q
        if power.is_zero():
            break
        out = out + power
    return out * Y


# -------------------------------------------------------------- exponential
def nilpotency_probe(T: TensorElement, bound: int | None = None) -> bool:
    """True when T^p = 0 for some p <= bound, tested by repeated squaring."""
    if bound is None:
        bound = T.algebra.dim ** T.arity
    P = T
    reach = 1
    while True:
        if P.is_zero():
            return True
        if reach >= bound:
            return False
        P = P * P
        reach *= 2


def exp_element(T: TensorElement, power_bound: int | None = None) -> TensorElement:
    """``sum_j T^j / j!`` for T nilpotent modulo hbar (finitely many terms)."""
    if power_bound is None:
        power_bound = T.algebra.dim ** T.arity
    if not nilpotency_probe(T.degree0(), power_bound):
        raise NotNilpotentError(
            f"constant part is not nilpotent within power bound {power_bound}")
    out = TensorElement.unit(T.algebra, T.arity)
    power = out
    limit = power_bound * (T.order + 1) + 1
    for j in range(1, limit + 1):
        power = (power * T).scale(Fraction(1, j))
        if power.is_zero():
            return out
        out = out + power
    raise NotNilpotentError("series did not terminate")  # unreachable for nilpotent input
