"""Concrete families: the 2^{n+1}-dimensional algebras E(n) and the group algebra H(2).

E(n) is generated by g, x_1..x_n with g² = 1, x_i g = -g x_i, x_j x_i = -x_i x_j.
Basis monomials are g^a x_S with S an ascending subset; the order is g-flag
major, then subsets by size and lexicographically.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .precartier import PreCartierData, twist_chi
from .quasibialgebra import QuasiBialgebraData, QuasiTriangularData, gauge_twist
from .scalars import GaussRat, I
from .tensor_algebra import (
    AlgebraMorphismData,
    FiniteAlgebra,
    TensorElement,
    exp_element,
)


def _as_matrix(m, n: int, what: str) -> tuple[tuple[GaussRat, ...], ...]:
    rows = [list(r) for r in m]
    if len(rows) != n or any(len(r) != n for r in rows):
        raise ValueError(f"{what} must be a {n}x{n} matrix")
    return tuple(tuple(GaussRat.parse(x) if isinstance(x, str) else GaussRat._coerce(x) for x in r)
                 for r in rows)


@dataclass(frozen=True)
class EnSpec:
    n: int
    a_matrix: tuple
    b_matrix: tuple

    def __post_init__(self) -> None:
        if not isinstance(self.n, int) or self.n < 1:
            raise ValueError("n must be a positive integer")
        object.__setattr__(self, "a_matrix", _as_matrix(self.a_matrix, self.n, "a_matrix"))
        object.__setattr__(self, "b_matrix", _as_matrix(self.b_matrix, self.n, "b_matrix"))

    @classmethod
    def zero(cls, n: int) -> "EnSpec":
        z = [[0] * n for _ in range(n)]
        return cls(n, z, z)


@dataclass(frozen=True, order=True)
class EnBasisIndex:
    g_flag: int
    subset: tuple[int, ...]

    def label(self) -> str:
        body = "".join(f"x{i}" for i in self.subset)
        if self.g_flag:
            return "g" + body
        return body or "1"


def en_basis(n: int) -> list[EnBasisIndex]:
    subsets = [c for k in range(n + 1) for c in itertools.combinations(range(1, n + 1), k)]
    return [EnBasisIndex(g, s) for g in (0, 1) for s in subsets]


def _merge_sign(S: Sequence[int], T: Sequence[int]) -> int:
    """Sign of sorting the concatenation S + T of anticommuting generators."""
    inversions = sum(1 for s in S for t in T if s > t)
    return -1 if inversions % 2 else 1


def en_monomial_product(p: EnBasisIndex, q: EnBasisIndex) -> tuple[int, EnBasisIndex] | None:
    """(g^a x_S)(g^b x_T) = (-1)^{b|S|} sign g^{a+b} x_{S∪T}, or None when S ∩ T ≠ ∅."""
    if set(p.subset) & set(q.subset):
        return None
    sign = -1 if (q.g_flag * len(p.subset)) % 2 else 1
    sign *= _merge_sign(p.subset, q.subset)
    return sign, EnBasisIndex((p.g_flag + q.g_flag) % 2, tuple(sorted(p.subset + q.subset)))


def en_normal_form(word: Sequence[str]) -> tuple[int, EnBasisIndex] | None:
    """Rewrite a word in "g", "x1", ... to ±(basis monomial) using only the relations.

    Rules: x_i g -> -g x_i, g g -> 1, x_j x_i -> -x_i x_j (i < j), x_i x_i -> 0.
    Independent of ``en_monomial_product``; used as its oracle.
    """
    w = [0 if t == "g" else int(t[1:]) for t in word]
    sign = 1
    changed = True
    while changed:
        changed = False
        k = 0
        while k < len(w) - 1:
            a, b = w[k], w[k + 1]
            if a == 0 and b == 0:
                del w[k:k + 2]
                changed = True
                continue
            if a != 0 and a == b:
                return None
            if b == 0 or (a != 0 and a > b):
                w[k], w[k + 1] = b, a
                sign = -sign
                changed = True
            k += 1
    g_flag = 1 if w and w[0] == 0 else 0
    return sign, EnBasisIndex(g_flag, tuple(w[g_flag:]))


def en_word(b: EnBasisIndex) -> list[str]:
    return (["g"] if b.g_flag else []) + [f"x{i}" for i in b.subset]


@lru_cache(maxsize=None)
def en_algebra(n: int) -> FiniteAlgebra:
    basis = en_basis(n)
    pos = {b: k for k, b in enumerate(basis)}
    sc = {}
    for i, p in enumerate(basis):
        for j, q in enumerate(basis):
            res = en_monomial_product(p, q)
            if res is not None:
                sign, b = res
                sc[(i, j)] = {pos[b]: sign}
    return FiniteAlgebra([b.label() for b in basis], sc, {0: 1}, name=f"E({n})")


def en_generators(alg: FiniteAlgebra, n: int) -> tuple[TensorElement, list[TensorElement]]:
    return alg.element("g"), [alg.element(f"x{i}") for i in range(1, n + 1)]


def _images_from_generators(alg: FiniteAlgebra, n: int, g_img: TensorElement,
                            x_imgs: list[TensorElement], arity: int) -> list[TensorElement]:
    """Extend generator images multiplicatively to every basis monomial g^a x_S."""
    out = []
    for b in en_basis(n):
        img = TensorElement.unit(alg, arity)
        if b.g_flag:
            img = img * g_img
        for i in b.subset:
            img = img * x_imgs[i - 1]
        out.append(img)
    return out


def en_coproduct(alg: FiniteAlgebra, n: int, sign: int = 1) -> AlgebraMorphismData:
    """Δ(g) = g⊗g, Δ(x_i) = x_i⊗1 + sign·g⊗x_i."""
    g, xs = en_generators(alg, n)
    one = alg.one()
    dg = TensorElement.outer(g, g)
    dx = [TensorElement.outer(x, one) + TensorElement.outer(g, x).scale(sign) for x in xs]
    return AlgebraMorphismData(alg, 2, _images_from_generators(alg, n, dg, dx, 2), name="coproduct")


def en_counit(alg: FiniteAlgebra, n: int) -> AlgebraMorphismData:
    one = TensorElement.scalar(alg, 1)
    zero = TensorElement.zero(alg, 0)
    return AlgebraMorphismData(alg, 0, _images_from_generators(alg, n, one, [zero] * n, 0), name="counit")


def group_like_half_sum(alg: FiniteAlgebra, sign: int = 1) -> TensorElement:
    """sign·½(1⊗1 + sign·1⊗g + sign·g⊗1 - g⊗g); sign = -1 gives the twisted prefactor."""
    one, g = alg.one(), alg.element("g")
    s = TensorElement.outer(one, one) - TensorElement.outer(g, g)
    t = TensorElement.outer(one, g) + TensorElement.outer(g, one)
    if sign == 1:
        return (s + t).scale(Fraction(1, 2))
    return (s - t).scale(Fraction(-1, 2))


def gx_x_sum(alg: FiniteAlgebra, matrix) -> TensorElement:
    """Σ m_{ij} gx_i⊗x_j."""
    n = len(matrix)
    out = TensorElement.zero(alg, 2)
    for i in range(n):
        for j in range(n):
            c = GaussRat._coerce(matrix[i][j])
            if not c.is_zero():
                out = out + TensorElement.outer(alg.element(f"gx{i + 1}"),
                                                alg.element(f"x{j + 1}")).scale(c)
    return out


def en_rmatrix(alg: FiniteAlgebra, a_matrix) -> TensorElement:
    return group_like_half_sum(alg) * exp_element(gx_x_sum(alg, a_matrix))


def en_chi(alg: FiniteAlgebra, b_matrix) -> TensorElement:
    return gx_x_sum(alg, b_matrix)


def _negate(m) -> list[list[GaussRat]]:
    return [[-GaussRat._coerce(x) for x in row] for row in m]


def build_en(spec: EnSpec) -> PreCartierData:
    n = spec.n
    alg = en_algebra(n)
    base = QuasiBialgebraData(alg, en_coproduct(alg, n), en_counit(alg, n),
                              alg.one(3), alg.one(), alg.one())
    qt = QuasiTriangularData(base, en_rmatrix(alg, spec.a_matrix), {"family": "en", "n": n})
    return PreCartierData(qt, en_chi(alg, spec.b_matrix))


def en_twist(alg: FiniteAlgebra) -> TensorElement:
    """The gauge transformation F = 1⊗g."""
    return TensorElement.outer(alg.one(), alg.element("g"))


def build_en_twisted(spec: EnSpec) -> PreCartierData:
    """Gauge twist of build_en by F = 1⊗g, keeping χ_(b) itself rather than χ_F = χ_(-b)."""
    P = build_en(spec)
    qt = gauge_twist(P.qt, en_twist(P.algebra))
    qt.metadata["family"] = "en-twisted"
    return PreCartierData(qt, P.chi)


def build_en_twisted_via_chi(spec: EnSpec) -> PreCartierData:
    """twist_chi applied to build_en with b negated, so that χ_F = χ_(b)."""
    neg = EnSpec(spec.n, spec.a_matrix, _negate(spec.b_matrix))
    return twist_chi(build_en(neg), en_twist(en_algebra(spec.n)))


def twisted_rmatrix_closed_form(alg: FiniteAlgebra, a_matrix) -> TensorElement:
    """-½(1⊗1 - 1⊗g - g⊗1 - g⊗g)·exp(-Σ a_{ij} gx_i⊗x_j)."""
    return group_like_half_sum(alg, -1) * exp_element(gx_x_sum(alg, _negate(a_matrix)))


def _det(m: list[list[GaussRat]]) -> GaussRat:
    k = len(m)
    total = GaussRat(0)
    for perm in itertools.permutations(range(k)):
        inv = sum(1 for x in range(k) for y in range(x + 1, k) if perm[x] > perm[y])
        term = GaussRat(-1 if inv % 2 else 1)
        for r in range(k):
            term = term * m[r][perm[r]]
        total = total + term
    return total


def rmatrix_power_closed_form(a_matrix, k: int, n: int) -> TensorElement:
    """k! Σ_{|P|=|F|=k} (-1)^{k(k-1)/2} det(a[P,F]) g^k x_P ⊗ x_F."""
    if k < 0:
        raise ValueError("k must be non-negative")
    a = _as_matrix(a_matrix, n, "a_matrix")
    alg = en_algebra(n)
    if k == 0:
        return alg.one(2)
    out = TensorElement.zero(alg, 2)
    if k > n:
        return out
    sign = -1 if (k * (k - 1) // 2) % 2 else 1
    coef = sign * math.factorial(k)
    gpart = "g" if k % 2 else ""
    for Pset in itertools.combinations(range(1, n + 1), k):
        left = alg.element((gpart + "".join(f"x{p}" for p in Pset)) or "1")
        for Fset in itertools.combinations(range(1, n + 1), k):
            d = _det([[a[p - 1][f - 1] for f in Fset] for p in Pset])
            if d.is_zero():
                continue
            right = alg.element("".join(f"x{f}" for f in Fset))
            out = out + TensorElement.outer(left, right).scale(d * coef)
    return out


# ------------------------------------------------------------------- H(2)
@lru_cache(maxsize=None)
def h2_algebra() -> FiniteAlgebra:
    return FiniteAlgebra(["1", "g"], {(0, 0): {0: 1}, (0, 1): {1: 1}, (1, 0): {1: 1}, (1, 1): {0: 1}},
                         {0: 1}, name="H(2)")


def h2_projector(alg: FiniteAlgebra) -> TensorElement:
    """p_- = ½(1 - g)."""
    return (alg.one() - alg.element("g")).scale(Fraction(1, 2))


def h2_rmatrix(alg: FiniteAlgebra, sign: int, inverse: bool = False) -> TensorElement:
    """1⊗1 - (1 ± i)p_-⊗p_-; the inverse uses i³ = -i in place of i."""
    p = h2_projector(alg)
    unit = I ** 3 if inverse else I
    c = GaussRat(1) + (unit if sign > 0 else -unit)
    return alg.one(2) - TensorElement.outer(p, p).scale(c)


def build_h2(sign: str | int) -> QuasiTriangularData:
    s = {"+": 1, "-": -1, 1: 1, -1: -1}.get(sign)
    if s is None:
        raise ValueError("sign must be '+' or '-'")
    alg = h2_algebra()
    g = alg.element("g")
    coproduct = AlgebraMorphismData(alg, 2, [alg.one(2), TensorElement.outer(g, g)], name="coproduct")
    counit = AlgebraMorphismData(alg, 0, [TensorElement.scalar(alg, 1)] * 2, name="counit")
    p = h2_projector(alg)
    phi = alg.one(3) - TensorElement.outer(p, p, p).scale(2)
    base = QuasiBialgebraData(alg, coproduct, counit, phi, alg.one(), alg.one())
    return QuasiTriangularData(base, h2_rmatrix(alg, s), {"family": "h2", "sign": "+" if s > 0 else "-"})
