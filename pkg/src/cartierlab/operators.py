"""Exact linear operators with entries in Q(i)[ħ]/ħ^{N+1}.

An operator is ``(1/den) · Σ_k ħ^k (RE_k + i IM_k)`` with integer matrices
RE_k, IM_k.  Dimensions up to ``DENSE_LIMIT`` use dense numpy arrays, larger
ones scipy CSR.  Products run in int64 when a magnitude bound proves that no
overflow can happen; otherwise dense blocks switch to Python-int object arrays
and sparse blocks to a dictionary kernel, so results are always exact.
"""

from __future__ import annotations

import math
from functools import reduce
from typing import Iterable, Mapping, Union

import numpy as np
import scipy.sparse as sp

from .scalars import GaussRat, HPoly

DENSE_LIMIT = 512
_SAFE = 1 << 62
# float64 represents every integer below 2^53, so a BLAS product whose partial
# sums are bounded by this is still exact
_FLOAT_EXACT = 1 << 53


class DictMatrix:
    """Row-major sparse matrix of Python ints (the overflow fallback for sparse blocks)."""

    __slots__ = ("shape", "rows")

    def __init__(self, shape: tuple[int, int], rows: dict[int, dict[int, int]] | None = None):
        self.shape = shape
        self.rows = {r: {c: v for c, v in row.items() if v} for r, row in (rows or {}).items()}
        self.rows = {r: row for r, row in self.rows.items() if row}

    @classmethod
    def from_csr(cls, m: sp.csr_matrix) -> "DictMatrix":
        m = m.tocsr()
        rows: dict[int, dict[int, int]] = {}
        for r in range(m.shape[0]):
            lo, hi = m.indptr[r], m.indptr[r + 1]
            if hi > lo:
                rows[r] = {int(c): int(v) for c, v in zip(m.indices[lo:hi], m.data[lo:hi])}
        return cls(m.shape, rows)

    def matmul(self, other: "DictMatrix") -> "DictMatrix":
        out: dict[int, dict[int, int]] = {}
        for r, row in self.rows.items():
            acc: dict[int, int] = {}
            for k, a in row.items():
                orow = other.rows.get(k)
                if orow:
                    for c, b in orow.items():
                        acc[c] = acc.get(c, 0) + a * b
            out[r] = acc
        return DictMatrix(self.shape, out)

    def add(self, other: "DictMatrix", sign: int = 1) -> "DictMatrix":
        out = {r: dict(row) for r, row in self.rows.items()}
        for r, row in other.rows.items():
            dst = out.setdefault(r, {})
            for c, v in row.items():
                dst[c] = dst.get(c, 0) + sign * v
        return DictMatrix(self.shape, out)

    def scale(self, k: int) -> "DictMatrix":
        return DictMatrix(self.shape, {r: {c: v * k for c, v in row.items()} for r, row in self.rows.items()})

    def floordiv(self, k: int) -> "DictMatrix":
        return DictMatrix(self.shape, {r: {c: v // k for c, v in row.items()} for r, row in self.rows.items()})

    def values(self) -> Iterable[int]:
        for row in self.rows.values():
            yield from row.values()

    def items(self):
        for r, row in self.rows.items():
            for c, v in row.items():
                yield r, c, v


Block = Union[np.ndarray, sp.csr_matrix, DictMatrix]


# ------------------------------------------------------------ block kernels
def _max_abs(b: Block) -> int:
    if isinstance(b, DictMatrix):
        return max((abs(v) for v in b.values()), default=0)
    if sp.issparse(b):
        return int(abs(b.data).max()) if b.nnz else 0
    if b.dtype == object:
        return max((abs(int(v)) for v in b.flat), default=0)
    return int(np.abs(b).max()) if b.size else 0


def _is_zero(b: Block) -> bool:
    if isinstance(b, DictMatrix):
        return not b.rows
    if sp.issparse(b):
        return b.count_nonzero() == 0
    return not b.any()


def _gcd(b: Block) -> int:
    if isinstance(b, DictMatrix):
        return reduce(math.gcd, b.values(), 0)
    if sp.issparse(b):
        data = b.data
    else:
        data = b.ravel()
    if data.dtype == object:
        return reduce(math.gcd, (int(v) for v in data), 0)
    data = data[data != 0]
    return int(np.gcd.reduce(np.abs(data))) if data.size else 0


def _to_dict(b: Block) -> DictMatrix:
    if isinstance(b, DictMatrix):
        return b
    if sp.issparse(b):
        return DictMatrix.from_csr(b)
    raise TypeError("dense blocks stay dense")


def _shrink(b: Block) -> Block:
    """Return int64 storage when the entries fit."""
    if isinstance(b, DictMatrix):
        if _max_abs(b) < _SAFE:
            entries = list(b.items())
            if not entries:
                return sp.csr_matrix(b.shape, dtype=np.int64)
            r, c, v = zip(*entries)
            return sp.csr_matrix((np.array(v, dtype=np.int64), (r, c)), shape=b.shape)
        return b
    if not sp.issparse(b) and b.dtype == object and _max_abs(b) < _SAFE:
        return b.astype(np.int64)
    return b


def _mm(a: Block, b: Block, inner: int) -> Block:
    bound = _max_abs(a) * _max_abs(b) * inner
    if isinstance(a, DictMatrix) or isinstance(b, DictMatrix) or (sp.issparse(a) and bound >= _SAFE):
        return _to_dict(a).matmul(_to_dict(b))
    if sp.issparse(a):
        return (a @ b).tocsr()
    if bound >= _SAFE:
        return _shrink(a.astype(object) @ b.astype(object))
    if bound < _FLOAT_EXACT:
        return (a.astype(np.float64) @ b.astype(np.float64)).astype(np.int64)
    return a @ b


def _add(a: Block, b: Block, sign: int = 1) -> Block:
    if isinstance(a, DictMatrix) or isinstance(b, DictMatrix):
        return _to_dict(a).add(_to_dict(b), sign)
    if _max_abs(a) + _max_abs(b) >= _SAFE:
        if sp.issparse(a):
            return _to_dict(a).add(_to_dict(b), sign)
        return a.astype(object) + sign * b.astype(object)
    out = a + b if sign == 1 else a - b
    return out.tocsr() if sp.issparse(out) else out


def _scale(a: Block, k: int) -> Block:
    if k == 1:
        return a
    if isinstance(a, DictMatrix):
        return a.scale(k)
    if _max_abs(a) * abs(k) >= _SAFE:
        if sp.issparse(a):
            return _to_dict(a).scale(k)
        return a.astype(object) * k
    out = a * k
    return out.tocsr() if sp.issparse(out) else out


def _exact_div(a: Block, k: int) -> Block:
    if k == 1:
        return a
    if isinstance(a, DictMatrix):
        return _shrink(a.floordiv(k))
    if sp.issparse(a):
        out = a.copy()
        out.data //= k
        return out
    return _shrink(a // k)


def _eq(a: Block, b: Block) -> bool:
    return _is_zero(_add(a, b, -1))


def _zero_block(dim: int) -> Block:
    if dim > DENSE_LIMIT:
        return sp.csr_matrix((dim, dim), dtype=np.int64)
    return np.zeros((dim, dim), dtype=np.int64)


def _identity_block(dim: int) -> Block:
    if dim > DENSE_LIMIT:
        return sp.identity(dim, dtype=np.int64, format="csr")
    return np.eye(dim, dtype=np.int64)


def _block_from_entries(dim: int, entries: Mapping[tuple[int, int], int]) -> Block:
    if dim > DENSE_LIMIT:
        if any(abs(v) >= _SAFE for v in entries.values()):
            rows: dict[int, dict[int, int]] = {}
            for (r, c), v in entries.items():
                rows.setdefault(r, {})[c] = v
            return DictMatrix((dim, dim), rows)
        if not entries:
            return _zero_block(dim)
        (rs, cs), vs = zip(*entries.keys()), list(entries.values())
        return sp.csr_matrix((np.array(vs, dtype=np.int64), (rs, cs)), shape=(dim, dim))
    dtype = object if any(abs(v) >= _SAFE for v in entries.values()) else np.int64
    m = np.zeros((dim, dim), dtype=dtype)
    for (r, c), v in entries.items():
        m[r, c] = v
    return m


class LinearOperator:
    """Exact square matrix over Q(i)[ħ]/ħ^{N+1}; immutable."""

    __slots__ = ("dim", "order", "den", "blocks")

    def __init__(self, dim: int, order: int, den: int, blocks: list[Block]):
        if dim < 1:
            raise ValueError("operator dimension must be positive")
        if len(blocks) != 2 * (order + 1):
            raise ValueError("need real and imaginary blocks for every ħ degree")
        self.dim = dim
        self.order = order
        self.den = den
        self.blocks = list(blocks)
        self._normalize()

    # constructors ------------------------------------------------------
    @classmethod
    def identity(cls, dim: int, order: int = 0) -> "LinearOperator":
        blocks = [_zero_block(dim) for _ in range(2 * (order + 1))]
        blocks[0] = _identity_block(dim)
        return cls(dim, order, 1, blocks)

    @classmethod
    def zero(cls, dim: int, order: int = 0) -> "LinearOperator":
        return cls(dim, order, 1, [_zero_block(dim) for _ in range(2 * (order + 1))])

    @classmethod
    def from_entries(cls, dim: int, entries: Mapping[tuple[int, int], HPoly | GaussRat | int],
                     order: int = 0) -> "LinearOperator":
        """Build from a sparse map (row, col) -> coefficient."""
        polys = {}
        for rc, v in entries.items():
            if not isinstance(v, HPoly):
                v = HPoly.constant(v, order)
            if v.truncation_order != order:
                raise ValueError("entry truncation order differs from the operator's")
            if v:
                polys[rc] = v
        den = 1
        for v in polys.values():
            den = den * v._den // math.gcd(den, v._den)
        blocks = []
        for slot in range(2 * (order + 1)):
            ent = {rc: v._num[slot] * (den // v._den) for rc, v in polys.items() if v._num[slot]}
            blocks.append(_block_from_entries(dim, ent))
        return cls(dim, order, den, blocks)

    @classmethod
    def permutation(cls, dim: int, images: list[int], order: int = 0) -> "LinearOperator":
        """Operator sending basis vector j to basis vector images[j]."""
        return cls.from_entries(dim, {(images[j], j): 1 for j in range(dim)}, order)

    # internals ---------------------------------------------------------
    def _normalize(self) -> None:
        if self.den < 0:
            self.den = -self.den
            self.blocks = [_scale(b, -1) for b in self.blocks]
        if self.den == 1:
            return
        g = self.den
        for b in self.blocks:
            g = math.gcd(g, _gcd(b))
            if g == 1:
                return
        self.blocks = [_exact_div(b, g) for b in self.blocks]
        self.den //= g

    def _compat(self, other: "LinearOperator") -> None:
        if not isinstance(other, LinearOperator):
            raise TypeError(f"expected LinearOperator, got {type(other).__name__}")
        if other.dim != self.dim or other.order != self.order:
            raise ValueError(f"operator mismatch: dim {self.dim}/{other.dim}, order {self.order}/{other.order}")

    def is_sparse(self) -> bool:
        return self.dim > DENSE_LIMIT

    # arithmetic --------------------------------------------------------
    def __add__(self, other: "LinearOperator") -> "LinearOperator":
        return self._combine(other, 1)

    def __sub__(self, other: "LinearOperator") -> "LinearOperator":
        return self._combine(other, -1)

    def _combine(self, other: "LinearOperator", sign: int) -> "LinearOperator":
        self._compat(other)
        den = self.den * other.den // math.gcd(self.den, other.den)
        fa, fb = den // self.den, den // other.den
        blocks = [_add(_scale(a, fa), _scale(b, fb), sign) for a, b in zip(self.blocks, other.blocks)]
        return LinearOperator(self.dim, self.order, den, blocks)

    def __neg__(self) -> "LinearOperator":
        return LinearOperator(self.dim, self.order, self.den, [_scale(b, -1) for b in self.blocks])

    def scale(self, c) -> "LinearOperator":
        g = GaussRat._coerce(c)
        re, im = g.re, g.im
        den = self.den * (re.denominator * im.denominator // math.gcd(re.denominator, im.denominator))
        cr = int(re * den / self.den)
        ci = int(im * den / self.den)
        blocks = []
        for k in range(self.order + 1):
            a, b = self.blocks[2 * k], self.blocks[2 * k + 1]
            blocks.append(_add(_scale(a, cr), _scale(b, ci), -1))
            blocks.append(_add(_scale(a, ci), _scale(b, cr), 1))
        return LinearOperator(self.dim, self.order, den, blocks)

    def __matmul__(self, other: "LinearOperator") -> "LinearOperator":
        """Composition: (A @ B)(v) = A(B(v))."""
        self._compat(other)
        n, N = self.dim, self.order
        out = [_zero_block(n) for _ in range(2 * (N + 1))]
        for i in range(N + 1):
            ar, ai = self.blocks[2 * i], self.blocks[2 * i + 1]
            if _is_zero(ar) and _is_zero(ai):
                continue
            for j in range(N + 1 - i):
                br, bi = other.blocks[2 * j], other.blocks[2 * j + 1]
                k = i + j
                for x, y, slot, sign in ((ar, br, 2 * k, 1), (ai, bi, 2 * k, -1),
                                         (ar, bi, 2 * k + 1, 1), (ai, br, 2 * k + 1, 1)):
                    if _is_zero(x) or _is_zero(y):
                        continue
                    out[slot] = _add(out[slot], _mm(x, y, n), sign)
        return LinearOperator(n, N, self.den * other.den, out)

    def __mul__(self, other):
        if isinstance(other, LinearOperator):
            return self @ other
        return self.scale(other)

    def __rmul__(self, c) -> "LinearOperator":
        return self.scale(c)

    def __pow__(self, k: int) -> "LinearOperator":
        if k < 0:
            raise ValueError("negative powers need an explicit inverse")
        out = LinearOperator.identity(self.dim, self.order)
        base = self
        while k:
            if k & 1:
                out = out @ base
            k >>= 1
            if k:
                base = base @ base
        return out

    def is_zero(self) -> bool:
        return all(_is_zero(b) for b in self.blocks)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LinearOperator):
            return NotImplemented
        if other.dim != self.dim or other.order != self.order:
            return False
        if self.den != other.den:
            return False
        return all(_eq(a, b) for a, b in zip(self.blocks, other.blocks))

    __hash__ = None

    def commutator(self, other: "LinearOperator") -> "LinearOperator":
        return self @ other - other @ self

    # inspection --------------------------------------------------------
    def entry(self, r: int, c: int) -> HPoly:
        nums = []
        for b in self.blocks:
            if isinstance(b, DictMatrix):
                nums.append(b.rows.get(r, {}).get(c, 0))
            else:
                nums.append(int(b[r, c]))
        return HPoly._raw(nums, self.den, self.order)

    def nonzero_entries(self) -> dict[tuple[int, int], HPoly]:
        keys: set[tuple[int, int]] = set()
        for b in self.blocks:
            if isinstance(b, DictMatrix):
                keys.update((r, c) for r, c, _ in b.items())
            elif sp.issparse(b):
                coo = b.tocoo()
                keys.update((int(r), int(c)) for r, c, v in zip(coo.row, coo.col, coo.data) if v)
            else:
                keys.update((int(r), int(c)) for r, c in zip(*np.nonzero(b)))
        return {rc: self.entry(*rc) for rc in sorted(keys)}

    def nnz(self) -> int:
        return len(self.nonzero_entries())

    def __repr__(self) -> str:
        kind = "sparse" if self.is_sparse() else "dense"
        return f"LinearOperator(dim={self.dim}, order={self.order}, {kind})"
