"""Exact coefficients: Gaussian rationals and truncated polynomials in hbar.

Every element of the library carries coefficients in ``Q(i)[hbar]/(hbar^{N+1})``.
``GaussRat`` is a single Gaussian rational; ``HPoly`` is the truncated
polynomial ring element used everywhere else.

Both are stored as plain Python integers over one positive common
denominator, kept in lowest terms, so equality is structural.
"""

from __future__ import annotations

import re as _re
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence, Union

Rational = Fraction


class OrderMismatchError(ValueError):
    """Two truncated polynomials with different truncation orders were combined."""


class NonUnitError(ArithmeticError):
    """Inversion of an element whose constant term vanishes."""


def _reduce(nums: list[int], den: int) -> tuple[tuple[int, ...], int]:
    if den < 0:
        nums = [-x for x in nums]
        den = -den
    g = gcd(den, *nums)
    if g != 1:
        nums = [x // g for x in nums]
        den //= g
    return tuple(nums), den


class GaussRat:
    """A Gaussian rational ``(a + b i) / d``."""

    __slots__ = ("_a", "_b", "_d")

    def __init__(self, re: Union[int, Fraction, str] = 0, im: Union[int, Fraction] = 0):
        if isinstance(re, str):
            g = GaussRat.parse(re)
            self._a, self._b, self._d = g._a, g._b, g._d
            return
        re = Fraction(re)
        im = Fraction(im)
        d = re.denominator * im.denominator // gcd(re.denominator, im.denominator)
        (a, b), d = _reduce([re.numerator * (d // re.denominator),
                             im.numerator * (d // im.denominator)], d)
        self._a, self._b, self._d = a, b, d

    @classmethod
    def _raw(cls, a: int, b: int, d: int) -> "GaussRat":
        (a, b), d = _reduce([a, b], d)
        obj = object.__new__(cls)
        obj._a, obj._b, obj._d = a, b, d
        return obj

    @property
    def re(self) -> Fraction:
        return Fraction(self._a, self._d)

    @property
    def im(self) -> Fraction:
        return Fraction(self._b, self._d)

    def is_zero(self) -> bool:
        return self._a == 0 and self._b == 0

    def __bool__(self) -> bool:
        return not self.is_zero()

    def conjugate(self) -> "GaussRat":
        return GaussRat._raw(self._a, -self._b, self._d)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = GaussRat(other)
        if not isinstance(other, GaussRat):
            return NotImplemented
        return (self._a, self._b, self._d) == (other._a, other._b, other._d)

    def __hash__(self) -> int:
        if self._b == 0:
            return hash(Fraction(self._a, self._d))
        return hash((self._a, self._b, self._d))

    @staticmethod
    def _coerce(x) -> "GaussRat":
        if isinstance(x, GaussRat):
            return x
        if isinstance(x, (int, Fraction)):
            return GaussRat(x)
        raise TypeError(f"cannot coerce {type(x).__name__} to GaussRat")

    def __add__(self, other) -> "GaussRat":
        o = self._coerce(other)
        if self._d == o._d:
            return GaussRat._raw(self._a + o._a, self._b + o._b, self._d)
        return GaussRat._raw(self._a * o._d + o._a * self._d,
                             self._b * o._d + o._b * self._d, self._d * o._d)

    __radd__ = __add__

    def __neg__(self) -> "GaussRat":
        return GaussRat._raw(-self._a, -self._b, self._d)

    def __sub__(self, other) -> "GaussRat":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "GaussRat":
        return self._coerce(other) - self

    def __mul__(self, other) -> "GaussRat":
        o = self._coerce(other)
        return GaussRat._raw(self._a * o._a - self._b * o._b,
                             self._a * o._b + self._b * o._a, self._d * o._d)

    __rmul__ = __mul__

    def inverse(self) -> "GaussRat":
        n = self._a * self._a + self._b * self._b
        if n == 0:
            raise NonUnitError("zero has no inverse")
        # d / (a + bi) = d (a - bi) / (a^2 + b^2)
        return GaussRat._raw(self._d * self._a, -self._d * self._b, n)

    def __truediv__(self, other) -> "GaussRat":
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other) -> "GaussRat":
        return self._coerce(other) * self.inverse()

    def __pow__(self, k: int) -> "GaussRat":
        if k < 0:
            return self.inverse() ** (-k)
        out = GaussRat(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # serialization: "p/q" or "p/q+r/si" / "p/q-r/si"
    def to_string(self) -> str:
        re_part = f"{self._a // gcd(self._a, self._d)}/{self._d // gcd(self._a, self._d)}"
        if self._b == 0:
            return re_part
        g = gcd(self._b, self._d)
        b, d = self._b // g, self._d // g
        sign = "+" if b > 0 else "-"
        return f"{re_part}{sign}{abs(b)}/{d}i"

    _PATTERN = _re.compile(
        r"^\s*(?P<re>[+-]?\d+(?:/\d+)?)?"
        r"(?:(?P<sign>[+-])?(?P<im>\d+(?:/\d+)?)?(?P<unit>i))?\s*$"
    )

    @classmethod
    def parse(cls, s: str) -> "GaussRat":
        m = cls._PATTERN.match(s)
        if m is None or (m.group("re") is None and m.group("unit") is None):
            raise ValueError(f"malformed Gaussian rational: {s!r}")
        re_part = Fraction(m.group("re")) if m.group("re") else Fraction(0)
        im_part = Fraction(0)
        if m.group("unit"):
            im_part = Fraction(m.group("im")) if m.group("im") else Fraction(1)
            if m.group("sign") == "-":
                im_part = -im_part
            elif m.group("sign") is None and m.group("re") and m.group("im") is None:
                # "3i": the leading number is the imaginary part
                im_part, re_part = re_part, Fraction(0)
            elif m.group("sign") is None and m.group("re") is not None:
                raise ValueError(f"malformed Gaussian rational: {s!r}")
        return cls(re_part, im_part)

    def __repr__(self) -> str:
        return f"GaussRat({self.to_string()!r})"

    __str__ = to_string


I = GaussRat(0, 1)

Coefficient = Union[int, Fraction, GaussRat, "HPoly"]


class HPoly:
    """Element of ``Q(i)[hbar] / (hbar^{N+1})``.

    Stored as integers ``re_0, im_0, re_1, im_1, ...`` over a common
    positive denominator. Immutable.
    """

    __slots__ = ("_num", "_den", "_order")

    def __init__(self, coeffs: Iterable[Union[int, Fraction, GaussRat, str]] = (0,),
                 order: int | None = None):
        gs = [GaussRat(c) if isinstance(c, str) else GaussRat._coerce(c) for c in coeffs]
        if order is None:
            order = max(len(gs) - 1, 0)
        if order < 0:
            raise ValueError("truncation order must be non-negative")
        gs = (gs + [GaussRat(0)] * (order + 1))[: order + 1]
        den = 1
        for g in gs:
            den = den * g._d // gcd(den, g._d)
        nums: list[int] = []
        for g in gs:
            f = den // g._d
            nums.append(g._a * f)
            nums.append(g._b * f)
        self._num, self._den = _reduce(nums, den)
        self._order = order

    @classmethod
    def _raw(cls, nums: Sequence[int], den: int, order: int) -> "HPoly":
        obj = object.__new__(cls)
        obj._num, obj._den = _reduce(list(nums), den)
        obj._order = order
        return obj

    @classmethod
    def constant(cls, c: Union[int, Fraction, GaussRat], order: int = 0) -> "HPoly":
        g = GaussRat._coerce(c)
        nums = [0] * (2 * order + 2)
        nums[0], nums[1] = g._a, g._b
        return cls._raw(nums, g._d, order)

    @classmethod
    def zero(cls, order: int = 0) -> "HPoly":
        return cls._raw([0] * (2 * order + 2), 1, order)

    @classmethod
    def one(cls, order: int = 0) -> "HPoly":
        return cls.constant(1, order)

    @classmethod
    def hbar(cls, order: int) -> "HPoly":
        nums = [0] * (2 * order + 2)
        if order >= 1:
            nums[2] = 1
        return cls._raw(nums, 1, order)

    @property
    def truncation_order(self) -> int:
        return self._order

    @property
    def coeffs(self) -> tuple[GaussRat, ...]:
        n, d = self._num, self._den
        return tuple(GaussRat._raw(n[2 * k], n[2 * k + 1], d) for k in range(self._order + 1))

    def coeff(self, k: int) -> GaussRat:
        if k > self._order:
            return GaussRat(0)
        return GaussRat._raw(self._num[2 * k], self._num[2 * k + 1], self._den)

    def degree0(self) -> GaussRat:
        return self.coeff(0)

    def is_zero(self) -> bool:
        return not any(self._num)

    def __bool__(self) -> bool:
        return any(self._num)

    def is_constant(self) -> bool:
        return not any(self._num[2:])

    def valuation(self) -> int | None:
        """Lowest hbar-degree with a nonzero coefficient, ``None`` for zero."""
        for k in range(self._order + 1):
            if self._num[2 * k] or self._num[2 * k + 1]:
                return k
        return None

    def with_order(self, order: int) -> "HPoly":
        """Truncate or zero-extend to another truncation order."""
        nums = list(self._num[: 2 * order + 2]) + [0] * max(0, 2 * (order - self._order))
        return HPoly._raw(nums, self._den, order)

    def _check(self, other: "HPoly") -> None:
        if other._order != self._order:
            raise OrderMismatchError(
                f"truncation orders differ: {self._order} vs {other._order}")

    def _lift(self, other) -> "HPoly":
        if isinstance(other, HPoly):
            self._check(other)
            return other
        return HPoly.constant(other, self._order)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction, GaussRat)):
            other = HPoly.constant(other, self._order)
        if not isinstance(other, HPoly):
            return NotImplemented
        return (self._order, self._den, self._num) == (other._order, other._den, other._num)

    def __hash__(self) -> int:
        return hash((self._order, self._den, self._num))

    def __add__(self, other) -> "HPoly":
        o = self._lift(other)
        if self._den == o._den:
            return HPoly._raw([x + y for x, y in zip(self._num, o._num)], self._den, self._order)
        d1, d2 = self._den, o._den
        return HPoly._raw([x * d2 + y * d1 for x, y in zip(self._num, o._num)],
                          d1 * d2, self._order)

    __radd__ = __add__

    def __neg__(self) -> "HPoly":
        obj = object.__new__(HPoly)
        obj._num = tuple(-x for x in self._num)
        obj._den = self._den
        obj._order = self._order
        return obj

    def __sub__(self, other) -> "HPoly":
        return self + (-self._lift(other))

    def __rsub__(self, other) -> "HPoly":
        return self._lift(other) - self

    def scale_int(self, k: int) -> "HPoly":
        if k == 1:
            return self
        if k == -1:
            return -self
        return HPoly._raw([x * k for x in self._num], self._den, self._order)

    def __mul__(self, other) -> "HPoly":
        if isinstance(other, int):
            return self.scale_int(other)
        o = self._lift(other)
        a, b = self._num, o._num
        if self._order == 0:
            return HPoly._raw((a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0]),
                              self._den * o._den, 0)
        n = self._order + 1
        out = [0] * (2 * n)
        for p in range(n):
            ar, ai = a[2 * p], a[2 * p + 1]
            if not (ar or ai):
                continue
            for q in range(n - p):
                br, bi = b[2 * q], b[2 * q + 1]
                if not (br or bi):
                    continue
                out[2 * (p + q)] += ar * br - ai * bi
                out[2 * (p + q) + 1] += ar * bi + ai * br
        return HPoly._raw(out, self._den * o._den, self._order)

    __rmul__ = __mul__

    def inverse(self) -> "HPoly":
        """Inverse mod hbar^{N+1}: invert the constant term, then a Neumann series."""
        c0 = self.degree0()
        if c0.is_zero():
            raise NonUnitError("constant term vanishes; element is not a unit")
        inv0 = HPoly.constant(c0.inverse(), self._order)
        # self = c0 (1 - q) with q of positive valuation
        q = HPoly.one(self._order) - self * inv0
        out = HPoly.one(self._order)
        power = HPoly.one(self._order)
        for _ in range(self._order):
            power = power * q
            if power.is_zero():
                break
            out = out + power
        return out * inv0

    def __truediv__(self, other) -> "HPoly":
        return self * self._lift(other).inverse()

    def __pow__(self, k: int) -> "HPoly":
        if k < 0:
            return self.inverse() ** (-k)
        out = HPoly.one(self._order)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def to_json(self) -> list[str]:
        return [c.to_string() for c in self.coeffs]

    @classmethod
    def from_json(cls, data: Sequence[str]) -> "HPoly":
        if isinstance(data, str) or not len(data):
            raise ValueError("HPoly JSON must be a non-empty array of strings")
        return cls([GaussRat.parse(s) for s in data], order=len(data) - 1)

    def __repr__(self) -> str:
        return f"HPoly({self.to_json()!r})"

    def __str__(self) -> str:
        parts = []
        for k, c in enumerate(self.coeffs):
            if c.is_zero():
                continue
            s = c.to_string()
            parts.append(s if k == 0 else f"({s})h^{k}")
        return " + ".join(parts) if parts else "0"


def as_hpoly(x: Coefficient, order: int) -> HPoly:
    if isinstance(x, HPoly):
        if x.truncation_order != order:
            raise OrderMismatchError(
                f"truncation orders differ: {x.truncation_order} vs {order}")
        return x
    return HPoly.constant(x, order)


def scalar_add(a: HPoly, b: HPoly) -> HPoly:
    a._check(b)
    return a + b


def scalar_mul(a: HPoly, b: HPoly) -> HPoly:
    a._check(b)
    return a * b


def scalar_neg(a: HPoly) -> HPoly:
    return -a


def scalar_invert(a: HPoly) -> HPoly:
    return a.inverse()
