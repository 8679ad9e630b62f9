"""Discounting functions as a closed symbolic family.

Every function here maps step indices to exact fractions in [0, 1], is
non-increasing and tends to 0. Shapes are checked at construction time, so a
value that exists is a valid discounting function.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

ONE = Fraction(1)
ZERO = Fraction(0)


class DiscountError(ValueError):
    """Raised for malformed discount functions or unsupported queries."""


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


class DiscountFn:
    """Base class. Subclasses are frozen dataclasses."""

    def __call__(self, i: int) -> Fraction:
        if i < 0:
            raise DiscountError(f"negative step index {i}")
        return self._value(i)

    def _value(self, i: int) -> Fraction:
        raise NotImplementedError

    def shift(self, k: int) -> DiscountFn:
        """Return g with g(i) = self(i + k), in normal form."""
        if k < 0:
            raise DiscountError(f"negative shift {k}")
        if k == 0:
            return self
        return self._shift(k)

    def _shift(self, k: int) -> DiscountFn:
        return Shifted(self, k)

    def crossing_index(self, bound) -> int:
        """Least i with self(i) <= bound."""
        bound = _frac(bound)
        if bound <= 0:
            raise DiscountError("crossing index needs a positive bound")
        return self._crossing(bound)

    def _crossing(self, bound: Fraction) -> int:
        raise NotImplementedError

    def is_positive(self) -> bool:
        """True when every value is strictly positive."""
        raise NotImplementedError

    def leading_ones(self) -> int:
        """Number of initial indices with value exactly 1."""
        i = 0
        while self._value(i) == ONE:
            i += 1
        return i

    def render(self) -> str:
        raise NotImplementedError

    def __str__(self) -> str:
        return self.render()


@dataclass(frozen=True)
class Exponential(DiscountFn):
    """d(i) = lam ** i."""

    lam: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lam", _frac(self.lam))
        if not ZERO < self.lam < ONE:
            raise DiscountError(f"exponential base must lie in (0,1), got {self.lam}")

    def _value(self, i):
        return self.lam**i

    def _shift(self, k):
        return Scaled(self.lam**k, self)

    def _crossing(self, bound):
        if bound >= 1:
            return 0
        # float estimate on log-scale, then exact correction
        log_bound = math.log(bound.numerator) - math.log(bound.denominator)
        log_lam = math.log(self.lam.numerator) - math.log(self.lam.denominator)
        i = max(0, int(log_bound / log_lam))
        while self.lam**i > bound:
            i += 1
        while i > 0 and self.lam ** (i - 1) <= bound:
            i -= 1
        return i

    def is_positive(self):
        return True

    def render(self):
        return f"exp {self.lam}"


@dataclass(frozen=True)
class Hyperbolic(DiscountFn):
    """d(i) = 1 / (i + 1)."""

    def _value(self, i):
        return Fraction(1, i + 1)

    def _crossing(self, bound):
        if bound >= 1:
            return 0
        # 1/(i+1) <= n/m  <=>  i + 1 >= m/n
        return -(-bound.denominator // bound.numerator) - 1

    def is_positive(self):
        return True

    def render(self):
        return "hyp"


@dataclass(frozen=True)
class Scaled(DiscountFn):
    """d(i) = factor * inner(i)."""

    factor: Fraction
    inner: DiscountFn

    def __post_init__(self):
        object.__setattr__(self, "factor", _frac(self.factor))
        if not ZERO < self.factor <= ONE:
            raise DiscountError(f"scale factor must lie in (0,1], got {self.factor}")
        if not isinstance(self.inner, DiscountFn):
            raise DiscountError("scaled function needs a discount function")
        if isinstance(self.inner, Scaled):
            object.__setattr__(self, "factor", self.factor * self.inner.factor)
            object.__setattr__(self, "inner", self.inner.inner)

    def _value(self, i):
        return self.factor * self.inner._value(i)

    def _shift(self, k):
        if isinstance(self.inner, Exponential):
            return Scaled(self.factor * self.inner.lam**k, self.inner)
        return Scaled(self.factor, self.inner.shift(k))

    def _crossing(self, bound):
        return self.inner._crossing(bound / self.factor)

    def is_positive(self):
        return self.inner.is_positive()

    def render(self):
        return f"scale {self.factor} {self.inner.render()}"


@dataclass(frozen=True)
class Shifted(DiscountFn):
    """d(i) = inner(i + k)."""

    inner: DiscountFn
    k: int

    def __post_init__(self):
        if not isinstance(self.k, int) or self.k < 0:
            raise DiscountError(f"shift amount must be a nonnegative integer, got {self.k!r}")
        if not isinstance(self.inner, DiscountFn):
            raise DiscountError("shifted function needs a discount function")
        if isinstance(self.inner, Shifted):
            object.__setattr__(self, "k", self.k + self.inner.k)
            object.__setattr__(self, "inner", self.inner.inner)

    def _value(self, i):
        return self.inner._value(i + self.k)

    def _shift(self, k):
        return Shifted(self.inner, self.k + k)

    def _crossing(self, bound):
        return max(0, self.inner._crossing(bound) - self.k)

    def is_positive(self):
        return self.inner.is_positive()

    def render(self):
        return f"shift {self.k} {self.inner.render()}"


@dataclass(frozen=True)
class TableThenTail(DiscountFn):
    """d(i) = table[i] for i < len(table), else tail(i) (absolute index)."""

    table: tuple
    tail: DiscountFn

    def __post_init__(self):
        table = tuple(_frac(v) for v in self.table)
        object.__setattr__(self, "table", table)
        if not table:
            raise DiscountError("discount table must be nonempty")
        if not isinstance(self.tail, DiscountFn):
            raise DiscountError("table tail needs a discount function")
        for a in table:
            if not ZERO <= a <= ONE:
                raise DiscountError(f"table entry {a} outside [0,1]")
        for a, b in zip(table, table[1:]):
            if b > a:
                raise DiscountError(f"table is increasing: {a} then {b}")
        if self.tail._value(len(table)) > table[-1]:
            raise DiscountError("tail value exceeds the last table entry")

    def _value(self, i):
        if i < len(self.table):
            return self.table[i]
        return self.tail._value(i)

    def _shift(self, k):
        if k >= len(self.table):
            return self.tail.shift(k)
        return TableThenTail(self.table[k:], self.tail.shift(k))

    def _crossing(self, bound):
        for i, v in enumerate(self.table):
            if v <= bound:
                return i
        return max(len(self.table), self.tail._crossing(bound))

    def is_positive(self):
        return self.table[-1] > 0 and self.tail.is_positive()

    def render(self):
        entries = " ".join(str(v) for v in self.table)
        return f"table {entries} then {self.tail.render()}"


def discount_value(d: DiscountFn, i: int) -> Fraction:
    return d(i)


def shift_discount(d: DiscountFn, k: int) -> DiscountFn:
    return d.shift(k)


def crossing_index(d: DiscountFn, bound) -> int:
    return d.crossing_index(bound)
