"""Truncated power series in one variable ``t`` over Q.

A series knows its coefficients below ``precision``; everything from
``t^precision`` on is unknown.  ``precision=None`` marks an exact
(polynomial) series.  Orders are only reported when certified.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping

DEFAULT_TRUNCATION = 32


class IndeterminateOrder(ArithmeticError):
    """All retained terms vanish, so the order is not determined by the data."""


def _min(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def _plus(a, b):
    return None if a is None or b is None else a + b


class TruncatedSeries:
    __slots__ = ("coeffs", "precision")

    def __init__(self, coeffs: Mapping[int, object] | Iterable[tuple[int, object]] = (), precision: int | None = None):
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        c: dict[int, Fraction] = {}
        for e, a in items:
            e = int(e)
            if e < 0:
                raise ValueError("power series have nonnegative exponents")
            c[e] = c.get(e, Fraction(0)) + Fraction(a)
        if precision is not None:
            c = {e: a for e, a in c.items() if e < precision}
        self.coeffs = {e: a for e, a in sorted(c.items()) if a != 0}
        self.precision = precision

    @classmethod
    def monomial(cls, e: int, a=1, precision: int | None = None) -> "TruncatedSeries":
        return cls({e: a}, precision)

    @classmethod
    def constant(cls, a) -> "TruncatedSeries":
        return cls({0: a})

    @classmethod
    def zero(cls) -> "TruncatedSeries":
        return cls({})

    def is_exact(self) -> bool:
        return self.precision is None

    def order(self):
        """Order of vanishing; ``None`` stands for infinity (the exact zero series)."""
        if self.coeffs:
            return next(iter(self.coeffs))
        if self.precision is None:
            return None
        raise IndeterminateOrder(f"no nonzero term below t^{self.precision}")

    def _order_bound(self):
        # a certified lower bound for the order, None meaning infinity
        if self.coeffs:
            return next(iter(self.coeffs))
        return self.precision

    def __add__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        other = _coerce(other)
        prec = _min(self.precision, other.precision)
        c = dict(self.coeffs)
        for e, a in other.coeffs.items():
            c[e] = c.get(e, Fraction(0)) + a
        return TruncatedSeries(c, prec)

    __radd__ = __add__

    def __neg__(self) -> "TruncatedSeries":
        return TruncatedSeries({e: -a for e, a in self.coeffs.items()}, self.precision)

    def __sub__(self, other) -> "TruncatedSeries":
        return self + (-_coerce(other))

    def __rsub__(self, other) -> "TruncatedSeries":
        return _coerce(other) - self

    def __mul__(self, other) -> "TruncatedSeries":
        other = _coerce(other)
        # (a + O(t^Na)) (b + O(t^Nb)) is known below min(Na + ord b, Nb + ord a)
        prec = _min(_plus(self.precision, other._order_bound()), _plus(other.precision, self._order_bound()))
        c: dict[int, Fraction] = {}
        for e1, a1 in self.coeffs.items():
            for e2, a2 in other.coeffs.items():
                e = e1 + e2
                if prec is not None and e >= prec:
                    continue
                c[e] = c.get(e, Fraction(0)) + a1 * a2
        return TruncatedSeries(c, prec)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "TruncatedSeries":
        if k < 0:
            return self.inverse() ** (-k)
        out = TruncatedSeries.constant(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def inverse(self, precision: int | None = None) -> "TruncatedSeries":
        """Inverse of a unit series (nonzero constant term).

        Exact polynomials with a nonconstant part have infinite inverses, which
        are truncated at ``precision`` (default :data:`DEFAULT_TRUNCATION`).
        """
        a0 = self.coeffs.get(0)
        if not a0:
            raise ZeroDivisionError("only series with nonzero constant term are invertible")
        if self.precision is None and set(self.coeffs) == {0}:
            return TruncatedSeries({0: 1 / a0})
        N = self.precision if self.precision is not None else (precision or DEFAULT_TRUNCATION)
        inv: dict[int, Fraction] = {0: 1 / a0}
        for n in range(1, N):
            s = sum(self.coeffs.get(k, 0) * inv.get(n - k, 0) for k in range(1, n + 1))
            inv[n] = -s / a0
        return TruncatedSeries(inv, N)

    def truncate(self, precision: int) -> "TruncatedSeries":
        return TruncatedSeries(self.coeffs, _min(self.precision, precision))

    def is_zero_to_precision(self) -> bool:
        return not self.coeffs

    def agrees_with(self, other: "TruncatedSeries") -> bool:
        """Equal on the range where both are known."""
        d = self - other
        return not d.coeffs

    def __eq__(self, other) -> bool:
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return self.coeffs == other.coeffs and self.precision == other.precision

    def __hash__(self) -> int:
        return hash((tuple(self.coeffs.items()), self.precision))

    def __repr__(self) -> str:
        terms = " + ".join(f"{a}*t^{e}" for e, a in self.coeffs.items()) or "0"
        tail = "" if self.precision is None else f" + O(t^{self.precision})"
        return terms + tail

    def to_json(self) -> dict:
        return {
            "terms": [[e, str(a)] for e, a in self.coeffs.items()],
            "precision": self.precision,
        }

    @classmethod
    def from_json(cls, d) -> "TruncatedSeries":
        if isinstance(d, (int, str)) or isinstance(d, Fraction):
            return cls.constant(Fraction(d))
        return cls([(int(e), Fraction(a)) for e, a in d.get("terms", [])], d.get("precision"))


def _coerce(x) -> TruncatedSeries:
    if isinstance(x, TruncatedSeries):
        return x
    return TruncatedSeries.constant(x)
