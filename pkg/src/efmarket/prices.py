"""Exact prices: rationals plus an integer multiple of a symbolic infinitesimal.

All arithmetic in the package runs on :class:`fractions.Fraction`.  Charges of
the form ``p + eps`` are represented by :class:`AugPrice`, which orders
lexicographically on ``(base, eps)``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

Rational = Fraction
Number = Union[int, Fraction]

_RATIONAL_RE = re.compile(r"^\s*[+-]?\d+(\s*/\s*\d+)?\s*$")


def parse_rational(text: str | int | Fraction) -> Fraction:
    """Parse ``"num/den"`` or an integer string. Floats are rejected."""
    if isinstance(text, bool):
        raise ValueError(f"not a rational: {text!r}")
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    if not isinstance(text, str) or not _RATIONAL_RE.match(text):
        raise ValueError(f"not a rational: {text!r}")
    value = Fraction(text.replace(" ", ""))
    return value


def format_rational(x: Fraction) -> str:
    return str(Fraction(x))


def _floor_ratio(a: Fraction, ka: int, b: Fraction, kb: int) -> int:
    """floor((a + ka*eps) / (b + kb*eps)) for infinitesimal eps > 0, b > 0."""
    q = a / b
    fl = q.numerator // q.denominator
    if q != fl:
        return fl
    # a/b is an integer; the sign of the first-order term decides the side
    # (a + ka e)/(b + kb e) = a/b + e (ka*b - a*kb)/b^2 + O(e^2)
    slope = ka * b - a * kb
    return fl if slope >= 0 else fl - 1


@dataclass(frozen=True)
class AugPrice:
    """``base + eps * e`` with ``e`` a positive infinitesimal."""

    base: Fraction
    eps: int = 0

    def __post_init__(self) -> None:
        if not isinstance(self.base, Fraction):
            object.__setattr__(self, "base", Fraction(self.base))
        if not isinstance(self.eps, int) or isinstance(self.eps, bool):
            raise TypeError("eps coefficient must be an int")

    @classmethod
    def of(cls, x: "AugPrice | Number") -> "AugPrice":
        if isinstance(x, AugPrice):
            return x
        if isinstance(x, (int, Fraction)) and not isinstance(x, bool):
            return cls(Fraction(x), 0)
        raise TypeError(f"cannot convert {x!r} to AugPrice")

    @classmethod
    def right_of(cls, x: Number) -> "AugPrice":
        """The price ``x + eps``."""
        return cls(Fraction(x), 1)

    @property
    def limit(self) -> Fraction:
        return self.base

    def value(self, epsilon: Number) -> Fraction:
        """Instantiate the infinitesimal with a concrete positive rational."""
        return self.base + self.eps * Fraction(epsilon)

    def _key(self) -> tuple[Fraction, int]:
        return (self.base, self.eps)

    # arithmetic -----------------------------------------------------------
    def __add__(self, other: "AugPrice | Number") -> "AugPrice":
        o = AugPrice.of(other)
        return AugPrice(self.base + o.base, self.eps + o.eps)

    __radd__ = __add__

    def __sub__(self, other: "AugPrice | Number") -> "AugPrice":
        o = AugPrice.of(other)
        return AugPrice(self.base - o.base, self.eps - o.eps)

    def __rsub__(self, other: "AugPrice | Number") -> "AugPrice":
        return AugPrice.of(other) - self

    def __neg__(self) -> "AugPrice":
        return AugPrice(-self.base, -self.eps)

    def __mul__(self, k: int) -> "AugPrice":
        if not isinstance(k, int) or isinstance(k, bool):
            return NotImplemented
        return AugPrice(self.base * k, self.eps * k)

    __rmul__ = __mul__

    def __floordiv__(self, other: "AugPrice | Number") -> int:
        o = AugPrice.of(other)
        if o <= 0:
            raise ZeroDivisionError("floor division by a nonpositive price")
        return _floor_ratio(self.base, self.eps, o.base, o.eps)

    # ordering -------------------------------------------------------------
    def __eq__(self, other: object) -> bool:
        if isinstance(other, (AugPrice, int, Fraction)) and not isinstance(other, bool):
            return self._key() == AugPrice.of(other)._key()
        return NotImplemented

    def __hash__(self) -> int:
        if self.eps == 0:
            return hash(self.base)
        return hash((self.base, self.eps))

    def __lt__(self, other: "AugPrice | Number") -> bool:
        return self._key() < AugPrice.of(other)._key()

    def __le__(self, other: "AugPrice | Number") -> bool:
        return self._key() <= AugPrice.of(other)._key()

    def __gt__(self, other: "AugPrice | Number") -> bool:
        return self._key() > AugPrice.of(other)._key()

    def __ge__(self, other: "AugPrice | Number") -> bool:
        return self._key() >= AugPrice.of(other)._key()

    def __repr__(self) -> str:
        return f"AugPrice({self})"

    def __str__(self) -> str:
        if self.eps == 0:
            return str(self.base)
        sign = "+" if self.eps > 0 else "-"
        k = abs(self.eps)
        return f"{self.base}{sign}{'' if k == 1 else k}eps"

    def to_json(self) -> dict:
        return {"base": str(self.base), "eps": self.eps}

    @classmethod
    def from_json(cls, obj: dict | str) -> "AugPrice":
        if isinstance(obj, str):
            return cls(parse_rational(obj), 0)
        return cls(parse_rational(obj["base"]), int(obj.get("eps", 0)))


ZERO = AugPrice(Fraction(0), 0)


def floor_div(numer: AugPrice | Number, denom: AugPrice | Number) -> int:
    return AugPrice.of(numer) // denom
