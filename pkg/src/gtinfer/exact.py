"""Exact rational helpers: perfect-square tests and sign of quadratic surds."""

from __future__ import annotations

from fractions import Fraction
from math import isqrt
from numbers import Rational


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"expected an exact rational, got {type(x).__name__}")


def isqrt_exact(n: int) -> int | None:
    """Integer square root of ``n`` if ``n`` is a perfect square, else None."""
    if n < 0:
        return None
    r = isqrt(n)
    return r if r * r == n else None


def sqrt_rational(q: Fraction) -> Fraction | None:
    """Exact square root of a non-negative rational, or None when irrational.

    A reduced fraction is a rational square iff numerator and denominator
    are both perfect squares.
    """
    q = Fraction(q)
    if q < 0:
        return None
    num = isqrt_exact(q.numerator)
    den = isqrt_exact(q.denominator)
    if num is None or den is None:
        return None
    return Fraction(num, den)


def is_rational_square(q: Fraction) -> bool:
    return sqrt_rational(q) is not None


def surd_sign(u: Fraction, w: Fraction, y: Fraction) -> int:
    """Exact sign of ``u + w*sqrt(y)`` for rationals u, w and y >= 0."""
    if y < 0:
        raise ValueError("surd radicand must be non-negative")
    if w == 0 or y == 0:
        return (u > 0) - (u < 0)
    t = w * w * y  # (w*sqrt(y))**2
    s_w = 1 if w > 0 else -1
    if u == 0:
        return s_w
    s_u = 1 if u > 0 else -1
    if s_u == s_w:
        return s_u
    if u * u > t:
        return s_u
    if u * u < t:
        return s_w
    return 0
