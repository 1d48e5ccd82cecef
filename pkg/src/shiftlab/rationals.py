"""Exact number helpers: rational parsing/formatting and Gaussian rationals."""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Union

RatioLike = Union[str, int, float, Fraction]


def parse_ratio(value: RatioLike) -> Fraction:
    """Parse a rational from "p/q" strings, ints, floats or Fractions.

    Floats are converted to their exact binary value, so round trips are
    bit-exact in either direction.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"non-finite rational: {value!r}")
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot parse rational from {type(value).__name__}")


def format_ratio(value: Fraction, mode: str = "exact") -> Union[str, float]:
    """Render a rational for reports: "p/q" in exact mode, float otherwise."""
    if mode == "exact":
        return f"{value.numerator}/{value.denominator}"
    return float(value)


def rational_sqrt(value: Fraction) -> Fraction | None:
    """Exact square root of a nonnegative rational, or None if irrational."""
    if value < 0:
        raise ValueError("negative value has no real square root")
    if value == 0:
        return Fraction(0)
    num = math.isqrt(value.numerator)
    den = math.isqrt(value.denominator)
    if num * num == value.numerator and den * den == value.denominator:
        return Fraction(num, den)
    return None


class GaussianRational:
    """Complex number with exact rational real and imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re: RatioLike = 0, im: RatioLike = 0):
        object.__setattr__(self, "re", parse_ratio(re))
        object.__setattr__(self, "im", parse_ratio(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussianRational is immutable")

    def __repr__(self):
        return f"GaussianRational({self.re!r}, {self.im!r})"

    def __eq__(self, other):
        if isinstance(other, GaussianRational):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)):
            return self.im == 0 and self.re == other
        return NotImplemented

    def __hash__(self):
        return hash((self.re, self.im))

    def __add__(self, other: "GaussianRational") -> "GaussianRational":
        return GaussianRational(self.re + other.re, self.im + other.im)

    def __sub__(self, other: "GaussianRational") -> "GaussianRational":
        return GaussianRational(self.re - other.re, self.im - other.im)

    def __mul__(self, other: "GaussianRational") -> "GaussianRational":
        return GaussianRational(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    def __truediv__(self, other: "GaussianRational") -> "GaussianRational":
        d = other.abs_sq()
        if d == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        num = self * other.conjugate()
        return GaussianRational(num.re / d, num.im / d)

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def abs_sq(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def modulus(self) -> Fraction | None:
        """Exact |z| when it is rational (e.g. Pythagorean inputs), else None."""
        return rational_sqrt(self.abs_sq())

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def to_complex(self) -> complex:
        return complex(float(self.re), float(self.im))


GAUSSIAN_ONE = GaussianRational(1, 0)
GAUSSIAN_ZERO = GaussianRational(0, 0)
