"""
Exact rationals with a single infinite value.

Weights and flows are `Fraction`s. Path sums may be +∞ (a weighted node without flow), which is
represented by `math.inf`; Python orders `Fraction` against `math.inf` correctly and
`Fraction + math.inf` is `math.inf`, so sums and comparisons need no special casing.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Union

from flowgame.errors import ConfigError

ExtRat = Union[Fraction, float]
Rational = Union[Fraction, int, str]

INF: float = math.inf
ZERO = Fraction(0)
ONE = Fraction(1)


def as_fraction(value: Rational) -> Fraction:
    """Coerce ints, Fractions and "p/q" strings; floats are refused to keep the referee exact."""
    if isinstance(value, bool):
        raise ConfigError(f"not a rational: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rat(value)
    raise ConfigError(f"not an exact rational: {value!r}")


def ratio(m: Fraction, a: Fraction) -> ExtRat:
    # m/0 = ∞ for m ≠ 0, 0/0 = 0
    if m == 0:
        return ZERO
    if a == 0:
        return INF
    return m / a


def is_infinite(value: ExtRat) -> bool:
    return isinstance(value, float) and math.isinf(value)


def format_rat(value: ExtRat) -> str:
    if is_infinite(value):
        return "inf"
    frac = Fraction(value)
    if frac.denominator == 1:
        return str(frac.numerator)
    return f"{frac.numerator}/{frac.denominator}"


def parse_rat(text: str) -> Fraction:
    text = text.strip()
    try:
        num, _, den = text.partition("/")
        if not den:
            return Fraction(int(num))
        return Fraction(int(num), int(den))
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"malformed rational {text!r}; expected 'p/q'") from exc


def parse_ext(text: str) -> ExtRat:
    if text.strip() == "inf":
        return INF
    return parse_rat(text)
