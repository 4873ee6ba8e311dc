"""
Threshold, quota and integral formulas of the (k+ε) construction.

With d(u) = 1 − k(1−ε)(1−u)/(k+ε) the thresholds are d_i = d(i/n) and the quotas are
a_i = g(i/n)/n where g(u) = k(1−ε)d(u)/((k+ε)d(u) − ε). Their sum S is a right-endpoint Riemann
sum of the decreasing function g, whose integral over [0, 1] has the closed form
I = (k(1−ε) + ε·ln(1/ε))/(k+ε). S > 1 is the winning certificate; I > 1 tells us it is reachable.

Exact functions return `Fraction`; the integral and the integrand are float guides only.
"""

from __future__ import annotations

from fractions import Fraction
from typing import List, Union

import numpy as np
from scipy import integrate

from flowgame.errors import DomainError
from flowgame.game.rationals import ONE, Rational, as_fraction

FloatLike = Union[float, np.ndarray]


def _check_domain(k: Fraction, eps: Fraction) -> None:
    if k < 1:
        raise DomainError(f"k must be at least 1, got {k}")
    if not 0 < eps < 1:
        raise DomainError(f"eps must lie in (0, 1), got {eps}")


def _check_index(n: int, i: int) -> None:
    if n < 1:
        raise DomainError(f"n must be positive, got {n}")
    if not 1 <= i <= n:
        raise DomainError(f"index {i} outside 1..{n}")


def threshold_d(k: Rational, eps: Rational, n: int, i: int) -> Fraction:
    k, eps = as_fraction(k), as_fraction(eps)
    _check_domain(k, eps)
    _check_index(n, i)
    return ONE - k * (1 - eps) * (1 - Fraction(i, n)) / (k + eps)


def threshold_floor(k: Rational, eps: Rational) -> Fraction:
    """ε(1+k)/(k+ε): the i → 0 limit of d_i and a strict lower bound for every threshold."""
    k, eps = as_fraction(k), as_fraction(eps)
    _check_domain(k, eps)
    return eps * (1 + k) / (k + eps)


def quota_from_threshold(k: Fraction, eps: Fraction, n: int, d: Fraction) -> Fraction:
    denominator = n * (d * (k + eps) - eps)
    if denominator <= 0:
        raise DomainError(f"threshold {d} does not exceed ε/(k+ε)")
    return k * (1 - eps) * d / denominator


def subtree_quota_a(k: Rational, eps: Rational, n: int, i: int) -> Fraction:
    k, eps = as_fraction(k), as_fraction(eps)
    return quota_from_threshold(k, eps, n, threshold_d(k, eps, n, i))


def thresholds(k: Rational, eps: Rational, n: int) -> List[Fraction]:
    return [threshold_d(k, eps, n, i) for i in range(1, n + 1)]


def quotas(k: Rational, eps: Rational, n: int) -> List[Fraction]:
    k, eps = as_fraction(k), as_fraction(eps)
    return [quota_from_threshold(k, eps, n, d) for d in thresholds(k, eps, n)]


def riemann_S(k: Rational, eps: Rational, n: int) -> Fraction:
    return sum(quotas(k, eps, n), Fraction(0))


# ---------------------------------------------------------------------------
# Float guides
# ---------------------------------------------------------------------------


def d_of_u(k: float, eps: float, u: FloatLike) -> FloatLike:
    k, eps = float(k), float(eps)
    return 1.0 - k * (1.0 - eps) * (1.0 - np.asarray(u, dtype=float)) / (k + eps)


def integrand(k: float, eps: float, u: FloatLike) -> FloatLike:
    k, eps = float(k), float(eps)
    d = d_of_u(k, eps, u)
    return k * (1.0 - eps) * d / ((k + eps) * d - eps)


def integral_I(k: float, eps: float) -> float:
    k, eps = float(k), float(eps)
    if not 0.0 < eps < 1.0:
        raise DomainError(f"eps must lie in (0, 1), got {eps}")
    return float((k * (1.0 - eps) + eps * np.log(1.0 / eps)) / (k + eps))


def integral_expansion(k: float, eps: float) -> float:
    """First-order behaviour of I for small ε: 1 + ε(ln(1/ε) − k − 1)/k."""
    k, eps = float(k), float(eps)
    return float(1.0 + eps * (np.log(1.0 / eps) - k - 1.0) / k)


def quadrature_I(k: float, eps: float) -> float:
    value, _ = integrate.quad(lambda u: float(integrand(k, eps, u)), 0.0, 1.0, epsabs=1e-13, epsrel=1e-13, limit=200)
    return float(value)


def riemann_S_float(k: float, eps: float, n: int) -> float:
    """Vectorised right-endpoint sum; agrees with `riemann_S` up to rounding."""
    u = np.arange(1, n + 1, dtype=float) / n
    return float(np.mean(integrand(k, eps, u)))
