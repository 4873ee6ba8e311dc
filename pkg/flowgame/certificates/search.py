from __future__ import annotations

from fractions import Fraction
from typing import Optional

import structlog

from flowgame.certificates.formulas import integral_I, riemann_S
from flowgame.errors import DomainError, SearchCapExceeded
from flowgame.game.rationals import Rational, as_fraction
from flowgame.settings import settings

logger = structlog.get_logger(__name__)


def choose_eps(k: Rational, max_exponent: Optional[int] = None) -> Fraction:
    """Largest ε = 2^-j (j ≥ 2) whose closed-form integral clears 1 by a 2^-(j+3) margin.

    The float test only picks a candidate; `build_cert` certifies it with the exact sum.
    """
    k = as_fraction(k)
    if k < 1:
        raise DomainError(f"k must be at least 1, got {k}")
    last = max_exponent if max_exponent is not None else settings.CERT_MAX_EPS_EXPONENT
    for j in range(2, last + 1):
        eps = Fraction(1, 1 << j)
        if integral_I(float(k), float(eps)) > 1.0 + 2.0 ** -(j + 3):
            return eps
    raise SearchCapExceeded(f"no ε = 2^-j with j ≤ {last} clears the integral guard for k={k}")


def choose_n(k: Rational, eps: Rational, max_n: Optional[int] = None) -> int:
    """Smallest n with exact Riemann sum S(k, ε, n) > 1, by doubling then bisection."""
    k, eps = as_fraction(k), as_fraction(eps)
    cap = max_n if max_n is not None else settings.CERT_MAX_N

    def wins(n: int) -> bool:
        return riemann_S(k, eps, n) > 1

    lo, hi = 0, 1
    while not wins(hi):
        if hi >= cap:
            raise SearchCapExceeded(f"S(k={k}, eps={eps}, n) ≤ 1 for every n ≤ {cap}")
        lo, hi = hi, min(hi * 2, cap)
    # S is not monotone in n in general; the bracket keeps lo failing and hi winning
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if wins(mid):
            hi = mid
        else:
            lo = mid
    logger.debug("n_chosen", k=str(k), eps=str(eps), n=hi)
    return hi
